//! Hypergroups of weighted circles over GF(q), q odd, and the random walks
//! they drive.
//!
//! - [`field`]: arithmetic in GF(p^d), quadratic character and square roots.
//! - [`conic`]: the weighted quadrance `a x² + b y²`, its level-set classes
//!   and circle intersection counts.
//! - [`hypergroup`]: exact structure constants from the closed form or from
//!   brute-force enumeration, plus axiom checks.
//! - [`walk`]: the class-level walk, its stationary law, mixing times and
//!   minorization constants.
//! - [`coupling`]: seeded simulation of the walk and of a coupled pair.

pub mod conic;
pub mod coupling;
pub mod error;
pub mod field;
pub mod hypergroup;
pub mod walk;

pub use conic::{ClassIndex, ClassSet, ConicParams, NullCircle, Point};
pub use error::{Error, Result};
pub use field::{FieldElement, FieldSpec};
pub use hypergroup::{Rational, StructureTable, TableSource};
pub use walk::{Distribution, Kernel};
