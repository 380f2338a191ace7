//! Structure constants of the weighted-circle hypergroup.
//!
//! `n[i][j][k]` is the probability that a uniform step from class `i`
//! followed by a uniform step from class `j`, both starting at the origin,
//! ends in class `k`. Tables come either from the closed form or from an
//! exhaustive count over F_q² × F_q².

use std::fmt::Write as _;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::conic::{check_cap, class_size_with, f_discriminant, f_discriminant_literal, ClassIndex, ClassSet, ConicParams, NullCircle, Plane};
use crate::error::{Error, Result};
use crate::field::FieldSpec;

pub type Rational = num_rational::Ratio<i128>;

/// `num/den` rendering used in every export.
pub fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ClosedForm,
    Oracle,
    /// Closed form exactly as printed, without the corrections the oracle
    /// forces. Diagnostic only.
    Literal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableSource {
    ClosedForm,
    Oracle { cap: u64 },
    Literal,
}

/// Dense table of structure constants over a class set.
#[derive(Clone, Debug)]
pub struct StructureTable {
    params: ConicParams,
    classes: ClassSet,
    mode: NullCircle,
    sizes: Vec<u64>,
    entries: Vec<Rational>,
    provenance: Provenance,
}

impl StructureTable {
    pub fn params(&self) -> &ConicParams {
        &self.params
    }

    pub fn field(&self) -> &FieldSpec {
        self.params.field()
    }

    pub fn classes(&self) -> &ClassSet {
        &self.classes
    }

    pub fn mode(&self) -> NullCircle {
        self.mode
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Number of classes.
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    /// Entry by class positions.
    #[inline]
    pub fn at(&self, i: usize, j: usize, k: usize) -> Rational {
        let n = self.len();
        self.entries[(i * n + j) * n + k]
    }

    /// The distribution over `k` of `n[i][j][k]`, by positions.
    pub fn row(&self, i: usize, j: usize) -> &[Rational] {
        let n = self.len();
        &self.entries[(i * n + j) * n..(i * n + j + 1) * n]
    }

    pub fn get(&self, i: ClassIndex, j: ClassIndex, k: ClassIndex) -> Result<Rational> {
        let c = &self.classes;
        Ok(self.at(c.position(i)?, c.position(j)?, c.position(k)?))
    }

    /// CSV with columns `i,j,k,num,den,N_i,N_j`, one row per triple.
    pub fn to_csv(&self) -> String {
        let n = self.len();
        let mut out = String::from("i,j,k,num,den,N_i,N_j\n");
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let r = self.at(i, j, k);
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{}",
                        self.classes.label(i),
                        self.classes.label(j),
                        self.classes.label(k),
                        r.numer(),
                        r.denom(),
                        self.sizes[i],
                        self.sizes[j]
                    );
                }
            }
        }
        out
    }

    /// Nested JSON: `rows[i][j]` is the list of `"num/den"` strings over `k`.
    pub fn to_json(&self) -> serde_json::Value {
        let n = self.len();
        let labels: Vec<String> = (0..n).map(|p| self.classes.label(p)).collect();
        let rows: Vec<Vec<Vec<String>>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| self.row(i, j).iter().map(fmt_rational).collect())
                    .collect()
            })
            .collect();
        serde_json::json!({
            "params": self.params.to_json(),
            "provenance": self.provenance,
            "null_circle": self.mode,
            "classes": labels,
            "sizes": self.sizes,
            "rows": rows,
        })
    }
}

/// Exhaustive table: counts pairs `(u, v)` with `u ∈ C_i`, `v ∈ C_j` and
/// `u + v ∈ C_k`, then normalises by `N_i N_j`.
pub fn oracle_table(params: &ConicParams, cap: u64) -> Result<StructureTable> {
    oracle_table_with(params, NullCircle::Split, cap)
}

pub fn oracle_table_with(params: &ConicParams, mode: NullCircle, cap: u64) -> Result<StructureTable> {
    let f = params.field();
    check_cap(f, cap)?;
    let classes = ClassSet::new(f, mode);
    let n = classes.len();
    let plane = Plane::new(params, mode);

    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n];
    for u in 0..plane.points() {
        by_class[plane.class_pos[u] as usize].push(u);
    }
    let sizes: Vec<u64> = by_class.iter().map(|c| c.len() as u64).collect();

    // counts[i] is the n×n block N[i][j][k].
    let counts: Vec<Vec<u64>> = by_class
        .par_iter()
        .map(|members| {
            let mut block = vec![0u64; n * n];
            for &u in members {
                for v in 0..plane.points() {
                    let j = plane.class_pos[v] as usize;
                    let k = plane.class_pos[plane.add(u, v)] as usize;
                    block[j * n + k] += 1;
                }
            }
            block
        })
        .collect();

    let mut entries = Vec::with_capacity(n * n * n);
    for (i, block) in counts.iter().enumerate() {
        for j in 0..n {
            let denom = (sizes[i] * sizes[j]) as i128;
            for k in 0..n {
                entries.push(Rational::new(block[j * n + k] as i128, denom));
            }
        }
    }
    Ok(StructureTable {
        params: params.clone(),
        classes,
        mode,
        sizes,
        entries,
        provenance: Provenance::Oracle,
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Variant {
    Corrected,
    Literal,
}

/// Closed-form entry by class positions (split null circle).
fn closed_form_at(f: &FieldSpec, i: usize, j: usize, k: usize, variant: Variant) -> Rational {
    let q = f.order() as usize;
    let qi = q as i128;
    let indicator = |b: bool| Rational::from_integer(i128::from(b));
    if i == 0 {
        return indicator(j == k);
    }
    if j == 0 {
        return indicator(i == k);
    }
    let iso = q; // position of the isotropic class, when present
    let chi_f = |a: usize, b: usize, c: usize| {
        let (x, y, z) = (f.wrap(a as u32), f.wrap(b as u32), f.wrap(c as u32));
        let disc = match variant {
            Variant::Corrected => f_discriminant(f, x, y, z),
            Variant::Literal => f_discriminant_literal(f, x, y, z),
        };
        f.quadratic_character(disc) as i128
    };

    if !f.minus_one_is_square() {
        return Rational::new(1 + chi_f(i, j, k), qi + 1);
    }

    let unit = Rational::new(1, qi - 1);
    match (i == iso, j == iso) {
        (false, false) => {
            if k == 0 {
                if i == j {
                    unit
                } else {
                    Rational::zero()
                }
            } else if k == iso {
                if i == j {
                    Rational::zero()
                } else {
                    unit * 2
                }
            } else {
                Rational::new(1 + chi_f(i, j, k), qi - 1)
            }
        }
        (true, true) => {
            if k == iso {
                Rational::new(qi - 2, 2 * (qi - 1))
            } else {
                Rational::new(1, 2 * (qi - 1))
            }
        }
        _ => {
            let other = if i == iso { j } else { i };
            let on_support = match variant {
                // Support is (F_q^* ∪ {iso}) minus the step's own class.
                Variant::Corrected => k != other && k != 0,
                Variant::Literal => k != other,
            };
            if on_support {
                unit
            } else {
                Rational::zero()
            }
        }
    }
}

/// Closed-form structure constant `n[i][j][k]`.
pub fn structure_constant(
    i: ClassIndex,
    j: ClassIndex,
    k: ClassIndex,
    params: &ConicParams,
) -> Result<Rational> {
    let classes = ClassSet::new(params.field(), NullCircle::Split);
    Ok(closed_form_at(
        params.field(),
        classes.position(i)?,
        classes.position(j)?,
        classes.position(k)?,
        Variant::Corrected,
    ))
}

/// One closed-form row `n[i][j][·]` by positions, without building a table.
pub(crate) fn closed_form_row(params: &ConicParams, i: usize, j: usize) -> Vec<Rational> {
    let f = params.field();
    let n = ClassSet::new(f, NullCircle::Split).len();
    (0..n).map(|k| closed_form_at(f, i, j, k, Variant::Corrected)).collect()
}

pub fn build_table(params: &ConicParams, source: TableSource) -> Result<StructureTable> {
    build_table_with(params, source, NullCircle::Split)
}

pub fn build_table_with(
    params: &ConicParams,
    source: TableSource,
    mode: NullCircle,
) -> Result<StructureTable> {
    let f = params.field();
    let (variant, provenance) = match source {
        TableSource::Oracle { cap } => return oracle_table_with(params, mode, cap),
        TableSource::ClosedForm => (Variant::Corrected, Provenance::ClosedForm),
        TableSource::Literal => (Variant::Literal, Provenance::Literal),
    };
    if mode == NullCircle::Unsplit && f.minus_one_is_square() {
        return Err(Error::InvalidArgument(
            "closed-form constants need the split null circle; use the oracle for the unsplit layout".into(),
        ));
    }
    let classes = ClassSet::new(f, mode);
    let n = classes.len();
    let sizes = classes
        .iter()
        .map(|c| class_size_with(c, params, mode))
        .collect::<Result<Vec<_>>>()?;
    let entries: Vec<Rational> = (0..n * n)
        .into_par_iter()
        .flat_map_iter(|ij| {
            let (i, j) = (ij / n, ij % n);
            (0..n).map(move |k| closed_form_at(f, i, j, k, variant))
        })
        .collect();
    Ok(StructureTable {
        params: params.clone(),
        classes,
        mode,
        sizes,
        entries,
        provenance,
    })
}

/// An entry where two tables disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntryMismatch {
    pub i: String,
    pub j: String,
    pub k: String,
    pub left: String,
    pub right: String,
}

/// Entry-by-entry comparison; an index-set mismatch counts as an error.
pub fn compare_tables(left: &StructureTable, right: &StructureTable) -> Result<Vec<EntryMismatch>> {
    if left.classes != right.classes {
        return Err(Error::IndexMismatch);
    }
    let n = left.len();
    let c = &left.classes;
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let (a, b) = (left.at(i, j, k), right.at(i, j, k));
                if a != b {
                    out.push(EntryMismatch {
                        i: c.label(i),
                        j: c.label(j),
                        k: c.label(k),
                        left: fmt_rational(&a),
                        right: fmt_rational(&b),
                    });
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub passed: bool,
    /// Offending `(i, j, k)` labels; for row-level axioms `k` is empty.
    pub violations: Vec<[String; 3]>,
}

impl AxiomCheck {
    fn from(violations: Vec<[String; 3]>) -> Self {
        Self {
            passed: violations.is_empty(),
            violations,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub positivity: AxiomCheck,
    pub normalization: AxiomCheck,
    /// `n[i][j][0] > 0` exactly when `i = j` (every class is its own adjoint).
    pub hermitian: AxiomCheck,
    pub commutativity: AxiomCheck,
    /// Class 0 acts as the identity on both sides.
    pub identity: AxiomCheck,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.checks().iter().all(|(_, c)| c.passed)
    }

    pub fn checks(&self) -> [(&'static str, &AxiomCheck); 5] {
        [
            ("positivity", &self.positivity),
            ("normalization", &self.normalization),
            ("hermitian", &self.hermitian),
            ("commutativity", &self.commutativity),
            ("identity", &self.identity),
        ]
    }
}

pub fn verify_axioms(table: &StructureTable) -> AxiomReport {
    let n = table.len();
    let label = |p: usize| table.classes.label(p);
    let mut positivity = Vec::new();
    let mut normalization = Vec::new();
    let mut hermitian = Vec::new();
    let mut commutativity = Vec::new();
    let mut identity = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let row = table.row(i, j);
            let sum: Rational = row.iter().sum();
            if !sum.is_one() {
                normalization.push([label(i), label(j), String::new()]);
            }
            if (row[0] > Rational::zero()) != (i == j) {
                hermitian.push([label(i), label(j), label(0)]);
            }
            for k in 0..n {
                let v = row[k];
                if v < Rational::zero() {
                    positivity.push([label(i), label(j), label(k)]);
                }
                if v != table.at(j, i, k) {
                    commutativity.push([label(i), label(j), label(k)]);
                }
                if i == 0 {
                    let expected = Rational::from_integer(i128::from(j == k));
                    if v != expected || table.at(j, 0, k) != expected {
                        identity.push([label(0), label(j), label(k)]);
                    }
                }
            }
        }
    }
    AxiomReport {
        positivity: AxiomCheck::from(positivity),
        normalization: AxiomCheck::from(normalization),
        hermitian: AxiomCheck::from(hermitian),
        commutativity: AxiomCheck::from(commutativity),
        identity: AxiomCheck::from(identity),
    }
}

/// For each `(i, j, k)` position triple, checks
/// `Σ_m n[i][j][m] n[m][k][l] = Σ_m n[j][k][m] n[i][m][l]` for every `l` and
/// returns the triples where some `l` fails.
pub fn associativity_defects(
    table: &StructureTable,
    triples: &[(usize, usize, usize)],
) -> Vec<(usize, usize, usize)> {
    let n = table.len();
    triples
        .par_iter()
        .copied()
        .filter(|&(i, j, k)| {
            (0..n).any(|l| {
                let left: Rational = (0..n)
                    .filter(|&m| !table.at(i, j, m).is_zero())
                    .map(|m| table.at(i, j, m) * table.at(m, k, l))
                    .sum();
                let right: Rational = (0..n)
                    .filter(|&m| !table.at(j, k, m).is_zero())
                    .map(|m| table.at(j, k, m) * table.at(i, m, l))
                    .sum();
                left != right
            })
        })
        .collect()
}

/// Some `k` with `n[i][step][k] > 0` and `n[k][step][j] > 0`.
pub fn two_step_support(
    i: ClassIndex,
    j: ClassIndex,
    table: &StructureTable,
    step: ClassIndex,
) -> Result<Option<ClassIndex>> {
    if i.is_zero() || j.is_zero() {
        return Err(Error::InvalidArgument("two-step support needs i, j ≠ 0".into()));
    }
    let c = &table.classes;
    let (pi, pj, ps) = (c.position(i)?, c.position(j)?, c.position(step)?);
    Ok((0..table.len())
        .find(|&k| table.at(pi, ps, k) > Rational::zero() && table.at(k, ps, pj) > Rational::zero())
        .map(|k| c.class_at(k)))
}

/// A disagreement between a printed statement and what the oracle measures.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Erratum {
    pub location: String,
    pub paper_value: String,
    pub oracle_value: String,
}

/// Compares the literal printed constants against the oracle table and
/// appends the standing errata about the minorization constants and the
/// stated stationary distribution.
pub fn errata_report(params: &ConicParams, cap: u64) -> Result<Vec<Erratum>> {
    let f = params.field();
    let q = f.order() as i128;
    let literal = build_table(params, TableSource::Literal)?;
    let oracle = oracle_table(params, cap)?;
    let mut out: Vec<Erratum> = compare_tables(&literal, &oracle)?
        .into_iter()
        .map(|m| Erratum {
            location: format!("n[{}][{}][{}]", m.i, m.j, m.k),
            paper_value: m.left,
            oracle_value: m.right,
        })
        .collect();

    // Which discriminant form the measured intersections follow.
    let symmetric_agrees = build_table(params, TableSource::ClosedForm)
        .and_then(|t| compare_tables(&t, &oracle))?
        .is_empty();
    out.push(Erratum {
        location: "intersection discriminant f(i,j,k)".into(),
        paper_value: "ij - (i - j - k)^2/4".into(),
        oracle_value: if symmetric_agrees {
            "ij - (i + j - k)^2/4".into()
        } else {
            "unresolved".into()
        },
    });

    if f.minus_one_is_square() {
        let sizes = &oracle.sizes;
        let q2 = q * q;
        out.push(Erratum {
            location: "stationary pi(C_i), i != 0 (6-step minorization statement)".into(),
            paper_value: fmt_rational(&Rational::new(q + 1, q2)),
            oracle_value: fmt_rational(&Rational::new(sizes[1] as i128, q2)),
        });
        out.push(Erratum {
            location: "stationary pi(C_iso) (6-step minorization statement)".into(),
            paper_value: fmt_rational(&Rational::new(2 * q - 1, q2)),
            oracle_value: fmt_rational(&Rational::new(sizes[f.order() as usize] as i128, q2)),
        });
    } else {
        out.push(Erratum {
            location: "4-step minorization constant".into(),
            paper_value: "q^2(q-1)/(p+1)^4".into(),
            oracle_value: "q^2(q-1)/(q+1)^4".into(),
        });
    }
    Ok(out)
}
