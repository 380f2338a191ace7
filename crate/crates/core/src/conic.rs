//! Weighted quadrance, weighted circles centred at the origin, and how pairs
//! of circles intersect.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};

/// Default bound on q for exhaustive enumeration of F_q².
pub const DEFAULT_ORACLE_CAP: u64 = 125;

/// The coefficients of the form `a x² + b y²`, with `ab = c²`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConicParams {
    field: FieldSpec,
    a: FieldElement,
    b: FieldElement,
    c: FieldElement,
}

impl ConicParams {
    pub fn new(field: &FieldSpec, a: FieldElement, b: FieldElement, c: FieldElement) -> Result<Self> {
        for x in [a, b, c] {
            if !field.contains(x) {
                return Err(Error::FieldMismatch);
            }
            if x.is_zero() {
                return Err(Error::InvalidConic("a, b and c must be nonzero".into()));
            }
        }
        if field.mul(a, b) != field.square(c) {
            return Err(Error::InvalidConic(format!("a·b = {} but c² = {}", field.mul(a, b), field.square(c))));
        }
        Ok(Self {
            field: field.clone(),
            a,
            b,
            c,
        })
    }

    /// Derives `c` as the canonical square root of `ab`.
    pub fn from_ab(field: &FieldSpec, a: FieldElement, b: FieldElement) -> Result<Self> {
        if !field.contains(a) || !field.contains(b) {
            return Err(Error::FieldMismatch);
        }
        let ab = field.mul(a, b);
        if field.quadratic_character(ab) != 1 {
            return Err(Error::InvalidConic(format!(
                "a·b = {ab} must be a nonzero square"
            )));
        }
        let c = field.sqrt(ab).expect("ab is a square");
        Self::new(field, a, b, c)
    }

    /// The plain quadrance `x² + y²`.
    pub fn standard(field: &FieldSpec) -> Self {
        Self::from_ab(field, field.one(), field.one()).expect("1·1 is a square")
    }

    /// A valid triple with `a` a non-square and `b ≠ a`, so neither
    /// coefficient is 1.
    pub fn nontrivial(field: &FieldSpec) -> Self {
        let a = field
            .elements()
            .find(|&x| field.quadratic_character(x) == -1)
            .expect("odd fields have non-squares");
        let t = field
            .elements()
            .find(|&t| {
                let sq = field.square(t);
                !sq.is_zero() && sq != field.one()
            })
            .unwrap_or_else(|| field.one());
        let b = field.mul(a, field.square(t));
        Self::from_ab(field, a, b).expect("a·a·t² is a square")
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn a(&self) -> FieldElement {
        self.a
    }

    pub fn b(&self) -> FieldElement {
        self.b
    }

    pub fn c(&self) -> FieldElement {
        self.c
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "field": &self.field,
            "a": self.field.element_json(self.a),
            "b": self.field.element_json(self.b),
            "c": self.field.element_json(self.c),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: FieldElement,
    pub y: FieldElement,
}

impl Point {
    pub fn new(x: FieldElement, y: FieldElement) -> Self {
        Self { x, y }
    }

    pub fn origin(field: &FieldSpec) -> Self {
        Self::new(field.zero(), field.zero())
    }
}

impl Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (self.x.value(), self.y.value()).serialize(s)
    }
}

/// How the null cone `{X : Q(X) = 0}` is split into classes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NullCircle {
    /// The origin alone is class 0; when q ≡ 1 (mod 4) the other null points
    /// form the isotropic class.
    #[default]
    Split,
    /// Class 0 is the whole null cone. Only differs from `Split` when
    /// q ≡ 1 (mod 4); kept for diagnostics.
    Unsplit,
}

/// Label of a weighted-circle class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassIndex {
    Finite(FieldElement),
    /// Nonzero points of the null cone (q ≡ 1 mod 4 only).
    Isotropic,
}

impl fmt::Display for ClassIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassIndex::Finite(x) => write!(f, "{x}"),
            ClassIndex::Isotropic => f.write_str("iso"),
        }
    }
}

impl ClassIndex {
    pub fn finite(self) -> Option<FieldElement> {
        match self {
            ClassIndex::Finite(x) => Some(x),
            ClassIndex::Isotropic => None,
        }
    }

    pub fn is_zero(self) -> bool {
        matches!(self, ClassIndex::Finite(x) if x.is_zero())
    }
}

/// The ordered set of class labels: F_q, followed by the isotropic class
/// when it exists. Position `v` holds the element with code `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassSet {
    field: FieldSpec,
    isotropic: bool,
}

impl ClassSet {
    pub fn new(field: &FieldSpec, mode: NullCircle) -> Self {
        Self {
            field: field.clone(),
            isotropic: field.minus_one_is_square() && mode == NullCircle::Split,
        }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn has_isotropic(&self) -> bool {
        self.isotropic
    }

    pub fn len(&self) -> usize {
        self.field.order() as usize + usize::from(self.isotropic)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn position(&self, class: ClassIndex) -> Result<usize> {
        match class {
            ClassIndex::Finite(x) if self.field.contains(x) => Ok(x.value() as usize),
            ClassIndex::Isotropic if self.isotropic => Ok(self.field.order() as usize),
            other => Err(Error::IndexInvalid(other.to_string())),
        }
    }

    pub fn class_at(&self, pos: usize) -> ClassIndex {
        let q = self.field.order() as usize;
        assert!(pos < self.len(), "class position {pos} out of range");
        if pos == q {
            ClassIndex::Isotropic
        } else {
            ClassIndex::Finite(self.field.wrap(pos as u32))
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = ClassIndex> + '_ {
        (0..self.len()).map(|pos| self.class_at(pos))
    }

    /// Parses a class label: a canonical element code or `iso`.
    pub fn parse(&self, label: &str) -> Result<ClassIndex> {
        let label = label.trim();
        let class = if label.eq_ignore_ascii_case("iso") || label.eq_ignore_ascii_case("q") {
            ClassIndex::Isotropic
        } else {
            let v: u64 = label
                .parse()
                .map_err(|_| Error::IndexInvalid(label.to_string()))?;
            ClassIndex::Finite(self.field.element(v).map_err(|_| Error::IndexInvalid(label.to_string()))?)
        };
        self.position(class)?;
        Ok(class)
    }

    pub fn label(&self, pos: usize) -> String {
        self.class_at(pos).to_string()
    }
}

/// `a (x₂ − x₁)² + b (y₂ − y₁)²`.
pub fn quadrance(p1: Point, p2: Point, params: &ConicParams) -> Result<FieldElement> {
    let f = params.field();
    if ![p1.x, p1.y, p2.x, p2.y].iter().all(|&c| f.contains(c)) {
        return Err(Error::FieldMismatch);
    }
    let dx = f.sub(p2.x, p1.x);
    let dy = f.sub(p2.y, p1.y);
    Ok(f.add(f.mul(params.a, f.square(dx)), f.mul(params.b, f.square(dy))))
}

/// Class of `p` relative to the origin.
pub fn classify(p: Point, params: &ConicParams) -> Result<ClassIndex> {
    classify_with(p, params, NullCircle::Split)
}

pub fn classify_with(p: Point, params: &ConicParams, mode: NullCircle) -> Result<ClassIndex> {
    let f = params.field();
    let k = quadrance(Point::origin(f), p, params)?;
    let split = mode == NullCircle::Split && f.minus_one_is_square();
    if k.is_zero() && split && p != Point::origin(f) {
        Ok(ClassIndex::Isotropic)
    } else {
        Ok(ClassIndex::Finite(k))
    }
}

/// Points of class `i` in canonical `(x, y)` order, by exhaustive scan.
pub fn circle_points(i: ClassIndex, params: &ConicParams, cap: u64) -> Result<Vec<Point>> {
    circle_points_with(i, params, NullCircle::Split, cap)
}

pub fn circle_points_with(
    i: ClassIndex,
    params: &ConicParams,
    mode: NullCircle,
    cap: u64,
) -> Result<Vec<Point>> {
    let f = params.field();
    check_cap(f, cap)?;
    ClassSet::new(f, mode).position(i)?;
    let mut out = Vec::new();
    for x in f.elements() {
        for y in f.elements() {
            let p = Point::new(x, y);
            if classify_with(p, params, mode)? == i {
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// Number of points in class `i`, in closed form.
pub fn class_size(i: ClassIndex, params: &ConicParams) -> Result<u64> {
    class_size_with(i, params, NullCircle::Split)
}

pub fn class_size_with(i: ClassIndex, params: &ConicParams, mode: NullCircle) -> Result<u64> {
    let f = params.field();
    ClassSet::new(f, mode).position(i)?;
    let q = f.order() as u64;
    let plus = f.minus_one_is_square();
    Ok(match i {
        ClassIndex::Isotropic => 2 * (q - 1),
        ClassIndex::Finite(x) if x.is_zero() => {
            if plus && mode == NullCircle::Unsplit {
                2 * q - 1
            } else {
                1
            }
        }
        ClassIndex::Finite(_) => {
            if plus {
                q - 1
            } else {
                q + 1
            }
        }
    })
}

/// `(2ij + 2jk + 2ki − i² − j² − k²) / 4`, which equals `ij − (i + j − k)²/4`
/// and is symmetric in its arguments.
pub fn f_discriminant(field: &FieldSpec, i: FieldElement, j: FieldElement, k: FieldElement) -> FieldElement {
    let s = field.sub(field.add(i, j), k);
    let quarter = quarter(field);
    field.sub(field.mul(i, j), field.mul(field.square(s), quarter))
}

/// `ij − (i − j − k)²/4`, the form as literally printed alongside the
/// intersection formula. Not symmetric; kept for errata comparison.
pub fn f_discriminant_literal(
    field: &FieldSpec,
    i: FieldElement,
    j: FieldElement,
    k: FieldElement,
) -> FieldElement {
    let s = field.sub(field.sub(i, j), k);
    field.sub(field.mul(i, j), field.mul(field.square(s), quarter(field)))
}

fn quarter(field: &FieldSpec) -> FieldElement {
    field
        .inv(field.from_int(4))
        .expect("4 is invertible in odd characteristic")
}

/// `|C_i(X) ∩ C_j(Y)|` for any centres with `Q(X, Y) = k`, from the character
/// of the discriminant.
pub fn intersection_count(
    i: FieldElement,
    j: FieldElement,
    k: FieldElement,
    params: &ConicParams,
) -> Result<u8> {
    let f = params.field();
    if !(f.contains(i) && f.contains(j) && f.contains(k)) {
        return Err(Error::FieldMismatch);
    }
    if i.is_zero() || j.is_zero() || k.is_zero() {
        return Err(Error::ZeroQuadranceArg {
            i: i.value(),
            j: j.value(),
            k: k.value(),
        });
    }
    Ok((1 + f.quadratic_character(f_discriminant(f, i, j, k))) as u8)
}

pub(crate) fn check_cap(field: &FieldSpec, cap: u64) -> Result<()> {
    let q = field.order() as u64;
    if q > cap {
        return Err(Error::CapExceeded { size: q, cap });
    }
    Ok(())
}

/// Precomputed per-point data over F_q². Point ids are `x·q + y` using
/// canonical element codes.
pub(crate) struct Plane {
    q: u32,
    field: FieldSpec,
    pub(crate) form: Vec<u32>,
    pub(crate) class_pos: Vec<u32>,
}

impl Plane {
    pub(crate) fn new(params: &ConicParams, mode: NullCircle) -> Self {
        let f = params.field();
        let q = f.order();
        let a = params.a.value();
        let b = params.b.value();
        let sq: Vec<u32> = (0..q).map(|x| f.mul_code(x, x)).collect();
        let split = mode == NullCircle::Split && f.minus_one_is_square();
        let mut form = Vec::with_capacity((q * q) as usize);
        let mut class_pos = Vec::with_capacity((q * q) as usize);
        for x in 0..q {
            for y in 0..q {
                let v = f.add_code(f.mul_code(a, sq[x as usize]), f.mul_code(b, sq[y as usize]));
                form.push(v);
                let pos = if v == 0 && split && (x, y) != (0, 0) { q } else { v };
                class_pos.push(pos);
            }
        }
        Self {
            q,
            field: f.clone(),
            form,
            class_pos,
        }
    }

    pub(crate) fn points(&self) -> usize {
        (self.q * self.q) as usize
    }

    #[inline]
    pub(crate) fn add(&self, u: usize, v: usize) -> usize {
        let q = self.q as usize;
        let x = self.field.add_code((u / q) as u32, (v / q) as u32) as usize;
        let y = self.field.add_code((u % q) as u32, (v % q) as u32) as usize;
        x * q + y
    }

    #[inline]
    pub(crate) fn sub(&self, u: usize, v: usize) -> usize {
        let q = self.q as usize;
        let nx = self.field.neg_code((v / q) as u32) as usize;
        let ny = self.field.neg_code((v % q) as u32) as usize;
        self.add(u, nx * q + ny)
    }

    pub(crate) fn point(&self, id: usize) -> Point {
        let q = self.q as usize;
        Point::new(self.field.wrap((id / q) as u32), self.field.wrap((id % q) as u32))
    }
}

/// Outcome of comparing measured circle intersections with the closed-form
/// count for every pair of centres.
#[derive(Clone, Debug, Default, Serialize)]
pub struct IntersectionAudit {
    pub center_pairs: u64,
    pub comparisons: u64,
    /// `(X, Y, i, j, measured, predicted)` for each disagreement.
    pub mismatches: Vec<(Point, Point, u32, u32, u32, u8)>,
}

/// Counts `|C_i(X) ∩ C_j(Y)|` by enumeration for every ordered pair of
/// centres with `Q(X, Y) ≠ 0` and every `i, j ≠ 0`, and compares each count
/// against [`intersection_count`].
pub fn audit_intersections(params: &ConicParams, cap: u64) -> Result<IntersectionAudit> {
    let f = params.field();
    check_cap(f, cap)?;
    let plane = Plane::new(params, NullCircle::Split);
    let q = f.order() as usize;
    let n = plane.points();

    // Predictions depend only on (i, j, k).
    let mut predicted = vec![0u8; q * q * q];
    for i in 1..q {
        for j in 1..q {
            for k in 1..q {
                predicted[(i * q + j) * q + k] =
                    intersection_count(f.wrap(i as u32), f.wrap(j as u32), f.wrap(k as u32), params)?;
            }
        }
    }

    let partial: Vec<IntersectionAudit> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut audit = IntersectionAudit::default();
            let mut counts = vec![0u32; q * q];
            for y in 0..n {
                let k = plane.form[plane.sub(y, x)] as usize;
                if k == 0 {
                    continue;
                }
                counts.iter_mut().for_each(|c| *c = 0);
                for z in 0..n {
                    let i = plane.form[plane.sub(z, x)] as usize;
                    let j = plane.form[plane.sub(z, y)] as usize;
                    counts[i * q + j] += 1;
                }
                audit.center_pairs += 1;
                for i in 1..q {
                    for j in 1..q {
                        let measured = counts[i * q + j];
                        let expect = predicted[(i * q + j) * q + k];
                        audit.comparisons += 1;
                        if measured != expect as u32 {
                            audit.mismatches.push((
                                plane.point(x),
                                plane.point(y),
                                i as u32,
                                j as u32,
                                measured,
                                expect,
                            ));
                        }
                    }
                }
            }
            audit
        })
        .collect();

    let mut total = IntersectionAudit::default();
    for part in partial {
        total.center_pairs += part.center_pairs;
        total.comparisons += part.comparisons;
        total.mismatches.extend(part.mismatches);
    }
    Ok(total)
}

/// Measured intersection count for one pair of centres.
pub fn measured_intersection(
    x: Point,
    y: Point,
    i: FieldElement,
    j: FieldElement,
    params: &ConicParams,
) -> Result<u64> {
    let f = params.field();
    let mut count = 0;
    for zx in f.elements() {
        for zy in f.elements() {
            let z = Point::new(zx, zy);
            if quadrance(x, z, params)? == i && quadrance(y, z, params)? == j {
                count += 1;
            }
        }
    }
    Ok(count)
}
