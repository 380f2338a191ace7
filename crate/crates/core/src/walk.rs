//! The class-level random walk driven by a fixed step class: kernel,
//! distribution evolution, stationarity, mixing times and minorization.

use std::collections::VecDeque;

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::conic::{class_size, ClassIndex, ClassSet, ConicParams, NullCircle};
use crate::error::{Error, Result};
use crate::hypergroup::{closed_form_row, fmt_rational, Rational, StructureTable};

/// 1/(2e), the customary mixing threshold.
pub const EPS_HALF_E: f64 = 0.183_939_720_585_721_16;

/// Largest step count for exact-rational powers.
pub const EXACT_MAX_STEPS: usize = 8;
/// Largest q for exact-rational powers.
pub const EXACT_MAX_Q: u32 = 31;

const STATIONARY_RESIDUAL: f64 = 1e-14;
const MONOTONE_SLACK: f64 = 1e-12;

/// Row-stochastic transition matrix `K(i, j) = n[i][s][j]` over a class set.
#[derive(Clone, Debug)]
pub struct Kernel {
    classes: ClassSet,
    step: ClassIndex,
    exact: Vec<Rational>,
    float: Vec<f64>,
}

impl Kernel {
    pub fn from_table(table: &StructureTable, step: ClassIndex) -> Result<Self> {
        let classes = table.classes().clone();
        let s = classes.position(step)?;
        let n = classes.len();
        let exact: Vec<Rational> = (0..n).flat_map(|i| table.row(i, s).to_vec()).collect();
        Ok(Self::from_exact(classes, step, exact))
    }

    /// Kernel straight from the closed form, without materialising the full
    /// structure table.
    pub fn closed_form(params: &ConicParams, step: ClassIndex) -> Result<Self> {
        let classes = ClassSet::new(params.field(), NullCircle::Split);
        let s = classes.position(step)?;
        let n = classes.len();
        let exact: Vec<Rational> = (0..n)
            .into_par_iter()
            .flat_map_iter(|i| closed_form_row(params, i, s))
            .collect();
        Ok(Self::from_exact(classes, step, exact))
    }

    fn from_exact(classes: ClassSet, step: ClassIndex, exact: Vec<Rational>) -> Self {
        let float = exact.iter().map(to_f64).collect();
        Self {
            classes,
            step,
            exact,
            float,
        }
    }

    pub fn classes(&self) -> &ClassSet {
        &self.classes
    }

    pub fn step(&self) -> ClassIndex {
        self.step
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn exact(&self, i: usize, j: usize) -> Rational {
        self.exact[i * self.len() + j]
    }

    pub fn exact_row(&self, i: usize) -> &[Rational] {
        let n = self.len();
        &self.exact[i * n..(i + 1) * n]
    }

    pub fn prob(&self, i: usize, j: usize) -> f64 {
        self.float[i * self.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.float[i * n..(i + 1) * n]
    }

    /// `d · K` in floating point.
    pub fn apply(&self, d: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut out = vec![0.0; n];
        for (i, &w) in d.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (o, &k) in out.iter_mut().zip(self.row(i)) {
                *o += w * k;
            }
        }
        out
    }

    /// `d · K` in exact arithmetic.
    pub fn apply_exact(&self, d: &[Rational]) -> Vec<Rational> {
        let n = self.len();
        let mut out = vec![Rational::zero(); n];
        for (i, w) in d.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            for (j, k) in self.exact_row(i).iter().enumerate() {
                if !k.is_zero() {
                    out[j] += w * k;
                }
            }
        }
        out
    }

    /// All rows of `K^t` as one dense row-major matrix.
    pub fn power(&self, t: usize) -> Vec<f64> {
        let n = self.len();
        let mut m = identity(n);
        for _ in 0..t {
            m = self.right_multiply(&m);
        }
        m
    }

    fn right_multiply(&self, m: &[f64]) -> Vec<f64> {
        let n = self.len();
        m.par_chunks(n).flat_map_iter(|row| self.apply(row)).collect()
    }

    /// Rows of `K^m` in exact arithmetic.
    pub fn power_exact(&self, m: usize) -> Vec<Vec<Rational>> {
        let n = self.len();
        (0..n)
            .into_par_iter()
            .map(|i| {
                let mut v = vec![Rational::zero(); n];
                v[i] = Rational::from_integer(1);
                for _ in 0..m {
                    v = self.apply_exact(&v);
                }
                v
            })
            .collect()
    }
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

pub(crate) fn to_f64(r: &Rational) -> f64 {
    // Numerators and denominators stay far below 2^53 per factor at the
    // sizes handled exactly; divide as floats.
    r.numer().to_f64().unwrap() / r.denom().to_f64().unwrap()
}

/// A probability vector over a class set, optionally with exact values.
#[derive(Clone, Debug)]
pub struct Distribution {
    classes: ClassSet,
    probs: Vec<f64>,
    exact: Option<Vec<Rational>>,
}

impl Distribution {
    pub fn new(classes: ClassSet, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != classes.len() {
            return Err(Error::IndexMismatch);
        }
        let sum: f64 = probs.iter().sum();
        if probs.iter().any(|&p| p < 0.0 || !p.is_finite()) || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "not a probability vector (sum {sum})"
            )));
        }
        Ok(Self {
            classes,
            probs,
            exact: None,
        })
    }

    pub fn from_exact(classes: ClassSet, exact: Vec<Rational>) -> Result<Self> {
        if exact.len() != classes.len() {
            return Err(Error::IndexMismatch);
        }
        let sum: Rational = exact.iter().sum();
        if exact.iter().any(|p| *p < Rational::zero()) || sum != Rational::from_integer(1) {
            return Err(Error::InvalidArgument(format!(
                "not a probability vector (sum {})",
                fmt_rational(&sum)
            )));
        }
        Ok(Self {
            classes,
            probs: exact.iter().map(to_f64).collect(),
            exact: Some(exact),
        })
    }

    pub fn point_mass(classes: &ClassSet, class: ClassIndex) -> Result<Self> {
        let pos = classes.position(class)?;
        let mut exact = vec![Rational::zero(); classes.len()];
        exact[pos] = Rational::from_integer(1);
        Self::from_exact(classes.clone(), exact)
    }

    pub fn classes(&self) -> &ClassSet {
        &self.classes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn exact(&self) -> Option<&[Rational]> {
        self.exact.as_deref()
    }

    pub fn prob(&self, class: ClassIndex) -> Result<f64> {
        Ok(self.probs[self.classes.position(class)?])
    }

    pub fn to_json(&self) -> serde_json::Value {
        let labels: Vec<String> = (0..self.classes.len()).map(|p| self.classes.label(p)).collect();
        let mut v = serde_json::json!({
            "classes": labels,
            "probs": self.probs,
        });
        if let Some(exact) = &self.exact {
            v["exact"] = exact.iter().map(fmt_rational).collect::<Vec<_>>().into();
        }
        v
    }
}

/// `d0 · K^n` in floating point.
pub fn evolve(d0: &Distribution, kernel: &Kernel, n: usize) -> Result<Distribution> {
    if d0.classes != kernel.classes {
        return Err(Error::IndexMismatch);
    }
    let mut v = d0.probs.clone();
    for _ in 0..n {
        v = kernel.apply(&v);
    }
    Ok(Distribution {
        classes: d0.classes.clone(),
        probs: v,
        exact: None,
    })
}

/// `d0 · K^n` in exact arithmetic; `d0` must carry exact values and
/// `n ≤ 64`.
pub fn evolve_exact(d0: &Distribution, kernel: &Kernel, n: usize) -> Result<Distribution> {
    if d0.classes != kernel.classes {
        return Err(Error::IndexMismatch);
    }
    if n > 64 {
        return Err(Error::InvalidArgument("exact evolution is limited to 64 steps".into()));
    }
    let mut v = d0
        .exact
        .clone()
        .ok_or_else(|| Error::InvalidArgument("initial distribution has no exact values".into()))?;
    for _ in 0..n {
        v = kernel.apply_exact(&v);
    }
    Distribution::from_exact(d0.classes.clone(), v)
}

/// Class sizes over q²: the limiting distribution of every nontrivial walk.
pub fn haar(params: &ConicParams) -> Distribution {
    let classes = ClassSet::new(params.field(), NullCircle::Split);
    let q = params.field().order() as i128;
    let exact = classes
        .iter()
        .map(|c| Rational::new(class_size(c, params).expect("class from own set") as i128, q * q))
        .collect();
    Distribution::from_exact(classes, exact).expect("class sizes partition the plane")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErgodicityCertificate {
    pub irreducible: bool,
    pub aperiodic: bool,
    /// gcd of cycle lengths through class 0, when irreducible.
    pub period: usize,
    /// A class unreachable from class 0 (or that cannot reach it).
    pub unreachable: Option<String>,
    /// A class with a self-loop, if any.
    pub self_loop: Option<String>,
}

impl ErgodicityCertificate {
    pub fn ergodic(&self) -> bool {
        self.irreducible && self.aperiodic
    }
}

/// Irreducibility by forward and backward reachability from class 0; period
/// from BFS levels over the support digraph.
pub fn ergodicity_check(kernel: &Kernel) -> ErgodicityCertificate {
    let n = kernel.len();
    let edge = |i: usize, j: usize| !kernel.exact(i, j).is_zero();
    let bfs = |forward: bool| {
        let mut level = vec![usize::MAX; n];
        level[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                let e = if forward { edge(u, v) } else { edge(v, u) };
                if e && level[v] == usize::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        level
    };
    let fwd = bfs(true);
    let bwd = bfs(false);
    let unreachable = (0..n)
        .find(|&v| fwd[v] == usize::MAX || bwd[v] == usize::MAX)
        .map(|v| kernel.classes.label(v));
    let irreducible = unreachable.is_none();
    let self_loop = (0..n).find(|&i| edge(i, i)).map(|i| kernel.classes.label(i));
    let mut period = 0usize;
    if irreducible {
        for u in 0..n {
            for v in 0..n {
                if edge(u, v) {
                    let diff = (fwd[u] + 1).abs_diff(fwd[v]);
                    period = period.gcd(&diff);
                }
            }
        }
    }
    ErgodicityCertificate {
        irreducible,
        aperiodic: irreducible && period == 1,
        period,
        unreachable,
        self_loop,
    }
}

/// The unique `π` with `πK = π`, by power iteration from the uniform vector.
pub fn stationary(kernel: &Kernel) -> Result<Distribution> {
    let cert = ergodicity_check(kernel);
    if !cert.ergodic() {
        return Err(Error::NotErgodic(format!(
            "irreducible={}, period={}",
            cert.irreducible, cert.period
        )));
    }
    let n = kernel.len();
    let mut v = vec![1.0 / n as f64; n];
    const MAX_ITERS: u64 = 1_000_000;
    for _ in 0..MAX_ITERS {
        let mut next = kernel.apply(&v);
        let sum: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= sum);
        let residual = next
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        v = next;
        if residual <= STATIONARY_RESIDUAL {
            return Distribution::new(kernel.classes.clone(), v);
        }
    }
    Err(Error::Timeout(MAX_ITERS))
}

pub fn tv_distance(mu: &Distribution, nu: &Distribution) -> Result<f64> {
    if mu.classes != nu.classes {
        return Err(Error::IndexMismatch);
    }
    Ok(tv(&mu.probs, &nu.probs))
}

pub(crate) fn tv(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// `max_A |μ(A) − ν(A)|` by enumerating subsets; only for tiny index sets.
pub fn tv_by_subsets(mu: &Distribution, nu: &Distribution) -> Result<f64> {
    if mu.classes != nu.classes {
        return Err(Error::IndexMismatch);
    }
    let n = mu.probs.len();
    if n > 20 {
        return Err(Error::CapExceeded {
            size: n as u64,
            cap: 20,
        });
    }
    Ok((0u32..1 << n)
        .map(|mask| {
            (0..n)
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| mu.probs[b] - nu.probs[b])
                .sum::<f64>()
                .abs()
        })
        .fold(0.0, f64::max))
}

/// Worst-initial-state TV to `pi` for `t = 0..=t_max`.
pub fn tv_curve(kernel: &Kernel, pi: &Distribution, t_max: usize) -> Result<Vec<f64>> {
    if pi.classes != kernel.classes {
        return Err(Error::IndexMismatch);
    }
    let n = kernel.len();
    let mut m = identity(n);
    let mut curve = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        if t > 0 {
            m = kernel.right_multiply(&m);
        }
        curve.push(worst_tv(&m, &pi.probs));
    }
    Ok(curve)
}

fn worst_tv(m: &[f64], pi: &[f64]) -> f64 {
    m.chunks(pi.len()).map(|row| tv(row, pi)).fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// q ≡ 3 (mod 4): four-step minorization.
    #[serde(rename = "3mod4")]
    ThreeModFour,
    /// q ≡ 1 (mod 4): six-step minorization.
    #[serde(rename = "1mod4")]
    OneModFour,
}

impl Branch {
    pub fn of(q: u32) -> Self {
        if q % 4 == 1 {
            Branch::OneModFour
        } else {
            Branch::ThreeModFour
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Branch::ThreeModFour => "3mod4",
            Branch::OneModFour => "1mod4",
        }
    }

    /// Power at which the minorization bound is stated.
    pub fn minorization_steps(self) -> usize {
        match self {
            Branch::ThreeModFour => 4,
            Branch::OneModFour => 6,
        }
    }

    /// The stated minorization constant for this branch at order q.
    pub fn minorization_constant(self, q: u32) -> Rational {
        let q = q as i128;
        match self {
            Branch::ThreeModFour => Rational::new(q * q * (q - 1), (q + 1).pow(4)),
            Branch::OneModFour => Rational::new(1, 3 * q),
        }
    }
}

/// Upper bound on `τ(1/(2e))` obtained from the branch's minorization
/// constant `c` at power `m`: `m · ⌈(1 + ln 2) / c⌉`.
pub fn paper_mixing_bound(q: u32, branch: Branch) -> Result<u64> {
    if Branch::of(q) != branch || q % 2 == 0 {
        return Err(Error::BranchMismatch {
            q,
            branch: branch.name(),
        });
    }
    let qf = q as f64;
    let n = match branch {
        Branch::ThreeModFour => (1.0 + std::f64::consts::LN_2) * (qf + 1.0).powi(4) / (qf * qf * (qf - 1.0)),
        Branch::OneModFour => (1.0 + std::f64::consts::LN_2) * 3.0 * qf,
    };
    Ok(branch.minorization_steps() as u64 * n.ceil() as u64)
}

#[derive(Clone, Debug, Serialize)]
pub struct MixingTime {
    pub tau: usize,
    /// Worst-case TV for `t = 0..=tau`.
    pub curve: Vec<f64>,
}

/// Smallest `t` with `max_i TV(K^t(i, ·), π) ≤ ε`.
pub fn mixing_time(kernel: &Kernel, pi: &Distribution, eps: f64) -> Result<MixingTime> {
    if pi.classes != kernel.classes {
        return Err(Error::IndexMismatch);
    }
    if eps >= 1.0 {
        return Ok(MixingTime {
            tau: 0,
            curve: vec![tv_curve(kernel, pi, 0)?[0]],
        });
    }
    if eps <= 0.0 || eps.is_nan() {
        return Err(Error::InvalidArgument("eps must lie in (0, 1)".into()));
    }
    let q = kernel.classes.field().order();
    let limit = 100 * paper_mixing_bound(q, Branch::of(q)).unwrap_or(1000) as usize;
    let n = kernel.len();
    let mut m = identity(n);
    let mut curve = vec![worst_tv(&m, &pi.probs)];
    let mut t = 0;
    while curve[t] > eps {
        if t >= limit {
            return Err(Error::Timeout(limit as u64));
        }
        m = kernel.right_multiply(&m);
        t += 1;
        let next = worst_tv(&m, &pi.probs);
        if next > curve[t - 1] + MONOTONE_SLACK {
            return Err(Error::NonMonotone {
                t,
                prev: curve[t - 1],
                next,
            });
        }
        curve.push(next);
    }
    Ok(MixingTime { tau: t, curve })
}

#[derive(Clone, Debug, Serialize)]
pub struct Minorization {
    pub steps: usize,
    /// `min_{i,j} K^m(i, j) / π(j)` as a float.
    pub value: f64,
    /// The same minimum in exact arithmetic, when computed exactly.
    #[serde(serialize_with = "ser_opt_rational")]
    pub exact: Option<Rational>,
    /// Labels of a minimising pair.
    pub argmin: (String, String),
}

fn ser_opt_rational<S: serde::Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    r.as_ref().map(fmt_rational).serialize(s)
}

/// `min_{i,j} K^m(i, j) / π(j)`: exact for `m ≤ 8`, `q ≤ 31` and exact `π`,
/// floating point otherwise.
pub fn minorization_constant(kernel: &Kernel, pi: &Distribution, m: usize) -> Result<Minorization> {
    if pi.classes != kernel.classes {
        return Err(Error::IndexMismatch);
    }
    if m == 0 {
        return Err(Error::InvalidArgument("minorization needs m ≥ 1".into()));
    }
    let n = kernel.len();
    let q = kernel.classes.field().order();
    let label = |p: usize| kernel.classes.label(p);
    match pi.exact() {
        Some(pi_exact) if m <= EXACT_MAX_STEPS && q <= EXACT_MAX_Q => {
            let rows = kernel.power_exact(m);
            let mut best: Option<(Rational, usize, usize)> = None;
            for (i, row) in rows.iter().enumerate() {
                for j in 0..n {
                    let r = row[j] / pi_exact[j];
                    if best.map_or(true, |(b, _, _)| r < b) {
                        best = Some((r, i, j));
                    }
                }
            }
            let (r, i, j) = best.expect("nonempty class set");
            Ok(Minorization {
                steps: m,
                value: to_f64(&r),
                exact: Some(r),
                argmin: (label(i), label(j)),
            })
        }
        _ => {
            let km = kernel.power(m);
            let mut best = (f64::INFINITY, 0, 0);
            for i in 0..n {
                for j in 0..n {
                    let r = km[i * n + j] / pi.probs[j];
                    if r < best.0 {
                        best = (r, i, j);
                    }
                }
            }
            Ok(Minorization {
                steps: m,
                value: best.0,
                exact: None,
                argmin: (label(best.1), label(best.2)),
            })
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayRow {
    pub n: usize,
    pub tv: f64,
    pub bound: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    pub steps: usize,
    pub c: f64,
    pub rows: Vec<DecayRow>,
    pub passed: bool,
}

pub const DECAY_TOLERANCE: f64 = 1e-10;

/// Checks `max_x TV(K^{mn}(x, ·), π) ≤ (1 − c)^n` for `n = 1..=n_max`.
pub fn geometric_decay_check(
    kernel: &Kernel,
    pi: &Distribution,
    m: usize,
    c: f64,
    n_max: usize,
) -> Result<DecayReport> {
    let curve = tv_curve(kernel, pi, m * n_max)?;
    let rows: Vec<DecayRow> = (1..=n_max)
        .map(|n| {
            let tv = curve[m * n];
            let bound = (1.0 - c).powi(n as i32);
            DecayRow {
                n,
                tv,
                bound,
                ok: tv <= bound + DECAY_TOLERANCE,
            }
        })
        .collect();
    Ok(DecayReport {
        steps: m,
        c,
        passed: rows.iter().all(|r| r.ok),
        rows,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BoostReport {
    pub eps: f64,
    pub tau_eps: usize,
    pub tau_half_e: usize,
    pub factor: u64,
    pub bound: u64,
    pub holds: bool,
}

/// Checks `τ(ε) ≤ τ(1/(2e)) · ⌈ln(1/ε)⌉`.
pub fn boost_check(kernel: &Kernel, pi: &Distribution, eps: f64) -> Result<BoostReport> {
    if !(eps > 0.0 && eps <= EPS_HALF_E) {
        return Err(Error::InvalidArgument("eps must lie in (0, 1/(2e)]".into()));
    }
    let tau_eps = mixing_time(kernel, pi, eps)?.tau;
    let tau_half_e = mixing_time(kernel, pi, EPS_HALF_E)?.tau;
    let factor = (1.0 / eps).ln().ceil() as u64;
    let bound = tau_half_e as u64 * factor;
    Ok(BoostReport {
        eps,
        tau_eps,
        tau_half_e,
        factor,
        bound,
        holds: tau_eps as u64 <= bound,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MinorizationSummary {
    pub steps: usize,
    pub measured: f64,
    #[serde(serialize_with = "ser_opt_rational")]
    pub measured_exact: Option<Rational>,
    #[serde(serialize_with = "ser_rational")]
    pub paper: Rational,
    /// Whether the stated constant's hypotheses hold at this q.
    pub applicable: bool,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    fmt_rational(r).serialize(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct MixingReport {
    pub q: u32,
    pub branch: Branch,
    pub step: String,
    pub eps: f64,
    pub tau: usize,
    pub paper_bound: u64,
    pub tv_curve: Vec<f64>,
    pub minorization: MinorizationSummary,
}

/// Whether the stated minorization bound is claimed at this q.
pub fn minorization_applies(q: u32) -> bool {
    match Branch::of(q) {
        Branch::ThreeModFour => true,
        Branch::OneModFour => q >= 13,
    }
}

/// Mixing time, bound and minorization summary for the walk driven by
/// `step`, using the closed-form kernel.
pub fn mixing_report(params: &ConicParams, step: ClassIndex, eps: f64) -> Result<MixingReport> {
    let q = params.field().order();
    let branch = Branch::of(q);
    let kernel = Kernel::closed_form(params, step)?;
    let pi = haar(params);
    let mixing = mixing_time(&kernel, &pi, eps)?;
    let m = branch.minorization_steps();
    let minor = minorization_constant(&kernel, &pi, m)?;
    Ok(MixingReport {
        q,
        branch,
        step: step.to_string(),
        eps,
        tau: mixing.tau,
        paper_bound: paper_mixing_bound(q, branch)?,
        tv_curve: mixing.curve,
        minorization: MinorizationSummary {
            steps: m,
            measured: minor.value,
            measured_exact: minor.exact,
            paper: branch.minorization_constant(q),
            applicable: minorization_applies(q),
        },
    })
}

/// One row of the linear-mixing sweep.
#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub q: u32,
    pub branch: Branch,
    pub class_count: usize,
    pub tau_measured: usize,
    pub tau_paper_bound: u64,
    pub minorization_measured: f64,
    pub minorization_paper: f64,
    pub ratio_tau_over_q: f64,
}

pub const SCAN_CSV_HEADER: &str = "q,branch,class_count,tau_measured,tau_paper_bound,minorization_measured,minorization_paper,ratio_tau_over_q";

impl ScanRow {
    pub fn from_report(report: &MixingReport, class_count: usize) -> Self {
        Self {
            q: report.q,
            branch: report.branch,
            class_count,
            tau_measured: report.tau,
            tau_paper_bound: report.paper_bound,
            minorization_measured: report.minorization.measured,
            minorization_paper: to_f64(&report.minorization.paper),
            ratio_tau_over_q: report.tau as f64 / report.q as f64,
        }
    }

    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.q,
            self.branch.name(),
            self.class_count,
            self.tau_measured,
            self.tau_paper_bound,
            fmt_f64(self.minorization_measured),
            fmt_f64(self.minorization_paper),
            fmt_f64(self.ratio_tau_over_q)
        )
    }
}

/// Float rendering with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Scan row for GF(q) with the standard form and step class 1.
pub fn scan_row(params: &ConicParams, eps: f64) -> Result<ScanRow> {
    let step = ClassIndex::Finite(params.field().one());
    let report = mixing_report(params, step, eps)?;
    Ok(ScanRow::from_report(&report, ClassSet::new(params.field(), NullCircle::Split).len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::hypergroup::{build_table, TableSource};

    fn params(q: u64) -> ConicParams {
        ConicParams::standard(&FieldSpec::of_order(q).unwrap())
    }

    fn one(p: &ConicParams) -> ClassIndex {
        ClassIndex::Finite(p.field().one())
    }

    fn zero(p: &ConicParams) -> ClassIndex {
        ClassIndex::Finite(p.field().zero())
    }

    #[test]
    fn kernel_shapes() {
        let p7 = params(7);
        let id = Kernel::closed_form(&p7, zero(&p7)).unwrap();
        for i in 0..7 {
            for j in 0..7 {
                assert_eq!(id.prob(i, j), if i == j { 1.0 } else { 0.0 });
            }
        }
        let k7 = Kernel::closed_form(&p7, one(&p7)).unwrap();
        assert_eq!(k7.len(), 7);
        let p13 = params(13);
        let k13 = Kernel::closed_form(&p13, one(&p13)).unwrap();
        assert_eq!(k13.len(), 14);
        for k in [&k7, &k13] {
            for i in 0..k.len() {
                assert_eq!(k.exact_row(i).iter().sum::<Rational>(), Rational::from_integer(1));
                assert!((k.row(i).iter().sum::<f64>() - 1.0).abs() <= 1e-15);
            }
        }
        let t13 = build_table(&p13, TableSource::ClosedForm).unwrap();
        let from_table = Kernel::from_table(&t13, one(&p13)).unwrap();
        assert_eq!(from_table.exact, k13.exact);
    }

    #[test]
    fn evolve_examples() {
        let p = params(7);
        let k = Kernel::closed_form(&p, one(&p)).unwrap();
        let d0 = Distribution::point_mass(k.classes(), zero(&p)).unwrap();
        assert_eq!(evolve(&d0, &k, 0).unwrap().probs(), d0.probs());
        let d1 = evolve_exact(&d0, &k, 1).unwrap();
        let mass_at_one = Distribution::point_mass(k.classes(), one(&p)).unwrap();
        assert_eq!(d1.exact(), mass_at_one.exact());
        // Two steps from the origin follow the table's C_1·C_1 row.
        let t = build_table(&p, TableSource::ClosedForm).unwrap();
        let d2 = evolve_exact(&d0, &k, 2).unwrap();
        assert_eq!(d2.exact().unwrap(), t.row(1, 1));
        let f2 = evolve(&d0, &k, 2).unwrap();
        for (a, b) in f2.probs().iter().zip(d2.probs()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn haar_examples() {
        let h7 = haar(&params(7));
        let e = h7.exact().unwrap();
        assert_eq!(e[0], Rational::new(1, 49));
        assert!(e[1..].iter().all(|&x| x == Rational::new(8, 49)));
        let h13 = haar(&params(13));
        let e = h13.exact().unwrap();
        assert_eq!(e[0], Rational::new(1, 169));
        assert_eq!(e[13], Rational::new(24, 169));
        assert!(e[1..13].iter().all(|&x| x == Rational::new(12, 169)));
        assert_eq!(e.iter().sum::<Rational>(), Rational::from_integer(1));
    }

    #[test]
    fn stationary_examples() {
        let p7 = params(7);
        let id = Kernel::closed_form(&p7, zero(&p7)).unwrap();
        assert!(matches!(stationary(&id), Err(Error::NotErgodic(_))));
        for q in [7u64, 13] {
            let p = params(q);
            let k = Kernel::closed_form(&p, one(&p)).unwrap();
            let s = stationary(&k).unwrap();
            let h = haar(&p);
            let sup = s.probs().iter().zip(h.probs()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(sup <= 1e-12, "q={q} sup={sup}");
        }
    }

    #[test]
    fn ergodicity_examples() {
        let p7 = params(7);
        let id = Kernel::closed_form(&p7, zero(&p7)).unwrap();
        let c = ergodicity_check(&id);
        assert!(!c.irreducible && !c.ergodic());
        for q in [7u64, 13] {
            let p = params(q);
            let c = ergodicity_check(&Kernel::closed_form(&p, one(&p)).unwrap());
            assert!(c.ergodic(), "q={q}: {c:?}");
            assert_eq!(c.period, 1);
        }
    }

    #[test]
    fn tv_examples() {
        let p = params(7);
        let k = Kernel::closed_form(&p, one(&p)).unwrap();
        let h = haar(&p);
        assert_eq!(tv_distance(&h, &h).unwrap(), 0.0);
        let a = Distribution::point_mass(k.classes(), zero(&p)).unwrap();
        let b = Distribution::point_mass(k.classes(), one(&p)).unwrap();
        assert_eq!(tv_distance(&a, &b).unwrap(), 1.0);
        assert!((tv_distance(&a, &h).unwrap() - 48.0 / 49.0).abs() < 1e-15);
        for t in 0..6 {
            let d = evolve(&a, &k, t).unwrap();
            let x = tv_distance(&d, &h).unwrap();
            let y = tv_by_subsets(&d, &h).unwrap();
            assert!((x - y).abs() < 1e-14);
        }
        let other = haar(&params(11));
        assert_eq!(tv_distance(&h, &other), Err(Error::IndexMismatch));
    }

    #[test]
    fn mixing_examples() {
        let p7 = params(7);
        let k = Kernel::closed_form(&p7, one(&p7)).unwrap();
        let h = haar(&p7);
        assert_eq!(mixing_time(&k, &h, 1.0).unwrap().tau, 0);
        let m = mixing_time(&k, &h, EPS_HALF_E).unwrap();
        assert!(m.tau <= 96);
        assert!(m.curve[m.tau] <= EPS_HALF_E && m.curve[m.tau - 1] > EPS_HALF_E);
        let p13 = params(13);
        let k13 = Kernel::closed_form(&p13, one(&p13)).unwrap();
        let m13 = mixing_time(&k13, &haar(&p13), EPS_HALF_E).unwrap();
        assert!(m13.tau as u64 <= paper_mixing_bound(13, Branch::OneModFour).unwrap());
    }

    #[test]
    fn paper_bound_examples() {
        assert_eq!(paper_mixing_bound(7, Branch::ThreeModFour).unwrap(), 96);
        assert_eq!(paper_mixing_bound(11, Branch::ThreeModFour).unwrap(), 120);
        assert_eq!(paper_mixing_bound(13, Branch::OneModFour).unwrap(), 402);
        assert!(matches!(
            paper_mixing_bound(13, Branch::ThreeModFour),
            Err(Error::BranchMismatch { q: 13, .. })
        ));
    }

    #[test]
    fn minorization_examples() {
        let p7 = params(7);
        let k7 = Kernel::closed_form(&p7, one(&p7)).unwrap();
        let m = minorization_constant(&k7, &haar(&p7), 4).unwrap();
        assert!(m.exact.unwrap() >= Rational::new(294, 4096));
        let p13 = params(13);
        let k13 = Kernel::closed_form(&p13, one(&p13)).unwrap();
        let m = minorization_constant(&k13, &haar(&p13), 6).unwrap();
        assert!(m.exact.unwrap() >= Rational::new(1, 39));
        // Float route agrees with the exact one.
        let float_pi = Distribution::new(k13.classes().clone(), haar(&p13).probs().to_vec()).unwrap();
        let mf = minorization_constant(&k13, &float_pi, 6).unwrap();
        assert!(mf.exact.is_none());
        assert!((mf.value - m.value).abs() < 1e-12);
        // Outside the stated range the value is still computed.
        let p5 = params(5);
        let k5 = Kernel::closed_form(&p5, one(&p5)).unwrap();
        assert!(minorization_constant(&k5, &haar(&p5), 6).unwrap().value > 0.0);
    }

    #[test]
    fn decay_and_boost_examples() {
        let p7 = params(7);
        let k = Kernel::closed_form(&p7, one(&p7)).unwrap();
        let h = haar(&p7);
        // c ≥ 1 makes every bound vacuous-or-tight; c = 0 is vacuous.
        assert!(geometric_decay_check(&k, &h, 4, 0.0, 5).unwrap().passed);
        assert!(geometric_decay_check(&k, &h, 4, 294.0 / 4096.0, 30).unwrap().passed);
        assert!(boost_check(&k, &h, EPS_HALF_E).unwrap().holds);
        assert!(boost_check(&k, &h, 0.01).unwrap().holds);
        assert!(boost_check(&k, &h, 0.5).is_err());
    }
}
