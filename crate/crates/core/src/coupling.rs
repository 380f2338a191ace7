//! Seeded Monte Carlo for the class-level walk and the coupling of two
//! copies of it.
//!
//! Randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`). A run seeded
//! with `seed` gives trial `t` the stream `t` of the generator keyed by
//! `seed`, so results do not depend on thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::conic::ClassIndex;
use crate::error::{Error, Result};
use crate::walk::{tv, Distribution, Kernel};

/// Steps after which a coupling is declared stuck.
pub const COUPLING_TIMEOUT: u64 = 1_000_000;
/// Minimum number of trials for a Monte Carlo TV estimate.
pub const MIN_TV_TRIALS: usize = 1_000;
/// Bootstrap resamples behind each TV confidence interval.
pub const BOOTSTRAP_RESAMPLES: usize = 400;

const BOOTSTRAP_KEY: u64 = 0x9e37_79b9_7f4a_7c15;

/// Generator for trial `stream` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A single walker: its class position, step count and generator.
#[derive(Clone, Debug)]
pub struct WalkState {
    current: usize,
    steps: u64,
    rng: ChaCha8Rng,
}

impl WalkState {
    pub fn new(kernel: &Kernel, start: ClassIndex, seed: u64) -> Result<Self> {
        Ok(Self {
            current: kernel.classes().position(start)?,
            steps: 0,
            rng: trial_rng(seed, 0),
        })
    }

    pub fn current(&self, kernel: &Kernel) -> ClassIndex {
        kernel.classes().class_at(self.current)
    }

    pub fn position(&self) -> usize {
        self.current
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }
}

/// Draws from a probability row by inverse CDF in canonical order.
fn draw<R: Rng>(row: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (j, &p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return j;
        }
    }
    // Rounding left u above the float total: take the last supported class.
    row.iter().rposition(|&p| p > 0.0).expect("row has support")
}

/// Advances the walker one step and returns its new class.
pub fn sample_step(state: &mut WalkState, kernel: &Kernel) -> ClassIndex {
    state.current = draw(kernel.row(state.current), &mut state.rng);
    state.steps += 1;
    kernel.classes().class_at(state.current)
}

fn check_pair(kernel: &Kernel, pi: &Distribution) -> Result<()> {
    if kernel.classes() != pi.classes() {
        return Err(Error::IndexMismatch);
    }
    Ok(())
}

/// Coalescence time of one coupled pair: `X` starts at `start`, `Y` at a
/// draw from `pi`; they move independently until they meet.
fn coalesce<R: Rng>(start: usize, kernel: &Kernel, pi: &[f64], rng: &mut R) -> Result<u64> {
    let mut x = start;
    let mut y = draw(pi, rng);
    let mut t = 0;
    while x != y {
        if t >= COUPLING_TIMEOUT {
            return Err(Error::Timeout(COUPLING_TIMEOUT));
        }
        x = draw(kernel.row(x), rng);
        y = draw(kernel.row(y), rng);
        t += 1;
    }
    Ok(t)
}

/// First meeting time of the coupled pair for one seed.
pub fn coupled_run(start: ClassIndex, kernel: &Kernel, pi: &Distribution, seed: u64) -> Result<u64> {
    check_pair(kernel, pi)?;
    let i = kernel.classes().position(start)?;
    coalesce(i, kernel, pi.probs(), &mut trial_rng(seed, 0))
}

/// Both coupled chains for `t = 0..=horizon`; once they meet they share
/// every later step.
pub fn coupled_path<R: Rng>(
    start: usize,
    kernel: &Kernel,
    pi: &[f64],
    horizon: usize,
    rng: &mut R,
) -> (Vec<usize>, Vec<usize>) {
    let mut xs = Vec::with_capacity(horizon + 1);
    let mut ys = Vec::with_capacity(horizon + 1);
    let mut x = start;
    let mut y = draw(pi, rng);
    xs.push(x);
    ys.push(y);
    for _ in 0..horizon {
        if x == y {
            x = draw(kernel.row(x), rng);
            y = x;
        } else {
            x = draw(kernel.row(x), rng);
            y = draw(kernel.row(y), rng);
        }
        xs.push(x);
        ys.push(y);
    }
    (xs, ys)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CouplingStats {
    pub start: String,
    pub seed: u64,
    pub trials: usize,
    /// Coalescence time of each trial, in trial order.
    pub times: Vec<u64>,
    /// `tail[t]` = empirical `P(T > t)` for `t = 0..=max T`.
    pub tail: Vec<f64>,
}

impl CouplingStats {
    /// Empirical `P(T > t)`.
    pub fn tail_at(&self, t: usize) -> f64 {
        self.tail.get(t).copied().unwrap_or(0.0)
    }

    pub fn mean(&self) -> f64 {
        self.times.iter().sum::<u64>() as f64 / self.trials as f64
    }

    /// CSV `t,count,empirical_tail` for `t = 0..=max T`.
    pub fn histogram_csv(&self) -> String {
        let mut counts = vec![0u64; self.tail.len()];
        for &t in &self.times {
            counts[t as usize] += 1;
        }
        let mut out = String::from("t,count,empirical_tail\n");
        for (t, (c, p)) in counts.iter().zip(&self.tail).enumerate() {
            out.push_str(&format!("{t},{c},{}\n", crate::walk::fmt_f64(*p)));
        }
        out
    }
}

/// Runs `trials` independent couplings from `start`.
pub fn coupling_stats(
    start: ClassIndex,
    kernel: &Kernel,
    pi: &Distribution,
    trials: usize,
    seed: u64,
) -> Result<CouplingStats> {
    check_pair(kernel, pi)?;
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let i = kernel.classes().position(start)?;
    let times = (0..trials as u64)
        .into_par_iter()
        .map(|trial| coalesce(i, kernel, pi.probs(), &mut trial_rng(seed, trial)))
        .collect::<Result<Vec<u64>>>()?;
    let max_t = *times.iter().max().unwrap() as usize;
    let mut exceed = vec![0u64; max_t + 1];
    for &t in &times {
        // T > s for s = 0..t-1
        for e in exceed.iter_mut().take(t as usize) {
            *e += 1;
        }
    }
    let tail = exceed.iter().map(|&c| c as f64 / trials as f64).collect();
    Ok(CouplingStats {
        start: start.to_string(),
        seed,
        trials,
        times,
        tail,
    })
}

/// Per-time class counts of both coupled chains.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoupledMarginals {
    pub times: Vec<usize>,
    /// `first[k][c]`: trials with the started chain in class `c` at `times[k]`.
    pub first: Vec<Vec<u64>>,
    /// Same for the chain started from `pi`.
    pub second: Vec<Vec<u64>>,
}

pub fn coupled_marginals(
    start: ClassIndex,
    kernel: &Kernel,
    pi: &Distribution,
    trials: usize,
    seed: u64,
    times: &[usize],
) -> Result<CoupledMarginals> {
    check_pair(kernel, pi)?;
    let i = kernel.classes().position(start)?;
    let n = kernel.len();
    let horizon = times.iter().copied().max().unwrap_or(0);
    let zero = || (vec![vec![0u64; n]; times.len()], vec![vec![0u64; n]; times.len()]);
    let (first, second) = (0..trials as u64)
        .into_par_iter()
        .fold(zero, |(mut a, mut b), trial| {
            let (xs, ys) = coupled_path(i, kernel, pi.probs(), horizon, &mut trial_rng(seed, trial));
            for (k, &t) in times.iter().enumerate() {
                a[k][xs[t]] += 1;
                b[k][ys[t]] += 1;
            }
            (a, b)
        })
        .reduce(zero, |(mut a, mut b), (c, d)| {
            for (x, y) in a.iter_mut().flatten().zip(c.iter().flatten()) {
                *x += y;
            }
            for (x, y) in b.iter_mut().flatten().zip(d.iter().flatten()) {
                *x += y;
            }
            (a, b)
        });
    Ok(CoupledMarginals {
        times: times.to_vec(),
        first,
        second,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TvEstimate {
    pub t: usize,
    pub trials: usize,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Empirical law of `X_t`.
    pub empirical: Vec<f64>,
}

impl TvEstimate {
    /// Interval membership with 1e-12 slack for float summation order.
    pub fn contains(&self, x: f64) -> bool {
        self.ci_low - 1e-12 <= x && x <= self.ci_high + 1e-12
    }
}

/// Empirical TV between the law of `X_t` (started at `start`) and `pi`, with
/// a 95% bootstrap interval.
///
/// The interval is `estimate ± r`, clipped to [0, 1], where `r` is the 95th
/// percentile of `TV(p*, p̂)` over bootstrap resamples `p*` of the empirical
/// law `p̂`. By the triangle inequality `|TV(p̂, π) − TV(p, π)| ≤ TV(p̂, p)`, and
/// the resampled radius estimates the law of `TV(p̂, p)`; a percentile
/// interval around the plug-in estimate would instead inherit its upward
/// bias near zero.
pub fn monte_carlo_tv(
    start: ClassIndex,
    t: usize,
    trials: usize,
    seed: u64,
    kernel: &Kernel,
    pi: &Distribution,
) -> Result<TvEstimate> {
    check_pair(kernel, pi)?;
    if trials < MIN_TV_TRIALS {
        return Err(Error::InvalidArgument(format!(
            "Monte Carlo TV needs at least {MIN_TV_TRIALS} trials"
        )));
    }
    let i = kernel.classes().position(start)?;
    let n = kernel.len();
    let zero = || vec![0u64; n];
    let counts = (0..trials as u64)
        .into_par_iter()
        .fold(zero, |mut acc, trial| {
            let mut rng = trial_rng(seed, trial);
            let mut x = i;
            for _ in 0..t {
                x = draw(kernel.row(x), &mut rng);
            }
            acc[x] += 1;
            acc
        })
        .reduce(zero, |mut a, b| {
            a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
            a
        });
    let empirical: Vec<f64> = counts.iter().map(|&c| c as f64 / trials as f64).collect();
    let estimate = tv(&empirical, pi.probs());

    let mut radii: Vec<f64> = (0..BOOTSTRAP_RESAMPLES as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = trial_rng(seed ^ BOOTSTRAP_KEY, b);
            let mut resample = vec![0u64; n];
            for _ in 0..trials {
                resample[draw(&empirical, &mut rng)] += 1;
            }
            let p: Vec<f64> = resample.iter().map(|&c| c as f64 / trials as f64).collect();
            tv(&p, &empirical)
        })
        .collect();
    radii.sort_by(|a, b| a.total_cmp(b));
    let r = radii[(0.95 * (BOOTSTRAP_RESAMPLES - 1) as f64).ceil() as usize];
    Ok(TvEstimate {
        t,
        trials,
        estimate,
        ci_low: (estimate - r).max(0.0),
        ci_high: (estimate + r).min(1.0),
        empirical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conic::ConicParams;
    use crate::field::FieldSpec;
    use crate::walk::{evolve, haar, tv_distance};

    fn setup(q: u64) -> (ConicParams, Kernel, Distribution) {
        let p = ConicParams::standard(&FieldSpec::of_order(q).unwrap());
        let k = Kernel::closed_form(&p, ClassIndex::Finite(p.field().one())).unwrap();
        let h = haar(&p);
        (p, k, h)
    }

    #[test]
    fn identity_kernel_never_moves() {
        let p = ConicParams::standard(&FieldSpec::prime(7).unwrap());
        let id = Kernel::closed_form(&p, ClassIndex::Finite(p.field().zero())).unwrap();
        let start = ClassIndex::Finite(p.field().element(3).unwrap());
        let mut s = WalkState::new(&id, start, 1).unwrap();
        for _ in 0..100 {
            assert_eq!(sample_step(&mut s, &id), start);
        }
        assert_eq!(s.steps(), 100);
    }

    #[test]
    fn fixed_seed_reproduces_trajectory() {
        let (p, k, _) = setup(7);
        let zero = ClassIndex::Finite(p.field().zero());
        let run = |seed| {
            let mut s = WalkState::new(&k, zero, seed).unwrap();
            (0..50).map(|_| sample_step(&mut s, &k)).collect::<Vec<_>>()
        };
        assert_eq!(run(42), run(42));
        assert_ne!(run(42), run(43));
    }

    #[test]
    fn step_frequencies_match_kernel_row() {
        let (p, k, _) = setup(7);
        let start = ClassIndex::Finite(p.field().element(2).unwrap());
        let mut s = WalkState::new(&k, start, 7).unwrap();
        let row = k.row(2).to_vec();
        let draws = 1_000_000;
        let mut counts = vec![0u64; 7];
        for _ in 0..draws {
            s.current = 2;
            sample_step(&mut s, &k);
            counts[s.position()] += 1;
        }
        for (c, p) in counts.iter().zip(&row) {
            let mean = p * draws as f64;
            let sd = (draws as f64 * p * (1.0 - p)).sqrt();
            assert!((*c as f64 - mean).abs() <= 4.0 * sd + 1e-9, "{c} vs {mean}");
        }
    }

    #[test]
    fn coalescence_is_immediate_when_y_starts_at_x() {
        let (p, k, _) = setup(7);
        let start = ClassIndex::Finite(p.field().one());
        let pi = Distribution::point_mass(k.classes(), start).unwrap();
        assert_eq!(coupled_run(start, &k, &pi, 5).unwrap(), 0);
    }

    #[test]
    fn stats_are_deterministic_and_tail_monotone() {
        let (p, k, h) = setup(7);
        let zero = ClassIndex::Finite(p.field().zero());
        let a = coupling_stats(zero, &k, &h, 2_000, 99).unwrap();
        let b = coupling_stats(zero, &k, &h, 2_000, 99).unwrap();
        assert_eq!(a, b);
        assert!(a.tail.windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(a.tail[0], 1.0 - a.times.iter().filter(|&&t| t == 0).count() as f64 / 2_000.0);
        let csv = a.histogram_csv();
        assert!(csv.starts_with("t,count,empirical_tail\n"));
    }

    #[test]
    fn tv_estimate_at_time_zero_is_exact() {
        let (p, k, h) = setup(7);
        let zero = ClassIndex::Finite(p.field().zero());
        let est = monte_carlo_tv(zero, 0, 1_000, 3, &k, &h).unwrap();
        assert!((est.estimate - 48.0 / 49.0).abs() < 1e-15);
        assert!(est.contains(48.0 / 49.0));
        assert!(monte_carlo_tv(zero, 0, 999, 3, &k, &h).is_err());
    }

    #[test]
    fn tv_estimate_brackets_exact_value() {
        let (p, k, h) = setup(7);
        let zero = ClassIndex::Finite(p.field().zero());
        for t in [1usize, 2, 3] {
            let est = monte_carlo_tv(zero, t, 20_000, 11, &k, &h).unwrap();
            let d0 = Distribution::point_mass(k.classes(), zero).unwrap();
            let exact = tv_distance(&evolve(&d0, &k, t).unwrap(), &h).unwrap();
            assert!(est.contains(exact), "t={t}: {est:?} vs {exact}");
        }
    }
}
