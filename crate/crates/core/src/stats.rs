//! Exact hypergeometric moments of cell counts, and seeded Monte Carlo
//! trials with Wilson intervals.

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Rational64};
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::sampler::{sample_with, Family, ModelSpec};
use crate::smallcancel::check_metric;
use crate::words::{Letter, WordConstraints, WordSpace};

/// Mean and variance of a count, exact.
#[derive(Clone, Debug, PartialEq)]
pub struct Moments {
    pub mean: BigRational,
    pub variance: BigRational,
}

impl Moments {
    pub fn mean_f64(&self) -> f64 {
        self.mean.to_f64().unwrap_or(f64::NAN)
    }

    pub fn sd_f64(&self) -> f64 {
        self.variance.to_f64().unwrap_or(f64::NAN).sqrt()
    }
}

impl Serialize for Moments {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Moments", 4)?;
        st.serialize_field("mean", &self.mean.to_string())?;
        st.serialize_field("variance", &self.variance.to_string())?;
        st.serialize_field("mean_f64", &self.mean_f64())?;
        st.serialize_field("sd_f64", &self.sd_f64())?;
        st.end()
    }
}

/// Marked items in a uniform `m`-subset of a universe of `total` items,
/// `marked` of them marked.
pub fn hypergeometric(total: &BigUint, marked: &BigUint, m: &BigUint) -> Result<Moments> {
    if m > total {
        return Err(Error::Contract(format!("sample size {m} exceeds universe {total}")));
    }
    if marked > total {
        return Err(Error::Contract(format!("cell size {marked} exceeds universe {total}")));
    }
    let big = |x: &BigUint| BigRational::from_integer(BigInt::from(x.clone()));
    let (nn, k, m) = (big(total), big(marked), big(m));
    if nn.is_zero() {
        return Ok(Moments { mean: BigRational::zero(), variance: BigRational::zero() });
    }
    let p = &k / &nn;
    let mean = &m * &p;
    let variance = if nn <= BigRational::one() {
        BigRational::zero()
    } else {
        &m * &p * (BigRational::one() - &p) * (&nn - &m) / (&nn - BigRational::one())
    };
    Ok(Moments { mean, variance })
}

/// Moments of the number of sampled reduced words of length `l` in the
/// cell `(first, last)`, for `m` words drawn without replacement.
pub fn exact_moments(n: usize, l: usize, m: u64, cell: (Letter, Letter)) -> Result<Moments> {
    exact_moments_with(n, l, m, cell, WordConstraints::default())
}

pub fn exact_moments_with(n: usize, l: usize, m: u64, cell: (Letter, Letter), base: WordConstraints) -> Result<Moments> {
    let universe = WordSpace::new(n, l, base)?;
    let c = WordConstraints { first: Some(cell.0), last: Some(cell.1), ..base };
    let inside = WordSpace::new(n, l, c)?;
    if inside.is_empty() {
        return Err(Error::Contract(format!("cell ({}, {}) is empty at length {l}", cell.0, cell.1)));
    }
    hypergeometric(universe.total(), inside.total(), &BigUint::from(m))
}

/// Wilson score interval at 95%.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Wilson {
    pub low: f64,
    pub high: f64,
    pub half_width: f64,
}

pub fn wilson(successes: usize, trials: usize) -> Wilson {
    if trials == 0 {
        return Wilson { low: 0.0, high: 1.0, half_width: 0.5 };
    }
    let z = Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(0.975);
    let (k, n) = (successes as f64, trials as f64);
    let p = k / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    // clamp through p: at k = 0 or k = n the bounds land a rounding error off it
    Wilson { low: (centre - half).clamp(0.0, p), high: (centre + half).clamp(p, 1.0), half_width: half }
}

#[derive(Clone, Debug, Serialize)]
pub struct PredicateCount {
    pub name: String,
    pub passes: usize,
    pub trials: usize,
    pub frequency: f64,
    pub wilson: Wilson,
}

impl PredicateCount {
    pub fn new(name: impl Into<String>, passes: usize, trials: usize) -> PredicateCount {
        PredicateCount {
            name: name.into(),
            passes,
            trials,
            frequency: if trials == 0 { 0.0 } else { passes as f64 / trials as f64 },
            wilson: wilson(passes, trials),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialReport {
    pub spec: ModelSpec,
    pub trials: usize,
    pub seed: u64,
    pub predicates: Vec<PredicateCount>,
}

/// Seed of trial `i`.
pub fn trial_seed(master: u64, i: usize) -> u64 {
    master.wrapping_add(i as u64)
}

/// Runs `f` on the sample of each trial, in parallel; results come back in
/// trial order.
fn run_trials<T: Send>(
    spec: &ModelSpec,
    trials: usize,
    seed: u64,
    f: impl Fn(&crate::sampler::SampleReport) -> T + Sync,
) -> Result<Vec<T>> {
    spec.validate()?;
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, i));
            Ok(f(&sample_with(spec, &mut rng)?))
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct CellTail {
    pub first: Letter,
    pub last: Letter,
    pub moments: Moments,
    /// Trials with `|X − μ| ≥ cσ`.
    pub tail: PredicateCount,
    /// Trials with `|X − μ| > (2n−1)^{3ld/4}`.
    pub coarse_tail: PredicateCount,
    pub chebyshev_bound: f64,
    /// `tail.frequency ≤ 1/c² + 3·half_width`.
    pub within_bound: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConcentrationReport {
    pub report: TrialReport,
    pub c: f64,
    pub cells: Vec<CellTail>,
}

impl ConcentrationReport {
    pub fn all_within_bound(&self) -> bool {
        self.cells.iter().all(|c| c.within_bound)
    }
}

/// Tail frequencies of every nonempty cell count around its exact mean.
pub fn concentration_trial(spec: &ModelSpec, c: f64, trials: usize, seed: u64) -> Result<ConcentrationReport> {
    if c.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::Contract(format!("multiplier must be positive, got {c}")));
    }
    if spec.stratified() || spec.lengths().len() != 1 {
        return Err(Error::Model(format!("{:?} does not sample one unstratified length", spec.family)));
    }
    let (n, l) = (spec.n, spec.l);
    let base = spec.constraints();
    let mut cells = Vec::new();
    for f in 0..2 * n {
        for e in 0..2 * n {
            let cell = (Letter::from_index(f), Letter::from_index(e));
            match exact_moments_with(n, l, spec.target() as u64, cell, base) {
                Ok(m) => cells.push((cell, m)),
                Err(Error::Contract(_)) => continue,
                Err(e) => return Err(e),
            }
        }
    }
    let counts = run_trials(spec, trials, seed, |s| {
        let mut x = vec![0usize; 4 * n * n];
        for w in &s.presentation.relators {
            if let (Some(f), Some(e)) = (w.first(), w.last()) {
                x[f.index() * 2 * n + e.index()] += 1;
            }
        }
        x
    })?;
    let coarse = (2.0 * n as f64 - 1.0).powf(3.0 * l as f64 * spec.d / 4.0);
    let bound = (1.0 / (c * c)).min(1.0);
    let cells: Vec<CellTail> = cells
        .into_iter()
        .map(|((f, e), m)| {
            let (mu, sd) = (m.mean_f64(), m.sd_f64());
            let slot = f.index() * 2 * n + e.index();
            let dev = |x: &Vec<usize>| (x[slot] as f64 - mu).abs();
            let tail = counts.iter().filter(|x| dev(x) >= c * sd).count();
            let coarse_tail = counts.iter().filter(|x| dev(x) > coarse).count();
            let tail = PredicateCount::new(format!("|X-mu| >= {c} sd in ({f}, {e})"), tail, trials);
            let within_bound = tail.frequency <= bound + 3.0 * tail.wilson.half_width;
            CellTail {
                first: f,
                last: e,
                moments: m,
                coarse_tail: PredicateCount::new(format!("|X-mu| > {coarse:.3} in ({f}, {e})"), coarse_tail, trials),
                tail,
                chebyshev_bound: bound,
                within_bound,
            }
        })
        .collect();
    let worst = cells.iter().map(|c| c.tail.passes).max().unwrap_or(0);
    Ok(ConcentrationReport {
        report: TrialReport {
            spec: *spec,
            trials,
            seed,
            predicates: vec![PredicateCount::new("largest cell tail", worst, trials)],
        },
        c,
        cells,
    })
}

/// Frequency of `C'(λ)` among sampled presentations.
pub fn sc_frequency_trial(spec: &ModelSpec, lambda: Rational64, trials: usize, seed: u64) -> Result<TrialReport> {
    let ok = run_trials(spec, trials, seed, |s| check_metric(&s.presentation, lambda))?;
    Ok(TrialReport {
        spec: *spec,
        trials,
        seed,
        predicates: vec![PredicateCount::new(format!("C'({lambda})"), ok.iter().filter(|&&b| b).count(), trials)],
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub lambda: String,
    pub points: Vec<TrialReport>,
    /// No frequency drops below its predecessor by more than the sum of the
    /// two Wilson half-widths.
    pub nondecreasing: bool,
}

/// `C'(λ)` frequency over a list of specs (increasing `l` or `n`); the trend
/// is reported, not enforced.
pub fn sc_frequency_sweep(specs: &[ModelSpec], lambda: Rational64, trials: usize, seed: u64) -> Result<SweepReport> {
    let points: Vec<TrialReport> = specs
        .iter()
        .enumerate()
        .map(|(i, s)| sc_frequency_trial(s, lambda, trials, trial_seed(seed, i * trials)))
        .collect::<Result<_>>()?;
    fn freq(r: &TrialReport) -> &PredicateCount {
        &r.predicates[0]
    }
    let nondecreasing = points.windows(2).all(|w| {
        let (a, b) = (freq(&w[0]), freq(&w[1]));
        b.frequency + a.wilson.half_width + b.wilson.half_width >= a.frequency
    });
    Ok(SweepReport { lambda: lambda.to_string(), points, nondecreasing })
}

/// The angular sweep at fixed `k` over `ns`.
pub fn k_angular_frequency_sweep(
    k: usize,
    d: f64,
    ns: &[usize],
    lambda: Rational64,
    trials: usize,
    seed: u64,
) -> Result<SweepReport> {
    let specs: Vec<ModelSpec> = ns.iter().map(|&n| ModelSpec::new(Family::KAngular, n, k, d, seed)).collect();
    sc_frequency_sweep(&specs, lambda, trials, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn hypergeometric_edges() {
        let all = hypergeometric(&big(20), &big(7), &big(20)).unwrap();
        assert_eq!(all.mean, BigRational::from_integer(7.into()));
        assert!(all.variance.is_zero());
        let none = hypergeometric(&big(20), &big(7), &big(0)).unwrap();
        assert!(none.mean.is_zero() && none.variance.is_zero());
        assert!(matches!(hypergeometric(&big(5), &big(1), &big(6)), Err(Error::Contract(_))));
    }

    #[test]
    fn wilson_interval() {
        let w = wilson(50, 100);
        assert!((w.low - 0.4038).abs() < 1e-3 && (w.high - 0.5962).abs() < 1e-3);
        let w = wilson(0, 200);
        assert_eq!(w.low, 0.0);
        assert!(w.high < 0.02);
    }

    #[test]
    fn trials_are_reproducible() {
        let spec = ModelSpec::new(Family::Theta, 2, 6, 0.3, 0);
        let a = sc_frequency_trial(&spec, Rational64::new(1, 2), 20, 11).unwrap();
        let b = sc_frequency_trial(&spec, Rational64::new(1, 2), 20, 11).unwrap();
        assert_eq!(a.predicates[0].passes, b.predicates[0].passes);
    }

    #[test]
    fn vacuous_multiplier() {
        let spec = ModelSpec::new(Family::Theta, 2, 6, 0.3, 0);
        let r = concentration_trial(&spec, 1.0, 50, 3).unwrap();
        assert!(r.all_within_bound());
        assert!(concentration_trial(&spec, 0.0, 5, 3).is_err());
    }
}
