//! Random presentation models and the balanced extension of a halved set.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::presentation::Presentation;
use crate::words::{Letter, Word, WordConstraints, WordSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Density,
    Theta,
    Omega,
    ThetaBar,
    OmegaBar,
    KAngular,
    KAngularPositive,
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Family> {
        Ok(match s.replace('-', "_").as_str() {
            "density" => Family::Density,
            "theta" => Family::Theta,
            "omega" => Family::Omega,
            "theta_bar" => Family::ThetaBar,
            "omega_bar" => Family::OmegaBar,
            "k_angular" => Family::KAngular,
            "k_angular_positive" | "positive" => Family::KAngularPositive,
            other => return Err(Error::Model(format!("unknown model family {other:?}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: Family,
    pub n: usize,
    /// Relator length (`k` for the angular families).
    pub l: usize,
    pub d: f64,
    pub seed: u64,
}

impl ModelSpec {
    pub fn new(family: Family, n: usize, l: usize, d: f64, seed: u64) -> ModelSpec {
        ModelSpec { family, n, l, d, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d > 0.0 && self.d < 1.0) {
            return Err(Error::Model(format!("density {} outside (0,1)", self.d)));
        }
        if self.n < 2 {
            return Err(Error::Model(format!("need n ≥ 2, got {}", self.n)));
        }
        if self.l < 2 {
            return Err(Error::Model(format!("need length ≥ 2, got {}", self.l)));
        }
        Ok(())
    }

    /// Number of relators requested at each sampled length.
    pub fn target(&self) -> usize {
        let (n, l, d) = (self.n as f64, self.l as f64, self.d);
        match self.family {
            Family::KAngularPositive => floor_size(n.powf(l * d)),
            Family::Theta | Family::ThetaBar => 2 * floor_size((2.0 * n - 1.0).powf(l * d)),
            _ => floor_size((2.0 * n - 1.0).powf(l * d)),
        }
    }

    pub fn lengths(&self) -> Vec<usize> {
        match self.family {
            Family::Omega | Family::OmegaBar => vec![self.l, self.l + 1],
            _ => vec![self.l],
        }
    }

    pub fn constraints(&self) -> WordConstraints {
        match self.family {
            Family::Density | Family::KAngular => WordConstraints::cyclic(),
            Family::KAngularPositive => WordConstraints::positive(),
            _ => WordConstraints::default(),
        }
    }

    pub fn stratified(&self) -> bool {
        matches!(self.family, Family::ThetaBar | Family::OmegaBar)
    }
}

/// `⌊x⌋`, tolerant of round-off just below an integer (e.g. `5^{4·0.25}`).
pub fn floor_size(x: f64) -> usize {
    (x * (1.0 + 1e-12)).floor() as usize
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellCount {
    pub first: Letter,
    pub last: Letter,
    pub count: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleReport {
    pub spec: ModelSpec,
    pub presentation: Presentation,
    /// `(length, requested size)` pairs.
    pub targets: Vec<(usize, usize)>,
    /// Relators per `(first, last)` cell, over all lengths; zero cells omitted.
    pub cells: Vec<CellCount>,
    /// Floyd draws that landed on an already chosen word.
    pub collisions: usize,
}

/// Tally of words by `(first, last)` letter.
pub fn cell_counts(words: &[Word]) -> Vec<CellCount> {
    let mut m: BTreeMap<(Letter, Letter), usize> = BTreeMap::new();
    for w in words {
        if let (Some(f), Some(l)) = (w.first(), w.last()) {
            *m.entry((f, l)).or_default() += 1;
        }
    }
    m.into_iter()
        .map(|((first, last), count)| CellCount { first, last, count })
        .collect()
}

/// Cell spaces `W(t,t')` at one length, nonempty cells only.
fn cells(n: usize, len: usize, base: WordConstraints) -> Result<Vec<WordSpace>> {
    let mut out = Vec::new();
    for f in 0..2 * n {
        for e in 0..2 * n {
            if len == 1 && f != e {
                continue;
            }
            let c = WordConstraints {
                first: Some(Letter::from_index(f)),
                last: Some(Letter::from_index(e)),
                ..base
            };
            let space = WordSpace::new(n, len, c)?;
            if !space.is_empty() {
                out.push(space);
            }
        }
    }
    Ok(out)
}

pub fn sample(spec: &ModelSpec) -> Result<SampleReport> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    sample_with(spec, &mut rng)
}

pub fn sample_with<R: Rng + ?Sized>(spec: &ModelSpec, rng: &mut R) -> Result<SampleReport> {
    spec.validate()?;
    let target = spec.target();
    let mut words = Vec::new();
    let mut targets = Vec::new();
    let mut collisions = 0;
    for len in spec.lengths() {
        targets.push((len, target));
        if spec.stratified() {
            let cs = cells(spec.n, len, spec.constraints())?;
            let quota = target / (2 * spec.n * 2 * spec.n);
            for space in &cs {
                if BigUint::from(quota) > *space.total() {
                    return Err(Error::Model(format!(
                        "cell quota {quota} exceeds cell size {} at length {len}",
                        space.total()
                    )));
                }
                let (ws, c) = space.sample_distinct(quota, rng)?;
                collisions += c;
                words.extend(ws);
            }
        } else {
            let space = WordSpace::new(spec.n, len, spec.constraints())?;
            let (ws, c) = space.sample_distinct(target, rng)?;
            collisions += c;
            words.extend(ws);
        }
    }
    words.sort();
    let cells = cell_counts(&words);
    Ok(SampleReport {
        spec: *spec,
        presentation: Presentation::new(spec.n, words)?,
        targets,
        cells,
        collisions,
    })
}

/// Angular samples at increasing `n` with `k` fixed; sample `i` uses seed
/// `seed + i`.
pub fn k_angular_sweep(
    k: usize,
    d: f64,
    ns: &[usize],
    positive: bool,
    seed: u64,
) -> Result<Vec<SampleReport>> {
    let family = if positive { Family::KAngularPositive } else { Family::KAngular };
    ns.iter()
        .enumerate()
        .map(|(i, &n)| sample(&ModelSpec::new(family, n, k, d, seed.wrapping_add(i as u64))))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct BalancedExtension {
    pub words: Vec<Word>,
    /// `(length, per-cell quota)` pairs.
    pub quotas: Vec<(usize, usize)>,
    pub padding: usize,
}

/// Per-length cell quotas for the halves of length-`t_len` relators at
/// density `2d + delta`.
pub fn extension_quotas(n: usize, t_len: usize, d: f64, delta: f64) -> Vec<(usize, usize)> {
    let big_d = 2.0 * d + delta;
    let base = (2 * n - 1) as f64;
    let cells = (2 * n * 2 * n) as f64;
    let half = t_len / 2;
    if t_len.is_multiple_of(2) {
        vec![(half, floor_size(2.0 * base.powf(half as f64 * big_d) / cells))]
    } else {
        let q = floor_size(base.powf(half as f64 * big_d) / cells);
        vec![(half, q), (half + 1, q)]
    }
}

/// Extends the halves `r` of a sampled relator set to a set with exactly
/// `quota` words in each nonempty `(first, last)` cell of each listed length.
pub fn balanced_extension_with_quotas<R: Rng + ?Sized>(
    n: usize,
    r: &[Word],
    quotas: &[(usize, usize)],
    rng: &mut R,
) -> Result<BalancedExtension> {
    let mut set: Vec<Word> = r.to_vec();
    set.sort();
    set.dedup();
    for w in &set {
        if !quotas.iter().any(|&(len, _)| len == w.len()) {
            return Err(Error::Infeasible(format!("{w} has a length with no quota")));
        }
    }
    let mut words = set.clone();
    let mut padding = 0;
    for &(len, quota) in quotas {
        for space in cells(n, len, WordConstraints::default())? {
            let present: Vec<Word> = set
                .iter()
                .filter(|w| w.len() == len && space.constraints().admits(w))
                .cloned()
                .collect();
            if present.len() > quota {
                return Err(Error::Infeasible(format!(
                    "cell ({:?},{:?}) at length {len} holds {} > quota {quota}",
                    space.constraints().first,
                    space.constraints().last,
                    present.len()
                )));
            }
            let need = quota - present.len();
            if BigUint::from(quota) > *space.total() {
                return Err(Error::Infeasible(format!(
                    "quota {quota} exceeds cell size {}",
                    space.total()
                )));
            }
            words.extend(space.sample_distinct_excluding(need, &present, rng)?);
            padding += need;
        }
    }
    words.sort();
    Ok(BalancedExtension {
        words,
        quotas: quotas.to_vec(),
        padding,
    })
}

pub fn balanced_extension<R: Rng + ?Sized>(
    n: usize,
    r: &[Word],
    t_len: usize,
    d: f64,
    delta: f64,
    rng: &mut R,
) -> Result<BalancedExtension> {
    if delta.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::Model(format!("slack δ must be positive, got {delta}")));
    }
    balanced_extension_with_quotas(n, r, &extension_quotas(n, t_len, d, delta), rng)
}

/// Number of nonempty `(first, last)` cells at one length.
pub fn nonempty_cells(n: usize, len: usize) -> Result<usize> {
    Ok(cells(n, len, WordConstraints::default())?.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::enumerate_reduced;

    #[test]
    fn density_size_and_shape() {
        let r = sample(&ModelSpec::new(Family::Density, 2, 6, 0.2, 7)).unwrap();
        assert_eq!(r.presentation.len(), 3);
        for w in &r.presentation.relators {
            assert_eq!(w.len(), 6);
            assert!(w.is_cyclically_reduced());
        }
        assert_eq!(r.cells.iter().map(|c| c.count).sum::<usize>(), 3);
    }

    #[test]
    fn theta_size() {
        let r = sample(&ModelSpec::new(Family::Theta, 3, 4, 0.25, 1)).unwrap();
        assert_eq!(r.presentation.len(), 10);
        assert!(r.presentation.relators.iter().all(|w| w.len() == 4));
    }

    #[test]
    fn omega_two_lengths() {
        let r = sample(&ModelSpec::new(Family::Omega, 2, 4, 0.3, 1)).unwrap();
        let t = floor_size(3f64.powf(1.2));
        let c4 = r.presentation.relators.iter().filter(|w| w.len() == 4).count();
        let c5 = r.presentation.relators.iter().filter(|w| w.len() == 5).count();
        assert_eq!((c4, c5), (t, t));
    }

    #[test]
    fn theta_bar_one_per_cell() {
        // 2⌊3^{4·0.5}⌋ = 18, ⌊18/16⌋ = 1
        let r = sample(&ModelSpec::new(Family::ThetaBar, 2, 4, 0.5, 3)).unwrap();
        assert_eq!(r.presentation.len(), 16);
        let mut tally: BTreeMap<(Letter, Letter), usize> = BTreeMap::new();
        for w in &r.presentation.relators {
            *tally.entry((w.first().unwrap(), w.last().unwrap())).or_default() += 1;
        }
        assert_eq!(tally.len(), 16);
        assert!(tally.values().all(|&c| c == 1));
    }

    #[test]
    fn determinism() {
        let s = ModelSpec::new(Family::Density, 3, 12, 0.2, 42);
        let a = sample(&s).unwrap().presentation.to_json();
        let b = sample(&s).unwrap().presentation.to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn universe_too_small() {
        // 2⌊3^{1.98}⌋ = 16 > 12 reduced words of length 2
        let err = sample(&ModelSpec::new(Family::Theta, 2, 2, 0.99, 0)).unwrap_err();
        assert!(matches!(err, Error::Model(_)), "{err}");
    }

    #[test]
    fn positive_words() {
        let r = sample(&ModelSpec::new(Family::KAngularPositive, 4, 3, 0.3, 9)).unwrap();
        assert_eq!(r.presentation.len(), floor_size(4f64.powf(0.9)));
        assert!(r.presentation.relators.iter().all(|w| w.is_positive()));
    }

    #[test]
    fn extension_pure_padding() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let ext = balanced_extension_with_quotas(2, &[], &[(4, 1)], &mut rng).unwrap();
        assert_eq!(ext.words.len(), 16);
        assert_eq!(cell_counts(&ext.words).len(), 16);
    }

    #[test]
    fn extension_keeps_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r: Vec<Word> = ["abab", "BABA"].iter().map(|s| Word::parse(s, 2).unwrap()).collect();
        let ext = balanced_extension_with_quotas(2, &r, &[(4, 2)], &mut rng).unwrap();
        assert_eq!(ext.words.len(), 32);
        assert!(r.iter().all(|w| ext.words.contains(w)));
        assert!(cell_counts(&ext.words).iter().all(|c| c.count == 2));
        let mut dedup = ext.words.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), 32);
    }

    #[test]
    fn extension_over_quota() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r: Vec<Word> = ["abab", "aBab"].iter().map(|s| Word::parse(s, 2).unwrap()).collect();
        let err = balanced_extension_with_quotas(2, &r, &[(4, 1)], &mut rng).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)));
    }

    #[test]
    fn nonempty_cell_count() {
        assert_eq!(nonempty_cells(2, 2).unwrap(), 12);
        assert_eq!(nonempty_cells(2, 1).unwrap(), 4);
        let brute = enumerate_reduced(2, 2).len();
        assert_eq!(brute, 12);
    }
}
