//! Mod-2 relation-module classes, their projection to `Q(T,R)`, the loop map
//! `P`, and the coordinate pairing.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::cayley::{canonical_form, CayleyBall, Decision, WordProblemOracle};
use crate::error::{Error, Result};
use crate::presentation::HalvedPresentation;
use crate::words::Word;

/// Sparse `𝔽₂` vector keyed by `(κ, index)`; only nonzero keys are stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SparseF2(BTreeSet<(Word, usize)>);

impl SparseF2 {
    pub fn new() -> SparseF2 {
        SparseF2::default()
    }

    pub fn unit(kappa: Word, i: usize) -> SparseF2 {
        let mut v = SparseF2::new();
        v.toggle(kappa, i);
        v
    }

    pub fn toggle(&mut self, kappa: Word, i: usize) {
        let key = (kappa, i);
        if !self.0.remove(&key) {
            self.0.insert(key);
        }
    }

    pub fn add(&self, other: &SparseF2) -> SparseF2 {
        SparseF2(self.0.symmetric_difference(&other.0).cloned().collect())
    }

    pub fn add_assign(&mut self, other: &SparseF2) {
        for (k, i) in &other.0 {
            self.toggle(k.clone(), *i);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, kappa: &Word, i: usize) -> bool {
        self.0.contains(&(kappa.clone(), i))
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Word, usize)> {
        self.0.iter()
    }
}

impl FromIterator<(Word, usize)> for SparseF2 {
    fn from_iter<I: IntoIterator<Item = (Word, usize)>>(iter: I) -> SparseF2 {
        let mut v = SparseF2::new();
        for (k, i) in iter {
            v.toggle(k, i);
        }
        v
    }
}

/// A class in `H₁(⟨⟨R⟩⟩; 𝔽₂)`; the index is a half index `0..2N`.
pub type RelClass = SparseF2;

/// An element of `Q(T,R)`; the index is a pair index `0..N`.
pub type QVec = SparseF2;

#[derive(Serialize, Deserialize)]
struct QEntry {
    kappa: Word,
    pair: usize,
}

pub fn qvec_to_json(v: &QVec) -> String {
    let entries: Vec<QEntry> = v
        .iter()
        .map(|(k, i)| QEntry { kappa: k.clone(), pair: *i })
        .collect();
    serde_json::to_string(&entries).expect("qvec serializes")
}

pub fn qvec_from_json(s: &str) -> Result<QVec> {
    let entries: Vec<QEntry> = serde_json::from_str(s)?;
    Ok(entries.into_iter().map(|e| (e.kappa, e.pair)).collect())
}

/// The half group `K_R` as seen by relhom: its oracle (built on the half
/// presentation, so relator index = half index) and an optional ball for
/// canonical names when the oracle has no normal form.
pub struct HalfGroup<'a> {
    pub hp: &'a HalvedPresentation,
    pub oracle: &'a dyn WordProblemOracle,
    pub ball: Option<&'a CayleyBall>,
}

impl<'a> HalfGroup<'a> {
    pub fn new(hp: &'a HalvedPresentation, oracle: &'a dyn WordProblemOracle, ball: Option<&'a CayleyBall>) -> Self {
        HalfGroup { hp, oracle, ball }
    }

    pub fn canonical(&self, w: &Word) -> Result<Word> {
        canonical_form(w, self.oracle, self.ball)
    }

    /// Class of a word trivial in `K_R`.
    pub fn rel_class(&self, w: &Word) -> Result<RelClass> {
        match self.oracle.decide(w) {
            Decision::Trivial(d) => {
                let mut v = RelClass::new();
                for e in d {
                    v.toggle(self.canonical(&e.conjugator)?, e.relator);
                }
                Ok(v)
            }
            Decision::Nontrivial => Err(Error::Domain(w.to_string())),
            Decision::Unknown => Err(Error::Budget(w.to_string())),
        }
    }

    /// `P_{T,R}` of a loop in `Σ_R` read from `ε`.
    pub fn p_of_loop(&self, loop_word: &Word) -> Result<QVec> {
        Ok(project_q(&self.rel_class(loop_word)?))
    }

    /// Left translation of every key by `u`.
    pub fn shift(&self, v: &SparseF2, u: &Word) -> Result<SparseF2> {
        let mut out = SparseF2::new();
        for (k, i) in v.iter() {
            out.toggle(self.canonical(&u.mul(k))?, *i);
        }
        Ok(out)
    }
}

/// Identifies `(κ, r_i)` with `(κ, r_i')`.
pub fn project_q(v: &RelClass) -> QVec {
    v.iter().map(|(k, j)| (k.clone(), j / 2)).collect()
}

/// `Σ_{shared keys} x·y` mod 2.
pub fn pairing(x: &QVec, y: &QVec) -> bool {
    x.0.intersection(&y.0).count() % 2 == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::ExactFixtureOracle;
    use crate::presentation::{halve, Presentation};

    fn w(s: &str) -> Word {
        Word::parse_unbounded(s).unwrap()
    }

    fn fixture() -> (HalvedPresentation, ExactFixtureOracle) {
        let hp = halve(&Presentation::parse(4, &["abABcdCD"]).unwrap()).unwrap();
        let o = ExactFixtureOracle::detect(&hp.half_presentation()).unwrap();
        (hp, o)
    }

    #[test]
    fn rel_class_examples() {
        let (hp, o) = fixture();
        let k = HalfGroup::new(&hp, &o, None);
        assert_eq!(k.rel_class(&w("abAB")).unwrap(), RelClass::unit(Word::empty(), 0));
        assert!(k.rel_class(&w("abABabAB")).unwrap().is_zero());
        assert_eq!(k.rel_class(&w("cabABC")).unwrap(), RelClass::unit(w("c"), 0));
        assert!(matches!(k.rel_class(&w("ab")), Err(Error::Domain(_))));
    }

    #[test]
    fn projection_examples() {
        let t: RelClass = [(Word::empty(), 0), (Word::empty(), 1)].into_iter().collect();
        assert!(project_q(&t).is_zero());
        assert_eq!(project_q(&RelClass::unit(Word::empty(), 0)), QVec::unit(Word::empty(), 0));
        let two: RelClass = [(Word::empty(), 0), (w("a"), 1)].into_iter().collect();
        assert_eq!(project_q(&two).len(), 2);
    }

    #[test]
    fn loop_map_examples() {
        let (hp, o) = fixture();
        let k = HalfGroup::new(&hp, &o, None);
        assert!(k.p_of_loop(&w("abABcdCD")).unwrap().is_zero());
        assert_eq!(k.p_of_loop(&w("abAB")).unwrap(), QVec::unit(Word::empty(), 0));
        let g = w("c");
        let l = w("abAB").mul(&g.conjugate(&w("abAB")));
        assert_eq!(k.p_of_loop(&l).unwrap().len(), 2);
    }

    #[test]
    fn pairing_examples() {
        let e = QVec::unit(Word::empty(), 0);
        assert!(pairing(&e, &e));
        assert!(!pairing(&e, &QVec::unit(w("a"), 0)));
    }

    #[test]
    fn json_roundtrip() {
        let v: QVec = [(w("ab"), 0), (w(""), 1)].into_iter().collect();
        assert_eq!(qvec_from_json(&qvec_to_json(&v)).unwrap(), v);
    }
}
