//! Pieces, the metric small-cancellation test, necessary asphericity checks,
//! and Dehn's algorithm with a free-group witness.

use std::collections::HashMap;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::presentation::Presentation;
use crate::words::{Letter, Word};

/// One element of the symmetrized relator set: a cyclic conjugate `c` of a
/// relator core or its inverse, with `c = v · relator^sign · v⁻¹`.
#[derive(Clone, Debug)]
pub struct SymEntry {
    pub word: Word,
    pub relator: usize,
    pub sign: i8,
    pub offset: usize,
    pub conjugator: Word,
}

/// The distinct cyclic conjugates of all relator cores and their inverses.
#[derive(Clone, Debug)]
pub struct Symmetrized {
    pub entries: Vec<SymEntry>,
    by_first: HashMap<Letter, Vec<usize>>,
}

impl Symmetrized {
    pub fn new(p: &Presentation) -> Symmetrized {
        let mut entries = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (i, r) in p.relators.iter().enumerate() {
            let (core, q) = r.cyclic_reduce();
            for sign in [1i8, -1] {
                let base = if sign == 1 { core.clone() } else { core.inverse() };
                for k in 0..base.len() {
                    let c = base.rotate(k);
                    if !seen.insert(c.clone()) {
                        continue;
                    }
                    // base = q⁻¹ r^sign q and c = p⁻¹ base p with p = base[..k]
                    let p_inv = base.slice(0, k).inverse();
                    entries.push(SymEntry {
                        word: c,
                        relator: i,
                        sign,
                        offset: k,
                        conjugator: p_inv.mul(&q.inverse()),
                    });
                }
            }
        }
        let mut by_first: HashMap<Letter, Vec<usize>> = HashMap::new();
        for (idx, e) in entries.iter().enumerate() {
            if let Some(f) = e.word.first() {
                by_first.entry(f).or_default().push(idx);
            }
        }
        Symmetrized { entries, by_first }
    }

    pub fn starting_with(&self, l: Letter) -> &[usize] {
        self.by_first.get(&l).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// For every entry, the longest prefix shared with a different entry.
    fn max_lcp_per_entry(&self) -> Vec<(usize, Option<usize>)> {
        let mut order: Vec<usize> = (0..self.entries.len()).collect();
        order.sort_by(|&a, &b| self.entries[a].word.letters().cmp(self.entries[b].word.letters()));
        let mut best = vec![(0usize, None); self.entries.len()];
        for w in order.windows(2) {
            let (a, b) = (w[0], w[1]);
            let l = lcp(self.entries[a].word.letters(), self.entries[b].word.letters());
            if l > best[a].0 || best[a].1.is_none() {
                best[a] = (l, Some(b));
            }
            if l > best[b].0 || best[b].1.is_none() {
                best[b] = (l, Some(a));
            }
        }
        best
    }
}

fn lcp(a: &[Letter], b: &[Letter]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceWitness {
    pub relator: usize,
    pub sign: i8,
    pub offset: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PieceReport {
    pub max_piece_length: usize,
    pub piece: Option<Word>,
    pub witnesses: Option<(PieceWitness, PieceWitness)>,
    pub min_relator_length: usize,
    /// `max_piece_length / min_relator_length`, as `[num, den]`.
    pub lambda_star: Rational64,
}

pub fn max_piece_length(p: &Presentation) -> PieceReport {
    let sym = Symmetrized::new(p);
    let best = sym.max_lcp_per_entry();
    let mut top: Option<(usize, usize, usize)> = None;
    for (a, &(l, other)) in best.iter().enumerate() {
        if let Some(b) = other {
            if top.is_none_or(|(tl, _, _)| l > tl) {
                top = Some((l, a, b));
            }
        }
    }
    let min_len = p
        .relators
        .iter()
        .map(|r| r.cyclic_reduce().0.len())
        .min()
        .unwrap_or(0);
    let (max_piece, piece, witnesses) = match top {
        Some((l, a, b)) => {
            let w = |i: usize| PieceWitness {
                relator: sym.entries[i].relator,
                sign: sym.entries[i].sign,
                offset: sym.entries[i].offset,
            };
            (l, Some(sym.entries[a].word.slice(0, l)), Some((w(a), w(b))))
        }
        None => (0, None, None),
    };
    PieceReport {
        max_piece_length: max_piece,
        piece,
        witnesses,
        min_relator_length: min_len,
        lambda_star: Rational64::new(max_piece as i64, min_len.max(1) as i64),
    }
}

/// `C′(λ)`: every piece is shorter than `λ·|c|` for each cyclic word `c`
/// containing it.
pub fn check_metric(p: &Presentation, lambda: Rational64) -> bool {
    let sym = Symmetrized::new(p);
    sym.max_lcp_per_entry()
        .iter()
        .zip(&sym.entries)
        .all(|(&(l, _), e)| Rational64::from_integer(l as i64) < lambda * Rational64::from_integer(e.word.len() as i64))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    ProperPower { relator: usize, root: Word, exponent: usize },
    CyclicConjugate { first: usize, second: usize, inverse: bool },
    SelfInverseConjugate { relator: usize },
    ProductCollision { y: usize, y_prime: usize, gamma: usize, gamma_prime: usize },
}

/// Smallest `p` with `w = (w[..p])^{|w|/p}`.
pub fn period(w: &Word) -> usize {
    let n = w.len();
    (1..=n)
        .find(|&p| n.is_multiple_of(p) && (p..n).all(|i| w[i] == w[i - p]))
        .unwrap_or(n)
}

/// Necessary conditions for asphericity: no proper powers, no coincidences
/// among cyclic conjugates of relators and inverses, and unique factorization
/// of pairwise products.
pub fn asphericity_checks(p: &Presentation) -> Vec<Violation> {
    let mut out = Vec::new();
    let cores: Vec<Word> = p.relators.iter().map(|r| r.cyclic_reduce().0).collect();
    for (i, c) in cores.iter().enumerate() {
        let per = period(c);
        if per < c.len() {
            out.push(Violation::ProperPower {
                relator: i,
                root: c.slice(0, per),
                exponent: c.len() / per,
            });
        }
    }
    let canon: Vec<(Word, Word)> = cores
        .iter()
        .map(|c| (c.min_rotation(), c.inverse().min_rotation()))
        .collect();
    for (i, (fwd, inv)) in canon.iter().enumerate() {
        if fwd == inv {
            out.push(Violation::SelfInverseConjugate { relator: i });
        }
        for (j, (fwd_j, _)) in canon.iter().enumerate().skip(i + 1) {
            if fwd == fwd_j {
                out.push(Violation::CyclicConjugate { first: i, second: j, inverse: false });
            } else if inv == fwd_j {
                out.push(Violation::CyclicConjugate { first: i, second: j, inverse: true });
            }
        }
    }
    let mut products: HashMap<Word, (usize, usize)> = HashMap::new();
    for (i, y) in p.relators.iter().enumerate() {
        for (j, y2) in p.relators.iter().enumerate() {
            if *y2 == y.inverse() {
                continue;
            }
            let prod = y.mul(y2);
            match products.get(&prod) {
                Some(&(a, b)) if (p.relators[a].clone(), p.relators[b].clone()) != (y.clone(), y2.clone()) => {
                    out.push(Violation::ProductCollision { y: a, y_prime: b, gamma: i, gamma_prime: j });
                }
                Some(_) => {}
                None => {
                    products.insert(prod, (i, j));
                }
            }
        }
    }
    out
}

/// One factor `u · relator^sign · u⁻¹` of a decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DecompEntry {
    pub conjugator: Word,
    pub relator: usize,
    pub sign: i8,
}

impl DecompEntry {
    pub fn element(&self, relators: &[Word]) -> Word {
        let r = &relators[self.relator];
        let r = if self.sign > 0 { r.clone() } else { r.inverse() };
        self.conjugator.conjugate(&r)
    }
}

/// Free-group product of a decomposition.
pub fn expand(decomposition: &[DecompEntry], relators: &[Word]) -> Word {
    decomposition
        .iter()
        .fold(Word::empty(), |acc, e| acc.mul(&e.element(relators)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DehnOutcome {
    Trivial,
    Nontrivial,
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DehnTrace {
    pub outcome: DehnOutcome,
    /// `w = (Π entries) · residue` in the free group, at every stage.
    pub decomposition: Vec<DecompEntry>,
    pub residue: Word,
    pub steps: usize,
}

pub const DEFAULT_DEHN_BUDGET: usize = 10_000;

/// Dehn's algorithm over a prepared symmetrized set.
#[derive(Clone, Debug)]
pub struct Dehn {
    sym: Symmetrized,
}

impl Dehn {
    pub fn new(p: &Presentation) -> Dehn {
        Dehn { sym: Symmetrized::new(p) }
    }

    /// Leftmost start, then longest match, of a subword that is more than
    /// half of some `c`. Returns `(start, match length, entry)`.
    fn find(&self, w: &[Letter]) -> Option<(usize, usize, usize)> {
        for i in 0..w.len() {
            let mut best: Option<(usize, usize)> = None;
            for &e in self.sym.starting_with(w[i]) {
                let c = self.sym.entries[e].word.letters();
                let l = lcp(&w[i..], c);
                if 2 * l > c.len() && best.is_none_or(|(bl, _)| l > bl) {
                    best = Some((l, e));
                }
            }
            if let Some((l, e)) = best {
                return Some((i, l, e));
            }
        }
        None
    }

    pub fn reduce(&self, w: &Word, budget: usize) -> DehnTrace {
        let mut cur = w.clone();
        let mut decomposition = Vec::new();
        let mut steps = 0;
        loop {
            if cur.is_empty() {
                return DehnTrace { outcome: DehnOutcome::Trivial, decomposition, residue: cur, steps };
            }
            let Some((i, l, e)) = self.find(cur.letters()) else {
                return DehnTrace { outcome: DehnOutcome::Nontrivial, decomposition, residue: cur, steps };
            };
            if steps >= budget {
                return DehnTrace {
                    outcome: DehnOutcome::BudgetExhausted,
                    decomposition,
                    residue: cur,
                    steps,
                };
            }
            let entry = &self.sym.entries[e];
            let c = &entry.word;
            // cur = P X S with c = X Z; cur = (P c P⁻¹) · P Z⁻¹ S
            let prefix = cur.slice(0, i);
            let z_inv = c.slice(l, c.len()).inverse();
            let suffix = cur.slice(i + l, cur.len());
            decomposition.push(DecompEntry {
                conjugator: prefix.mul(&entry.conjugator),
                relator: entry.relator,
                sign: entry.sign,
            });
            cur = prefix.mul(&z_inv).mul(&suffix);
            steps += 1;
        }
    }
}

pub fn dehn_reduce(w: &Word, p: &Presentation, budget: usize) -> DehnTrace {
    Dehn::new(p).reduce(w, budget)
}

/// Parses `"1/6"` or `"0.25"`-free rational text.
pub fn parse_lambda(s: &str) -> Result<Rational64> {
    let bad = || crate::error::Error::Config(format!("invalid rational {s:?}"));
    let (a, b) = match s.split_once('/') {
        Some((a, b)) => (a.trim().parse::<i64>().map_err(|_| bad())?, b.trim().parse::<i64>().map_err(|_| bad())?),
        None => (s.trim().parse::<i64>().map_err(|_| bad())?, 1),
    };
    if b <= 0 || a < 0 {
        return Err(bad());
    }
    Ok(Rational64::new(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn pres(n: usize, rs: &[&str]) -> Presentation {
        Presentation::parse(n, rs).unwrap()
    }

    /// Brute force: longest word occurring as a prefix of two distinct
    /// cyclic conjugates (of relators or inverses).
    fn brute_piece(p: &Presentation) -> usize {
        let mut conj: HashSet<Vec<i32>> = HashSet::new();
        for r in &p.relators {
            let c = r.cyclic_reduce().0;
            for b in [c.clone(), c.inverse()] {
                for k in 0..b.len() {
                    conj.insert(b.rotate(k).to_ints());
                }
            }
        }
        let conj: Vec<Vec<i32>> = conj.into_iter().collect();
        let mut best = 0;
        for (i, a) in conj.iter().enumerate() {
            for b in &conj[i + 1..] {
                for len in 1..=a.len().min(b.len()) {
                    if a[..len] == b[..len] {
                        best = best.max(len);
                    }
                }
            }
        }
        best
    }

    #[test]
    fn pieces_match_brute_force() {
        for (n, rs, expect) in [
            (4, vec!["abAB", "cdCD"], 1),
            (4, vec!["abABcdCD"], 1),
            (2, vec!["aba", "bab"], 2),
        ] {
            let p = pres(n, &rs);
            assert_eq!(brute_piece(&p), expect);
            assert_eq!(max_piece_length(&p).max_piece_length, expect, "{rs:?}");
        }
        let r = max_piece_length(&pres(4, &["abABcdCD"]));
        assert_eq!(r.lambda_star, Rational64::new(1, 8));
        assert_eq!(max_piece_length(&pres(2, &["aba", "bab"])).piece.unwrap().len(), 2);
    }

    #[test]
    fn metric_examples() {
        let t = pres(4, &["abABcdCD"]);
        assert!(check_metric(&t, Rational64::new(1, 6)));
        assert!(!check_metric(&t, Rational64::new(1, 8)));
        let c = pres(2, &["abAB"]);
        assert_eq!(brute_piece(&c), 1);
        assert!(check_metric(&c, Rational64::new(1, 2)));
        assert!(!check_metric(&pres(4, &["abAB", "cdCD"]), Rational64::new(1, 6)));
    }

    #[test]
    fn asphericity_examples() {
        let v = asphericity_checks(&pres(2, &["ab", "AB"]));
        assert!(v.contains(&Violation::CyclicConjugate { first: 0, second: 1, inverse: true }));
        let v = asphericity_checks(&pres(2, &["ababab"]));
        assert!(matches!(v[0], Violation::ProperPower { exponent: 3, .. }));
        assert!(asphericity_checks(&pres(4, &["abAB", "cdCD"])).is_empty());
        assert!(asphericity_checks(&pres(4, &["abABcdCD"])).is_empty());
        let v = asphericity_checks(&pres(2, &["aB", "Ab"]));
        assert!(!v.is_empty());
    }

    #[test]
    fn product_collision_detected() {
        // (ab)(b) = (a)(bb)
        let v = asphericity_checks(&pres(2, &["ab", "b", "a", "bb"]));
        assert!(v.iter().any(|x| matches!(x, Violation::ProductCollision { .. })), "{v:?}");
    }

    #[test]
    fn dehn_examples() {
        let p = pres(4, &["abAB", "cdCD"]);
        let t = dehn_reduce(&Word::parse("abAB", 4).unwrap(), &p, 100);
        assert_eq!(t.outcome, DehnOutcome::Trivial);
        assert_eq!(
            t.decomposition,
            vec![DecompEntry { conjugator: Word::empty(), relator: 0, sign: 1 }]
        );
        let w = Word::parse("cabABC", 4).unwrap();
        let t = dehn_reduce(&w, &p, 100);
        assert_eq!(t.outcome, DehnOutcome::Trivial);
        assert_eq!(
            t.decomposition,
            vec![DecompEntry { conjugator: Word::parse("c", 4).unwrap(), relator: 0, sign: 1 }]
        );
        let t = dehn_reduce(&Word::parse("ab", 4).unwrap(), &p, 100);
        assert_eq!(t.outcome, DehnOutcome::Nontrivial);
    }

    #[test]
    fn dehn_witness_sound() {
        let p = pres(4, &["abABcdCD"]);
        let w = Word::parse("dcabABCDaDCdcBAbaCDcdA", 4).unwrap();
        let t = dehn_reduce(&w, &p, 100);
        assert_eq!(expand(&t.decomposition, &p.relators).mul(&t.residue), w);
    }

    #[test]
    fn dehn_budget() {
        let p = pres(4, &["abABcdCD"]);
        let w = Word::parse("abABcdCDabABcdCD", 4).unwrap();
        let t = dehn_reduce(&w, &p, 1);
        assert_eq!(t.outcome, DehnOutcome::BudgetExhausted);
        assert_eq!(dehn_reduce(&w, &p, 10).outcome, DehnOutcome::Trivial);
    }

    #[test]
    fn lambda_parse() {
        assert_eq!(parse_lambda("1/6").unwrap(), Rational64::new(1, 6));
        assert!(parse_lambda("x").is_err());
    }
}
