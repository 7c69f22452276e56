use std::collections::BTreeSet;

use num_rational::Rational64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relsep_core::cayley::{ExactFixtureOracle, WordProblemOracle};
use relsep_core::presentation::Presentation;
use relsep_core::smallcancel::{
    check_metric, dehn_reduce, expand, max_piece_length, Dehn, DehnOutcome, DEFAULT_DEHN_BUDGET,
};
use relsep_core::words::{reduce, Letter, Word};

fn pres(n: usize, rs: &[&str]) -> Presentation {
    Presentation::parse(n, rs).unwrap()
}

/// Longest common prefix over pairs of distinct cyclic conjugates of the
/// relators and their inverses.
fn brute_piece(p: &Presentation) -> usize {
    let mut sym = BTreeSet::new();
    for r in &p.relators {
        for s in [r.clone(), r.inverse()] {
            for k in 0..s.len() {
                sym.insert(s.rotate(k).to_ints());
            }
        }
    }
    let sym: Vec<_> = sym.into_iter().collect();
    let mut best = 0;
    for (i, x) in sym.iter().enumerate() {
        for y in &sym[i + 1..] {
            best = best.max(x.iter().zip(y).take_while(|(a, b)| a == b).count());
        }
    }
    best
}

fn relator(n: usize, len: usize) -> impl Strategy<Value = Word> {
    let g = n as i32;
    prop::collection::vec((1..=g, any::<bool>()).prop_map(|(x, s)| if s { x } else { -x }), len)
        .prop_filter_map("short", move |raw| {
            let (core, _) = reduce(&raw, n).ok()?.cyclic_reduce();
            (core.len() >= 2).then_some(core)
        })
}

fn presentation() -> impl Strategy<Value = Presentation> {
    prop::collection::vec(relator(3, 14), 1..5).prop_filter_map("duplicates", |mut rs| {
        rs.sort();
        rs.dedup();
        Presentation::new(3, rs).ok()
    })
}

fn random_word<R: Rng>(n: usize, len: usize, rng: &mut R) -> Word {
    let raw: Vec<i32> = (0..len)
        .map(|_| {
            let g = rng.gen_range(1..=n as i32);
            if rng.gen() { g } else { -g }
        })
        .collect();
    reduce(&raw, n).unwrap()
}

/// A product of `k` random conjugates of relators.
fn random_trivial<R: Rng>(p: &Presentation, k: usize, rng: &mut R) -> Word {
    let mut w = Word::empty();
    for _ in 0..k {
        let r = &p.relators[rng.gen_range(0..p.len())];
        let r = if rng.gen() { r.clone() } else { r.inverse() };
        let u = random_word(p.n, rng.gen_range(0..4), rng);
        w = w.mul(&u.mul(&r).mul(&u.inverse()));
    }
    w
}

#[test]
fn piece_examples() {
    for (n, rs, expect) in [(4, vec!["abAB", "cdCD"], 1), (4, vec!["abABcdCD"], 1), (2, vec!["aba", "bab"], 2)] {
        let p = pres(n, &rs);
        assert_eq!(brute_piece(&p), expect, "{rs:?}");
        assert_eq!(max_piece_length(&p).max_piece_length, expect, "{rs:?}");
    }
    assert_eq!(max_piece_length(&pres(4, &["abABcdCD"])).lambda_star, Rational64::new(1, 8));
    let piece = max_piece_length(&pres(2, &["aba", "bab"])).piece.unwrap();
    assert_eq!(piece.to_text().unwrap(), "ab");
}

/// Words of length at most 8 that are trivial in the one-relator surface
/// group: at this length only the cyclic conjugates of the relator and its
/// inverse.
#[test]
fn dehn_is_exact_on_short_surface_words() {
    let p = pres(4, &["abABcdCD"]);
    let t = &p.relators[0];
    let trivial: BTreeSet<Word> = t.cyclic_conjugates().into_iter().chain(t.inverse().cyclic_conjugates()).collect();
    let dehn = Dehn::new(&p);
    let r = pres(4, &["abAB", "cdCD"]);
    let exact = ExactFixtureOracle::detect(&r).unwrap();
    let mut stack = vec![Word::empty()];
    let mut seen = 0usize;
    let mut hits = BTreeSet::new();
    while let Some(w) = stack.pop() {
        let out = dehn.reduce(&w, DEFAULT_DEHN_BUDGET).outcome;
        let expect = w.is_empty() || trivial.contains(&w);
        assert_eq!(out == DehnOutcome::Trivial, expect, "{w}");
        assert_ne!(out, DehnOutcome::BudgetExhausted);
        if expect {
            // the surface group maps onto the half group
            assert!(exact.decide(&w).is_trivial(), "{w}");
            hits.insert(w.clone());
        }
        seen += 1;
        if w.len() < 8 {
            for i in 0..8 {
                let l = Letter::from_index(i);
                if w.last() != Some(l.inverse()) {
                    stack.push(w.mul_letter(l));
                }
            }
        }
    }
    assert_eq!(seen, 1 + (1..=8).map(|k| 8 * 7usize.pow(k - 1)).sum::<usize>());
    assert_eq!(hits.len(), 17);
}

#[test]
fn dehn_triviality_is_conjugation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(20261016);
    for p in [pres(4, &["abABcdCD"]), pres(4, &["abAB", "cdCD"])] {
        for case in 0..1000 {
            let w = if case % 2 == 0 { random_trivial(&p, 3, &mut rng) } else { random_word(4, 12, &mut rng) };
            let u = random_word(4, rng.gen_range(1..6), &mut rng);
            let a = dehn_reduce(&w, &p, DEFAULT_DEHN_BUDGET).outcome;
            let b = dehn_reduce(&u.mul(&w).mul(&u.inverse()), &p, DEFAULT_DEHN_BUDGET).outcome;
            assert_eq!(a == DehnOutcome::Trivial, b == DehnOutcome::Trivial, "{w} under {u}");
        }
    }
}

#[test]
fn dehn_proves_products_of_conjugates() {
    let p = pres(4, &["abABcdCD"]);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..500 {
        let w = random_trivial(&p, 4, &mut rng);
        let t = dehn_reduce(&w, &p, DEFAULT_DEHN_BUDGET);
        assert_eq!(t.outcome, DehnOutcome::Trivial, "{w}");
    }
}

proptest! {
    #[test]
    fn pieces_match_brute_force(p in presentation()) {
        prop_assert_eq!(max_piece_length(&p).max_piece_length, brute_piece(&p));
    }

    #[test]
    fn metric_is_monotone(p in presentation(), a in 1i64..20, b in 1i64..20) {
        let (lo, hi) = (a.min(b), a.max(b));
        if check_metric(&p, Rational64::new(lo, 20)) {
            prop_assert!(check_metric(&p, Rational64::new(hi, 20)));
        }
    }

    #[test]
    fn decompositions_are_sound(seed in any::<u64>(), k in 0usize..5, which in 0usize..3) {
        let p = [pres(4, &["abABcdCD"]), pres(4, &["abAB", "cdCD"]), pres(2, &["aabbbAB"])][which].clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = if seed % 3 == 0 { random_word(p.n, 10, &mut rng) } else { random_trivial(&p, k, &mut rng) };
        let t = dehn_reduce(&w, &p, DEFAULT_DEHN_BUDGET);
        prop_assert_eq!(expand(&t.decomposition, &p.relators).mul(&t.residue), w);
        if t.outcome == DehnOutcome::Trivial {
            prop_assert!(t.residue.is_empty());
        }
    }
}
