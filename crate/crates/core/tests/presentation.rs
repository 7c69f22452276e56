use proptest::prelude::*;
use relsep_core::presentation::{halve, halve_with, HalfRole, HalvedPresentation, Presentation};
use relsep_core::words::{reduce, Word};

fn relator(n: usize, min: usize, max: usize) -> impl Strategy<Value = Word> {
    let g = n as i32;
    prop::collection::vec((1..=g, any::<bool>()).prop_map(|(x, s)| if s { x } else { -x }), max)
        .prop_filter_map("too short once reduced", move |raw| {
            let (core, _) = reduce(&raw, n).ok()?.cyclic_reduce();
            (core.len() >= min).then_some(core)
        })
}

fn presentation() -> impl Strategy<Value = Presentation> {
    prop::collection::vec(relator(3, 2, 16), 1..6).prop_filter_map("duplicate relators", |mut rs| {
        rs.sort();
        rs.dedup();
        Presentation::new(3, rs).ok()
    })
}

#[test]
fn fixture_halves_interleave() {
    let p = Presentation::parse(4, &["abABcdCD"]).unwrap();
    let hp = halve(&p).unwrap();
    assert_eq!(hp.half(0).to_text().unwrap(), "abAB");
    assert_eq!(hp.half(1).to_text().unwrap(), "cdCD");
    assert_eq!(hp.pair_index(hp.half(1)).unwrap(), (0, HalfRole::Second));
    assert_eq!(hp.partner(hp.half(0)).unwrap(), hp.half(1));
}

proptest! {
    #[test]
    fn halves_concatenate_to_relators(p in presentation()) {
        let hp = halve(&p).unwrap();
        for i in 0..hp.pairs() {
            let (r, s) = hp.pair(i);
            let joined: Vec<i32> = r.to_ints().into_iter().chain(s.to_ints()).collect();
            prop_assert_eq!(joined, p.relators[i].to_ints());
            let l = p.relators[i].len();
            prop_assert_eq!(r.len(), l / 2);
            prop_assert_eq!(s.len(), l - l / 2);
        }
    }

    #[test]
    fn reassembly_inverts_halving(p in presentation()) {
        let hp = halve(&p).unwrap();
        prop_assert_eq!(hp.reassemble(), p.clone());
        let again = HalvedPresentation::from_json(&hp.to_json()).unwrap();
        prop_assert_eq!(again.reassemble(), p);
    }

    #[test]
    fn custom_splits_reassemble(p in presentation(), at in prop::collection::vec(0.0f64..1.0, 6)) {
        let splits: Vec<usize> =
            p.relators.iter().zip(&at).map(|(r, x)| (1 + ((r.len() - 1) as f64 * x) as usize).min(r.len() - 1)).collect();
        let hp = halve_with(&p, splits.clone()).unwrap();
        for (i, s) in splits.iter().enumerate() {
            prop_assert_eq!(hp.pair(i).0.len(), *s);
        }
        prop_assert_eq!(hp.reassemble(), p);
    }
}
