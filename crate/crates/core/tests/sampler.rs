use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use relsep_core::presentation::halve;
use relsep_core::sampler::{balanced_extension, nonempty_cells, sample, Family, ModelSpec};

const BALANCED_TRIALS: u64 = 200;

/// Fraction of seeded density samples (n=3, l=12, d=0.15) whose halves admit a
/// balanced extension with slack 0.05.
fn balanced_feasibility() -> f64 {
    let mut ok = 0;
    for i in 0..BALANCED_TRIALS {
        let t = sample(&ModelSpec::new(Family::Density, 3, 12, 0.15, 20261016 + i)).unwrap();
        let hp = halve(&t.presentation).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(i);
        if balanced_extension(3, hp.halves(), 12, 0.15, 0.05, &mut rng).is_ok() {
            ok += 1;
        }
    }
    ok as f64 / BALANCED_TRIALS as f64
}

#[test]
fn balanced_extension_pilot_is_frozen() {
    // one word per cell and 36 halves rarely land in 36 distinct cells
    assert_eq!(balanced_feasibility(), 0.0);
}

#[test]
#[ignore = "infeasible at n=3, l=12: the quota is one word per cell, so all halves must occupy distinct cells (0/200 in the frozen pilot)"]
fn balanced_extension_usually_feasible() {
    assert!(balanced_feasibility() >= 0.95);
}

#[test]
fn theta_bar_fills_every_cell_once() {
    let spec = ModelSpec::new(Family::ThetaBar, 2, 8, 0.5, 11);
    let r = sample(&spec).unwrap();
    let cells = nonempty_cells(2, 8).unwrap();
    assert_eq!(cells, 16);
    assert_eq!(r.cells.len(), cells);
    assert!(r.cells.iter().all(|c| c.count == spec.target() / 16));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn samples_are_deterministic_and_distinct(seed in any::<u64>(), n in 2usize..4, l in 4usize..10, fam in 0usize..5) {
        let family = [Family::Density, Family::Theta, Family::Omega, Family::KAngular, Family::KAngularPositive][fam];
        let spec = ModelSpec::new(family, n, l, 0.3, seed);
        let a = sample(&spec).unwrap();
        let b = sample(&spec).unwrap();
        prop_assert_eq!(&a.presentation, &b.presentation);
        let set: BTreeSet<_> = a.presentation.relators.iter().collect();
        prop_assert_eq!(set.len(), a.presentation.len());
        prop_assert_eq!(a.presentation.len(), spec.target() * spec.lengths().len());
        let c = spec.constraints();
        for w in &a.presentation.relators {
            prop_assert!(spec.lengths().contains(&w.len()));
            prop_assert!(c.admits(w));
        }
    }
}
