mod common;

use common::{random_automaton, random_simplex};
use massaction_core::automaton::{three_species_example, MacroState};
use massaction_core::meanfield::{
    delta1, delta2, derive_polynomial, simulate_mean, step, Concentration, DensityAlpha, MeanFieldError,
    MeanFieldParams,
};
use massaction_core::rng::RngStream;
use massaction_core::wellstirred::ensemble;

#[test]
fn changes_sum_to_zero_and_step_stays_on_simplex() {
    let mut rng = RngStream::new(2024, 0);
    let mut exits = 0;
    for trial in 0..100 {
        let n = 2 + trial % 6;
        let a = random_automaton(n, &mut rng);
        for _ in 0..100 {
            let x = random_simplex(n, &mut rng);
            let s1: f64 = delta1(&a, &x).unwrap().iter().sum();
            let s2: f64 = delta2(&a, &x).unwrap().iter().sum();
            assert!(s1.abs() <= 1e-12, "ΣΔ1 = {s1:e}");
            assert!(s2.abs() <= 1e-12, "ΣΔ2 = {s2:e}");

            let alpha = rng.uniform();
            // c_bin = 1 never leaves the simplex
            let p = MeanFieldParams::new(alpha, 1.0).unwrap();
            let next = step(&a, &x, p).unwrap();
            let sum: f64 = next.as_slice().iter().sum();
            assert!((sum - 1.0).abs() <= 1e-12, "Σx' = {sum}");

            // c_bin = 2 may leave it; the unclamped polynomial still conserves mass
            let p2 = MeanFieldParams::new(alpha, 2.0).unwrap();
            let poly_sum: f64 = derive_polynomial(&a, p2).evaluate(x.as_slice()).iter().sum();
            assert!((poly_sum - 1.0).abs() <= 1e-12);
            match step(&a, &x, p2) {
                Ok(next) => {
                    let sum: f64 = next.as_slice().iter().sum();
                    assert!((sum - 1.0).abs() <= 1e-12);
                }
                Err(MeanFieldError::NegativeConcentration { .. }) => exits += 1,
                Err(e) => panic!("{e}"),
            }
        }
    }
    // random automata at α near 1 do leave the simplex under c_bin = 2
    assert!(exits < 10_000);
}

#[test]
fn well_stirred_mean_follows_matched_mean_field() {
    let a = three_species_example();
    let init = MacroState(vec![400, 300, 300]);
    let alpha = DensityAlpha::new(0.1).unwrap();
    let summary = ensemble(&a, &init, alpha, 50, 40, 11);
    let x0 = Concentration::from_counts(&init).unwrap();
    let mean = simulate_mean(&a, &x0, MeanFieldParams::matching_pairing(alpha), 50).unwrap();
    for k in 0..3 {
        let expected = mean[50].as_slice()[k] * 1000.0;
        let got = summary.mean[50][k];
        assert!(
            (got - expected).abs() <= 0.05 * expected,
            "species {k}: ensemble {got} vs mean-field {expected}"
        );
    }
}
