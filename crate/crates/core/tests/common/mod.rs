#![allow(dead_code)]

use massaction_core::automaton::ParticleAutomaton;
use massaction_core::meanfield::Concentration;
use massaction_core::rng::RngStream;

/// Stochastic row with roughly a third of its entries forced to zero.
pub fn random_row(n: usize, rng: &mut RngStream) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n)
        .map(|_| if rng.bernoulli(0.3) { 0.0 } else { rng.uniform() + 1e-3 })
        .collect();
    if w.iter().all(|&v| v == 0.0) {
        w[rng.index(n)] = 1.0;
    }
    let s: f64 = w.iter().sum();
    w.iter().map(|v| v / s).collect()
}

pub fn random_automaton(n: usize, rng: &mut RngStream) -> ParticleAutomaton {
    let solitary: Vec<Vec<f64>> = (0..n).map(|_| random_row(n, rng)).collect();
    let binary: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|_| (0..n).map(|_| random_row(n, rng)).collect())
        .collect();
    let names = (0..n).map(|i| format!("s{i}")).collect();
    ParticleAutomaton::new(names, &solitary, &binary).expect("normalized rows")
}

/// Uniform point on the simplex.
pub fn random_simplex(n: usize, rng: &mut RngStream) -> Concentration {
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.uniform()).ln()).collect();
    let s: f64 = e.iter().sum();
    let mut x: Vec<f64> = e.iter().map(|v| v / s).collect();
    // push the rounding residue into the largest entry
    let residue = 1.0 - x.iter().sum::<f64>();
    let big = (0..n).max_by(|&a, &b| x[a].total_cmp(&x[b])).unwrap();
    x[big] += residue;
    Concentration::new(x).expect("on the simplex")
}
