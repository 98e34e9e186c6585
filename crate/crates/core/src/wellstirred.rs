//! Individual well-stirred dynamics: each step every particle either acts
//! alone or is paired with a uniformly random unprocessed partner.

use alloc::vec::Vec;

use crate::automaton::{Input, MacroState, ParticleAutomaton, Species};
use crate::meanfield::DensityAlpha;
use crate::rng::RngStream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Particle {
    pub id: u64,
    pub state: Species,
}

/// The list `L` of `(id, state)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MicroState {
    pub particles: Vec<Particle>,
}

impl MicroState {
    /// Ids `0..m` assigned in species order.
    pub fn from_counts(counts: &MacroState) -> Self {
        let mut particles = Vec::with_capacity(counts.total() as usize);
        let mut id = 0;
        for (state, &c) in counts.0.iter().enumerate() {
            for _ in 0..c {
                particles.push(Particle { id, state });
                id += 1;
            }
        }
        Self { particles }
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }
}

/// Particles per species. `n` is the number of species.
pub fn counts(state: &MicroState, n: usize) -> MacroState {
    let mut c = MacroState::zeros(n);
    for p in &state.particles {
        c.0[p.state] += 1;
    }
    c
}

/// One synchronous round over all particles.
///
/// Particles are drawn without replacement. A drawn particle tosses a coin
/// with bias α; on heads it takes a second particle from those not yet drawn
/// and both apply their binary rules independently, each reading the other's
/// pre-step state. On tails, or when no partner is left, it applies its
/// solitary rule. The returned list keeps the input order.
pub fn ssa_step(
    a: &ParticleAutomaton,
    state: &MicroState,
    alpha: DensityAlpha,
    rng: &mut RngStream,
) -> MicroState {
    let before = &state.particles;
    let mut after = before.clone();
    let mut remaining: Vec<usize> = (0..before.len()).collect();
    while !remaining.is_empty() {
        let i = remaining.swap_remove(rng.index(remaining.len()));
        let q = before[i].state;
        let wants_partner = rng.bernoulli(alpha.get());
        if !wants_partner || remaining.is_empty() {
            after[i].state = a.sample_transition(q, Input::Solitary, rng.uniform());
            continue;
        }
        let j = remaining.swap_remove(rng.index(remaining.len()));
        let q_other = before[j].state;
        after[i].state = a.sample_transition(q, Input::Encounter(q_other), rng.uniform());
        after[j].state = a.sample_transition(q_other, Input::Encounter(q), rng.uniform());
    }
    MicroState { particles: after }
}

/// Counts after each of `horizon` steps, starting with `initial` at row 0.
pub fn simulate_ssa(
    a: &ParticleAutomaton,
    initial: &MacroState,
    alpha: DensityAlpha,
    horizon: usize,
    rng: &mut RngStream,
) -> Vec<MacroState> {
    let n = a.len();
    let mut state = MicroState::from_counts(initial);
    let mut rows = Vec::with_capacity(horizon + 1);
    rows.push(initial.clone());
    for _ in 0..horizon {
        state = ssa_step(a, &state, alpha, rng);
        rows.push(counts(&state, n));
    }
    rows
}

/// Per-step mean and sample standard deviation of counts across replicates.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSummary {
    pub replicates: usize,
    /// `mean[t][k]`
    pub mean: Vec<Vec<f64>>,
    /// `std[t][k]`, zero for a single replicate.
    pub std: Vec<Vec<f64>>,
}

impl EnsembleSummary {
    /// All runs must have the same shape. Runs are combined in slice order.
    pub fn from_runs(runs: &[Vec<MacroState>]) -> Self {
        let r = runs.len();
        let steps = runs.first().map_or(0, Vec::len);
        let n = runs
            .first()
            .and_then(|run| run.first())
            .map_or(0, |c| c.0.len());
        let mut mean = alloc::vec![alloc::vec![0.0; n]; steps];
        let mut std = alloc::vec![alloc::vec![0.0; n]; steps];
        for t in 0..steps {
            for k in 0..n {
                let m = runs.iter().map(|run| run[t].0[k] as f64).sum::<f64>() / r as f64;
                mean[t][k] = m;
                if r > 1 {
                    let ss: f64 = runs
                        .iter()
                        .map(|run| {
                            let d = run[t].0[k] as f64 - m;
                            d * d
                        })
                        .sum();
                    std[t][k] = libm::sqrt(ss / (r - 1) as f64);
                }
            }
        }
        Self {
            replicates: r,
            mean,
            std,
        }
    }
}

/// Runs replicates `0..replicates` on streams `(seed, r)` one after another.
/// The `massaction` crate provides a parallel equivalent.
pub fn ensemble(
    a: &ParticleAutomaton,
    initial: &MacroState,
    alpha: DensityAlpha,
    horizon: usize,
    replicates: usize,
    seed: u64,
) -> EnsembleSummary {
    let runs: Vec<Vec<MacroState>> = (0..replicates as u64)
        .map(|r| simulate_ssa(a, initial, alpha, horizon, &mut RngStream::new(seed, r)))
        .collect();
    EnsembleSummary::from_runs(&runs)
}
