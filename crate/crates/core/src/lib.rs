//! Engine for mass-action systems whose particles are probabilistic automata.
//!
//! Three aggregate models share one [`ParticleAutomaton`]:
//!
//! * [`meanfield`]: the deterministic discrete-time average dynamics over
//!   relative concentrations, with symbolic derivation of the bilinear update.
//! * [`wellstirred`]: individual stochastic runs without space, pairing
//!   particles at random each step.
//! * [`spatial`]: individual runs on a periodic rectangle where particles
//!   random-walk and react with everything inside an interaction radius.
//!
//! [`scenario`] builds initial states and carries the bundled five-species
//! experiment. The crate is `no_std` (it needs `alloc`); file formats, the CLI
//! and parallel replicate scheduling live in the `massaction` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod automaton;
pub mod meanfield;
pub mod rng;
pub mod scenario;
pub mod spatial;
pub mod wellstirred;

pub use automaton::{Input, MacroState, ParticleAutomaton, Species};
pub use meanfield::{Concentration, DensityAlpha, PolynomialSystem};
pub use rng::RngStream;
pub use scenario::{ModelKind, ScenarioConfig};
pub use spatial::{Arena, SpatialState};
pub use wellstirred::MicroState;
