//! File formats, output writers, parallel replicates and the experiment
//! driver around `massaction-core`.

pub mod automaton_format;
pub mod cli;
pub mod output;
pub mod runner;
pub mod scenario_format;

pub use massaction_core as engine;
