//! Running scenarios: parallel replicates, the three models and the
//! five-species experiment.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use massaction_core::automaton::{MacroState, ParticleAutomaton};
use massaction_core::meanfield::{simulate_mean, Concentration, DensityAlpha, MeanFieldError, MeanFieldParams};
use massaction_core::rng::{RngStream, RNG_ALGORITHM};
use massaction_core::scenario::{
    five_species_scenario, init_spatial, AutomatonSource, FiveSpeciesVariant, ModelKind, ScenarioConfig,
    ScenarioError,
};
use massaction_core::spatial::{alpha_from_geometry, simulate_spatial, Arena};
use massaction_core::wellstirred::{simulate_ssa, EnsembleSummary};
use rayon::prelude::*;
use thiserror::Error;

use crate::output::{self, RunMetadata};
use crate::scenario_format::serialize_scenario;

/// Well-stirred replicates in the experiment use streams offset by this much
/// so they never share a stream with a spatial replicate.
pub const SSA_STREAM_OFFSET: u64 = 1 << 32;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    MeanField(#[from] MeanFieldError),
    #[error("cannot write output: {0}")]
    Io(#[from] io::Error),
    #[error("cannot start worker threads: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl RunError {
    /// True when the input was at fault rather than the run itself.
    pub fn is_input_error(&self) -> bool {
        matches!(self, RunError::Scenario(_))
    }
}

/// Evaluates `f` for replicates `0..replicates` on at most `jobs` threads.
/// Results come back in replicate order whatever the thread count.
pub fn map_replicates<T, F>(jobs: usize, replicates: usize, f: F) -> Result<Vec<T>, RunError>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
    Ok(pool.install(|| (0..replicates as u64).into_par_iter().map(&f).collect()))
}

/// A frame dump: step and CSV text.
pub type Frame = (usize, String);

/// One spatial replicate on stream `(config.seed, replicate)`. With a frame
/// cadence, also returns `(t, frame csv)` for every `t` divisible by it.
pub fn spatial_replicate(
    config: &ScenarioConfig,
    a: &ParticleAutomaton,
    replicate: u64,
    frames: Option<usize>,
) -> Result<(Vec<MacroState>, Vec<Frame>), RunError> {
    let arena = config.arena.ok_or(ScenarioError::MissingField("arena"))?;
    let mut rng = RngStream::new(config.seed, replicate);
    let initial = init_spatial(config, a, &mut rng)?;
    let mut dumped = Vec::new();
    let rows = simulate_spatial(a, &initial, &arena, config.horizon, &mut rng, |t, state| {
        if let Some(every) = frames {
            if t % every.max(1) == 0 {
                dumped.push((t, output::frame_csv(a.species(), state)));
            }
        }
    });
    Ok((rows, dumped))
}

pub fn ssa_replicate(
    a: &ParticleAutomaton,
    initial: &MacroState,
    alpha: DensityAlpha,
    horizon: usize,
    seed: u64,
    stream: u64,
) -> Vec<MacroState> {
    simulate_ssa(a, initial, alpha, horizon, &mut RngStream::new(seed, stream))
}

/// Hash of the scenario with its automaton written out inline, so that the
/// hash follows the automaton's content rather than its file name.
pub fn scenario_hash(config: &ScenarioConfig, a: &ParticleAutomaton) -> String {
    let mut inline = config.clone();
    inline.automaton = AutomatonSource::Inline(a.clone());
    match serialize_scenario(&inline) {
        Ok(text) => output::sha256_hex(&text),
        // unwritable species names; fall back to the debug form
        Err(_) => output::sha256_hex(&format!("{inline:?}")),
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    pub jobs: usize,
    /// Dump position frames of replicate 0 every this many steps.
    pub frames: Option<usize>,
}

fn metadata(config: &ScenarioConfig, a: &ParticleAutomaton, alpha: f64, c_bin: f64) -> RunMetadata {
    RunMetadata {
        tool_version: output::TOOL_VERSION.to_owned(),
        rng_algorithm: RNG_ALGORITHM.to_owned(),
        seed: config.seed,
        replicates: config.replicates,
        scenario_hash: scenario_hash(config, a),
        model: config.model.as_str().to_owned(),
        alpha,
        c_bin,
        population: config.total_population(),
        horizon: config.horizon,
        calibration: None,
        wall_clock_seconds: 0.0,
    }
}

fn write_runs(
    dir: &Path,
    a: &ParticleAutomaton,
    runs: &[Vec<MacroState>],
    meta: &RunMetadata,
) -> io::Result<PathBuf> {
    if runs.len() == 1 {
        output::write_with_meta(dir, "counts.csv", &output::counts_csv(a.species(), &runs[0]), meta)
    } else {
        let summary = EnsembleSummary::from_runs(runs);
        output::write_with_meta(dir, "ensemble.csv", &output::ensemble_csv(a.species(), &summary), meta)
    }
}

/// Runs `config` and writes its outputs into `dir`:
/// - mean: `trajectory.csv` (concentrations);
/// - ssa, spatial: `counts.csv` for one replicate, `ensemble.csv` for more;
/// - spatial with a frame cadence: `frames/frame_<t>.csv` for replicate 0.
///
/// Returns the data files written, each with a `.meta.json` sidecar.
pub fn run_scenario(
    config: &ScenarioConfig,
    a: &ParticleAutomaton,
    dir: &Path,
    opts: RunOptions,
) -> Result<Vec<PathBuf>, RunError> {
    config.validate(a)?;
    let started = Instant::now();
    let initial = config.initial_counts(a)?;
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    match config.model {
        ModelKind::Mean => {
            let params = config.mean_field_params()?;
            let x0 = Concentration::from_counts(&initial)?;
            let rows = simulate_mean(a, &x0, params, config.horizon)?;
            let mut meta = metadata(config, a, params.alpha.get(), params.c_bin);
            meta.wall_clock_seconds = started.elapsed().as_secs_f64();
            let csv = output::trajectory_csv(a.species(), &rows);
            written.push(output::write_with_meta(dir, "trajectory.csv", &csv, &meta)?);
        }
        ModelKind::Ssa => {
            let alpha = config.resolve_alpha()?;
            let runs = map_replicates(opts.jobs, config.replicates, |r| {
                ssa_replicate(a, &initial, alpha, config.horizon, config.seed, r)
            })?;
            let mut meta = metadata(config, a, alpha.get(), config.c_bin);
            meta.wall_clock_seconds = started.elapsed().as_secs_f64();
            written.push(write_runs(dir, a, &runs, &meta)?);
        }
        ModelKind::Spatial => {
            let results = map_replicates(opts.jobs, config.replicates, |r| {
                spatial_replicate(config, a, r, if r == 0 { opts.frames } else { None })
            })?;
            let mut runs = Vec::with_capacity(results.len());
            let mut frames = Vec::new();
            for result in results {
                let (rows, dumped) = result?;
                runs.push(rows);
                if frames.is_empty() {
                    frames = dumped;
                }
            }
            // α reported for reference: what the density bridge gives
            let arena = config.arena.ok_or(ScenarioError::MissingField("arena"))?;
            let alpha = bridged_alpha(&arena, config.total_population())?;
            let mut meta = metadata(config, a, alpha.get(), config.c_bin);
            meta.calibration = Some("alpha from the density bridge, reported only".to_owned());
            meta.wall_clock_seconds = started.elapsed().as_secs_f64();
            written.push(write_runs(dir, a, &runs, &meta)?);
            if !frames.is_empty() {
                let frame_dir = dir.join("frames");
                fs::create_dir_all(&frame_dir)?;
                for (t, csv) in frames {
                    written.push(output::write_with_meta(&frame_dir, &format!("frame_{t}.csv"), &csv, &meta)?);
                }
            }
        }
    }
    Ok(written)
}

fn bridged_alpha(arena: &Arena, population: u64) -> Result<DensityAlpha, ScenarioError> {
    Ok(alpha_from_geometry(arena.radius(), arena.area(), population)?)
}

/// Spatial, well-stirred and mean-field results for one five-species variant.
#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub variant: FiveSpeciesVariant,
    pub config: ScenarioConfig,
    pub automaton: ParticleAutomaton,
    /// α from the density bridge; the well-stirred runs use it directly.
    pub alpha: DensityAlpha,
    /// Mean-field parameters matched to the well-stirred pairing at `alpha`.
    pub mean_params: MeanFieldParams,
    pub spatial: Vec<Vec<MacroState>>,
    pub ssa: Vec<Vec<MacroState>>,
    /// Mean-field trajectory in concentrations.
    pub mean: Vec<Concentration>,
    pub wall_clock_seconds: f64,
}

/// Runs the bundled five-species scenario for `variant` in all three models.
/// Spatial replicate `r` uses stream `r`; well-stirred replicate `r` uses
/// stream `SSA_STREAM_OFFSET + r`.
pub fn run_experiment(
    variant: FiveSpeciesVariant,
    seed: u64,
    replicates: usize,
    jobs: usize,
) -> Result<ExperimentReport, RunError> {
    let started = Instant::now();
    let (mut config, a) = five_species_scenario(variant);
    config.seed = seed;
    config.replicates = replicates;
    config.validate(&a)?;
    let initial = config.initial_counts(&a)?;
    let arena = config.arena.ok_or(ScenarioError::MissingField("arena"))?;
    let alpha = bridged_alpha(&arena, config.total_population())?;
    let mean_params = MeanFieldParams::matching_pairing(alpha);

    let spatial = map_replicates(jobs, replicates, |r| spatial_replicate(&config, &a, r, None))?
        .into_iter()
        .map(|res| res.map(|(rows, _)| rows))
        .collect::<Result<Vec<_>, _>>()?;
    let ssa = map_replicates(jobs, replicates, |r| {
        ssa_replicate(&a, &initial, alpha, config.horizon, seed, SSA_STREAM_OFFSET + r)
    })?;
    let mean = simulate_mean(&a, &Concentration::from_counts(&initial)?, mean_params, config.horizon)?;

    Ok(ExperimentReport {
        variant,
        config,
        automaton: a,
        alpha,
        mean_params,
        spatial,
        ssa,
        mean,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    })
}

/// `t` followed by, per species, the spatial ensemble mean, the well-stirred
/// ensemble mean and the mean-field count.
pub fn comparison_csv(report: &ExperimentReport) -> String {
    use std::fmt::Write as _;
    let names = report.automaton.species();
    let m = report.config.total_population() as f64;
    let spatial = EnsembleSummary::from_runs(&report.spatial);
    let ssa = EnsembleSummary::from_runs(&report.ssa);
    let mut out = String::from("t");
    for n in names {
        write!(out, ",{n}_spatial,{n}_ssa,{n}_meanfield").unwrap();
    }
    out.push('\n');
    for (t, x) in report.mean.iter().enumerate() {
        write!(out, "{t}").unwrap();
        for k in 0..names.len() {
            write!(
                out,
                ",{:.6},{:.6},{:.6}",
                spatial.mean[t][k],
                ssa.mean[t][k],
                x.as_slice()[k] * m
            )
            .unwrap();
        }
        out.push('\n');
    }
    out
}

/// Mean-field trajectory scaled to counts, `t,<names>`.
pub fn mean_counts_csv(report: &ExperimentReport) -> String {
    use std::fmt::Write as _;
    let m = report.config.total_population() as f64;
    let mut out = String::from("t");
    for n in report.automaton.species() {
        write!(out, ",{n}").unwrap();
    }
    out.push('\n');
    for (t, x) in report.mean.iter().enumerate() {
        write!(out, "{t}").unwrap();
        for v in x.as_slice() {
            write!(out, ",{:.6}", v * m).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Writes `spatial_ensemble.csv`, `ssa_ensemble.csv`, `meanfield.csv` and
/// `comparison.csv`, each with a sidecar.
pub fn write_experiment(report: &ExperimentReport, dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    fs::create_dir_all(dir)?;
    let a = &report.automaton;
    let base = metadata(&report.config, a, report.alpha.get(), report.config.c_bin);
    let with = |model: &str, alpha: f64, c_bin: f64, calibration: &str| RunMetadata {
        model: model.to_owned(),
        alpha,
        c_bin,
        calibration: Some(calibration.to_owned()),
        wall_clock_seconds: report.wall_clock_seconds,
        ..base.clone()
    };
    let bridged = "alpha from the density bridge";
    let matched = format!(
        "mean-field matched to the well-stirred pairing at bridged alpha {}: alpha' = 2a/(1+a), c_bin = 1",
        report.alpha.get()
    );
    let p = report.mean_params;
    let spatial_meta = with("spatial", report.alpha.get(), base.c_bin, bridged);
    let ssa_meta = with("ssa", report.alpha.get(), base.c_bin, bridged);
    let mean_meta = with("mean", p.alpha.get(), p.c_bin, &matched);
    let cmp_meta = with("comparison", report.alpha.get(), base.c_bin, &matched);

    let spatial = EnsembleSummary::from_runs(&report.spatial);
    let ssa = EnsembleSummary::from_runs(&report.ssa);
    Ok(vec![
        output::write_with_meta(dir, "spatial_ensemble.csv", &output::ensemble_csv(a.species(), &spatial), &spatial_meta)?,
        output::write_with_meta(dir, "ssa_ensemble.csv", &output::ensemble_csv(a.species(), &ssa), &ssa_meta)?,
        output::write_with_meta(dir, "meanfield.csv", &mean_counts_csv(report), &mean_meta)?,
        output::write_with_meta(dir, "comparison.csv", &comparison_csv(report), &cmp_meta)?,
    ])
}
