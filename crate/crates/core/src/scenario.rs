//! Run descriptions, initial-state construction and the bundled
//! five-species experiment.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::automaton::{MacroState, ParticleAutomaton};
use crate::meanfield::{DensityAlpha, MeanFieldParams, DEFAULT_C_BIN};
use crate::rng::RngStream;
use crate::spatial::{alpha_from_geometry, Arena, GeometryError, Position, SpatialParticle, SpatialState};

pub const DEFAULT_HORIZON: usize = 500;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ScenarioError {
    #[error("unknown species `{0}`")]
    UnknownSpecies(String),
    #[error("species `{0}` listed twice in the population")]
    DuplicateSpecies(String),
    #[error("region {region:?} for `{species}` is empty or leaves the arena")]
    RegionOutOfBounds { species: String, region: Region },
    #[error("missing field `{0}`")]
    MissingField(&'static str),
    #[error("invalid value for `{field}`: {reason}")]
    InvalidValue { field: &'static str, reason: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Mean,
    Ssa,
    Spatial,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Mean => "mean",
            ModelKind::Ssa => "ssa",
            ModelKind::Spatial => "spatial",
        }
    }
}

impl core::str::FromStr for ModelKind {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mean" => Ok(ModelKind::Mean),
            "ssa" => Ok(ModelKind::Ssa),
            "spatial" => Ok(ModelKind::Spatial),
            other => Err(ScenarioError::InvalidValue {
                field: "model",
                reason: alloc::format!("`{other}` is not one of mean, ssa, spatial"),
            }),
        }
    }
}

/// Where a scenario's automaton comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum AutomatonSource {
    /// A file, resolved relative to the scenario file by the caller.
    Path(String),
    /// A name understood by [`builtin_automaton`].
    Builtin(String),
    Inline(ParticleAutomaton),
}

/// Axis-aligned placement rectangle `[x0, x1) x [y0, y1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Region {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Region {
    /// Unit square centred on `(cx, cy)`.
    pub fn unit_square(cx: f64, cy: f64) -> Self {
        Self {
            x0: cx - 0.5,
            y0: cy - 0.5,
            x1: cx + 0.5,
            y1: cy + 0.5,
        }
    }

    pub fn contains(&self, p: Position) -> bool {
        p.x >= self.x0 && p.x < self.x1 && p.y >= self.y0 && p.y < self.y1
    }

    fn fits(&self, arena: &Arena) -> bool {
        self.x0 >= 0.0
            && self.y0 >= 0.0
            && self.x1 <= arena.width()
            && self.y1 <= arena.height()
            && self.x0 < self.x1
            && self.y0 < self.y1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PopulationEntry {
    pub species: String,
    pub count: u64,
    /// `None` means the whole arena.
    pub region: Option<Region>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AlphaSpec {
    Value(f64),
    /// Derive α from the arena and the total population.
    Geometry,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub automaton: AutomatonSource,
    pub model: ModelKind,
    pub population: Vec<PopulationEntry>,
    pub arena: Option<Arena>,
    pub alpha: Option<AlphaSpec>,
    pub horizon: usize,
    pub seed: u64,
    pub replicates: usize,
    pub c_bin: f64,
}

impl ScenarioConfig {
    /// Checks the config against its resolved automaton.
    pub fn validate(&self, a: &ParticleAutomaton) -> Result<(), ScenarioError> {
        for (i, entry) in self.population.iter().enumerate() {
            if a.species_index(&entry.species).is_none() {
                return Err(ScenarioError::UnknownSpecies(entry.species.clone()));
            }
            if self.population[..i].iter().any(|e| e.species == entry.species) {
                return Err(ScenarioError::DuplicateSpecies(entry.species.clone()));
            }
            if let Some(region) = entry.region {
                let arena = self.arena.as_ref().ok_or(ScenarioError::MissingField("arena"))?;
                if !region.fits(arena) {
                    return Err(ScenarioError::RegionOutOfBounds {
                        species: entry.species.clone(),
                        region,
                    });
                }
            }
        }
        if self.replicates == 0 {
            return Err(ScenarioError::InvalidValue {
                field: "replicates",
                reason: "must be at least 1".to_string(),
            });
        }
        if !(self.c_bin > 0.0 && self.c_bin.is_finite()) {
            return Err(ScenarioError::InvalidValue {
                field: "c_bin",
                reason: "must be positive".to_string(),
            });
        }
        match self.model {
            ModelKind::Spatial if self.arena.is_none() => return Err(ScenarioError::MissingField("arena")),
            ModelKind::Mean | ModelKind::Ssa => match self.alpha {
                None => return Err(ScenarioError::MissingField("alpha")),
                Some(AlphaSpec::Geometry) if self.arena.is_none() => {
                    return Err(ScenarioError::MissingField("arena"));
                }
                Some(AlphaSpec::Value(v)) if !(0.0..=1.0).contains(&v) => {
                    return Err(ScenarioError::InvalidValue {
                        field: "alpha",
                        reason: alloc::format!("{v} outside [0, 1]"),
                    });
                }
                _ => {}
            },
            _ => {}
        }
        if self.total_population() == 0 {
            return Err(ScenarioError::InvalidValue {
                field: "population",
                reason: "no particles".to_string(),
            });
        }
        Ok(())
    }

    pub fn total_population(&self) -> u64 {
        self.population.iter().map(|e| e.count).sum()
    }

    /// Counts in automaton species order; unlisted species start at zero.
    pub fn initial_counts(&self, a: &ParticleAutomaton) -> Result<MacroState, ScenarioError> {
        let mut counts = MacroState::zeros(a.len());
        for e in &self.population {
            let k = a
                .species_index(&e.species)
                .ok_or_else(|| ScenarioError::UnknownSpecies(e.species.clone()))?;
            counts.0[k] = e.count;
        }
        Ok(counts)
    }

    /// The density parameter for the non-spatial models.
    pub fn resolve_alpha(&self) -> Result<DensityAlpha, ScenarioError> {
        match self.alpha {
            Some(AlphaSpec::Value(v)) => DensityAlpha::new(v).map_err(|_| ScenarioError::InvalidValue {
                field: "alpha",
                reason: alloc::format!("{v} outside [0, 1]"),
            }),
            Some(AlphaSpec::Geometry) => {
                let arena = self.arena.as_ref().ok_or(ScenarioError::MissingField("arena"))?;
                Ok(alpha_from_geometry(arena.radius(), arena.area(), self.total_population())?)
            }
            None => Err(ScenarioError::MissingField("alpha")),
        }
    }

    pub fn mean_field_params(&self) -> Result<MeanFieldParams, ScenarioError> {
        let alpha = self.resolve_alpha()?;
        MeanFieldParams::new(alpha.get(), self.c_bin).map_err(|e| ScenarioError::InvalidValue {
            field: "c_bin",
            reason: e.to_string(),
        })
    }
}

/// Places every species' particles i.i.d. uniformly over its region, species
/// by species in automaton order, with ids `0..m`.
pub fn init_spatial(
    config: &ScenarioConfig,
    a: &ParticleAutomaton,
    rng: &mut RngStream,
) -> Result<SpatialState, ScenarioError> {
    config.validate(a)?;
    let arena = config.arena.as_ref().ok_or(ScenarioError::MissingField("arena"))?;
    let full = Region {
        x0: 0.0,
        y0: 0.0,
        x1: arena.width(),
        y1: arena.height(),
    };
    let mut particles = Vec::with_capacity(config.total_population() as usize);
    let mut id = 0;
    for (state, name) in a.species().iter().enumerate() {
        let Some(entry) = config.population.iter().find(|e| &e.species == name) else {
            continue;
        };
        let region = entry.region.unwrap_or(full);
        for _ in 0..entry.count {
            let x = region.x0 + rng.uniform() * (region.x1 - region.x0);
            let y = region.y0 + rng.uniform() * (region.y1 - region.y0);
            particles.push(SpatialParticle {
                id,
                state,
                pos: arena.wrap(Position::new(x, y)),
            });
            id += 1;
        }
    }
    Ok(SpatialState { particles })
}

/// Variants of the five-species placement experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FiveSpeciesVariant {
    /// A and B spread over the whole arena.
    Uniform,
    /// A and B share the unit square in the middle.
    Together,
    /// A and B in unit squares at opposite corners.
    Apart,
}

impl FiveSpeciesVariant {
    pub const ALL: [FiveSpeciesVariant; 3] = [Self::Uniform, Self::Together, Self::Apart];

    pub fn letter(self) -> char {
        match self {
            Self::Uniform => 'a',
            Self::Together => 'b',
            Self::Apart => 'c',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.letter() == c)
    }
}

pub const FIVE_SPECIES_SIDE: f64 = 20.0;
pub const FIVE_SPECIES_RADIUS: f64 = 0.3;
pub const FIVE_SPECIES_STEP: f64 = 0.3;

/// A, B, C, D, E where A meeting B becomes the stable catalyst C, C turns D
/// into E, and B reverts to D with probability 0.5 whenever it is alone.
/// C and E never change. Every other rule is the identity.
pub fn five_species_automaton() -> ParticleAutomaton {
    const A: usize = 0;
    const B: usize = 1;
    const C: usize = 2;
    const D: usize = 3;
    const E: usize = 4;
    let n = 5;
    let unit = |k: usize| -> Vec<f64> { (0..n).map(|i| if i == k { 1.0 } else { 0.0 }).collect() };
    let mut solitary: Vec<Vec<f64>> = (0..n).map(unit).collect();
    solitary[B] = vec![0.0, 0.5, 0.0, 0.5, 0.0];
    let mut binary: Vec<Vec<Vec<f64>>> = (0..n).map(|i| vec![unit(i); n]).collect();
    binary[A][B] = unit(C);
    binary[D][C] = unit(E);
    let species = ["A", "B", "C", "D", "E"].iter().map(|s| s.to_string()).collect();
    ParticleAutomaton::new(species, &solitary, &binary).expect("five-species automaton is stochastic")
}

/// The bundled five-species spatial scenario on a 20 x 20 torus.
pub fn five_species_scenario(variant: FiveSpeciesVariant) -> (ScenarioConfig, ParticleAutomaton) {
    let (region_a, region_b) = match variant {
        FiveSpeciesVariant::Uniform => (None, None),
        FiveSpeciesVariant::Together => (
            Some(Region::unit_square(10.0, 10.0)),
            Some(Region::unit_square(10.0, 10.0)),
        ),
        FiveSpeciesVariant::Apart => (
            Some(Region::unit_square(3.0, 3.0)),
            Some(Region::unit_square(17.0, 17.0)),
        ),
    };
    let entry = |species: &str, count, region| PopulationEntry {
        species: species.to_string(),
        count,
        region,
    };
    let config = ScenarioConfig {
        automaton: AutomatonSource::Builtin("five_species".to_string()),
        model: crate::ModelKind::Spatial,
        population: vec![
            entry("A", 50, region_a),
            entry("B", 50, region_b),
            entry("C", 0, None),
            entry("D", 1000, None),
            entry("E", 0, None),
        ],
        arena: Some(
            Arena::new(FIVE_SPECIES_SIDE, FIVE_SPECIES_SIDE, FIVE_SPECIES_RADIUS, FIVE_SPECIES_STEP)
                .expect("valid arena"),
        ),
        alpha: Some(AlphaSpec::Geometry),
        horizon: DEFAULT_HORIZON,
        seed: 1,
        replicates: 20,
        c_bin: DEFAULT_C_BIN,
    };
    (config, five_species_automaton())
}

/// Automata addressable by name from scenario files.
pub fn builtin_automaton(name: &str) -> Option<ParticleAutomaton> {
    match name {
        "three_species" => Some(crate::automaton::three_species_example()),
        "five_species" => Some(five_species_automaton()),
        _ => None,
    }
}
