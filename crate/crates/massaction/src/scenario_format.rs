//! Scenario files: `[section]` headers followed by `key = value` lines.
//!
//! ```text
//! [automaton]
//! builtin = three_species      # or: path = my.aut, or inline automaton lines
//!
//! [model]
//! kind = mean                  # mean | ssa | spatial
//!
//! [population]
//! q1 = 400
//! q2 = 300 @ 0,0,10,10         # optional placement rectangle x0,y0,x1,y1
//!
//! [arena]
//! width = 20
//! height = 20
//! r = 0.3
//! s = 0.3
//!
//! [run]
//! T = 500
//! seed = 1
//! replicates = 20
//! alpha = 0.1                  # or: alpha = geometry
//! c_bin = 2
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use massaction_core::automaton::ParticleAutomaton;
use massaction_core::meanfield::DEFAULT_C_BIN;
use massaction_core::scenario::{
    builtin_automaton, AlphaSpec, AutomatonSource, ModelKind, PopulationEntry, Region, ScenarioConfig,
    ScenarioError, DEFAULT_HORIZON,
};
use massaction_core::spatial::Arena;
use thiserror::Error;

use crate::automaton_format::{self, content_lines, FormatError};

#[derive(Debug, Error)]
pub enum ScenarioFileError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("automaton: {0}")]
    Automaton(#[from] FormatError),
    #[error("unknown built-in automaton `{0}`")]
    UnknownBuiltin(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn syntax(line: usize, message: impl Into<String>) -> ScenarioFileError {
    ScenarioFileError::Syntax {
        line,
        message: message.into(),
    }
}

/// Names of the scenarios shipped with the tool.
pub const BUNDLED: [(&str, &str); 5] = [
    ("table1_sparse", include_str!("../fixtures/table1_sparse.scn")),
    ("table1_dense", include_str!("../fixtures/table1_dense.scn")),
    ("five_species_a", include_str!("../fixtures/five_species_a.scn")),
    ("five_species_b", include_str!("../fixtures/five_species_b.scn")),
    ("five_species_c", include_str!("../fixtures/five_species_c.scn")),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

fn parse_number<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T, ScenarioFileError> {
    value
        .parse()
        .map_err(|_| syntax(line, format!("`{key}`: cannot parse `{value}`")))
}

fn parse_f64(line: usize, key: &str, value: &str) -> Result<f64, ScenarioFileError> {
    let v: f64 = parse_number(line, key, value)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(syntax(line, format!("`{key}` must be finite")))
    }
}

#[derive(Default)]
struct ArenaFields {
    width: Option<f64>,
    height: Option<f64>,
    r: Option<f64>,
    s: Option<f64>,
}

/// Parses and checks a scenario. Species are only checked against the
/// automaton when it is built-in or inline; file references are checked by
/// [`load_scenario`].
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, ScenarioFileError> {
    let mut section: Option<String> = None;
    let mut automaton: Option<AutomatonSource> = None;
    let mut inline: Vec<(usize, &str)> = Vec::new();
    let mut model: Option<ModelKind> = None;
    let mut population: Vec<PopulationEntry> = Vec::new();
    let mut arena = ArenaFields::default();
    let mut has_arena = false;
    let mut alpha: Option<AlphaSpec> = None;
    let mut horizon = DEFAULT_HORIZON;
    let mut seed = 0u64;
    let mut replicates = 1usize;
    let mut c_bin = DEFAULT_C_BIN;

    for (line_no, line) in content_lines(text) {
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = name.trim();
            if !["automaton", "model", "population", "arena", "run"].contains(&name) {
                return Err(syntax(line_no, format!("unknown section `[{name}]`")));
            }
            has_arena |= name == "arena";
            section = Some(name.to_owned());
            continue;
        }
        let Some(sec) = section.as_deref() else {
            return Err(syntax(line_no, "content before the first `[section]`"));
        };
        let kv = line.split_once('=').map(|(k, v)| (k.trim(), v.trim()));

        match (sec, kv) {
            ("automaton", Some(("path", v))) => automaton = Some(AutomatonSource::Path(v.to_owned())),
            ("automaton", Some(("builtin", v))) => automaton = Some(AutomatonSource::Builtin(v.to_owned())),
            ("automaton", Some((k, _))) => return Err(syntax(line_no, format!("unknown key `{k}`"))),
            ("automaton", None) => inline.push((line_no, line)),
            ("model", Some(("kind", v))) => {
                model = Some(v.parse().map_err(|e: ScenarioError| syntax(line_no, e.to_string()))?)
            }
            ("population", Some((species, v))) => {
                let (count, region) = match v.split_once('@') {
                    Some((c, r)) => (c.trim(), Some(parse_region(line_no, r)?)),
                    None => (v, None),
                };
                population.push(PopulationEntry {
                    species: species.to_owned(),
                    count: parse_number(line_no, species, count)?,
                    region,
                });
            }
            ("arena", Some((k, v))) => {
                let slot = match k {
                    "width" => &mut arena.width,
                    "height" => &mut arena.height,
                    "r" => &mut arena.r,
                    "s" => &mut arena.s,
                    other => return Err(syntax(line_no, format!("unknown key `{other}`"))),
                };
                *slot = Some(parse_f64(line_no, k, v)?);
            }
            ("run", Some((k, v))) => match k {
                "T" => horizon = parse_number(line_no, k, v)?,
                "seed" => seed = parse_number(line_no, k, v)?,
                "replicates" => replicates = parse_number(line_no, k, v)?,
                "c_bin" => c_bin = parse_f64(line_no, k, v)?,
                "alpha" if v == "geometry" => alpha = Some(AlphaSpec::Geometry),
                "alpha" => alpha = Some(AlphaSpec::Value(parse_f64(line_no, k, v)?)),
                other => return Err(syntax(line_no, format!("unknown key `{other}`"))),
            },
            (_, Some((k, _))) => return Err(syntax(line_no, format!("unknown key `{k}`"))),
            (_, None) => return Err(syntax(line_no, "expected `key = value`")),
        }
    }

    if !inline.is_empty() {
        if automaton.is_some() {
            return Err(syntax(inline[0].0, "inline automaton given together with `path`/`builtin`"));
        }
        let last = text.lines().count();
        automaton = Some(AutomatonSource::Inline(automaton_format::parse_lines(
            inline.into_iter(),
            last,
        )?));
    }
    let automaton = automaton.ok_or(ScenarioError::MissingField("automaton"))?;
    let model = model.ok_or(ScenarioError::MissingField("model"))?;
    if population.is_empty() {
        return Err(ScenarioError::MissingField("population").into());
    }
    let arena = if has_arena {
        let w = arena.width.ok_or(ScenarioError::MissingField("width"))?;
        let h = arena.height.ok_or(ScenarioError::MissingField("height"))?;
        let r = arena.r.ok_or(ScenarioError::MissingField("r"))?;
        let s = arena.s.ok_or(ScenarioError::MissingField("s"))?;
        Some(Arena::new(w, h, r, s).map_err(ScenarioError::from)?)
    } else {
        None
    };

    let config = ScenarioConfig {
        automaton,
        model,
        population,
        arena,
        alpha,
        horizon,
        seed,
        replicates,
        c_bin,
    };
    match &config.automaton {
        AutomatonSource::Inline(a) => config.validate(a)?,
        AutomatonSource::Builtin(name) => {
            let a = builtin_automaton(name).ok_or_else(|| ScenarioFileError::UnknownBuiltin(name.clone()))?;
            config.validate(&a)?;
        }
        AutomatonSource::Path(_) => {}
    }
    Ok(config)
}

fn parse_region(line: usize, text: &str) -> Result<Region, ScenarioFileError> {
    let v = text
        .split(',')
        .map(|t| parse_f64(line, "region", t.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    match v[..] {
        [x0, y0, x1, y1] => Ok(Region { x0, y0, x1, y1 }),
        _ => Err(syntax(line, "region needs four numbers x0,y0,x1,y1")),
    }
}

/// Canonical text for `config`; parsing it gives back an equal config.
pub fn serialize_scenario(config: &ScenarioConfig) -> Result<String, FormatError> {
    let mut out = String::new();
    out.push_str("[automaton]\n");
    match &config.automaton {
        AutomatonSource::Path(p) => writeln!(out, "path = {p}").unwrap(),
        AutomatonSource::Builtin(b) => writeln!(out, "builtin = {b}").unwrap(),
        AutomatonSource::Inline(a) => out.push_str(&automaton_format::serialize_automaton(a)?),
    }
    writeln!(out, "\n[model]\nkind = {}", config.model.as_str()).unwrap();
    out.push_str("\n[population]\n");
    for e in &config.population {
        write!(out, "{} = {}", e.species, e.count).unwrap();
        if let Some(r) = e.region {
            write!(out, " @ {:?},{:?},{:?},{:?}", r.x0, r.y0, r.x1, r.y1).unwrap();
        }
        out.push('\n');
    }
    if let Some(a) = &config.arena {
        writeln!(
            out,
            "\n[arena]\nwidth = {:?}\nheight = {:?}\nr = {:?}\ns = {:?}",
            a.width(),
            a.height(),
            a.radius(),
            a.step()
        )
        .unwrap();
    }
    writeln!(
        out,
        "\n[run]\nT = {}\nseed = {}\nreplicates = {}",
        config.horizon, config.seed, config.replicates
    )
    .unwrap();
    match config.alpha {
        Some(AlphaSpec::Value(v)) => writeln!(out, "alpha = {v:?}").unwrap(),
        Some(AlphaSpec::Geometry) => out.push_str("alpha = geometry\n"),
        None => {}
    }
    writeln!(out, "c_bin = {:?}", config.c_bin).unwrap();
    Ok(out)
}

/// Resolves a config's automaton. `base` is the directory relative paths are
/// taken from.
pub fn resolve_automaton(config: &ScenarioConfig, base: &Path) -> Result<ParticleAutomaton, ScenarioFileError> {
    let a = match &config.automaton {
        AutomatonSource::Inline(a) => a.clone(),
        AutomatonSource::Builtin(name) => {
            builtin_automaton(name).ok_or_else(|| ScenarioFileError::UnknownBuiltin(name.clone()))?
        }
        AutomatonSource::Path(p) => {
            let path = base.join(p);
            let text = fs::read_to_string(&path).map_err(|source| ScenarioFileError::Io { path, source })?;
            automaton_format::parse_automaton(&text)?
        }
    };
    config.validate(&a)?;
    Ok(a)
}

/// Reads a scenario from disk, falling back to the bundled scenario of that
/// name when no such file exists. Returns the config, its automaton and the
/// scenario text.
pub fn load_scenario(spec: &str) -> Result<(ScenarioConfig, ParticleAutomaton), ScenarioFileError> {
    let path = Path::new(spec);
    let (text, base) = if path.exists() {
        let text = fs::read_to_string(path).map_err(|source| ScenarioFileError::Io {
            path: path.to_owned(),
            source,
        })?;
        (text, path.parent().map(Path::to_owned).unwrap_or_default())
    } else if let Some(text) = bundled(spec) {
        (text.to_owned(), PathBuf::from("."))
    } else {
        return Err(ScenarioFileError::Io {
            path: path.to_owned(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file or bundled scenario"),
        });
    };
    let config = parse_scenario(&text)?;
    let automaton = resolve_automaton(&config, &base)?;
    Ok((config, automaton))
}
