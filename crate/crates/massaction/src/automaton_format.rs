//! Plain-text automaton files.
//!
//! ```text
//! # three species
//! species: q1 q2 q3
//! solitary:
//! 0.9 0.1 0.0
//! 0.1 0.8 0.1
//! 0.0 0.0 1.0
//! binary q1:
//! 1.0 0.0 0.0
//! 0.0 0.6 0.4
//! 0.7 0.0 0.3
//! binary q2:
//! ...
//! ```
//!
//! Under `binary <name>:` row `i` is `δ(q_i, <name>, ·)`. Every species needs
//! exactly one binary block; blocks may come in any order. Numbers use Rust's
//! float grammar (always `.` as decimal separator) and must be finite.

use std::fmt::Write as _;

use massaction_core::automaton::{AutomatonError, Input, ParticleAutomaton};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error("species name `{0}` cannot be written (contains whitespace, `#` or `:`)")]
    UnwritableName(String),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

/// Strips comments and blank lines, keeping 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn parse_row(line_no: usize, line: &str, n: usize) -> Result<Vec<f64>, FormatError> {
    let row = line
        .split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| syntax(line_no, format!("`{tok}` is not a finite number")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if row.len() != n {
        return Err(syntax(
            line_no,
            format!("dimension mismatch: expected {n} entries, found {}", row.len()),
        ));
    }
    Ok(row)
}

enum Block {
    Solitary,
    Binary(usize),
}

pub fn parse_automaton(text: &str) -> Result<ParticleAutomaton, FormatError> {
    parse_lines(content_lines(text), text.lines().count())
}

pub(crate) fn parse_lines<'a>(
    mut lines: impl Iterator<Item = (usize, &'a str)>,
    last_line: usize,
) -> Result<ParticleAutomaton, FormatError> {
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| syntax(last_line.max(1), "empty automaton: expected `species:` line"))?;
    let names = header
        .strip_prefix("species:")
        .ok_or_else(|| syntax(line_no, "expected `species:` line"))?;
    let species: Vec<String> = names.split_whitespace().map(str::to_owned).collect();
    let n = species.len();
    if n == 0 {
        return Err(syntax(line_no, "no species listed"));
    }

    let mut solitary: Option<Vec<Vec<f64>>> = None;
    // binary[j] holds the block for encountered species j, rows indexed by i
    let mut binary: Vec<Option<Vec<Vec<f64>>>> = vec![None; n];
    let mut current: Option<(Block, Vec<Vec<f64>>, usize)> = None;

    let finish = |block: (Block, Vec<Vec<f64>>, usize),
                  solitary: &mut Option<Vec<Vec<f64>>>,
                  binary: &mut Vec<Option<Vec<Vec<f64>>>>|
     -> Result<(), FormatError> {
        let (kind, rows, start) = block;
        if rows.len() != n {
            return Err(syntax(
                start,
                format!("dimension mismatch: block has {} rows, expected {n}", rows.len()),
            ));
        }
        match kind {
            Block::Solitary => *solitary = Some(rows),
            Block::Binary(j) => binary[j] = Some(rows),
        }
        Ok(())
    };

    for (line_no, line) in lines {
        let header = if line == "solitary:" {
            if solitary.is_some() || matches!(current, Some((Block::Solitary, ..))) {
                return Err(syntax(line_no, "duplicate `solitary:` block"));
            }
            Some(Block::Solitary)
        } else if let Some(rest) = line.strip_prefix("binary") {
            let name = rest
                .trim()
                .strip_suffix(':')
                .map(str::trim)
                .ok_or_else(|| syntax(line_no, "expected `binary <species>:`"))?;
            let j = species
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| syntax(line_no, format!("unknown species `{name}` in binary header")))?;
            if binary[j].is_some() || matches!(current, Some((Block::Binary(k), ..)) if k == j) {
                return Err(syntax(line_no, format!("duplicate binary block for `{name}`")));
            }
            Some(Block::Binary(j))
        } else {
            None
        };

        match header {
            Some(kind) => {
                if let Some(block) = current.take() {
                    finish(block, &mut solitary, &mut binary)?;
                }
                current = Some((kind, Vec::with_capacity(n), line_no));
            }
            None => {
                let Some((_, rows, _)) = current.as_mut() else {
                    return Err(syntax(line_no, "numbers outside a `solitary:` or `binary` block"));
                };
                if rows.len() == n {
                    return Err(syntax(
                        line_no,
                        format!("dimension mismatch: more than {n} rows in block"),
                    ));
                }
                rows.push(parse_row(line_no, line, n)?);
            }
        }
    }
    if let Some(block) = current.take() {
        finish(block, &mut solitary, &mut binary)?;
    }

    let solitary = solitary.ok_or_else(|| syntax(last_line.max(1), "missing `solitary:` block"))?;
    let mut by_input = Vec::with_capacity(n);
    for (j, block) in binary.into_iter().enumerate() {
        by_input.push(block.ok_or_else(|| {
            syntax(last_line.max(1), format!("missing `binary {}:` block", species[j]))
        })?);
    }
    // reorder to [i][j][k]
    let tensor: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|i| (0..n).map(|j| by_input[j][i].clone()).collect())
        .collect();
    Ok(ParticleAutomaton::new(species, &solitary, &tensor)?)
}

fn writable(name: &str) -> bool {
    !name.is_empty() && !name.chars().any(|c| c.is_whitespace() || c == '#' || c == ':' || c == '=')
}

/// Writes `a` so that [`parse_automaton`] gives back an equal automaton.
pub fn serialize_automaton(a: &ParticleAutomaton) -> Result<String, FormatError> {
    if let Some(bad) = a.species().iter().find(|s| !writable(s)) {
        return Err(FormatError::UnwritableName(bad.clone()));
    }
    let n = a.len();
    let mut out = String::new();
    let write_row = |out: &mut String, row: &[f64]| {
        let cells: Vec<String> = row.iter().map(|p| format!("{p:?}")).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    };
    writeln!(out, "species: {}", a.species().join(" ")).unwrap();
    out.push_str("solitary:\n");
    for i in 0..n {
        write_row(&mut out, a.row(i, Input::Solitary));
    }
    for (j, name) in a.species().iter().enumerate() {
        writeln!(out, "binary {name}:").unwrap();
        for i in 0..n {
            write_row(&mut out, a.row(i, Input::Encounter(j)));
        }
    }
    Ok(out)
}
