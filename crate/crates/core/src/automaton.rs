//! The particle model: a probabilistic automaton whose input alphabet is the
//! set of species plus a "no encounter" symbol.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// Index of a species in [`ParticleAutomaton::species`].
pub type Species = usize;

/// Tolerance on every probability row sum.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;
/// Rows closer than this to summing to 1 are stored as given; rows further
/// off (but within [`ROW_SUM_TOLERANCE`]) are divided by their sum.
pub const RENORMALIZE_THRESHOLD: f64 = 1e-12;

/// What a particle sees during one step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Input {
    /// No encounter; the solitary rule applies.
    Solitary,
    /// Encounter with a particle of the given species.
    Encounter(Species),
}

/// Identifies one probability row of an automaton.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RowId {
    pub from: Species,
    pub input: Input,
}

impl fmt::Display for RowId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.input {
            Input::Solitary => write!(f, "solitary row {}", self.from),
            Input::Encounter(j) => write!(f, "binary row {} meeting {}", self.from, j),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum AutomatonError {
    #[error("{row} sums to {sum}, expected 1")]
    NonStochasticRow { row: RowId, sum: f64 },
    #[error("{row} has invalid entry {value} at column {column}")]
    NegativeEntry {
        row: RowId,
        column: Species,
        value: f64,
    },
    #[error("duplicate species name `{0}`")]
    DuplicateSpecies(String),
    #[error("species list is empty or contains an empty name")]
    EmptySpecies,
    #[error("table shape does not match {species} species: {detail}")]
    DimensionMismatch {
        species: usize,
        detail: &'static str,
    },
}

/// A particle type set `Q` with solitary table `δ(q, ⊥, ·)` and binary table
/// `δ(q, q', ·)`, every row a probability distribution over `Q`.
///
/// Rows off by more than [`RENORMALIZE_THRESHOLD`] are renormalized on
/// construction, so stored rows sum to 1 up to float rounding and a
/// constructed automaton rebuilds to itself bit for bit.
#[derive(Clone, Debug, PartialEq)]
pub struct ParticleAutomaton {
    species: Vec<String>,
    // [i * n + k]
    solitary: Vec<f64>,
    // [(i * n + j) * n + k]
    binary: Vec<f64>,
}

impl ParticleAutomaton {
    /// Checks and builds an automaton. `binary[i][j][k]` is `δ(q_i, q_j, q_k)`.
    pub fn new(
        species: Vec<String>,
        solitary: &[Vec<f64>],
        binary: &[Vec<Vec<f64>>],
    ) -> Result<Self, AutomatonError> {
        let n = species.len();
        if n == 0 || species.iter().any(|s| s.trim().is_empty()) {
            return Err(AutomatonError::EmptySpecies);
        }
        for (i, name) in species.iter().enumerate() {
            if species[..i].contains(name) {
                return Err(AutomatonError::DuplicateSpecies(name.clone()));
            }
        }
        if solitary.len() != n || solitary.iter().any(|r| r.len() != n) {
            return Err(AutomatonError::DimensionMismatch {
                species: n,
                detail: "solitary table must be n x n",
            });
        }
        if binary.len() != n
            || binary
                .iter()
                .any(|m| m.len() != n || m.iter().any(|r| r.len() != n))
        {
            return Err(AutomatonError::DimensionMismatch {
                species: n,
                detail: "binary table must be n x n x n",
            });
        }

        let mut flat_solitary = Vec::with_capacity(n * n);
        for (i, row) in solitary.iter().enumerate() {
            let id = RowId {
                from: i,
                input: Input::Solitary,
            };
            flat_solitary.extend(normalized_row(id, row)?);
        }
        let mut flat_binary = Vec::with_capacity(n * n * n);
        for (i, per_input) in binary.iter().enumerate() {
            for (j, row) in per_input.iter().enumerate() {
                let id = RowId {
                    from: i,
                    input: Input::Encounter(j),
                };
                flat_binary.extend(normalized_row(id, row)?);
            }
        }
        Ok(Self {
            species,
            solitary: flat_solitary,
            binary: flat_binary,
        })
    }

    /// The automaton in which nothing ever changes: `δ(q, a, q) = 1`.
    pub fn identity(species: Vec<String>) -> Result<Self, AutomatonError> {
        let n = species.len();
        let unit = |i: usize| -> Vec<f64> { (0..n).map(|k| if k == i { 1.0 } else { 0.0 }).collect() };
        let solitary: Vec<Vec<f64>> = (0..n).map(unit).collect();
        let binary: Vec<Vec<Vec<f64>>> = (0..n).map(|i| (0..n).map(|_| unit(i)).collect()).collect();
        Self::new(species, &solitary, &binary)
    }

    pub fn len(&self) -> usize {
        self.species.len()
    }

    pub fn is_empty(&self) -> bool {
        self.species.is_empty()
    }

    pub fn species(&self) -> &[String] {
        &self.species
    }

    pub fn species_index(&self, name: &str) -> Option<Species> {
        self.species.iter().position(|s| s == name)
    }

    /// `δ(q_from, ⊥, q_to)`
    #[inline]
    pub fn solitary(&self, from: Species, to: Species) -> f64 {
        self.solitary[from * self.len() + to]
    }

    /// `δ(q_from, q_met, q_to)`
    #[inline]
    pub fn binary(&self, from: Species, met: Species, to: Species) -> f64 {
        let n = self.len();
        self.binary[(from * n + met) * n + to]
    }

    /// The outcome distribution of a particle in state `from` seeing `input`.
    #[inline]
    pub fn row(&self, from: Species, input: Input) -> &[f64] {
        let n = self.len();
        match input {
            Input::Solitary => &self.solitary[from * n..(from + 1) * n],
            Input::Encounter(j) => {
                let start = (from * n + j) * n;
                &self.binary[start..start + n]
            }
        }
    }

    /// Inverse-CDF draw from `row(q, input)` given a uniform `u` in `[0, 1)`.
    ///
    /// Species `k` owns the half-open interval `[c_{k-1}, c_k)` of the
    /// cumulative sums. Zero-probability species own nothing and any `u` past
    /// the last cut (rounding slack) maps to the last species with nonzero
    /// probability, so the map is total.
    pub fn sample_transition(&self, q: Species, input: Input, u: f64) -> Species {
        let mut acc = 0.0;
        let mut last_nonzero = q;
        for (k, &p) in self.row(q, input).iter().enumerate() {
            if p > 0.0 {
                acc += p;
                last_nonzero = k;
                if u < acc {
                    return k;
                }
            }
        }
        last_nonzero
    }

    /// Whether `row(q, input)` puts all its mass on one species.
    pub fn is_deterministic(&self, q: Species, input: Input) -> bool {
        self.row(q, input).contains(&1.0)
    }
}

fn normalized_row(id: RowId, row: &[f64]) -> Result<impl Iterator<Item = f64> + '_, AutomatonError> {
    for (column, &value) in row.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(AutomatonError::NegativeEntry { row: id, column, value });
        }
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
        return Err(AutomatonError::NonStochasticRow { row: id, sum });
    }
    let scale = if (sum - 1.0).abs() > RENORMALIZE_THRESHOLD { sum } else { 1.0 };
    Ok(row.iter().map(move |&p| p / scale))
}

/// Per-species particle counts: the counting abstraction of a micro-state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct MacroState(pub Vec<u64>);

impl MacroState {
    pub fn zeros(n: usize) -> Self {
        MacroState(alloc::vec![0; n])
    }

    /// Total population `m`.
    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn counts(&self) -> &[u64] {
        &self.0
    }
}

impl From<Vec<u64>> for MacroState {
    fn from(v: Vec<u64>) -> Self {
        MacroState(v)
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum JointError {
    #[error("joint outcome table sums to {sum}, expected 1")]
    NonStochasticJoint { sum: f64 },
    #[error("joint outcome table has invalid entry {value} at ({a}, {b})")]
    NegativeEntry { a: usize, b: usize, value: f64 },
    #[error("joint outcome table is empty or ragged")]
    Shape,
}

/// The worst cell of a joint table that fails to factor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FactorViolation {
    pub a_outcome: usize,
    pub b_outcome: usize,
    pub joint: f64,
    pub product_of_marginals: f64,
}

impl fmt::Display for FactorViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "outcome pair (A_{}, B_{}) has joint probability {} but marginals give {}",
            self.a_outcome + 1,
            self.b_outcome + 1,
            self.joint,
            self.product_of_marginals
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CausalVerdict {
    pub a_marginal: Vec<f64>,
    pub b_marginal: Vec<f64>,
    /// `None` when the table factors.
    pub violation: Option<FactorViolation>,
}

impl CausalVerdict {
    pub fn is_product(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks whether a joint rewrite `A + B -> (A_a, B_b) with p[a][b]` can be
/// realized by two independent single-particle rules, i.e. whether `p` is the
/// outer product of its marginals within [`ROW_SUM_TOLERANCE`].
pub fn check_causal_product(joint: &[Vec<f64>]) -> Result<CausalVerdict, JointError> {
    let cols = joint.first().map_or(0, Vec::len);
    if cols == 0 || joint.iter().any(|r| r.len() != cols) {
        return Err(JointError::Shape);
    }
    for (a, row) in joint.iter().enumerate() {
        for (b, &value) in row.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(JointError::NegativeEntry { a, b, value });
            }
        }
    }
    let sum: f64 = joint.iter().flatten().sum();
    if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
        return Err(JointError::NonStochasticJoint { sum });
    }

    let a_marginal: Vec<f64> = joint.iter().map(|r| r.iter().sum()).collect();
    let b_marginal: Vec<f64> = (0..cols).map(|b| joint.iter().map(|r| r[b]).sum()).collect();

    let mut worst: Option<(f64, FactorViolation)> = None;
    for (a, row) in joint.iter().enumerate() {
        for (b, &p) in row.iter().enumerate() {
            let product = a_marginal[a] * b_marginal[b];
            let gap = (p - product).abs();
            if gap > ROW_SUM_TOLERANCE && worst.as_ref().is_none_or(|(g, _)| gap > *g) {
                worst = Some((
                    gap,
                    FactorViolation {
                        a_outcome: a,
                        b_outcome: b,
                        joint: p,
                        product_of_marginals: product,
                    },
                ));
            }
        }
    }
    Ok(CausalVerdict {
        a_marginal,
        b_marginal,
        violation: worst.map(|(_, v)| v),
    })
}

/// The three-species automaton used throughout the test-suite and the
/// bundled `table1_*` scenarios.
pub fn three_species_example() -> ParticleAutomaton {
    let species = ["q1", "q2", "q3"].iter().map(|s| String::from(*s)).collect();
    let solitary = alloc::vec![
        alloc::vec![0.9, 0.1, 0.0],
        alloc::vec![0.1, 0.8, 0.1],
        alloc::vec![0.0, 0.0, 1.0],
    ];
    // binary[i][j] = δ(q_i, q_j, ·)
    let binary = alloc::vec![
        alloc::vec![
            alloc::vec![1.0, 0.0, 0.0],
            alloc::vec![0.7, 0.2, 0.1],
            alloc::vec![0.7, 0.0, 0.3],
        ],
        alloc::vec![
            alloc::vec![0.0, 0.6, 0.4],
            alloc::vec![0.0, 1.0, 0.0],
            alloc::vec![0.1, 0.9, 0.0],
        ],
        alloc::vec![
            alloc::vec![0.7, 0.0, 0.3],
            alloc::vec![0.3, 0.4, 0.3],
            alloc::vec![0.0, 0.0, 1.0],
        ],
    ];
    ParticleAutomaton::new(species, &solitary, &binary).expect("example automaton is stochastic")
}
