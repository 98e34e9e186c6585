//! Deterministic average dynamics under the well-stirred assumption.
//!
//! The state is a concentration vector `x` on the simplex and one step is
//!
//! ```text
//! x'_k = x_k + (1 - α) Δ1(x)_k + c_bin · α · Δ2(x)_k
//! Δ1(x)_k = Σ_i x_i δ(q_i, ⊥, q_k) − x_k Σ_i δ(q_k, ⊥, q_i)
//! Δ2(x)_k = Σ_i Σ_j x_i x_j δ(q_i, q_j, q_k) − x_k Σ_i x_i Σ_j δ(q_k, q_i, q_j)
//! ```
//!
//! `c_bin` defaults to 2, under which the derived bilinear systems for the
//! bundled three-species automaton come out as the reference coefficients
//! (0.09, 0.06, 0.08, ... at α = 0.1). With `c_bin = 1` the binary term is
//! weighted by the plain encounter fraction α.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::automaton::{Input, MacroState, ParticleAutomaton};

/// Tolerance on `Σ x = 1`.
pub const SIMPLEX_TOLERANCE: f64 = 1e-12;
/// Components in `[-NEGATIVE_CLAMP, 0)` are float noise and clamp to zero.
pub const NEGATIVE_CLAMP: f64 = 1e-12;
pub const DEFAULT_C_BIN: f64 = 2.0;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum MeanFieldError {
    #[error("expected {expected} species, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("concentration vector is not on the simplex: {reason}")]
    NotOnSimplex { reason: &'static str },
    #[error("density α = {0} outside [0, 1]")]
    InvalidAlpha(f64),
    #[error("binary weight c_bin = {0} must be positive")]
    InvalidBinaryWeight(f64),
    #[error("species {species} went negative ({value:e}){}", step_suffix(*.step))]
    NegativeConcentration {
        species: usize,
        value: f64,
        step: Option<usize>,
    },
    #[error("no fixed point within {max_iter} iterations (last residual {residual:e})")]
    NoConvergence { max_iter: usize, residual: f64 },
}

fn step_suffix(step: Option<usize>) -> alloc::string::String {
    match step {
        Some(t) => alloc::format!(" at step {t}"),
        None => alloc::string::String::new(),
    }
}

/// Relative species concentrations, `x_i ∈ [0, 1]`, `Σ x_i = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Concentration(Vec<f64>);

impl Concentration {
    pub fn new(x: Vec<f64>) -> Result<Self, MeanFieldError> {
        if x.is_empty() {
            return Err(MeanFieldError::NotOnSimplex { reason: "empty vector" });
        }
        if x.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(MeanFieldError::NotOnSimplex {
                reason: "component outside [0, 1]",
            });
        }
        let sum: f64 = x.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(MeanFieldError::NotOnSimplex {
                reason: "components do not sum to 1",
            });
        }
        Ok(Self(x))
    }

    /// `x_i = X_i / m`. Fails for an empty population.
    pub fn from_counts(counts: &MacroState) -> Result<Self, MeanFieldError> {
        let m = counts.total();
        if m == 0 {
            return Err(MeanFieldError::NotOnSimplex {
                reason: "empty population",
            });
        }
        Self::new(counts.0.iter().map(|&c| c as f64 / m as f64).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// `max_k |x_k − y_k|`
    pub fn distance_inf(&self, other: &Concentration) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Probability that a particle is in a binary encounter during one step.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct DensityAlpha(f64);

impl DensityAlpha {
    pub fn new(alpha: f64) -> Result<Self, MeanFieldError> {
        if (0.0..=1.0).contains(&alpha) {
            Ok(Self(alpha))
        } else {
            Err(MeanFieldError::InvalidAlpha(alpha))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// The pair of weights that fixes a mean-field update.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanFieldParams {
    pub alpha: DensityAlpha,
    pub c_bin: f64,
}

impl MeanFieldParams {
    pub fn new(alpha: f64, c_bin: f64) -> Result<Self, MeanFieldError> {
        if !(c_bin > 0.0 && c_bin.is_finite()) {
            return Err(MeanFieldError::InvalidBinaryWeight(c_bin));
        }
        Ok(Self {
            alpha: DensityAlpha::new(alpha)?,
            c_bin,
        })
    }

    /// Parameters whose update equals the large-population expected step of
    /// the well-stirred particle algorithm run at `alpha_ssa`.
    ///
    /// In that algorithm every unprocessed particle initiates an encounter
    /// with probability α and drags a partner along, so a fraction
    /// `(1 − α)/(1 + α)` of particles act alone and `2α/(1 + α)` react in
    /// pairs. That is the update above with `α' = 2α/(1 + α)` and
    /// `c_bin = 1`.
    pub fn matching_pairing(alpha_ssa: DensityAlpha) -> Self {
        let a = alpha_ssa.get();
        Self {
            alpha: DensityAlpha(2.0 * a / (1.0 + a)),
            c_bin: 1.0,
        }
    }

    fn solitary_weight(&self) -> f64 {
        1.0 - self.alpha.0
    }

    fn binary_weight(&self) -> f64 {
        self.c_bin * self.alpha.0
    }
}

fn check_len(a: &ParticleAutomaton, x: &[f64]) -> Result<(), MeanFieldError> {
    if a.len() != x.len() {
        return Err(MeanFieldError::DimensionMismatch {
            expected: a.len(),
            found: x.len(),
        });
    }
    Ok(())
}

/// Expected change of each concentration from solitary transitions.
pub fn delta1(a: &ParticleAutomaton, x: &Concentration) -> Result<Vec<f64>, MeanFieldError> {
    let x = x.as_slice();
    check_len(a, x)?;
    let n = a.len();
    Ok((0..n)
        .map(|k| {
            (0..n)
                .map(|i| x[i] * a.solitary(i, k) - x[k] * a.solitary(k, i))
                .sum()
        })
        .collect())
}

/// Expected change of each concentration from binary encounters.
pub fn delta2(a: &ParticleAutomaton, x: &Concentration) -> Result<Vec<f64>, MeanFieldError> {
    let x = x.as_slice();
    check_len(a, x)?;
    let n = a.len();
    Ok((0..n)
        .map(|k| {
            let mut total = 0.0;
            for i in 0..n {
                for j in 0..n {
                    total += x[i] * x[j] * a.binary(i, j, k) - x[k] * x[i] * a.binary(k, i, j);
                }
            }
            total
        })
        .collect())
}

/// One application of the mean-field update.
pub fn step(
    a: &ParticleAutomaton,
    x: &Concentration,
    params: MeanFieldParams,
) -> Result<Concentration, MeanFieldError> {
    let d1 = delta1(a, x)?;
    let d2 = delta2(a, x)?;
    let (ws, wb) = (params.solitary_weight(), params.binary_weight());
    let next: Vec<f64> = x
        .as_slice()
        .iter()
        .zip(d1.iter().zip(&d2))
        .map(|(xk, (d1k, d2k))| xk + ws * d1k + wb * d2k)
        .collect();
    clamp_to_simplex(next, None)
}

fn clamp_to_simplex(mut x: Vec<f64>, step: Option<usize>) -> Result<Concentration, MeanFieldError> {
    for (k, v) in x.iter_mut().enumerate() {
        if *v < -NEGATIVE_CLAMP || v.is_nan() {
            return Err(MeanFieldError::NegativeConcentration {
                species: k,
                value: *v,
                step,
            });
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(Concentration(x))
}

/// Rows `0..=horizon`; row `t` is `step` applied `t` times to `x0`.
pub fn simulate_mean(
    a: &ParticleAutomaton,
    x0: &Concentration,
    params: MeanFieldParams,
    horizon: usize,
) -> Result<Vec<Concentration>, MeanFieldError> {
    check_len(a, x0.as_slice())?;
    let mut rows = Vec::with_capacity(horizon + 1);
    rows.push(x0.clone());
    for t in 1..=horizon {
        let next = step(a, &rows[t - 1], params).map_err(|e| match e {
            MeanFieldError::NegativeConcentration { species, value, .. } => {
                MeanFieldError::NegativeConcentration {
                    species,
                    value,
                    step: Some(t),
                }
            }
            other => other,
        })?;
        rows.push(next);
    }
    Ok(rows)
}

/// Iterates until `‖step(x) − x‖_∞ < tol` and returns that `x` together with
/// the number of steps taken to reach it.
pub fn fixpoint(
    a: &ParticleAutomaton,
    x0: &Concentration,
    params: MeanFieldParams,
    tol: f64,
    max_iter: usize,
) -> Result<(Concentration, usize), MeanFieldError> {
    let mut x = x0.clone();
    let mut residual = f64::INFINITY;
    for iter in 0..=max_iter {
        let next = step(a, &x, params)?;
        residual = next.distance_inf(&x);
        if residual < tol {
            return Ok((x, iter));
        }
        x = next;
    }
    Err(MeanFieldError::NoConvergence { max_iter, residual })
}

/// Coefficients of the update written as an explicit polynomial:
/// `x'_k = x_k + Σ_i linear[k][i] x_i + Σ_{i≤j} bilinear[k][i][j] x_i x_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialSystem {
    n: usize,
    linear: Vec<f64>,
    // upper triangle of an n x n matrix per species; entries below the diagonal stay 0
    bilinear: Vec<f64>,
}

/// A monomial other than the carried `x_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Monomial {
    Linear(usize),
    /// Always `i <= j`.
    Bilinear(usize, usize),
}

impl PolynomialSystem {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn linear(&self, k: usize, i: usize) -> f64 {
        self.linear[k * self.n + i]
    }

    /// Coefficient of `x_i x_j` in `x'_k`, symmetric in `i`, `j`.
    pub fn bilinear(&self, k: usize, i: usize, j: usize) -> f64 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.bilinear[(k * self.n + i) * self.n + j]
    }

    /// Non-carry terms of `x'_k` in canonical order: linear by index, then
    /// bilinear pairs lexicographically. Includes zero coefficients.
    pub fn terms(&self, k: usize) -> impl Iterator<Item = (Monomial, f64)> + '_ {
        let n = self.n;
        let linear = (0..n).map(move |i| (Monomial::Linear(i), self.linear(k, i)));
        let bilinear = (0..n).flat_map(move |i| {
            (i..n).map(move |j| (Monomial::Bilinear(i, j), self.bilinear(k, i, j)))
        });
        linear.chain(bilinear)
    }

    pub fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|k| {
                let mut v = x[k];
                for i in 0..n {
                    v += self.linear(k, i) * x[i];
                    for j in i..n {
                        v += self.bilinear(k, i, j) * x[i] * x[j];
                    }
                }
                v
            })
            .collect()
    }
}

/// Expands the update symbolically, merging `x_i x_j` with `x_j x_i`.
pub fn derive_polynomial(a: &ParticleAutomaton, params: MeanFieldParams) -> PolynomialSystem {
    let n = a.len();
    let (ws, wb) = (params.solitary_weight(), params.binary_weight());
    let mut linear = vec![0.0; n * n];
    let mut bilinear = vec![0.0; n * n * n];
    let mut add_pair = |k: usize, i: usize, j: usize, c: f64| {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        bilinear[(k * n + i) * n + j] += c;
    };

    for k in 0..n {
        let outflow: f64 = a.row(k, Input::Solitary).iter().sum();
        for i in 0..n {
            linear[k * n + i] += ws * a.solitary(i, k);
        }
        linear[k * n + k] -= ws * outflow;

        for i in 0..n {
            for j in 0..n {
                add_pair(k, i, j, wb * a.binary(i, j, k));
            }
            let outflow: f64 = a.row(k, Input::Encounter(i)).iter().sum();
            add_pair(k, k, i, -wb * outflow);
        }
    }
    PolynomialSystem { n, linear, bilinear }
}
