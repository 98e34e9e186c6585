//! Individual spatial dynamics on a periodic rectangle.
//!
//! A step has two phases. Every particle first moves by a random vector of
//! length `h ∈ [0, s]` and direction `θ ∈ [0, 2π)`, wrapping around the
//! edges. Then each particle looks at the particles strictly within the
//! interaction radius `r`: with none it applies its solitary rule, otherwise
//! it applies its binary rule once per neighbour and adopts one of those
//! outcomes chosen uniformly. Reactions read the post-move, pre-reaction
//! snapshot, so processing order does not matter.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use thiserror::Error;

use crate::automaton::{Input, MacroState, ParticleAutomaton, Species};
use crate::meanfield::DensityAlpha;
use crate::rng::RngStream;

/// Below this population the neighbour search is a plain double loop.
pub const BRUTE_FORCE_MAX: usize = 64;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum GeometryError {
    #[error("arena dimensions must be positive and finite (got {width} x {height})")]
    BadDimensions { width: f64, height: f64 },
    #[error("interaction radius {radius} must be positive and below half the shorter side")]
    BadRadius { radius: f64 },
    #[error("step bound {0} must be non-negative and finite")]
    BadStep(f64),
    #[error("interaction disc area {disc} exceeds arena area {area}")]
    InvalidGeometry { disc: f64, area: f64 },
    #[error("population must be at least 1")]
    EmptyPopulation,
}

/// Periodic rectangle `[0, width) x [0, height)` plus the interaction radius
/// and the bound on per-step displacement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arena {
    width: f64,
    height: f64,
    radius: f64,
    step: f64,
}

impl Arena {
    pub fn new(width: f64, height: f64, radius: f64, step: f64) -> Result<Self, GeometryError> {
        if !(width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()) {
            return Err(GeometryError::BadDimensions { width, height });
        }
        if !(radius > 0.0 && radius < width.min(height) / 2.0) {
            return Err(GeometryError::BadRadius { radius });
        }
        if !(step >= 0.0 && step.is_finite()) {
            return Err(GeometryError::BadStep(step));
        }
        Ok(Self {
            width,
            height,
            radius,
            step,
        })
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    /// Maps any point back into the half-open rectangle.
    pub fn wrap(&self, p: Position) -> Position {
        Position {
            x: wrap_axis(p.x, self.width),
            y: wrap_axis(p.y, self.height),
        }
    }
}

fn wrap_axis(v: f64, len: f64) -> f64 {
    let mut w = libm::fmod(v, len);
    if w < 0.0 {
        w += len;
    }
    // a tiny negative remainder can round up to `len`
    if w >= len {
        0.0
    } else {
        w
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpatialParticle {
    pub id: u64,
    pub state: Species,
    pub pos: Position,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct SpatialState {
    pub particles: Vec<SpatialParticle>,
}

impl SpatialState {
    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn counts(&self, n: usize) -> MacroState {
        let mut c = MacroState::zeros(n);
        for p in &self.particles {
            c.0[p.state] += 1;
        }
        c
    }
}

/// Euclidean distance with each axis measured the short way round.
#[inline]
pub fn torus_distance(a: Position, b: Position, arena: &Arena) -> f64 {
    let dx = axis_gap(a.x, b.x, arena.width);
    let dy = axis_gap(a.y, b.y, arena.height);
    libm::sqrt(dx * dx + dy * dy)
}

#[inline]
fn axis_gap(a: f64, b: f64, len: f64) -> f64 {
    let d = (a - b).abs();
    d.min(len - d)
}

/// Moves every particle, in list order, by `h·(cos θ, sin θ)` with
/// `h ~ U[0, s]` and `θ ~ U[0, 2π)`.
pub fn diffuse(state: &SpatialState, arena: &Arena, rng: &mut RngStream) -> SpatialState {
    let particles = state
        .particles
        .iter()
        .map(|p| {
            let h = rng.uniform_closed(0.0, arena.step);
            let theta = 2.0 * PI * rng.uniform();
            let moved = Position::new(p.pos.x + h * libm::cos(theta), p.pos.y + h * libm::sin(theta));
            SpatialParticle {
                pos: arena.wrap(moved),
                ..*p
            }
        })
        .collect();
    SpatialState { particles }
}

/// Neighbour sets in compressed form: the neighbours of particle `i` (by
/// position in the state's list) are `of(i)`, sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborLists {
    offsets: Vec<usize>,
    items: Vec<usize>,
}

impl NeighborLists {
    pub fn of(&self, i: usize) -> &[usize] {
        &self.items[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn from_builder(lists: impl Iterator<Item = Vec<usize>>) -> Self {
        let mut offsets = vec![0];
        let mut items = Vec::new();
        for mut l in lists {
            l.sort_unstable();
            items.extend_from_slice(&l);
            offsets.push(items.len());
        }
        Self { offsets, items }
    }
}

/// `{j ≠ i : d(y_i, y_j) < r}` for every particle, using a uniform bucket grid.
///
/// Cells have edge `W/⌊W/r⌋ ≥ r` per axis, so any neighbour lies in the 3x3
/// block of cells around a particle's own cell (wrapped). Small populations
/// and grids narrower than three cells use the double loop instead.
pub fn neighbors_grid(state: &SpatialState, arena: &Arena) -> NeighborLists {
    let m = state.len();
    let r = arena.radius;
    let nx = libm::floor(arena.width / r) as usize;
    let ny = libm::floor(arena.height / r) as usize;
    if m <= BRUTE_FORCE_MAX || nx < 3 || ny < 3 {
        return neighbors_brute_force(state, arena);
    }
    let (cw, ch) = (arena.width / nx as f64, arena.height / ny as f64);
    let cell_of = |p: Position| -> (usize, usize) {
        let cx = ((p.x / cw) as usize).min(nx - 1);
        let cy = ((p.y / ch) as usize).min(ny - 1);
        (cx, cy)
    };

    // counting sort of particle indices by cell
    let cells: Vec<(usize, usize)> = state.particles.iter().map(|p| cell_of(p.pos)).collect();
    let mut start = vec![0usize; nx * ny + 1];
    for &(cx, cy) in &cells {
        start[cy * nx + cx + 1] += 1;
    }
    for c in 0..nx * ny {
        start[c + 1] += start[c];
    }
    let mut fill = start.clone();
    let mut sorted = vec![0usize; m];
    for (i, &(cx, cy)) in cells.iter().enumerate() {
        let c = cy * nx + cx;
        sorted[fill[c]] = i;
        fill[c] += 1;
    }

    let lists = (0..m).map(|i| {
        let (cx, cy) = cells[i];
        let pi = state.particles[i].pos;
        let mut out = Vec::new();
        for dy in [ny - 1, 0, 1] {
            let y = (cy + dy) % ny;
            for dx in [nx - 1, 0, 1] {
                let c = y * nx + (cx + dx) % nx;
                for &j in &sorted[start[c]..start[c + 1]] {
                    if j != i && torus_distance(pi, state.particles[j].pos, arena) < r {
                        out.push(j);
                    }
                }
            }
        }
        out
    });
    NeighborLists::from_builder(lists)
}

fn neighbors_brute_force(state: &SpatialState, arena: &Arena) -> NeighborLists {
    let ps = &state.particles;
    NeighborLists::from_builder((0..ps.len()).map(|i| {
        (0..ps.len())
            .filter(|&j| j != i && torus_distance(ps[i].pos, ps[j].pos, arena) < arena.radius)
            .collect()
    }))
}

/// Uniform variates consumed by one particle's reaction: one per neighbour
/// plus one to pick the outcome, or a single one for the solitary rule.
pub fn reaction_draws(neighbor_count: usize) -> usize {
    neighbor_count + 1
}

/// New state of particle `i` given its neighbours in `snapshot`.
///
/// `draws` holds at least [`reaction_draws`] uniforms. With neighbours, the
/// binary outcome against neighbour `t` uses `draws[t]` and the multiset of
/// outcomes (duplicates kept) is indexed by `draws[neighbors.len()]`.
pub fn react_particle(
    a: &ParticleAutomaton,
    snapshot: &SpatialState,
    i: usize,
    neighbors: &[usize],
    draws: &[f64],
) -> Species {
    let q = snapshot.particles[i].state;
    if neighbors.is_empty() {
        return a.sample_transition(q, Input::Solitary, draws[0]);
    }
    let outcomes: Vec<Species> = neighbors
        .iter()
        .zip(draws)
        .map(|(&j, &u)| a.sample_transition(q, Input::Encounter(snapshot.particles[j].state), u))
        .collect();
    let k = outcomes.len();
    let pick = ((draws[k] * k as f64) as usize).min(k - 1);
    outcomes[pick]
}

/// Diffusion followed by synchronous reaction.
pub fn spatial_step(
    a: &ParticleAutomaton,
    state: &SpatialState,
    arena: &Arena,
    rng: &mut RngStream,
) -> SpatialState {
    let moved = diffuse(state, arena, rng);
    let neighbors = neighbors_grid(&moved, arena);

    // draws are assigned per particle up front, in list order
    let m = moved.len();
    let mut offsets = Vec::with_capacity(m + 1);
    offsets.push(0);
    for i in 0..m {
        offsets.push(offsets[i] + reaction_draws(neighbors.of(i).len()));
    }
    let draws: Vec<f64> = (0..offsets[m]).map(|_| rng.uniform()).collect();

    let particles = (0..m)
        .map(|i| SpatialParticle {
            state: react_particle(a, &moved, i, neighbors.of(i), &draws[offsets[i]..offsets[i + 1]]),
            ..moved.particles[i]
        })
        .collect();
    SpatialState { particles }
}

/// Runs `horizon` steps, returning counts for `t = 0..=horizon`. `observe` sees
/// the state at every `t`, including the initial one.
pub fn simulate_spatial(
    a: &ParticleAutomaton,
    initial: &SpatialState,
    arena: &Arena,
    horizon: usize,
    rng: &mut RngStream,
    mut observe: impl FnMut(usize, &SpatialState),
) -> Vec<MacroState> {
    let n = a.len();
    let mut state = initial.clone();
    let mut rows = Vec::with_capacity(horizon + 1);
    observe(0, &state);
    rows.push(state.counts(n));
    for t in 1..=horizon {
        state = spatial_step(a, &state, arena, rng);
        observe(t, &state);
        rows.push(state.counts(n));
    }
    rows
}

/// Probability that a particle has at least one of the other `m − 1`
/// particles within radius `r`, when all are placed uniformly on an arena
/// of area `area`: `1 − (1 − πr²/W)^(m−1)`.
pub fn alpha_from_geometry(radius: f64, area: f64, population: u64) -> Result<DensityAlpha, GeometryError> {
    if population == 0 {
        return Err(GeometryError::EmptyPopulation);
    }
    let disc = PI * radius * radius;
    if area.is_nan() || area <= 0.0 || disc > area || radius < 0.0 {
        return Err(GeometryError::InvalidGeometry { disc, area });
    }
    let miss = 1.0 - disc / area;
    let alpha = 1.0 - libm::pow(miss, (population - 1) as f64);
    Ok(DensityAlpha::new(alpha.clamp(0.0, 1.0)).expect("clamped"))
}
