//! Measures and the Markov operator dual to the transfer operator.
//!
//! The dual acts on measures by pushing mass along the branches,
//!
//! ```text
//! L_q μ = Σᵢ (τᵢ)_* (qᵢ · μ),      ∫ f d(L_q μ) = ∫ B_q f dμ,
//! ```
//!
//! and is represented here on weighted particle collections. Applying
//! `L_q` multiplies the particle count by the number of maps, so iteration
//! interleaves a compaction step that bins particles to grid cells,
//! replacing each cell's content by its mass centroid. Binning preserves
//! total mass and first moments to rounding accuracy and keeps the
//! particle count bounded by the node count; it is also deterministic
//! (cells are traversed in index order), so every run of every solver is
//! reproducible.
//!
//! Two fixed-point solvers live here. [`eigen_measure`] power-iterates
//! `μ ↦ L_q μ / ‖L_q μ‖` for a general positive system; the mass growth
//! per step estimates the leading eigenvalue ρ from the measure side.
//! [`hutchinson_fixed_point`] iterates the mass-preserving operator of a
//! probability system to its invariant measure. Both read convergence
//! off stabilisation: the total-variation change per sweep settles at the
//! binning resolution and stops moving, and the eigenvalue (respectively
//! the dictionary moments) stop changing at the requested tolerance.
//!
//! [`chaos_game`] samples the same invariant measure stochastically: a
//! single orbit `x_{j+1} = τ_{i_j}(x_j)` with branch `i_j` drawn from the
//! place-dependent probabilities at `x_j`, using a seeded ChaCha8 stream
//! so orbits are reproducible bit for bit.

use std::io::Write as IoWrite;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dictionary::standard_dictionary;
use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::ifs::{MapFamily, NormalizedIFS, WeightedIFS};
use crate::kahan::KahanSum;
use crate::Point;

/// A finitely supported measure: weighted particles in the cube.
#[derive(Debug, Clone)]
pub struct ParticleMeasure {
    dim: usize,
    positions: Vec<Point>,
    masses: Vec<f64>,
}

impl ParticleMeasure {
    /// Unit point mass at `x`.
    pub fn dirac(dim: usize, x: &[f64]) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::Precondition(format!("dimension must be 1 or 2, got {dim}")));
        }
        let mut p = [0.0; 2];
        for c in 0..dim {
            let v = x.get(c).copied().unwrap_or(0.0);
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutsideDomain {
                    point: x.to_vec(),
                    dim,
                    excess: (-v).max(v - 1.0),
                });
            }
            p[c] = v;
        }
        Ok(ParticleMeasure { dim, positions: vec![p], masses: vec![1.0] })
    }

    /// Equal masses on all grid nodes (total mass 1).
    pub fn uniform_on_nodes(grid: Grid) -> Self {
        let w = 1.0 / grid.node_count() as f64;
        ParticleMeasure {
            dim: grid.dim(),
            positions: grid.nodes().map(|(_, p)| p).collect(),
            masses: vec![w; grid.node_count()],
        }
    }

    /// Trapezoid weights on the grid nodes: the discrete stand-in for
    /// Lebesgue measure (total mass 1).
    pub fn lebesgue_on_nodes(grid: Grid) -> Self {
        let m = grid.nodes_per_axis();
        let axis = |i: usize| if i == 0 || i == m - 1 { 0.5 } else { 1.0 };
        let scale = 1.0 / (m - 1) as f64;
        let masses: Vec<f64> = grid
            .nodes()
            .map(|(k, _)| {
                if grid.dim() == 1 {
                    axis(k) * scale
                } else {
                    axis(k / m) * axis(k % m) * scale * scale
                }
            })
            .collect();
        ParticleMeasure { dim: grid.dim(), positions: grid.nodes().map(|(_, p)| p).collect(), masses }
    }

    pub fn from_particles(dim: usize, positions: Vec<Point>, masses: Vec<f64>) -> Result<Self> {
        if positions.len() != masses.len() {
            return Err(Error::Precondition(format!(
                "{} positions but {} masses",
                positions.len(),
                masses.len()
            )));
        }
        Ok(ParticleMeasure { dim, positions, masses })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn total_mass(&self) -> f64 {
        let mut acc = KahanSum::new();
        for m in &self.masses {
            acc.add(*m);
        }
        acc.value()
    }

    /// ∫ f dμ for a pointwise-evaluable f, with compensated summation.
    pub fn integrate(&self, mut f: impl FnMut(&Point) -> f64) -> f64 {
        let mut acc = KahanSum::new();
        for (p, m) in self.positions.iter().zip(&self.masses) {
            acc.add(m * f(p));
        }
        acc.value()
    }

    /// ∫ f dμ for a grid function (interpolated at the particles).
    pub fn integrate_grid(&self, f: &GridFunction) -> Result<f64> {
        if f.grid().dim() != self.dim {
            return Err(Error::GridMismatch(
                "integrate_grid: measure and function dimensions differ".into(),
            ));
        }
        Ok(self.integrate(|p| f.eval_clamped(p)))
    }

    /// Rescale to total mass 1.
    pub fn normalized(&self) -> Result<Self> {
        let total = self.total_mass();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::Precondition(format!(
                "cannot normalise a measure of mass {total}"
            )));
        }
        Ok(ParticleMeasure {
            dim: self.dim,
            positions: self.positions.clone(),
            masses: self.masses.iter().map(|m| m / total).collect(),
        })
    }

    /// Bin particles to grid cells (nearest node per axis) and replace
    /// each nonempty cell by a single particle at the cell's mass
    /// centroid. Mass and first moments are preserved to rounding;
    /// output particles are ordered by cell index, so the operation is
    /// deterministic.
    pub fn compacted(&self, grid: Grid) -> Result<Self> {
        if grid.dim() != self.dim {
            return Err(Error::GridMismatch(
                "compacted: measure and grid dimensions differ".into(),
            ));
        }
        let mut mass = vec![0.0; grid.node_count()];
        let mut mx = vec![0.0; grid.node_count()];
        let mut my = vec![0.0; grid.node_count()];
        for (p, m) in self.positions.iter().zip(&self.masses) {
            let cell = grid.cell_index(p);
            mass[cell] += m;
            mx[cell] += m * p[0];
            if self.dim == 2 {
                my[cell] += m * p[1];
            }
        }
        let mut positions = Vec::new();
        let mut masses = Vec::new();
        for cell in 0..grid.node_count() {
            if mass[cell] > 0.0 {
                let x = (mx[cell] / mass[cell]).clamp(0.0, 1.0);
                let y = if self.dim == 2 {
                    (my[cell] / mass[cell]).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                positions.push([x, y]);
                masses.push(mass[cell]);
            }
        }
        Ok(ParticleMeasure { dim: self.dim, positions, masses })
    }

    /// Per-cell masses on `grid` (dense, node-indexed). Used for
    /// total-variation comparisons between compacted measures.
    pub fn cell_masses(&self, grid: Grid) -> Result<Vec<f64>> {
        if grid.dim() != self.dim {
            return Err(Error::GridMismatch(
                "cell_masses: measure and grid dimensions differ".into(),
            ));
        }
        let mut mass = vec![0.0; grid.node_count()];
        for (p, m) in self.positions.iter().zip(&self.masses) {
            mass[grid.cell_index(p)] += m;
        }
        Ok(mass)
    }

    /// CSV rows `x1[,x2],mass`, one particle per line.
    pub fn write_csv<W: IoWrite>(&self, out: &mut W) -> Result<()> {
        if self.dim == 1 {
            writeln!(out, "x1,mass")?;
        } else {
            writeln!(out, "x1,x2,mass")?;
        }
        for (p, m) in self.positions.iter().zip(&self.masses) {
            if self.dim == 1 {
                writeln!(out, "{},{}", p[0], m)?;
            } else {
                writeln!(out, "{},{},{}", p[0], p[1], m)?;
            }
        }
        Ok(())
    }
}

/// Total-variation distance between two dense cell-mass vectors.
fn tv_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = KahanSum::new();
    for (x, y) in a.iter().zip(b) {
        acc.add((x - y).abs());
    }
    0.5 * acc.value()
}

/// One application of the Markov operator with exact weight evaluation:
/// each particle `(x, m)` becomes the `n` particles `(τᵢ(x), m·qᵢ(x))`.
/// Mass grows by the local factor `Σᵢ qᵢ(x)` — for probability weights
/// use [`markov_apply_normalized`], which preserves mass.
pub fn markov_apply(ifs: &WeightedIFS, mu: &ParticleMeasure) -> Result<ParticleMeasure> {
    if ifs.grid().dim() != mu.dim() {
        return Err(Error::GridMismatch(
            "markov_apply: system and measure dimensions differ".into(),
        ));
    }
    let n = ifs.n();
    let mut positions = Vec::with_capacity(mu.len() * n);
    let mut masses = Vec::with_capacity(mu.len() * n);
    for (p, m) in mu.positions.iter().zip(&mu.masses) {
        for i in 0..n {
            positions.push(ifs.apply_map(i, p)?);
            masses.push(m * ifs.weight_at(i, p)?);
        }
    }
    Ok(ParticleMeasure { dim: mu.dim(), positions, masses })
}

/// Markov step for a probability system, with branch probabilities
/// interpolated from their grid representation. Preserves total mass up
/// to the interpolation defect of `Σᵢ pᵢ`.
pub fn markov_apply_normalized(
    nifs: &NormalizedIFS,
    mu: &ParticleMeasure,
) -> Result<ParticleMeasure> {
    if nifs.grid().dim() != mu.dim() {
        return Err(Error::GridMismatch(
            "markov_apply: system and measure dimensions differ".into(),
        ));
    }
    let n = nifs.n();
    let mut positions = Vec::with_capacity(mu.len() * n);
    let mut masses = Vec::with_capacity(mu.len() * n);
    for (p, m) in mu.positions.iter().zip(&mu.masses) {
        for i in 0..n {
            positions.push(nifs.apply_map(i, p)?);
            masses.push(m * nifs.prob(i, p));
        }
    }
    Ok(ParticleMeasure { dim: mu.dim(), positions, masses })
}

/// Range of the local mass-growth factor `Σᵢ qᵢ` over the grid nodes.
/// The leading eigenvalue of both `B_q` and `L_q` lies in this interval,
/// so it is a cheap sanity bracket for any solver output.
pub fn mass_growth_bounds(ifs: &WeightedIFS) -> Result<(f64, f64)> {
    ifs.require_usable()?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for k in 0..ifs.grid().node_count() {
        let s: f64 = (0..ifs.n()).map(|i| ifs.weight_values(i).values()[k]).sum();
        lo = lo.min(s);
        hi = hi.max(s);
    }
    Ok((lo, hi))
}

/// Eigenvalue/eigenmeasure estimate from the measure side.
#[derive(Debug, Clone)]
pub struct EigenMeasure {
    /// Normalised fixed-point candidate (compacted to the grid).
    pub measure: ParticleMeasure,
    /// Mass growth per step at the fixed point — the eigenvalue reading.
    pub rho: f64,
    /// Final total-variation change per sweep (plateaus at the binning
    /// resolution; its *stabilisation*, not its size, ends the run).
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub rho_history: Vec<f64>,
    pub residual_history: Vec<f64>,
}

/// Power iteration `μ ↦ compact(L_q μ) / mass` starting from the
/// node-supported Lebesgue proxy.
///
/// Stops once both readings have stabilised: the eigenvalue estimate
/// moves by at most `tol·ρ` and the TV-change-per-sweep moves by at most
/// `tol` between consecutive iterations. (The TV change itself does not
/// go to zero — compaction keeps the measure at grid resolution — so the
/// plateau is the convergence signal.)
pub fn eigen_measure(ifs: &WeightedIFS, tol: f64, max_iter: usize) -> Result<EigenMeasure> {
    ifs.require_positive_weights()?;
    if !(tol > 0.0) {
        return Err(Error::Precondition(format!("eigen_measure needs tol > 0, got {tol}")));
    }
    let grid = ifs.grid();
    let mut mu = ParticleMeasure::lebesgue_on_nodes(grid);
    let mut cells = mu.cell_masses(grid)?;
    let mut rho_history = Vec::new();
    let mut residual_history = Vec::new();
    let mut converged = false;

    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let pushed = markov_apply(ifs, &mu)?;
        let rho = pushed.total_mass();
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::Precondition(format!(
                "measure iteration lost positivity (mass {rho})"
            )));
        }
        mu = pushed.compacted(grid)?.normalized()?;
        let new_cells = mu.cell_masses(grid)?;
        let res = tv_distance(&new_cells, &cells);
        cells = new_cells;
        rho_history.push(rho);
        residual_history.push(res);
        let k = rho_history.len();
        if k >= 2 {
            let drho = (rho_history[k - 1] - rho_history[k - 2]).abs();
            let dres = (residual_history[k - 1] - residual_history[k - 2]).abs();
            if drho <= tol * rho && dres <= tol {
                converged = true;
                break;
            }
        }
    }

    Ok(EigenMeasure {
        measure: mu,
        rho: *rho_history.last().unwrap(),
        residual: *residual_history.last().unwrap(),
        iterations,
        converged,
        rho_history,
        residual_history,
    })
}

/// Invariant measure of a probability system.
#[derive(Debug, Clone)]
pub struct HutchinsonFixedPoint {
    pub measure: ParticleMeasure,
    /// Final worst change of a dictionary moment per sweep.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub residual_history: Vec<f64>,
}

/// Iterate the mass-preserving Markov operator of a probability system
/// to its fixed point, compacting each sweep. Convergence is read off
/// the standard dictionary: the run stops when no dictionary moment
/// moved by more than `tol` in the last sweep.
pub fn hutchinson_fixed_point(
    nifs: &NormalizedIFS,
    tol: f64,
    max_iter: usize,
) -> Result<HutchinsonFixedPoint> {
    if !(tol > 0.0) {
        return Err(Error::Precondition(format!(
            "hutchinson_fixed_point needs tol > 0, got {tol}"
        )));
    }
    let grid = nifs.grid();
    let dict = standard_dictionary(grid.dim());
    let mut mu = ParticleMeasure::uniform_on_nodes(grid);
    let mut moments: Vec<f64> = dict.iter().map(|t| mu.integrate(|p| (t.f)(p))).collect();
    let mut residual_history = Vec::new();
    let mut converged = false;

    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        mu = markov_apply_normalized(nifs, &mu)?
            .compacted(grid)?
            .normalized()?;
        let new_moments: Vec<f64> = dict.iter().map(|t| mu.integrate(|p| (t.f)(p))).collect();
        let res = moments
            .iter()
            .zip(&new_moments)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        moments = new_moments;
        residual_history.push(res);
        if res <= tol {
            converged = true;
            break;
        }
    }

    Ok(HutchinsonFixedPoint {
        measure: mu,
        residual: *residual_history.last().unwrap(),
        iterations,
        converged,
        residual_history,
    })
}

/// A chaos-game trajectory.
#[derive(Debug, Clone)]
pub struct Orbit {
    dim: usize,
    /// Visited points `x₀, …, x_N` (length `n_steps + 1`).
    pub points: Vec<Point>,
    /// Branch chosen at each step (length `n_steps`).
    pub indices: Vec<usize>,
}

impl Orbit {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn final_point(&self) -> Point {
        *self.points.last().unwrap()
    }

    /// Uniform empirical measure on the orbit after dropping the first
    /// `skip` points (burn-in).
    pub fn empirical_measure(&self, skip: usize) -> Result<ParticleMeasure> {
        if skip >= self.points.len() {
            return Err(Error::Precondition(format!(
                "burn-in {skip} discards the whole orbit of {} points",
                self.points.len()
            )));
        }
        let tail = &self.points[skip..];
        let w = 1.0 / tail.len() as f64;
        Ok(ParticleMeasure {
            dim: self.dim,
            positions: tail.to_vec(),
            masses: vec![w; tail.len()],
        })
    }

    /// CSV rows `step,map,x1[,x2]`; the starting point gets `map` = -1.
    pub fn write_csv<W: IoWrite>(&self, out: &mut W) -> Result<()> {
        if self.dim == 1 {
            writeln!(out, "step,map,x1")?;
        } else {
            writeln!(out, "step,map,x1,x2")?;
        }
        for (j, p) in self.points.iter().enumerate() {
            let map = if j == 0 {
                -1
            } else {
                self.indices[j - 1] as i64
            };
            if self.dim == 1 {
                writeln!(out, "{},{},{}", j, map, p[0])?;
            } else {
                writeln!(out, "{},{},{},{}", j, map, p[0], p[1])?;
            }
        }
        Ok(())
    }
}

/// Run the chaos game: starting from `x0`, repeatedly draw a branch from
/// the place-dependent probabilities at the current point and jump. The
/// ChaCha8 stream seeded by `seed` makes orbits reproducible across
/// platforms.
pub fn chaos_game(
    nifs: &NormalizedIFS,
    x0: &[f64],
    n_steps: usize,
    seed: u64,
) -> Result<Orbit> {
    let dim = nifs.grid().dim();
    let mut p = [0.0; 2];
    for c in 0..dim {
        p[c] = x0.get(c).copied().unwrap_or(0.0);
    }
    let start = nifs.grid().clamp(&p, crate::grid::CLAMP_TOL)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n_steps + 1);
    let mut indices = Vec::with_capacity(n_steps);
    points.push(start);
    let mut x = start;
    for _ in 0..n_steps {
        let probs = nifs.prob_vector(&x);
        let u: f64 = rng.gen();
        let mut cum = 0.0;
        let mut pick = nifs.n() - 1;
        for (i, q) in probs.iter().enumerate() {
            cum += q;
            if u < cum {
                pick = i;
                break;
            }
        }
        x = nifs.apply_map(pick, &x)?;
        indices.push(pick);
        points.push(x);
    }
    Ok(Orbit { dim, points, indices })
}
