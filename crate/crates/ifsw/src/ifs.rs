//! System models: weighted, potential-generated and normalised families.
//!
//! A [`WeightedIFS`] bundles a grid, `n` maps τᵢ : X → X given
//! componentwise as expressions, and `n` strictly positive weights qᵢ.
//! Weights are kept twice: as expressions, for exact evaluation anywhere
//! (particle positions, orbit points), and as cached [`GridFunction`]s for
//! the node-bound operator loops. The two views agree bit for bit at the
//! nodes because the cache is filled by evaluating the same expressions.
//!
//! [`PotentialIFS`] derives its weights from a single positive potential,
//! `qᵢ = ψ ∘ τᵢ`, by exact substitution into the expression trees; this is
//! the form in which topological pressure and equilibrium states make
//! sense. [`NormalizedIFS`] carries probability weights (`Σᵢ pᵢ ≡ 1`) and
//! is what the chaos game and the invariant-measure iteration consume.
//!
//! Construction performs structural checks only (dimensions and arities);
//! whether the maps really send X into X and the weights are really
//! positive is the job of [`WeightedIFS::validate`], which samples the
//! grid nodes plus `10·mᵈ` pseudo-random points and reports every
//! violation instead of failing on the first one. Solvers call
//! [`WeightedIFS::require_usable`] before trusting the caches.
//!
//! Map images are clamped onto the cube when they overshoot by at most
//! [`MAP_TOL`] = 1e-9 (the validation tolerance, so a system that
//! validates cleanly never trips the clamp at run time). Larger
//! excursions are domain errors.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::grid::{Grid, GridFunction};
use crate::Point;

/// Tolerance for map images leaving the cube: excursions up to this are
/// clamped, larger ones are errors (and validation violations).
pub const MAP_TOL: f64 = 1e-9;

/// Anything that owns a family of maps on a grid. Implemented by both
/// [`WeightedIFS`] and [`NormalizedIFS`] so that orbit and measure code
/// can work with either.
pub trait MapFamily {
    fn grid(&self) -> Grid;
    fn map_count(&self) -> usize;
    fn map_components(&self, i: usize) -> &[Expr];

    /// Evaluate τᵢ(x), clamping rounding-level excursions onto the cube.
    fn apply_map(&self, i: usize, x: &[f64]) -> Result<Point> {
        let dim = self.grid().dim();
        let comps = self.map_components(i);
        let mut img = [0.0; 2];
        for (c, expr) in comps.iter().enumerate() {
            img[c] = expr.eval(&x[..dim])?;
        }
        self.grid().clamp(&img, MAP_TOL)
    }

    /// Cached images of all grid nodes under τᵢ (hard-clamped onto the
    /// cube, so interpolation at them cannot fail).
    fn node_images(&self, i: usize) -> &[Point];
}

/// A finite family of maps with strictly positive weights on [0,1]^d.
#[derive(Debug, Clone)]
pub struct WeightedIFS {
    grid: Grid,
    maps: Vec<Vec<Expr>>,
    weights: Vec<Expr>,
    weight_values: Vec<GridFunction>,
    images: Vec<Vec<Point>>,
    max_node_escape: f64,
    min_node_weight: f64,
    node_defects: Vec<String>,
}

impl WeightedIFS {
    /// Build a system from map components (one expression per coordinate,
    /// `maps[i][c]` is the c-th component of τᵢ) and one weight expression
    /// per map.
    ///
    /// Only structural properties are enforced here. Evaluation problems
    /// at grid nodes (escaping images, non-finite weights) are recorded
    /// and surface through [`validate`](Self::validate) /
    /// [`require_usable`](Self::require_usable).
    pub fn new(grid: Grid, maps: Vec<Vec<Expr>>, weights: Vec<Expr>) -> Result<Self> {
        let dim = grid.dim();
        if maps.is_empty() {
            return Err(Error::InvalidSystem("a system needs at least one map".into()));
        }
        if maps.len() != weights.len() {
            return Err(Error::InvalidSystem(format!(
                "{} maps but {} weights",
                maps.len(),
                weights.len()
            )));
        }
        for (i, comps) in maps.iter().enumerate() {
            if comps.len() != dim {
                return Err(Error::InvalidSystem(format!(
                    "map {i} has {} components, state space has dimension {dim}",
                    comps.len()
                )));
            }
            for expr in comps {
                let needed = expr.dimension_required();
                if needed > dim {
                    return Err(Error::Dimension { needed, dim });
                }
            }
        }
        for expr in &weights {
            let needed = expr.dimension_required();
            if needed > dim {
                return Err(Error::Dimension { needed, dim });
            }
        }

        let mut node_defects = Vec::new();
        let mut max_node_escape = 0.0_f64;
        let record = |msg: String, defects: &mut Vec<String>| {
            if defects.len() < 16 {
                defects.push(msg);
            }
        };

        let mut images = Vec::with_capacity(maps.len());
        for (i, comps) in maps.iter().enumerate() {
            let mut img = Vec::with_capacity(grid.node_count());
            for (_, p) in grid.nodes() {
                let mut y = [0.0; 2];
                let mut bad = false;
                for (c, expr) in comps.iter().enumerate() {
                    match expr.eval(&p[..dim]) {
                        Ok(v) if v.is_finite() => {
                            max_node_escape = max_node_escape.max(-v).max(v - 1.0);
                            y[c] = v.clamp(0.0, 1.0);
                        }
                        Ok(_) | Err(_) => {
                            bad = true;
                            y[c] = 0.0;
                        }
                    }
                }
                if bad {
                    record(
                        format!("map {i} failed to evaluate at node {:?}", &p[..dim]),
                        &mut node_defects,
                    );
                }
                img.push(y);
            }
            images.push(img);
        }

        let mut weight_values = Vec::with_capacity(weights.len());
        let mut min_node_weight = f64::INFINITY;
        for (i, expr) in weights.iter().enumerate() {
            let mut vals = Vec::with_capacity(grid.node_count());
            for (_, p) in grid.nodes() {
                match expr.eval(&p[..dim]) {
                    Ok(v) => {
                        min_node_weight = min_node_weight.min(v);
                        vals.push(v);
                    }
                    Err(e) => {
                        record(format!("weight {i}: {e}"), &mut node_defects);
                        vals.push(f64::NAN);
                    }
                }
            }
            weight_values.push(GridFunction::from_values(grid, vals)?);
        }

        Ok(WeightedIFS {
            grid,
            maps,
            weights,
            weight_values,
            images,
            max_node_escape,
            min_node_weight,
            node_defects,
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Number of maps in the family.
    pub fn n(&self) -> usize {
        self.maps.len()
    }

    pub fn maps(&self) -> &[Vec<Expr>] {
        &self.maps
    }

    pub fn weights(&self) -> &[Expr] {
        &self.weights
    }

    /// Cached weight values at the grid nodes.
    pub fn weight_values(&self, i: usize) -> &GridFunction {
        &self.weight_values[i]
    }

    /// Evaluate weight qᵢ exactly at an arbitrary point.
    pub fn weight_at(&self, i: usize, x: &[f64]) -> Result<f64> {
        self.weights[i].eval(&x[..self.grid.dim()])
    }

    /// Smallest weight value seen at any grid node.
    pub fn min_node_weight(&self) -> f64 {
        self.min_node_weight
    }

    /// Largest node-escape recorded while caching map images.
    pub fn max_node_escape(&self) -> f64 {
        self.max_node_escape
    }

    /// Error unless the node caches are trustworthy: no evaluation
    /// defects, no image escapes beyond [`MAP_TOL`].
    pub fn require_usable(&self) -> Result<()> {
        if let Some(first) = self.node_defects.first() {
            return Err(Error::InvalidSystem(format!(
                "{} evaluation defect(s) at grid nodes, e.g. {first}; run validate() for details",
                self.node_defects.len()
            )));
        }
        if self.max_node_escape > MAP_TOL {
            return Err(Error::InvalidSystem(format!(
                "map images leave the cube by up to {:.3e}; run validate() for details",
                self.max_node_escape
            )));
        }
        Ok(())
    }

    /// Error unless every weight is strictly positive at the nodes.
    /// Spectral computations (eigenfunctions, pressure) require this.
    pub fn require_positive_weights(&self) -> Result<()> {
        self.require_usable()?;
        if !(self.min_node_weight > 0.0) {
            return Err(Error::NonPositiveWeight(format!(
                "smallest node weight is {:.6e}",
                self.min_node_weight
            )));
        }
        Ok(())
    }

    /// Check the standing assumptions by sampling: every map must send X
    /// into X (tolerance [`MAP_TOL`]) and every weight must be strictly
    /// positive (or merely nonnegative when `allow_nonnegative` is set).
    /// Samples all grid nodes plus `10·mᵈ` uniform pseudo-random points
    /// drawn from `seed`.
    pub fn validate(&self, seed: u64, allow_nonnegative: bool) -> ValidationReport {
        let dim = self.grid.dim();
        let mut rng = StdRng::seed_from_u64(seed);
        let mut points: Vec<Point> = self.grid.nodes().map(|(_, p)| p).collect();
        for _ in 0..10 * self.grid.node_count() {
            let mut p = [0.0; 2];
            for c in p.iter_mut().take(dim) {
                *c = rng.gen::<f64>();
            }
            points.push(p);
        }

        let mut report = ValidationReport {
            dim,
            n_maps: self.n(),
            points_checked: points.len(),
            allow_nonnegative,
            ..ValidationReport::default()
        };
        report.min_weight = f64::INFINITY;

        for p in &points {
            for (i, comps) in self.maps.iter().enumerate() {
                for expr in comps {
                    match expr.eval(&p[..dim]) {
                        Ok(v) if v.is_finite() => {
                            let excess = (-v).max(v - 1.0);
                            if excess > report.max_map_escape {
                                report.max_map_escape = excess;
                            }
                            if excess > MAP_TOL {
                                report.escape_count += 1;
                                if report.escape_examples.len() < 5 {
                                    report.escape_examples.push(EscapeExample {
                                        map: i,
                                        point: p[..dim].to_vec(),
                                        excess,
                                    });
                                }
                            }
                        }
                        Ok(v) => report.record_domain(format!(
                            "map {i} evaluates to {v} at {:?}",
                            &p[..dim]
                        )),
                        Err(e) => report.record_domain(format!("map {i}: {e}")),
                    }
                }
            }
            for (i, expr) in self.weights.iter().enumerate() {
                match expr.eval(&p[..dim]) {
                    Ok(v) if v.is_finite() => {
                        report.min_weight = report.min_weight.min(v);
                        let bad = if allow_nonnegative { v < 0.0 } else { v <= 0.0 };
                        if bad {
                            report.nonpositive_count += 1;
                            if report.nonpositive_examples.len() < 5 {
                                report.nonpositive_examples.push(WeightExample {
                                    weight: i,
                                    point: p[..dim].to_vec(),
                                    value: v,
                                });
                            }
                        }
                    }
                    Ok(v) => report.record_domain(format!(
                        "weight {i} evaluates to {v} at {:?}",
                        &p[..dim]
                    )),
                    Err(e) => report.record_domain(format!("weight {i}: {e}")),
                }
            }
        }
        report
    }
}

impl MapFamily for WeightedIFS {
    fn grid(&self) -> Grid {
        self.grid
    }
    fn map_count(&self) -> usize {
        self.n()
    }
    fn map_components(&self, i: usize) -> &[Expr] {
        &self.maps[i]
    }
    fn node_images(&self, i: usize) -> &[Point] {
        &self.images[i]
    }
}

/// Outcome of sampling-based validation. `ok()` is the single gate the
/// command-line tool uses before running solvers.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub dim: usize,
    pub n_maps: usize,
    pub points_checked: usize,
    pub max_map_escape: f64,
    pub escape_count: usize,
    pub escape_examples: Vec<EscapeExample>,
    pub min_weight: f64,
    pub nonpositive_count: usize,
    pub nonpositive_examples: Vec<WeightExample>,
    pub domain_error_count: usize,
    pub domain_errors: Vec<String>,
    pub allow_nonnegative: bool,
}

#[derive(Debug, Clone)]
pub struct EscapeExample {
    pub map: usize,
    pub point: Vec<f64>,
    pub excess: f64,
}

#[derive(Debug, Clone)]
pub struct WeightExample {
    pub weight: usize,
    pub point: Vec<f64>,
    pub value: f64,
}

impl ValidationReport {
    fn record_domain(&mut self, msg: String) {
        self.domain_error_count += 1;
        if self.domain_errors.len() < 16 {
            self.domain_errors.push(msg);
        }
    }

    pub fn ok(&self) -> bool {
        self.escape_count == 0 && self.nonpositive_count == 0 && self.domain_error_count == 0
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "validation: {} maps on [0,1]^{}, {} sample points",
            self.n_maps, self.dim, self.points_checked
        )?;
        writeln!(
            f,
            "  map images: max excursion {:.3e} ({} beyond tolerance)",
            self.max_map_escape, self.escape_count
        )?;
        for e in &self.escape_examples {
            writeln!(
                f,
                "    map {} escapes by {:.3e} at {:?}",
                e.map, e.excess, e.point
            )?;
        }
        writeln!(
            f,
            "  weights: min sampled value {:.6e} ({} {} violations)",
            self.min_weight,
            self.nonpositive_count,
            if self.allow_nonnegative { "negativity" } else { "positivity" }
        )?;
        for e in &self.nonpositive_examples {
            writeln!(
                f,
                "    weight {} = {:.6e} at {:?}",
                e.weight, e.value, e.point
            )?;
        }
        if self.domain_error_count > 0 {
            writeln!(f, "  {} evaluation failure(s):", self.domain_error_count)?;
            for e in &self.domain_errors {
                writeln!(f, "    {e}")?;
            }
        }
        write!(f, "  verdict: {}", if self.ok() { "valid" } else { "INVALID" })
    }
}

/// A weighted system whose weights come from a potential: `qᵢ = ψ ∘ τᵢ`.
#[derive(Debug, Clone)]
pub struct PotentialIFS {
    ifs: WeightedIFS,
    psi: Expr,
    psi_values: GridFunction,
}

impl PotentialIFS {
    /// Compose a positive potential with every map. The composition is a
    /// tree substitution, so evaluating the weight anywhere equals
    /// evaluating the map first and ψ after, bit for bit.
    ///
    /// ψ must be strictly positive; this is checked at the grid nodes and
    /// refused eagerly (a potential that touches zero produces weights
    /// for which no spectral theory applies).
    pub fn from_potential(grid: Grid, maps: Vec<Vec<Expr>>, psi: Expr) -> Result<Self> {
        let needed = psi.dimension_required();
        if needed > grid.dim() {
            return Err(Error::Dimension { needed, dim: grid.dim() });
        }
        let psi_values = GridFunction::from_fn(grid, |p| psi.eval(p))?;
        if !(psi_values.min_value() > 0.0) {
            return Err(Error::NonPositiveWeight(format!(
                "potential ψ has minimum node value {:.6e}",
                psi_values.min_value()
            )));
        }
        let weights = maps
            .iter()
            .map(|comps| psi.substitute(comps))
            .collect::<Result<Vec<_>>>()?;
        let ifs = WeightedIFS::new(grid, maps, weights)?;
        if !(ifs.min_node_weight() > 0.0) {
            return Err(Error::NonPositiveWeight(format!(
                "composed weight has minimum node value {:.6e}",
                ifs.min_node_weight()
            )));
        }
        Ok(PotentialIFS { ifs, psi, psi_values })
    }

    pub fn ifs(&self) -> &WeightedIFS {
        &self.ifs
    }

    pub fn psi(&self) -> &Expr {
        &self.psi
    }

    /// ψ cached at the grid nodes.
    pub fn psi_values(&self) -> &GridFunction {
        &self.psi_values
    }

    /// ψ evaluated exactly at an arbitrary point.
    pub fn psi_at(&self, x: &[f64]) -> Result<f64> {
        self.psi.eval(&x[..self.ifs.grid().dim()])
    }
}

/// A family of maps with place-dependent probability weights `pᵢ(x)`,
/// `Σᵢ pᵢ ≡ 1`. Probabilities are grid functions (interpolated between
/// nodes), which is what both the invariant-measure iteration and the
/// chaos game sample.
#[derive(Debug, Clone)]
pub struct NormalizedIFS {
    grid: Grid,
    maps: Vec<Vec<Expr>>,
    images: Vec<Vec<Point>>,
    probs: Vec<GridFunction>,
    sum_deviation: f64,
    warning: Option<String>,
}

impl NormalizedIFS {
    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn n(&self) -> usize {
        self.maps.len()
    }

    /// Probability grid functions, one per map.
    pub fn probabilities(&self) -> &[GridFunction] {
        &self.probs
    }

    /// Interpolated probability of branch `i` at `x`, floored at zero
    /// (interpolation of a positive function can undershoot by rounding).
    pub fn prob(&self, i: usize, x: &Point) -> f64 {
        self.probs[i].eval_clamped(x).max(0.0)
    }

    /// All branch probabilities at `x`, renormalised to sum to one.
    pub fn prob_vector(&self, x: &Point) -> Vec<f64> {
        let mut v: Vec<f64> = (0..self.n()).map(|i| self.prob(i, x)).collect();
        let s: f64 = v.iter().sum();
        if s > 0.0 {
            for p in &mut v {
                *p /= s;
            }
        } else {
            // Degenerate interpolation; fall back to the uniform draw.
            let u = 1.0 / self.n() as f64;
            v.iter_mut().for_each(|p| *p = u);
        }
        v
    }

    /// Worst deviation of `Σᵢ pᵢ` from 1 over the grid nodes.
    pub fn sum_deviation(&self) -> f64 {
        self.sum_deviation
    }

    /// Present when the construction could not certify `Σᵢ pᵢ ≈ 1`.
    pub fn warning(&self) -> Option<&str> {
        self.warning.as_deref()
    }

    /// Wrap weights that are already probabilities (e.g. constant 1/2).
    /// Requires `Σᵢ pᵢ = 1` at every node to within 1e-10.
    pub fn from_probability_exprs(
        grid: Grid,
        maps: Vec<Vec<Expr>>,
        probs: Vec<Expr>,
    ) -> Result<Self> {
        let ifs = WeightedIFS::new(grid, maps, probs)?;
        ifs.require_usable()?;
        if ifs.min_node_weight() < 0.0 {
            return Err(Error::NonPositiveWeight(format!(
                "probability weight has node value {:.6e}",
                ifs.min_node_weight()
            )));
        }
        let mut sum_dev = 0.0_f64;
        for k in 0..grid.node_count() {
            let s: f64 = (0..ifs.n()).map(|i| ifs.weight_values(i).values()[k]).sum();
            sum_dev = sum_dev.max((s - 1.0).abs());
        }
        if sum_dev > 1e-10 {
            return Err(Error::InvalidSystem(format!(
                "weights are not probabilities: Σ pᵢ deviates from 1 by {sum_dev:.3e}"
            )));
        }
        Ok(NormalizedIFS {
            grid,
            probs: (0..ifs.n()).map(|i| ifs.weight_values(i).clone()).collect(),
            images: (0..ifs.n()).map(|i| ifs.node_images(i).to_vec()).collect(),
            maps: ifs.maps,
            sum_deviation: sum_dev,
            warning: None,
        })
    }
}

impl MapFamily for NormalizedIFS {
    fn grid(&self) -> Grid {
        self.grid
    }
    fn map_count(&self) -> usize {
        self.n()
    }
    fn map_components(&self, i: usize) -> &[Expr] {
        &self.maps[i]
    }
    fn node_images(&self, i: usize) -> &[Point] {
        &self.images[i]
    }
}

/// Turn an eigenpair of the transfer operator into a probability system:
///
/// `pⱼ(x) = qⱼ(x) · h(τⱼ(x)) / (ρ · h(x))`.
///
/// When (h, ρ) is an exact positive eigenpair the pⱼ sum to one
/// identically; numerically `Σⱼ pⱼ(x) = (B_q h)(x)/(ρ h(x))` holds at the
/// nodes by construction, so the deviation from 1 mirrors the eigen
/// residual. A deviation above 1e-6 attaches a warning (the usual cause
/// is normalising with a pair that has not converged).
pub fn normalize(ifs: &WeightedIFS, h: &GridFunction, rho: f64) -> Result<NormalizedIFS> {
    ifs.require_positive_weights()?;
    if h.grid() != ifs.grid() {
        return Err(Error::GridMismatch("normalize: h lives on a different grid".into()));
    }
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::Precondition(format!("normalize needs ρ > 0, got {rho}")));
    }
    if !(h.min_value() > 0.0) {
        return Err(Error::Precondition(format!(
            "normalize needs a strictly positive h; minimum node value is {:.6e}",
            h.min_value()
        )));
    }

    let grid = ifs.grid();
    let n = ifs.n();
    let mut probs = Vec::with_capacity(n);
    for j in 0..n {
        let q = ifs.weight_values(j).values();
        let values: Vec<f64> = (0..grid.node_count())
            .map(|k| q[k] * h.eval_clamped(&ifs.node_images(j)[k]) / (rho * h.values()[k]))
            .collect();
        probs.push(GridFunction::from_values(grid, values)?);
    }

    let mut sum_dev = 0.0_f64;
    for k in 0..grid.node_count() {
        let s: f64 = probs.iter().map(|p| p.values()[k]).sum();
        sum_dev = sum_dev.max((s - 1.0).abs());
    }
    let warning = (sum_dev > 1e-6).then(|| {
        format!(
            "Σ pⱼ deviates from 1 by {sum_dev:.3e}; the eigenpair used for \
             normalisation looks unconverged"
        )
    });

    Ok(NormalizedIFS {
        grid,
        maps: ifs.maps.clone(),
        images: ifs.images.clone(),
        probs,
        sum_deviation: sum_dev,
        warning,
    })
}
