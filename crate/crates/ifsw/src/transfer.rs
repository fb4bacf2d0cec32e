//! The transfer operator and its spectral solvers.
//!
//! For a weighted system with maps τᵢ and weights qᵢ the operator acts on
//! functions by
//!
//! ```text
//! (B_q f)(x) = Σᵢ qᵢ(x) · f(τᵢ(x)).
//! ```
//!
//! On a grid, [`apply`] evaluates `f` at the cached node images by
//! interpolation; everything else in this module is built from that one
//! primitive, so all solvers see exactly the same discretised operator.
//!
//! Two routes to the leading eigenvalue ρ and eigenfunction h are
//! provided. [`eigen_power`] runs sup-normalised power iteration and
//! tracks the Collatz–Wielandt bracket `[min B f/f, max B f/f]`, which
//! always encloses ρ for positive operators; its width is the
//! convergence certificate, and a bracket that stops shrinking is
//! reported honestly as `converged = false` rather than as an error
//! (systems without a positive continuous eigenfunction exist and are
//! interesting). [`eigen_discounted`] solves the discounted fixed-point
//! family `w = ln Σᵢ exp(ln qᵢ + σ·w∘τᵢ)` for σ ↑ 1 along a geometric
//! schedule; the inner loops stop on the span seminorm of the update and
//! finish with a midpoint correction, which keeps the iteration count per
//! stage small even when σ is within 1e-6 of 1.
//!
//! [`word_sum_oracle`] is the grid-free ground truth: it expands
//! `B_qᴺ(1)(x₀)` literally as a sum over all nᴺ branch words, evaluating
//! maps and weights as exact expressions. It costs nᴺ work and is capped
//! by a budget, but it involves no grid, no interpolation and no solver —
//! ideal for validating the discretisation.

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::ifs::{MapFamily, PotentialIFS, WeightedIFS};
use crate::Point;

/// Work cap for [`word_sum_oracle`]: at most this many branch words.
pub const WORD_BUDGET: f64 = 1e7;

/// One application of the discretised transfer operator.
pub fn apply(ifs: &WeightedIFS, f: &GridFunction) -> Result<GridFunction> {
    ifs.require_usable()?;
    f.grid().check_same(ifs.grid(), "transfer apply")?;
    let grid = ifs.grid();
    let mut values = vec![0.0; grid.node_count()];
    for i in 0..ifs.n() {
        let q = ifs.weight_values(i).values();
        let images = ifs.node_images(i);
        for (k, v) in values.iter_mut().enumerate() {
            *v += q[k] * f.eval_clamped(&images[k]);
        }
    }
    GridFunction::from_values(grid, values)
}

/// Iterates `f, B f, B² f, …, Bᴺ f` (length `n_steps + 1`, raw, not
/// normalised — for large N of an expanding operator prefer
/// [`log_pressure_sequence`], which cannot overflow).
pub fn power_apply(ifs: &WeightedIFS, f: &GridFunction, n_steps: usize) -> Result<Vec<GridFunction>> {
    let mut out = Vec::with_capacity(n_steps + 1);
    out.push(f.clone());
    for _ in 0..n_steps {
        let next = apply(ifs, out.last().unwrap())?;
        out.push(next);
    }
    Ok(out)
}

/// Grid-free evaluation of `B_qᴺ(1)(x₀)` by exhaustive branch-word
/// enumeration:
///
/// ```text
/// Σ_{w ∈ {1..n}ᴺ}  q_{w₁}(x₀) · q_{w₂}(τ_{w₁}x₀) · … ,
/// ```
///
/// with every map and weight evaluated as an exact expression. Refused
/// with a budget error when nᴺ exceeds [`WORD_BUDGET`].
pub fn word_sum_oracle(ifs: &WeightedIFS, x0: &[f64], n_steps: usize) -> Result<f64> {
    let words = (ifs.n() as f64).powi(n_steps as i32);
    if words > WORD_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "word sum needs {}^{n_steps} ≈ {words:.2e} words, budget is {WORD_BUDGET:.0e}",
            ifs.n()
        )));
    }
    let mut p = [0.0; 2];
    p[..x0.len().min(2)].copy_from_slice(&x0[..x0.len().min(2)]);
    let start = ifs.grid().clamp(&p, crate::grid::CLAMP_TOL)?;

    fn rec(ifs: &WeightedIFS, x: Point, depth: usize) -> Result<f64> {
        if depth == 0 {
            return Ok(1.0);
        }
        let mut total = 0.0;
        for i in 0..ifs.n() {
            let q = ifs.weight_at(i, &x)?;
            let y = ifs.apply_map(i, &x)?;
            total += q * rec(ifs, y, depth - 1)?;
        }
        Ok(total)
    }
    rec(ifs, start, n_steps)
}

/// The normalised growth averages `a_N = N⁻¹ ln Bᴺ(1)`, computed stably
/// in the log domain.
#[derive(Debug, Clone)]
pub struct PressureSequence {
    /// `L_N = ln Bᴺ(1)` for `N = 0, …, n_max`.
    pub log_iterates: Vec<GridFunction>,
    /// `a_N = L_N / N` for `N = 1, …, n_max` (index 0 ↔ N = 1).
    pub averages: Vec<GridFunction>,
}

impl PressureSequence {
    /// `sup_x |a_N(x) − c|` for every N, e.g. with `c = ln ρ` to watch
    /// the O(1/N) approach to the pressure.
    pub fn sup_deviation(&self, c: f64) -> Vec<f64> {
        self.averages
            .iter()
            .map(|a| {
                a.values()
                    .iter()
                    .map(|v| (v - c).abs())
                    .fold(0.0, f64::max)
            })
            .collect()
    }
}

/// Iterate `L_{N+1} = ln B(exp(L_N − max L_N)) + max L_N` starting from
/// `L_0 = 0`. Each step applies the operator to a function with sup 1,
/// so the recursion tracks `ln Bᴺ(1)` without ever forming the
/// exponentially growing iterate.
pub fn log_pressure_sequence(ifs: &WeightedIFS, n_max: usize) -> Result<PressureSequence> {
    ifs.require_positive_weights()?;
    let grid = ifs.grid();
    let mut log_iterates = vec![GridFunction::constant(grid, 0.0)];
    let mut averages = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let prev = log_iterates.last().unwrap();
        let top = prev.max_value();
        let g = prev.map(|v| (v - top).exp());
        let bg = apply(ifs, &g)?;
        let next = bg.map(|v| v.ln() + top);
        averages.push(next.map(|v| v / n as f64));
        log_iterates.push(next);
    }
    Ok(PressureSequence { log_iterates, averages })
}

/// A candidate eigenpair of the transfer operator together with its
/// convergence certificate.
#[derive(Debug, Clone)]
pub struct EigenPair {
    /// Sup-normalised positive eigenfunction candidate.
    pub h: GridFunction,
    /// Eigenvalue estimate (midpoint of the final bracket).
    pub rho: f64,
    /// Collatz–Wielandt lower bound `min B h / h`.
    pub rho_lower: f64,
    /// Collatz–Wielandt upper bound `max B h / h`.
    pub rho_upper: f64,
    /// `sup |B h − ρ h|` at the grid nodes.
    pub residual: f64,
    /// Operator applications performed.
    pub iterations: usize,
    /// Whether the requested bracket width was reached. `false` is a
    /// result, not an error: the bracket and residual still describe
    /// what was achieved.
    pub converged: bool,
    /// `(lower, upper)` bracket after each iteration.
    pub history: Vec<(f64, f64)>,
}

impl EigenPair {
    /// Relative width of the eigenvalue bracket.
    pub fn gap(&self) -> f64 {
        (self.rho_upper - self.rho_lower) / self.rho_lower
    }
}

/// Sup-normalised power iteration with Collatz–Wielandt bracketing.
///
/// Stops as soon as `(max Bf/f − min Bf/f) ≤ tol · min Bf/f`, or after
/// `max_iter` operator applications, whichever comes first. The returned
/// pair always carries the final bracket, residual and full bracket
/// history, so a non-converged run can be diagnosed (a stagnating
/// bracket of fixed width is the signature of a system with no positive
/// continuous eigenfunction).
pub fn eigen_power(ifs: &WeightedIFS, tol: f64, max_iter: usize) -> Result<EigenPair> {
    ifs.require_positive_weights()?;
    if !(tol > 0.0) {
        return Err(Error::Precondition(format!("eigen_power needs tol > 0, got {tol}")));
    }
    if max_iter == 0 {
        return Err(Error::Precondition("eigen_power needs max_iter ≥ 1".into()));
    }
    let grid = ifs.grid();
    let mut f = GridFunction::constant(grid, 1.0);
    let mut history = Vec::new();
    let mut iterations = 0;

    loop {
        let bf = apply(ifs, &f)?;
        iterations += 1;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in 0..grid.node_count() {
            let r = bf.values()[k] / f.values()[k];
            lo = lo.min(r);
            hi = hi.max(r);
        }
        history.push((lo, hi));
        if !(lo > 0.0) || !hi.is_finite() {
            return Err(Error::Precondition(format!(
                "power iteration left the positive cone (bracket [{lo}, {hi}])"
            )));
        }
        let converged = hi - lo <= tol * lo;
        if converged || iterations >= max_iter {
            let rho = 0.5 * (lo + hi);
            let residual = (0..grid.node_count())
                .map(|k| (bf.values()[k] - rho * f.values()[k]).abs())
                .fold(0.0, f64::max);
            return Ok(EigenPair {
                h: f,
                rho,
                rho_lower: lo,
                rho_upper: hi,
                residual,
                iterations,
                converged,
                history,
            });
        }
        f = bf.normalized_sup();
    }
}

/// Geometric discount schedule σ_k = 1 − 2⁻ᵏ for the fixed-point family
/// solved by [`eigen_discounted`].
#[derive(Debug, Clone)]
pub struct DiscountSchedule {
    /// Number of stages; the last stage uses σ = 1 − 2⁻ᵏ_max.
    pub k_max: u32,
    /// Span-seminorm stopping threshold for the inner loops: stop when
    /// `span(w_new − w) ≤ inner_tol / σ`, floored at a few ulps of the
    /// iterate (w grows like ln ρ/(1−σ), so demanding more than its
    /// rounding noise would spin forever).
    pub inner_tol: f64,
    /// Hard cap on inner iterations per stage.
    pub max_inner: usize,
    /// Relative Collatz–Wielandt width below which the final pair is
    /// declared converged.  The stage-`k_max` fixed point differs in
    /// shape from the eigenfunction by O(1 − σ), so with the default
    /// `k_max = 20` the bracket bottoms out near 2.5·10⁻⁶; the default
    /// leaves a modest margin above that floor.
    pub certify_tol: f64,
}

impl Default for DiscountSchedule {
    fn default() -> Self {
        DiscountSchedule { k_max: 20, inner_tol: 1e-13, max_inner: 200_000, certify_tol: 1e-5 }
    }
}

impl DiscountSchedule {
    pub fn sigma(&self, k: u32) -> f64 {
        1.0 - 0.5_f64.powi(k as i32)
    }
}

/// Progress record for one discount stage.
#[derive(Debug, Clone)]
pub struct DiscountStage {
    pub k: u32,
    pub sigma: f64,
    pub inner_iterations: usize,
    pub inner_converged: bool,
    /// Pressure-style eigenvalue reading `exp((1−σ) · midrange(w))`.
    pub rho_estimate: f64,
}

/// Result of the discounted scheme: the final eigenpair plus the
/// per-stage trace.
#[derive(Debug, Clone)]
pub struct DiscountedPair {
    pub pair: EigenPair,
    pub stages: Vec<DiscountStage>,
}

/// Solve `w_σ = ln Σᵢ exp(ln qᵢ + σ · w_σ ∘ τᵢ)` along the schedule and
/// read the eigenpair off the last stage via `h = exp(w − max w)`.
///
/// Each inner loop is a σ-contraction solved by fixed-point iteration in
/// the log domain (log-sum-exp, so nothing overflows even though `w`
/// itself grows like ln ρ/(1−σ)). Stopping uses the span seminorm of the
/// update rather than the sup norm — the span contracts at the mixing
/// rate of the system, not at σ — and the limit is then pinned down with
/// the midpoint correction `w += σ/(1−σ) · (max Δ + min Δ)/2`, which
/// resolves the constant mode analytically. Warm starts carry `w` from
/// stage to stage.
pub fn eigen_discounted(ifs: &WeightedIFS, schedule: &DiscountSchedule) -> Result<DiscountedPair> {
    ifs.require_positive_weights()?;
    if schedule.k_max == 0 {
        return Err(Error::Precondition("discount schedule needs k_max ≥ 1".into()));
    }
    let grid = ifs.grid();
    let n = ifs.n();
    let nodes = grid.node_count();

    let ln_q: Vec<Vec<f64>> = (0..n)
        .map(|i| ifs.weight_values(i).values().iter().map(|q| q.ln()).collect())
        .collect();

    let mut w = GridFunction::constant(grid, 0.0);
    let mut stages = Vec::with_capacity(schedule.k_max as usize);

    for k in 1..=schedule.k_max {
        let sigma = schedule.sigma(k);
        let mut inner_iterations = 0;
        let mut inner_converged = false;
        let mut terms = vec![0.0; n];
        while inner_iterations < schedule.max_inner {
            inner_iterations += 1;
            let mut d_min = f64::INFINITY;
            let mut d_max = f64::NEG_INFINITY;
            let mut new = vec![0.0; nodes];
            for (j, slot) in new.iter_mut().enumerate() {
                // log-sum-exp over the branches at node j
                let mut top = f64::NEG_INFINITY;
                for (i, t) in terms.iter_mut().enumerate() {
                    *t = ln_q[i][j] + sigma * w.eval_clamped(&ifs.node_images(i)[j]);
                    top = top.max(*t);
                }
                let s: f64 = terms.iter().map(|t| (t - top).exp()).sum();
                *slot = top + s.ln();
                let d = *slot - w.values()[j];
                d_min = d_min.min(d);
                d_max = d_max.max(d);
            }
            let span = d_max - d_min;
            // The update span cannot drop below the rounding noise of
            // the (large) iterate — w grows like ln ρ/(1−σ) — so the
            // requested tolerance is floored at a few ulps of |w|.
            // Resolution past that floor lives entirely in the constant
            // mode, which the midpoint correction below fixes exactly.
            let noise_floor = 64.0 * f64::EPSILON * w.sup_norm().max(1.0);
            let finish = span <= (schedule.inner_tol / sigma).max(noise_floor);
            if finish {
                // Midpoint correction: the true fixed point lies within
                // σ·span/(2(1−σ)) of w_new + σ(d_min+d_max)/(2(1−σ)).
                let shift = sigma / (1.0 - sigma) * 0.5 * (d_min + d_max);
                for v in &mut new {
                    *v += shift;
                }
            }
            w = GridFunction::from_values(grid, new)?;
            if finish {
                inner_converged = true;
                break;
            }
        }
        let mid = 0.5 * (w.max_value() + w.min_value());
        stages.push(DiscountStage {
            k,
            sigma,
            inner_iterations,
            inner_converged,
            rho_estimate: ((1.0 - sigma) * mid).exp(),
        });
    }

    let top = w.max_value();
    let h = w.map(|v| (v - top).exp());
    let bh = apply(ifs, &h)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for k in 0..nodes {
        let r = bh.values()[k] / h.values()[k];
        lo = lo.min(r);
        hi = hi.max(r);
    }
    if !(lo > 0.0) || !hi.is_finite() {
        return Err(Error::Precondition(format!(
            "discounted scheme produced a degenerate pair (bracket [{lo}, {hi}])"
        )));
    }
    let rho = 0.5 * (lo + hi);
    let residual = (0..nodes)
        .map(|k| (bh.values()[k] - rho * h.values()[k]).abs())
        .fold(0.0, f64::max);
    let all_inner = stages.iter().all(|s| s.inner_converged);
    let pair = EigenPair {
        h,
        rho,
        rho_lower: lo,
        rho_upper: hi,
        residual,
        iterations: stages.iter().map(|s| s.inner_iterations).sum(),
        converged: all_inner && (hi - lo) <= schedule.certify_tol * lo,
        history: vec![(lo, hi)],
    };
    Ok(DiscountedPair { pair, stages })
}

/// The product g* = ψ·h (sup-normalised). For a potential system at its
/// eigenpair this is the test function that turns the variational
/// entropy bound into an equality: with pⱼ the normalised weights,
/// `pⱼ(x) · Σᵢ g*(τᵢ x) = g*(τⱼ x)` identically.
pub fn optimal_function(sys: &PotentialIFS, h: &GridFunction) -> Result<GridFunction> {
    h.grid().check_same(sys.ifs().grid(), "optimal_function")?;
    Ok(sys.psi_values().zip_with(h, |a, b| a * b)?.normalized_sup())
}
