//! Topological pressure, equilibrium states and derivative probes.
//!
//! For a potential system the pressure is `P(ln ψ) = ln ρ` with ρ the
//! leading eigenvalue of the transfer operator. [`pressure`] exposes the
//! three independent routes implemented by the lower modules — power
//! iteration, the discounted fixed-point scheme, and the growth averages
//! `a_N = N⁻¹ ln Bᴺ(1)` — behind one report type, and
//! [`pressure_full`] runs all three and records their worst pairwise
//! disagreement, which is the cheapest end-to-end consistency check the
//! library has.
//!
//! [`equilibrium`] assembles the full chain
//!
//! ```text
//! eigenpair (h, ρ)  →  normalised weights pⱼ = qⱼ·(h∘τⱼ)/(ρh)
//!                   →  invariant measure μ  →  holonomic lift μ̂
//! ```
//!
//! and evaluates the thermodynamic identity `h(μ̂) + ∫ ln ψ dμ = ln ρ`:
//! the entropy is bracketed by the plug-in reading and the variational
//! bound (with the optimal candidate `g* = ψ·h` included), and the
//! residual of the identity is reported as `pressure_gap`.
//!
//! [`gateaux_probe`] tests differentiability of the pressure in a
//! direction η: it compares forward quotients `(P(ln ψ + tη) − P(ln ψ))/t`
//! against the tangent reading `∫ η dμ` at the equilibrium measure. For
//! differentiable points the discrepancy decays linearly in t.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{BinOp, Expr, Func1};
use crate::holonomic::{
    average_entropy, holonomic_lift, positive_candidates, variational_entropy_upper,
    Disintegration, EntropyBound,
};
use crate::ifs::{normalize, PotentialIFS, WeightedIFS};
use crate::kahan::KahanSum;
use crate::markov::{hutchinson_fixed_point, mass_growth_bounds, ParticleMeasure};
use crate::transfer::{
    eigen_discounted, eigen_power, log_pressure_sequence, optimal_function, DiscountSchedule,
    EigenPair,
};

/// Which eigenvalue route [`pressure`] should take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PressureMethod {
    /// Sup-normalised power iteration with Collatz–Wielandt brackets.
    Power,
    /// Discounted fixed-point scheme in the log domain.
    Discounted,
    /// Growth averages `a_N = N⁻¹ ln Bᴺ(1)(x)`; first-order accurate,
    /// with the spread of `a_N` over x reported as the bracket.
    Sequence,
}

impl PressureMethod {
    pub fn name(self) -> &'static str {
        match self {
            PressureMethod::Power => "power",
            PressureMethod::Discounted => "discounted",
            PressureMethod::Sequence => "sequence",
        }
    }
}

/// Knobs shared by the high-level drivers. The defaults match the
/// command-line tool's defaults.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Relative bracket tolerance for the eigen solvers.
    pub tol: f64,
    /// Iteration cap for power iteration.
    pub max_iter: usize,
    /// Length of the growth-average sequence.
    pub n_max: usize,
    /// Discount schedule for [`PressureMethod::Discounted`].
    pub schedule: DiscountSchedule,
    /// Stopping tolerance for measure iterations (dictionary moments and
    /// eigenvalue stabilisation — coarser than `tol` because binning
    /// limits measure resolution).
    pub measure_tol: f64,
    /// Iteration cap for measure iterations.
    pub measure_max_iter: usize,
    /// Default chaos-game length.
    pub particles: usize,
    /// Default random seed.
    pub seed: u64,
    /// Chaos-game burn-in.
    pub burn_in: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-8,
            max_iter: 10_000,
            n_max: 60,
            schedule: DiscountSchedule::default(),
            measure_tol: 1e-4,
            measure_max_iter: 2_000,
            particles: 1_000_000,
            seed: 42,
            burn_in: 1_000,
        }
    }
}

/// Everything a pressure computation reports. Serialises to the JSON
/// emitted by the command-line tool.
#[derive(Debug, Clone, Serialize)]
pub struct PressureReport {
    pub method: &'static str,
    pub dimension: usize,
    pub n_maps: usize,
    pub grid_nodes_per_axis: usize,
    /// Leading eigenvalue estimate.
    pub rho: f64,
    /// `ln ρ` — the pressure of ln ψ.
    pub pressure: f64,
    pub rho_lower: f64,
    pub rho_upper: f64,
    /// `sup |B h − ρ h|` for the eigen methods; bracket width for the
    /// sequence method.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Range of the local mass growth `Σᵢ qᵢ` — ρ always lies inside.
    pub growth_lower: f64,
    pub growth_upper: f64,
    pub warnings: Vec<String>,
}

fn report_from_pair(
    ifs: &WeightedIFS,
    method: PressureMethod,
    pair: &EigenPair,
    mut warnings: Vec<String>,
) -> Result<PressureReport> {
    let (growth_lower, growth_upper) = mass_growth_bounds(ifs)?;
    if !pair.converged {
        warnings.push(format!(
            "{} did not certify the eigenvalue: bracket [{:.12}, {:.12}] after {} iterations",
            method.name(),
            pair.rho_lower,
            pair.rho_upper,
            pair.iterations
        ));
    }
    if pair.rho < growth_lower - 1e-9 || pair.rho > growth_upper + 1e-9 {
        warnings.push(format!(
            "eigenvalue {:.12} escapes the growth bounds [{:.12}, {:.12}]",
            pair.rho, growth_lower, growth_upper
        ));
    }
    Ok(PressureReport {
        method: method.name(),
        dimension: ifs.grid().dim(),
        n_maps: ifs.n(),
        grid_nodes_per_axis: ifs.grid().nodes_per_axis(),
        rho: pair.rho,
        pressure: pair.rho.ln(),
        rho_lower: pair.rho_lower,
        rho_upper: pair.rho_upper,
        residual: pair.residual,
        iterations: pair.iterations,
        converged: pair.converged,
        growth_lower,
        growth_upper,
        warnings,
    })
}

/// Compute the pressure by the chosen route. Works for any system with
/// strictly positive weights; a potential is not required.
pub fn pressure(
    ifs: &WeightedIFS,
    method: PressureMethod,
    opts: &SolveOptions,
) -> Result<PressureReport> {
    match method {
        PressureMethod::Power => {
            let pair = eigen_power(ifs, opts.tol, opts.max_iter)?;
            report_from_pair(ifs, method, &pair, Vec::new())
        }
        PressureMethod::Discounted => {
            let out = eigen_discounted(ifs, &opts.schedule)?;
            let mut warnings = Vec::new();
            for s in &out.stages {
                if !s.inner_converged {
                    warnings.push(format!(
                        "discount stage k = {} hit the inner iteration cap ({})",
                        s.k, s.inner_iterations
                    ));
                }
            }
            report_from_pair(ifs, method, &out.pair, warnings)
        }
        PressureMethod::Sequence => {
            let seq = log_pressure_sequence(ifs, opts.n_max)?;
            let last = seq.averages.last().ok_or_else(|| {
                Error::Precondition("sequence method needs n_max ≥ 1".into())
            })?;
            let lo = last.min_value();
            let hi = last.max_value();
            let mid = 0.5 * (lo + hi);
            let (growth_lower, growth_upper) = mass_growth_bounds(ifs)?;
            Ok(PressureReport {
                method: method.name(),
                dimension: ifs.grid().dim(),
                n_maps: ifs.n(),
                grid_nodes_per_axis: ifs.grid().nodes_per_axis(),
                rho: mid.exp(),
                pressure: mid,
                rho_lower: lo.exp(),
                rho_upper: hi.exp(),
                residual: hi.exp() - lo.exp(),
                iterations: opts.n_max,
                converged: true,
                growth_lower,
                growth_upper,
                warnings: vec![format!(
                    "growth averages converge at first order: expect O(1/{}) error",
                    opts.n_max
                )],
            })
        }
    }
}

/// All three pressure routes side by side.
#[derive(Debug, Clone, Serialize)]
pub struct FullPressureReport {
    pub power: PressureReport,
    pub discounted: PressureReport,
    pub sequence: PressureReport,
    /// Worst pairwise |Δ pressure| between the two eigen methods.
    pub eigen_disagreement: f64,
    /// |sequence − power| on the pressure scale.
    pub sequence_disagreement: f64,
}

/// Run power, discounted and sequence estimates and compare them.
pub fn pressure_full(ifs: &WeightedIFS, opts: &SolveOptions) -> Result<FullPressureReport> {
    let power = pressure(ifs, PressureMethod::Power, opts)?;
    let discounted = pressure(ifs, PressureMethod::Discounted, opts)?;
    let sequence = pressure(ifs, PressureMethod::Sequence, opts)?;
    let eigen_disagreement = (power.pressure - discounted.pressure).abs();
    let sequence_disagreement = (sequence.pressure - power.pressure).abs();
    Ok(FullPressureReport { power, discounted, sequence, eigen_disagreement, sequence_disagreement })
}

/// The assembled equilibrium state of a potential system.
#[derive(Debug, Clone)]
pub struct EquilibriumState {
    /// Eigenpair the construction is based on.
    pub pair: EigenPair,
    /// `max |Σⱼ pⱼ − 1|` of the normalised weights at the nodes.
    pub normalized_sum_deviation: f64,
    /// Invariant measure of the normalised system (grid resolution).
    pub measure: ParticleMeasure,
    /// Its holonomic lift, disintegrated over the grid cells.
    pub disintegration: Disintegration,
    /// Plug-in entropy of the lift (lower reading).
    pub entropy_lower: f64,
    /// Variational bound (upper reading) with the candidate list used.
    pub entropy_upper: EntropyBound,
    /// Index in the candidate list of `g* = ψ·h`.
    pub optimal_candidate: usize,
    /// `∫ ln ψ dμ`, evaluated with exact potential arithmetic.
    pub energy: f64,
    /// `|entropy_lower + energy − ln ρ|` — the thermodynamic identity
    /// residual.
    pub pressure_gap: f64,
    pub measure_iterations: usize,
    /// True when the eigen solve and the measure solve both converged.
    pub converged: bool,
    pub warnings: Vec<String>,
}

/// Build the equilibrium state: solve the eigenproblem, normalise,
/// find the invariant measure, lift it and evaluate the entropy
/// readings and the pressure identity.
///
/// Non-convergence anywhere in the chain is carried through in
/// `converged`/`warnings` rather than raised: downstream numbers are
/// still reported so the failure can be inspected.
pub fn equilibrium(sys: &PotentialIFS, opts: &SolveOptions) -> Result<EquilibriumState> {
    let mut warnings = Vec::new();
    let pair = eigen_power(sys.ifs(), opts.tol, opts.max_iter)?;
    if !pair.converged {
        warnings.push(format!(
            "eigen solve unconverged after {} iterations (bracket [{:.9}, {:.9}])",
            pair.iterations, pair.rho_lower, pair.rho_upper
        ));
    }
    let nifs = normalize(sys.ifs(), &pair.h, pair.rho)?;
    if let Some(w) = nifs.warning() {
        warnings.push(w.to_string());
    }
    let fp = hutchinson_fixed_point(&nifs, opts.measure_tol, opts.measure_max_iter)?;
    if !fp.converged {
        warnings.push(format!(
            "invariant-measure iteration unconverged after {} sweeps (residual {:.3e})",
            fp.iterations, fp.residual
        ));
    }
    let lift = holonomic_lift(&nifs, &fp.measure)?;
    let disintegration = lift.disintegrate(sys.ifs().grid())?;
    let entropy_lower = average_entropy(&disintegration);

    let mut candidates = positive_candidates(sys.ifs().grid());
    candidates.push(optimal_function(sys, &pair.h)?);
    let optimal_candidate = candidates.len() - 1;
    let entropy_upper = variational_entropy_upper(&nifs, &disintegration, &candidates)?;

    let mut acc = KahanSum::new();
    for (p, m) in fp.measure.positions().iter().zip(fp.measure.masses()) {
        acc.add(m * sys.psi_at(p)?.ln());
    }
    let energy = acc.value();
    let pressure_gap = (entropy_lower + energy - pair.rho.ln()).abs();

    Ok(EquilibriumState {
        normalized_sum_deviation: nifs.sum_deviation(),
        measure: fp.measure,
        disintegration,
        entropy_lower,
        entropy_upper,
        optimal_candidate,
        energy,
        pressure_gap,
        measure_iterations: fp.iterations,
        converged: pair.converged && fp.converged,
        warnings,
        pair,
    })
}

/// One forward-difference row of a derivative probe.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeRow {
    pub t: f64,
    /// `P(ln ψ + tη)`.
    pub pressure: f64,
    /// Forward quotient `(P(ln ψ + tη) − P(ln ψ))/t`.
    pub quotient: f64,
    /// `|quotient − ∫η dμ|`.
    pub discrepancy: f64,
    pub converged: bool,
}

/// Forward-difference test of pressure differentiability in direction η.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeTable {
    /// The direction, printed back from its expression tree.
    pub eta: String,
    pub base_pressure: f64,
    /// Tangent reading `∫ η dμ` at the base equilibrium measure.
    pub directional_value: f64,
    pub rows: Vec<ProbeRow>,
    pub warnings: Vec<String>,
}

impl ProbeTable {
    pub const CSV_HEADER: &'static str = "eta_id,t,quotient,subgradient_value,abs_diff";

    /// Data rows only — lets several probes share one file.
    pub fn write_csv_rows<W: std::io::Write>(&self, eta_id: &str, out: &mut W) -> Result<()> {
        for row in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{}",
                eta_id, row.t, row.quotient, self.directional_value, row.discrepancy
            )?;
        }
        Ok(())
    }

    /// Header plus rows.
    pub fn write_csv<W: std::io::Write>(&self, eta_id: &str, out: &mut W) -> Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        self.write_csv_rows(eta_id, out)
    }
}

/// Probe the Gâteaux derivative of the pressure at ln ψ in direction η:
/// for each step t > 0 the potential is perturbed multiplicatively,
/// `ψ_t = exp(ln ψ + t·η)`, its pressure recomputed from scratch, and
/// the forward quotient compared with `∫ η dμ` at the unperturbed
/// equilibrium measure.
pub fn gateaux_probe(
    sys: &PotentialIFS,
    eta: &Expr,
    steps: &[f64],
    opts: &SolveOptions,
) -> Result<ProbeTable> {
    if steps.is_empty() {
        return Err(Error::Precondition("derivative probe needs at least one step".into()));
    }
    if let Some(t) = steps.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
        return Err(Error::Precondition(format!(
            "derivative probe steps must be positive and finite, got {t}"
        )));
    }
    let needed = eta.dimension_required();
    let dim = sys.ifs().grid().dim();
    if needed > dim {
        return Err(Error::Dimension { needed, dim });
    }

    let eq = equilibrium(sys, opts)?;
    let mut warnings = eq.warnings.clone();
    let base_pressure = eq.pair.rho.ln();
    let mut acc = KahanSum::new();
    for (p, m) in eq.measure.positions().iter().zip(eq.measure.masses()) {
        acc.add(m * eta.eval(&p[..dim])?);
    }
    let directional_value = acc.value();

    let mut rows = Vec::with_capacity(steps.len());
    for &t in steps {
        let perturbed = Expr::Call1(
            Func1::Exp,
            Box::new(Expr::Bin(
                BinOp::Add,
                Box::new(Expr::Call1(Func1::Ln, Box::new(sys.psi().clone()))),
                Box::new(Expr::Bin(
                    BinOp::Mul,
                    Box::new(Expr::Const(t)),
                    Box::new(eta.clone()),
                )),
            )),
        );
        let sys_t =
            PotentialIFS::from_potential(sys.ifs().grid(), sys.ifs().maps().to_vec(), perturbed)?;
        let pair_t = eigen_power(sys_t.ifs(), opts.tol, opts.max_iter)?;
        if !pair_t.converged {
            warnings.push(format!("perturbed solve at t = {t} did not converge"));
        }
        let p_t = pair_t.rho.ln();
        let quotient = (p_t - base_pressure) / t;
        rows.push(ProbeRow {
            t,
            pressure: p_t,
            quotient,
            discrepancy: (quotient - directional_value).abs(),
            converged: pair_t.converged,
        });
    }
    Ok(ProbeTable {
        eta: eta.to_string(),
        base_pressure,
        directional_value,
        rows,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::grid::Grid;

    fn dyadic_exp(m: usize) -> PotentialIFS {
        let g = Grid::new(1, m).unwrap();
        PotentialIFS::from_potential(
            g,
            vec![vec![parse("x / 2").unwrap()], vec![parse("x / 2 + 1 / 2").unwrap()]],
            parse("exp(x)").unwrap(),
        )
        .unwrap()
    }

    fn balanced(m: usize) -> PotentialIFS {
        let g = Grid::new(1, m).unwrap();
        PotentialIFS::from_potential(
            g,
            vec![vec![parse("x").unwrap()], vec![parse("1 - x").unwrap()]],
            parse("x + 1 / 2").unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn balanced_pressure_is_ln_two_by_every_route() {
        let sys = balanced(129);
        let opts = SolveOptions::default();
        let full = pressure_full(sys.ifs(), &opts).unwrap();
        let ln2 = std::f64::consts::LN_2;
        assert!(full.power.converged && full.discounted.converged);
        assert!((full.power.pressure - ln2).abs() < 1e-14);
        assert!((full.discounted.pressure - ln2).abs() < 1e-12);
        assert!((full.sequence.pressure - ln2).abs() < 1e-13);
        assert!(full.eigen_disagreement < 1e-12);
        assert!(full.sequence_disagreement < 1e-13);
        // growth bounds collapse to the point {2}
        assert_eq!(full.power.growth_lower, 2.0);
        assert_eq!(full.power.growth_upper, 2.0);
    }

    #[test]
    fn three_routes_agree_for_the_dyadic_exponential_family() {
        let sys = dyadic_exp(257);
        let mut opts = SolveOptions::default();
        opts.tol = 1e-11;
        let full = pressure_full(sys.ifs(), &opts).unwrap();
        assert!(full.power.converged && full.discounted.converged);
        assert!(
            full.eigen_disagreement < 1e-6,
            "power vs discounted: {:.3e}",
            full.eigen_disagreement
        );
        // first-order route: O(1/n_max) accuracy
        assert!(
            full.sequence_disagreement < 3.0 / opts.n_max as f64,
            "sequence off by {:.3e}",
            full.sequence_disagreement
        );
        assert!(full.power.growth_lower <= full.power.rho);
        assert!(full.power.rho <= full.power.growth_upper);
    }

    #[test]
    fn equilibrium_satisfies_the_pressure_identity() {
        let sys = dyadic_exp(257);
        let opts = SolveOptions { measure_tol: 1e-6, ..SolveOptions::default() };
        let eq = equilibrium(&sys, &opts).unwrap();
        assert!(eq.converged, "warnings: {:?}", eq.warnings);
        assert!(eq.normalized_sum_deviation < 1e-6);
        // h(μ̂) + ∫ln ψ dμ = ln ρ up to grid resolution
        assert!(eq.pressure_gap < 1e-3, "identity residual {:.3e}", eq.pressure_gap);
        // the entropy readings bracket (small numerical slack)
        assert!(
            eq.entropy_upper.value >= eq.entropy_lower - 1e-6,
            "sandwich violated: {} vs {}",
            eq.entropy_lower,
            eq.entropy_upper.value
        );
        // and g* = ψ·h makes the bound tight
        let at_optimal = eq.entropy_upper.per_candidate[eq.optimal_candidate];
        assert!(
            (at_optimal - eq.entropy_lower).abs() < 1e-3,
            "optimal candidate gap {:.3e}",
            (at_optimal - eq.entropy_lower).abs()
        );
        // total mass of the invariant measure
        assert!((eq.measure.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pressure_shifts_by_one_when_the_potential_is_scaled_by_e() {
        // P(ln(e·ψ)) = P(ln ψ + 1) = P(ln ψ) + 1, and the scaling flows
        // through the solver exactly up to rounding.
        let opts = SolveOptions::default();
        for sys in [dyadic_exp(129), balanced(129)] {
            let scaled = PotentialIFS::from_potential(
                sys.ifs().grid(),
                sys.ifs().maps().to_vec(),
                Expr::Bin(
                    BinOp::Mul,
                    Box::new(Expr::Const(std::f64::consts::E)),
                    Box::new(sys.psi().clone()),
                ),
            )
            .unwrap();
            let p0 = pressure(sys.ifs(), PressureMethod::Power, &opts).unwrap();
            let p1 = pressure(scaled.ifs(), PressureMethod::Power, &opts).unwrap();
            assert!(p0.converged && p1.converged);
            assert!(
                (p1.pressure - p0.pressure - 1.0).abs() < 1e-8,
                "shift defect {:.3e}",
                (p1.pressure - p0.pressure - 1.0).abs()
            );
        }
    }

    #[test]
    fn derivative_probe_quotients_approach_the_tangent_reading() {
        let sys = dyadic_exp(129);
        let opts = SolveOptions { tol: 1e-11, measure_tol: 1e-6, ..SolveOptions::default() };
        let eta = parse("x").unwrap();
        let table = gateaux_probe(&sys, &eta, &[1e-2, 1e-3], &opts).unwrap();
        assert_eq!(table.rows.len(), 2);
        assert!(table.rows.iter().all(|r| r.converged));
        // smaller step, smaller discrepancy (linear decay until the
        // solver noise floor, which is far below these steps)
        assert!(
            table.rows[1].discrepancy <= table.rows[0].discrepancy,
            "discrepancies: {:?} then {:?}",
            table.rows[0].discrepancy,
            table.rows[1].discrepancy
        );
        assert!(table.rows[1].discrepancy < 1e-2);
        // the tangent reading is a plausible first moment
        assert!(table.directional_value > 0.0 && table.directional_value < 1.0);
    }

    #[test]
    fn probe_rejects_bad_steps_and_wrong_dimensions() {
        let sys = dyadic_exp(17);
        let opts = SolveOptions::default();
        let eta = parse("x").unwrap();
        assert!(gateaux_probe(&sys, &eta, &[], &opts).is_err());
        assert!(gateaux_probe(&sys, &eta, &[0.0], &opts).is_err());
        assert!(gateaux_probe(&sys, &eta, &[-1e-3], &opts).is_err());
        let eta2 = parse("x2").unwrap();
        assert!(gateaux_probe(&sys, &eta2, &[1e-2], &opts).is_err());
    }

    #[test]
    fn reports_serialize_to_json() {
        let sys = balanced(33);
        let report = pressure(sys.ifs(), PressureMethod::Power, &SolveOptions::default()).unwrap();
        let text = serde_json::to_string_pretty(&report).unwrap();
        assert!(text.contains("\"method\": \"power\""));
        assert!(text.contains("\"pressure\""));
        assert!(text.contains("\"converged\": true"));
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["grid_nodes_per_axis"], 33);
    }
}
