//! Holonomic measures: probability measures μ̂ on pairs (point, branch)
//! whose discrete differentials integrate to zero,
//!
//!   ∫ dₓf dμ̂ = ∫ [f(τᵢ(x)) − f(x)] dμ̂(x, i) = 0  for all test f.
//!
//! They generalise invariant measures to systems with several maps.
//! Empirical measures of chaos-game orbits are asymptotically holonomic:
//! the integral telescopes to (f(x_N) − f(x₀))/N exactly, so the defect
//! decays like 2·sup|f|/N.
//!
//! Run with `cargo run -p ifsw --example holonomic_measures`.

use ifsw::config::RunConfig;
use ifsw::holonomic::{differential_integral, empirical_holonomic, holonomic_lift, holonomy_defect};
use ifsw::ifs::normalize;
use ifsw::markov::{chaos_game, hutchinson_fixed_point};
use ifsw::transfer::eigen_power;

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn main() -> ifsw::Result<()> {
    // Normalise the dyadic/exp system through its eigenpair: the weights
    // pᵢ = qᵢ·(h∘τᵢ)/(ρ·h) sum to one, giving a random dynamical system.
    let cfg = RunConfig::from_path(fixture("dyadic-exp.json"))?;
    let built = cfg.build()?;
    let pair = eigen_power(built.ifs(), 1e-10, 10_000)?;
    assert!(pair.converged);
    let nifs = normalize(built.ifs(), &pair.h, pair.rho)?;
    println!("normalised system: max|Σᵢ pᵢ − 1| = {:.2e}", nifs.sum_deviation());
    // tracks the eigen tolerance: h is only known to the bracket width
    assert!(nifs.sum_deviation() < 1e-6);

    // Empirical pair measure of an orbit: the holonomy defect is pure
    // telescoping, |f(x_N) − f(x₀)|/N ≤ 2/N for dictionary functions.
    for n_steps in [1_000usize, 10_000, 100_000] {
        let orbit = chaos_game(&nifs, &[0.25], n_steps, 42)?;
        let pairs = empirical_holonomic(&orbit, 0)?;
        let defect = holonomy_defect(&nifs, &pairs)?;
        println!("  orbit N = {n_steps:>6}: holonomy defect = {defect:.3e} (bound 2/N = {:.3e})", 2.0 / n_steps as f64);
        assert!(defect <= 2.0 / n_steps as f64 + 1e-12);
    }

    // The telescoping is exact, not approximate: recomputing the branch
    // images reproduces the stored orbit bit for bit, so ∫ dₓf dμ̂ equals
    // (f(x_N) − f(x₀))/N to the last ulp of the compensated sum.
    let orbit = chaos_game(&nifs, &[0.25], 10_000, 7)?;
    let pairs = empirical_holonomic(&orbit, 0)?;
    let f = ifsw::grid::GridFunction::from_fn(nifs.grid(), |p| Ok(p[0] * p[0]))?;
    let integral = differential_integral(&nifs, &f, &pairs)?;
    // both sides must read the same interpolated f — the stored node
    // values, not the formula — for the cancellation to be exact
    let telescoped =
        (f.eval(&orbit.final_point()[..1])? - f.eval(&orbit.points[0][..1])?) / 10_000.0;
    println!("\n∫ dₓ(x²) dμ̂ = {integral:.15e}");
    println!("(f(x_N)−f(x₀))/N = {telescoped:.15e}");
    assert!((integral - telescoped).abs() < 1e-12);

    // Lifting the invariant measure with the branch probabilities gives
    // the stationary holonomic measure; its defect vanishes to measure
    // resolution, not like 1/N.
    let fp = hutchinson_fixed_point(&nifs, 1e-6, 2_000)?;
    let lift = holonomic_lift(&nifs, &fp.measure)?;
    println!("\nstationary lift: {} atoms, defect = {:.3e}", lift.len(), holonomy_defect(&nifs, &lift)?);

    // Disintegration recovers cell masses and conditional branch laws.
    let d = lift.disintegrate(nifs.grid())?;
    let c = &d.cells[d.cells.len() / 2];
    println!(
        "mid-domain cell at x = {:.4}: mass {:.3e}, conditionals ({:.4}, {:.4})",
        c.centroid[0], c.mass, c.conditionals[0], c.conditionals[1]
    );
    assert!((c.conditionals.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    Ok(())
}
