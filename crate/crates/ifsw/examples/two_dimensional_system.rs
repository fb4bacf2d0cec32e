//! A two-dimensional system on [0,1]²: dyadic contraction in x₁ mixed
//! with a reflecting contraction in x₂,
//!
//!   τ₀(x) = (x₁/2, 1 − x₂/2),   τ₁(x) = (x₁/2 + 1/2, x₂/2),
//!
//! with constant branch probabilities (0.3, 0.7). Everything from the
//! one-dimensional tour carries over: grids are row-major tensor nodes,
//! measures are particle clouds in the square.
//!
//! The invariant moments have closed forms: E[x₁] = 0.3·E/2 + 0.7·(E/2 + 1/2)
//! ⇒ E[x₁] = 0.7, and E[x₂] = 0.3·(1 − E/2) + 0.7·E/2 ⇒ E[x₂] = 0.375.
//!
//! Run with `cargo run -p ifsw --example two_dimensional_system`.

use ifsw::config::RunConfig;
use ifsw::markov::{chaos_game, hutchinson_fixed_point};
use ifsw::transfer::eigen_power;

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn main() -> ifsw::Result<()> {
    let cfg = RunConfig::from_path(fixture("reflection-2d.json"))?;
    let built = cfg.build()?;
    let report = built.ifs().validate(42, false);
    assert!(report.ok());
    println!("validated: {} maps on [0,1]², {} points checked", report.n_maps, report.points_checked);

    // The weights are probabilities, so B1 = Σᵢ qᵢ ≡ 1: the eigenvalue
    // is 1 exactly and the pressure vanishes.
    let pair = eigen_power(built.ifs(), 1e-12, 100)?;
    println!("ρ = {} ({} iteration(s), residual {:.1e})", pair.rho, pair.iterations, pair.residual);
    assert_eq!(pair.rho, 1.0);

    let nifs = built.probability_system()?;
    let fp = hutchinson_fixed_point(&nifs, 1e-6, 2_000)?;
    assert!(fp.converged);
    let m1 = fp.measure.integrate(|p| p[0]);
    let m2 = fp.measure.integrate(|p| p[1]);
    println!("\ninvariant measure ({} cells):", fp.measure.len());
    println!("  E[x₁] = {m1:.6}   (exact 0.7)");
    println!("  E[x₂] = {m2:.6}   (exact 0.375)");
    assert!((m1 - 0.7).abs() < 2e-3);
    assert!((m2 - 0.375).abs() < 2e-3);

    // Chaos game in the square, seeded and reproducible.
    let orbit = chaos_game(&nifs, &[0.5, 0.5], 100_000, 42)?;
    let emp = orbit.empirical_measure(1_000)?;
    let e1 = emp.integrate(|p| p[0]);
    let e2 = emp.integrate(|p| p[1]);
    println!("\nchaos game, 10⁵ steps:");
    println!("  E[x₁] = {e1:.6}, E[x₂] = {e2:.6}");
    assert!((e1 - 0.7).abs() < 5e-3 && (e2 - 0.375).abs() < 5e-3);

    // The x₂-reflection shows up as negative correlation between the
    // branch choice and the height: branch 0 lifts, branch 1 drops.
    let lifted = orbit
        .indices
        .iter()
        .zip(&orbit.points)
        .filter(|(&i, _)| i == 0)
        .map(|(_, p)| p[1])
        .sum::<f64>()
        / orbit.indices.iter().filter(|&&i| i == 0).count() as f64;
    println!("  mean height before a branch-0 (reflecting) step: {lifted:.4}");
    Ok(())
}
