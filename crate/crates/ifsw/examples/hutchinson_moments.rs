//! Invariant measures of probability systems: iterate the
//! mass-preserving Markov operator to its fixed point and check moments
//! against closed forms.
//!
//! For the dyadic maps {x/2, x/2 + 1/2} with pᵢ ≡ 1/2 the invariant
//! measure is Lebesgue: moments 1/2, 1/3, 1/4. For the Cantor maps
//! {x/3, x/3 + 2/3} with pᵢ ≡ 1/2 it is the Cantor measure, whose mean
//! is 1/2 by symmetry (m₁ = ½·(m₁/3) + ½·(m₁/3 + 2/3) ⇒ m₁ = 1/2).
//!
//! Run with `cargo run -p ifsw --example hutchinson_moments`.

use ifsw::config::RunConfig;
use ifsw::markov::hutchinson_fixed_point;

fn moments(mu: &ifsw::markov::ParticleMeasure) -> (f64, f64, f64) {
    (
        mu.integrate(|p| p[0]),
        mu.integrate(|p| p[0] * p[0]),
        mu.integrate(|p| p[0] * p[0] * p[0]),
    )
}

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn main() -> ifsw::Result<()> {
    // Configs are the same JSON the command-line tool takes.
    let dyadic = RunConfig::from_path(fixture("dyadic-uniform.json"))?;
    let nifs = dyadic.build()?.probability_system()?;
    let fp = hutchinson_fixed_point(&nifs, 1e-6, 2_000)?;
    assert!(fp.converged);
    let (m1, m2, m3) = moments(&fp.measure);
    println!("dyadic, equal weights (invariant measure = Lebesgue):");
    println!("  m₁ = {m1:.9}   (exact 1/2)");
    println!("  m₂ = {m2:.9}   (exact 1/3)");
    println!("  m₃ = {m3:.9}   (exact 1/4)");
    assert!((m1 - 0.5).abs() < 1e-3);
    assert!((m2 - 1.0 / 3.0).abs() < 1e-3);
    assert!((m3 - 0.25).abs() < 1e-3);

    let cantor = RunConfig::from_path(fixture("cantor.json"))?;
    let nifs = cantor.build()?.probability_system()?;
    let fp = hutchinson_fixed_point(&nifs, 1e-6, 2_000)?;
    assert!(fp.converged);
    let (m1, m2, _) = moments(&fp.measure);
    println!("\nCantor maps, equal weights (invariant measure = Cantor measure):");
    println!("  m₁ = {m1:.9}   (exact 1/2 by symmetry)");
    println!("  m₂ = {m2:.9}   (exact 3/8: m₂ = ½(m₂/9) + ½(m₂/9 + 4m₁/9 + 4/9))");
    assert!((m1 - 0.5).abs() < 1e-3);
    assert!((m2 - 0.375).abs() < 1e-3);

    // The fixed point reproduces itself under one more sweep.
    println!("\nresidual (worst dictionary-moment change in the last sweep): {:.2e}", fp.residual);
    println!("iterations: {}", fp.iterations);
    Ok(())
}
