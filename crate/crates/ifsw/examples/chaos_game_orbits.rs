//! Chaos-game sampling of invariant measures: draw a random branch at
//! every step from the place-dependent probabilities and jump. Time
//! averages along one orbit reproduce the space averages of the
//! invariant measure, and the seeded generator makes runs
//! bit-reproducible.
//!
//! Run with `cargo run -p ifsw --example chaos_game_orbits`.

use ifsw::config::RunConfig;
use ifsw::markov::{chaos_game, hutchinson_fixed_point};

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn main() -> ifsw::Result<()> {
    let cfg = RunConfig::from_path(fixture("dyadic-uniform.json"))?;
    let nifs = cfg.build()?.probability_system()?;

    // 200 000 steps, burn-in 1 000, seed 42.
    let orbit = chaos_game(&nifs, &[0.5], 200_000, 42)?;
    let empirical = orbit.empirical_measure(1_000)?;
    let m1 = empirical.integrate(|p| p[0]);
    let m2 = empirical.integrate(|p| p[0] * p[0]);
    println!("dyadic, equal weights, 2·10⁵ steps:");
    println!("  time averages  m₁ = {m1:.6}, m₂ = {m2:.6}");

    // Compare with the deterministic fixed point of the Markov operator.
    let fp = hutchinson_fixed_point(&nifs, 1e-6, 2_000)?;
    let f1 = fp.measure.integrate(|p| p[0]);
    let f2 = fp.measure.integrate(|p| p[0] * p[0]);
    println!("  fixed point    m₁ = {f1:.6}, m₂ = {f2:.6}");
    assert!((m1 - f1).abs() < 5e-3 && (m2 - f2).abs() < 5e-3);

    // Same seed ⇒ the same orbit, point for point.
    let again = chaos_game(&nifs, &[0.5], 200_000, 42)?;
    assert_eq!(orbit.points, again.points);
    assert_eq!(orbit.indices, again.indices);
    println!("  seed 42 reproduces the orbit bit-exactly");

    // A different seed gives a different orbit but the same statistics.
    let other = chaos_game(&nifs, &[0.5], 200_000, 7)?;
    assert_ne!(orbit.indices, other.indices);
    let m1_other = other.empirical_measure(1_000)?.integrate(|p| p[0]);
    println!("  seed 7: m₁ = {m1_other:.6} (same law, different path)");
    assert!((m1_other - f1).abs() < 5e-3);

    // Compaction bins the orbit to grid cells for cheap downstream use.
    let compact = empirical.compacted(nifs.grid())?;
    println!(
        "  orbit of {} points compacts to {} weighted cells (mass {:.6})",
        orbit.points.len(),
        compact.len(),
        compact.total_mass()
    );

    // The branch indices themselves are equidistributed here: the
    // probabilities are constant 1/2.
    let ones = orbit.indices.iter().filter(|&&i| i == 1).count();
    println!("  right-branch frequency {:.4}", ones as f64 / orbit.indices.len() as f64);
    Ok(())
}
