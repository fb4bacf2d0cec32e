//! Topological pressure P(ψ) = ln ρ(B_q) computed by three routes —
//! power iteration, the discounted scheme, and the growth averages
//! a_N = N⁻¹ ln Bᴺ1 — plus the shift invariance P(e·ψ) = P(ψ) + 1:
//! multiplying the potential by e multiplies every weight by e, hence ρ
//! by e, hence adds exactly 1 to the pressure.
//!
//! Run with `cargo run -p ifsw --example pressure_three_ways`.

use ifsw::config::RunConfig;
use ifsw::pressure::{pressure, pressure_full, PressureMethod};

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn main() -> ifsw::Result<()> {
    let cfg = RunConfig::from_path(fixture("dyadic-exp.json"))?;
    let built = cfg.build()?;
    let opts = cfg.solve_options();

    println!("dyadic maps, ψ(x) = eˣ:");
    for method in [PressureMethod::Power, PressureMethod::Discounted, PressureMethod::Sequence] {
        let r = pressure(built.ifs(), method, &opts)?;
        println!(
            "  {:<10}  P = {:.12}  ρ = {:.12}  bracket [{:.9}, {:.9}]  {} iterations",
            r.method, r.pressure, r.rho, r.rho_lower, r.rho_upper, r.iterations
        );
    }

    // The combined report carries the cross-route disagreements.
    let full = pressure_full(built.ifs(), &opts)?;
    println!("\ncross-route disagreement:");
    println!("  |ρ_power − ρ_discounted| / ρ = {:.2e}", full.eigen_disagreement);
    println!("  |ρ_power − ρ_sequence|  / ρ = {:.2e}", full.sequence_disagreement);
    assert!(full.eigen_disagreement < 1e-6);
    // Growth averages are first-order accurate: O(1/N) with N = 60.
    assert!(full.sequence_disagreement < 3.0 / opts.n_max as f64);

    // Shift invariance: replacing ψ by e·ψ multiplies every weight by e,
    // hence ρ by e, hence adds exactly 1 to the pressure.
    let shifted = RunConfig::from_json(
        r#"{
            "dimension": 1,
            "grid": 1025,
            "maps": [["x / 2"], ["x / 2 + 1 / 2"]],
            "weights": { "potential": "exp(x + 1)" }
        }"#,
    )?;
    let base = pressure(built.ifs(), PressureMethod::Power, &opts)?;
    let plus = pressure(shifted.build()?.ifs(), PressureMethod::Power, &opts)?;
    let defect = (plus.pressure - base.pressure - 1.0).abs();
    println!("\nshift test: P(e·ψ) − P(ψ) − 1 = {defect:.2e}");
    assert!(defect < 1e-8);
    Ok(())
}
