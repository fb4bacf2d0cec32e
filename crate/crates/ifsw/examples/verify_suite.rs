//! The cross-module identity suite: every headline identity checked in
//! one run, first the built-in reference systems, then a user config.
//!
//! `run_suite(quick)` exercises exact eigendata of the balanced
//! reflection family, word-sum agreement, honest non-convergence of the
//! unbalanced family, solver cross-agreement, probability normalisation,
//! orbit telescoping, invariant moments, the entropy sandwich and
//! pressure shift-invariance. `run_config_suite` runs the
//! config-independent subset against an arbitrary system.
//!
//! The `ifsw verify` subcommand wraps exactly these two entry points.
//!
//! Run with `cargo run -p ifsw --example verify_suite`.

use ifsw::config::RunConfig;
use ifsw::verify::{run_config_suite, run_suite};

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn main() -> ifsw::Result<()> {
    println!("reference systems (quick mode):");
    let results = run_suite(true);
    for r in &results {
        println!("  {r}");
    }
    assert!(results.iter().all(|r| r.passed()));

    let cfg = RunConfig::from_path(fixture("dyadic-exp.json"))?;
    let built = cfg.build()?;
    let mut opts = cfg.solve_options();
    opts.measure_tol = 1e-6;

    println!("\nconfigured system (dyadic maps, ψ = eˣ):");
    let results = run_config_suite(&built, &opts);
    for r in &results {
        println!("  {r}");
    }
    assert!(results.iter().all(|r| r.passed()));
    println!("\nall checks passed");
    Ok(())
}
