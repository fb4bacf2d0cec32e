//! The reflection family τ = {x, 1 − x} with weights from a potential ψ
//! is the sharpest possible test of the eigen solvers, in both
//! directions:
//!
//! * ψ(x) = x + 1/2 balances the family — ψ(x) + ψ(1 − x) ≡ 2 — so
//!   h ≡ 1 is an exact eigenfunction with ρ = 2, and the solver
//!   certifies it bit-exactly in two operator applications;
//! * ψ(x) = eˣ leaves ψ(x) + ψ(1 − x) non-constant, and the family has
//!   **no** positive continuous eigenfunction: the Collatz–Wielandt
//!   bracket stalls at [2√e, 1 + e] forever, and the solver reports
//!   honest non-convergence instead of a fake answer.
//!
//! Run with `cargo run -p ifsw --example balanced_and_unbalanced`.

use ifsw::expr::parse;
use ifsw::grid::Grid;
use ifsw::ifs::PotentialIFS;
use ifsw::transfer::{eigen_power, log_pressure_sequence};

fn main() -> ifsw::Result<()> {
    let grid = Grid::new(1, 513)?;
    let maps = || -> ifsw::Result<_> { Ok(vec![vec![parse("x")?], vec![parse("1 - x")?]]) };

    // Balanced: exact arithmetic all the way through.
    let balanced = PotentialIFS::from_potential(grid, maps()?, parse("x + 1/2")?)?;
    let pair = eigen_power(balanced.ifs(), 1e-12, 100)?;
    println!("balanced ψ(x) = x + 1/2:");
    println!("  ρ = {} in {} iterations, residual {:.1e}", pair.rho, pair.iterations, pair.residual);
    assert!(pair.converged);
    assert_eq!(pair.rho, 2.0); // exact: ψ(x) + ψ(1−x) = 2 in f64 at the nodes
    assert_eq!(pair.residual, 0.0);
    assert!(pair.iterations <= 2);

    // Unbalanced: the bracket freezes at the invariant interval
    // [2√e, 1 + e] ≈ [3.2974, 3.7183] and never narrows.
    let unbalanced = PotentialIFS::from_potential(grid, maps()?, parse("exp(x)")?)?;
    let pair = eigen_power(unbalanced.ifs(), 1e-10, 500)?;
    println!("\nunbalanced ψ(x) = eˣ:");
    println!("  bracket after {} iterations: [{:.12}, {:.12}]", pair.iterations, pair.rho_lower, pair.rho_upper);
    println!("  relative width {:.4} — not shrinking", pair.gap());
    assert!(!pair.converged);
    let two_sqrt_e = 2.0 * 0.5_f64.exp();
    let one_plus_e = 1.0 + std::f64::consts::E;
    assert!((pair.rho_lower - two_sqrt_e).abs() < 1e-9);
    assert!((pair.rho_upper - one_plus_e).abs() < 1e-9);
    assert!(pair.gap() > 0.1);

    // The growth averages a_N = N⁻¹ ln Bᴺ1 tell the same story: they
    // stay x-dependent instead of flattening to a constant ln ρ.
    let seq = log_pressure_sequence(unbalanced.ifs(), 20)?;
    println!("\n  a_N spread over x (constant limit would mean an eigenfunction exists):");
    for n in [1, 5, 10, 20] {
        let a = &seq.averages[n - 1];
        println!("    N = {n:>2}: a_N ∈ [{:.6}, {:.6}]", a.min_value(), a.max_value());
    }
    let last = &seq.averages[19];
    assert!(last.max_value() - last.min_value() > 0.01);

    // For contrast, the balanced family's averages are ln 2 exactly.
    let seq = log_pressure_sequence(balanced.ifs(), 10)?;
    let a10 = &seq.averages[9];
    println!("\nbalanced a₁₀ spread: {:.1e}", a10.max_value() - a10.min_value());
    assert!((a10.max_value() - std::f64::consts::LN_2).abs() < 1e-13);
    Ok(())
}
