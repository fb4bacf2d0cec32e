//! The word-sum identity: the N-th power of the transfer operator applied
//! to 1 equals a sum over all n^N branch words,
//!
//!   Bᴺ(1)(x) = Σ_{i₁…i_N} q_{i₁}(x) · q_{i₂}(τ_{i₁}x) ⋯ q_{i_N}(τ_{i_{N−1}} ⋯ τ_{i₁}x),
//!
//! which gives an exact, interpolation-free oracle for the grid-iterated
//! operator.
//!
//! Run with `cargo run -p ifsw --example word_sum_identity`.

use ifsw::expr::parse;
use ifsw::grid::Grid;
use ifsw::ifs::PotentialIFS;
use ifsw::transfer::{power_apply, word_sum_oracle};

fn main() -> ifsw::Result<()> {
    // m − 1 = 4096 keeps the probe points below on grid nodes, so the
    // comparison isolates operator error from interpolation error.
    let grid = Grid::new(1, 4097)?;
    let maps = vec![vec![parse("x / 2")?], vec![parse("x / 2 + 1 / 2")?]];
    let sys = PotentialIFS::from_potential(grid, maps, parse("exp(x)")?)?;
    let ifs = sys.ifs();

    let n_max = 10; // 2¹⁰ = 1024 words at the deepest level — cheap for the oracle
    let iterates = power_apply(ifs, &ifsw::grid::GridFunction::constant(grid, 1.0), n_max)?;

    println!("comparing grid iteration against the exact word sum, N = 1..={n_max}:");
    println!("{:>4}  {:>22}  {:>22}  {:>10}", "N", "grid Bᴺ1(1/8)", "word sum", "worst rel");
    let probes = [0.0, 0.125, 0.25, 0.5, 1.0];
    let mut worst = 0.0_f64;
    for n in 1..=n_max {
        let bn1 = &iterates[n];
        let mut worst_n = 0.0_f64;
        for x in probes {
            let oracle = word_sum_oracle(ifs, &[x], n)?;
            let rel = (bn1.eval(&[x])? - oracle).abs() / oracle;
            worst_n = worst_n.max(rel);
        }
        worst = worst.max(worst_n);
        println!(
            "{n:>4}  {:>22.15e}  {:>22.15e}  {worst_n:>10.2e}",
            bn1.eval(&[0.125])?,
            word_sum_oracle(ifs, &[0.125], n)?
        );
    }
    assert!(worst < 1e-9, "relative error {worst:e} above 1e-9");
    println!("worst relative error over all N and probes: {worst:.2e} — within 1e-9");

    // The oracle enumerates n^N words, so the budget is guarded: at
    // N = 40 the request would cost 2⁴⁰ ≈ 10¹² evaluations.
    match word_sum_oracle(ifs, &[0.5], 40) {
        Err(e) => println!("N = 40 refused: {e}"),
        Ok(v) => unreachable!("expected a budget error, got {v}"),
    }
    Ok(())
}
