//! Building weighted systems and validating them: self-map and
//! positivity checks, with deliberately broken systems to show the
//! diagnostics.
//!
//! Run with `cargo run -p ifsw --example validate_system`.

use ifsw::expr::parse;
use ifsw::grid::Grid;
use ifsw::ifs::{PotentialIFS, WeightedIFS};

fn main() -> ifsw::Result<()> {
    let grid = Grid::new(1, 257)?;

    // A healthy system: two dyadic contractions, weights from a potential.
    let maps = vec![vec![parse("x / 2")?], vec![parse("x / 2 + 1 / 2")?]];
    let sys = PotentialIFS::from_potential(grid, maps, parse("exp(x)")?)?;
    let report = sys.ifs().validate(7, false);
    println!("dyadic/exp(x):");
    println!("{report}");
    assert!(report.ok());

    // A map that escapes the unit interval: τ(x) = 2x leaves [0,1] for
    // x > 1/2. Validation samples nodes and random points and reports
    // where and by how much the image escapes.
    let escaping = WeightedIFS::new(
        grid,
        vec![vec![parse("2 * x")?], vec![parse("x / 2")?]],
        vec![parse("1")?, parse("1")?],
    )?;
    let report = escaping.validate(7, false);
    println!("\nescaping τ(x) = 2x:");
    println!("{report}");
    assert!(!report.ok());
    assert!(report.max_map_escape > 0.9);

    // A weight that vanishes: q(x) = x is zero at the origin. The strict
    // reading rejects it; allow_nonnegative tolerates isolated zeros
    // (with the positivity-dependent solvers then refusing to run).
    let vanishing = WeightedIFS::new(
        grid,
        vec![vec![parse("x / 2")?], vec![parse("x / 2 + 1 / 2")?]],
        vec![parse("x")?, parse("1 - x / 2")?],
    )?;
    let strict = vanishing.validate(7, false);
    println!("\nvanishing weight, strict:");
    println!("{strict}");
    assert!(!strict.ok());
    let lenient = vanishing.validate(7, true);
    println!("\nvanishing weight, allow_nonnegative:");
    println!("{lenient}");
    assert!(lenient.ok());

    // A weight whose expression is undefined inside the domain.
    let undefined = WeightedIFS::new(
        grid,
        vec![vec![parse("x / 2")?], vec![parse("x / 2 + 1 / 2")?]],
        vec![parse("1 / (x - 1/2)")?, parse("1")?],
    )?;
    let report = undefined.validate(7, false);
    println!("\nweight 1/(x − 1/2):");
    println!("{report}");
    assert!(!report.ok());
    assert!(report.domain_error_count > 0);
    Ok(())
}
