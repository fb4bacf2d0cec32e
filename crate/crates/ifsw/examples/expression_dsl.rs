//! Tour of the expression language used for maps, weights and potentials.
//!
//! Run with `cargo run -p ifsw --example expression_dsl`.

use ifsw::expr::parse;

fn main() -> ifsw::Result<()> {
    // Parsing and evaluation. Variables are x1, …, xd; in one dimension
    // `x` is an alias for `x1`.
    let psi = parse("exp(x) * (1 + sin(pi * x) / 2)")?;
    println!("ψ          = {psi}");
    println!("ψ(0)       = {}", psi.eval(&[0.0])?);
    println!("ψ(1/2)     = {}", psi.eval(&[0.5])?);

    // Operator precedence: ^ binds tighter than unary minus, which binds
    // tighter than * and /.
    assert_eq!(parse("-2 ^ 2")?.eval(&[])?, -4.0);
    assert_eq!(parse("2 ^ -1")?.eval(&[])?, 0.5);
    assert_eq!(parse("1 - x / 2")?.eval(&[1.0])?, 0.5);

    // Exact composition: substitute builds the tree of ψ ∘ τ, so the
    // composed expression evaluates through the same arithmetic as
    // evaluating τ first and ψ after. This is how potential-induced
    // weights qᵢ = ψ ∘ τᵢ are constructed.
    let tau = parse("x / 2 + 1 / 2")?;
    let q = psi.substitute(std::slice::from_ref(&tau))?;
    println!("ψ ∘ τ      = {q}");
    let x = 0.3125;
    let direct = psi.eval(&[tau.eval(&[x])?])?;
    let composed = q.eval(&[x])?;
    assert_eq!(direct, composed);
    println!("agreement  = exact at x = {x}");

    // Printing round-trips: parse(to_string(e)) evaluates identically.
    let printed = q.to_string();
    let reparsed = parse(&printed)?;
    assert_eq!(reparsed.eval(&[x])?, composed);

    // Domain errors carry the offending expression instead of yielding
    // NaN, so a bad weight fails loudly during validation.
    let bad = parse("ln(x - 1)")?;
    match bad.eval(&[0.5]) {
        Err(e) => println!("ln(x - 1) at x = 1/2 → error: {e}"),
        Ok(v) => unreachable!("expected a domain error, got {v}"),
    }

    // Two-dimensional expressions report the dimension they need.
    let g = parse("min(sin(pi * x1), x2 ^ 2)")?;
    println!("dimension required by {g}: {}", g.dimension_required());
    Ok(())
}
