//! A small expression language for maps, weights and potentials.
//!
//! Systems are described by closed-form expressions over the coordinates
//! `x1, …, xd` of the unit cube (for one-dimensional state spaces `x` is
//! accepted as an alias for `x1`). The language is deliberately tiny:
//!
//! * arithmetic `+ - * / ^` with the usual precedence (`^` binds tighter
//!   than unary minus, which binds tighter than `*` and `/`),
//! * the functions `sin cos exp ln abs sqrt` and the binary `min max`,
//! * decimal literals (including exponent notation) and the constant `pi`.
//!
//! Evaluation is pure: an [`Expr`] holds no state and evaluating it never
//! mutates anything, so compositions such as weight expressions built by
//! [`Expr::substitute`] can be re-evaluated exactly at arbitrary points.
//! This matters for the numerics in the rest of the crate, where the same
//! expression is evaluated both on grid nodes and along sampled orbits and
//! the two code paths must agree bit for bit.
//!
//! Printing ([`std::fmt::Display`]) emits the minimal parenthesisation that
//! reparses to the same tree: `parse(print(parse(s)))` equals `parse(s)`
//! structurally, and literals are printed with Rust's shortest round-trip
//! formatting so no precision is lost.

mod parser;

pub use parser::parse;

use crate::error::{Error, Result};

/// Binary arithmetic operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            BinOp::Add => a + b,
            BinOp::Sub => a - b,
            BinOp::Mul => a * b,
            BinOp::Div => a / b,
            BinOp::Pow => a.powf(b),
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    /// Precedence level used by both the parser and the printer.
    /// Higher binds tighter: `+ -` < `* /` < unary `-` < `^`.
    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

/// Unary functions of one argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func1 {
    Sin,
    Cos,
    Exp,
    Ln,
    Abs,
    Sqrt,
}

impl Func1 {
    fn apply(self, a: f64) -> f64 {
        match self {
            Func1::Sin => a.sin(),
            Func1::Cos => a.cos(),
            Func1::Exp => a.exp(),
            Func1::Ln => a.ln(),
            Func1::Abs => a.abs(),
            Func1::Sqrt => a.sqrt(),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Func1::Sin => "sin",
            Func1::Cos => "cos",
            Func1::Exp => "exp",
            Func1::Ln => "ln",
            Func1::Abs => "abs",
            Func1::Sqrt => "sqrt",
        }
    }
}

/// Binary functions (`min`, `max`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func2 {
    Min,
    Max,
}

impl Func2 {
    fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            Func2::Min => a.min(b),
            Func2::Max => a.max(b),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Func2::Min => "min",
            Func2::Max => "max",
        }
    }
}

/// A parsed expression tree.
///
/// Variables are stored zero-based: `Var(0)` is `x1`. Unary minus is kept
/// as an explicit node rather than folded into literals so that printing
/// reproduces the parsed structure exactly.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call1(Func1, Box<Expr>),
    Call2(Func2, Box<Expr>, Box<Expr>),
}

impl Expr {
    /// Evaluate at a point of the state space.
    ///
    /// `point` carries one coordinate per dimension. Evaluation fails if a
    /// variable exceeds the dimension of `point` or if any intermediate
    /// result is not finite (division by zero, `ln` of a nonpositive
    /// number, overflow, …); the error names the offending subexpression.
    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        match self {
            Expr::Const(c) => Ok(*c),
            Expr::Var(i) => point.get(*i).copied().ok_or(Error::Dimension {
                needed: *i + 1,
                dim: point.len(),
            }),
            Expr::Neg(inner) => Ok(-inner.eval(point)?),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(point)?, b.eval(point)?);
                let v = op.apply(a, b);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(self.domain_error(match op {
                        BinOp::Div if b == 0.0 => "division by zero",
                        BinOp::Pow => "power has no finite value here",
                        _ => "result is not finite",
                    }))
                }
            }
            Expr::Call1(f, a) => {
                let a = a.eval(point)?;
                let v = f.apply(a);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(self.domain_error(match f {
                        Func1::Ln => "logarithm of a nonpositive number",
                        Func1::Sqrt => "square root of a negative number",
                        Func1::Exp => "exponential overflow",
                        _ => "result is not finite",
                    }))
                }
            }
            Expr::Call2(f, a, b) => {
                let (a, b) = (a.eval(point)?, b.eval(point)?);
                let v = f.apply(a, b);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(self.domain_error("result is not finite"))
                }
            }
        }
    }

    fn domain_error(&self, message: &str) -> Error {
        Error::Domain {
            expr: self.to_string(),
            message: message.to_string(),
        }
    }

    /// Smallest state-space dimension on which the expression is defined,
    /// i.e. one plus the largest variable index mentioned (0 for constants).
    pub fn dimension_required(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Neg(a) | Expr::Call1(_, a) => a.dimension_required(),
            Expr::Bin(_, a, b) | Expr::Call2(_, a, b) => {
                a.dimension_required().max(b.dimension_required())
            }
        }
    }

    /// Replace every variable `x(i+1)` by `subs[i]`, producing the exact
    /// composition as an expression tree. Used to build weights `ψ ∘ τᵢ`
    /// from a potential: the composed tree evaluates through the same
    /// arithmetic as evaluating the map first and the potential after.
    pub fn substitute(&self, subs: &[Expr]) -> Result<Expr> {
        Ok(match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Var(i) => subs
                .get(*i)
                .cloned()
                .ok_or(Error::Dimension {
                    needed: *i + 1,
                    dim: subs.len(),
                })?,
            Expr::Neg(a) => Expr::Neg(Box::new(a.substitute(subs)?)),
            Expr::Bin(op, a, b) => Expr::Bin(
                *op,
                Box::new(a.substitute(subs)?),
                Box::new(b.substitute(subs)?),
            ),
            Expr::Call1(f, a) => Expr::Call1(*f, Box::new(a.substitute(subs)?)),
            Expr::Call2(f, a, b) => Expr::Call2(
                *f,
                Box::new(a.substitute(subs)?),
                Box::new(b.substitute(subs)?),
            ),
        })
    }

    /// Precedence of the node's top operator, for the printer.
    fn precedence(&self) -> u8 {
        match self {
            Expr::Const(_) | Expr::Var(_) | Expr::Call1(..) | Expr::Call2(..) => 5,
            Expr::Neg(_) => 3,
            Expr::Bin(op, ..) => op.precedence(),
        }
    }

    fn fmt_with(&self, f: &mut std::fmt::Formatter<'_>, min_prec: u8) -> std::fmt::Result {
        let needs_parens = self.precedence() < min_prec;
        if needs_parens {
            write!(f, "(")?;
        }
        match self {
            Expr::Const(c) => write!(f, "{c}")?,
            Expr::Var(i) => write!(f, "x{}", i + 1)?,
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.fmt_with(f, 4)?;
            }
            Expr::Bin(op, a, b) => {
                let p = op.precedence();
                // `+ - * /` associate to the left, `^` to the right; the
                // other side needs strictly tighter children to reparse
                // into the same shape.
                let (lp, rp) = if *op == BinOp::Pow { (5, 3) } else { (p, p + 1) };
                a.fmt_with(f, lp)?;
                write!(f, " {} ", op.symbol())?;
                b.fmt_with(f, rp)?;
            }
            Expr::Call1(func, a) => {
                write!(f, "{}(", func.name())?;
                a.fmt_with(f, 0)?;
                write!(f, ")")?;
            }
            Expr::Call2(func, a, b) => {
                write!(f, "{}(", func.name())?;
                a.fmt_with(f, 0)?;
                write!(f, ", ")?;
                b.fmt_with(f, 0)?;
                write!(f, ")")?;
            }
        }
        if needs_parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.fmt_with(f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn ev(src: &str, point: &[f64]) -> f64 {
        parse(src).unwrap().eval(point).unwrap()
    }

    #[test]
    fn arithmetic_and_precedence() {
        assert_eq!(ev("1 + 2 * 3", &[]), 7.0);
        assert_eq!(ev("(1 + 2) * 3", &[]), 9.0);
        assert_eq!(ev("2 ^ 3 ^ 2", &[]), 512.0); // right-associative
        assert_eq!(ev("-2 ^ 2", &[]), -4.0); // ^ binds tighter than unary -
        assert_eq!(ev("2 ^ -1", &[]), 0.5);
        assert_eq!(ev("10 - 4 - 3", &[]), 3.0); // left-associative
        assert_eq!(ev("16 / 4 / 2", &[]), 2.0);
        assert_eq!(ev("-x1 * 3", &[2.0]), -6.0);
        assert_eq!(ev("1.5e1 + 2.5e-1", &[]), 15.25);
    }

    #[test]
    fn variables_and_aliases() {
        // `x` is an alias for `x1`; both parse to the same tree.
        assert_eq!(parse("x").unwrap(), parse("x1").unwrap());
        assert_eq!(ev("x1 + 2 * x2", &[0.5, 0.25]), 1.0);
        // Example map and weight from the two-map reflection family.
        assert_eq!(ev("1 - x", &[0.25]), 0.75);
        assert_eq!(ev("x + 1/2", &[0.25]), 0.75);
    }

    #[test]
    fn functions() {
        assert_eq!(ev("min(3, x1)", &[1.0]), 1.0);
        assert_eq!(ev("max(3, x1)", &[1.0]), 3.0);
        assert_eq!(ev("abs(-2)", &[]), 2.0);
        assert_eq!(ev("sqrt(9)", &[]), 3.0);
        assert!((ev("sin(pi / 2)", &[]) - 1.0).abs() < 1e-15);
        assert!((ev("exp(ln(3))", &[]) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn dimension_errors() {
        let e = parse("x2").unwrap();
        assert_eq!(e.dimension_required(), 2);
        match e.eval(&[0.5]) {
            Err(Error::Dimension { needed: 2, dim: 1 }) => {}
            other => panic!("expected dimension error, got {other:?}"),
        }
    }

    #[test]
    fn domain_errors_cite_the_subexpression() {
        let err = parse("ln(x1)").unwrap().eval(&[0.0]).unwrap_err();
        match err {
            Error::Domain { expr, .. } => assert_eq!(expr, "ln(x1)"),
            other => panic!("expected domain error, got {other:?}"),
        }
        assert!(parse("1 / x1").unwrap().eval(&[0.0]).is_err());
        assert!(parse("sqrt(-x1)").unwrap().eval(&[1.0]).is_err());
        assert!(parse("exp(x1 ^ 9)").unwrap().eval(&[10.0]).is_err()); // overflow
                                                                       // 0^0 follows IEEE powf and is fine.
        assert_eq!(ev("0 ^ 0", &[]), 1.0);
    }

    #[test]
    fn substitution_composes_exactly() {
        // ψ(x) = exp(x) composed with τ(x) = x/2 + 1/2.
        let psi = parse("exp(x1)").unwrap();
        let tau = parse("x1 / 2 + 1 / 2").unwrap();
        let q = psi.substitute(std::slice::from_ref(&tau)).unwrap();
        let x = 0.37;
        let inner = tau.eval(&[x]).unwrap();
        assert_eq!(q.eval(&[x]).unwrap(), inner.exp());
    }

    #[test]
    fn print_parse_round_trip_on_sources() {
        for src in [
            "x1 + 1/2",
            "1 - x1",
            "exp(x1) * (1 - x1 ^ 2)",
            "min(sin(pi * x1), cos(pi * x2))",
            "-(x1 - 1) / (x2 + 2)",
            "2 ^ -x1 ^ 2",
            "1e-3 + x1 * 0.125",
        ] {
            let e = parse(src).unwrap();
            let printed = e.to_string();
            let reparsed = parse(&printed)
                .unwrap_or_else(|err| panic!("printed form {printed:?} failed to parse: {err}"));
            assert_eq!(reparsed, e, "round trip changed {src:?} -> {printed:?}");
        }
    }

    /// Build a random expression tree of bounded depth. Literals are kept
    /// nonnegative (the parser never produces negative literals either;
    /// negation is an explicit node).
    fn random_expr(rng: &mut StdRng, depth: usize, dim: usize) -> Expr {
        if depth == 0 || rng.gen_bool(0.3) {
            return if rng.gen_bool(0.5) {
                Expr::Const((rng.gen::<f64>() * 4.0 * 1024.0).round() / 1024.0)
            } else {
                Expr::Var(rng.gen_range(0..dim))
            };
        }
        let a = Box::new(random_expr(rng, depth - 1, dim));
        let b = Box::new(random_expr(rng, depth - 1, dim));
        match rng.gen_range(0..8) {
            0 => Expr::Neg(a),
            1 => Expr::Bin(BinOp::Add, a, b),
            2 => Expr::Bin(BinOp::Sub, a, b),
            3 => Expr::Bin(BinOp::Mul, a, b),
            4 => Expr::Bin(BinOp::Div, a, b),
            // `^` with a small constant exponent so values stay finite
            5 => Expr::Bin(
                BinOp::Pow,
                a,
                Box::new(Expr::Const(rng.gen_range(0..4) as f64)),
            ),
            6 => Expr::Call1(
                match rng.gen_range(0..4) {
                    0 => Func1::Sin,
                    1 => Func1::Cos,
                    2 => Func1::Abs,
                    _ => Func1::Exp,
                },
                a,
            ),
            _ => Expr::Call2(if rng.gen_bool(0.5) { Func2::Min } else { Func2::Max }, a, b),
        }
    }

    #[test]
    fn round_trip_and_eval_agree_on_random_trees() {
        let mut rng = StdRng::seed_from_u64(0x1f5_0001);
        for _ in 0..1000 {
            let e = random_expr(&mut rng, 6, 2);
            let printed = e.to_string();
            let reparsed = parse(&printed)
                .unwrap_or_else(|err| panic!("printed form {printed:?} failed to parse: {err}"));
            assert_eq!(reparsed, e, "round trip changed {printed:?}");

            let p = [rng.gen::<f64>(), rng.gen::<f64>()];
            // Evaluation must agree bit for bit whenever it succeeds.
            match (e.eval(&p), reparsed.eval(&p)) {
                (Ok(a), Ok(b)) => assert_eq!(a.to_bits(), b.to_bits()),
                (Err(_), Err(_)) => {}
                (a, b) => panic!("eval disagreement: {a:?} vs {b:?}"),
            }
        }
    }
}
