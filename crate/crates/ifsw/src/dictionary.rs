//! The standard dictionary of test functions.
//!
//! Weak convergence of measures and duality residuals are checked against
//! a small fixed family of smooth functions: `1, x1, x1², sin(πx1),
//! cos(πx1)`, plus the mirrored `x2` entries in dimension two. The
//! functions are evaluated in closed form (never interpolated), so a
//! residual like `|∫ B_q f dν − ρ ∫ f dν|` probes the measure itself and
//! not the grid. Every entry has sup-norm 1 on the cube, which makes the
//! normalised residuals directly comparable.

/// A named test function with its exact sup-norm over [0,1]^d.
#[derive(Clone, Copy)]
pub struct TestFunction {
    pub name: &'static str,
    pub f: fn(&[f64]) -> f64,
    pub sup_norm: f64,
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TestFunction({})", self.name)
    }
}

fn one(_: &[f64]) -> f64 {
    1.0
}
fn x1(p: &[f64]) -> f64 {
    p[0]
}
fn x1_sq(p: &[f64]) -> f64 {
    p[0] * p[0]
}
fn sin_pi_x1(p: &[f64]) -> f64 {
    (std::f64::consts::PI * p[0]).sin()
}
fn cos_pi_x1(p: &[f64]) -> f64 {
    (std::f64::consts::PI * p[0]).cos()
}
fn x2(p: &[f64]) -> f64 {
    p[1]
}
fn x2_sq(p: &[f64]) -> f64 {
    p[1] * p[1]
}
fn sin_pi_x2(p: &[f64]) -> f64 {
    (std::f64::consts::PI * p[1]).sin()
}
fn cos_pi_x2(p: &[f64]) -> f64 {
    (std::f64::consts::PI * p[1]).cos()
}

/// The dictionary used by the measure solvers and defect checks.
pub fn standard_dictionary(dim: usize) -> Vec<TestFunction> {
    let mut d = vec![
        TestFunction { name: "1", f: one, sup_norm: 1.0 },
        TestFunction { name: "x1", f: x1, sup_norm: 1.0 },
        TestFunction { name: "x1^2", f: x1_sq, sup_norm: 1.0 },
        TestFunction { name: "sin(pi*x1)", f: sin_pi_x1, sup_norm: 1.0 },
        TestFunction { name: "cos(pi*x1)", f: cos_pi_x1, sup_norm: 1.0 },
    ];
    if dim == 2 {
        d.extend([
            TestFunction { name: "x2", f: x2, sup_norm: 1.0 },
            TestFunction { name: "x2^2", f: x2_sq, sup_norm: 1.0 },
            TestFunction { name: "sin(pi*x2)", f: sin_pi_x2, sup_norm: 1.0 },
            TestFunction { name: "cos(pi*x2)", f: cos_pi_x2, sup_norm: 1.0 },
        ]);
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        assert_eq!(standard_dictionary(1).len(), 5);
        assert_eq!(standard_dictionary(2).len(), 9);
        for tf in standard_dictionary(2) {
            // sup-norms really are bounds on [0,1]^2
            for &x in &[0.0, 0.31, 0.5, 0.77, 1.0] {
                for &y in &[0.0, 0.5, 1.0] {
                    assert!((tf.f)(&[x, y]).abs() <= tf.sup_norm + 1e-15, "{}", tf.name);
                }
            }
        }
    }
}
