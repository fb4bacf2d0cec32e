//! Uniform grids on the unit cube and piecewise-multilinear grid functions.
//!
//! Continuous functions are represented by their values on a uniform grid
//! with `m` nodes per axis (node k sits at k/(m−1)) and evaluated between
//! nodes by multilinear interpolation. Interpolation reproduces the stored
//! values *exactly* at the nodes — several exact identities elsewhere in
//! the crate (word-sum checks, balanced families) rely on node reads not
//! introducing rounding — and is exact for affine functions up to a few
//! ulps.
//!
//! The default grid size used by the command-line tool is m = 1025 = 2¹⁰+1:
//! with a power-of-two number of cells, dyadic maps such as x/2 and
//! (x+1)/2 send grid nodes onto or exactly halfway between grid nodes,
//! which keeps their discretisation error transparent.
//!
//! Points are accepted within `CLAMP_TOL` = 1e-12 of the cube and clamped
//! onto it; anything farther out is an error rather than an extrapolation.

use std::io::Write;

use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use crate::Point;

/// Distance outside [0,1] that is still treated as rounding and clamped.
pub const CLAMP_TOL: f64 = 1e-12;

/// A uniform grid on [0,1]^d with `m` nodes per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    dim: usize,
    m: usize,
}

impl Grid {
    /// Create a grid. `dim` must be 1 or 2 and `m` at least 2.
    pub fn new(dim: usize, m: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidSystem(format!(
                "state-space dimension must be 1 or 2, got {dim}"
            )));
        }
        if m < 2 {
            return Err(Error::InvalidSystem(format!(
                "grid needs at least 2 nodes per axis, got {m}"
            )));
        }
        Ok(Grid { dim, m })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Nodes per axis.
    pub fn nodes_per_axis(&self) -> usize {
        self.m
    }

    /// Total number of nodes (mᵈ).
    pub fn node_count(&self) -> usize {
        self.m.pow(self.dim as u32)
    }

    /// Grid spacing 1/(m−1).
    pub fn spacing(&self) -> f64 {
        1.0 / (self.m - 1) as f64
    }

    /// Coordinates of the node with flat index `k` (row-major in x1, x2).
    pub fn node(&self, k: usize) -> Point {
        debug_assert!(k < self.node_count());
        let last = (self.m - 1) as f64;
        match self.dim {
            1 => [k as f64 / last, 0.0],
            _ => [(k / self.m) as f64 / last, (k % self.m) as f64 / last],
        }
    }

    /// Iterate over `(flat_index, coordinates)` of all nodes.
    pub fn nodes(&self) -> impl Iterator<Item = (usize, Point)> + '_ {
        (0..self.node_count()).map(move |k| (k, self.node(k)))
    }

    /// Clamp a point onto the cube, tolerating excursions up to `tol`.
    pub fn clamp(&self, x: &[f64], tol: f64) -> Result<Point> {
        if x.len() < self.dim {
            return Err(Error::Dimension {
                needed: self.dim,
                dim: x.len(),
            });
        }
        let mut out = [0.0; 2];
        let mut excess = 0.0_f64;
        for axis in 0..self.dim {
            let v = x[axis];
            if !v.is_finite() {
                return Err(Error::OutsideDomain {
                    point: x[..self.dim].to_vec(),
                    dim: self.dim,
                    excess: f64::INFINITY,
                });
            }
            excess = excess.max(-v).max(v - 1.0);
            out[axis] = v.clamp(0.0, 1.0);
        }
        if excess > tol {
            return Err(Error::OutsideDomain {
                point: x[..self.dim].to_vec(),
                dim: self.dim,
                excess,
            });
        }
        Ok(out)
    }

    /// Index of the grid cell a point belongs to, with nodes as cell
    /// centres: per axis the nearest node. Used for particle binning and
    /// disintegration so that measure resolution matches the grid.
    pub fn cell_index(&self, x: &[f64]) -> usize {
        let last = (self.m - 1) as f64;
        let snap = |v: f64| ((v.clamp(0.0, 1.0) * last).round() as usize).min(self.m - 1);
        match self.dim {
            1 => snap(x[0]),
            _ => snap(x[0]) * self.m + snap(x[1]),
        }
    }

    pub(crate) fn check_same(&self, other: Grid, what: &str) -> Result<()> {
        if *self != other {
            return Err(Error::GridMismatch(format!(
                "{what}: {}x{}^{} vs {}x{}^{}",
                self.m, self.m, self.dim, other.m, other.m, other.dim
            )));
        }
        Ok(())
    }
}

/// A function sampled on a [`Grid`], evaluated in between by multilinear
/// interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    /// Sample a closure at every node. The closure may fail (expression
    /// evaluation does), and the failure is propagated.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(&[f64]) -> Result<f64>) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.node_count());
        for (_, p) in grid.nodes() {
            values.push(f(&p[..grid.dim()])?);
        }
        Ok(GridFunction { grid, values })
    }

    /// Wrap existing node values (row-major for d = 2).
    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::GridMismatch(format!(
                "expected {} node values, got {}",
                grid.node_count(),
                values.len()
            )));
        }
        Ok(GridFunction { grid, values })
    }

    /// The constant function.
    pub fn constant(grid: Grid, c: f64) -> Self {
        GridFunction {
            grid,
            values: vec![c; grid.node_count()],
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Evaluate by multilinear interpolation. Points within [`CLAMP_TOL`]
    /// of the cube are clamped onto it; anything farther out errors.
    ///
    /// At a node the stored value is returned without rounding: with
    /// `u = x·(m−1)` landing exactly on an integer the blend reduces to
    /// `1·v[k] + 0·v[k±1]`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let p = self.grid.clamp(x, CLAMP_TOL)?;
        Ok(self.eval_clamped(&p))
    }

    /// Evaluate a point already known to lie inside the cube.
    #[inline]
    pub(crate) fn eval_clamped(&self, p: &Point) -> f64 {
        let m = self.grid.m;
        let last = (m - 1) as f64;
        #[inline]
        fn axis_split(v: f64, last: f64, m: usize) -> (usize, f64) {
            let u = v * last;
            let mut i = u.floor() as usize;
            if i >= m - 1 {
                i = m - 2;
            }
            (i, u - i as f64)
        }
        match self.grid.dim {
            1 => {
                let (i, t) = axis_split(p[0], last, m);
                (1.0 - t) * self.values[i] + t * self.values[i + 1]
            }
            _ => {
                let (i, s) = axis_split(p[0], last, m);
                let (j, t) = axis_split(p[1], last, m);
                let v00 = self.values[i * m + j];
                let v01 = self.values[i * m + j + 1];
                let v10 = self.values[(i + 1) * m + j];
                let v11 = self.values[(i + 1) * m + j + 1];
                (1.0 - s) * ((1.0 - t) * v00 + t * v01) + s * ((1.0 - t) * v10 + t * v11)
            }
        }
    }

    /// max |f| over the nodes.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |a, v| a.max(v.abs()))
    }

    /// Smallest node value.
    pub fn min_value(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |a, &v| a.min(v))
    }

    /// Largest node value.
    pub fn max_value(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |a, &v| a.max(v))
    }

    /// ∫ f dx over the cube by the trapezoid rule (tensor-product weights
    /// for d = 2). Exact for affine functions; O(1/m²) otherwise.
    pub fn integrate_lebesgue(&self) -> f64 {
        let m = self.grid.m;
        let h = self.grid.spacing();
        let edge = |k: usize| if k == 0 || k == m - 1 { 0.5 } else { 1.0 };
        let mut acc = KahanSum::new();
        match self.grid.dim {
            1 => {
                for (k, v) in self.values.iter().enumerate() {
                    acc.add(edge(k) * v);
                }
                acc.value() * h
            }
            _ => {
                for i in 0..m {
                    for j in 0..m {
                        acc.add(edge(i) * edge(j) * self.values[i * m + j]);
                    }
                }
                acc.value() * h * h
            }
        }
    }

    /// Apply a pointwise transformation to the node values.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Combine two functions on the same grid node by node.
    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<GridFunction> {
        self.grid.check_same(other.grid, "zip_with")?;
        Ok(GridFunction {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Scale so the sup-norm becomes 1 (no-op on the zero function).
    pub fn normalized_sup(&self) -> GridFunction {
        let s = self.sup_norm();
        if s == 0.0 {
            self.clone()
        } else {
            self.map(|v| v / s)
        }
    }

    /// Write `x1[,x2],value` rows with a header.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        match self.grid.dim {
            1 => writeln!(out, "x1,value")?,
            _ => writeln!(out, "x1,x2,value")?,
        }
        for (k, p) in self.grid.nodes() {
            match self.grid.dim {
                1 => writeln!(out, "{},{}", p[0], self.values[k])?,
                _ => writeln!(out, "{},{},{}", p[0], p[1], self.values[k])?,
            }
        }
        Ok(())
    }
}
