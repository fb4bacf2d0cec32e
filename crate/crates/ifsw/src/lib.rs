//! Thermodynamic formalism for iterated function systems with weights,
//! done numerically.
//!
//! A *weighted system* on the unit cube X = [0,1]^d (d = 1 or 2) is a
//! finite family of continuous self-maps τ₀, …, τ_{n−1} of X together with
//! strictly positive continuous weights q₀, …, q_{n−1}. Two linear
//! operators drive everything in this crate:
//!
//! * the **transfer operator** on functions,
//!   `(B_q f)(x) = Σᵢ qᵢ(x) · f(τᵢ(x))`, and
//! * its dual **Markov operator** on measures,
//!   `L_q μ = Σᵢ (τᵢ)₊(qᵢ · μ)`, characterised by
//!   `∫ f d(L_q μ) = ∫ B_q f dμ`.
//!
//! The crate computes their joint spectral data — the leading eigenvalue
//! ρ(B_q), positive eigenfunctions, eigenmeasures — and builds on it:
//! invariant fixed-point measures of normalised systems, chaos-game
//! sampling, holonomic measures with their disintegration, average and
//! variational entropy, topological pressure, equilibrium states, and a
//! directional-derivative probe for the pressure functional. Weights given
//! as `qᵢ = ψ ∘ τᵢ` for a positive potential ψ make the pressure
//! `P(ψ) = ln ρ(B_q)` and the machinery of equilibrium states available.
//!
//! Functions live on uniform grids with multilinear interpolation
//! ([`grid`]), measures are weighted particle clouds compacted by
//! grid-cell binning ([`markov`]), and all maps, weights and potentials
//! are closed-form expressions ([`expr`]) so that the same quantity can be
//! evaluated exactly both on and off the grid.
//!
//! # Orientation
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`expr`] | expression language: parser, evaluator, printer |
//! | [`grid`] | uniform grids, grid functions, interpolation, quadrature |
//! | [`ifs`] | weighted / potential / normalised systems, validation |
//! | [`transfer`] | transfer operator, word-sum oracle, eigen solvers |
//! | [`markov`] | particle measures, Markov operator, eigenmeasures, chaos game |
//! | [`holonomic`] | holonomic measures, disintegration, entropies |
//! | [`pressure`] | pressure reports, equilibrium states, derivative probe |
//! | [`config`] | JSON run configuration shared with the `ifsw` binary |
//! | [`verify`] | cross-module identity suite over a configured system |
//!
//! The `examples/` directory of this crate is the best starting point:
//! each example is a runnable tour of one capability
//! (`cargo run -p ifsw --example eigenfunction_solvers`, …). The thin
//! `ifsw` binary exposes the same operations on JSON configuration files.
//!
//! # A complete run
//!
//! ```
//! use ifsw::expr::parse;
//! use ifsw::grid::Grid;
//! use ifsw::ifs::PotentialIFS;
//! use ifsw::transfer::eigen_power;
//!
//! // Two dyadic contractions with potential ψ(x) = exp(x).
//! let grid = Grid::new(1, 257).unwrap();
//! let maps = vec![vec![parse("x / 2").unwrap()], vec![parse("x / 2 + 1 / 2").unwrap()]];
//! let system = PotentialIFS::from_potential(grid, maps, parse("exp(x)").unwrap()).unwrap();
//!
//! let pair = eigen_power(system.ifs(), 1e-10, 10_000).unwrap();
//! assert!(pair.converged);
//! // ρ(B_q) for this system lies strictly between the weight bounds 2·1 and 2·e.
//! assert!(pair.rho > 2.0 && pair.rho < 2.0 * std::f64::consts::E);
//! let pressure = pair.rho.ln(); // = P(ψ)
//! assert!(pressure > 0.0);
//! ```

#![forbid(unsafe_code)]

pub mod config;
pub mod dictionary;
pub mod error;
pub mod expr;
pub mod grid;
pub mod holonomic;
pub mod ifs;
mod kahan;
pub mod markov;
pub mod pressure;
pub mod transfer;
pub mod verify;

pub use error::{Error, Result};

/// A point of the state space. Only the first [`grid::Grid::dim`]
/// coordinates are meaningful; one-dimensional systems keep the second
/// coordinate at zero.
pub type Point = [f64; 2];
