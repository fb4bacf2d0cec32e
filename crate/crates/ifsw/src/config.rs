//! JSON run configurations for the command-line tool and examples.
//!
//! A configuration names a state space, the maps, and either explicit
//! weight expressions or a single potential:
//!
//! ```json
//! {
//!   "dimension": 1,
//!   "grid": 1025,
//!   "maps": [["x / 2"], ["x / 2 + 1 / 2"]],
//!   "weights": { "potential": "exp(x)" }
//! }
//! ```
//!
//! `weights` may instead be a list with one expression per map, e.g.
//! `["1 / 2", "1 / 2"]`. Everything else is optional and defaults to the
//! solver settings below; unknown keys are rejected so typos fail loudly
//! instead of silently running with defaults.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::expr::{parse, Expr};
use crate::grid::Grid;
use crate::ifs::{NormalizedIFS, PotentialIFS, WeightedIFS};
use crate::pressure::SolveOptions;
use crate::transfer::DiscountSchedule;

fn default_grid() -> usize {
    1025
}
fn default_tol() -> f64 {
    1e-8
}
fn default_max_iter() -> usize {
    10_000
}
fn default_n_max() -> usize {
    60
}
fn default_measure_tol() -> f64 {
    1e-4
}
fn default_measure_max_iter() -> usize {
    2_000
}
fn default_particles() -> usize {
    1_000_000
}
fn default_seed() -> u64 {
    42
}
fn default_k_max() -> u32 {
    20
}
fn default_burn_in() -> usize {
    1_000
}

/// A parsed run configuration (see the module docs for the schema).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// State-space dimension, 1 or 2.
    pub dimension: usize,
    /// Grid nodes per axis.
    #[serde(default = "default_grid")]
    pub grid: usize,
    /// One entry per map; each entry lists the component expressions.
    pub maps: Vec<Vec<String>>,
    /// Explicit weight expressions or a potential.
    pub weights: WeightSpec,
    /// Relative tolerance for the eigen solvers.
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// Length of the growth-average sequence.
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    /// Tolerance for measure iterations.
    #[serde(default = "default_measure_tol")]
    pub measure_tol: f64,
    #[serde(default = "default_measure_max_iter")]
    pub measure_max_iter: usize,
    /// Default chaos-game length.
    #[serde(default = "default_particles")]
    pub particles: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Stages of the discount schedule.
    #[serde(default = "default_k_max")]
    pub k_max: u32,
    /// Chaos-game burn-in.
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
}

/// The two accepted shapes of the `weights` field.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum WeightSpec {
    /// One weight expression per map.
    List(Vec<String>),
    /// A single potential ψ; weights become ψ∘τᵢ.
    Potential { potential: String },
}

/// What a configuration builds into.
#[derive(Debug, Clone)]
pub enum BuiltSystem {
    Weighted(WeightedIFS),
    Potential(PotentialIFS),
}

impl BuiltSystem {
    /// The underlying weighted system, whichever way it was specified.
    pub fn ifs(&self) -> &WeightedIFS {
        match self {
            BuiltSystem::Weighted(w) => w,
            BuiltSystem::Potential(p) => p.ifs(),
        }
    }

    /// The potential view, when the config used one.
    pub fn potential(&self) -> Option<&PotentialIFS> {
        match self {
            BuiltSystem::Weighted(_) => None,
            BuiltSystem::Potential(p) => Some(p),
        }
    }

    /// Reinterpret the weights as branch probabilities. Succeeds only
    /// when they already sum to one at the nodes; otherwise callers
    /// should normalise through an eigenpair first.
    pub fn probability_system(&self) -> Result<NormalizedIFS> {
        let ifs = self.ifs();
        NormalizedIFS::from_probability_exprs(
            ifs.grid(),
            ifs.maps().to_vec(),
            ifs.weights().to_vec(),
        )
    }
}

fn field_err(field: String, message: impl std::fmt::Display) -> Error {
    Error::Config { field, message: message.to_string() }
}

fn parse_field(src: &str, field: String) -> Result<Expr> {
    parse(src).map_err(|e| field_err(field, e))
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// Check the scalar fields and build the system, citing the
    /// offending config field in every error.
    pub fn build(&self) -> Result<BuiltSystem> {
        if !(self.dimension == 1 || self.dimension == 2) {
            return Err(field_err(
                "dimension".into(),
                format!("must be 1 or 2, got {}", self.dimension),
            ));
        }
        if self.grid < 2 {
            return Err(field_err(
                "grid".into(),
                format!("needs at least 2 nodes per axis, got {}", self.grid),
            ));
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(field_err("tol".into(), format!("must be positive, got {}", self.tol)));
        }
        if !(self.measure_tol > 0.0) || !self.measure_tol.is_finite() {
            return Err(field_err(
                "measure_tol".into(),
                format!("must be positive, got {}", self.measure_tol),
            ));
        }
        if self.maps.is_empty() {
            return Err(field_err("maps".into(), "needs at least one map"));
        }
        let grid = Grid::new(self.dimension, self.grid)?;

        let mut maps = Vec::with_capacity(self.maps.len());
        for (i, comps) in self.maps.iter().enumerate() {
            if comps.len() != self.dimension {
                return Err(field_err(
                    format!("maps[{i}]"),
                    format!(
                        "has {} component(s), the state space has dimension {}",
                        comps.len(),
                        self.dimension
                    ),
                ));
            }
            let mut parsed = Vec::with_capacity(comps.len());
            for (c, src) in comps.iter().enumerate() {
                parsed.push(parse_field(src, format!("maps[{i}][{c}]"))?);
            }
            maps.push(parsed);
        }

        match &self.weights {
            WeightSpec::List(list) => {
                if list.len() != maps.len() {
                    return Err(field_err(
                        "weights".into(),
                        format!("{} weight(s) for {} map(s)", list.len(), maps.len()),
                    ));
                }
                let mut weights = Vec::with_capacity(list.len());
                for (i, src) in list.iter().enumerate() {
                    weights.push(parse_field(src, format!("weights[{i}]"))?);
                }
                Ok(BuiltSystem::Weighted(WeightedIFS::new(grid, maps, weights)?))
            }
            WeightSpec::Potential { potential } => {
                let psi = parse_field(potential, "weights.potential".into())?;
                Ok(BuiltSystem::Potential(PotentialIFS::from_potential(grid, maps, psi)?))
            }
        }
    }

    /// Solver settings implied by the config.
    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            tol: self.tol,
            max_iter: self.max_iter,
            n_max: self.n_max,
            schedule: DiscountSchedule { k_max: self.k_max, ..DiscountSchedule::default() },
            measure_tol: self.measure_tol,
            measure_max_iter: self.measure_max_iter,
            particles: self.particles,
            seed: self.seed,
            burn_in: self.burn_in,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "dimension": 1,
        "grid": 33,
        "maps": [["x / 2"], ["x / 2 + 1 / 2"]],
        "weights": ["1 / 2", "1 / 2"]
    }"#;

    #[test]
    fn minimal_config_builds_with_defaults() {
        let cfg = RunConfig::from_json(MINIMAL).unwrap();
        assert_eq!(cfg.tol, 1e-8);
        assert_eq!(cfg.n_max, 60);
        assert_eq!(cfg.particles, 1_000_000);
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.k_max, 20);
        assert_eq!(cfg.measure_tol, 1e-4);
        let built = cfg.build().unwrap();
        assert_eq!(built.ifs().n(), 2);
        assert!(built.potential().is_none());
        assert!(built.probability_system().is_ok());
        let opts = cfg.solve_options();
        assert_eq!(opts.tol, 1e-8);
        assert_eq!(opts.schedule.k_max, 20);
    }

    #[test]
    fn default_grid_is_1025() {
        let cfg = RunConfig::from_json(
            r#"{"dimension": 1, "maps": [["x / 2"]], "weights": ["1"]}"#,
        )
        .unwrap();
        assert_eq!(cfg.grid, 1025);
    }

    #[test]
    fn potential_variant_builds() {
        let cfg = RunConfig::from_json(
            r#"{
                "dimension": 1,
                "grid": 17,
                "maps": [["x / 2"], ["x / 2 + 1 / 2"]],
                "weights": { "potential": "exp(x)" }
            }"#,
        )
        .unwrap();
        let built = cfg.build().unwrap();
        let sys = built.potential().expect("potential view");
        assert_eq!(sys.ifs().n(), 2);
        // weights are not probabilities here
        assert!(built.probability_system().is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = RunConfig::from_json(
            r#"{"dimension": 1, "maps": [["x"]], "weights": ["1"], "gird": 65}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("gird"), "{err}");
    }

    #[test]
    fn expression_errors_cite_the_field() {
        let cfg = RunConfig::from_json(
            r#"{"dimension": 1, "grid": 9, "maps": [["x +"]], "weights": ["1"]}"#,
        )
        .unwrap();
        let err = cfg.build().unwrap_err();
        assert!(matches!(&err, Error::Config { field, .. } if field == "maps[0][0]"), "{err}");

        let cfg = RunConfig::from_json(
            r#"{"dimension": 1, "grid": 9, "maps": [["x / 2"]], "weights": ["ln("]}"#,
        )
        .unwrap();
        let err = cfg.build().unwrap_err();
        assert!(matches!(&err, Error::Config { field, .. } if field == "weights[0]"), "{err}");

        let cfg = RunConfig::from_json(
            r#"{"dimension": 1, "grid": 9, "maps": [["x / 2"]], "weights": {"potential": ")"}}"#,
        )
        .unwrap();
        let err = cfg.build().unwrap_err();
        assert!(
            matches!(&err, Error::Config { field, .. } if field == "weights.potential"),
            "{err}"
        );
    }

    #[test]
    fn structural_errors_cite_the_field() {
        let cfg = RunConfig::from_json(
            r#"{"dimension": 3, "maps": [["x"]], "weights": ["1"]}"#,
        )
        .unwrap();
        assert!(matches!(cfg.build(), Err(Error::Config { field, .. }) if field == "dimension"));

        let cfg = RunConfig::from_json(
            r#"{"dimension": 1, "grid": 1, "maps": [["x"]], "weights": ["1"]}"#,
        )
        .unwrap();
        assert!(matches!(cfg.build(), Err(Error::Config { field, .. }) if field == "grid"));

        let cfg = RunConfig::from_json(
            r#"{"dimension": 2, "grid": 9, "maps": [["x1 / 2"]], "weights": ["1"]}"#,
        )
        .unwrap();
        assert!(matches!(cfg.build(), Err(Error::Config { field, .. }) if field == "maps[0]"));

        let cfg = RunConfig::from_json(
            r#"{"dimension": 1, "grid": 9, "maps": [["x / 2"]], "weights": ["1", "2"]}"#,
        )
        .unwrap();
        assert!(matches!(cfg.build(), Err(Error::Config { field, .. }) if field == "weights"));
    }

    #[test]
    fn two_dimensional_configs_build() {
        let cfg = RunConfig::from_json(
            r#"{
                "dimension": 2,
                "grid": 9,
                "maps": [["x1 / 2", "x2 / 2"], ["x1 / 2 + 1 / 2", "x2 / 2"]],
                "weights": { "potential": "exp(x1 + x2)" }
            }"#,
        )
        .unwrap();
        let built = cfg.build().unwrap();
        assert_eq!(built.ifs().grid().dim(), 2);
        assert_eq!(built.ifs().n(), 2);
    }
}
