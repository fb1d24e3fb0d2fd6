//! JSON run and sweep configurations.
//!
//! Every exact quantity is a string in `p/q` form (decimals such as `"0.25"`
//! and bare JSON integers are accepted too) so configs never pass through
//! floating point.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;
use wavetrace_core::envelope::{sample_flux, FluxSpec, GridFlux};
use wavetrace_core::rational::{self, grid_index, int, Rational};
use wavetrace_core::tracker::{discretize_initial, DatumSpec, Profile};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: serde_json::Error },
    #[error("field `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        reason: reason.into(),
    }
}

/// A rational that (de)serializes as its canonical string.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Exact(pub Rational);

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rational::format(&self.0))
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Exact;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational as \"p/q\", a decimal string or an integer")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Exact, E> {
                rational::parse(v).map(Exact).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Exact, E> {
                Ok(Exact(int(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Exact, E> {
                i64::try_from(v).map(|v| Exact(int(v))).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

impl From<Rational> for Exact {
    fn from(r: Rational) -> Self {
        Exact(r)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FluxConfig {
    /// Coefficients `c₀, c₁, …` of `Σ cₖ uᵏ`.
    Polynomial(Vec<Exact>),
    /// Flux values keyed by grid index `k` (state `kε`).
    Table(BTreeMap<i64, Exact>),
}

impl FluxConfig {
    pub fn to_spec(&self) -> FluxSpec {
        match self {
            FluxConfig::Polynomial(c) => FluxSpec::Polynomial(c.iter().map(|e| e.0.clone()).collect()),
            FluxConfig::Table(t) => FluxSpec::Table(t.iter().map(|(k, v)| (*k, v.0.clone())).collect()),
        }
    }
}

/// `u = constant` left of the first piece; `(x, v)` sets `u = v` right of `x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatumConfig {
    pub constant: Exact,
    #[serde(default)]
    pub pieces: Vec<(Exact, Exact)>,
}

impl DatumConfig {
    pub fn to_spec(&self) -> DatumSpec {
        DatumSpec {
            constant: self.constant.0.clone(),
            pieces: self.pieces.iter().map(|(x, v)| (x.0.clone(), v.0.clone())).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunOptions {
    #[serde(default)]
    pub emit_svg: bool,
    #[serde(default = "default_restart_points")]
    pub restart_check_points: usize,
    /// Cap on processed events; default `10·n₀²`.
    #[serde(default)]
    pub max_events: Option<usize>,
}

fn default_restart_points() -> usize {
    3
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            emit_svg: false,
            restart_check_points: default_restart_points(),
            max_events: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub flux: FluxConfig,
    pub epsilon: Exact,
    pub datum: DatumConfig,
    /// Grid indices `[k_min, k_max]` on which the flux is sampled. Defaults
    /// to the datum's range widened by one cell on each side.
    #[serde(default)]
    pub grid: Option<(i64, i64)>,
    #[serde(default)]
    pub options: RunOptions,
    #[serde(default)]
    pub seed: u64,
}

/// Flux and discretized datum, ready for tracking.
#[derive(Clone, Debug)]
pub struct Problem {
    pub flux: GridFlux,
    pub profile: Profile,
}

impl RunConfig {
    pub fn from_json(text: &str, path: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|source| ConfigError::Parse {
            path: path.to_string(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = read(path)?;
        Self::from_json(&text, &path.display().to_string())
    }

    /// Discretizes the datum and samples the flux, checking the config.
    pub fn problem(&self) -> Result<Problem, ConfigError> {
        let eps = &self.epsilon.0;
        if *eps <= int(0) {
            return Err(invalid("epsilon", format!("must be positive, got {}", rational::format(eps))));
        }
        let profile = discretize_initial(&self.datum.to_spec(), eps).map_err(|e| invalid("datum", e.to_string()))?;
        let (lo, hi) = profile.state_range();
        let (klo, khi) = (grid_index(&lo, eps).unwrap(), grid_index(&hi, eps).unwrap());
        let (gmin, gmax) = match self.grid {
            Some(g) => g,
            None => (klo - 1, khi + 1),
        };
        if gmin > klo || gmax < khi || gmax <= gmin {
            return Err(invalid(
                "grid",
                format!("window [{gmin}, {gmax}] does not cover the datum's grid range [{klo}, {khi}]"),
            ));
        }
        let flux = sample_flux(&self.flux.to_spec(), eps, (gmin, gmax)).map_err(|e| invalid("flux", e.to_string()))?;
        if flux.len() < 3 {
            return Err(invalid("grid", "need at least three grid points"));
        }
        Ok(Problem { flux, profile })
    }
}

fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Random datum shared by all members of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomDatum {
    pub jumps: usize,
    /// States are drawn from `[-amplitude, amplitude]` on the coarsest grid.
    pub amplitude: Exact,
    /// Jump positions are drawn from `[0, span]`.
    pub span: Exact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub base: RunConfig,
    pub epsilons: Vec<Exact>,
    /// Times at which `L¹` distances to the finest run are reported.
    #[serde(default)]
    pub probe_times: Vec<Exact>,
    /// Replaces `base.datum` by a datum generated from `base.seed`.
    #[serde(default)]
    pub random: Option<RandomDatum>,
}

impl SweepConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = read(path)?;
        let cfg: SweepConfig = serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.display().to_string(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.epsilons.is_empty() {
            return Err(invalid("epsilons", "empty list"));
        }
        if self.epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return Err(invalid("epsilons", "must be strictly decreasing"));
        }
        if self.epsilons.last().unwrap().0 <= int(0) {
            return Err(invalid("epsilons", "must be positive"));
        }
        if self.base.grid.is_some() {
            return Err(invalid("base.grid", "grid windows are per-ε; leave it unset in sweeps"));
        }
        Ok(())
    }
}
