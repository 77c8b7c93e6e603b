use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Identities,
    Calderon,
    PhaseSpace,
    States,
    Gauge,
    Symmetry,
    Maxwell,
    Oracle,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Maxwell,
        Suite::Identities,
        Suite::Calderon,
        Suite::PhaseSpace,
        Suite::States,
        Suite::Gauge,
        Suite::Symmetry,
        Suite::Oracle,
    ];

    pub fn is_gravity(self) -> bool {
        self != Suite::Maxwell
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Calderon => "calderon",
            Suite::PhaseSpace => "phase_space",
            Suite::States => "states",
            Suite::Gauge => "gauge",
            Suite::Symmetry => "symmetry",
            Suite::Maxwell => "maxwell",
            Suite::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub verdict: f64,
    pub linear_algebra: f64,
    pub ode: f64,
    pub margin: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { verdict: 1e-9, linear_algebra: 1e-12, ode: 1e-12, margin: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub k_max: u32,
    /// Levels up to which Lorentzian evolution is exercised.
    pub dynamics_k_max: u32,
    pub tolerances: Tolerances,
    pub suites: Vec<Suite>,
    pub alpha_values: Vec<f64>,
    #[serde(skip_serializing)]
    pub output: Option<PathBuf>,
    pub format: Format,
    /// Adds per-task wall times; reports are then no longer byte-stable.
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            k_max: 12,
            dynamics_k_max: 8,
            tolerances: Tolerances::default(),
            suites: Suite::ALL.to_vec(),
            alpha_values: vec![0.3, 1.0],
            output: None,
            format: Format::Json,
            timings: false,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot parse config {path}: {source}")]
    Parse { path: PathBuf, source: toml::de::Error },
    #[error("k_max = {0} but the gravity suites need k_max >= 2")]
    KMaxTooSmall(u32),
    #[error("no suites selected")]
    NoSuites,
    #[error("tolerance {name} = {value} must be positive and finite")]
    Tolerance { name: &'static str, value: f64 },
    #[error("alpha value {0} is not finite")]
    Alpha(f64),
    #[error("output directory {0} does not exist")]
    OutputDir(PathBuf),
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        toml::from_str(&text).map_err(|source| ConfigError::Parse { path: path.into(), source })
    }

    pub fn has_gravity(&self) -> bool {
        self.suites.iter().any(|s| s.is_gravity())
    }

    pub fn enabled(&self, suite: Suite) -> bool {
        self.suites.contains(&suite)
    }

    /// Sorts and dedups the suite list into execution order.
    pub fn normalize(&mut self) {
        let order = |s: &Suite| Suite::ALL.iter().position(|x| x == s).unwrap();
        self.suites.sort_by_key(order);
        self.suites.dedup();
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.suites.is_empty() {
            return Err(ConfigError::NoSuites);
        }
        if self.has_gravity() && self.k_max < 2 {
            return Err(ConfigError::KMaxTooSmall(self.k_max));
        }
        let t = &self.tolerances;
        for (name, value) in [("verdict", t.verdict), ("linear_algebra", t.linear_algebra), ("ode", t.ode), ("margin", t.margin)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(ConfigError::Tolerance { name, value });
            }
        }
        if let Some(a) = self.alpha_values.iter().find(|a| !a.is_finite()) {
            return Err(ConfigError::Alpha(*a));
        }
        if let Some(out) = &self.output {
            let dir = out.parent().filter(|p| !p.as_os_str().is_empty());
            if let Some(d) = dir {
                if !d.is_dir() {
                    return Err(ConfigError::OutputDir(d.into()));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn small_k_rejected_only_with_gravity() {
        let mut c = RunConfig { k_max: 1, ..Default::default() };
        assert!(matches!(c.validate(), Err(ConfigError::KMaxTooSmall(1))));
        c.suites = vec![Suite::Maxwell];
        c.validate().unwrap();
    }

    #[test]
    fn toml_partial() {
        let c: RunConfig = toml::from_str("k_max = 4\nsuites = [\"maxwell\", \"states\"]\n[tolerances]\nverdict = 1e-8\n").unwrap();
        assert_eq!(c.k_max, 4);
        assert_eq!(c.tolerances.verdict, 1e-8);
        assert_eq!(c.tolerances.margin, 1e-6);
        assert_eq!(c.suites, vec![Suite::Maxwell, Suite::States]);
    }
}
