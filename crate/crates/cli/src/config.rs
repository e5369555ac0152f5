//! `key = value` run configuration.
//!
//! A config file holds one assignment per line; `#` starts a comment. Command
//! line flags use the same keys and override the file.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use moebius_flux::eigensolver::{Method, SolverConfig};
use moebius_flux::experiments::{Sector, SectorSet, SweepConfig};
use moebius_flux::hamiltonian::HoppingParams;
use moebius_flux::lattice::{StripLattice, StripTopology};
use thiserror::Error;

/// Every key a config may set.
pub const KEYS: &[&str] = &[
    "topology", "nx", "ny", "tx", "ty", "f", "f_min", "f_max", "f_steps", "k", "solver", "tol",
    "seed", "sectors", "out", "plot",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },

    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },

    #[error("unknown config key `{0}`")]
    UnknownKey(String),

    #[error("line {line}: key `{key}` set twice")]
    Duplicate { line: usize, key: String },

    #[error("invalid value `{value}` for `{key}`: {reason}")]
    Invalid {
        key: String,
        value: String,
        reason: String,
    },

    #[error("{0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

fn check_key(key: &str) -> Result<(), ConfigError> {
    if KEYS.contains(&key) {
        Ok(())
    } else {
        Err(ConfigError::UnknownKey(key.to_string()))
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line: n + 1,
                    text: raw.to_string(),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(ConfigError::Syntax {
                    line: n + 1,
                    text: raw.to_string(),
                });
            }
            check_key(key)?;
            if cfg.values.insert(key.to_string(), value.to_string()).is_some() {
                return Err(ConfigError::Duplicate {
                    line: n + 1,
                    key: key.to_string(),
                });
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Sets `key`, replacing any earlier value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        check_key(key)?;
        self.values.insert(key.to_string(), value.trim().to_string());
        Ok(())
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn get<T>(&self, key: &str, default: T) -> Result<T, ConfigError>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|e: T::Err| ConfigError::Invalid {
                key: key.to_string(),
                value: v.to_string(),
                reason: e.to_string(),
            }),
        }
    }

    fn invalid(&self, key: &str, reason: impl std::fmt::Display) -> ConfigError {
        ConfigError::Invalid {
            key: key.to_string(),
            value: self.raw(key).unwrap_or("").to_string(),
            reason: reason.to_string(),
        }
    }

    fn finite(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        let v: f64 = self.get(key, default)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.invalid(key, "must be finite"))
        }
    }

    pub fn topology(&self) -> Result<StripTopology, ConfigError> {
        self.get("topology", StripTopology::Moebius)
    }

    pub fn lattice(&self) -> Result<StripLattice, ConfigError> {
        let nx = self.get("nx", 48usize)?;
        let ny = self.get("ny", 9usize)?;
        StripLattice::new(nx, ny, self.topology()?)
            .map_err(|e| ConfigError::Inconsistent(e.to_string()))
    }

    pub fn hop(&self) -> Result<HoppingParams, ConfigError> {
        HoppingParams::new(self.finite("tx", 1.0)?, self.finite("ty", 1.0)?)
            .map_err(|e| ConfigError::Inconsistent(e.to_string()))
    }

    pub fn flux(&self) -> Result<f64, ConfigError> {
        self.finite("f", 0.0)
    }

    pub fn seed(&self) -> Result<u64, ConfigError> {
        self.get("seed", 0u64)
    }

    pub fn solver(&self) -> Result<SolverConfig, ConfigError> {
        let k = self.get("k", 6usize)?;
        if k == 0 {
            return Err(self.invalid("k", "must be positive"));
        }
        let tol = self.finite("tol", 1e-10)?;
        if tol <= 0.0 {
            return Err(self.invalid("tol", "must be positive"));
        }
        Ok(SolverConfig {
            k,
            tol,
            max_iter: None,
            seed: self.seed()?,
            method: self.get("solver", Method::Auto)?,
        })
    }

    /// Requested sectors, in the order given; `default` when unset.
    pub fn sectors(&self, default: &[Sector]) -> Result<Vec<Sector>, ConfigError> {
        let Some(raw) = self.raw("sectors") else {
            return Ok(default.to_vec());
        };
        let mut out = Vec::new();
        for part in raw.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let s: Sector = part.parse().map_err(|e: String| self.invalid("sectors", e))?;
            if !out.contains(&s) {
                out.push(s);
            }
        }
        if out.is_empty() {
            return Err(self.invalid("sectors", "no sector named"));
        }
        Ok(out)
    }

    pub fn sweep(&self) -> Result<SweepConfig, ConfigError> {
        let lat = self.lattice()?;
        let f_steps = self.get("f_steps", 151usize)?;
        let cfg = SweepConfig {
            nx: lat.nx(),
            ny: lat.ny(),
            topology: lat.topology(),
            hop: self.hop()?,
            f_min: self.finite("f_min", -0.25)?,
            f_max: self.finite("f_max", 1.25)?,
            f_steps,
            solver: self.solver()?,
            sectors: SectorSet::from_sectors(&self.sectors(&[Sector::Full, Sector::Even, Sector::Odd])?),
        };
        cfg.validate()
            .map_err(|e| ConfigError::Inconsistent(e.to_string()))?;
        Ok(cfg)
    }
}
