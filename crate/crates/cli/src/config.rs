//! Run configuration: command-line flags merged over an optional TOML file.

use std::path::Path;

use serde::Deserialize;
use sl1d_core::construction::DEFAULT_GROUP_LIMIT;
use sl1d_core::orbits::DEFAULT_ORBIT_LIMIT;
use sl1d_core::params::{prime_power, Params};
use sl1d_core::verify::SuiteConfig;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("cannot parse {path}: {source}")]
    Toml { path: String, source: toml::de::Error },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Tsv,
}

/// Keys accepted in a configuration file and as shared flags.
#[derive(Debug, Clone, Default, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct Shared {
    /// Residue field size q = p^f.
    #[arg(long, global = true)]
    pub q: Option<u64>,
    /// Residue characteristic, with --f as an alternative to --q.
    #[arg(long, global = true)]
    pub p: Option<u64>,
    /// Degree of F_q over F_p.
    #[arg(long, global = true)]
    pub f: Option<u32>,
    /// Degree ell of the division algebra.
    #[arg(long, global = true)]
    pub ell: Option<u32>,
    /// Modulus of F_q over F_p, little-endian coefficients.
    #[arg(long, global = true, value_delimiter = ',')]
    pub modulus_q: Option<Vec<u64>>,
    /// Modulus of F_{q^ell} over F_p, little-endian coefficients.
    #[arg(long, global = true, value_delimiter = ',')]
    pub modulus_qell: Option<Vec<u64>>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Largest explicit group built.
    #[arg(long, global = true)]
    pub max_group_order: Option<u128>,
    /// Largest orbit or ambient set enumerated.
    #[arg(long, global = true)]
    pub max_orbit_set: Option<u128>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for randomized checks.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Random cases per check when exhaustive runs exceed the guards.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
}

impl Shared {
    /// Fills every unset field from `other`.
    pub fn or(self, other: Shared) -> Shared {
        Shared {
            q: self.q.or(other.q),
            p: self.p.or(other.p),
            f: self.f.or(other.f),
            ell: self.ell.or(other.ell),
            modulus_q: self.modulus_q.or(other.modulus_q),
            modulus_qell: self.modulus_qell.or(other.modulus_qell),
            format: self.format.or(other.format),
            max_group_order: self.max_group_order.or(other.max_group_order),
            max_orbit_set: self.max_orbit_set.or(other.max_orbit_set),
            threads: self.threads.or(other.threads),
            seed: self.seed.or(other.seed),
            samples: self.samples.or(other.samples),
        }
    }

    pub fn from_file(path: &Path) -> Result<Shared, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        toml::from_str(&text).map_err(|source| ConfigError::Toml { path: path.display().to_string(), source })
    }
}

/// The validated configuration of one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: Option<Params>,
    pub modulus_q: Option<Vec<u64>>,
    pub modulus_qell: Option<Vec<u64>>,
    pub format: Format,
    pub max_group_order: u128,
    pub max_orbit_set: u128,
    pub threads: usize,
    pub seed: u64,
    pub samples: usize,
}

impl RunConfig {
    pub fn resolve(shared: Shared) -> Result<RunConfig, ConfigError> {
        let q = match (shared.q, shared.p, shared.f) {
            (Some(q), p, f) => {
                if let Some((pp, ff)) = prime_power(q) {
                    if p.is_some_and(|p| p != pp) || f.is_some_and(|f| f != ff) {
                        return Err(ConfigError::Invalid(format!("q = {q} disagrees with p and f")));
                    }
                }
                Some(q)
            }
            (None, Some(p), f) => Some(p.checked_pow(f.unwrap_or(1)).ok_or_else(|| ConfigError::Invalid("p^f overflows".into()))?),
            (None, None, Some(_)) => return Err(ConfigError::Invalid("--f needs --p".into())),
            (None, None, None) => None,
        };
        let params = match (q, shared.ell) {
            (Some(q), Some(ell)) => Some(Params::new(q, ell).map_err(|e| ConfigError::Invalid(e.to_string()))?),
            (None, None) => None,
            _ => return Err(ConfigError::Invalid("give both q (or p, f) and ell".into())),
        };
        Ok(RunConfig {
            params,
            modulus_q: shared.modulus_q,
            modulus_qell: shared.modulus_qell,
            format: shared.format.unwrap_or_default(),
            max_group_order: shared.max_group_order.unwrap_or(DEFAULT_GROUP_LIMIT),
            max_orbit_set: shared.max_orbit_set.unwrap_or(DEFAULT_ORBIT_LIMIT),
            threads: shared.threads.unwrap_or(0),
            seed: shared.seed.unwrap_or(0),
            samples: shared.samples.unwrap_or(64),
        })
    }

    pub fn params(&self) -> Result<Params, ConfigError> {
        self.params.ok_or_else(|| ConfigError::Invalid("this command needs --q and --ell".into()))
    }

    pub fn suite_config(&self, q: u64, ell: u32, m: Option<i32>) -> SuiteConfig {
        SuiteConfig {
            q,
            ell,
            m,
            max_group_order: self.max_group_order,
            max_orbit_set: self.max_orbit_set,
            seed: self.seed,
            samples: self.samples,
            modulus_q: self.modulus_q.clone(),
            modulus_qell: self.modulus_qell.clone(),
        }
    }
}
