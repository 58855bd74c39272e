//! Run configuration, from flags or a TOML file.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diophantine::DEFAULT_MODULI;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("bad config: {0}")]
    Parse(#[from] toml::de::Error),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Chamber budget per anchor for the chamber search.
    pub max_chambers: usize,
    /// The same budget for pair runs during a lattice build, where a
    /// cheap inconclusive beats an hour-long search.
    pub lattice_max_chambers: usize,
    /// Coordinate bound for Diophantine witness searches.
    pub witness_bound: i64,
    /// Largest number of tuples a witness search may examine; the bound is
    /// lowered to fit.
    pub witness_budget: u64,
    pub moduli: Vec<u64>,
    /// Worker threads for pair runs (0: one per core).
    pub workers: usize,
    /// Largest rank of catalog entries used when building a lattice.
    pub max_rank: usize,
    /// Starting precision (bits) for exact sign refinement of field
    /// elements whose f64 evaluation is ambiguous.
    pub precision_bits: u32,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            max_chambers: 200_000,
            lattice_max_chambers: 2_000,
            witness_bound: 4,
            witness_budget: 2_000_000,
            moduli: DEFAULT_MODULI.to_vec(),
            workers: 0,
            max_rank: 4,
            precision_bits: 64,
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_toml(&text)
    }

    /// Witness bound lowered so that (2b+1)^free stays within the budget.
    pub fn witness_bound_for(&self, free: usize) -> i64 {
        let mut b = self.witness_bound;
        while b > 0 && (2 * b as u64 + 1).checked_pow(free as u32).is_none_or(|t| t > self.witness_budget) {
            b -= 1;
        }
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_toml_keeps_defaults() {
        let c = Config::from_toml("max_chambers = 10\nworkers = 2\n").unwrap();
        assert_eq!(c.max_chambers, 10);
        assert_eq!(c.workers, 2);
        assert_eq!(c.moduli, DEFAULT_MODULI.to_vec());
        assert!(Config::from_toml("nonsense = 1").is_err());
    }

    #[test]
    fn witness_bound_shrinks() {
        let c = Config::default();
        assert_eq!(c.witness_bound_for(2), 4);
        assert!(c.witness_bound_for(8) < 4);
    }
}
