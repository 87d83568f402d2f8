//! Desk-scale caps for the exhaustive enumerators.
//!
//! Each cap can be raised (or lowered) through an environment variable.

use crate::error::{Error, Result};

pub const STRUCTURE_LEN_ENV: &str = "CANONLOOP_MAX_STRUCTURE_LEN";
pub const MATCHING_PAIRS_ENV: &str = "CANONLOOP_MAX_MATCHING_PAIRS";
pub const SHAPE_LEN_ENV: &str = "CANONLOOP_MAX_SHAPE_LEN";

pub const DEFAULT_STRUCTURE_LEN: usize = 16;
pub const DEFAULT_MATCHING_PAIRS: usize = 8;
pub const DEFAULT_SHAPE_LEN: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumLimits {
    pub structure_len: usize,
    pub matching_pairs: usize,
    pub shape_len: usize,
}

impl Default for EnumLimits {
    fn default() -> Self {
        EnumLimits {
            structure_len: DEFAULT_STRUCTURE_LEN,
            matching_pairs: DEFAULT_MATCHING_PAIRS,
            shape_len: DEFAULT_SHAPE_LEN,
        }
    }
}

fn env_or(name: &str, default: usize) -> usize {
    std::env::var(name)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(default)
}

impl EnumLimits {
    /// Defaults, overridden by any of the environment variables that parse.
    pub fn from_env() -> Self {
        EnumLimits {
            structure_len: env_or(STRUCTURE_LEN_ENV, DEFAULT_STRUCTURE_LEN),
            matching_pairs: env_or(MATCHING_PAIRS_ENV, DEFAULT_MATCHING_PAIRS),
            shape_len: env_or(SHAPE_LEN_ENV, DEFAULT_SHAPE_LEN),
        }
    }

    pub(crate) fn check_structure_len(&self, n: usize) -> Result<()> {
        check_cap("structure length", n, self.structure_len, STRUCTURE_LEN_ENV)
    }

    pub(crate) fn check_matching_pairs(&self, n: usize) -> Result<()> {
        check_cap("matching size", n, self.matching_pairs, MATCHING_PAIRS_ENV)
    }

    pub(crate) fn check_shape_len(&self, len: usize) -> Result<()> {
        check_cap("shape length", len, self.shape_len, SHAPE_LEN_ENV)
    }
}

fn check_cap(what: &'static str, value: usize, cap: usize, env: &'static str) -> Result<()> {
    if value > cap {
        Err(Error::CapExceeded {
            what,
            value,
            cap,
            env,
        })
    } else {
        Ok(())
    }
}
