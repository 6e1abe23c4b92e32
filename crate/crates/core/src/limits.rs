//! Size guards for the dense tables and the LP.
//!
//! Defaults can be overridden through environment variables:
//!
//! | variable                          | default    |
//! |-----------------------------------|------------|
//! | `TWOPROVER_MAX_TABLE_ENTRIES`     | 10 000 000 |
//! | `TWOPROVER_MAX_LP_VARIABLES`      | 5 000      |
//! | `TWOPROVER_MAX_LP_CONSTRAINTS`    | 20 000     |

use crate::error::{Error, Result};

pub const TABLE_ENTRIES_ENV: &str = "TWOPROVER_MAX_TABLE_ENTRIES";
pub const LP_VARIABLES_ENV: &str = "TWOPROVER_MAX_LP_VARIABLES";
pub const LP_CONSTRAINTS_ENV: &str = "TWOPROVER_MAX_LP_CONSTRAINTS";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest dense table (or enumeration) any operation may build.
    pub table_entries: u128,
    pub lp_variables: usize,
    pub lp_constraints: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            table_entries: 10_000_000,
            lp_variables: 5_000,
            lp_constraints: 20_000,
        }
    }
}

impl Limits {
    /// Defaults with any environment overrides applied. Unparseable values
    /// are ignored.
    pub fn from_env() -> Self {
        let mut limits = Limits::default();
        if let Some(v) = read_env(TABLE_ENTRIES_ENV) {
            limits.table_entries = v as u128;
        }
        if let Some(v) = read_env(LP_VARIABLES_ENV) {
            limits.lp_variables = v as usize;
        }
        if let Some(v) = read_env(LP_CONSTRAINTS_ENV) {
            limits.lp_constraints = v as usize;
        }
        limits
    }

    pub fn check_table(&self, what: &str, needed: u128) -> Result<()> {
        if needed > self.table_entries {
            return Err(Error::SizeGuard {
                what: what.to_string(),
                needed,
                limit: self.table_entries,
            });
        }
        Ok(())
    }
}

fn read_env(name: &str) -> Option<u64> {
    std::env::var(name).ok()?.trim().parse().ok()
}

/// `base^exp` saturating at `u128::MAX`.
pub fn checked_pow(base: usize, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}
