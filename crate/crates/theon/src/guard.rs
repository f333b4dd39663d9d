//! Resource guard shared by the enumeration kernels.
//!
//! The limit defaults to 10^7 nodes and can be overridden with the
//! `THEON_GUARD` environment variable.

use crate::{Error, Result};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::OnceLock;

pub const DEFAULT_LIMIT: u64 = 10_000_000;

/// The active node limit.
pub fn limit() -> u64 {
    static LIMIT: OnceLock<u64> = OnceLock::new();
    *LIMIT.get_or_init(|| {
        std::env::var("THEON_GUARD")
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|v| *v >= 1.0)
            .map(|v| v as u64)
            .unwrap_or(DEFAULT_LIMIT)
    })
}

/// A node counter that fails once the limit is crossed. Safe to share
/// between worker threads.
#[derive(Debug)]
pub struct Guard {
    used: AtomicU64,
    limit: u64,
}

impl Default for Guard {
    fn default() -> Self {
        Self::new()
    }
}

impl Guard {
    pub fn new() -> Self {
        Self::with_limit(limit())
    }

    pub fn with_limit(limit: u64) -> Self {
        Guard { used: AtomicU64::new(0), limit }
    }

    pub fn tick(&self, n: u64) -> Result<()> {
        let used = self.used.fetch_add(n, Ordering::Relaxed) + n;
        if used > self.limit {
            Err(Error::Guard(self.limit))
        } else {
            Ok(())
        }
    }

    /// Checks an up-front estimate without consuming budget.
    pub fn check(&self, estimate: u128) -> Result<()> {
        if estimate > self.limit as u128 {
            Err(Error::Guard(self.limit))
        } else {
            Ok(())
        }
    }
}
