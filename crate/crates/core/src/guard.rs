//! Size guards for the exponential engines.

use crate::error::{Error, Result};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::OnceLock;

pub const QUOTIENT_TERMS: usize = 8;
pub const BRUTE_FACTS: usize = 22;
pub const MC_SUBSET: usize = 18;
pub const SELF_JOIN_WIDTH: usize = 6;
pub const WSYM_FACTS: usize = 20;
pub const WITNESS_FACTS: usize = 12;
pub const COMPLETING_SETS: usize = 6;
pub const PERMUTATION_PLAYERS: usize = 9;

/// Subsets are stored as `u64` masks, so this one cannot be lifted.
pub const MASK_BITS: usize = 64;

static FORCED: AtomicBool = AtomicBool::new(false);

fn env_override() -> bool {
    static ENV: OnceLock<bool> = OnceLock::new();
    *ENV.get_or_init(|| std::env::var("MINSUP_GUARD_OVERRIDE").map(|v| v == "1").unwrap_or(false))
}

pub fn set_override(on: bool) {
    FORCED.store(on, Ordering::Relaxed);
}

pub fn overridden() -> bool {
    FORCED.load(Ordering::Relaxed) || env_override()
}

pub fn check(what: &'static str, size: usize, limit: usize) -> Result<()> {
    if size > limit && !overridden() {
        return Err(Error::Guard { what, size, limit });
    }
    Ok(())
}

pub fn check_mask(what: &'static str, size: usize) -> Result<()> {
    if size > MASK_BITS {
        return Err(Error::Guard {
            what,
            size,
            limit: MASK_BITS,
        });
    }
    Ok(())
}
