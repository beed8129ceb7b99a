//! Shared resource budgets for the expensive kernels.
//!
//! A `Budget` is a cloneable handle over atomic counters. Basis computations
//! charge one unit per S-pair reduction, linear algebra charges one unit per
//! matrix cell it touches, and long runs can carry a soft wall-clock deadline.
//! Exhausting any limit aborts the operation with `Error::Budget` so callers
//! can distinguish "ran out of budget" from a negative mathematical verdict.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Instant;

use crate::{Error, Result};

struct Inner {
    gb_step_limit: u64,
    cell_limit: u64,
    gb_steps: AtomicU64,
    cells: AtomicU64,
    deadline: Option<Instant>,
}

/// Cloneable budget handle; clones share the same counters.
#[derive(Clone)]
pub struct Budget {
    inner: Arc<Inner>,
}

impl Budget {
    /// Budget with no limits; counters still accumulate for reporting.
    pub fn unlimited() -> Self {
        Self::new(None, None, None)
    }

    /// Budget with optional limits on S-pair reductions, matrix cells touched,
    /// and wall-clock seconds.
    pub fn new(gb_steps: Option<u64>, cells: Option<u64>, seconds: Option<u64>) -> Self {
        Budget {
            inner: Arc::new(Inner {
                gb_step_limit: gb_steps.unwrap_or(u64::MAX),
                cell_limit: cells.unwrap_or(u64::MAX),
                gb_steps: AtomicU64::new(0),
                cells: AtomicU64::new(0),
                deadline: seconds.map(|s| Instant::now() + std::time::Duration::from_secs(s)),
            }),
        }
    }

    /// Charge one S-pair reduction.
    pub fn charge_gb_step(&self) -> Result<()> {
        let used = self.inner.gb_steps.fetch_add(1, Ordering::Relaxed) + 1;
        if used > self.inner.gb_step_limit {
            return Err(Error::Budget(format!(
                "basis step limit {} reached",
                self.inner.gb_step_limit
            )));
        }
        self.check_deadline()
    }

    /// Charge `n` matrix cells.
    pub fn charge_cells(&self, n: u64) -> Result<()> {
        let used = self.inner.cells.fetch_add(n, Ordering::Relaxed) + n;
        if used > self.inner.cell_limit {
            return Err(Error::Budget(format!(
                "matrix cell limit {} reached",
                self.inner.cell_limit
            )));
        }
        Ok(())
    }

    /// Fail once the soft wall-clock deadline has passed.
    pub fn check_deadline(&self) -> Result<()> {
        if let Some(deadline) = self.inner.deadline {
            if Instant::now() > deadline {
                return Err(Error::Budget("wall-clock limit reached".into()));
            }
        }
        Ok(())
    }

    /// Total S-pair reductions charged so far.
    pub fn gb_steps_used(&self) -> u64 {
        self.inner.gb_steps.load(Ordering::Relaxed)
    }

    /// Total matrix cells charged so far.
    pub fn cells_used(&self) -> u64 {
        self.inner.cells.load(Ordering::Relaxed)
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::unlimited()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unlimited_budget_never_trips() {
        let b = Budget::unlimited();
        for _ in 0..1000 {
            b.charge_gb_step().unwrap();
            b.charge_cells(1 << 20).unwrap();
        }
        assert_eq!(b.gb_steps_used(), 1000);
    }

    #[test]
    fn limits_trip_with_distinct_messages() {
        let b = Budget::new(Some(2), Some(10), None);
        b.charge_gb_step().unwrap();
        b.charge_gb_step().unwrap();
        let err = b.charge_gb_step().unwrap_err();
        assert!(matches!(err, Error::Budget(ref m) if m.contains("basis step")));
        let err = b.charge_cells(11).unwrap_err();
        assert!(matches!(err, Error::Budget(ref m) if m.contains("cell limit")));
    }

    #[test]
    fn clones_share_counters() {
        let b = Budget::new(Some(3), None, None);
        let c = b.clone();
        b.charge_gb_step().unwrap();
        c.charge_gb_step().unwrap();
        b.charge_gb_step().unwrap();
        assert!(c.charge_gb_step().is_err());
    }
}
