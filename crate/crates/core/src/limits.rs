use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Guardrails for the dense oracle paths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Largest matrix side length any dense operation will allocate.
    pub max_dense_dim: usize,
    /// Largest Kraus enumeration `(M+1)^K` accepted.
    pub max_kraus: usize,
    /// Largest state-vector width, in qubits, for circuit execution and
    /// amplitude estimation.
    pub max_statevector_qubits: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_dense_dim: 4096,
            max_kraus: 1 << 16,
            max_statevector_qubits: 14,
        }
    }
}

static MAX_DENSE_DIM: AtomicUsize = AtomicUsize::new(4096);
static MAX_KRAUS: AtomicUsize = AtomicUsize::new(1 << 16);
static MAX_SV_QUBITS: AtomicUsize = AtomicUsize::new(14);

impl Limits {
    /// The process-wide limits in effect.
    pub fn current() -> Self {
        Limits {
            max_dense_dim: MAX_DENSE_DIM.load(Ordering::Relaxed),
            max_kraus: MAX_KRAUS.load(Ordering::Relaxed),
            max_statevector_qubits: MAX_SV_QUBITS.load(Ordering::Relaxed),
        }
    }

    /// Replaces the process-wide limits.
    pub fn install(self) {
        MAX_DENSE_DIM.store(self.max_dense_dim, Ordering::Relaxed);
        MAX_KRAUS.store(self.max_kraus, Ordering::Relaxed);
        MAX_SV_QUBITS.store(self.max_statevector_qubits, Ordering::Relaxed);
    }
}

pub(crate) fn check_dense_dim(dim: usize) -> Result<()> {
    let max = MAX_DENSE_DIM.load(Ordering::Relaxed);
    if dim > max {
        return Err(Error::Ceiling { dim, max });
    }
    Ok(())
}

pub(crate) fn check_statevector_qubits(qubits: usize) -> Result<()> {
    let max = MAX_SV_QUBITS.load(Ordering::Relaxed);
    if qubits > max {
        return Err(Error::Ceiling {
            dim: 1usize.checked_shl(qubits as u32).unwrap_or(usize::MAX),
            max: 1usize << max,
        });
    }
    Ok(())
}
