//! Exact orders and membership for subgroups of `GL(g, 2)`, by a
//! deterministic Schreier-Sims on the action on vectors.

mod chain;
mod closure;

use thiserror::Error;

use crate::f2linalg::{BitMat, LinalgError};

pub use chain::{bsgs_order, compare_groups, membership, same_group, Comparison, StabilizerChain};
pub use closure::{brute_closure, target_order};

/// Default largest dimension for chain construction.
pub const DEFAULT_CAP: usize = 21;

/// Environment variable overriding [`DEFAULT_CAP`].
pub const CAP_ENV: &str = "TWISTGEN_CAP";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error(
        "g={dim} exceeds the chain cap {cap} (orbit tables need about {} MiB); \
         pass --force or set TWISTGEN_CAP",
        estimate_bytes >> 20
    )]
    CapExceeded { dim: usize, cap: usize, estimate_bytes: u64 },
    #[error("closure exceeded {0} elements")]
    ClosureCap(usize),
    #[error("generator {0} is not invertible")]
    NotInvertible(usize),
    #[error("generator {0} does not preserve the intersection form")]
    NotFormPreserving(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("too many strong generators at one level")]
    TooManyGenerators,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Rough memory needed for the orbit tables at dimension `g`.
pub fn memory_estimate(g: usize) -> u64 {
    // labels plus point lists over all levels, about two full orbits
    20u64 << g.min(62)
}

/// Invertible, form-preserving generators of one dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenSet {
    dim: usize,
    gens: Vec<BitMat>,
}

impl GenSet {
    pub fn new(dim: usize, gens: Vec<BitMat>) -> Result<Self, GroupError> {
        for (i, m) in gens.iter().enumerate() {
            if m.dim() != dim {
                return Err(GroupError::DimensionMismatch(dim, m.dim()));
            }
            if !m.is_invertible() {
                return Err(GroupError::NotInvertible(i));
            }
            if !m.preserves_form() {
                return Err(GroupError::NotFormPreserving(i));
            }
        }
        Ok(Self { dim, gens })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gens(&self) -> &[BitMat] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }
}

/// Chain-construction limits.
#[derive(Clone, Default)]
pub struct BsgsConfig {
    pub cap: Option<usize>,
    pub force: bool,
    pub progress: Option<std::sync::Arc<dyn Fn(&str) + Send + Sync>>,
}

impl std::fmt::Debug for BsgsConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BsgsConfig")
            .field("cap", &self.cap())
            .field("force", &self.force)
            .finish()
    }
}

impl BsgsConfig {
    /// Cap from `TWISTGEN_CAP` if set and valid, else the default.
    pub fn from_env() -> Self {
        let cap = std::env::var(CAP_ENV).ok().and_then(|v| v.trim().parse().ok());
        Self {
            cap,
            ..Self::default()
        }
    }

    pub fn forced(mut self, force: bool) -> Self {
        self.force = force;
        self
    }

    pub fn cap(&self) -> usize {
        self.cap.unwrap_or(DEFAULT_CAP)
    }

    pub fn allows(&self, dim: usize) -> bool {
        self.force || dim <= self.cap()
    }

    pub fn check(&self, dim: usize) -> Result<(), GroupError> {
        if self.allows(dim) {
            Ok(())
        } else {
            Err(GroupError::CapExceeded {
                dim,
                cap: self.cap(),
                estimate_bytes: memory_estimate(dim),
            })
        }
    }
}

#[cfg(test)]
mod tests;
