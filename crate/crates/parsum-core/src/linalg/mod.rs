//! Complex dense linear algebra kernel: Hermitian eigendecomposition,
//! pseudo-inverse, PSD square root, rank-revealing range bases, and
//! projections in Gram-metric spaces.

pub mod eigen;
pub mod gram;
pub mod matrix;
pub mod svd;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use eigen::{hermitian_eigen, HermitianEigen};
pub use gram::{gram_project, GramSpace};
pub use matrix::ComplexMatrix;
pub use svd::{
    hermitian_psd_check, pinv, range_basis, sqrt_psd, subspace_equal, subspace_intersect, svd,
    Svd,
};

/// Numerical thresholds shared by every construction.
///
/// `rank_rel` scales the single rank cutoff applied to eigen/singular values
/// (`rank_rel * sigma_max`); `compare_rel` scales equality comparisons between
/// computed quantities.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tolerance {
    pub rank_rel: f64,
    pub compare_rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rank_rel: 1e-10,
            compare_rel: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(rank_rel: f64, compare_rel: f64) -> Result<Self> {
        let t = Self {
            rank_rel,
            compare_rel,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("rank_rel", self.rank_rel), ("compare_rel", self.compare_rel)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidInput(format!(
                    "tolerance {name} must lie strictly between 0 and 1, got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_bounds() {
        assert!(Tolerance::new(1e-10, 1e-8).is_ok());
        assert!(Tolerance::new(0.0, 1e-8).is_err());
        assert!(Tolerance::new(1e-10, 1.0).is_err());
        assert!(Tolerance::new(-1e-10, 0.5).is_err());
    }
}
