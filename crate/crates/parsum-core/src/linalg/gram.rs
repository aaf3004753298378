//! Coordinate spaces carrying a non-standard inner product given by a Gram
//! matrix, and orthogonal projection in that metric. Every auxiliary-space
//! projection in the parallel-sum constructions goes through here.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::eigen::hermitian_eigen;
use crate::linalg::matrix::{inner, ComplexMatrix};
use crate::linalg::svd::{hermitian_psd_check, pinv};
use crate::linalg::Tolerance;

/// A coordinate space `C^dim` with inner product `<x, y> = y^H G x`.
#[derive(Debug, Clone)]
pub struct GramSpace {
    dim: usize,
    gram: ComplexMatrix,
}

impl GramSpace {
    pub fn new(gram: ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        if !hermitian_psd_check(&gram, tol)? {
            return Err(Error::NotPsd("Gram matrix of a coordinate space".into()));
        }
        Ok(Self {
            dim: gram.rows(),
            gram,
        })
    }

    /// Standard Euclidean coordinates (`G = I`).
    pub fn euclidean(dim: usize) -> Self {
        Self {
            dim,
            gram: ComplexMatrix::identity(dim),
        }
    }

    /// Diagonal Gram matrix; entries must be nonnegative.
    pub fn diagonal(entries: &[f64]) -> Self {
        debug_assert!(entries.iter().all(|&x| x >= 0.0));
        Self {
            dim: entries.len(),
            gram: ComplexMatrix::diag_real(entries),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gram(&self) -> &ComplexMatrix {
        &self.gram
    }

    /// A completed Hilbert space needs a definite metric.
    pub fn is_positive_definite(&self, tol: &Tolerance) -> bool {
        if self.dim == 0 {
            return true;
        }
        match hermitian_eigen(&self.gram) {
            Ok(e) => {
                let max = e.values.last().copied().unwrap_or(0.0);
                let min = e.values.first().copied().unwrap_or(0.0);
                max > 0.0 && min > tol.rank_rel * max
            }
            Err(_) => false,
        }
    }

    /// Direct sum: block-diagonal Gram.
    pub fn product(&self, other: &GramSpace) -> GramSpace {
        GramSpace {
            dim: self.dim + other.dim,
            gram: self.gram.block_diag(&other.gram),
        }
    }

    /// `<x, y> = y^H G x` in this metric.
    pub fn inner(&self, x: &[Complex64], y: &[Complex64]) -> Complex64 {
        inner(&self.gram.matvec(x), y)
    }

    pub fn norm(&self, x: &[Complex64]) -> f64 {
        self.inner(x, x).re.max(0.0).sqrt()
    }

    fn check_dim(&self, v: &[Complex64], what: &str) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "{what} has length {} but the space has dimension {}",
                v.len(),
                self.dim
            )));
        }
        Ok(())
    }

    /// Matrix of the orthogonal projection onto the complement of
    /// `span(spanning)` in this metric: `I - V (V^H G V)^+ V^H G`.
    ///
    /// The pseudo-inverse (rather than a factorization) tolerates numerically
    /// dependent spanning sets coming from degenerate ranges.
    pub fn complement_projector(
        &self,
        spanning: &[Vec<Complex64>],
        tol: &Tolerance,
    ) -> Result<ComplexMatrix> {
        for v in spanning {
            self.check_dim(v, "spanning vector")?;
        }
        let id = ComplexMatrix::identity(self.dim);
        if spanning.is_empty() {
            return Ok(id);
        }
        let v = ComplexMatrix::from_columns(self.dim, spanning)?;
        let vg = v.adjoint().mul(&self.gram);
        let small = vg.mul(&v).symmetrize();
        let correction = v.mul(&pinv(&small, tol)?).mul(&vg);
        Ok(id.sub(&correction))
    }

    /// Component of `target` orthogonal (in this metric) to `span(spanning)`.
    pub fn project_complement(
        &self,
        spanning: &[Vec<Complex64>],
        target: &[Complex64],
        tol: &Tolerance,
    ) -> Result<Vec<Complex64>> {
        self.check_dim(target, "target vector")?;
        if spanning.is_empty() {
            return Ok(target.to_vec());
        }
        Ok(self
            .complement_projector(spanning, tol)?
            .matvec(target))
    }

    /// Metric distance from `target` to `span(spanning)`.
    pub fn distance_to_span(
        &self,
        spanning: &[Vec<Complex64>],
        target: &[Complex64],
        tol: &Tolerance,
    ) -> Result<f64> {
        let residual = self.project_complement(spanning, target, tol)?;
        Ok(self.norm(&residual))
    }

    /// Dimension of `span(spanning)` in this metric (rank of the metric Gram
    /// of the spanning set).
    pub fn span_dim(&self, spanning: &[Vec<Complex64>], tol: &Tolerance) -> Result<usize> {
        if spanning.is_empty() {
            return Ok(0);
        }
        let v = ComplexMatrix::from_columns(self.dim, spanning)?;
        let small = v.adjoint().mul(&self.gram).mul(&v).symmetrize();
        let e = hermitian_eigen(&small)?;
        let max = e.max_abs_eigenvalue();
        let cutoff = tol.rank_rel * max;
        Ok(e.values.iter().filter(|&&l| l > cutoff && l > 0.0).count())
    }
}

/// Spec-facing free function: component of `target` gram-orthogonal to
/// `span(spanning)`.
pub fn gram_project(
    space: &GramSpace,
    spanning: &[Vec<Complex64>],
    target: &[Complex64],
    tol: &Tolerance,
) -> Result<Vec<Complex64>> {
    space.project_complement(spanning, target, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::norm;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn empty_span_returns_target() {
        let space = GramSpace::euclidean(2);
        let t = vec![c(1.0), c(2.0)];
        let p = gram_project(&space, &[], &t, &Tolerance::default()).unwrap();
        assert_eq!(p, t);
    }

    #[test]
    fn target_in_span_projects_to_zero() {
        let space = GramSpace::euclidean(2);
        let s = vec![vec![c(1.0), c(1.0)]];
        let t = vec![c(2.0), c(2.0)];
        let p = gram_project(&space, &s, &t, &Tolerance::default()).unwrap();
        assert!(norm(&p) < 1e-12);
    }

    #[test]
    fn euclidean_projection_hand_case() {
        // G = I, span {(1,1)/sqrt(2)}, target (1,0) -> (0.5, -0.5)
        let space = GramSpace::euclidean(2);
        let inv = 1.0 / 2.0_f64.sqrt();
        let s = vec![vec![c(inv), c(inv)]];
        let t = vec![c(1.0), c(0.0)];
        let p = gram_project(&space, &s, &t, &Tolerance::default()).unwrap();
        assert!((p[0] - c(0.5)).norm() < 1e-14);
        assert!((p[1] - c(-0.5)).norm() < 1e-14);
    }

    #[test]
    fn result_is_gram_orthogonal_to_span() {
        let gram = ComplexMatrix::from_real(&[&[2.0, 0.5], &[0.5, 1.0]]);
        let space = GramSpace::new(gram, &Tolerance::default()).unwrap();
        let s = vec![vec![c(1.0), c(-1.0)], vec![c(0.5), c(2.0)]];
        let t = vec![c(3.0), c(1.0)];
        let p = gram_project(&space, &s, &t, &Tolerance::default()).unwrap();
        for v in &s {
            assert!(space.inner(&p, v).norm() < 1e-12);
        }
    }

    #[test]
    fn degenerate_spanning_set_is_tolerated() {
        let space = GramSpace::euclidean(2);
        // numerically dependent spanning vectors
        let s = vec![vec![c(1.0), c(0.0)], vec![c(1.0), c(1e-14)]];
        let t = vec![c(0.0), c(1.0)];
        let p = gram_project(&space, &s, &t, &Tolerance::default()).unwrap();
        assert!((norm(&p) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let space = GramSpace::euclidean(2);
        let bad = vec![c(1.0)];
        assert!(gram_project(&space, &[], &bad, &Tolerance::default()).is_err());
    }
}
