//! Parallel sum of positive semidefinite operators on `C^n`.
//!
//! Five genuinely independent constructions of `A : B` live in
//! [`routes`]: the pseudo-inverse oracle `A (A+B)^+ B`, the projection
//! factorization through the product of the auxiliary spaces of `A` and `B`,
//! the contraction factorization `A^{1/2} S_A S_B^* B^{1/2}` through the
//! auxiliary space of `A + B`, the `hat` factorization through the operators
//! `S^* S`, and the defect factorization `A^{1/2}(I - S_A S_A^*) A^{1/2}`.
//! Disagreement between any two routes beyond tolerance is a hard error, not
//! a warning.

pub mod routes;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::matrix::{vec_scale, ComplexMatrix};
use crate::linalg::svd::{hermitian_psd_check, sqrt_psd};
use crate::linalg::{hermitian_eigen, GramSpace, Tolerance};

pub use routes::{
    defect_range_report, fillmore_williams_check, parallel_sum_contraction, parallel_sum_defect,
    parallel_sum_hat, parallel_sum_oracle, parallel_sum_projection, quadratic_form_inf,
    quadratic_form_sup, DefectRangeReport, QuadraticInfimum, RangeWitness, Route,
};

/// An `n x n` Hermitian positive semidefinite operator.
///
/// Construction validates the PSD property and stores the Hermitian part, so
/// downstream code can rely on exact symmetry of the entries.
#[derive(Debug, Clone)]
pub struct PsdOperator {
    matrix: ComplexMatrix,
}

impl PsdOperator {
    pub fn new(matrix: ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        if !matrix.all_finite() {
            return Err(Error::InvalidInput("operator entries must be finite".into()));
        }
        if !hermitian_psd_check(&matrix, tol)? {
            return Err(Error::NotPsd(format!(
                "{}x{} operator failed the Hermitian PSD check",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self {
            matrix: matrix.symmetrize(),
        })
    }

    /// Accept an assembled route output: symmetrize, then validate positivity
    /// relative to the scale of the inputs it was assembled from.
    pub(crate) fn from_assembly(
        matrix: ComplexMatrix,
        scale: f64,
        context: &str,
        tol: &Tolerance,
    ) -> Result<Self> {
        let sym = matrix.symmetrize();
        let e = hermitian_eigen(&sym)?;
        let max = e.values.last().copied().unwrap_or(0.0);
        let min = e.values.first().copied().unwrap_or(0.0);
        if min < -tol.rank_rel * max.max(scale) {
            return Err(Error::InvariantViolation(format!(
                "{context}: assembled parallel sum has eigenvalue {min:.3e} below the PSD floor"
            )));
        }
        Ok(Self { matrix: sym })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            matrix: ComplexMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_same_dim(self, other)?;
        Ok(Self {
            matrix: self.matrix.add(&other.matrix),
        })
    }

    /// `<Ax, x>` (clamped at zero against rounding).
    pub fn quadratic_form(&self, x: &[Complex64]) -> f64 {
        crate::linalg::matrix::inner(&self.matrix.matvec(x), x)
            .re
            .max(0.0)
    }

    pub fn sqrt(&self, tol: &Tolerance) -> Result<ComplexMatrix> {
        sqrt_psd(&self.matrix, tol)
    }
}

pub(crate) fn check_same_dim(a: &PsdOperator, b: &PsdOperator) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "operators act on different spaces: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

/// Finite-dimensional realization of the auxiliary Hilbert space of a PSD
/// operator `A`: the range of `A` carrying the inner product
/// `<Ax, Ay>_A = <Ax, y>`.
///
/// The basis is `{A u_i}` for preimages `u_i = v_i / sqrt(lambda_i)` built
/// from the eigenvectors of `A` above the rank cutoff. The scaling makes the
/// Gram matrix numerically the identity, so no auxiliary-space computation
/// ever divides by a small kept eigenvalue. Completion is the identity here:
/// finite-dimensional inner-product spaces are complete, so no route is
/// allowed to fabricate extra dimensions.
#[derive(Debug, Clone)]
pub struct InducedSpace {
    basis_preimages: Vec<Vec<Complex64>>,
    gram: GramSpace,
    /// Matrix of the embedding `J`: coordinates `c` to `sum_i c_i A u_i`.
    embed: ComplexMatrix,
    /// Matrix of `J^*`: `x` to the coordinates of `Ax` (the Gram solve is
    /// folded in at construction).
    adjoint: ComplexMatrix,
}

impl InducedSpace {
    pub fn dim(&self) -> usize {
        self.gram.dim()
    }

    pub fn gram(&self) -> &GramSpace {
        &self.gram
    }

    pub fn basis_preimages(&self) -> &[Vec<Complex64>] {
        &self.basis_preimages
    }

    pub fn embed_matrix(&self) -> &ComplexMatrix {
        &self.embed
    }

    pub fn adjoint_matrix(&self) -> &ComplexMatrix {
        &self.adjoint
    }

    /// `J` applied to coordinates.
    pub fn embed(&self, coords: &[Complex64]) -> Vec<Complex64> {
        self.embed.matvec(coords)
    }

    /// `J^* x = Ax` in coordinates.
    pub fn adjoint_coords(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.adjoint.matvec(x)
    }

    /// Matrix of the preimage columns `u_i`.
    pub fn preimage_matrix(&self) -> ComplexMatrix {
        let n = self.embed.rows();
        ComplexMatrix::from_columns(n, &self.basis_preimages)
            .expect("preimages share the ambient dimension")
    }
}

/// Build the auxiliary space of `A`. The zero operator yields the
/// zero-dimensional space.
pub fn induced_space(a: &PsdOperator, tol: &Tolerance) -> Result<InducedSpace> {
    let n = a.dim();
    let e = hermitian_eigen(a.matrix())?;
    let cutoff = tol.rank_rel * e.max_abs_eigenvalue();
    let mut preimages: Vec<Vec<Complex64>> = vec![];
    for (k, &l) in e.values.iter().enumerate() {
        if l > cutoff && l > 0.0 {
            let scale = Complex64::new(1.0 / l.sqrt(), 0.0);
            preimages.push(vec_scale(scale, &e.vectors.column(k)));
        }
    }
    let u = ComplexMatrix::from_columns(n, &preimages)?;
    let embed = a.matrix().mul(&u);
    // Gram entries <A u_j, u_i> = u_i^H A u_j; identity up to rounding by the
    // preimage scaling, but computed honestly and solved against.
    let gram_matrix = u.adjoint().mul(&embed).symmetrize();
    let gram = GramSpace::new(gram_matrix.clone(), tol)?;
    if !gram.is_positive_definite(tol) && !preimages.is_empty() {
        return Err(Error::InvariantViolation(
            "induced-space Gram matrix is not positive definite".into(),
        ));
    }
    let adjoint = crate::linalg::pinv(&gram_matrix, tol)?.mul(&embed.adjoint());

    let space = InducedSpace {
        basis_preimages: preimages,
        gram,
        embed,
        adjoint,
    };

    // canonical factorization J J^* = A
    let reassembled = space.embed.mul(&space.adjoint);
    let residual = reassembled.rel_distance(a.matrix());
    if residual > tol.compare_rel {
        return Err(Error::InvariantViolation(format!(
            "induced space does not factor its operator: residual {residual:.3e}"
        )));
    }
    Ok(space)
}

/// The contraction pair `(S_A, S_B)` on the auxiliary space of `A + B`,
/// defined on basis coordinates by sending the `i`-th coordinate to
/// `A^{1/2} u_i`, together with `hat A = S_A^* S_A` and `hat B = S_B^* S_B`.
#[derive(Debug, Clone)]
pub struct ContractionPair {
    space: InducedSpace,
    s_a: ComplexMatrix,
    s_b: ComplexMatrix,
    hat_a: ComplexMatrix,
    hat_b: ComplexMatrix,
    sqrt_a: ComplexMatrix,
    sqrt_b: ComplexMatrix,
}

impl ContractionPair {
    pub fn space(&self) -> &InducedSpace {
        &self.space
    }

    pub fn s_a(&self) -> &ComplexMatrix {
        &self.s_a
    }

    pub fn s_b(&self) -> &ComplexMatrix {
        &self.s_b
    }

    pub fn hat_a(&self) -> &ComplexMatrix {
        &self.hat_a
    }

    pub fn hat_b(&self) -> &ComplexMatrix {
        &self.hat_b
    }

    pub fn sqrt_a(&self) -> &ComplexMatrix {
        &self.sqrt_a
    }

    pub fn sqrt_b(&self) -> &ComplexMatrix {
        &self.sqrt_b
    }

    /// Metric adjoint `S^*` as a coordinate matrix (Gram solve of `S^H`).
    fn star(&self, s: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
        let gram_pinv = crate::linalg::pinv(self.space.gram().gram(), tol)?;
        Ok(gram_pinv.mul(&s.adjoint()))
    }

    pub fn s_a_star(&self, tol: &Tolerance) -> Result<ComplexMatrix> {
        self.star(&self.s_a, tol)
    }

    pub fn s_b_star(&self, tol: &Tolerance) -> Result<ComplexMatrix> {
        self.star(&self.s_b, tol)
    }

    /// Operator norm of `S` from the Gram metric into the Euclidean one.
    /// Contractivity means this never exceeds 1.
    pub fn contraction_norm(&self, s: &ComplexMatrix, tol: &Tolerance) -> Result<f64> {
        // sigma_max(S G^{-1/2}) via the largest eigenvalue of
        // G^{-1/2} S^H S G^{-1/2}.
        let e = hermitian_eigen(self.space.gram().gram())?;
        let cutoff = tol.rank_rel * e.max_abs_eigenvalue();
        let half_inv = e.rebuild(|l| if l > cutoff { 1.0 / l.sqrt() } else { 0.0 });
        let m = half_inv.mul(&s.adjoint()).mul(&s.mul(&half_inv)).symmetrize();
        let lam = hermitian_eigen(&m)?.values.last().copied().unwrap_or(0.0);
        Ok(lam.max(0.0).sqrt())
    }

    /// Residual of `hat A + hat B = I` on the auxiliary space.
    pub fn hat_identity_residual(&self) -> f64 {
        let r = self.space.dim();
        self.hat_a
            .add(&self.hat_b)
            .sub(&ComplexMatrix::identity(r))
            .frobenius_norm()
    }

    /// Residual of the coordinate identity
    /// `S_A^* A^{1/2} + S_B^* B^{1/2} = J^*` for the sum space.
    pub fn lemma_residual(&self, tol: &Tolerance) -> Result<f64> {
        let lhs = self
            .s_a_star(tol)?
            .mul(&self.sqrt_a)
            .add(&self.s_b_star(tol)?.mul(&self.sqrt_b));
        let scale = self.space.adjoint_matrix().frobenius_norm().max(1.0);
        Ok(lhs.sub(self.space.adjoint_matrix()).frobenius_norm() / scale)
    }
}

/// Build the contraction pair for `(A, B)`; validates contractivity and the
/// `hat A + hat B = I` identity.
pub fn contraction_pair(a: &PsdOperator, b: &PsdOperator, tol: &Tolerance) -> Result<ContractionPair> {
    check_same_dim(a, b)?;
    let sum = a.add(b)?;
    let space = induced_space(&sum, tol)?;
    let u = space.preimage_matrix();
    let sqrt_a = a.sqrt(tol)?;
    let sqrt_b = b.sqrt(tol)?;
    let s_a = sqrt_a.mul(&u);
    let s_b = sqrt_b.mul(&u);

    let gram_pinv = crate::linalg::pinv(space.gram().gram(), tol)?;
    let hat_a = gram_pinv.mul(&s_a.adjoint().mul(&s_a));
    let hat_b = gram_pinv.mul(&s_b.adjoint().mul(&s_b));

    let pair = ContractionPair {
        space,
        s_a,
        s_b,
        hat_a,
        hat_b,
        sqrt_a,
        sqrt_b,
    };

    for (name, s) in [("S_A", &pair.s_a), ("S_B", &pair.s_b)] {
        let norm = pair.contraction_norm(s, tol)?;
        if norm > 1.0 + 1e-10 {
            return Err(Error::InvariantViolation(format!(
                "{name} is not contractive: norm {norm:.12}"
            )));
        }
    }
    let residual = pair.hat_identity_residual();
    let dim_scale = (pair.space.dim().max(1) as f64).sqrt();
    if residual > tol.compare_rel * dim_scale {
        return Err(Error::InvariantViolation(format!(
            "hat A + hat B differs from the identity by {residual:.3e}"
        )));
    }
    Ok(pair)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::basis_vec;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn psd(rows: &[&[f64]]) -> PsdOperator {
        PsdOperator::new(ComplexMatrix::from_real(rows), &tol()).unwrap()
    }

    #[test]
    fn construction_rejects_non_psd() {
        let m = ComplexMatrix::from_real(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert!(matches!(
            PsdOperator::new(m, &tol()),
            Err(Error::NotPsd(_))
        ));
    }

    #[test]
    fn induced_space_of_zero_operator_is_empty() {
        let a = PsdOperator::zero(2);
        let s = induced_space(&a, &tol()).unwrap();
        assert_eq!(s.dim(), 0);
        assert!(s.embed_matrix().is_empty());
    }

    #[test]
    fn induced_space_of_identity() {
        let a = PsdOperator::identity(2);
        let s = induced_space(&a, &tol()).unwrap();
        assert_eq!(s.dim(), 2);
        assert!(s
            .gram()
            .gram()
            .rel_distance(&ComplexMatrix::identity(2))
            < 1e-12);
    }

    #[test]
    fn induced_space_rank_one() {
        let a = psd(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let s = induced_space(&a, &tol()).unwrap();
        assert_eq!(s.dim(), 1);
        // J J^* = A is validated inside the constructor; check the adjoint
        // property J^* x = Ax here: embedding the coordinates of J^* e_0
        // must reproduce the first column of A.
        let coords = s.adjoint_coords(&basis_vec(2, 0));
        let ax = s.embed(&coords);
        let col = a.matrix().column(0);
        for (got, want) in ax.iter().zip(&col) {
            assert!((got - want).norm() < 1e-12);
        }
    }

    #[test]
    fn contraction_pair_identity_and_zero() {
        // A = I, B = 0: S_A embeds the whole space, S_B = 0, hat A = I.
        let a = PsdOperator::identity(2);
        let b = PsdOperator::zero(2);
        let pair = contraction_pair(&a, &b, &tol()).unwrap();
        assert_eq!(pair.space().dim(), 2);
        assert!(pair.s_b().frobenius_norm() < 1e-12);
        assert!(pair.hat_a().rel_distance(&ComplexMatrix::identity(2)) < 1e-10);
        assert!(pair.hat_b().frobenius_norm() < 1e-10);
    }

    #[test]
    fn contraction_pair_equal_operators_halve() {
        // A = B = I: hat A = hat B = I/2 on the sum space.
        let a = PsdOperator::identity(2);
        let pair = contraction_pair(&a, &a.clone(), &tol()).unwrap();
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(pair.hat_a().rel_distance(&half) < 1e-10);
        assert!(pair.hat_b().rel_distance(&half) < 1e-10);
    }

    #[test]
    fn lemma_identity_on_a_fixed_pair() {
        let a = psd(&[&[2.0, 1.0], &[1.0, 1.0]]);
        let b = PsdOperator::identity(2);
        let pair = contraction_pair(&a, &b, &tol()).unwrap();
        assert!(pair.lemma_residual(&tol()).unwrap() < 1e-10);
        assert!(pair.hat_identity_residual() < 1e-10);
    }
}
