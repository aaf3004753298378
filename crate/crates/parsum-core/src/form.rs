//! Parallel sum of possibly degenerate nonnegative Hermitian forms on `C^n`,
//! through the null-space quotient and the Riesz operators on the quotient
//! of the sum form.
//!
//! A form is given by its Gram matrix, `t(x, y) = y^H G x`. Degeneracy is
//! welcome: the quotient by `N_t = { x : t(x, x) = 0 }` is computed as the
//! kernel of the Gram matrix (equivalent by the Cauchy–Schwarz inequality
//! for PSD forms).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::matrix::{vec_scale, ComplexMatrix};
use crate::linalg::svd::hermitian_psd_check;
use crate::linalg::{hermitian_eigen, pinv, GramSpace, Tolerance};

/// Nonnegative Hermitian form on `C^n`, `t(x, y) = y^H gram x`.
#[derive(Debug, Clone)]
pub struct HermitianForm {
    gram: ComplexMatrix,
}

impl HermitianForm {
    pub fn new(gram: ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        if !hermitian_psd_check(&gram, tol)? {
            return Err(Error::NotPsd("Gram matrix of a Hermitian form".into()));
        }
        Ok(Self {
            gram: gram.symmetrize(),
        })
    }

    pub(crate) fn from_psd_gram(gram: ComplexMatrix) -> Self {
        Self {
            gram: gram.symmetrize(),
        }
    }

    pub fn zero(n: usize) -> Self {
        Self {
            gram: ComplexMatrix::zeros(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &ComplexMatrix {
        &self.gram
    }

    pub fn evaluate(&self, x: &[Complex64], y: &[Complex64]) -> Complex64 {
        crate::linalg::matrix::inner(&self.gram.matvec(x), y)
    }

    pub fn quadratic(&self, x: &[Complex64]) -> f64 {
        self.evaluate(x, x).re.max(0.0)
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "forms live on different spaces: {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(Self {
            gram: self.gram.add(&other.gram),
        })
    }
}

/// The quotient `C^n / N_t` realized in coordinates: a basis of
/// representatives, the coordinate map, and the inherited (positive
/// definite) Gram metric.
#[derive(Debug, Clone)]
pub struct QuotientSpace {
    /// `x` to the coordinates of `x + N_t`.
    projection_to_coords: ComplexMatrix,
    /// Coordinates to the chosen representative in `C^n`.
    lift: ComplexMatrix,
    gram: GramSpace,
}

impl QuotientSpace {
    pub fn dim(&self) -> usize {
        self.gram.dim()
    }

    pub fn gram(&self) -> &GramSpace {
        &self.gram
    }

    pub fn projection_matrix(&self) -> &ComplexMatrix {
        &self.projection_to_coords
    }

    pub fn lift_matrix(&self) -> &ComplexMatrix {
        &self.lift
    }

    /// Coordinates of `x + N_t`.
    pub fn coords(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.projection_to_coords.matvec(x)
    }

    /// A representative of the class with the given coordinates.
    pub fn representative(&self, coords: &[Complex64]) -> Vec<Complex64> {
        self.lift.matvec(coords)
    }
}

/// Quotient of `C^n` by the null space of the form.
///
/// Representatives are eigenvectors of the Gram matrix above the rank
/// cutoff, scaled so the quotient metric is numerically the identity.
pub fn quotient_space(t: &HermitianForm, tol: &Tolerance) -> Result<QuotientSpace> {
    let n = t.dim();
    let e = hermitian_eigen(t.gram())?;
    let cutoff = tol.rank_rel * e.max_abs_eigenvalue();
    let mut reps: Vec<Vec<Complex64>> = vec![];
    for (k, &l) in e.values.iter().enumerate() {
        if l > cutoff && l > 0.0 {
            reps.push(vec_scale(
                Complex64::new(1.0 / l.sqrt(), 0.0),
                &e.vectors.column(k),
            ));
        }
    }
    let lift = ComplexMatrix::from_columns(n, &reps)?;
    let t_lift = t.gram().mul(&lift);
    let gram_matrix = lift.adjoint().mul(&t_lift).symmetrize();
    let gram = GramSpace::new(gram_matrix.clone(), tol)?;
    if !gram.is_positive_definite(tol) && !reps.is_empty() {
        return Err(Error::InvariantViolation(
            "quotient Gram matrix is not positive definite".into(),
        ));
    }
    // coords(x) solve gram * c_i = <x + N, u_i + N> = U^H T x
    let projection_to_coords = pinv(&gram_matrix, tol)?.mul(&t_lift.adjoint());
    Ok(QuotientSpace {
        projection_to_coords,
        lift,
        gram,
    })
}

/// The bounded positive operators `T`, `W` on the quotient of `t + w`
/// representing the two summand forms: `<T(x+N), y+N> = t(x, y)`.
#[derive(Debug, Clone)]
pub struct RieszPair {
    space: QuotientSpace,
    t_op: ComplexMatrix,
    w_op: ComplexMatrix,
}

impl RieszPair {
    pub fn space(&self) -> &QuotientSpace {
        &self.space
    }

    pub fn t_matrix(&self) -> &ComplexMatrix {
        &self.t_op
    }

    pub fn w_matrix(&self) -> &ComplexMatrix {
        &self.w_op
    }

    /// Residual of `T + W = I` on the quotient space.
    pub fn partition_residual(&self) -> f64 {
        let id = ComplexMatrix::identity(self.space.dim());
        self.t_op.add(&self.w_op).sub(&id).frobenius_norm()
    }
}

/// Solve the Riesz representation problem for `t` and `w` inside the
/// quotient of `t + w`.
pub fn riesz_operators(t: &HermitianForm, w: &HermitianForm, tol: &Tolerance) -> Result<RieszPair> {
    let sum = t.sum(w)?;
    let space = quotient_space(&sum, tol)?;
    let gram_pinv = pinv(space.gram().gram(), tol)?;
    let lift = space.lift_matrix().clone();
    let compress =
        |form: &HermitianForm| gram_pinv.mul(&lift.adjoint().mul(&form.gram().mul(&lift)));
    let pair = RieszPair {
        t_op: compress(t),
        w_op: compress(w),
        space,
    };
    let metric_t = pair.space.gram().gram().mul(&pair.t_op);
    if !hermitian_psd_check(&metric_t, tol)? {
        return Err(Error::InvariantViolation(
            "Riesz operator of t is not positive in the quotient metric".into(),
        ));
    }
    let dim_scale = (pair.space.dim().max(1) as f64).sqrt();
    let residual = pair.partition_residual();
    if residual > tol.compare_rel * dim_scale {
        return Err(Error::InvariantViolation(format!(
            "Riesz operators do not partition the identity: residual {residual:.3e}"
        )));
    }
    Ok(pair)
}

/// Result of the quotient construction of the parallel sum, with the
/// residual between the two equal-by-construction assemblies.
#[derive(Debug, Clone)]
pub struct FormParallelSum {
    pub form: HermitianForm,
    pub route_residual: f64,
}

/// Parallel sum of two forms: build `H_t x H_w`, project away the image of
/// the diagonal embedding of the quotient of `t + w`, and read the resulting
/// operator back as a form on `C^n`. Both assemblies (through `T` and
/// through `W`) are computed and must agree.
pub fn form_parallel_sum(
    t: &HermitianForm,
    w: &HermitianForm,
    tol: &Tolerance,
) -> Result<FormParallelSum> {
    let qt = quotient_space(t, tol)?;
    let qw = quotient_space(w, tol)?;
    let riesz = riesz_operators(t, w, tol)?;
    let qtw = riesz.space();
    let (rt, rw, rtw) = (qt.dim(), qw.dim(), qtw.dim());

    // J_T (x + N_t, y + N_w) = T (x + N_{t+w}) and the analogue for W.
    let embed_t = qtw.projection_matrix().mul(qt.lift_matrix()); // rtw x rt
    let embed_w = qtw.projection_matrix().mul(qw.lift_matrix()); // rtw x rw
    let j_t = riesz
        .t_matrix()
        .mul(&embed_t)
        .hstack(&ComplexMatrix::zeros(rtw, rw));
    let j_w = ComplexMatrix::zeros(rtw, rt).hstack(&riesz.w_matrix().mul(&embed_w));
    let j = j_t.add(&j_w);

    // Canonical adjoint: J^*(x + N_{t+w}) = (x + N_t, x + N_w).
    let j_star = qt
        .projection_matrix()
        .mul(qtw.lift_matrix())
        .vstack(&qw.projection_matrix().mul(qtw.lift_matrix()));

    let product = qt.gram().product(qw.gram());
    // The canonical adjoint must be the metric adjoint:
    // J^H G_{t+w} = G_{t x w} J^*.
    let adjoint_residual = j
        .adjoint()
        .mul(qtw.gram().gram())
        .sub(&product.gram().mul(&j_star))
        .frobenius_norm();
    let metric_scale = qtw.gram().gram().frobenius_norm().max(1.0);
    if adjoint_residual > tol.compare_rel * metric_scale {
        return Err(Error::InvariantViolation(format!(
            "quotient adjoint identity fails: residual {adjoint_residual:.3e}"
        )));
    }

    let p = product.complement_projector(&j_star.columns(), tol)?;
    let product_gram_pinv = pinv(product.gram(), tol)?;
    let j_t_star = product_gram_pinv.mul(&j_t.adjoint().mul(qtw.gram().gram()));
    let j_w_star = product_gram_pinv.mul(&j_w.adjoint().mul(qtw.gram().gram()));

    let op_t = j_t.mul(&p).mul(&j_t_star); // operator on the quotient of t + w
    let op_w = j_w.mul(&p).mul(&j_w_star);
    let scale = t
        .gram()
        .frobenius_norm()
        .max(w.gram().frobenius_norm())
        .max(f64::MIN_POSITIVE);
    let route_residual = op_t.sub(&op_w).frobenius_norm();
    if route_residual > tol.compare_rel * scale {
        return Err(Error::RouteDisagreement {
            context: "form parallel sum, T-route vs W-route".into(),
            residual: route_residual,
            tolerance: tol.compare_rel * scale,
        });
    }

    // (t:w)(x, y) = <Op (x + N), y + N>_{t+w}, read back as an n x n Gram.
    let proj = qtw.projection_matrix();
    let gram_out = proj
        .adjoint()
        .mul(qtw.gram().gram())
        .mul(&op_t)
        .mul(proj)
        .symmetrize();

    let e = hermitian_eigen(&gram_out)?;
    let min = e.values.first().copied().unwrap_or(0.0);
    let max = e.values.last().copied().unwrap_or(0.0);
    if min < -tol.rank_rel * max.max(scale) {
        return Err(Error::InvariantViolation(format!(
            "form parallel sum produced a non-PSD Gram (min eigenvalue {min:.3e})"
        )));
    }
    Ok(FormParallelSum {
        form: HermitianForm::from_psd_gram(gram_out),
        route_residual,
    })
}

/// Closed-form evaluation of `inf_y { t(x-y, x-y) + w(y, y) }`: the
/// minimizer solves `(T_g + W_g) y = T_g x`; the objective is evaluated
/// directly at that point.
pub fn form_infimum(
    t: &HermitianForm,
    w: &HermitianForm,
    x: &[Complex64],
    tol: &Tolerance,
) -> Result<f64> {
    let sum = t.sum(w)?;
    if x.len() != t.dim() {
        return Err(Error::DimensionMismatch(
            "vector length does not match the form dimension".into(),
        ));
    }
    let y = pinv(sum.gram(), tol)?.matvec(&t.gram().matvec(x));
    let x_minus_y = crate::linalg::matrix::vec_sub(x, &y);
    Ok(t.quadratic(&x_minus_y) + w.quadratic(&y))
}
