//! One-sided Jacobi singular value decomposition for general complex
//! matrices, plus the rank-revealing operations built on it: pseudo-inverse,
//! PSD square root, range bases, and subspace comparison.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::eigen::hermitian_eigen;
use crate::linalg::matrix::ComplexMatrix;
use crate::linalg::Tolerance;

/// `M = U diag(sigma) V^H` with `k = min(rows, cols)` columns in `U` and `V`,
/// singular values descending. Columns of `U` beyond the numerical rank are
/// zero when the corresponding singular value vanishes.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub sigma: Vec<f64>,
    pub v: ComplexMatrix,
}

const MAX_SWEEPS: usize = 60;

pub fn svd(m: &ComplexMatrix) -> Result<Svd> {
    if m.rows() < m.cols() {
        let t = svd(&m.adjoint())?;
        return Ok(Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        });
    }
    let rows = m.rows();
    let cols = m.cols();
    if cols == 0 {
        return Ok(Svd {
            u: ComplexMatrix::zeros(rows, 0),
            sigma: vec![],
            v: ComplexMatrix::zeros(0, 0),
        });
    }

    let mut b = m.clone();
    let mut v = ComplexMatrix::identity(cols);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                if orthogonalize_pair(&mut b, &mut v, p, q) {
                    rotated = true;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            context: "one-sided Jacobi SVD".into(),
            sweeps: MAX_SWEEPS,
        });
    }

    // Extract singular values and left vectors, sorted descending.
    let mut sig: Vec<(f64, usize)> = (0..cols)
        .map(|j| {
            let s = (0..rows).map(|i| b[(i, j)].norm_sqr()).sum::<f64>().sqrt();
            (s, j)
        })
        .collect();
    sig.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());

    let mut u = ComplexMatrix::zeros(rows, cols);
    let mut vs = ComplexMatrix::zeros(cols, cols);
    let mut sigma = Vec::with_capacity(cols);
    for (dst, &(s, src)) in sig.iter().enumerate() {
        sigma.push(s);
        if s > 0.0 {
            for i in 0..rows {
                u[(i, dst)] = b[(i, src)] / s;
            }
        }
        for i in 0..cols {
            vs[(i, dst)] = v[(i, src)];
        }
    }
    Ok(Svd { u, sigma, v: vs })
}

/// Jacobi rotation making columns `p` and `q` of `b` orthogonal.
/// Returns false when the pair was already orthogonal to working precision.
fn orthogonalize_pair(b: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) -> bool {
    let rows = b.rows();
    let mut alpha = 0.0;
    let mut beta = 0.0;
    let mut gamma = Complex64::new(0.0, 0.0);
    for i in 0..rows {
        let bp = b[(i, p)];
        let bq = b[(i, q)];
        alpha += bp.norm_sqr();
        beta += bq.norm_sqr();
        gamma += bq.conj() * bp; // column Gram entry <b_p, b_q>
    }
    let r = gamma.norm();
    if r <= f64::EPSILON * (alpha * beta).sqrt() || alpha == 0.0 || beta == 0.0 {
        return false;
    }
    let phi = gamma / r;
    let tau = (beta - alpha) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let gqp = -s * phi.conj();
    let gqq = c * phi.conj();

    for i in 0..rows {
        let bp = b[(i, p)];
        let bq = b[(i, q)];
        b[(i, p)] = bp * c + bq * gqp;
        b[(i, q)] = bp * s + bq * gqq;
    }
    for i in 0..v.rows() {
        let vp = v[(i, p)];
        let vq = v[(i, q)];
        v[(i, p)] = vp * c + vq * gqp;
        v[(i, q)] = vp * s + vq * gqq;
    }
    true
}

/// Is `m` Hermitian at (essentially) working precision? Used to route
/// Hermitian inputs through the eigensolver instead of the general SVD.
fn nearly_hermitian(m: &ComplexMatrix) -> bool {
    if !m.is_square() {
        return false;
    }
    let scale = m.max_abs();
    if scale == 0.0 {
        return true;
    }
    let n = m.rows();
    for i in 0..n {
        for j in i..n {
            if (m[(i, j)] - m[(j, i)].conj()).norm() > 64.0 * f64::EPSILON * scale {
                return false;
            }
        }
    }
    true
}

/// Moore–Penrose pseudo-inverse. Singular values (or Hermitian eigenvalue
/// magnitudes) below `rank_rel * sigma_max` are treated as zero.
pub fn pinv(m: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    if nearly_hermitian(m) {
        let e = hermitian_eigen(m)?;
        let cutoff = tol.rank_rel * e.max_abs_eigenvalue();
        return Ok(e.rebuild(|l| if l.abs() > cutoff { 1.0 / l } else { 0.0 }));
    }
    let dec = svd(m)?;
    let smax = dec.sigma.first().copied().unwrap_or(0.0);
    let cutoff = tol.rank_rel * smax;
    // V diag(1/sigma) U^H
    let k = dec.sigma.len();
    let mut out = ComplexMatrix::zeros(m.cols(), m.rows());
    for idx in 0..k {
        let s = dec.sigma[idx];
        if s <= cutoff || s == 0.0 {
            continue;
        }
        let inv = 1.0 / s;
        let vc = dec.v.column(idx);
        let uc = dec.u.column(idx);
        for i in 0..m.cols() {
            for j in 0..m.rows() {
                out[(i, j)] += vc[i] * uc[j].conj() * inv;
            }
        }
    }
    Ok(out)
}

/// True iff `m` is Hermitian within `compare_rel` and its Hermitian part has
/// no eigenvalue below `-rank_rel * lambda_max`.
pub fn hermitian_psd_check(m: &ComplexMatrix, tol: &Tolerance) -> Result<bool> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "PSD check needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let asym = m.sub(&m.adjoint()).frobenius_norm();
    if asym > tol.compare_rel * m.frobenius_norm() {
        return Ok(false);
    }
    let e = hermitian_eigen(m)?;
    let max = e.values.last().copied().unwrap_or(0.0);
    let min = e.values.first().copied().unwrap_or(0.0);
    Ok(min >= -tol.rank_rel * max)
}

/// Hermitian PSD square root via eigendecomposition; negative rounding
/// eigenvalues are clamped to zero.
pub fn sqrt_psd(m: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    if !hermitian_psd_check(m, tol)? {
        return Err(Error::NotPsd("square root of a non-PSD matrix".into()));
    }
    let e = hermitian_eigen(m)?;
    Ok(e.rebuild(|l| if l > 0.0 { l.sqrt() } else { 0.0 }).symmetrize())
}

/// Orthonormal basis of the column space; length equals the numerical rank.
pub fn range_basis(m: &ComplexMatrix, tol: &Tolerance) -> Result<Vec<Vec<Complex64>>> {
    if m.is_empty() {
        return Ok(vec![]);
    }
    if nearly_hermitian(m) {
        let e = hermitian_eigen(m)?;
        let cutoff = tol.rank_rel * e.max_abs_eigenvalue();
        let mut basis: Vec<Vec<Complex64>> = vec![];
        for (k, &l) in e.values.iter().enumerate() {
            if l.abs() > cutoff {
                basis.push(e.vectors.column(k));
            }
        }
        return Ok(basis);
    }
    let dec = svd(m)?;
    let smax = dec.sigma.first().copied().unwrap_or(0.0);
    let cutoff = tol.rank_rel * smax;
    Ok(dec
        .sigma
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > cutoff && s > 0.0)
        .map(|(k, _)| dec.u.column(k))
        .collect())
}

fn check_orthonormal(basis: &[Vec<Complex64>], what: &str) -> Result<()> {
    for (i, u) in basis.iter().enumerate() {
        for (j, v) in basis.iter().enumerate() {
            let p = crate::linalg::matrix::inner(u, v);
            let expect = if i == j { 1.0 } else { 0.0 };
            if (p - Complex64::new(expect, 0.0)).norm() > 1e-6 {
                return Err(Error::InvalidInput(format!(
                    "{what} basis is not orthonormal (entry {i},{j})"
                )));
            }
        }
    }
    Ok(())
}

fn ambient_dim(u: &[Vec<Complex64>], v: &[Vec<Complex64>]) -> Result<Option<usize>> {
    let du = u.first().map(Vec::len);
    let dv = v.first().map(Vec::len);
    match (du, dv) {
        (Some(a), Some(b)) if a != b => Err(Error::DimensionMismatch(format!(
            "subspace ambient dimensions differ: {a} vs {b}"
        ))),
        (a, b) => Ok(a.or(b)),
    }
}

fn projector(basis: &[Vec<Complex64>], n: usize) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(n, n);
    for u in basis {
        for i in 0..n {
            for j in 0..n {
                let inc = u[i] * u[j].conj();
                p[(i, j)] += inc;
            }
        }
    }
    p
}

/// Directions are compared at tolerance `sqrt(compare_rel)`; this absorbs the
/// eigenvector sensitivity of bases computed near rank cutoffs while staying
/// far below any genuine angle between distinct subspaces.
fn direction_tol(tol: &Tolerance) -> f64 {
    tol.compare_rel.sqrt()
}

/// Span equality of two orthonormal bases, by projector comparison.
pub fn subspace_equal(
    u: &[Vec<Complex64>],
    v: &[Vec<Complex64>],
    tol: &Tolerance,
) -> Result<bool> {
    let Some(n) = ambient_dim(u, v)? else {
        return Ok(true); // both zero subspaces
    };
    check_orthonormal(u, "left")?;
    check_orthonormal(v, "right")?;
    if u.len() != v.len() {
        return Ok(false);
    }
    let diff = projector(u, n).sub(&projector(v, n));
    Ok(diff.frobenius_norm() <= direction_tol(tol) * (n as f64).sqrt())
}

/// Orthonormal basis of the intersection of two spans, via the numerical
/// nullspace of the stacked complement projectors.
pub fn subspace_intersect(
    u: &[Vec<Complex64>],
    v: &[Vec<Complex64>],
    tol: &Tolerance,
) -> Result<Vec<Vec<Complex64>>> {
    let Some(n) = ambient_dim(u, v)? else {
        return Ok(vec![]);
    };
    check_orthonormal(u, "left")?;
    check_orthonormal(v, "right")?;
    if u.is_empty() || v.is_empty() {
        return Ok(vec![]);
    }
    let id = ComplexMatrix::identity(n);
    let ku = id.sub(&projector(u, n));
    let kv = id.sub(&projector(v, n));
    let stacked = ku.vstack(&kv);
    let dec = svd(&stacked)?;
    let cutoff = direction_tol(tol);
    let mut out = vec![];
    // right singular vectors with near-zero singular value span the common part
    for (k, &s) in dec.sigma.iter().enumerate() {
        if s <= cutoff {
            out.push(dec.v.column(k));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::basis_vec;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn pinv_diagonal() {
        let m = ComplexMatrix::diag_real(&[2.0, 0.0]);
        let p = pinv(&m, &tol()).unwrap();
        assert!(p.rel_distance(&ComplexMatrix::diag_real(&[0.5, 0.0])) < 1e-14);
    }

    #[test]
    fn pinv_identity() {
        let m = ComplexMatrix::identity(3);
        assert!(pinv(&m, &tol()).unwrap().rel_distance(&m) < 1e-14);
    }

    #[test]
    fn pinv_rank_one() {
        // M = [[1,1],[1,1]], M^+ = M / ||M||_F^2 = M/4.
        let m = ComplexMatrix::from_real(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let p = pinv(&m, &tol()).unwrap();
        let expect = m.scale_real(0.25);
        assert!(p.rel_distance(&expect) < 1e-13);
    }

    #[test]
    fn pinv_zero_matrix() {
        let m = ComplexMatrix::zeros(2, 3);
        let p = pinv(&m, &tol()).unwrap();
        assert_eq!((p.rows(), p.cols()), (3, 2));
        assert_eq!(p.frobenius_norm(), 0.0);
    }

    fn penrose_residual(m: &ComplexMatrix, p: &ComplexMatrix) -> f64 {
        let scale = m.frobenius_norm().max(1e-300);
        let pscale = p.frobenius_norm().max(1e-300);
        let r1 = m.mul(p).mul(m).sub(m).frobenius_norm() / scale;
        let r2 = p.mul(m).mul(p).sub(p).frobenius_norm() / pscale;
        let mp = m.mul(p);
        let r3 = mp.sub(&mp.adjoint()).frobenius_norm() / mp.frobenius_norm().max(1e-300);
        let pm = p.mul(m);
        let r4 = pm.sub(&pm.adjoint()).frobenius_norm() / pm.frobenius_norm().max(1e-300);
        r1.max(r2).max(r3).max(r4)
    }

    #[test]
    fn penrose_identities_rectangular() {
        let m = ComplexMatrix::from_rows(&[
            vec![Complex64::new(1.0, 2.0), Complex64::new(0.5, -1.0), Complex64::new(0.0, 0.0)],
            vec![Complex64::new(-1.0, 0.0), Complex64::new(2.0, 2.0), Complex64::new(3.0, -0.5)],
        ])
        .unwrap();
        let p = pinv(&m, &tol()).unwrap();
        assert!(penrose_residual(&m, &p) < 1e-12);
    }

    #[test]
    fn sqrt_psd_diagonal_and_zero() {
        let m = ComplexMatrix::diag_real(&[4.0, 9.0]);
        let s = sqrt_psd(&m, &tol()).unwrap();
        assert!(s.rel_distance(&ComplexMatrix::diag_real(&[2.0, 3.0])) < 1e-14);
        let z = ComplexMatrix::zeros(2, 2);
        assert_eq!(sqrt_psd(&z, &tol()).unwrap().frobenius_norm(), 0.0);
    }

    #[test]
    fn sqrt_psd_squares_back() {
        // [[2,1],[1,2]]: eigenvalues 1 and 3.
        let m = ComplexMatrix::from_real(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let s = sqrt_psd(&m, &tol()).unwrap();
        assert!(s.mul(&s).rel_distance(&m) < 1e-13);
    }

    #[test]
    fn sqrt_psd_rejects_indefinite() {
        let m = ComplexMatrix::from_real(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert!(matches!(sqrt_psd(&m, &tol()), Err(Error::NotPsd(_))));
    }

    #[test]
    fn psd_check_examples() {
        assert!(hermitian_psd_check(&ComplexMatrix::identity(3), &tol()).unwrap());
        let nonherm = ComplexMatrix::from_real(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(!hermitian_psd_check(&nonherm, &tol()).unwrap());
        let indef = ComplexMatrix::from_real(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert!(!hermitian_psd_check(&indef, &tol()).unwrap());
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(hermitian_psd_check(&rect, &tol()).is_err());
    }

    #[test]
    fn range_basis_examples() {
        let m = ComplexMatrix::diag_real(&[1.0, 0.0]);
        let b = range_basis(&m, &tol()).unwrap();
        assert_eq!(b.len(), 1);
        assert!((b[0][0].norm() - 1.0).abs() < 1e-14);
        assert!(b[0][1].norm() < 1e-14);

        assert!(range_basis(&ComplexMatrix::zeros(3, 3), &tol()).unwrap().is_empty());

        let ones = ComplexMatrix::from_real(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let b = range_basis(&ones, &tol()).unwrap();
        assert_eq!(b.len(), 1);
        assert!((b[0][0] - b[0][1]).norm() < 1e-13, "direction (1,1)");
    }

    #[test]
    fn subspace_examples() {
        let e1 = basis_vec(3, 0);
        let e2 = basis_vec(3, 1);
        let e3 = basis_vec(3, 2);
        // span{e1} vs span{e2}: disjoint
        let i = subspace_intersect(&[e1.clone()], &[e2.clone()], &tol()).unwrap();
        assert!(i.is_empty());
        // U = V equal
        assert!(subspace_equal(&[e1.clone(), e2.clone()], &[e2.clone(), e1.clone()], &tol()).unwrap());
        // span{e1,e2} ∩ span{e2,e3} = span{e2}
        let i = subspace_intersect(&[e1, e2.clone()], &[e2, e3], &tol()).unwrap();
        assert_eq!(i.len(), 1);
        assert!((i[0][1].norm() - 1.0).abs() < 1e-10);
    }
}
