//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Jacobi is slower than tridiagonalization but has excellent relative
//! accuracy and no breakdown cases, which matters here because rank
//! decisions are taken directly on the computed eigenvalues.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::matrix::ComplexMatrix;

/// `A = V diag(values) V^H`, eigenvalues ascending, columns of `V` orthonormal.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.values.iter().map(|l| l.abs()).fold(0.0, f64::max)
    }

    /// Reassemble `V f(diag) V^H` with eigenvalues mapped through `f`.
    pub fn rebuild(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.vectors.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let fl = f(lambda);
            if fl == 0.0 {
                continue;
            }
            let col = self.vectors.column(k);
            for i in 0..n {
                for j in 0..n {
                    let inc = col[i] * col[j].conj() * fl;
                    out[(i, j)] += inc;
                }
            }
        }
        out
    }
}

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of the Hermitian part of `m`.
///
/// The input is symmetrized as `(M + M^H)/2` first; callers are expected to
/// pass matrices that are Hermitian up to rounding.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(HermitianEigen {
            values: vec![],
            vectors: ComplexMatrix::zeros(0, 0),
        });
    }

    let mut a = m.symmetrize();
    let mut v = ComplexMatrix::identity(n);
    let fro = a.frobenius_norm();
    if fro == 0.0 {
        return Ok(HermitianEigen {
            values: vec![0.0; n],
            vectors: v,
        });
    }
    let stop = f64::EPSILON * fro;

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[(i, j)].norm_sqr();
            }
        }
        if (2.0 * off).sqrt() <= stop {
            return Ok(finish(a, v));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    Err(Error::NoConvergence {
        context: "hermitian Jacobi eigendecomposition".into(),
        sweeps: MAX_SWEEPS,
    })
}

/// One complex Jacobi rotation annihilating `a[(p, q)]`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phi = apq / r; // unit modulus
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;

    // Real 2x2 Jacobi on [[app, r], [r, aqq]] after the phase transform.
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // Plane transform G: columns (p, q) mix with
    //   G_pp = c, G_pq = s, G_qp = -s*conj(phi), G_qq = c*conj(phi).
    let gqp = -s * phi.conj();
    let gqq = c * phi.conj();

    let n = a.rows();
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        let new_kp = akp * c + akq * gqp;
        let new_kq = akp * s + akq * gqq;
        a[(k, p)] = new_kp;
        a[(p, k)] = new_kp.conj();
        a[(k, q)] = new_kq;
        a[(q, k)] = new_kq.conj();
    }
    a[(p, p)] = Complex64::new(app - t * r, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * r, 0.0);
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);

    for k in 0..v.rows() {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * gqp;
        v[(k, q)] = vkp * s + vkq * gqq;
    }
}

fn finish(a: ComplexMatrix, v: ComplexMatrix) -> HermitianEigen {
    let n = a.rows();
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    HermitianEigen { values, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_hand_eigenvalues() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let m = ComplexMatrix::from_real(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let e = hermitian_eigen(&m).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-12);
        assert!((e.values[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn indefinite_hand_eigenvalues() {
        // [[1,2],[2,1]] has eigenvalues -1 and 3.
        let m = ComplexMatrix::from_real(&[&[1.0, 2.0], &[2.0, 1.0]]);
        let e = hermitian_eigen(&m).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-12);
        assert!((e.values[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn complex_hermitian_reconstruction() {
        let m = ComplexMatrix::from_rows(&[
            vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.0)],
            vec![Complex64::new(0.0, -1.0), Complex64::new(3.0, 0.0)],
        ])
        .unwrap();
        let e = hermitian_eigen(&m).unwrap();
        let back = e.rebuild(|l| l);
        assert!(m.rel_distance(&back) < 1e-13);
        // V unitary
        let vtv = e.vectors.adjoint().mul(&e.vectors);
        assert!(vtv.rel_distance(&ComplexMatrix::identity(2)) < 1e-13);
    }

    #[test]
    fn diagonal_matrix_keeps_standard_basis() {
        let m = ComplexMatrix::diag_real(&[3.0, 1.0, 2.0]);
        let e = hermitian_eigen(&m).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        // columns are (permuted) standard basis vectors
        for j in 0..3 {
            let col = e.vectors.column(j);
            let ones = col.iter().filter(|z| (z.norm() - 1.0).abs() < 1e-15).count();
            let zeros = col.iter().filter(|z| z.norm() == 0.0).count();
            assert_eq!((ones, zeros), (1, 2));
        }
    }

    #[test]
    fn zero_and_empty() {
        let z = ComplexMatrix::zeros(3, 3);
        let e = hermitian_eigen(&z).unwrap();
        assert_eq!(e.values, vec![0.0; 3]);
        let empty = ComplexMatrix::zeros(0, 0);
        assert!(hermitian_eigen(&empty).unwrap().values.is_empty());
    }
}
