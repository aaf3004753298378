//! The independent constructions of the parallel sum `A : B`, its quadratic
//! form, and the associated range theorems.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::matrix::{basis_vec, inner, zeros_vec, ComplexMatrix};
use crate::linalg::svd::{range_basis, sqrt_psd, subspace_equal, subspace_intersect};
use crate::linalg::{pinv, Tolerance};
use crate::operator::{check_same_dim, contraction_pair, induced_space, PsdOperator};

fn input_scale(a: &PsdOperator, b: &PsdOperator) -> f64 {
    a.matrix().frobenius_norm().max(b.matrix().frobenius_norm())
}

fn demand_agreement(
    context: &str,
    lhs: &ComplexMatrix,
    rhs: &ComplexMatrix,
    scale: f64,
    tol: &Tolerance,
) -> Result<()> {
    let residual = lhs.sub(rhs).frobenius_norm();
    let bound = tol.compare_rel * scale.max(f64::MIN_POSITIVE);
    if residual > bound {
        return Err(Error::RouteDisagreement {
            context: context.into(),
            residual,
            tolerance: bound,
        });
    }
    Ok(())
}

/// Anderson–Duffin formula `A (A + B)^+ B`, the reference every other route
/// is checked against.
pub fn parallel_sum_oracle(a: &PsdOperator, b: &PsdOperator, tol: &Tolerance) -> Result<PsdOperator> {
    check_same_dim(a, b)?;
    let sum_pinv = pinv(a.add(b)?.matrix(), tol)?;
    let m = a.matrix().mul(&sum_pinv).mul(b.matrix());
    PsdOperator::from_assembly(m, input_scale(a, b), "oracle", tol)
}

/// Projection factorization through `H_A x H_B`: project the tuple
/// `(Ax, 0)` onto the orthogonal complement of `{(Ay, By)}` and embed back.
/// The `A`-side and `B`-side assemblies must agree.
pub fn parallel_sum_projection(
    a: &PsdOperator,
    b: &PsdOperator,
    tol: &Tolerance,
) -> Result<PsdOperator> {
    check_same_dim(a, b)?;
    let n = a.dim();
    let ia = induced_space(a, tol)?;
    let ib = induced_space(b, tol)?;
    let (ra, rb) = (ia.dim(), ib.dim());
    let product = ia.gram().product(ib.gram());

    // Columns of W span ran J^*: W e_j = (coords of A e_j, coords of B e_j).
    let w = ia.adjoint_matrix().vstack(ib.adjoint_matrix());
    let p = product.complement_projector(&w.columns(), tol)?;

    let tilde_a_adj = ia
        .adjoint_matrix()
        .vstack(&ComplexMatrix::zeros(rb, n));
    let tilde_b_adj = ComplexMatrix::zeros(ra, n).vstack(ib.adjoint_matrix());
    let tilde_a = ia.embed_matrix().hstack(&ComplexMatrix::zeros(n, rb));
    let tilde_b = ComplexMatrix::zeros(n, ra).hstack(ib.embed_matrix());

    let route_a = tilde_a.mul(&p).mul(&tilde_a_adj);
    let route_b = tilde_b.mul(&p).mul(&tilde_b_adj);
    let scale = input_scale(a, b);
    demand_agreement("projection route A-side vs B-side", &route_a, &route_b, scale, tol)?;
    PsdOperator::from_assembly(route_a, scale, "projection", tol)
}

/// Contraction factorization `A^{1/2} S_A S_B^* B^{1/2}` (and its adjoint
/// `B^{1/2} S_B S_A^* A^{1/2}`, which must agree).
pub fn parallel_sum_contraction(
    a: &PsdOperator,
    b: &PsdOperator,
    tol: &Tolerance,
) -> Result<PsdOperator> {
    let pair = contraction_pair(a, b, tol)?;
    let m1 = pair
        .sqrt_a()
        .mul(pair.s_a())
        .mul(&pair.s_b_star(tol)?)
        .mul(pair.sqrt_b());
    let m2 = pair
        .sqrt_b()
        .mul(pair.s_b())
        .mul(&pair.s_a_star(tol)?)
        .mul(pair.sqrt_a());
    let scale = input_scale(a, b);
    demand_agreement("contraction route vs adjoint assembly", &m1, &m2, scale, tol)?;
    PsdOperator::from_assembly(m1, scale, "contraction", tol)
}

/// Factorization `J hat A (I - hat A) J^*` on the auxiliary space of
/// `A + B`; the `hat B` assembly must agree.
pub fn parallel_sum_hat(a: &PsdOperator, b: &PsdOperator, tol: &Tolerance) -> Result<PsdOperator> {
    let pair = contraction_pair(a, b, tol)?;
    let space = pair.space();
    let id = ComplexMatrix::identity(space.dim());
    let mid_a = pair.hat_a().mul(&id.sub(pair.hat_a()));
    let mid_b = pair.hat_b().mul(&id.sub(pair.hat_b()));
    let m1 = space.embed_matrix().mul(&mid_a).mul(space.adjoint_matrix());
    let m2 = space.embed_matrix().mul(&mid_b).mul(space.adjoint_matrix());
    let scale = input_scale(a, b);
    demand_agreement("hat route A-side vs B-side", &m1, &m2, scale, tol)?;
    PsdOperator::from_assembly(m1, scale, "hat", tol)
}

/// Defect factorization `A^{1/2} (I - S_A S_A^*) A^{1/2}`; the `B`-side
/// assembly must agree.
pub fn parallel_sum_defect(a: &PsdOperator, b: &PsdOperator, tol: &Tolerance) -> Result<PsdOperator> {
    let pair = contraction_pair(a, b, tol)?;
    let n = a.dim();
    let id = ComplexMatrix::identity(n);
    let def_a = id.sub(&pair.s_a().mul(&pair.s_a_star(tol)?));
    let def_b = id.sub(&pair.s_b().mul(&pair.s_b_star(tol)?));
    let m1 = pair.sqrt_a().mul(&def_a).mul(pair.sqrt_a());
    let m2 = pair.sqrt_b().mul(&def_b).mul(pair.sqrt_b());
    let scale = input_scale(a, b);
    demand_agreement("defect route A-side vs B-side", &m1, &m2, scale, tol)?;
    PsdOperator::from_assembly(m1, scale, "defect", tol)
}

/// Value and minimizer of `inf_y <A(x-y), x-y> + <By, y>`.
///
/// The infimum is attained in finite dimension; only the value is contract,
/// the minimizer is exposed for diagnostics.
#[derive(Debug, Clone)]
pub struct QuadraticInfimum {
    pub value: f64,
    pub minimizer: Vec<Complex64>,
}

/// Closed-form evaluation of the variational quadratic form: the minimizing
/// `y` solves `(A + B) y = Ax`, giving `<Ax, x> - <(A+B)^+ Ax, Ax>`.
pub fn quadratic_form_inf(
    a: &PsdOperator,
    b: &PsdOperator,
    x: &[Complex64],
    tol: &Tolerance,
) -> Result<QuadraticInfimum> {
    check_same_dim(a, b)?;
    if x.len() != a.dim() {
        return Err(Error::DimensionMismatch(format!(
            "vector length {} does not match operator dimension {}",
            x.len(),
            a.dim()
        )));
    }
    let sum_pinv = pinv(a.add(b)?.matrix(), tol)?;
    let ax = a.matrix().matvec(x);
    let minimizer = sum_pinv.matvec(&ax);
    let value = (inner(&ax, x).re - inner(&minimizer, &ax).re).max(0.0);
    Ok(QuadraticInfimum { value, minimizer })
}

/// Quadratic form through the supremum corollary:
/// `<Ax, x> - sup { |<Ax, y>|^2 : <Ay, y> + <By, y> <= 1 }`, with the
/// supremum evaluated in closed form as `<(A+B)^+ Ax, Ax>` (the constrained
/// maximizer is proportional to `(A+B)^+ Ax`). The `B`-side variant must
/// agree.
pub fn quadratic_form_sup(
    a: &PsdOperator,
    b: &PsdOperator,
    x: &[Complex64],
    tol: &Tolerance,
) -> Result<f64> {
    check_same_dim(a, b)?;
    if x.len() != a.dim() {
        return Err(Error::DimensionMismatch(format!(
            "vector length {} does not match operator dimension {}",
            x.len(),
            a.dim()
        )));
    }
    let sum_pinv = pinv(a.add(b)?.matrix(), tol)?;
    let side = |op: &PsdOperator| -> f64 {
        let ox = op.matrix().matvec(x);
        let sup = inner(&sum_pinv.matvec(&ox), &ox).re;
        inner(&ox, x).re - sup
    };
    let val_a = side(a);
    let val_b = side(b);
    let scale = a.quadratic_form(x).max(b.quadratic_form(x)).max(f64::MIN_POSITIVE);
    if (val_a - val_b).abs() > tol.compare_rel * scale {
        return Err(Error::RouteDisagreement {
            context: "supremum quadratic form A-side vs B-side".into(),
            residual: (val_a - val_b).abs(),
            tolerance: tol.compare_rel * scale,
        });
    }
    Ok(val_a.max(0.0))
}

// ---------------------------------------------------------------------------
// Range theorems

/// Certificate that a vector `y` lies in `ran (A - A:B)^{1/2}`: the constant
/// `m_y` for which `|<x, y>|^2 <= m_y * sup{ |<Ax, z>|^2 : <Az,z> + <Bz,z> <= 1 }`
/// was checked on the sampled `x`.
#[derive(Debug, Clone)]
pub struct RangeWitness {
    pub y: Vec<Complex64>,
    pub m_y: f64,
    /// Largest violation of the inequality over the sampled `x` (negative or
    /// tiny positive means certified).
    pub max_violation: f64,
    pub certified: bool,
}

#[derive(Debug, Clone)]
pub struct DefectRangeReport {
    pub defect: ComplexMatrix,
    pub defect_sqrt_range: Vec<Vec<Complex64>>,
    pub range_a: Vec<Vec<Complex64>>,
    /// Finite-dimensional collapse of the range theorem:
    /// `ran (A - A:B)^{1/2} = ran A`.
    pub ranges_equal: bool,
    pub witnesses: Vec<RangeWitness>,
}

/// Compute `A - (A:B)`, its square-root range, compare with `ran A`, and
/// certify the inequality characterization for the supplied `ys` (defaulting
/// to the computed range basis) against the sampled `xs`.
pub fn defect_range_report(
    a: &PsdOperator,
    b: &PsdOperator,
    ys: &[Vec<Complex64>],
    xs: &[Vec<Complex64>],
    tol: &Tolerance,
) -> Result<DefectRangeReport> {
    check_same_dim(a, b)?;
    let parsum = parallel_sum_oracle(a, b, tol)?;
    let defect = a.matrix().sub(parsum.matrix()).symmetrize();
    let defect_sqrt = sqrt_psd(&defect, tol)?;
    let defect_sqrt_range = range_basis(&defect_sqrt, tol)?;
    let range_a = range_basis(a.matrix(), tol)?;
    let ranges_equal = subspace_equal(&defect_sqrt_range, &range_a, tol)?;

    let defect_pinv = pinv(&defect, tol)?;
    let sum_pinv = pinv(a.add(b)?.matrix(), tol)?;
    let targets: Vec<Vec<Complex64>> = if ys.is_empty() {
        defect_sqrt_range.clone()
    } else {
        ys.to_vec()
    };

    let mut witnesses = Vec::with_capacity(targets.len());
    for y in targets {
        if y.len() != a.dim() {
            return Err(Error::DimensionMismatch(
                "witness vector has the wrong ambient dimension".into(),
            ));
        }
        let m_y = inner(&defect_pinv.matvec(&y), &y).re.max(0.0);
        let mut max_violation = f64::NEG_INFINITY;
        for x in xs {
            if x.len() != a.dim() {
                return Err(Error::DimensionMismatch(
                    "sample vector has the wrong ambient dimension".into(),
                ));
            }
            let lhs = inner(x, &y).norm_sqr();
            let ax = a.matrix().matvec(x);
            let sup = inner(&sum_pinv.matvec(&ax), &ax).re.max(0.0);
            let scale = lhs.max(m_y * sup).max(1.0);
            max_violation = max_violation.max((lhs - m_y * sup) / scale);
        }
        if xs.is_empty() {
            max_violation = 0.0;
        }
        let certified = max_violation <= tol.compare_rel;
        witnesses.push(RangeWitness {
            y,
            m_y,
            max_violation,
            certified,
        });
    }

    Ok(DefectRangeReport {
        defect,
        defect_sqrt_range,
        range_a,
        ranges_equal,
        witnesses,
    })
}

/// Cross-check of the cited range identity
/// `ran (A:B)^{1/2} = ran A^{1/2} ∩ ran B^{1/2}`.
pub fn fillmore_williams_check(a: &PsdOperator, b: &PsdOperator, tol: &Tolerance) -> Result<bool> {
    check_same_dim(a, b)?;
    let parsum = parallel_sum_oracle(a, b, tol)?;
    let lhs = range_basis(&sqrt_psd(parsum.matrix(), tol)?, tol)?;
    let ra = range_basis(&a.sqrt(tol)?, tol)?;
    let rb = range_basis(&b.sqrt(tol)?, tol)?;
    let rhs = subspace_intersect(&ra, &rb, tol)?;
    subspace_equal(&lhs, &rhs, tol)
}

// ---------------------------------------------------------------------------
// Route selection (CLI surface)

/// The named constructions exposed to the command line. `Inf` and `Sup`
/// rebuild the full matrix from their quadratic form by polarization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Oracle,
    Projection,
    Contraction,
    Hat,
    Defect,
    Inf,
    Sup,
}

impl Route {
    pub const ALL: [Route; 7] = [
        Route::Oracle,
        Route::Projection,
        Route::Contraction,
        Route::Hat,
        Route::Defect,
        Route::Inf,
        Route::Sup,
    ];

    pub fn compute(self, a: &PsdOperator, b: &PsdOperator, tol: &Tolerance) -> Result<PsdOperator> {
        match self {
            Route::Oracle => parallel_sum_oracle(a, b, tol),
            Route::Projection => parallel_sum_projection(a, b, tol),
            Route::Contraction => parallel_sum_contraction(a, b, tol),
            Route::Hat => parallel_sum_hat(a, b, tol),
            Route::Defect => parallel_sum_defect(a, b, tol),
            Route::Inf => quadratic_route(a, b, tol, QuadraticSide::Inf),
            Route::Sup => quadratic_route(a, b, tol, QuadraticSide::Sup),
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Route::Oracle => "oracle",
            Route::Projection => "projection",
            Route::Contraction => "contraction",
            Route::Hat => "hat",
            Route::Defect => "defect",
            Route::Inf => "inf",
            Route::Sup => "sup",
        };
        f.write_str(name)
    }
}

impl FromStr for Route {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(Route::Oracle),
            "projection" => Ok(Route::Projection),
            "contraction" => Ok(Route::Contraction),
            "hat" => Ok(Route::Hat),
            "defect" => Ok(Route::Defect),
            "inf" => Ok(Route::Inf),
            "sup" => Ok(Route::Sup),
            other => Err(Error::InvalidInput(format!(
                "unknown route {other:?}; expected one of oracle, projection, contraction, hat, defect, inf, sup"
            ))),
        }
    }
}

enum QuadraticSide {
    Inf,
    Sup,
}

/// Rebuild `A:B` from one of the variational quadratic forms. The shared
/// `(A+B)^+` is hoisted out of the polarization loop.
fn quadratic_route(
    a: &PsdOperator,
    b: &PsdOperator,
    tol: &Tolerance,
    side: QuadraticSide,
) -> Result<PsdOperator> {
    check_same_dim(a, b)?;
    let n = a.dim();
    let sum_pinv = pinv(a.add(b)?.matrix(), tol)?;
    let q = |x: &[Complex64]| -> f64 {
        match side {
            QuadraticSide::Inf => {
                let ax = a.matrix().matvec(x);
                inner(&ax, x).re - inner(&sum_pinv.matvec(&ax), &ax).re
            }
            QuadraticSide::Sup => {
                let bx = b.matrix().matvec(x);
                inner(&bx, x).re - inner(&sum_pinv.matvec(&bx), &bx).re
            }
        }
    };

    // Complex polarization: with B(u, v) = <Mu, v> and q(x) = <Mx, x>,
    //   B(u, v) = ( q(u+v) - q(u-v) )/4 + i ( q(u+iv) - q(u-iv) )/4,
    // and M[i][j] = B(e_j, e_i).
    let mut m = ComplexMatrix::zeros(n, n);
    let i_unit = Complex64::new(0.0, 1.0);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                m[(i, j)] = Complex64::new(q(&basis_vec(n, i)), 0.0);
                continue;
            }
            let mut plus = zeros_vec(n);
            plus[j] += Complex64::new(1.0, 0.0);
            plus[i] += Complex64::new(1.0, 0.0);
            let mut minus = zeros_vec(n);
            minus[j] += Complex64::new(1.0, 0.0);
            minus[i] -= Complex64::new(1.0, 0.0);
            let mut plus_i = zeros_vec(n);
            plus_i[j] += Complex64::new(1.0, 0.0);
            plus_i[i] += i_unit;
            let mut minus_i = zeros_vec(n);
            minus_i[j] += Complex64::new(1.0, 0.0);
            minus_i[i] -= i_unit;
            let re = (q(&plus) - q(&minus)) / 4.0;
            let im = (q(&plus_i) - q(&minus_i)) / 4.0;
            m[(i, j)] = Complex64::new(re, im);
        }
    }
    let name = match side {
        QuadraticSide::Inf => "inf",
        QuadraticSide::Sup => "sup",
    };
    PsdOperator::from_assembly(m, input_scale(a, b), name, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn psd(rows: &[&[f64]]) -> PsdOperator {
        PsdOperator::new(ComplexMatrix::from_real(rows), &tol()).unwrap()
    }

    fn cvec(res: &[f64]) -> Vec<Complex64> {
        res.iter().map(|&r| Complex64::new(r, 0.0)).collect()
    }

    #[test]
    fn oracle_half_identity() {
        let a = PsdOperator::identity(2);
        let s = parallel_sum_oracle(&a, &a.clone(), &tol()).unwrap();
        assert!(s.matrix().rel_distance(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-12);
    }

    #[test]
    fn oracle_disjoint_ranges_vanish() {
        let a = psd(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let b = psd(&[&[0.0, 0.0], &[0.0, 1.0]]);
        let s = parallel_sum_oracle(&a, &b, &tol()).unwrap();
        assert!(s.matrix().frobenius_norm() < 1e-14);
    }

    /// Hand-computed 2x2 case: A = [[2,1],[1,1]], B = I gives
    /// A:B = (1/5) [[3,1],[1,2]] (det(A+B) = 5).
    fn hand_pair() -> (PsdOperator, PsdOperator, ComplexMatrix) {
        let a = psd(&[&[2.0, 1.0], &[1.0, 1.0]]);
        let b = PsdOperator::identity(2);
        let expect = ComplexMatrix::from_real(&[&[0.6, 0.2], &[0.2, 0.4]]);
        (a, b, expect)
    }

    #[test]
    fn all_routes_match_hand_case() {
        let (a, b, expect) = hand_pair();
        for route in Route::ALL {
            let s = route.compute(&a, &b, &tol()).unwrap();
            assert!(
                s.matrix().rel_distance(&expect) < 1e-10,
                "route {route} disagrees with the hand computation"
            );
        }
    }

    #[test]
    fn routes_handle_zero_summand() {
        let (a, _, _) = hand_pair();
        let zero = PsdOperator::zero(2);
        for route in Route::ALL {
            let s = route.compute(&a, &zero, &tol()).unwrap();
            assert!(s.matrix().frobenius_norm() < 1e-12, "route {route} with B = 0");
        }
    }

    #[test]
    fn scalar_quadratic_forms() {
        let a = PsdOperator::identity(1);
        let x = cvec(&[1.0]);
        let inf = quadratic_form_inf(&a, &a.clone(), &x, &tol()).unwrap();
        assert!((inf.value - 0.5).abs() < 1e-14);
        assert!((inf.minimizer[0].re - 0.5).abs() < 1e-14);
        let sup = quadratic_form_sup(&a, &a.clone(), &x, &tol()).unwrap();
        assert!((sup - 0.5).abs() < 1e-14);
    }

    #[test]
    fn quadratic_form_zero_b_vanishes() {
        let (a, _, _) = hand_pair();
        let zero = PsdOperator::zero(2);
        let x = cvec(&[0.3, -1.2]);
        let inf = quadratic_form_inf(&a, &zero, &x, &tol()).unwrap();
        assert!(inf.value.abs() < 1e-13);
    }

    #[test]
    fn quadratic_forms_match_oracle_form() {
        let (a, b, _) = hand_pair();
        let s = parallel_sum_oracle(&a, &b, &tol()).unwrap();
        let x = cvec(&[0.7, 0.4]);
        let inf = quadratic_form_inf(&a, &b, &x, &tol()).unwrap();
        let sup = quadratic_form_sup(&a, &b, &x, &tol()).unwrap();
        let direct = s.quadratic_form(&x);
        assert!((inf.value - direct).abs() < 1e-12);
        assert!((sup - direct).abs() < 1e-12);
    }

    #[test]
    fn defect_range_hand_case() {
        // A = diag(1, 0), B = I: A:B = diag(1/2, 0), defect = diag(1/2, 0).
        let a = psd(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let b = PsdOperator::identity(2);
        let xs: Vec<Vec<Complex64>> = vec![cvec(&[1.0, 0.3]), cvec(&[-0.4, 1.0])];
        let report = defect_range_report(&a, &b, &[], &xs, &tol()).unwrap();
        let expect = ComplexMatrix::from_real(&[&[0.5, 0.0], &[0.0, 0.0]]);
        assert!(report.defect.rel_distance(&expect) < 1e-12);
        assert_eq!(report.defect_sqrt_range.len(), 1);
        assert!(report.ranges_equal);
        assert!(report.witnesses.iter().all(|w| w.certified));
    }

    #[test]
    fn defect_range_zero_operator() {
        let zero = PsdOperator::zero(2);
        let b = PsdOperator::identity(2);
        let report = defect_range_report(&zero, &b, &[], &[], &tol()).unwrap();
        assert!(report.defect_sqrt_range.is_empty());
        assert!(report.ranges_equal);
    }

    #[test]
    fn fillmore_williams_examples() {
        let a = psd(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let b = psd(&[&[0.0, 0.0], &[0.0, 1.0]]);
        assert!(fillmore_williams_check(&a, &b, &tol()).unwrap());
        let i = PsdOperator::identity(2);
        assert!(fillmore_williams_check(&i, &i.clone(), &tol()).unwrap());
    }

    #[test]
    fn route_parsing_round_trips() {
        for route in Route::ALL {
            assert_eq!(route.to_string().parse::<Route>().unwrap(), route);
        }
        assert!("banana".parse::<Route>().is_err());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = PsdOperator::identity(2);
        let b = PsdOperator::identity(3);
        assert!(matches!(
            parallel_sum_oracle(&a, &b, &tol()),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
