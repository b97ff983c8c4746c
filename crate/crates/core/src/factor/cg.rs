use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, norm2, SparseSym};

/// Iterations between explicit recomputations of `r = b - S z`.
const TRUE_RESIDUAL_INTERVAL: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct CgOutcome {
    pub z: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub relres: f64,
}

/// Unpreconditioned conjugate gradients for SPD `S`, zero initial guess.
///
/// Stops when `‖r‖/‖b‖ <= tol`. A curvature `pᵀSp <= 0` is reported as
/// [`Error::NotPositiveDefinite`] with the iteration index as the pivot.
pub fn cg_solve(s: &SparseSym, b: &[f64], tol: f64, maxit: usize) -> Result<CgOutcome> {
    check_dim(s.n(), b.len())?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("CG tolerance must be positive".into()));
    }
    let n = s.n();
    let bnorm = norm2(b);
    let mut z = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(CgOutcome {
            z,
            iterations: 0,
            converged: true,
            relres: 0.0,
        });
    }
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut sp = vec![0.0; n];
    let mut rr = dot(&r, &r);
    let mut relres = rr.sqrt() / bnorm;
    let mut it = 0;
    while relres > tol && it < maxit {
        s.spmv_into(&p, &mut sp)?;
        let curvature = dot(&p, &sp);
        if !(curvature > 0.0) {
            return Err(Error::NotPositiveDefinite { pivot: it });
        }
        let alpha = rr / curvature;
        for i in 0..n {
            z[i] += alpha * p[i];
            r[i] -= alpha * sp[i];
        }
        it += 1;
        if it % TRUE_RESIDUAL_INTERVAL == 0 {
            let sz = s.spmv(&z)?;
            for i in 0..n {
                r[i] = b[i] - sz[i];
            }
        }
        let rr_new = dot(&r, &r);
        relres = rr_new.sqrt() / bnorm;
        if relres <= tol {
            // confirm against the true residual before accepting
            let sz = s.spmv(&z)?;
            let true_res: f64 = b
                .iter()
                .zip(&sz)
                .map(|(bi, si)| (bi - si) * (bi - si))
                .sum::<f64>()
                .sqrt();
            relres = true_res / bnorm;
            if relres <= tol {
                break;
            }
        }
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    Ok(CgOutcome {
        z,
        iterations: it,
        converged: relres <= tol,
        relres,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_one_step() {
        let s = SparseSym::identity(6);
        let b = vec![1.0, 2.0, -3.0, 0.5, 0.0, 9.0];
        let out = cg_solve(&s, &b, 1e-14, 10).unwrap();
        assert_eq!(out.iterations, 1);
        assert!(out.converged);
        assert_eq!(out.z, b);
    }

    #[test]
    fn finite_termination_on_diagonal() {
        let s = SparseSym::diagonal(&[1.0, 2.0, 3.0]);
        let out = cg_solve(&s, &[1.0, 2.0, 3.0], 1e-12, 100).unwrap();
        assert!(out.iterations <= 3);
        for zi in &out.z {
            assert!((zi - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn indefinite_breakdown() {
        let s = SparseSym::diagonal(&[1.0, -1.0]);
        let r = cg_solve(&s, &[0.0, 1.0], 1e-10, 10);
        assert!(matches!(r, Err(Error::NotPositiveDefinite { .. })));
    }

    #[test]
    fn reports_non_convergence() {
        let s = SparseSym::tridiag(50, -1.0, 2.0);
        let out = cg_solve(&s, &vec![1.0; 50], 1e-12, 3).unwrap();
        assert_eq!(out.iterations, 3);
        assert!(!out.converged);
    }
}
