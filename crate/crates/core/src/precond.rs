//! BLT, GSOR and MHSS preconditioners and the GSOR/MHSS stationary iterations.
//!
//! With `A = W + iT` and its real form `[W -T; T W]`:
//!
//! * BLT:  `G = [W 0; αI W]`, acting on the real form.
//! * GSOR: `M = [W 0; αT W]`, acting on the real form (the `1/α` factor dropped).
//! * MHSS: `Q = (αI + W)(αI + T)`, acting on the complex form (the
//!   `(1+i)/(2α)` factor dropped).
//!
//! All factorizations are done once, in [`PrecondOperator::prepare`].

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::factor::{factorize, CholFactor, OrderingMethod};
use crate::krylov::Preconditioner;
use crate::linalg::{apply_complex, norm2, BlockVec, ComplexVec, SparseSym};
use crate::problems::AssembledProblem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecondKind {
    None,
    Blt,
    Gsor,
    Mhss,
}

impl PrecondKind {
    pub const ALL: [PrecondKind; 4] = [
        PrecondKind::None,
        PrecondKind::Blt,
        PrecondKind::Gsor,
        PrecondKind::Mhss,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PrecondKind::None => "none",
            PrecondKind::Blt => "blt",
            PrecondKind::Gsor => "gsor",
            PrecondKind::Mhss => "mhss",
        }
    }

    pub fn has_alpha(self) -> bool {
        self != PrecondKind::None
    }
}

impl fmt::Display for PrecondKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PrecondKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" | "gmres" => Ok(PrecondKind::None),
            "blt" | "bltp" => Ok(PrecondKind::Blt),
            "gsor" => Ok(PrecondKind::Gsor),
            "mhss" => Ok(PrecondKind::Mhss),
            _ => Err(Error::InvalidArgument(format!("unknown method '{s}'"))),
        }
    }
}

/// A prepared preconditioner: kind, parameter and cached Cholesky factors.
#[derive(Debug, Clone)]
pub struct PrecondOperator<'a> {
    kind: PrecondKind,
    alpha: f64,
    /// `W` for BLT/GSOR, `αI + W` for MHSS.
    first: Option<CholFactor>,
    /// `αI + T` for MHSS.
    second: Option<CholFactor>,
    t: Option<&'a SparseSym>,
    factor_seconds: f64,
}

impl<'a> PrecondOperator<'a> {
    /// Factors whatever `kind` needs.
    ///
    /// BLT accepts `α >= 0` (`α = 0` is the block-diagonal limit); GSOR and
    /// MHSS need `α > 0`.
    pub fn prepare(
        kind: PrecondKind,
        alpha: f64,
        w: &SparseSym,
        t: &'a SparseSym,
        ordering: OrderingMethod,
    ) -> Result<Self> {
        check_dim(w.n(), t.n())?;
        let alpha_ok = match kind {
            PrecondKind::None => true,
            PrecondKind::Blt => alpha.is_finite() && alpha >= 0.0,
            PrecondKind::Gsor | PrecondKind::Mhss => alpha.is_finite() && alpha > 0.0,
        };
        if !alpha_ok {
            return Err(Error::InvalidArgument(format!(
                "alpha = {alpha} is not admissible for {kind}"
            )));
        }
        let start = Instant::now();
        let (first, second, t_ref) = match kind {
            PrecondKind::None => (None, None, None),
            PrecondKind::Blt => (Some(factorize(w, ordering)?), None, None),
            PrecondKind::Gsor => (Some(factorize(w, ordering)?), None, Some(t)),
            PrecondKind::Mhss => (
                Some(factorize(&w.add_identity(alpha), ordering)?),
                Some(factorize(&t.add_identity(alpha), ordering)?),
                None,
            ),
        };
        Ok(Self {
            kind,
            alpha,
            first,
            second,
            t: t_ref,
            factor_seconds: start.elapsed().as_secs_f64(),
        })
    }

    pub fn none() -> Self {
        Self {
            kind: PrecondKind::None,
            alpha: 0.0,
            first: None,
            second: None,
            t: None,
            factor_seconds: 0.0,
        }
    }

    pub fn kind(&self) -> PrecondKind {
        self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn factor_seconds(&self) -> f64 {
        self.factor_seconds
    }

    /// Total nonzeros in the cached factors.
    pub fn factor_nnz(&self) -> usize {
        self.first.iter().chain(&self.second).map(CholFactor::nnz).sum()
    }

    fn mismatch(&self, space: &'static str) -> Error {
        Error::KindMismatch {
            kind: self.kind.name(),
            space,
        }
    }

    /// `z = G⁻¹ r` with `G = [W 0; αI W]`: `z₁ = W⁻¹r₁`, `z₂ = W⁻¹(r₂ - α z₁)`.
    pub fn blt_apply(&self, r: &BlockVec) -> Result<BlockVec> {
        if self.kind != PrecondKind::Blt {
            return Err(self.mismatch("BLT apply"));
        }
        let f = self.first.as_ref().expect("BLT holds a factor of W");
        let z1 = f.solve_spd(&r.x)?;
        let rhs: Vec<f64> = r.y.iter().zip(&z1).map(|(a, b)| a - self.alpha * b).collect();
        let z2 = f.solve_spd(&rhs)?;
        BlockVec::new(z1, z2)
    }

    /// `z = M⁻¹ r` with `M = [W 0; αT W]`: `z₁ = W⁻¹r₁`, `z₂ = W⁻¹(r₂ - α T z₁)`.
    pub fn gsor_apply(&self, r: &BlockVec) -> Result<BlockVec> {
        if self.kind != PrecondKind::Gsor {
            return Err(self.mismatch("GSOR apply"));
        }
        let f = self.first.as_ref().expect("GSOR holds a factor of W");
        let t = self.t.expect("GSOR keeps T");
        let z1 = f.solve_spd(&r.x)?;
        let tz1 = t.spmv(&z1)?;
        let rhs: Vec<f64> = r.y.iter().zip(&tz1).map(|(a, b)| a - self.alpha * b).collect();
        let z2 = f.solve_spd(&rhs)?;
        BlockVec::new(z1, z2)
    }

    /// `z = (αI + T)⁻¹ (αI + W)⁻¹ r`, real and imaginary parts independently.
    pub fn mhss_apply(&self, r: &ComplexVec) -> Result<ComplexVec> {
        if self.kind != PrecondKind::Mhss {
            return Err(self.mismatch("MHSS apply"));
        }
        let fw = self.first.as_ref().expect("MHSS holds αI + W");
        let ft = self.second.as_ref().expect("MHSS holds αI + T");
        let re = ft.solve_spd(&fw.solve_spd(&r.re)?)?;
        let im = ft.solve_spd(&fw.solve_spd(&r.im)?)?;
        ComplexVec::new(re, im)
    }
}

impl Preconditioner<BlockVec> for PrecondOperator<'_> {
    fn apply_inverse(&self, r: &BlockVec) -> Result<BlockVec> {
        match self.kind {
            PrecondKind::None => Ok(r.clone()),
            PrecondKind::Blt => self.blt_apply(r),
            PrecondKind::Gsor => self.gsor_apply(r),
            PrecondKind::Mhss => Err(self.mismatch("the real block form")),
        }
    }
}

impl Preconditioner<ComplexVec> for PrecondOperator<'_> {
    fn apply_inverse(&self, r: &ComplexVec) -> Result<ComplexVec> {
        match self.kind {
            PrecondKind::None => Ok(r.clone()),
            PrecondKind::Mhss => self.mhss_apply(r),
            PrecondKind::Blt | PrecondKind::Gsor => Err(self.mismatch("the complex form")),
        }
    }
}

/// Convergence record of a stationary iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryReport {
    pub converged: bool,
    pub iterations: usize,
    pub final_relres: f64,
    /// True relative residual after each iteration.
    pub history: Vec<f64>,
}

fn complex_relres(prob: &AssembledProblem, u: &ComplexVec, bnorm: f64) -> Result<f64> {
    let au = apply_complex(&prob.w, &prob.t, u)?;
    let mut acc = 0.0;
    for k in 0..u.len() {
        let dr = prob.b.re[k] - au.re[k];
        let di = prob.b.im[k] - au.im[k];
        acc += dr * dr + di * di;
    }
    Ok(acc.sqrt() / bnorm)
}

fn rhs_norm(prob: &AssembledProblem) -> Result<f64> {
    let bnorm = norm2(&prob.b.re).hypot(norm2(&prob.b.im));
    if bnorm > 0.0 {
        Ok(bnorm)
    } else {
        Err(Error::InvalidArgument("right-hand side must be nonzero".into()))
    }
}

fn check_stationary_args(alpha: f64, tol: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument("alpha must be positive".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tol must be positive".into()));
    }
    Ok(())
}

/// The GSOR iteration from a zero initial guess:
///
/// ```text
/// W x⁺ = (1-α) W x + α T y + α p
/// W y⁺ = -α T x⁺ + (1-α) W y + α q
/// ```
///
/// stopping on the true residual of the complex system.
pub fn gsor_iterate(
    prob: &AssembledProblem,
    alpha: f64,
    tol: f64,
    maxit: usize,
) -> Result<(BlockVec, StationaryReport)> {
    check_stationary_args(alpha, tol)?;
    let bnorm = rhs_norm(prob)?;
    let (w, t) = (&prob.w, &prob.t);
    let f = factorize(w, OrderingMethod::default())?;
    let n = prob.n;
    let mut u = BlockVec::zeros(n);
    let mut history = Vec::new();
    let mut relres = 1.0;
    while relres > tol && history.len() < maxit {
        let wx = w.spmv(&u.x)?;
        let ty = t.spmv(&u.y)?;
        let rhs: Vec<f64> = (0..n)
            .map(|k| (1.0 - alpha) * wx[k] + alpha * ty[k] + alpha * prob.b.re[k])
            .collect();
        let x_new = f.solve_spd(&rhs)?;
        let tx = t.spmv(&x_new)?;
        let wy = w.spmv(&u.y)?;
        let rhs: Vec<f64> = (0..n)
            .map(|k| -alpha * tx[k] + (1.0 - alpha) * wy[k] + alpha * prob.b.im[k])
            .collect();
        let y_new = f.solve_spd(&rhs)?;
        u = BlockVec::new(x_new, y_new)?;
        relres = complex_relres(prob, &ComplexVec::from(u.clone()), bnorm)?;
        history.push(relres);
        if !relres.is_finite() {
            break;
        }
    }
    let report = StationaryReport {
        converged: relres <= tol,
        iterations: history.len(),
        final_relres: relres,
        history,
    };
    Ok((u, report))
}

/// The MHSS iteration from a zero initial guess:
///
/// ```text
/// (αI + W) u½ = (αI - iT) u + b
/// (αI + T) u⁺ = (αI + iW) u½ - i b
/// ```
pub fn mhss_iterate(
    prob: &AssembledProblem,
    alpha: f64,
    tol: f64,
    maxit: usize,
) -> Result<(ComplexVec, StationaryReport)> {
    check_stationary_args(alpha, tol)?;
    let bnorm = rhs_norm(prob)?;
    let (w, t, b) = (&prob.w, &prob.t, &prob.b);
    let fw = factorize(&w.add_identity(alpha), OrderingMethod::default())?;
    let ft = factorize(&t.add_identity(alpha), OrderingMethod::default())?;
    let n = prob.n;
    let mut u = ComplexVec::zeros(n);
    let mut history = Vec::new();
    let mut relres = 1.0;
    while relres > tol && history.len() < maxit {
        // (αI - iT)u + b
        let t_re = t.spmv(&u.re)?;
        let t_im = t.spmv(&u.im)?;
        let r_re: Vec<f64> = (0..n).map(|k| alpha * u.re[k] + t_im[k] + b.re[k]).collect();
        let r_im: Vec<f64> = (0..n).map(|k| alpha * u.im[k] - t_re[k] + b.im[k]).collect();
        let half = ComplexVec::new(fw.solve_spd(&r_re)?, fw.solve_spd(&r_im)?)?;
        // (αI + iW)u½ - ib
        let w_re = w.spmv(&half.re)?;
        let w_im = w.spmv(&half.im)?;
        let r_re: Vec<f64> = (0..n).map(|k| alpha * half.re[k] - w_im[k] + b.im[k]).collect();
        let r_im: Vec<f64> = (0..n).map(|k| alpha * half.im[k] + w_re[k] - b.re[k]).collect();
        u = ComplexVec::new(ft.solve_spd(&r_re)?, ft.solve_spd(&r_im)?)?;
        relres = complex_relres(prob, &u, bnorm)?;
        history.push(relres);
        if !relres.is_finite() {
            break;
        }
    }
    let report = StationaryReport {
        converged: relres <= tol,
        iterations: history.len(),
        final_relres: relres,
        history,
    };
    Ok((u, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Cx;

    fn close(a: &[f64], b: &[f64]) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= 1e-14 * (1.0 + y.abs()), "{a:?} vs {b:?}");
        }
    }

    fn scalar(v: f64) -> SparseSym {
        SparseSym::diagonal(&[v])
    }

    fn prep<'a>(kind: PrecondKind, alpha: f64, w: &SparseSym, t: &'a SparseSym) -> PrecondOperator<'a> {
        PrecondOperator::prepare(kind, alpha, w, t, OrderingMethod::Rcm).unwrap()
    }

    #[test]
    fn blt_examples() {
        let w = SparseSym::identity(3);
        let t = SparseSym::identity(3);
        let p = prep(PrecondKind::Blt, 0.7, &w, &t);
        let r = BlockVec::new(vec![1.0, 2.0, 3.0], vec![-1.0, 0.0, 4.0]).unwrap();
        let z = p.blt_apply(&r).unwrap();
        assert_eq!(z.x, r.x);
        for k in 0..3 {
            assert!((z.y[k] - (r.y[k] - 0.7 * r.x[k])).abs() < 1e-15);
        }

        let (w2, t2) = (scalar(2.0), scalar(5.0));
        let p = prep(PrecondKind::Blt, 1.4, &w2, &t2);
        let z = p.blt_apply(&BlockVec::new(vec![2.0], vec![2.0]).unwrap()).unwrap();
        assert!((z.x[0] - 1.0).abs() < 1e-15 && (z.y[0] - 0.3).abs() < 1e-15);

        let p = prep(PrecondKind::Blt, 0.0, &w2, &t2);
        let z = p.blt_apply(&BlockVec::new(vec![2.0], vec![6.0]).unwrap()).unwrap();
        assert!((z.x[0] - 1.0).abs() < 1e-15 && (z.y[0] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn gsor_examples() {
        let (w, t) = (scalar(2.0), scalar(3.0));
        let p = prep(PrecondKind::Gsor, 0.5, &w, &t);
        let z = p.gsor_apply(&BlockVec::new(vec![4.0], vec![7.0]).unwrap()).unwrap();
        assert!((z.x[0] - 2.0).abs() < 1e-15 && (z.y[0] - 2.0).abs() < 1e-15);

        let zero = SparseSym::diagonal(&[0.0, 0.0]);
        let w = SparseSym::diagonal(&[2.0, 4.0]);
        let p = prep(PrecondKind::Gsor, 0.9, &w, &zero);
        let z = p.gsor_apply(&BlockVec::new(vec![2.0, 4.0], vec![6.0, 8.0]).unwrap()).unwrap();
        close(&z.to_stacked(), &[1.0, 1.0, 3.0, 2.0]);
    }

    #[test]
    fn blt_and_gsor_agree_when_t_is_identity() {
        let w = SparseSym::tridiag(6, -1.0, 3.0);
        let t = SparseSym::identity(6);
        let r = BlockVec::new((0..6).map(|i| i as f64).collect(), vec![1.0; 6]).unwrap();
        let a = prep(PrecondKind::Blt, 0.8, &w, &t).blt_apply(&r).unwrap();
        let b = prep(PrecondKind::Gsor, 0.8, &w, &t).gsor_apply(&r).unwrap();
        for (x, y) in a.to_stacked().iter().zip(b.to_stacked()) {
            assert!((x - y).abs() <= 1e-14 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn mhss_examples() {
        let id = SparseSym::identity(2);
        let p = prep(PrecondKind::Mhss, 1.0, &id, &id);
        let r = ComplexVec::new(vec![4.0, -8.0], vec![1.0, 2.0]).unwrap();
        let z = p.mhss_apply(&r).unwrap();
        close(&z.re, &[1.0, -2.0]);
        close(&z.im, &[0.25, 0.5]);

        let (w, t) = (scalar(3.0), scalar(1.0));
        let p = prep(PrecondKind::Mhss, 1.0, &w, &t);
        let z = p.mhss_apply(&ComplexVec::new(vec![8.0], vec![16.0]).unwrap()).unwrap();
        close(&[z.re[0], z.im[0]], &[1.0, 2.0]);

        let w = SparseSym::tridiag(4, -1.0, 3.0);
        let id4 = SparseSym::identity(4);
        let p = prep(PrecondKind::Mhss, 2.0, &w, &id4);
        let z = p.mhss_apply(&ComplexVec::new(vec![1.0, 2.0, 3.0, 4.0], vec![0.0; 4]).unwrap()).unwrap();
        assert!(z.im.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn kind_mismatch_and_bad_alpha() {
        let id = SparseSym::identity(2);
        let p = prep(PrecondKind::Mhss, 1.0, &id, &id);
        assert!(matches!(
            Preconditioner::<BlockVec>::apply_inverse(&p, &BlockVec::zeros(2)),
            Err(Error::KindMismatch { .. })
        ));
        assert!(p.blt_apply(&BlockVec::zeros(2)).is_err());
        for kind in [PrecondKind::Gsor, PrecondKind::Mhss] {
            assert!(PrecondOperator::prepare(kind, 0.0, &id, &id, OrderingMethod::Rcm).is_err());
        }
        assert!(PrecondOperator::prepare(PrecondKind::Blt, -1.0, &id, &id, OrderingMethod::Rcm).is_err());
    }

    #[test]
    fn gsor_scalar_iterations() {
        let prob = AssembledProblem::from_parts(
            scalar(1.0),
            scalar(0.0),
            ComplexVec::new(vec![1.0], vec![0.0]).unwrap(),
        )
        .unwrap();
        let (u, rep) = gsor_iterate(&prob, 1.0, 1e-12, 10).unwrap();
        assert_eq!(rep.iterations, 1);
        assert!(rep.converged);
        assert_eq!(u.to_stacked(), vec![1.0, 0.0]);

        // first step with W = T = 1 from zero: x¹ = αp, y¹ = -α²p + αq
        let (p, q, alpha) = (0.7, -0.2, 0.3);
        let prob = AssembledProblem::from_parts(
            scalar(1.0),
            scalar(1.0),
            ComplexVec::new(vec![p], vec![q]).unwrap(),
        )
        .unwrap();
        let (u, _) = gsor_iterate(&prob, alpha, 1e-12, 1).unwrap();
        assert!((u.x[0] - alpha * p).abs() < 1e-15);
        assert!((u.y[0] - (-alpha * alpha * p + alpha * q)).abs() < 1e-15);
    }

    #[test]
    fn mhss_scalar_iterations() {
        let prob = AssembledProblem::from_parts(
            scalar(1.0),
            scalar(1.0),
            ComplexVec::new(vec![1.0], vec![0.0]).unwrap(),
        )
        .unwrap();
        let (u1, _) = mhss_iterate(&prob, 1.0, 1e-12, 1).unwrap();
        assert!((u1.get(0) - Cx::new(0.25, -0.25)).abs() < 1e-15);

        let (_, rep) = mhss_iterate(&prob, 1.0, 1e-12, 60).unwrap();
        assert!(rep.converged);
        for pair in rep.history.windows(2).filter(|p| p[1] > 1e-6) {
            assert!((pair[1] / pair[0] - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn mhss_with_zero_t_solves_w_system() {
        let w = SparseSym::tridiag(5, -1.0, 3.0);
        let t = SparseSym::diagonal(&[0.0; 5]);
        let b = ComplexVec::new(vec![1.0, 0.0, 2.0, 0.0, -1.0], vec![0.5; 5]).unwrap();
        let prob = AssembledProblem::from_parts(w.clone(), t, b.clone()).unwrap();
        let (u, rep) = mhss_iterate(&prob, 1.5, 1e-12, 500).unwrap();
        assert!(rep.converged);
        let wu = w.spmv(&u.re).unwrap();
        for k in 0..5 {
            assert!((wu[k] - b.re[k]).abs() < 1e-10);
        }
    }
}
