//! Restarted GMRES with right preconditioning, generic over real and complex
//! vector spaces.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{apply_complex, apply_realified, BlockVec, ComplexVec, Cx, Scalar, SparseSym};

/// A vector in an inner-product space over `Self::Scalar`.
pub trait KrylovVector: Clone {
    type Scalar: Scalar;

    fn zeros_like(&self) -> Self;
    /// Inner product `selfᴴ other`, conjugate-linear in `self`.
    fn inner(&self, other: &Self) -> Self::Scalar;
    fn norm(&self) -> f64;
    /// `self += a * x`
    fn axpy(&mut self, a: Self::Scalar, x: &Self);
    fn scale(&mut self, a: Self::Scalar);
}

impl KrylovVector for Vec<f64> {
    type Scalar = f64;

    fn zeros_like(&self) -> Self {
        vec![0.0; self.len()]
    }
    fn inner(&self, other: &Self) -> f64 {
        crate::linalg::dot(self, other)
    }
    fn norm(&self) -> f64 {
        crate::linalg::norm2(self)
    }
    fn axpy(&mut self, a: f64, x: &Self) {
        for (s, xi) in self.iter_mut().zip(x) {
            *s += a * xi;
        }
    }
    fn scale(&mut self, a: f64) {
        self.iter_mut().for_each(|s| *s *= a);
    }
}

impl KrylovVector for BlockVec {
    type Scalar = f64;

    fn zeros_like(&self) -> Self {
        BlockVec::zeros(self.half_len())
    }
    fn inner(&self, other: &Self) -> f64 {
        self.x
            .iter()
            .zip(&other.x)
            .chain(self.y.iter().zip(&other.y))
            .map(|(a, b)| a * b)
            .sum()
    }
    fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }
    fn axpy(&mut self, a: f64, v: &Self) {
        self.x.axpy(a, &v.x);
        self.y.axpy(a, &v.y);
    }
    fn scale(&mut self, a: f64) {
        self.x.scale(a);
        self.y.scale(a);
    }
}

impl KrylovVector for ComplexVec {
    type Scalar = Cx;

    fn zeros_like(&self) -> Self {
        ComplexVec::zeros(self.len())
    }
    fn inner(&self, other: &Self) -> Cx {
        let mut re = 0.0;
        let mut im = 0.0;
        for k in 0..self.len() {
            let (ar, ai) = (self.re[k], self.im[k]);
            let (br, bi) = (other.re[k], other.im[k]);
            re += ar * br + ai * bi;
            im += ar * bi - ai * br;
        }
        Cx::new(re, im)
    }
    fn norm(&self) -> f64 {
        self.re
            .iter()
            .chain(&self.im)
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }
    fn axpy(&mut self, a: Cx, v: &Self) {
        for k in 0..self.len() {
            let (vr, vi) = (v.re[k], v.im[k]);
            self.re[k] += a.re * vr - a.im * vi;
            self.im[k] += a.re * vi + a.im * vr;
        }
    }
    fn scale(&mut self, a: Cx) {
        for k in 0..self.len() {
            let (r, i) = (self.re[k], self.im[k]);
            self.re[k] = a.re * r - a.im * i;
            self.im[k] = a.re * i + a.im * r;
        }
    }
}

pub trait LinearOperator<V> {
    fn apply(&self, x: &V) -> Result<V>;
}

impl<V, F> LinearOperator<V> for F
where
    F: Fn(&V) -> Result<V>,
{
    fn apply(&self, x: &V) -> Result<V> {
        self(x)
    }
}

impl LinearOperator<Vec<f64>> for SparseSym {
    fn apply(&self, x: &Vec<f64>) -> Result<Vec<f64>> {
        self.spmv(x)
    }
}

/// The real block operator `[W -T; T W]`.
#[derive(Debug, Clone, Copy)]
pub struct RealifiedOperator<'a> {
    pub w: &'a SparseSym,
    pub t: &'a SparseSym,
}

impl LinearOperator<BlockVec> for RealifiedOperator<'_> {
    fn apply(&self, x: &BlockVec) -> Result<BlockVec> {
        apply_realified(self.w, self.t, x)
    }
}

/// The complex operator `W + iT`.
#[derive(Debug, Clone, Copy)]
pub struct ComplexOperator<'a> {
    pub w: &'a SparseSym,
    pub t: &'a SparseSym,
}

impl LinearOperator<ComplexVec> for ComplexOperator<'_> {
    fn apply(&self, x: &ComplexVec) -> Result<ComplexVec> {
        apply_complex(self.w, self.t, x)
    }
}

/// The action `z = M⁻¹ r` of a preconditioner `M`.
pub trait Preconditioner<V> {
    fn apply_inverse(&self, r: &V) -> Result<V>;
}

/// `M = I`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl<V: Clone> Preconditioner<V> for Identity {
    fn apply_inverse(&self, r: &V) -> Result<V> {
        Ok(r.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmresConfig {
    /// Arnoldi steps per cycle.
    pub restart: usize,
    /// Relative residual `‖b - A x‖ / ‖b‖` to reach.
    pub tol: f64,
    /// Cap on the total number of Arnoldi steps.
    pub maxit: usize,
    pub record_history: bool,
}

impl Default for GmresConfig {
    fn default() -> Self {
        Self {
            restart: 5,
            tol: 1e-10,
            maxit: 500,
            record_history: false,
        }
    }
}

impl GmresConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restart < 1 {
            return Err(Error::InvalidArgument("restart must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::InvalidArgument("tol must lie in (0, 1)".into()));
        }
        if self.maxit < self.restart {
            return Err(Error::InvalidArgument("maxit must be at least restart".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub converged: bool,
    pub outer_cycles: usize,
    /// Arnoldi steps, each one operator and one preconditioner application.
    pub total_inner: usize,
    /// True relative residual of the returned iterate.
    pub final_relres: f64,
    /// Least-squares residual estimate after every Arnoldi step (relative).
    pub relres_history: Option<Vec<f64>>,
    pub wall_seconds: f64,
    /// Largest `|estimate - true residual| / ‖b‖` seen at a cycle end.
    pub max_restart_gap: f64,
    /// Largest `|vᵢᴴvⱼ - δᵢⱼ|` over all cycles, when history is recorded.
    pub max_orthogonality_loss: Option<f64>,
}

/// Plane rotation `[c s; -s̄ c]` with real `c`.
#[derive(Debug, Clone, Copy)]
struct Rotation<S> {
    c: f64,
    s: S,
}

impl<S: Scalar> Rotation<S> {
    /// Rotation taking `(a, b)` to `(r, 0)`; returns it with `r`.
    fn zeroing(a: S, b: S) -> (Self, S) {
        let abs_a = a.modulus();
        let abs_b = b.modulus();
        if abs_b == 0.0 {
            return (Self { c: 1.0, s: S::zero() }, a);
        }
        if abs_a == 0.0 {
            return (
                Self {
                    c: 0.0,
                    s: b.conj().scale(1.0 / abs_b),
                },
                S::from_real(abs_b),
            );
        }
        let t = abs_a.hypot(abs_b);
        let phase = a.scale(1.0 / abs_a);
        let rot = Self {
            c: abs_a / t,
            s: phase * b.conj().scale(1.0 / t),
        };
        (rot, phase.scale(t))
    }

    fn apply(&self, x: S, y: S) -> (S, S) {
        (
            x.scale(self.c) + self.s * y,
            -(self.s.conj() * x) + y.scale(self.c),
        )
    }
}

/// Restarted GMRES(`cfg.restart`) for `A x = b` with right preconditioning,
/// `A M⁻¹ w = b`, `x = M⁻¹ w`, from a zero initial guess.
///
/// The minimized quantity is the unpreconditioned residual. The true residual
/// is recomputed at the end of every cycle and decides convergence.
pub fn gmres<V, A, M>(op: &A, precond: &M, b: &V, cfg: &GmresConfig) -> Result<(V, SolveReport)>
where
    V: KrylovVector,
    A: LinearOperator<V> + ?Sized,
    M: Preconditioner<V> + ?Sized,
{
    cfg.validate()?;
    let bnorm = b.norm();
    if !(bnorm > 0.0) {
        return Err(Error::InvalidArgument(
            "right-hand side must be nonzero".into(),
        ));
    }
    let start = Instant::now();
    let m = cfg.restart;
    let breakdown = 1e-14 * bnorm;

    let mut x = b.zeros_like();
    let mut r = b.clone();
    let mut beta = bnorm;
    let mut relres = 1.0;
    let mut outer_cycles = 0;
    let mut total_inner = 0;
    let mut max_gap: f64 = 0.0;
    let mut history = cfg.record_history.then(Vec::new);
    let mut orth_loss = cfg.record_history.then_some(0.0f64);

    // h[j] is column j of the Hessenberg matrix, length j + 2
    let mut basis: Vec<V> = Vec::with_capacity(m + 1);
    let mut h: Vec<Vec<V::Scalar>> = Vec::with_capacity(m);
    let mut rotations: Vec<Rotation<V::Scalar>> = Vec::with_capacity(m);
    let mut g: Vec<V::Scalar> = Vec::with_capacity(m + 1);

    while relres > cfg.tol && total_inner < cfg.maxit {
        outer_cycles += 1;
        basis.clear();
        h.clear();
        rotations.clear();
        g.clear();

        let mut v0 = r.clone();
        v0.scale(V::Scalar::from_real(1.0 / beta));
        basis.push(v0);
        g.push(V::Scalar::from_real(beta));
        let mut estimate = relres;

        for j in 0..m {
            if total_inner >= cfg.maxit {
                break;
            }
            total_inner += 1;
            let z = precond.apply_inverse(&basis[j])?;
            let mut w = op.apply(&z)?;

            let mut col: Vec<V::Scalar> = Vec::with_capacity(j + 2);
            for v in &basis {
                let hij = v.inner(&w);
                w.axpy(-hij, v);
                col.push(hij);
            }
            let sub = w.norm();
            col.push(V::Scalar::from_real(sub));

            for (i, rot) in rotations.iter().enumerate() {
                let (a, c) = rot.apply(col[i], col[i + 1]);
                col[i] = a;
                col[i + 1] = c;
            }
            let (rot, diag) = Rotation::zeroing(col[j], col[j + 1]);
            col[j] = diag;
            col[j + 1] = V::Scalar::zero();
            let (gj, gnext) = rot.apply(g[j], V::Scalar::zero());
            g[j] = gj;
            g.push(gnext);
            rotations.push(rot);
            h.push(col);

            estimate = gnext.modulus() / bnorm;
            if let Some(hist) = history.as_mut() {
                hist.push(estimate);
            }
            if sub < breakdown {
                break;
            }
            w.scale(V::Scalar::from_real(1.0 / sub));
            basis.push(w);
            if estimate <= cfg.tol {
                break;
            }
        }

        // back substitution on the triangular factor
        let k = h.len();
        if k == 0 {
            break;
        }
        let mut y = vec![V::Scalar::zero(); k];
        for i in (0..k).rev() {
            let mut acc = g[i];
            for (l, yl) in y.iter().enumerate().skip(i + 1) {
                acc = acc - h[l][i] * *yl;
            }
            y[i] = acc / h[i][i];
        }
        let mut update = basis[0].zeros_like();
        for (v, &yi) in basis.iter().zip(&y) {
            update.axpy(yi, v);
        }
        x.axpy(V::Scalar::from_real(1.0), &precond.apply_inverse(&update)?);

        if let Some(loss) = orth_loss.as_mut() {
            for (i, vi) in basis.iter().enumerate() {
                for (j, vj) in basis.iter().enumerate() {
                    let delta = if i == j { 1.0 } else { 0.0 };
                    let e = (vi.inner(vj) - V::Scalar::from_real(delta)).modulus();
                    *loss = loss.max(e);
                }
            }
        }

        r = b.clone();
        r.axpy(V::Scalar::from_real(-1.0), &op.apply(&x)?);
        beta = r.norm();
        relres = beta / bnorm;
        max_gap = max_gap.max((estimate - relres).abs());
        if !relres.is_finite() {
            break;
        }
    }

    let report = SolveReport {
        converged: relres <= cfg.tol,
        outer_cycles,
        total_inner,
        final_relres: relres,
        relres_history: history,
        wall_seconds: start.elapsed().as_secs_f64(),
        max_restart_gap: max_gap,
        max_orthogonality_loss: orth_loss,
    };
    Ok((x, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(restart: usize) -> GmresConfig {
        GmresConfig {
            restart,
            tol: 1e-12,
            maxit: 500,
            record_history: true,
        }
    }

    #[test]
    fn identity_converges_in_one_step() {
        let id = SparseSym::identity(10);
        let b: Vec<f64> = (0..10).map(|i| i as f64 - 3.5).collect();
        let (x, rep) = gmres(&id, &Identity, &b, &cfg(5)).unwrap();
        assert_eq!(rep.total_inner, 1);
        assert!(rep.converged);
        for (xi, bi) in x.iter().zip(&b) {
            assert!((xi - bi).abs() < 1e-14);
        }
    }

    #[test]
    fn scalar_realified_two_steps() {
        let w = SparseSym::identity(1);
        let t = SparseSym::identity(1);
        let op = RealifiedOperator { w: &w, t: &t };
        let b = BlockVec::new(vec![1.0], vec![0.3]).unwrap();
        let (x, rep) = gmres(&op, &Identity, &b, &cfg(2)).unwrap();
        assert!(rep.converged);
        assert!(rep.total_inner <= 2);
        // (1+i) u = 1 + 0.3i  =>  u = (1.3 - 0.7 i) / 2
        assert!((x.x[0] - 0.65).abs() < 1e-12 && (x.y[0] + 0.35).abs() < 1e-12);
    }

    #[test]
    fn complex_matches_realified_solution() {
        let n = 12;
        let w = SparseSym::tridiag(n, -1.0, 3.0);
        let t = SparseSym::tridiag(n, 0.5, 1.0);
        let re: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let im: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).cos()).collect();
        let bc = ComplexVec::new(re.clone(), im.clone()).unwrap();
        let br = BlockVec::new(re, im).unwrap();
        let c = GmresConfig { restart: 5, tol: 1e-12, maxit: 2000, record_history: false };
        let (uc, rc) = gmres(&ComplexOperator { w: &w, t: &t }, &Identity, &bc, &c).unwrap();
        let (ur, rr) = gmres(&RealifiedOperator { w: &w, t: &t }, &Identity, &br, &c).unwrap();
        assert!(rc.converged && rr.converged);
        let scale = ur.norm();
        for k in 0..n {
            assert!((uc.re[k] - ur.x[k]).abs() <= 1e-8 * scale);
            assert!((uc.im[k] - ur.y[k]).abs() <= 1e-8 * scale);
        }
    }

    #[test]
    fn estimates_monotone_within_cycles_and_orthonormal() {
        let w = SparseSym::tridiag(40, -1.0, 2.05);
        let b = vec![1.0; 40];
        let c = GmresConfig { restart: 5, tol: 1e-10, maxit: 400, record_history: true };
        let (_, rep) = gmres(&w, &Identity, &b, &c).unwrap();
        let hist = rep.relres_history.as_ref().unwrap();
        for cycle in hist.chunks(5) {
            for pair in cycle.windows(2) {
                assert!(pair[1] <= pair[0] * (1.0 + 1e-12));
            }
        }
        assert!(rep.max_orthogonality_loss.unwrap() <= 1e-10);
        assert!(rep.max_restart_gap <= 1e-8);
        assert!(rep.total_inner <= c.maxit);
    }

    #[test]
    fn maxit_caps_inner_steps() {
        let w = SparseSym::tridiag(200, -1.0, 2.0);
        let b = vec![1.0; 200];
        let c = GmresConfig { restart: 5, tol: 1e-10, maxit: 23, record_history: false };
        let (_, rep) = gmres(&w, &Identity, &b, &c).unwrap();
        assert_eq!(rep.total_inner, 23);
        assert!(!rep.converged);
        assert_eq!(rep.outer_cycles, 5);
    }

    #[test]
    fn rejects_zero_rhs_and_bad_config() {
        let w = SparseSym::identity(3);
        assert!(gmres(&w, &Identity, &vec![0.0; 3], &cfg(2)).is_err());
        let bad = GmresConfig { restart: 0, ..GmresConfig::default() };
        assert!(gmres(&w, &Identity, &vec![1.0; 3], &bad).is_err());
        let bad = GmresConfig { maxit: 3, ..GmresConfig::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn complex_rotation_zeroes_second_component() {
        let (rot, r) = Rotation::zeroing(Cx::new(0.3, -1.2), Cx::new(0.8, 0.0));
        let (a, b) = rot.apply(Cx::new(0.3, -1.2), Cx::new(0.8, 0.0));
        assert!((a - r).abs() < 1e-15);
        assert!(b.abs() < 1e-15);
        assert!((r.abs() - (0.09f64 + 1.44 + 0.64).sqrt()).abs() < 1e-15);
    }
}
