use serde::{Deserialize, Serialize};

use super::dense::{DenseCholesky, DenseMatrix};
use super::eigen::{extremal_eigenvalues, hessenberg, hessenberg_eigenvalues, hessenberg_eigenvector, sym_eigenvalues};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{Cx, SparseSym};

/// Largest `2n` for which [`verify_clustering`] forms the dense matrix.
pub const MAX_DENSE_ORDER: usize = 2000;

/// Quadratic forms of an eigenvector's second block `y`:
/// `a = y*Ty/y*y`, `b = ‖W⁻¹Ty‖²/y*y`, `c = (W⁻¹Ty)*T(W⁻¹Ty)/y*y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenpairStats {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Extremal eigenvalues of `W` and `T` and the parameter choices built on them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaBounds {
    /// Upper end of the interval on which every eigenvalue pair is complex.
    pub alpha_star: f64,
    /// Minimizer of the outer disk radius; unavailable when `T` is singular.
    pub alpha_tilde: Option<f64>,
    pub alpha_chosen: f64,
    pub nu_min: f64,
    pub nu_max: f64,
    pub mu_min: f64,
    pub mu_max: f64,
    /// Set when `T` is zero or singular and the fallback choice was used.
    pub degenerate: Option<String>,
}

/// Radii of the two enclosing disks centred at 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskRadii {
    /// From the per-eigenpair quadratic forms.
    pub r1: f64,
    /// From the extremal eigenvalues of `W` and `T`; needs `μ₁ > 0`.
    pub r2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenRow {
    pub lambda: Cx,
    pub dist: f64,
    pub unit: bool,
    /// `‖y‖ / ‖(x; y)‖` for the computed eigenvector.
    pub y_fraction: f64,
    pub stats: Option<EigenpairStats>,
    /// `|a(1-λ)² - αλb + c| / (1 + |λ|²)`.
    pub quadratic_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub alpha: f64,
    pub eigenvalues: Vec<Cx>,
    pub rows: Vec<EigenRow>,
    pub unit_count: usize,
    pub max_dist: f64,
    pub stats_radius: f64,
    pub extremal_radius: Option<f64>,
    pub all_within: bool,
    /// Largest quadratic-relation residual over non-unit eigenpairs.
    pub max_quadratic_residual: f64,
    /// Every eigenvector with negligible `y` belongs to the eigenvalue 1.
    pub zero_y_means_unit: bool,
    pub bounds: AlphaBounds,
}

fn stats_with(chol: &DenseCholesky, t: &DenseMatrix, y: &[Cx]) -> Result<EigenpairStats> {
    check_dim(t.rows(), y.len())?;
    let yy: f64 = y.iter().map(|z| z.norm_sqr()).sum();
    if !(yy > 0.0) {
        return Err(Error::InvalidArgument("eigenvector block y is zero".into()));
    }
    let re: Vec<f64> = y.iter().map(|z| z.re).collect();
    let im: Vec<f64> = y.iter().map(|z| z.im).collect();
    let (tre, tim) = (t.matvec(&re)?, t.matvec(&im)?);
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(p, q)| p * q).sum::<f64>();
    let a = (dot(&re, &tre) + dot(&im, &tim)) / yy;
    let (zre, zim) = (chol.solve(&tre)?, chol.solve(&tim)?);
    let b = (dot(&zre, &zre) + dot(&zim, &zim)) / yy;
    let c = (dot(&zre, &t.matvec(&zre)?) + dot(&zim, &t.matvec(&zim)?)) / yy;
    Ok(EigenpairStats { a, b, c })
}

/// Quadratic forms `(a, b, c)` of `y` with respect to `W` (SPD) and `T`.
pub fn eigenpair_stats(w: &DenseMatrix, t: &DenseMatrix, y: &[Cx]) -> Result<EigenpairStats> {
    check_dim(w.rows(), t.rows())?;
    stats_with(&DenseCholesky::new(w)?, t, y)
}

/// Roots `λ± = 1 + (αb ± √Δ)/(2a)` of `a(1-λ)² = αλb - c`, with
/// `Δ = α²b² + 4a(αb - c)`.
pub fn quadratic_roots(stats: &EigenpairStats, alpha: f64) -> Result<(Cx, Cx, f64)> {
    let EigenpairStats { a, b, c } = *stats;
    if !(a > 0.0) {
        return Err(Error::Degenerate("a = 0, the eigenvalue equals one"));
    }
    let delta = alpha * alpha * b * b + 4.0 * a * (alpha * b - c);
    let root = if delta >= 0.0 {
        Cx::new(delta.sqrt(), 0.0)
    } else {
        Cx::new(0.0, (-delta).sqrt())
    };
    let centre = Cx::new(1.0 + alpha * b / (2.0 * a), 0.0);
    let half = root.scale(1.0 / (2.0 * a));
    Ok((centre + half, centre - half, delta))
}

fn check_extremes(nu_min: f64, nu_max: f64, mu_min: f64, mu_max: f64) -> Result<()> {
    if !(nu_min > 0.0 && nu_max >= nu_min && nu_max.is_finite()) {
        return Err(Error::InvalidArgument("W must be positive definite".into()));
    }
    if !(mu_min >= 0.0 && mu_max >= mu_min && mu_max.is_finite()) {
        return Err(Error::InvalidArgument("T must be positive semidefinite".into()));
    }
    Ok(())
}

/// `α* = 2ν₁³μ₁⁴ / (ν_n²μ_n³(√(ν₁² + μ_n²) + ν₁))`.
pub fn alpha_star(nu_min: f64, nu_max: f64, mu_min: f64, mu_max: f64) -> Result<f64> {
    check_extremes(nu_min, nu_max, mu_min, mu_max)?;
    if mu_max == 0.0 {
        return Err(Error::Degenerate("T is zero, every eigenvalue equals one"));
    }
    Ok(2.0 * nu_min.powi(3) * mu_min.powi(4)
        / (nu_max.powi(2) * mu_max.powi(3) * ((nu_min * nu_min + mu_max * mu_max).sqrt() + nu_min)))
}

/// `α̃ = μ_n³ν_n² / (ν₁²μ₁²)`, where the outer disk radius vanishes.
pub fn alpha_tilde(nu_min: f64, nu_max: f64, mu_min: f64, mu_max: f64) -> Result<Option<f64>> {
    check_extremes(nu_min, nu_max, mu_min, mu_max)?;
    Ok((mu_min > 0.0).then(|| mu_max.powi(3) * nu_max.powi(2) / (nu_min.powi(2) * mu_min.powi(2))))
}

impl AlphaBounds {
    /// Chooses `α` nearest to `α̃` in `(0, α*]`.
    ///
    /// `T = 0` falls back to `α = 1`; singular `T` falls back to `α*/2`
    /// when `α* > 0` and to 1 otherwise.
    pub fn from_extremes(nu_min: f64, nu_max: f64, mu_min: f64, mu_max: f64) -> Result<Self> {
        check_extremes(nu_min, nu_max, mu_min, mu_max)?;
        let mut out = Self {
            alpha_star: 0.0,
            alpha_tilde: None,
            alpha_chosen: 1.0,
            nu_min,
            nu_max,
            mu_min,
            mu_max,
            degenerate: None,
        };
        if mu_max == 0.0 {
            out.degenerate = Some("T is zero".into());
            return Ok(out);
        }
        out.alpha_star = alpha_star(nu_min, nu_max, mu_min, mu_max)?;
        out.alpha_tilde = alpha_tilde(nu_min, nu_max, mu_min, mu_max)?;
        match out.alpha_tilde {
            Some(tilde) if out.alpha_star > 0.0 => {
                out.alpha_chosen = tilde.min(out.alpha_star);
            }
            _ => {
                out.degenerate = Some("T is singular".into());
                out.alpha_chosen = if out.alpha_star > 0.0 {
                    out.alpha_star / 2.0
                } else {
                    1.0
                };
            }
        }
        Ok(out)
    }
}

/// Treats `μ₁` below this fraction of `μ_n` as zero.
const SINGULAR_REL: f64 = 1e-14;

fn bounds_from(nu: (f64, f64), mu: (f64, f64)) -> Result<AlphaBounds> {
    let mu_min = if mu.0 <= SINGULAR_REL * mu.1 { 0.0 } else { mu.0 };
    AlphaBounds::from_extremes(nu.0, nu.1, mu_min, mu.1.max(0.0))
}

/// Parameter selection from the extremal eigenvalues of sparse `W` and `T`.
pub fn select_alpha(w: &SparseSym, t: &SparseSym) -> Result<AlphaBounds> {
    check_dim(w.n(), t.n())?;
    bounds_from(extremal_eigenvalues(w)?, extremal_eigenvalues(t)?)
}

/// Parameter selection for dense `W` and `T` (all eigenvalues by Jacobi).
pub fn select_alpha_dense(w: &DenseMatrix, t: &DenseMatrix) -> Result<AlphaBounds> {
    check_dim(w.rows(), t.rows())?;
    let ew = sym_eigenvalues(w)?;
    let et = sym_eigenvalues(t)?;
    let ends = |e: &[f64]| (e[0], e[e.len() - 1]);
    if ew.is_empty() {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    bounds_from(ends(&ew), ends(&et))
}

/// `r1 = max_k √((c_k - αb_k)/a_k)` over `a_k > 0` (negative radicands
/// clamp to 0) and `r2 = √((μ_n³ν_n² - αμ₁²ν₁²)/(ν₁²ν_n²μ₁))`.
pub fn disk_radii(stats: &[EigenpairStats], bounds: &AlphaBounds, alpha: f64) -> Result<DiskRadii> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument("alpha must be positive".into()));
    }
    let r1 = stats
        .iter()
        .filter(|s| s.a > 0.0)
        .map(|s| ((s.c - alpha * s.b) / s.a).max(0.0).sqrt())
        .fold(0.0, f64::max);
    let AlphaBounds {
        nu_min,
        nu_max,
        mu_min,
        mu_max,
        ..
    } = *bounds;
    let r2 = (mu_min > 0.0).then(|| {
        let num = mu_max.powi(3) * nu_max.powi(2) - alpha * mu_min.powi(2) * nu_min.powi(2);
        (num / (nu_min.powi(2) * nu_max.powi(2) * mu_min)).max(0.0).sqrt()
    });
    Ok(DiskRadii { r1, r2 })
}

fn factor_pair(w: &DenseMatrix, t: &DenseMatrix) -> Result<DenseCholesky> {
    if !w.is_square() || !t.is_square() {
        return Err(Error::InvalidArgument("W and T must be square".into()));
    }
    check_dim(w.rows(), t.rows())?;
    DenseCholesky::new(w)
}

/// Dense `G⁻¹A` with `G = [W 0; αI W]` and `A = [W -T; T W]`.
pub fn blt_preconditioned_matrix(w: &DenseMatrix, t: &DenseMatrix, alpha: f64) -> Result<DenseMatrix> {
    let chol = factor_pair(w, t)?;
    let n = w.rows();
    let mut out = DenseMatrix::zeros(2 * n, 2 * n);
    for j in 0..2 * n {
        let (top, bottom): (Vec<f64>, Vec<f64>) = if j < n {
            (0..n).map(|i| (w[(i, j)], t[(i, j)])).unzip()
        } else {
            (0..n).map(|i| (-t[(i, j - n)], w[(i, j - n)])).unzip()
        };
        let z1 = chol.solve(&top)?;
        let rhs: Vec<f64> = bottom.iter().zip(&z1).map(|(b, z)| b - alpha * z).collect();
        let z2 = chol.solve(&rhs)?;
        for i in 0..n {
            out[(i, j)] = z1[i];
            out[(n + i, j)] = z2[i];
        }
    }
    Ok(out)
}

/// Dense GSOR iteration matrix `[W 0; αT W]⁻¹ [(1-α)W αT; 0 (1-α)W]`.
pub fn gsor_iteration_matrix(w: &DenseMatrix, t: &DenseMatrix, alpha: f64) -> Result<DenseMatrix> {
    let chol = factor_pair(w, t)?;
    let n = w.rows();
    let mut out = DenseMatrix::zeros(2 * n, 2 * n);
    for j in 0..2 * n {
        let (top, bottom): (Vec<f64>, Vec<f64>) = if j < n {
            (0..n).map(|i| ((1.0 - alpha) * w[(i, j)], 0.0)).unzip()
        } else {
            (0..n)
                .map(|i| (alpha * t[(i, j - n)], (1.0 - alpha) * w[(i, j - n)]))
                .unzip()
        };
        let z1 = chol.solve(&top)?;
        let tz1 = t.matvec(&z1)?;
        let rhs: Vec<f64> = bottom.iter().zip(&tz1).map(|(b, z)| b - alpha * z).collect();
        let z2 = chol.solve(&rhs)?;
        for i in 0..n {
            out[(i, j)] = z1[i];
            out[(n + i, j)] = z2[i];
        }
    }
    Ok(out)
}

/// Computes every eigenvalue of the BLT-preconditioned matrix and checks it
/// against both disks, the quadratic relation of its eigenpair and the
/// zero-`y` property.
///
/// Eigenvalues within `1e-8 (1 + max|A|)` of 1 count as unit eigenvalues
/// and are excluded from the disk and quadratic-relation checks.
pub fn verify_clustering(w: &SparseSym, t: &SparseSym, alpha: f64, tol: f64) -> Result<SpectrumReport> {
    check_dim(w.n(), t.n())?;
    let n = w.n();
    if 2 * n > MAX_DENSE_ORDER {
        return Err(Error::InvalidArgument(format!(
            "dense spectrum needs 2n <= {MAX_DENSE_ORDER}, got 2n = {}",
            2 * n
        )));
    }
    if !(alpha > 0.0 && alpha.is_finite()) || !(tol > 0.0) {
        return Err(Error::InvalidArgument("alpha and tol must be positive".into()));
    }
    let wd = DenseMatrix::from_sparse(w);
    let td = DenseMatrix::from_sparse(t);
    let bounds = select_alpha_dense(&wd, &td)?;
    let chol = DenseCholesky::new(&wd)?;
    let m = blt_preconditioned_matrix(&wd, &td, alpha)?;
    let (h, q) = hessenberg(&m, true)?;
    let q = q.expect("requested");
    let mut eigenvalues = hessenberg_eigenvalues(&h)?;
    eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    let unit_tol = 1e-8 * (1.0 + wd.max_abs().max(td.max_abs()));
    let mut rows = Vec::with_capacity(2 * n);
    for (k, &lambda) in eigenvalues.iter().enumerate() {
        let v = hessenberg_eigenvector(&h, lambda, k as u64);
        let u: Vec<Cx> = (0..2 * n)
            .map(|i| (0..2 * n).fold(Cx::ZERO, |s, j| s + v[j].scale(q[(i, j)])))
            .collect();
        let unorm = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let y = &u[n..];
        let ynorm = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let dist = (lambda - Cx::ONE).abs();
        let unit = dist <= unit_tol;
        let stats = if ynorm > 0.0 {
            Some(stats_with(&chol, &td, y)?)
        } else {
            None
        };
        let quadratic_residual = stats.map(|s| {
            let one_minus = Cx::ONE - lambda;
            let r = (one_minus * one_minus).scale(s.a) - lambda.scale(alpha * s.b) + Cx::from(s.c);
            r.abs() / (1.0 + lambda.norm_sqr())
        });
        rows.push(EigenRow {
            lambda,
            dist,
            unit,
            y_fraction: ynorm / unorm,
            stats,
            quadratic_residual,
        });
    }

    let nonunit_stats: Vec<EigenpairStats> =
        rows.iter().filter(|r| !r.unit).filter_map(|r| r.stats).collect();
    let radii = disk_radii(&nonunit_stats, &bounds, alpha)?;
    let bound = radii.r1.min(radii.r2.unwrap_or(f64::INFINITY)) + tol;
    let max_nonunit = rows.iter().filter(|r| !r.unit).fold(0.0f64, |m, r| m.max(r.dist));
    let max_quadratic_residual = rows
        .iter()
        .filter(|r| !r.unit)
        .filter_map(|r| r.quadratic_residual)
        .fold(0.0, f64::max);
    Ok(SpectrumReport {
        alpha,
        unit_count: rows.iter().filter(|r| r.unit).count(),
        max_dist: rows.iter().fold(0.0f64, |m, r| m.max(r.dist)),
        stats_radius: radii.r1,
        extremal_radius: radii.r2,
        all_within: max_nonunit <= bound,
        max_quadratic_residual,
        zero_y_means_unit: rows.iter().all(|r| r.y_fraction > tol || r.unit),
        eigenvalues,
        rows,
        bounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(v: f64) -> DenseMatrix {
        DenseMatrix::from_rows(&[vec![v]]).unwrap()
    }

    #[test]
    fn stats_examples() {
        let s = eigenpair_stats(&scalar(2.0), &scalar(1.0), &[Cx::new(0.6, 0.8)]).unwrap();
        assert!((s.a - 1.0).abs() < 1e-15 && (s.b - 0.25).abs() < 1e-15 && (s.c - 0.25).abs() < 1e-15);

        // W = I, y an eigenvector of T with eigenvalue 3
        let t = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let y = [Cx::new(1.0, 0.0), Cx::new(1.0, 0.0)];
        let s = eigenpair_stats(&DenseMatrix::identity(2), &t, &y).unwrap();
        assert!((s.a - 3.0).abs() < 1e-14 && (s.b - 9.0).abs() < 1e-13 && (s.c - 27.0).abs() < 1e-12);

        let s = eigenpair_stats(&DenseMatrix::identity(2), &DenseMatrix::zeros(2, 2), &y).unwrap();
        assert_eq!((s.a, s.b, s.c), (0.0, 0.0, 0.0));
        assert!(eigenpair_stats(&scalar(1.0), &scalar(1.0), &[Cx::ZERO]).is_err());
    }

    #[test]
    fn roots_examples() {
        let unit = EigenpairStats { a: 1.0, b: 1.0, c: 1.0 };
        let (p, m, delta) = quadratic_roots(&unit, 0.4).unwrap();
        assert!((delta + 2.24).abs() < 1e-14);
        let im = 0.56f64.sqrt();
        assert!((p - Cx::new(1.2, im)).abs() < 1e-14 && (m - Cx::new(1.2, -im)).abs() < 1e-14);

        let s = EigenpairStats { a: 2.0, b: 0.5, c: 3.0 };
        let (p, _, _) = quadratic_roots(&s, 0.0).unwrap();
        assert!((p - Cx::new(1.0, (1.5f64).sqrt())).abs() < 1e-14);
        let (_, _, delta) = quadratic_roots(&EigenpairStats { a: 2.0, b: 0.0, c: 3.0 }, 0.7).unwrap();
        assert_eq!(delta, -24.0);

        assert!(matches!(
            quadratic_roots(&EigenpairStats { a: 0.0, b: 0.0, c: 0.0 }, 1.0),
            Err(Error::Degenerate(_))
        ));

        // both roots satisfy a(1-λ)² = αλb - c
        for (s, alpha) in [(s, 0.3), (unit, 2.5), (EigenpairStats { a: 0.7, b: 3.0, c: 0.1 }, 1.1)] {
            let (p, m, _) = quadratic_roots(&s, alpha).unwrap();
            for l in [p, m] {
                let lhs = ((Cx::ONE - l) * (Cx::ONE - l)).scale(s.a);
                let rhs = l.scale(alpha * s.b) - Cx::from(s.c);
                assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
            }
        }
    }

    #[test]
    fn alpha_formulas() {
        let a = alpha_star(1.0, 1.0, 1.0, 1.0).unwrap();
        assert!((a - 2.0 * (2f64.sqrt() - 1.0)).abs() < 1e-15);
        // the per-eigenpair bound 2(√(a(a+c)) - a)/b gives the same value
        assert!((a - 2.0 * (2f64.sqrt() - 1.0) / 1.0).abs() < 1e-15);
        assert_eq!(alpha_star(1.0, 1.0, 0.0, 1.0).unwrap(), 0.0);
        let a = alpha_star(1.0, 1.0, 1.0, 2.0).unwrap();
        assert!((a - (5f64.sqrt() - 1.0) / 16.0).abs() < 1e-15);
        assert!(matches!(alpha_star(1.0, 1.0, 0.0, 0.0), Err(Error::Degenerate(_))));
        assert!(alpha_star(0.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn selection_examples() {
        let id = DenseMatrix::identity(3);
        let b = select_alpha_dense(&id, &id).unwrap();
        assert_eq!(b.alpha_tilde, Some(1.0));
        assert!((b.alpha_chosen - 0.828427124746).abs() < 1e-11);
        assert!(b.degenerate.is_none());

        let b = select_alpha_dense(&id, &DenseMatrix::zeros(3, 3)).unwrap();
        assert_eq!(b.alpha_chosen, 1.0);
        assert!(b.degenerate.is_some());

        let t = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let b = select_alpha_dense(&DenseMatrix::identity(2), &t).unwrap();
        assert!((b.alpha_tilde.unwrap() - 8.0).abs() < 1e-14);
        assert!((b.alpha_chosen - 0.077254248593736).abs() < 1e-13);

        let t = DenseMatrix::from_rows(&[vec![0.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let b = select_alpha_dense(&DenseMatrix::identity(2), &t).unwrap();
        assert_eq!((b.alpha_star, b.alpha_tilde, b.alpha_chosen), (0.0, None, 1.0));

        // sparse and dense paths agree
        let w = SparseSym::tridiag(10, -1.0, 4.0);
        let t = SparseSym::tridiag(10, -1.0, 2.5);
        let s = select_alpha(&w, &t).unwrap();
        let d = select_alpha_dense(&DenseMatrix::from_sparse(&w), &DenseMatrix::from_sparse(&t)).unwrap();
        assert_eq!(s, d);
    }

    #[test]
    fn radii_examples() {
        let unit = EigenpairStats { a: 1.0, b: 1.0, c: 1.0 };
        let id = DenseMatrix::identity(1);
        let bounds = select_alpha_dense(&id, &id).unwrap();
        let r = disk_radii(&[unit], &bounds, 0.4).unwrap();
        assert!((r.r1 - 0.6f64.sqrt()).abs() < 1e-15);
        assert!((r.r2.unwrap() - 0.6f64.sqrt()).abs() < 1e-15);
        let r = disk_radii(&[unit], &bounds, bounds.alpha_star).unwrap();
        assert!((r.r1 - 0.414213562373).abs() < 1e-11);

        // α = α̃ zeroes the outer radius when α̃ ≤ α*
        let b = AlphaBounds::from_extremes(1.0, 1.0, 1.0, 1.0).unwrap();
        let r = disk_radii(&[], &b, b.alpha_tilde.unwrap()).unwrap();
        assert_eq!(r.r2, Some(0.0));

        let mut prev = f64::INFINITY;
        for k in 1..=10 {
            let alpha = bounds.alpha_star * k as f64 / 10.0;
            let r2 = disk_radii(&[], &bounds, alpha).unwrap().r2.unwrap();
            assert!(r2 <= prev);
            prev = r2;
        }
        assert!(disk_radii(&[], &bounds, 0.0).is_err());
    }

    #[test]
    fn scalar_spectrum() {
        let one = SparseSym::identity(1);
        let rep = verify_clustering(&one, &one, 0.4, 1e-10).unwrap();
        let im = 0.56f64.sqrt();
        assert!((rep.eigenvalues[0] - Cx::new(1.2, -im)).abs() < 1e-13);
        assert!((rep.eigenvalues[1] - Cx::new(1.2, im)).abs() < 1e-13);
        assert!((rep.max_dist - 0.6f64.sqrt()).abs() < 1e-12);
        assert!(rep.all_within);
        assert!(rep.max_quadratic_residual < 1e-12);
    }

    #[test]
    fn zero_t_spectrum_is_unit() {
        let w = SparseSym::tridiag(5, -1.0, 3.0);
        let t = SparseSym::diagonal(&[0.0; 5]);
        let rep = verify_clustering(&w, &t, 0.5, 1e-8).unwrap();
        assert_eq!(rep.unit_count, 10);
        assert!(rep.max_dist <= 1e-8);
        assert!(rep.all_within);
        assert!(rep.zero_y_means_unit);
    }

    #[test]
    fn gsor_matrix_scalar() {
        // W = T = 1: [1 0; α 1]⁻¹ [1-α α; 0 1-α]
        let g = gsor_iteration_matrix(&scalar(1.0), &scalar(1.0), 0.5).unwrap();
        let expect = [[0.5, 0.5], [-0.25, 0.25]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((g[(i, j)] - expect[i][j]).abs() < 1e-15);
            }
        }
    }
}
