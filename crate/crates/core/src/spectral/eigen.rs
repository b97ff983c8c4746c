use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::factor::{factorize, OrderingMethod};
use crate::linalg::{dot, norm2, Cx, SparseSym};

const JACOBI_MAX_SWEEPS: usize = 100;

/// Above this order extremal eigenvalues of sparse matrices come from
/// shifted inverse iteration instead of a full Jacobi solve.
pub const DENSE_EIG_LIMIT: usize = 256;

fn check_square(d: &DenseMatrix) -> Result<()> {
    if d.is_square() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "eigenvalues need a square matrix, got {}x{}",
            d.rows(),
            d.cols()
        )))
    }
}

/// All eigenvalues of a symmetric matrix by cyclic Jacobi, ascending.
pub fn sym_eigenvalues(s: &DenseMatrix) -> Result<Vec<f64>> {
    check_square(s)?;
    if !s.is_symmetric(1e-12) {
        return Err(Error::InvalidArgument("matrix is not symmetric".into()));
    }
    let n = s.rows();
    let mut a = s.clone();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    let target = 1e-12 * a.frobenius();
    let off = |a: &DenseMatrix| {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc += a[(i, j)] * a[(i, j)];
                }
            }
        }
        acc.sqrt()
    };
    let mut sweeps = 0;
    while off(&a) > target {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::InvalidArgument(format!(
                "Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps"
            )));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// Householder reduction `A = Q H Qᵀ` with `H` upper Hessenberg.
/// `Q` is accumulated only when requested.
pub fn hessenberg(a: &DenseMatrix, want_q: bool) -> Result<(DenseMatrix, Option<DenseMatrix>)> {
    check_square(a)?;
    let n = a.rows();
    let mut h = a.clone();
    let mut q = want_q.then(|| DenseMatrix::identity(n));
    let mut u = vec![0.0; n];
    for m in 1..n.saturating_sub(1) {
        let scale: f64 = (m..n).map(|i| h[(i, m - 1)].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut hh = 0.0;
        for i in m..n {
            u[i] = h[(i, m - 1)] / scale;
            hh += u[i] * u[i];
        }
        let mut g = hh.sqrt();
        if u[m] > 0.0 {
            g = -g;
        }
        hh -= u[m] * g;
        u[m] -= g;
        // H <- P H P with P = I - u uᵀ / hh
        for j in m - 1..n {
            let f: f64 = (m..n).map(|i| u[i] * h[(i, j)]).sum::<f64>() / hh;
            for i in m..n {
                h[(i, j)] -= f * u[i];
            }
        }
        for i in 0..n {
            let f: f64 = (m..n).map(|j| u[j] * h[(i, j)]).sum::<f64>() / hh;
            for j in m..n {
                h[(i, j)] -= f * u[j];
            }
        }
        if let Some(q) = q.as_mut() {
            for i in 0..n {
                let f: f64 = (m..n).map(|j| u[j] * q[(i, j)]).sum::<f64>() / hh;
                for j in m..n {
                    q[(i, j)] -= f * u[j];
                }
            }
        }
        for i in m + 1..n {
            h[(i, m - 1)] = 0.0;
        }
    }
    Ok((h, q))
}

/// Eigenvalues of an upper Hessenberg matrix by Francis double-shift QR.
///
/// Gives up after `30 n` iterations in total, returning the eigenvalues
/// deflated so far inside the error.
pub fn hessenberg_eigenvalues(h: &DenseMatrix) -> Result<Vec<Cx>> {
    check_square(h)?;
    let n = h.rows();
    let mut a = h.clone();
    let mut eig = Vec::with_capacity(n);
    let anorm: f64 = (0..n)
        .flat_map(|i| (i.saturating_sub(1)..n).map(move |j| (i, j)))
        .map(|(i, j)| a[(i, j)].abs())
        .sum();
    let eps = f64::EPSILON;
    let limit = 30 * n.max(1);
    let mut total = 0usize;
    let mut shift_acc = 0.0;
    let mut nn = n as isize - 1;
    while nn >= 0 {
        let mut its = 0usize;
        loop {
            let top = nn as usize;
            // look for a negligible subdiagonal entry
            let mut l = top;
            while l >= 1 {
                let mut s = a[(l - 1, l - 1)].abs() + a[(l, l)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[(l, l - 1)].abs() <= eps * s {
                    a[(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[(top, top)];
            if l == top {
                eig.push(Cx::new(x + shift_acc, 0.0));
                nn -= 1;
                break;
            }
            let mut y = a[(top - 1, top - 1)];
            let mut w = a[(top, top - 1)] * a[(top - 1, top)];
            if l == top - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                x += shift_acc;
                if q >= 0.0 {
                    let z = p + z.copysign(p);
                    let second = if z != 0.0 { x - w / z } else { x + z };
                    eig.push(Cx::new(x + z, 0.0));
                    eig.push(Cx::new(second, 0.0));
                } else {
                    eig.push(Cx::new(x + p, z));
                    eig.push(Cx::new(x + p, -z));
                }
                nn -= 2;
                break;
            }
            if total >= limit {
                return Err(Error::QrNoConvergence {
                    iterations: total,
                    found: eig,
                });
            }
            if its > 0 && its % 10 == 0 {
                // exceptional shift
                shift_acc += x;
                for i in 0..=top {
                    a[(i, i)] -= x;
                }
                let s = a[(top, top - 1)].abs() + a[(top - 1, top - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            total += 1;
            francis_step(&mut a, l, top, x, y, w);
        }
    }
    Ok(eig)
}

/// One double-shift QR sweep on the active block `l..=top`.
fn francis_step(a: &mut DenseMatrix, l: usize, top: usize, x: f64, y: f64, w: f64) {
    let eps = f64::EPSILON;
    let (mut p, mut q, mut r): (f64, f64, f64);
    let mut m = top - 2;
    loop {
        let z = a[(m, m)];
        let rr = x - z;
        let s = y - z;
        p = (rr * s - w) / a[(m + 1, m)] + a[(m, m + 1)];
        q = a[(m + 1, m + 1)] - z - rr - s;
        r = a[(m + 2, m + 1)];
        let s = p.abs() + q.abs() + r.abs();
        p /= s;
        q /= s;
        r /= s;
        if m == l {
            break;
        }
        let u = a[(m, m - 1)].abs() * (q.abs() + r.abs());
        let v = p.abs() * (a[(m - 1, m - 1)].abs() + z.abs() + a[(m + 1, m + 1)].abs());
        if u <= eps * v {
            break;
        }
        m -= 1;
    }
    for i in m + 2..=top {
        a[(i, i - 2)] = 0.0;
        if i != m + 2 {
            a[(i, i - 3)] = 0.0;
        }
    }
    let mut k = m;
    while k < top {
        let mut xk = 0.0;
        if k != m {
            p = a[(k, k - 1)];
            q = a[(k + 1, k - 1)];
            r = if k != top - 1 { a[(k + 2, k - 1)] } else { 0.0 };
            xk = p.abs() + q.abs() + r.abs();
            if xk != 0.0 {
                p /= xk;
                q /= xk;
                r /= xk;
            }
        }
        let s = (p * p + q * q + r * r).sqrt().copysign(p);
        if s != 0.0 {
            if k == m {
                if l != m {
                    a[(k, k - 1)] = -a[(k, k - 1)];
                }
            } else {
                a[(k, k - 1)] = -s * xk;
            }
            p += s;
            let xr = p / s;
            let yr = q / s;
            let zr = r / s;
            q /= p;
            r /= p;
            for j in k..=top {
                let mut pp = a[(k, j)] + q * a[(k + 1, j)];
                if k != top - 1 {
                    pp += r * a[(k + 2, j)];
                    a[(k + 2, j)] -= pp * zr;
                }
                a[(k + 1, j)] -= pp * yr;
                a[(k, j)] -= pp * xr;
            }
            let mmin = top.min(k + 3);
            for i in l..=mmin {
                let mut pp = xr * a[(i, k)] + yr * a[(i, k + 1)];
                if k != top - 1 {
                    pp += zr * a[(i, k + 2)];
                    a[(i, k + 2)] -= pp * r;
                }
                a[(i, k + 1)] -= pp * q;
                a[(i, k)] -= pp;
            }
        }
        k += 1;
    }
}

fn sort_complex(v: &mut [Cx]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// All eigenvalues of a general real matrix, sorted by real then imaginary part.
pub fn nonsym_eigenvalues(d: &DenseMatrix) -> Result<Vec<Cx>> {
    let (h, _) = hessenberg(d, false)?;
    let mut eig = hessenberg_eigenvalues(&h)?;
    if eig.iter().any(|z| !z.is_finite()) {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }
    sort_complex(&mut eig);
    Ok(eig)
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(d: &DenseMatrix) -> Result<f64> {
    Ok(nonsym_eigenvalues(d)?.iter().fold(0.0, |m, z| m.max(z.abs())))
}

/// Eigenvector of the Hessenberg matrix `h` for the eigenvalue `sigma`:
/// two steps of inverse iteration from a seeded random start.
pub(crate) fn hessenberg_eigenvector(h: &DenseMatrix, sigma: Cx, seed: u64) -> Vec<Cx> {
    let n = h.rows();
    let scale = h.max_abs().max(f64::MIN_POSITIVE);
    // keep the shifted matrix numerically nonsingular
    let shift = sigma + Cx::new(1e-10 * (1.0 + sigma.abs()), 0.0);
    let mut u = vec![Cx::ZERO; n * n];
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            u[i * n + j] = Cx::from(h[(i, j)]);
        }
        u[i * n + i] -= shift;
    }
    let mut swapped = vec![false; n];
    let mut mult = vec![Cx::ZERO; n];
    for k in 0..n.saturating_sub(1) {
        if u[(k + 1) * n + k].abs() > u[k * n + k].abs() {
            swapped[k] = true;
            for j in k..n {
                u.swap(k * n + j, (k + 1) * n + j);
            }
        }
        if u[k * n + k].abs() == 0.0 {
            u[k * n + k] = Cx::new(f64::EPSILON * scale, 0.0);
        }
        let l = u[(k + 1) * n + k] / u[k * n + k];
        mult[k] = l;
        u[(k + 1) * n + k] = Cx::ZERO;
        for j in k + 1..n {
            let ukj = u[k * n + j];
            u[(k + 1) * n + j] -= l * ukj;
        }
    }
    for k in 0..n {
        if u[k * n + k].abs() == 0.0 {
            u[k * n + k] = Cx::new(f64::EPSILON * scale, 0.0);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<Cx> = (0..n)
        .map(|_| Cx::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    for _ in 0..2 {
        for k in 0..n.saturating_sub(1) {
            if swapped[k] {
                v.swap(k, k + 1);
            }
            let vk = v[k];
            v[k + 1] -= mult[k] * vk;
        }
        for i in (0..n).rev() {
            let mut s = v[i];
            for j in i + 1..n {
                s -= u[i * n + j] * v[j];
            }
            v[i] = s / u[i * n + i];
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut v {
            *z = z.scale(1.0 / norm);
        }
    }
    v
}

/// Smallest and largest eigenvalue of a symmetric positive semidefinite
/// matrix. Small matrices use Jacobi; larger ones use shifted inverse
/// iteration with sparse Cholesky. A singular matrix reports a minimum of 0.
pub fn extremal_eigenvalues(s: &SparseSym) -> Result<(f64, f64)> {
    let n = s.n();
    if n == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    if n <= DENSE_EIG_LIMIT {
        let eig = sym_eigenvalues(&DenseMatrix::from_sparse(s))?;
        return Ok((eig[0], eig[n - 1]));
    }
    if s.max_abs() == 0.0 {
        return Ok((0.0, 0.0));
    }
    let gersh = (0..n)
        .map(|i| s.row(i).1.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut margin = 1e-6;
    let max = loop {
        let shifted = s.linear_combination(-1.0, &SparseSym::identity(n), gersh * (1.0 + margin))?;
        match inverse_iteration_rq(&shifted, s) {
            Ok(v) => break v,
            Err(Error::NotPositiveDefinite { .. }) if margin < 1.0 => margin *= 100.0,
            Err(e) => return Err(e),
        }
    };
    let min = match inverse_iteration_rq(s, s) {
        Ok(v) => v.max(0.0),
        Err(Error::NotPositiveDefinite { .. }) => 0.0,
        Err(e) => return Err(e),
    };
    Ok((min, max))
}

/// Rayleigh quotient of `s` at the dominant eigenvector of `b⁻¹`.
fn inverse_iteration_rq(b: &SparseSym, s: &SparseSym) -> Result<f64> {
    let f = factorize(b, OrderingMethod::default())?;
    let n = s.n();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..1.5)).collect();
    let mut rq = f64::NAN;
    for _ in 0..1000 {
        let mut z = f.solve_spd(&v)?;
        let nz = norm2(&z);
        z.iter_mut().for_each(|x| *x /= nz);
        let next = dot(&z, &s.spmv(&z)?);
        v = z;
        if (next - rq).abs() <= 1e-13 * next.abs() {
            return Ok(next);
        }
        rq = next;
    }
    Ok(rq)
}
