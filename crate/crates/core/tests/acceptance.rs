//! Acceptance criteria. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits with status 1 if any failed.

use std::process::ExitCode;
use std::time::Instant;

use cxblt::bench::solve_with;
use cxblt::factor::{factorize, OrderingMethod};
use cxblt::krylov::GmresConfig;
use cxblt::linalg::{apply_complex, apply_realified, BlockVec, ComplexVec, Cx, SparseSym};
use cxblt::precond::{gsor_iterate, mhss_iterate, PrecondKind};
use cxblt::problems::{build_problem, build_problem_unchecked, laplacian_k, AssembledProblem, Example, ProblemSpec};
use cxblt::spectral::{
    blt_preconditioned_matrix, disk_radii, gsor_iteration_matrix, quadratic_roots, nonsym_eigenvalues,
    select_alpha, spectral_radius, sym_eigenvalues, verify_clustering, AlphaBounds, DenseMatrix,
    EigenpairStats,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn problem(example: Example, m: usize) -> AssembledProblem {
    build_problem_unchecked(&ProblemSpec::new(example, m)).expect("assembly")
}

/// Inner GMRES(5) iterations for one cell, `None` if not converged.
fn inner_its(example: Example, m: usize, method: PrecondKind, alpha: Option<f64>) -> Result<Option<usize>, String> {
    let prob = problem(example, m);
    let (r, _) = solve_with(&prob, method, alpha, &GmresConfig::default(), OrderingMethod::default())
        .map_err(|e| e.to_string())?;
    Ok(r.converged.then_some(r.total_inner))
}

/// Each `(m, α, expected)` must converge with `|IT - expected| <= band`.
fn table_cells(example: Example, method: PrecondKind, cells: &[(usize, f64, f64)], band: f64) -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for &(m, alpha, expected) in cells {
        match inner_its(example, m, method, Some(alpha))? {
            Some(it) => {
                let hit = (it as f64 - expected).abs() <= band;
                ok &= hit;
                parts.push(format!("m={m} a={alpha} IT={it} (want {expected}±{band})"));
            }
            None => {
                ok = false;
                parts.push(format!("m={m} a={alpha} no convergence in 500 (want {expected}±{band})"));
            }
        }
    }
    let msg = parts.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn ex1_blt() -> Outcome {
    table_cells(
        Example::Ex1,
        PrecondKind::Blt,
        &[(32, 1.4, 6.0), (64, 1.4, 7.0), (128, 1.5, 7.0), (256, 1.5, 7.0)],
        2.0,
    )
}

fn ex2_blt() -> Outcome {
    table_cells(Example::Ex2, PrecondKind::Blt, &[(32, 0.4, 8.0), (64, 0.4, 8.0), (128, 0.4, 8.0)], 2.0)
}

fn ex3_blt() -> Outcome {
    table_cells(Example::Ex3, PrecondKind::Blt, &[(32, 0.4, 4.0), (64, 0.7, 5.0), (128, 1.0, 7.0)], 3.0)
}

fn ex4_blt() -> Outcome {
    table_cells(Example::Ex4, PrecondKind::Blt, &[(32, 2.1, 21.0)], 4.0)
}

fn ex1_gsor() -> Outcome {
    table_cells(Example::Ex1, PrecondKind::Gsor, &[(64, 0.457, 25.0)], 4.0)
}

fn ex1_mhss() -> Outcome {
    table_cells(Example::Ex1, PrecondKind::Mhss, &[(32, 10.0, 54.0)], 0.2 * 54.0)
}

fn ex2_unpreconditioned_fails() -> Outcome {
    match inner_its(Example::Ex2, 32, PrecondKind::None, None)? {
        None => Ok("ex2 m=32 no preconditioner: not converged in 500".into()),
        Some(it) => Err(format!("ex2 m=32 no preconditioner converged in {it}")),
    }
}

fn random_spd(rng: &mut ChaCha8Rng, n: usize, shift: f64) -> SparseSym {
    let b: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = (0..n).map(|k| b[i * n + k] * b[j * n + k]).sum::<f64>() / n as f64;
        }
        a[i * n + i] += shift;
    }
    SparseSym::from_dense(n, &a).expect("symmetric")
}

fn within(x: f64, lo: f64, hi: f64, slack: f64) -> bool {
    x >= lo - slack * (1.0 + lo.abs()) && x <= hi + slack * (1.0 + hi.abs())
}

fn sandwiches_hold(s: &EigenpairStats, bd: &AlphaBounds, slack: f64) -> bool {
    let (nu1, nun, mu1, mun) = (bd.nu_min, bd.nu_max, bd.mu_min, bd.mu_max);
    within(s.a, mu1, mun, slack)
        && within(s.b, (mu1 / nun).powi(2), (mun / nu1).powi(2), slack)
        && within(s.c, mu1.powi(3) / (nun * nun), mun.powi(3) / (nu1 * nu1), slack)
}

fn random_clustering_trials() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst_eq = 0.0f64;
    let mut eigs = 0;
    for trial in 0..50 {
        let n = rng.gen_range(2..=20);
        let (dw, dt) = (rng.gen_range(0.05..2.0), rng.gen_range(0.01..1.0));
        let w = random_spd(&mut rng, n, dw);
        let t = random_spd(&mut rng, n, dt);
        let alpha = select_alpha(&w, &t).map_err(|e| format!("trial {trial}: {e}"))?.alpha_chosen;
        let rep = verify_clustering(&w, &t, alpha, 1e-8).map_err(|e| format!("trial {trial}: {e}"))?;
        if !rep.all_within {
            return Err(format!(
                "trial {trial} (n={n}, a={alpha:.4e}): max|l-1|={:.6e} outside r1={:.6e}, r2={:?}",
                rep.rows.iter().filter(|r| !r.unit).fold(0.0f64, |m, r| m.max(r.dist)),
                rep.stats_radius,
                rep.extremal_radius
            ));
        }
        if rep.max_quadratic_residual > 1e-8 {
            return Err(format!("trial {trial}: quadratic residual {:.3e}", rep.max_quadratic_residual));
        }
        for row in &rep.rows {
            if let Some(s) = row.stats {
                if !sandwiches_hold(&s, &rep.bounds, 1e-10) {
                    return Err(format!("trial {trial}: bounds violated by a={}, b={}, c={}", s.a, s.b, s.c));
                }
            }
        }
        worst_eq = worst_eq.max(rep.max_quadratic_residual);
        eigs += rep.eigenvalues.len();
    }
    Ok(format!("50 trials, {eigs} eigenvalues, worst quadratic residual {worst_eq:.2e}"))
}

fn scalar_anchor() -> Outcome {
    let one = DenseMatrix::from_rows(&[vec![1.0]]).unwrap();
    let alpha = 0.4;
    let expected = [Cx::new(1.2, -(0.56f64).sqrt()), Cx::new(1.2, 0.56f64.sqrt())];
    let m = blt_preconditioned_matrix(&one, &one, alpha).map_err(|e| e.to_string())?;
    let eig = nonsym_eigenvalues(&m).map_err(|e| e.to_string())?;
    let stats = EigenpairStats { a: 1.0, b: 1.0, c: 1.0 };
    let (p, q, _) = quadratic_roots(&stats, alpha).map_err(|e| e.to_string())?;
    let bounds = AlphaBounds::from_extremes(1.0, 1.0, 1.0, 1.0).map_err(|e| e.to_string())?;
    let radii = disk_radii(&[stats], &bounds, alpha).map_err(|e| e.to_string())?;
    let r = 0.6f64.sqrt();
    let err = [
        (eig[0] - expected[0]).abs(),
        (eig[1] - expected[1]).abs(),
        (q - expected[0]).abs(),
        (p - expected[1]).abs(),
        ((eig[0] - Cx::ONE).abs() - r).abs(),
        (radii.r1 - r).abs(),
        (radii.r2.unwrap_or(f64::NAN) - r).abs(),
    ]
    .into_iter()
    .fold(0.0f64, f64::max);
    let msg = format!("eigenvalues {:.5}{:+.5}i, {:.5}{:+.5}i; max error {err:.2e}", eig[0].re, eig[0].im, eig[1].re, eig[1].im);
    if err <= 1e-10 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn kernel_accuracy() -> Outcome {
    let mut worst_chol = 0.0f64;
    for ex in Example::ALL {
        for m in [4, 8, 16, 32, 64] {
            let prob = build_problem(&ProblemSpec::new(ex, m)).map_err(|e| format!("{ex} m={m}: {e}"))?;
            let f = factorize(&prob.w, OrderingMethod::default()).map_err(|e| e.to_string())?;
            let err = f.reconstruction_error(&prob.w).map_err(|e| e.to_string())?;
            worst_chol = worst_chol.max(err);
        }
    }

    let mut worst_jacobi = 0.0f64;
    for m in [3usize, 7] {
        let h = 1.0 / (m as f64 + 1.0);
        let k = DenseMatrix::from_sparse(&laplacian_k(m).scaled(h * h));
        let got = sym_eigenvalues(&k).map_err(|e| e.to_string())?;
        let theta = |j: usize| 2.0 - 2.0 * (j as f64 * std::f64::consts::PI / (m as f64 + 1.0)).cos();
        let mut want: Vec<f64> = (1..=m).flat_map(|j| (1..=m).map(move |k| theta(j) + theta(k))).collect();
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            worst_jacobi = worst_jacobi.max((g - w).abs());
        }
    }

    let mut worst_op = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for ex in Example::ALL {
        let prob = problem(ex, 16);
        let n = prob.n;
        let u = ComplexVec::new(
            (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        )
        .unwrap();
        let c = apply_complex(&prob.w, &prob.t, &u).map_err(|e| e.to_string())?;
        let r = apply_realified(&prob.w, &prob.t, &BlockVec::from(u)).map_err(|e| e.to_string())?;
        let scale = c.re.iter().chain(&c.im).fold(0.0f64, |m, v| m.max(v.abs()));
        let diff = c.re.iter().zip(&r.x).chain(c.im.iter().zip(&r.y)).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        worst_op = worst_op.max(diff / scale);
    }

    let msg = format!(
        "cholesky {worst_chol:.2e} (<=1e-12), jacobi {worst_jacobi:.2e} (<=1e-10), operators {worst_op:.2e} (<=1e-14)"
    );
    if worst_chol <= 1e-12 && worst_jacobi <= 1e-10 && worst_op <= 1e-14 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn stationary_anchors() -> Outcome {
    let one = SparseSym::identity(1);
    let b = ComplexVec::new(vec![1.0], vec![0.5]).unwrap();
    let scalar = AssembledProblem::from_parts(one.clone(), one, b).map_err(|e| e.to_string())?;
    let (_, rep) = mhss_iterate(&scalar, 1.0, 1e-12, 100).map_err(|e| e.to_string())?;
    let h = &rep.history;
    // steps well above the rounding floor of the residual
    let ratios: Vec<f64> = std::iter::once(&1.0)
        .chain(h.iter())
        .zip(h.iter())
        .filter(|(_, &next)| next > 1e-5)
        .map(|(&prev, &next)| next / prev)
        .collect();
    let ratio_err = ratios.iter().map(|r| (r - 0.5).abs()).fold(0.0f64, f64::max);

    let prob = problem(Example::Ex1, 8);
    let (_, g) = gsor_iterate(&prob, 0.5, 1e-10, 5000).map_err(|e| e.to_string())?;
    let (wd, td) = (DenseMatrix::from_sparse(&prob.w), DenseMatrix::from_sparse(&prob.t));
    let rho = gsor_iteration_matrix(&wd, &td, 0.5)
        .and_then(|m| spectral_radius(&m))
        .map_err(|e| e.to_string())?;

    let msg = format!(
        "mhss ratio error {ratio_err:.2e} over {} of {} steps; gsor ex1 m=8 a=0.5 converged={} in {} steps, rho={rho:.6}",
        ratios.len(),
        h.len(),
        g.converged,
        g.iterations
    );
    if ratio_err <= 1e-10 && g.converged && rho < 1.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("ex1 BLT iteration counts", ex1_blt),
        ("ex2 BLT iteration counts", ex2_blt),
        ("ex3 BLT iteration counts", ex3_blt),
        ("ex4 BLT iteration count", ex4_blt),
        ("ex1 GSOR iteration count", ex1_gsor),
        ("ex1 MHSS iteration count", ex1_mhss),
        ("ex2 unpreconditioned failure", ex2_unpreconditioned_fails),
        ("random clustering trials", random_clustering_trials),
        ("scalar spectral anchor", scalar_anchor),
        ("kernel accuracy", kernel_accuracy),
        ("stationary anchors", stationary_anchors),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "{tag} {:>2} {name} [{:.1}s]: {detail}",
            k + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
