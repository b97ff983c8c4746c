//! Benchmark driver: runs GMRES(restart) with each preconditioner over a
//! grid of problems and sizes and records one row per run.

mod output;
mod reference;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::OrderingMethod;
use crate::krylov::{gmres, ComplexOperator, GmresConfig, RealifiedOperator, SolveReport};
use crate::linalg::BlockVec;
use crate::precond::{PrecondKind, PrecondOperator};
use crate::problems::{build_problem_unchecked, AssembledProblem, Example, ProblemSpec};
use crate::spectral::select_alpha;

pub use output::{
    dump_problem, emit_table, format_table, parse_table, spectrum_dump, write_spectrum_csv,
    TableFormat, MAX_SPECTRUM_ORDER,
};
pub use reference::{reference_cell, table_alpha, ReferenceCell, ReferenceIt, REFERENCE_SIZES};

/// How the parameter of a preconditioner is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphaChoice {
    /// Tabulated value for the example and size.
    Table,
    /// Spectral selection for BLT; the tabulated value for GSOR and MHSS.
    Auto,
    /// One run per listed value.
    List(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub examples: Vec<Example>,
    pub sizes: Vec<usize>,
    pub methods: Vec<PrecondKind>,
    pub alpha: AlphaChoice,
    /// Per-method replacements for `alpha`.
    pub alpha_overrides: BTreeMap<PrecondKind, AlphaChoice>,
    pub restart: usize,
    pub tol: f64,
    pub maxit: usize,
    pub ordering: OrderingMethod,
}

impl Default for BenchConfig {
    fn default() -> Self {
        let g = GmresConfig::default();
        Self {
            examples: Example::ALL.to_vec(),
            sizes: vec![32],
            methods: PrecondKind::ALL.to_vec(),
            alpha: AlphaChoice::Table,
            alpha_overrides: BTreeMap::new(),
            restart: g.restart,
            tol: g.tol,
            maxit: g.maxit,
            ordering: OrderingMethod::default(),
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.examples.is_empty() || self.sizes.is_empty() || self.methods.is_empty() {
            return Err(Error::InvalidArgument(
                "examples, sizes and methods must all be nonempty".into(),
            ));
        }
        if let Some(&m) = self.sizes.iter().find(|&&m| m < 2) {
            return Err(Error::InvalidArgument(format!("grid size {m} is too small")));
        }
        for choice in std::iter::once(&self.alpha).chain(self.alpha_overrides.values()) {
            if let AlphaChoice::List(v) = choice {
                if v.is_empty() || v.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
                    return Err(Error::InvalidArgument(
                        "alpha lists must be nonempty and positive".into(),
                    ));
                }
            }
        }
        self.gmres_config().validate()
    }

    pub fn gmres_config(&self) -> GmresConfig {
        GmresConfig {
            restart: self.restart,
            tol: self.tol,
            maxit: self.maxit,
            record_history: false,
        }
    }

    fn choice_for(&self, method: PrecondKind) -> &AlphaChoice {
        self.alpha_overrides.get(&method).unwrap_or(&self.alpha)
    }
}

/// One benchmark run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub example: Example,
    pub m: usize,
    pub method: PrecondKind,
    pub alpha: Option<f64>,
    pub converged: bool,
    pub outer_cycles: usize,
    pub total_inner: usize,
    pub final_relres: f64,
    pub wall_seconds: f64,
    pub factor_seconds: f64,
    /// Set when assembly, factorization or the solve failed.
    pub error: Option<String>,
}

impl BenchRow {
    fn failed(example: Example, m: usize, method: PrecondKind, alpha: Option<f64>, err: &Error) -> Self {
        Self {
            example,
            m,
            method,
            alpha,
            converged: false,
            outer_cycles: 0,
            total_inner: 0,
            final_relres: f64::NAN,
            wall_seconds: 0.0,
            factor_seconds: 0.0,
            error: Some(err.to_string()),
        }
    }
}

/// Runs GMRES with the given preconditioner on an assembled problem.
///
/// BLT, GSOR and the unpreconditioned solve work on the real block form;
/// MHSS works on the complex form. Returns the report and the
/// factorization time; the report's wall time includes the factorization.
pub fn solve_with(
    prob: &AssembledProblem,
    method: PrecondKind,
    alpha: Option<f64>,
    cfg: &GmresConfig,
    ordering: OrderingMethod,
) -> Result<(SolveReport, f64)> {
    let pre = match method {
        PrecondKind::None => PrecondOperator::none(),
        _ => {
            let alpha = alpha.ok_or_else(|| {
                Error::InvalidArgument(format!("{method} needs a parameter"))
            })?;
            PrecondOperator::prepare(method, alpha, &prob.w, &prob.t, ordering)?
        }
    };
    let factor_seconds = pre.factor_seconds();
    let mut report = match method {
        PrecondKind::Mhss => {
            let op = ComplexOperator { w: &prob.w, t: &prob.t };
            gmres(&op, &pre, &prob.b, cfg)?.1
        }
        _ => {
            let op = RealifiedOperator { w: &prob.w, t: &prob.t };
            gmres(&op, &pre, &BlockVec::from(prob.b.clone()), cfg)?.1
        }
    };
    report.wall_seconds += factor_seconds;
    Ok((report, factor_seconds))
}

fn row_from(
    prob: &AssembledProblem,
    method: PrecondKind,
    alpha: Option<f64>,
    cfg: &BenchConfig,
) -> BenchRow {
    let (example, m) = (prob.spec.example, prob.spec.m);
    match solve_with(prob, method, alpha, &cfg.gmres_config(), cfg.ordering) {
        Ok((r, factor_seconds)) => BenchRow {
            example,
            m,
            method,
            alpha,
            converged: r.converged,
            outer_cycles: r.outer_cycles,
            total_inner: r.total_inner,
            final_relres: r.final_relres,
            wall_seconds: r.wall_seconds,
            factor_seconds,
            error: None,
        },
        Err(e) => BenchRow::failed(example, m, method, alpha, &e),
    }
}

fn resolve_alphas(prob: &AssembledProblem, method: PrecondKind, cfg: &BenchConfig) -> Result<Vec<Option<f64>>> {
    if method == PrecondKind::None {
        return Ok(vec![None]);
    }
    let (example, m) = (prob.spec.example, prob.spec.m);
    let tabulated = || {
        table_alpha(example, method, m).map(|a| vec![Some(a)]).ok_or_else(|| {
            Error::InvalidArgument(format!("no tabulated alpha for {example} {method} m={m}"))
        })
    };
    match cfg.choice_for(method) {
        AlphaChoice::List(v) => Ok(v.iter().map(|&a| Some(a)).collect()),
        AlphaChoice::Table => tabulated(),
        AlphaChoice::Auto if method == PrecondKind::Blt => {
            Ok(vec![Some(select_alpha(&prob.w, &prob.t)?.alpha_chosen)])
        }
        AlphaChoice::Auto => tabulated(),
    }
}

/// Runs every `(example, m, method, α)` cell. Failures are recorded in the
/// row's `error` field and do not stop the batch.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for &example in &cfg.examples {
        for &m in &cfg.sizes {
            let prob = match build_problem_unchecked(&ProblemSpec::new(example, m)) {
                Ok(p) => p,
                Err(e) => {
                    for &method in &cfg.methods {
                        rows.push(BenchRow::failed(example, m, method, None, &e));
                    }
                    continue;
                }
            };
            for &method in &cfg.methods {
                match resolve_alphas(&prob, method, cfg) {
                    Ok(alphas) => {
                        for alpha in alphas {
                            rows.push(row_from(&prob, method, alpha, cfg));
                        }
                    }
                    Err(e) => rows.push(BenchRow::failed(example, m, method, None, &e)),
                }
            }
        }
    }
    Ok(rows)
}

/// Evenly spaced grid of `steps` values from `lo` to `hi` inclusive.
pub fn alpha_grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) || steps == 0 {
        return Err(Error::InvalidArgument(
            "need 0 < alpha_min <= alpha_max and at least one step".into(),
        ));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..steps)
        .map(|k| lo + (hi - lo) * k as f64 / (steps - 1) as f64)
        .collect())
}

/// One run per grid value of `α` for a single example, size and method.
pub fn sweep(
    example: Example,
    m: usize,
    method: PrecondKind,
    alphas: &[f64],
    cfg: &BenchConfig,
) -> Result<Vec<BenchRow>> {
    if method == PrecondKind::None {
        return Err(Error::InvalidArgument("sweeping needs a parameterized method".into()));
    }
    let cfg = BenchConfig {
        examples: vec![example],
        sizes: vec![m],
        methods: vec![method],
        alpha: AlphaChoice::List(alphas.to_vec()),
        alpha_overrides: BTreeMap::new(),
        ..cfg.clone()
    };
    run_bench(&cfg)
}

/// The converged row with the fewest inner iterations (smallest `α` on ties).
pub fn best_row(rows: &[BenchRow]) -> Option<&BenchRow> {
    rows.iter()
        .filter(|r| r.converged)
        .min_by(|a, b| {
            a.total_inner
                .cmp(&b.total_inner)
                .then(a.alpha.unwrap_or(0.0).total_cmp(&b.alpha.unwrap_or(0.0)))
        })
}
