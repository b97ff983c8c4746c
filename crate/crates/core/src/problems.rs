//! The four finite-difference benchmark problems on the unit square.
//!
//! All grids are `m × m` interior points with `h = 1/(m+1)` and lexicographic
//! numbering (x index fastest), so `I ⊗ V` acts along x and `V ⊗ I` along y.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::{factorize, OrderingMethod};
use crate::linalg::{apply_complex, ComplexVec, Cx, SparseSym};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Example {
    /// Time-discretized parabolic problem, `W = K + (3-√3)/τ I`, `T = K + (3+√3)/τ I`.
    Ex1,
    /// Damped structural dynamics, `W = K - ω² I`, `T = ω C_V + μ K`.
    Ex2,
    /// Dirichlet Laplacian in `T`, periodic-type Laplacian in `W`, no scaling.
    Ex3,
    /// Complex Helmholtz, `W = K + σ₁ I`, `T = σ₂ I`.
    Ex4,
}

impl Example {
    pub const ALL: [Example; 4] = [Example::Ex1, Example::Ex2, Example::Ex3, Example::Ex4];

    /// Parameter names accepted by [`ProblemSpec::with_param`].
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Example::Ex1 => &["tau"],
            Example::Ex2 => &["omega", "mu"],
            Example::Ex3 => &[],
            Example::Ex4 => &["sigma1", "sigma2"],
        }
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Example::Ex1 => "ex1",
            Example::Ex2 => "ex2",
            Example::Ex3 => "ex3",
            Example::Ex4 => "ex4",
        };
        f.write_str(s)
    }
}

impl FromStr for Example {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().trim_start_matches("ex") {
            "1" => Ok(Example::Ex1),
            "2" => Ok(Example::Ex2),
            "3" => Ok(Example::Ex3),
            "4" => Ok(Example::Ex4),
            _ => Err(Error::InvalidArgument(format!("unknown example '{s}'"))),
        }
    }
}

/// Which problem to build, its grid size, and parameter overrides.
///
/// Missing parameters take their defaults: `tau = h`, `omega = π`, `mu = 8`,
/// `sigma1 = -10`, `sigma2 = 500`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub example: Example,
    pub m: usize,
    pub params: BTreeMap<String, f64>,
}

impl ProblemSpec {
    pub fn new(example: Example, m: usize) -> Self {
        Self {
            example,
            m,
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn h(&self) -> f64 {
        1.0 / (self.m as f64 + 1.0)
    }

    /// Value of a parameter, falling back to its default.
    pub fn param(&self, name: &str) -> Option<f64> {
        if let Some(&v) = self.params.get(name) {
            return Some(v);
        }
        match (self.example, name) {
            (Example::Ex1, "tau") => Some(self.h()),
            (Example::Ex2, "omega") => Some(std::f64::consts::PI),
            (Example::Ex2, "mu") => Some(8.0),
            (Example::Ex4, "sigma1") => Some(-10.0),
            (Example::Ex4, "sigma2") => Some(500.0),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return Err(Error::InvalidArgument("grid size m must be at least 1".into()));
        }
        for (name, value) in &self.params {
            if !self.example.param_names().contains(&name.as_str()) {
                return Err(Error::InvalidArgument(format!(
                    "{} has no parameter '{name}'",
                    self.example
                )));
            }
            if !value.is_finite() {
                return Err(Error::InvalidArgument(format!("parameter '{name}' is not finite")));
            }
        }
        if self.example == Example::Ex1 && !(self.param("tau").unwrap() > 0.0) {
            return Err(Error::InvalidArgument("tau must be positive".into()));
        }
        Ok(())
    }
}

/// An assembled system `(W + iT) u = b` of dimension `n = m²`.
#[derive(Debug, Clone)]
pub struct AssembledProblem {
    pub spec: ProblemSpec,
    pub w: SparseSym,
    pub t: SparseSym,
    pub b: ComplexVec,
    pub n: usize,
    /// Whether matrices and right-hand side were multiplied by `h²`.
    pub normalized: bool,
}

impl AssembledProblem {
    /// Builds a problem directly from matrices and a right-hand side.
    pub fn from_parts(w: SparseSym, t: SparseSym, b: ComplexVec) -> Result<Self> {
        crate::error::check_dim(w.n(), t.n())?;
        crate::error::check_dim(w.n(), b.len())?;
        let n = w.n();
        let m = (n as f64).sqrt().round() as usize;
        Ok(Self {
            spec: ProblemSpec::new(Example::Ex1, m.max(1)),
            w,
            t,
            b,
            n,
            normalized: false,
        })
    }
}

/// `h⁻² tridiag(-1, 2, -1)` of size `m` with `h = 1/(m+1)`.
pub fn scaled_second_difference(m: usize) -> SparseSym {
    let h = 1.0 / (m as f64 + 1.0);
    SparseSym::tridiag(m, -1.0, 2.0).scaled(1.0 / (h * h))
}

/// Kronecker sum `I ⊗ V + V ⊗ I`.
pub fn kron_sum(v: &SparseSym) -> SparseSym {
    let id = SparseSym::identity(v.n());
    id.kron(v)
        .linear_combination(1.0, &v.kron(&id), 1.0)
        .expect("same dimension")
}

/// Five-point negative Laplacian `K = I ⊗ V_m + V_m ⊗ I` on the `m × m` grid.
pub fn laplacian_k(m: usize) -> SparseSym {
    kron_sum(&scaled_second_difference(m))
}

/// `b = (1+i) A 1`.
fn rhs_from_ones(w: &SparseSym, t: &SparseSym) -> Result<ComplexVec> {
    let n = w.n();
    let ones = ComplexVec::new(vec![1.0; n], vec![0.0; n])?;
    Ok(apply_complex(w, t, &ones)?.scaled(Cx::new(1.0, 1.0)))
}

fn assemble(spec: &ProblemSpec) -> Result<(SparseSym, SparseSym, ComplexVec, bool)> {
    let m = spec.m;
    let n = m * m;
    let p = |name: &str| spec.param(name).expect("parameter has a default");
    Ok(match spec.example {
        Example::Ex1 => {
            let tau = p("tau");
            let k = laplacian_k(m);
            let s3 = 3f64.sqrt();
            let w = k.add_identity((3.0 - s3) / tau);
            let t = k.add_identity((3.0 + s3) / tau);
            let (re, im): (Vec<f64>, Vec<f64>) = (1..=n)
                .map(|j| {
                    let j = j as f64;
                    let v = j / (tau * (j + 1.0) * (j + 1.0));
                    (v, -v)
                })
                .unzip();
            (w, t, ComplexVec::new(re, im)?, true)
        }
        Example::Ex2 => {
            let (omega, mu) = (p("omega"), p("mu"));
            let k = laplacian_k(m);
            let w = k.add_identity(-omega * omega);
            let t = k.scaled(mu).add_identity(10.0 * omega);
            let b = rhs_from_ones(&w, &t)?;
            (w, t, b, true)
        }
        Example::Ex3 => {
            let v = SparseSym::tridiag(m, -1.0, 2.0);
            let corners = SparseSym::from_triplets(m, &[(0, m - 1, 1.0), (m - 1, 0, 1.0)])?;
            let vc = v.linear_combination(1.0, &corners, -1.0)?;
            let t = kron_sum(&v);
            let w = kron_sum(&vc).linear_combination(
                10.0,
                &corners.kron(&SparseSym::identity(m)),
                9.0,
            )?;
            let b = rhs_from_ones(&w, &t)?;
            (w, t, b, false)
        }
        Example::Ex4 => {
            let (s1, s2) = (p("sigma1"), p("sigma2"));
            let w = laplacian_k(m).add_identity(s1);
            let t = SparseSym::diagonal(&vec![s2; n]);
            let b = rhs_from_ones(&w, &t)?;
            (w, t, b, true)
        }
    })
}

/// Assembles a benchmark problem and checks that `W` is positive definite.
///
/// The right-hand side is formed from the unscaled operator; when the example
/// is normalized, `W`, `T` and `b` are then all multiplied by `h²`.
pub fn build_problem(spec: &ProblemSpec) -> Result<AssembledProblem> {
    let problem = build_problem_unchecked(spec)?;
    factorize(&problem.w, OrderingMethod::default())?;
    Ok(problem)
}

/// [`build_problem`] without the Cholesky self-check on `W`.
pub fn build_problem_unchecked(spec: &ProblemSpec) -> Result<AssembledProblem> {
    spec.validate()?;
    let (mut w, mut t, mut b, normalized) = assemble(spec)?;
    if normalized {
        let h2 = spec.h() * spec.h();
        w = w.scaled(h2);
        t = t.scaled(h2);
        b = b.scaled(Cx::new(h2, 0.0));
    }
    Ok(AssembledProblem {
        spec: spec.clone(),
        n: w.n(),
        w,
        t,
        b,
        normalized,
    })
}
