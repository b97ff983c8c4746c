//! Sparse solvers for complex symmetric systems `(W + iT) u = b` with `W`
//! symmetric positive definite and `T` symmetric positive semidefinite.
//!
//! The crate contains:
//!
//! * [`linalg`]: CSR storage, the complex operator and its real 2×2 block form,
//!   Matrix Market I/O.
//! * [`factor`]: fill-reducing orderings, sparse Cholesky, conjugate gradients.
//! * [`problems`]: the four finite-difference benchmark problems.
//! * [`precond`]: block lower triangular (BLT), GSOR and MHSS preconditioners
//!   and the GSOR/MHSS stationary iterations.
//! * [`krylov`]: restarted, right-preconditioned GMRES over real or complex vectors.
//! * [`spectral`]: dense eigensolvers plus eigenvalue-clustering diagnostics
//!   and the parameter selection rule for the BLT preconditioner.
//! * [`bench`]: the benchmark driver used by the `cxblt` command-line tool.

pub mod bench;
pub mod error;
pub mod factor;
pub mod krylov;
pub mod linalg;
pub mod precond;
pub mod problems;
pub mod spectral;

pub use error::{Error, Result};
