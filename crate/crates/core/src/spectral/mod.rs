//! Dense eigensolvers and the eigenvalue-clustering theory for the
//! BLT-preconditioned matrix `G⁻¹A`, `G = [W 0; αI W]`.
//!
//! For an eigenpair with second block `y ≠ 0` the eigenvalue solves
//! `a(1-λ)² = αλb - c`. For `α` in `(0, α*]` both roots are complex and lie
//! on a circle about 1 whose radius is bounded through the extremal
//! eigenvalues `ν₁ ≤ ν_n` of `W` and `μ₁ ≤ μ_n` of `T`.

mod dense;
mod eigen;
mod theory;

pub use dense::{DenseCholesky, DenseMatrix};
pub use eigen::{
    extremal_eigenvalues, hessenberg, hessenberg_eigenvalues, nonsym_eigenvalues, spectral_radius,
    sym_eigenvalues, DENSE_EIG_LIMIT,
};
pub use theory::{
    alpha_star, alpha_tilde, blt_preconditioned_matrix, disk_radii, eigenpair_stats,
    gsor_iteration_matrix, quadratic_roots, select_alpha, select_alpha_dense, verify_clustering,
    AlphaBounds, DiskRadii, EigenRow, EigenpairStats, SpectrumReport, MAX_DENSE_ORDER,
};
