//! Fill-reducing orderings, sparse Cholesky factorization and triangular
//! solves, and conjugate gradients for inexact SPD solves.

mod cg;
mod cholesky;
mod ordering;

pub use cg::{cg_solve, CgOutcome};
pub use cholesky::{cholesky, symbolic, CholFactor, Symbolic};
pub use ordering::{fill_reducing_order, order_with, Ordering, OrderingMethod};

use crate::error::Result;
use crate::linalg::SparseSym;

/// Orders with `method` and factors.
pub fn factorize(s: &SparseSym, method: OrderingMethod) -> Result<CholFactor> {
    let ord = order_with(s, method)?;
    cholesky(s, &ord)
}
