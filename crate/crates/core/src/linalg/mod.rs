//! Matrix and vector storage and the exact operator actions of the complex
//! system and of its real 2×2 block form.

mod complex;
pub mod mtx;
mod sparse;
mod vectors;

pub use complex::{Cx, Scalar};
pub use mtx::{load_matrix_market, read_matrix_market, save_matrix_market, write_matrix_market};
pub use sparse::SparseSym;
pub use vectors::{apply_complex, apply_realified, BlockVec, ComplexVec};

/// Euclidean inner product summed in ascending index order.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
