//! Tabulated parameters and GMRES(5) iteration counts for the four
//! benchmark problems at `m = 32, 64, …, 1024`.

use crate::precond::PrecondKind;
use crate::problems::Example;

/// Grid sizes of the reference table columns.
pub const REFERENCE_SIZES: [usize; 6] = [32, 64, 128, 256, 512, 1024];

/// A reference iteration count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceIt {
    Converged(usize),
    /// No convergence within 500 iterations.
    Failed,
    /// No entry.
    Missing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceCell {
    pub alpha: Option<f64>,
    pub it: ReferenceIt,
}

use ReferenceIt::{Converged as C, Failed as F, Missing as X};

struct Row {
    alpha: [Option<f64>; 6],
    it: [ReferenceIt; 6],
}

const NO_ALPHA: [Option<f64>; 6] = [None; 6];

const fn some(v: [f64; 6]) -> [Option<f64>; 6] {
    [Some(v[0]), Some(v[1]), Some(v[2]), Some(v[3]), Some(v[4]), Some(v[5])]
}

// order within each example: none, mhss, gsor, blt
const TABLE: [[Row; 4]; 4] = [
    [
        Row { alpha: NO_ALPHA, it: [C(349), F, F, F, F, F] },
        Row {
            alpha: [Some(10.0), Some(9.1), Some(4.7), Some(5.1), Some(10.5), None],
            it: [C(54), C(26), C(71), C(114), C(179), X],
        },
        Row {
            alpha: some([0.037, 0.457, 0.432, 0.418, 0.412, 0.411]),
            it: [C(23), C(25), C(26), C(26), C(27), C(27)],
        },
        Row {
            alpha: some([1.4, 1.4, 1.5, 1.5, 1.5, 1.5]),
            it: [C(6), C(7), C(7), C(7), C(7), C(7)],
        },
    ],
    [
        Row { alpha: NO_ALPHA, it: [F, F, F, F, F, F] },
        Row {
            alpha: [Some(81.0), Some(110.0), None, None, None, None],
            it: [C(73), C(243), F, F, F, F],
        },
        Row {
            alpha: some([0.099; 6]),
            it: [C(65), C(70), C(71), C(67), C(63), C(61)],
        },
        Row {
            alpha: some([0.4; 6]),
            it: [C(8); 6],
        },
    ],
    [
        Row { alpha: NO_ALPHA, it: [C(235), F, F, F, F, F] },
        Row {
            alpha: [Some(52.0), Some(18.0), None, None, None, None],
            it: [C(120), C(272), F, F, F, F],
        },
        Row {
            alpha: some([0.776, 0.566, 0.354, 0.199, 0.106, 0.055]),
            it: [C(7), C(8), C(11), C(22), C(52), C(117)],
        },
        Row {
            alpha: some([0.4, 0.7, 1.0, 1.4, 1.7, 2.0]),
            it: [C(4), C(5), C(7), C(9), C(12), C(18)],
        },
    ],
    [
        Row { alpha: NO_ALPHA, it: [C(138), F, F, F, F, F] },
        Row {
            alpha: [Some(130.0), Some(10.0), Some(13.0), Some(8.0), None, None],
            it: [C(12), C(28), C(84), C(283), F, F],
        },
        Row {
            alpha: some([0.038, 0.038, 0.038, 0.038, 0.038, 0.037]),
            it: [C(69), C(92), C(75), C(66), C(67), C(152)],
        },
        Row {
            alpha: some([2.1, 2.2, 2.3, 2.4, 2.5, 2.3]),
            it: [C(21), C(21), C(19), C(21), C(20), C(20)],
        },
    ],
];

/// The reference cell for `(example, method, m)`, if `m` is a table column.
pub fn reference_cell(example: Example, method: PrecondKind, m: usize) -> Option<ReferenceCell> {
    let col = REFERENCE_SIZES.iter().position(|&s| s == m)?;
    let e = match example {
        Example::Ex1 => 0,
        Example::Ex2 => 1,
        Example::Ex3 => 2,
        Example::Ex4 => 3,
    };
    let k = match method {
        PrecondKind::None => 0,
        PrecondKind::Mhss => 1,
        PrecondKind::Gsor => 2,
        PrecondKind::Blt => 3,
    };
    let row = &TABLE[e][k];
    Some(ReferenceCell {
        alpha: row.alpha[col],
        it: row.it[col],
    })
}

/// Tabulated parameter, if any.
pub fn table_alpha(example: Example, method: PrecondKind, m: usize) -> Option<f64> {
    reference_cell(example, method, m).and_then(|c| c.alpha)
}
