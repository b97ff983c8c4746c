//! Up-looking sparse Cholesky factorization.
//!
//! The symbolic pass builds the elimination tree of the permuted matrix and
//! walks the row reach of each row to count the nonzeros of every column of
//! `L`. The numeric pass then computes `L` one row at a time, reusing the same
//! reach to solve a sparse triangular system per row.

use super::ordering::Ordering;
use crate::error::{check_dim, Error, Result};
use crate::linalg::SparseSym;

const NONE: usize = usize::MAX;

/// Cholesky factor `P S Pᵀ = L Lᵀ`, with `L` stored by columns, diagonal
/// first and row indices increasing within each column.
#[derive(Debug, Clone, PartialEq)]
pub struct CholFactor {
    n: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
    ordering: Ordering,
}

/// Elimination tree and column counts of `L` for a permuted symmetric matrix.
#[derive(Debug, Clone)]
pub struct Symbolic {
    pub parent: Vec<usize>,
    pub col_counts: Vec<usize>,
}

impl Symbolic {
    pub fn nnz(&self) -> usize {
        self.col_counts.iter().sum()
    }
}

/// Elimination tree from the upper triangle (row `k` entries with column `< k`).
fn etree(c: &SparseSym) -> Vec<usize> {
    let n = c.n();
    let mut parent = vec![NONE; n];
    let mut ancestor = vec![NONE; n];
    for k in 0..n {
        for &i in c.row(k).0 {
            let mut i = i;
            while i != NONE && i < k {
                let next = ancestor[i];
                ancestor[i] = k;
                if next == NONE {
                    parent[i] = k;
                }
                i = next;
            }
        }
    }
    parent
}

/// Nonzero pattern of row `k` of `L` (excluding the diagonal), written to
/// `stack[top..]` in topological order. `mark` must be all-false on entry and
/// is restored before returning.
fn ereach(
    c: &SparseSym,
    k: usize,
    parent: &[usize],
    stack: &mut [usize],
    path: &mut Vec<usize>,
    mark: &mut [bool],
) -> usize {
    let n = c.n();
    let mut top = n;
    mark[k] = true;
    for &i in c.row(k).0 {
        if i > k {
            continue;
        }
        let mut i = i;
        path.clear();
        while !mark[i] {
            path.push(i);
            mark[i] = true;
            i = parent[i];
        }
        while let Some(j) = path.pop() {
            top -= 1;
            stack[top] = j;
        }
    }
    for &j in &stack[top..] {
        mark[j] = false;
    }
    mark[k] = false;
    top
}

/// Symbolic analysis of `S` under `ord`.
pub fn symbolic(s: &SparseSym, ord: &Ordering) -> Result<Symbolic> {
    check_dim(s.n(), ord.len())?;
    let c = s.permuted(ord.perm(), ord.inv_perm());
    Ok(symbolic_permuted(&c))
}

fn symbolic_permuted(c: &SparseSym) -> Symbolic {
    let n = c.n();
    let parent = etree(c);
    let mut col_counts = vec![1usize; n];
    let mut stack = vec![0usize; n];
    let mut path = Vec::new();
    let mut mark = vec![false; n];
    for k in 0..n {
        let top = ereach(c, k, &parent, &mut stack, &mut path, &mut mark);
        for &j in &stack[top..] {
            col_counts[j] += 1;
        }
    }
    Symbolic { parent, col_counts }
}

/// Factors `P S Pᵀ = L Lᵀ`.
///
/// A nonpositive pivot is a hard error; the reported index is the original
/// (unpermuted) row.
pub fn cholesky(s: &SparseSym, ord: &Ordering) -> Result<CholFactor> {
    if !s.is_symmetric() {
        return Err(Error::InvalidArgument(
            "Cholesky needs a symmetric matrix".into(),
        ));
    }
    check_dim(s.n(), ord.len())?;
    let n = s.n();
    let c = s.permuted(ord.perm(), ord.inv_perm());
    let sym = symbolic_permuted(&c);

    let mut col_ptr = Vec::with_capacity(n + 1);
    col_ptr.push(0);
    for &cnt in &sym.col_counts {
        col_ptr.push(col_ptr.last().unwrap() + cnt);
    }
    let nnz = col_ptr[n];
    let mut row_idx = vec![0usize; nnz];
    let mut values = vec![0.0; nnz];
    let mut next: Vec<usize> = col_ptr[..n].to_vec();

    let mut x = vec![0.0; n];
    let mut stack = vec![0usize; n];
    let mut path = Vec::new();
    let mut mark = vec![false; n];

    for k in 0..n {
        let top = ereach(&c, k, &sym.parent, &mut stack, &mut path, &mut mark);
        let (cols, vals) = c.row(k);
        for (&i, &v) in cols.iter().zip(vals) {
            if i <= k {
                x[i] = v;
            }
        }
        let mut d = x[k];
        x[k] = 0.0;
        for &i in &stack[top..] {
            let lki = x[i] / values[col_ptr[i]];
            x[i] = 0.0;
            for p in col_ptr[i] + 1..next[i] {
                x[row_idx[p]] -= values[p] * lki;
            }
            d -= lki * lki;
            let p = next[i];
            next[i] += 1;
            row_idx[p] = k;
            values[p] = lki;
        }
        if !(d > 0.0) {
            return Err(Error::NotPositiveDefinite {
                pivot: ord.perm()[k],
            });
        }
        let p = next[k];
        next[k] += 1;
        row_idx[p] = k;
        values[p] = d.sqrt();
    }

    Ok(CholFactor {
        n,
        col_ptr,
        row_idx,
        values,
        ordering: ord.clone(),
    })
}

impl CholFactor {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Stored entries of `L`, diagonal included.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn ordering(&self) -> &Ordering {
        &self.ordering
    }

    /// Entries of column `j` of `L` as `(rows, values)`; the first is the diagonal.
    pub fn column(&self, j: usize) -> (&[usize], &[f64]) {
        let r = self.col_ptr[j]..self.col_ptr[j + 1];
        (&self.row_idx[r.clone()], &self.values[r])
    }

    /// `L` as a dense row-major matrix (in the permuted index space).
    pub fn l_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let (rows, vals) = self.column(j);
            for (&i, &v) in rows.iter().zip(vals) {
                l[i * n + j] = v;
            }
        }
        l
    }

    /// Solves `S z = r`.
    pub fn solve_spd(&self, r: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.n, r.len())?;
        let perm = self.ordering.perm();
        let mut y: Vec<f64> = perm.iter().map(|&p| r[p]).collect();
        self.solve_permuted_in_place(&mut y);
        let mut z = vec![0.0; self.n];
        for (i, &p) in perm.iter().enumerate() {
            z[p] = y[i];
        }
        Ok(z)
    }

    /// Solves `L Lᵀ y = b` in place, in the permuted index space.
    fn solve_permuted_in_place(&self, y: &mut [f64]) {
        for j in 0..self.n {
            let (rows, vals) = self.column(j);
            let yj = y[j] / vals[0];
            y[j] = yj;
            for (&i, &l) in rows[1..].iter().zip(&vals[1..]) {
                y[i] -= l * yj;
            }
        }
        for j in (0..self.n).rev() {
            let (rows, vals) = self.column(j);
            let mut acc = y[j];
            for (&i, &l) in rows[1..].iter().zip(&vals[1..]) {
                acc -= l * y[i];
            }
            y[j] = acc / vals[0];
        }
    }

    /// `max |P S Pᵀ - L Lᵀ|` over all entries, computed sparsely.
    pub fn reconstruction_error(&self, s: &SparseSym) -> Result<f64> {
        check_dim(self.n, s.n())?;
        let n = self.n;
        let c = s.permuted(self.ordering.perm(), self.ordering.inv_perm());
        // rows of L: (col, value) ascending in col
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for j in 0..n {
            let (ri, vals) = self.column(j);
            for (&i, &v) in ri.iter().zip(vals) {
                rows[i].push((j, v));
            }
        }
        let row_dot = |a: &[(usize, f64)], b: &[(usize, f64)]| {
            let (mut p, mut q, mut acc) = (0, 0, 0.0);
            while p < a.len() && q < b.len() {
                match a[p].0.cmp(&b[q].0) {
                    std::cmp::Ordering::Less => p += 1,
                    std::cmp::Ordering::Greater => q += 1,
                    std::cmp::Ordering::Equal => {
                        acc += a[p].1 * b[q].1;
                        p += 1;
                        q += 1;
                    }
                }
            }
            acc
        };
        let mut err: f64 = 0.0;
        // (L Lᵀ)_{ij} for j <= i is nonzero only where row i of L has column
        // j or where C has an entry; L's pattern contains C's lower pattern.
        for i in 0..n {
            for &(j, _) in &rows[i] {
                let llt = row_dot(&rows[i], &rows[j]);
                err = err.max((c.get(i, j) - llt).abs());
            }
        }
        Ok(err)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::ordering::{fill_reducing_order, order_with, OrderingMethod};

    /// Counts nonzeros of L by eliminating a dense boolean graph.
    fn brute_force_fill(s: &SparseSym, ord: &Ordering) -> usize {
        let n = s.n();
        let c = s.permuted(ord.perm(), ord.inv_perm());
        let mut g = vec![vec![false; n]; n];
        for (i, j, _) in c.triplets() {
            g[i][j] = true;
        }
        let mut count = 0;
        for k in 0..n {
            let below: Vec<usize> = (k + 1..n).filter(|&i| g[i][k]).collect();
            count += 1 + below.len();
            for &a in &below {
                for &b in &below {
                    g[a][b] = true;
                }
            }
        }
        count
    }

    fn arrow(n: usize) -> SparseSym {
        let mut t = vec![(0, 0, n as f64 + 1.0)];
        for i in 1..n {
            t.push((i, i, 2.0));
            t.push((0, i, 1.0));
            t.push((i, 0, 1.0));
        }
        SparseSym::from_triplets(n, &t).unwrap()
    }

    #[test]
    fn two_by_two_example() {
        let s = SparseSym::from_dense(2, &[4.0, 2.0, 2.0, 3.0]).unwrap();
        let f = cholesky(&s, &Ordering::identity(2)).unwrap();
        let l = f.l_dense();
        assert_eq!(l[0], 2.0);
        assert_eq!(l[1], 0.0);
        assert_eq!(l[2], 1.0);
        assert!((l[3] - 2f64.sqrt()).abs() < 1e-15);
        assert!(f.reconstruction_error(&s).unwrap() <= 1e-12 * 4.0);
        let z = f.solve_spd(&[6.0, 5.0]).unwrap();
        assert!((z[0] - 1.0).abs() < 1e-15 && (z[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_factor() {
        let s = SparseSym::identity(5);
        let f = cholesky(&s, &fill_reducing_order(&s).unwrap()).unwrap();
        assert_eq!(f.l_dense(), s.to_dense());
        let r = vec![1.0, -2.0, 3.5, 0.0, 1e-3];
        assert_eq!(f.solve_spd(&r).unwrap(), r);
    }

    #[test]
    fn indefinite_reports_pivot() {
        let s = SparseSym::from_dense(2, &[1.0, 2.0, 2.0, 1.0]).unwrap();
        match cholesky(&s, &Ordering::identity(2)) {
            Err(Error::NotPositiveDefinite { pivot }) => assert_eq!(pivot, 1),
            other => panic!("expected not positive definite, got {other:?}"),
        }
    }

    #[test]
    fn symbolic_counts_match_brute_force() {
        let grid = SparseSym::tridiag(6, -1.0, 4.0).kron(&SparseSym::identity(5))
            .linear_combination(1.0, &SparseSym::identity(6).kron(&SparseSym::tridiag(5, -1.0, 0.0)), 1.0)
            .unwrap();
        for m in [OrderingMethod::Natural, OrderingMethod::Rcm, OrderingMethod::MinimumDegree] {
            let ord = order_with(&grid, m).unwrap();
            let sym = symbolic(&grid, &ord).unwrap();
            assert_eq!(sym.nnz(), brute_force_fill(&grid, &ord), "{m:?}");
            let f = cholesky(&grid, &ord).unwrap();
            assert_eq!(f.nnz(), sym.nnz());
        }
    }

    #[test]
    fn arrow_fill_is_reduced() {
        let s = arrow(50);
        let natural = brute_force_fill(&s, &Ordering::identity(50));
        assert_eq!(natural, 50 * 51 / 2);
        for m in [OrderingMethod::Rcm, OrderingMethod::MinimumDegree] {
            let ord = order_with(&s, m).unwrap();
            assert!(brute_force_fill(&s, &ord) < natural, "{m:?}");
        }
    }

    #[test]
    fn deterministic_factor() {
        let s = arrow(30);
        let ord = fill_reducing_order(&s).unwrap();
        let a = cholesky(&s, &ord).unwrap();
        let b = cholesky(&s, &ord).unwrap();
        assert!(a.values.iter().zip(&b.values).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}
