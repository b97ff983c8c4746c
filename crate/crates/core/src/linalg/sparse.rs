use crate::error::{check_dim, Error, Result};

/// Square sparse matrix in compressed sparse row form.
///
/// Both triangles of a symmetric matrix are stored. Within a row the column
/// indices are strictly increasing, so there are no duplicate entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSym {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
    symmetric: bool,
}

impl SparseSym {
    /// Builds a matrix from raw CSR arrays, validating the structure.
    ///
    /// When `symmetric` is set, every stored `(i, j, v)` must have a
    /// bit-identical mirror `(j, i, v)`.
    pub fn from_csr(
        n: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
        symmetric: bool,
    ) -> Result<Self> {
        let s = Self {
            n,
            row_ptr,
            col_idx,
            values,
            symmetric,
        };
        s.validate()?;
        Ok(s)
    }

    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are summed
    /// in input order. Explicit zeros are kept.
    ///
    /// The symmetric flag is set if the assembled matrix turns out to be
    /// exactly symmetric.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut counts = vec![0usize; n + 1];
        for &(i, j, _) in triplets {
            if i >= n || j >= n {
                return Err(Error::InvalidArgument(format!(
                    "entry ({i}, {j}) out of bounds for dimension {n}"
                )));
            }
            counts[i + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![0.0; triplets.len()];
        for &(i, j, v) in triplets {
            let p = next[i];
            cols[p] = j;
            vals[p] = v;
            next[i] += 1;
        }

        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_ptr.push(0);
        let mut row: Vec<(usize, f64)> = Vec::new();
        for i in 0..n {
            row.clear();
            row.extend((counts[i]..counts[i + 1]).map(|p| (cols[p], vals[p])));
            // stable sort keeps the input order of duplicates
            row.sort_by_key(|&(j, _)| j);
            let mut k = 0;
            while k < row.len() {
                let j = row[k].0;
                let mut v = row[k].1;
                k += 1;
                while k < row.len() && row[k].0 == j {
                    v += row[k].1;
                    k += 1;
                }
                col_idx.push(j);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }

        let mut s = Self {
            n,
            row_ptr,
            col_idx,
            values,
            symmetric: false,
        };
        s.symmetric = s.is_structurally_symmetric();
        Ok(s)
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let n = d.len();
        Self {
            n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: d.to_vec(),
            symmetric: true,
        }
    }

    /// Builds a matrix from a dense row-major slice, dropping exact zeros.
    pub fn from_dense(n: usize, a: &[f64]) -> Result<Self> {
        check_dim(n * n, a.len())?;
        let mut triplets = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = a[i * n + j];
                if v != 0.0 {
                    triplets.push((i, j, v));
                }
            }
        }
        Self::from_triplets(n, &triplets)
    }

    /// Symmetric tridiagonal Toeplitz matrix `tridiag(off, diag, off)`.
    pub fn tridiag(n: usize, off: f64, diag: f64) -> Self {
        let mut t = Vec::with_capacity(3 * n);
        for i in 0..n {
            if i > 0 {
                t.push((i, i - 1, off));
            }
            t.push((i, i, diag));
            if i + 1 < n {
                t.push((i, i + 1, off));
            }
        }
        Self::from_triplets(n, &t).expect("indices in range")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    /// Stored value at `(i, j)`, zero when the entry is not in the pattern.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(p) => vals[p],
            Err(_) => 0.0,
        }
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Largest absolute stored value.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest number of stored entries in any row.
    pub fn max_row_nnz(&self) -> usize {
        self.row_ptr.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0)
    }

    /// Half bandwidth `max |i - j|` over stored entries.
    pub fn bandwidth(&self) -> usize {
        (0..self.n)
            .flat_map(|i| self.row(i).0.iter().map(move |&j| i.abs_diff(j)))
            .max()
            .unwrap_or(0)
    }

    /// `y = S x`, summing each row in ascending column order.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.n];
        self.spmv_into(x, &mut y)?;
        Ok(y)
    }

    pub fn spmv_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        check_dim(self.n, x.len())?;
        check_dim(self.n, y.len())?;
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[p] * x[self.col_idx[p]];
            }
            *yi = acc;
        }
        Ok(())
    }

    /// `a * self + b * other`, on the union pattern.
    pub fn linear_combination(&self, a: f64, other: &SparseSym, b: f64) -> Result<SparseSym> {
        check_dim(self.n, other.n)?;
        let mut row_ptr = Vec::with_capacity(self.n + 1);
        let mut col_idx = Vec::with_capacity(self.nnz().max(other.nnz()));
        let mut values = Vec::with_capacity(col_idx.capacity());
        row_ptr.push(0);
        for i in 0..self.n {
            let (c1, v1) = self.row(i);
            let (c2, v2) = other.row(i);
            let (mut p, mut q) = (0, 0);
            while p < c1.len() || q < c2.len() {
                let j1 = c1.get(p).copied().unwrap_or(usize::MAX);
                let j2 = c2.get(q).copied().unwrap_or(usize::MAX);
                if j1 < j2 {
                    col_idx.push(j1);
                    values.push(a * v1[p]);
                    p += 1;
                } else if j2 < j1 {
                    col_idx.push(j2);
                    values.push(b * v2[q]);
                    q += 1;
                } else {
                    col_idx.push(j1);
                    values.push(a * v1[p] + b * v2[q]);
                    p += 1;
                    q += 1;
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(SparseSym {
            n: self.n,
            row_ptr,
            col_idx,
            values,
            symmetric: self.symmetric && other.symmetric,
        })
    }

    /// `self + shift * I`.
    pub fn add_identity(&self, shift: f64) -> SparseSym {
        self.linear_combination(1.0, &SparseSym::identity(self.n), shift)
            .expect("same dimension")
    }

    pub fn scaled(&self, s: f64) -> SparseSym {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &SparseSym) -> SparseSym {
        let n = self.n * other.n;
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::with_capacity(self.nnz() * other.nnz());
        let mut values = Vec::with_capacity(self.nnz() * other.nnz());
        row_ptr.push(0);
        for i in 0..self.n {
            let (ca, va) = self.row(i);
            for k in 0..other.n {
                let (cb, vb) = other.row(k);
                for (&ja, &a) in ca.iter().zip(va) {
                    for (&jb, &b) in cb.iter().zip(vb) {
                        col_idx.push(ja * other.n + jb);
                        values.push(a * b);
                    }
                }
                row_ptr.push(col_idx.len());
            }
        }
        SparseSym {
            n,
            row_ptr,
            col_idx,
            values,
            symmetric: self.symmetric && other.symmetric,
        }
    }

    /// Symmetric permutation `P S Pᵀ`, where row `i` of the result is row
    /// `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize], inv_perm: &[usize]) -> SparseSym {
        let mut row_ptr = Vec::with_capacity(self.n + 1);
        let mut col_idx = Vec::with_capacity(self.nnz());
        let mut values = Vec::with_capacity(self.nnz());
        row_ptr.push(0);
        let mut row: Vec<(usize, f64)> = Vec::new();
        for &old in perm {
            let (cols, vals) = self.row(old);
            row.clear();
            row.extend(cols.iter().zip(vals).map(|(&j, &v)| (inv_perm[j], v)));
            row.sort_unstable_by_key(|&(j, _)| j);
            for &(j, v) in &row {
                col_idx.push(j);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        SparseSym {
            n: self.n,
            row_ptr,
            col_idx,
            values,
            symmetric: self.symmetric,
        }
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut a = vec![0.0; self.n * self.n];
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                a[i * self.n + j] = v;
            }
        }
        a
    }

    /// `(row, col, value)` triplets in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    fn is_structurally_symmetric(&self) -> bool {
        self.triplets()
            .all(|(i, j, v)| i == j || self.get(j, i).to_bits() == v.to_bits() && self.has(j, i))
    }

    fn has(&self, i: usize, j: usize) -> bool {
        self.row(i).0.binary_search(&j).is_ok()
    }

    /// Checks the CSR invariants and, if flagged, exact symmetry.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.row_ptr.len() != self.n + 1 {
            return bad(format!(
                "row_ptr has length {}, expected {}",
                self.row_ptr.len(),
                self.n + 1
            ));
        }
        if self.row_ptr[0] != 0 || *self.row_ptr.last().unwrap() != self.col_idx.len() {
            return bad("row_ptr does not span col_idx".into());
        }
        if self.col_idx.len() != self.values.len() {
            return bad("col_idx and values differ in length".into());
        }
        for i in 0..self.n {
            if self.row_ptr[i] > self.row_ptr[i + 1] {
                return bad(format!("row_ptr decreases at row {i}"));
            }
            let cols = &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]];
            if cols.iter().any(|&j| j >= self.n) {
                return bad(format!("column index out of range in row {i}"));
            }
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return bad(format!("columns not strictly increasing in row {i}"));
            }
        }
        if self.symmetric && !self.is_structurally_symmetric() {
            return bad("matrix flagged symmetric is not exactly symmetric".into());
        }
        Ok(())
    }
}
