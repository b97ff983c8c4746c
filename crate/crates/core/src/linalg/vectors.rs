use serde::{Deserialize, Serialize};

use super::{Cx, SparseSym};
use crate::error::{check_dim, Error, Result};

/// A real vector of length `2n` split into halves `(x; y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockVec {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl BlockVec {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        check_dim(x.len(), y.len())?;
        Ok(Self { x, y })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            x: vec![0.0; n],
            y: vec![0.0; n],
        }
    }

    /// Length of one half.
    pub fn half_len(&self) -> usize {
        self.x.len()
    }

    /// Concatenation `[x; y]`.
    pub fn to_stacked(&self) -> Vec<f64> {
        let mut v = self.x.clone();
        v.extend_from_slice(&self.y);
        v
    }

    pub fn from_stacked(v: &[f64]) -> Result<Self> {
        if v.len() % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "stacked vector has odd length {}",
                v.len()
            )));
        }
        let n = v.len() / 2;
        Ok(Self {
            x: v[..n].to_vec(),
            y: v[n..].to_vec(),
        })
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(&self.y).all(|v| v.is_finite())
    }
}

impl From<ComplexVec> for BlockVec {
    fn from(u: ComplexVec) -> Self {
        Self { x: u.re, y: u.im }
    }
}

/// A complex vector stored as separate real and imaginary arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexVec {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl ComplexVec {
    pub fn new(re: Vec<f64>, im: Vec<f64>) -> Result<Self> {
        check_dim(re.len(), im.len())?;
        Ok(Self { re, im })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            re: vec![0.0; n],
            im: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.re.len()
    }

    pub fn is_empty(&self) -> bool {
        self.re.is_empty()
    }

    pub fn get(&self, i: usize) -> Cx {
        Cx::new(self.re[i], self.im[i])
    }

    pub fn from_cx(v: &[Cx]) -> Self {
        Self {
            re: v.iter().map(|z| z.re).collect(),
            im: v.iter().map(|z| z.im).collect(),
        }
    }

    pub fn to_cx(&self) -> Vec<Cx> {
        self.re
            .iter()
            .zip(&self.im)
            .map(|(&re, &im)| Cx::new(re, im))
            .collect()
    }

    /// Multiplies every entry by the complex scalar `s`.
    pub fn scaled(&self, s: Cx) -> Self {
        let (re, im) = self
            .re
            .iter()
            .zip(&self.im)
            .map(|(&a, &b)| (a * s.re - b * s.im, a * s.im + b * s.re))
            .unzip();
        Self { re, im }
    }

    pub fn is_finite(&self) -> bool {
        self.re.iter().chain(&self.im).all(|v| v.is_finite())
    }
}

impl From<BlockVec> for ComplexVec {
    fn from(v: BlockVec) -> Self {
        Self { re: v.x, im: v.y }
    }
}

/// `r = a - b` componentwise.
pub(crate) fn sub_into(a: &[f64], b: &[f64], r: &mut [f64]) {
    for ((ri, ai), bi) in r.iter_mut().zip(a).zip(b) {
        *ri = ai - bi;
    }
}

/// `r = a + b` componentwise.
pub(crate) fn add_into(a: &[f64], b: &[f64], r: &mut [f64]) {
    for ((ri, ai), bi) in r.iter_mut().zip(a).zip(b) {
        *ri = ai + bi;
    }
}

fn check_pair(w: &SparseSym, t: &SparseSym, n: usize) -> Result<()> {
    check_dim(w.n(), t.n())?;
    check_dim(w.n(), n)
}

/// The real block operator `[W -T; T W]` applied to `(x; y)`.
pub fn apply_realified(w: &SparseSym, t: &SparseSym, v: &BlockVec) -> Result<BlockVec> {
    check_pair(w, t, v.x.len())?;
    check_dim(v.x.len(), v.y.len())?;
    let n = w.n();
    let wx = w.spmv(&v.x)?;
    let wy = w.spmv(&v.y)?;
    let tx = t.spmv(&v.x)?;
    let ty = t.spmv(&v.y)?;
    let mut out = BlockVec::zeros(n);
    sub_into(&wx, &ty, &mut out.x);
    add_into(&tx, &wy, &mut out.y);
    Ok(out)
}

/// `(W + iT) u` with explicit real/imaginary arithmetic.
pub fn apply_complex(w: &SparseSym, t: &SparseSym, u: &ComplexVec) -> Result<ComplexVec> {
    check_pair(w, t, u.re.len())?;
    check_dim(u.re.len(), u.im.len())?;
    let n = w.n();
    let w_re = w.spmv(&u.re)?;
    let w_im = w.spmv(&u.im)?;
    let t_re = t.spmv(&u.re)?;
    let t_im = t.spmv(&u.im)?;
    let mut out = ComplexVec::zeros(n);
    sub_into(&w_re, &t_im, &mut out.re);
    add_into(&t_re, &w_im, &mut out.im);
    Ok(out)
}
