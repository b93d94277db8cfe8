//! Dense row-major real matrices.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A dense `rows × cols` real matrix stored row-major.
///
/// This is the unit the codec moves around: source blocks `X_i`, encoded
/// shares and worker results are all `Block`s. Scalars are `1 × 1` blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Block {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                expected: (rows, cols),
                found: (data.len(), 1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn scalar(value: f64) -> Self {
        Self {
            rows: 1,
            cols: 1,
            data: vec![value],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { 1.0 } else { 0.0 })
    }

    /// A `len × 1` column.
    pub fn column(values: &[f64]) -> Self {
        Self {
            rows: values.len(),
            cols: 1,
            data: values.to_vec(),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// The value of a `1 × 1` block.
    pub fn to_scalar(&self) -> Option<f64> {
        (self.shape() == (1, 1)).then(|| self.data[0])
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    pub fn matmul(&self, rhs: &Block) -> Result<Block> {
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch {
                expected: (self.cols, rhs.cols),
                found: rhs.shape(),
            });
        }
        let mut out = Block::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `XᵀX`, accumulated row by row.
    pub fn gram(&self) -> Block {
        let t = self.cols;
        let mut out = Block::zeros(t, t);
        for r in 0..self.rows {
            let row = self.row(r);
            for (i, &a) in row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let out_row = &mut out.data[i * t..(i + 1) * t];
                for (o, &b) in out_row.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `X v`.
    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::ShapeMismatch {
                expected: (self.cols, 1),
                found: (v.len(), 1),
            });
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `Xᵀ v`.
    pub fn tmul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.rows {
            return Err(Error::ShapeMismatch {
                expected: (self.rows, 1),
                found: (v.len(), 1),
            });
        }
        let mut out = vec![0.0; self.cols];
        for (r, &vr) in v.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(r)) {
                *o += a * vr;
            }
        }
        Ok(out)
    }

    /// `self += alpha * other`.
    pub fn add_scaled(&mut self, alpha: f64, other: &Block) -> Result<()> {
        self.check_same_shape(other)?;
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
        Ok(())
    }

    pub fn scale(&mut self, alpha: f64) {
        for a in &mut self.data {
            *a *= alpha;
        }
    }

    pub fn sub(&self, other: &Block) -> Result<Block> {
        let mut out = self.clone();
        out.add_scaled(-1.0, other)?;
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|v| v * v).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn check_same_shape(&self, other: &Block) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                found: other.shape(),
            });
        }
        Ok(())
    }

    /// Stacks blocks vertically; all must share a column count.
    pub fn vstack(blocks: &[Block]) -> Result<Block> {
        let first = blocks.first().ok_or(Error::Empty("vstack"))?;
        let cols = first.cols;
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            if b.cols != cols {
                return Err(Error::ShapeMismatch {
                    expected: (b.rows, cols),
                    found: b.shape(),
                });
            }
            data.extend_from_slice(&b.data);
            rows += b.rows;
        }
        Ok(Block { rows, cols, data })
    }

    /// Rows `start..end` as a new block.
    pub fn slice_rows(&self, start: usize, end: usize) -> Block {
        Block {
            rows: end - start,
            cols: self.cols,
            data: self.data[start * self.cols..end * self.cols].to_vec(),
        }
    }
}

/// Linear combination `Σ c_k B_k` of equally shaped blocks.
pub fn combine<'a, I>(terms: I, shape: (usize, usize)) -> Block
where
    I: IntoIterator<Item = (f64, &'a Block)>,
{
    let mut out = Block::zeros(shape.0, shape.1);
    for (c, b) in terms {
        if c == 0.0 {
            continue;
        }
        for (o, &v) in out.data.iter_mut().zip(&b.data) {
            *o += c * v;
        }
    }
    out
}

/// `‖a − b‖_F / ‖b‖_F` over a sequence of block pairs, treated as one stacked
/// matrix. Falls back to the absolute error when the reference is zero.
pub fn relative_frobenius_error(estimate: &[Block], truth: &[Block]) -> Result<f64> {
    if estimate.len() != truth.len() {
        return Err(Error::ShapeMismatch {
            expected: (truth.len(), 1),
            found: (estimate.len(), 1),
        });
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (e, t) in estimate.iter().zip(truth) {
        e.check_same_shape(t)?;
        for (a, b) in e.data.iter().zip(&t.data) {
            num += (a - b) * (a - b);
            den += b * b;
        }
    }
    let num = libm::sqrt(num);
    let den = libm::sqrt(den);
    Ok(if den > 0.0 { num / den } else { num })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_matches_transpose_product() {
        let x = Block::from_fn(3, 2, |r, c| (r * 2 + c) as f64 - 1.5);
        let direct = x.transpose().matmul(&x).unwrap();
        assert_eq!(x.gram(), direct);
    }

    #[test]
    fn matmul_shape_mismatch() {
        let a = Block::zeros(2, 3);
        let b = Block::zeros(2, 3);
        assert!(matches!(a.matmul(&b), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn tmul_vec_is_transpose_mul() {
        let x = Block::from_fn(4, 3, |r, c| libm::sin((r * 3 + c) as f64));
        let v = [0.5, -1.0, 2.0, 0.25];
        let a = x.tmul_vec(&v).unwrap();
        let b = x.transpose().mul_vec(&v).unwrap();
        for (p, q) in a.iter().zip(&b) {
            assert!((p - q).abs() < 1e-15);
        }
    }

    #[test]
    fn vstack_and_slice_round_trip() {
        let x = Block::from_fn(5, 2, |r, c| (r + 10 * c) as f64);
        let top = x.slice_rows(0, 2);
        let bottom = x.slice_rows(2, 5);
        assert_eq!(Block::vstack(&[top, bottom]).unwrap(), x);
    }
}
