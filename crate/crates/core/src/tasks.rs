//! Worker-side computations and row partitioning of the input matrix.

use alloc::vec::Vec;

use crate::block::Block;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum TaskKind {
    /// `XᵀX`.
    Gram,
    /// `XᵀX w` for an auxiliary vector `w`.
    MatVec,
    /// `Σ_j c_j X^j` on square blocks, coefficients in ascending order.
    Poly(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaskSpec {
    pub kind: TaskKind,
    /// Total polynomial degree of the task in the block entries.
    pub degree: usize,
}

impl TaskSpec {
    pub fn gram() -> Self {
        Self {
            kind: TaskKind::Gram,
            degree: 2,
        }
    }

    pub fn matvec() -> Self {
        Self {
            kind: TaskKind::MatVec,
            degree: 2,
        }
    }

    /// Degree is the index of the last nonzero coefficient.
    pub fn poly(coeffs: Vec<f64>) -> Result<Self> {
        let degree = coeffs
            .iter()
            .rposition(|&c| c != 0.0)
            .ok_or(Error::InvalidParameter("polynomial task is identically zero".into()))?;
        let spec = Self {
            kind: TaskKind::Poly(coeffs),
            degree,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree == 0 {
            return Err(Error::InvalidParameter("task degree must be at least 1".into()));
        }
        if let TaskKind::Poly(c) = &self.kind {
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("polynomial coefficient"));
            }
        }
        Ok(())
    }
}

pub fn apply_task(spec: &TaskSpec, block: &Block, aux: Option<&[f64]>) -> Result<Block> {
    match (&spec.kind, aux) {
        (TaskKind::Gram, None) => Ok(block.gram()),
        (TaskKind::MatVec, Some(w)) => {
            let xw = block.mul_vec(w)?;
            Ok(Block::column(&block.tmul_vec(&xw)?))
        }
        (TaskKind::Poly(coeffs), None) => {
            if block.rows() != block.cols() {
                return Err(Error::ShapeMismatch {
                    expected: (block.rows(), block.rows()),
                    found: block.shape(),
                });
            }
            horner(coeffs, block)
        }
        (TaskKind::MatVec, None) => Err(Error::MissingAux),
        (_, Some(_)) => Err(Error::UnexpectedAux),
    }
}

fn horner(coeffs: &[f64], x: &Block) -> Result<Block> {
    let n = x.rows();
    let ident = Block::identity(n);
    let mut acc = Block::zeros(n, n);
    for &c in coeffs.iter().rev() {
        acc = acc.matmul(x)?;
        acc.add_scaled(c, &ident)?;
    }
    Ok(acc)
}

/// Row blocks of a matrix, each `⌈s / parts⌉` rows, the last zero-padded.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    pub blocks: Vec<Block>,
    pub original_rows: usize,
    /// Set when `parts` exceeds the row count, so some blocks are pure padding.
    pub over_partitioned: bool,
}

impl Partition {
    pub fn rows_per_block(&self) -> usize {
        self.blocks[0].rows()
    }

    /// Stacks the blocks and drops the padding rows.
    pub fn concat(&self) -> Block {
        let stacked = Block::vstack(&self.blocks).expect("partition blocks share a column count");
        stacked.slice_rows(0, self.original_rows)
    }
}

pub fn partition_rows(matrix: &Block, parts: usize) -> Result<Partition> {
    if parts == 0 {
        return Err(Error::InvalidParameter("parts must be at least 1".into()));
    }
    let s = matrix.rows();
    if s == 0 {
        return Err(Error::Empty("matrix rows"));
    }
    let per = s.div_ceil(parts);
    let t = matrix.cols();
    let blocks = (0..parts)
        .map(|p| {
            let start = (p * per).min(s);
            let end = ((p + 1) * per).min(s);
            let mut b = Block::zeros(per, t);
            b.as_mut_slice()[..(end - start) * t].copy_from_slice(&matrix.as_slice()[start * t..end * t]);
            b
        })
        .collect();
    Ok(Partition {
        blocks,
        original_rows: s,
        over_partitioned: parts > s,
    })
}
