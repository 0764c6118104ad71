use nalgebra::DMatrix;

use super::WeightMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Rectangular CSR block of `W` with local row/column numbering.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseBlock<T = f64> {
    pub n_rows: usize,
    pub n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T: Real> SparseBlock<T> {
    fn empty(n_rows: usize, n_cols: usize) -> Self {
        let mut row_ptr = Vec::with_capacity(n_rows + 1);
        row_ptr.push(0);
        Self { n_rows, n_cols, row_ptr, col_idx: Vec::new(), values: Vec::new() }
    }

    fn push_row<I: IntoIterator<Item = (usize, T)>>(&mut self, entries: I) {
        for (j, v) in entries {
            self.col_idx.push(j);
            self.values.push(v);
        }
        self.row_ptr.push(self.col_idx.len());
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    /// `B x`.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.n_rows)
            .map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter().zip(vals).map(|(&j, &w)| w * x[j]).sum()
            })
            .collect()
    }

    /// `Bᵀ x`.
    pub fn mul_transpose_vec(&self, x: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.n_cols];
        for (i, &xi) in x.iter().enumerate().take(self.n_rows) {
            let (cols, vals) = self.row(i);
            for (&j, &w) in cols.iter().zip(vals) {
                out[j] += w * xi;
            }
        }
        out
    }

    /// `tr(BᵀB)`.
    pub fn frobenius_sq(&self) -> T {
        self.values.iter().map(|&v| v * v).sum()
    }

    pub fn to_dense(&self) -> DMatrix<T> {
        let mut m = DMatrix::zeros(self.n_rows, self.n_cols);
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&j, &w) in cols.iter().zip(vals) {
                m[(i, j)] = w;
            }
        }
        m
    }
}

/// Subnetwork view of `W` under the partition `S1 | S2`.
///
/// `w11` keeps the full-network denominators `d_i`: a row of `w11` sums to
/// less than one whenever the node follows someone outside `S1`.
#[derive(Debug, Clone)]
pub struct SubnetSelection<T = f64> {
    pub nodes: Vec<usize>,
    pub w11: DMatrix<T>,
    pub w12_frobenius_sq: T,
    pub w21_frobenius_sq: T,
    /// `S1 → S2` block; columns indexed by position in `outside`.
    pub w12: Option<SparseBlock<T>>,
    /// `S2 → S1` block; rows indexed by position in `outside`.
    pub w21: Option<SparseBlock<T>>,
    /// `S2` in increasing node order, populated with the sparse blocks.
    pub outside: Vec<usize>,
}

impl<T: Real> SubnetSelection<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Picks the entries of a full-network vector belonging to `S1`.
    pub fn restrict<U: Copy>(&self, full: &[U]) -> Vec<U> {
        self.nodes.iter().map(|&i| full[i]).collect()
    }
}

const NOT_SELECTED: usize = usize::MAX;

/// Extracts `W11` densely and the Frobenius norms of the boundary blocks.
///
/// The `S1 → S2` norm needs one pass over the rows of `S1`; the `S2 → S1`
/// norm scans the remaining rows. Sparse `W12`/`W21` are materialised only
/// when `keep_blocks` is set.
pub fn extract_selection<T: Real>(w: &WeightMatrix<T>, s1: &[usize], keep_blocks: bool) -> Result<SubnetSelection<T>> {
    let n_total = w.n_nodes();
    let mut pos = vec![NOT_SELECTED; n_total];
    for (p, &i) in s1.iter().enumerate() {
        if i >= n_total {
            return Err(Error::Domain(format!("node {i} out of range for {n_total} nodes")));
        }
        if pos[i] != NOT_SELECTED {
            return Err(Error::Domain(format!("node {i} selected twice")));
        }
        pos[i] = p;
    }

    let (outside, out_pos) = if keep_blocks {
        let outside: Vec<usize> = (0..n_total).filter(|&i| pos[i] == NOT_SELECTED).collect();
        let mut out_pos = vec![NOT_SELECTED; n_total];
        for (q, &i) in outside.iter().enumerate() {
            out_pos[i] = q;
        }
        (outside, out_pos)
    } else {
        (Vec::new(), Vec::new())
    };

    let n = s1.len();
    let n_out = n_total - n;
    let mut w11 = DMatrix::zeros(n, n);
    let mut w12_sq = T::zero();
    let mut w12 = keep_blocks.then(|| SparseBlock::empty(n, n_out));
    for (p, &i) in s1.iter().enumerate() {
        let (cols, vals) = w.row(i);
        let mut boundary = Vec::new();
        for (&j, &v) in cols.iter().zip(vals) {
            match pos[j] {
                NOT_SELECTED => {
                    w12_sq += v * v;
                    if keep_blocks {
                        boundary.push((out_pos[j], v));
                    }
                }
                q => w11[(p, q)] = v,
            }
        }
        if let Some(block) = w12.as_mut() {
            block.push_row(boundary);
        }
    }

    let mut w21_sq = T::zero();
    let mut w21 = keep_blocks.then(|| SparseBlock::empty(n_out, n));
    for i in (0..n_total).filter(|&i| pos[i] == NOT_SELECTED) {
        let (cols, vals) = w.row(i);
        let mut entries = Vec::new();
        for (&j, &v) in cols.iter().zip(vals) {
            if pos[j] != NOT_SELECTED {
                w21_sq += v * v;
                if keep_blocks {
                    entries.push((pos[j], v));
                }
            }
        }
        if let Some(block) = w21.as_mut() {
            block.push_row(entries);
        }
    }

    Ok(SubnetSelection {
        nodes: s1.to_vec(),
        w11,
        w12_frobenius_sq: w12_sq,
        w21_frobenius_sq: w21_sq,
        w12,
        w21,
        outside,
    })
}
