use nalgebra::DMatrix;

use super::AdjacencyMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Row-normalised spatial weights `w_ij = a_ij / d_i` in CSR form.
///
/// Rows of nodes without out-edges are identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix<T = f64> {
    n_nodes: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T: Real> WeightMatrix<T> {
    /// Row-normalises `adj`; zero out-degree rows stay empty.
    pub fn from_adjacency(adj: &AdjacencyMatrix) -> Self {
        let row_ptr = adj.row_ptr().to_vec();
        let col_idx = adj.col_idx().to_vec();
        let mut values = Vec::with_capacity(col_idx.len());
        for i in 0..adj.n_nodes() {
            let d = adj.out_degree(i);
            if d > 0 {
                let w = T::one() / T::from_count(d);
                values.extend(std::iter::repeat_n(w, d));
            }
        }
        Self { n_nodes: adj.n_nodes(), row_ptr, col_idx, values }
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and weights of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(T::zero(), |k| vals[k])
    }

    /// Number of identically zero rows (nodes with `d_i = 0`).
    pub fn n_zero_rows(&self) -> usize {
        self.row_ptr.windows(2).filter(|w| w[0] == w[1]).count()
    }

    /// `W x`.
    pub fn spmv(&self, x: &[T]) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); self.n_nodes];
        self.spmv_into(x, &mut out)?;
        Ok(out)
    }

    /// `out <- W x` without allocating.
    pub fn spmv_into(&self, x: &[T], out: &mut [T]) -> Result<()> {
        if x.len() != self.n_nodes || out.len() != self.n_nodes {
            return Err(Error::Domain(format!(
                "spmv: expected vectors of length {}, got {} and {}",
                self.n_nodes,
                x.len(),
                out.len()
            )));
        }
        for (i, o) in out.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *o = cols.iter().zip(vals).map(|(&j, &w)| w * x[j]).sum();
        }
        Ok(())
    }

    /// `out <- Wᵀ x` without allocating.
    pub fn spmv_transpose_into(&self, x: &[T], out: &mut [T]) -> Result<()> {
        if x.len() != self.n_nodes || out.len() != self.n_nodes {
            return Err(Error::Domain(format!("spmv_transpose: expected vectors of length {}", self.n_nodes)));
        }
        out.iter_mut().for_each(|o| *o = T::zero());
        for (i, &xi) in x.iter().enumerate() {
            let (cols, vals) = self.row(i);
            for (&j, &w) in cols.iter().zip(vals) {
                out[j] += w * xi;
            }
        }
        Ok(())
    }

    /// Dense copy. Only sensible for small graphs.
    pub fn to_dense(&self) -> DMatrix<T> {
        let mut m = DMatrix::zeros(self.n_nodes, self.n_nodes);
        for i in 0..self.n_nodes {
            let (cols, vals) = self.row(i);
            for (&j, &w) in cols.iter().zip(vals) {
                m[(i, j)] = w;
            }
        }
        m
    }

    /// Largest deviation `|Σ_j w_ij − 1|` over non-empty rows.
    pub fn max_row_sum_error(&self) -> T {
        (0..self.n_nodes)
            .filter_map(|i| {
                let (_, vals) = self.row(i);
                (!vals.is_empty()).then(|| (vals.iter().copied().sum::<T>() - T::one()).abs())
            })
            .fold(T::zero(), |a, b| a.max(b))
    }
}

/// Row normalisation `w_ij = a_ij / d_i` with zero rows for sinks.
pub fn row_normalize<T: Real>(adj: &AdjacencyMatrix) -> WeightMatrix<T> {
    WeightMatrix::from_adjacency(adj)
}
