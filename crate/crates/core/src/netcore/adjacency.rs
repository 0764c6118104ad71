/// Binary directed graph in compressed sparse row form.
///
/// Row `i` lists the nodes that `i` follows (`a_ij = 1`), sorted by column
/// with no duplicates and no self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyMatrix {
    n_nodes: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
}

impl AdjacencyMatrix {
    /// Builds the adjacency from arbitrary `(src, dst)` pairs. Duplicates
    /// collapse and self-loops are dropped.
    ///
    /// Panics if an endpoint is `>= n_nodes`.
    pub fn from_edges<I>(n_nodes: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n_nodes];
        for (i, j) in edges {
            assert!(i < n_nodes && j < n_nodes, "edge ({i}, {j}) out of range for {n_nodes} nodes");
            if i != j {
                rows[i].push(j);
            }
        }
        Self::from_rows(rows)
    }

    /// Builds the adjacency from per-node out-neighbour lists.
    pub fn from_rows(mut rows: Vec<Vec<usize>>) -> Self {
        let n_nodes = rows.len();
        let mut row_ptr = Vec::with_capacity(n_nodes + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        for (i, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            row.dedup();
            col_idx.extend(row.iter().copied().filter(|&j| j != i));
            row_ptr.push(col_idx.len());
        }
        Self { n_nodes, row_ptr, col_idx }
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_edges(&self) -> usize {
        self.col_idx.len()
    }

    /// Nodes followed by `i`, in increasing order.
    #[inline]
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    /// Out-degree `d_i`.
    #[inline]
    pub fn out_degree(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        self.row_ptr.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Column sums of `A`, i.e. the number of followers of each node.
    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n_nodes];
        for &j in &self.col_idx {
            deg[j] += 1;
        }
        deg
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors(i).binary_search(&j).is_ok()
    }

    /// Number of nodes without out-edges.
    pub fn n_sinks(&self) -> usize {
        (0..self.n_nodes).filter(|&i| self.out_degree(i) == 0).count()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n_nodes).flat_map(move |i| self.neighbors(i).iter().map(move |&j| (i, j)))
    }

    pub(crate) fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub(crate) fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }
}
