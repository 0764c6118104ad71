//! Synthetic directed networks: stochastic block model and latent space model.

mod lsm;
mod sbm;

pub use lsm::{gen_lsm, lsm_edge_probability, LsmConfig};
pub use sbm::{gen_sbm, SbmConfig, SbmScale};

use crate::netcore::AdjacencyMatrix;

/// A generated graph with the cluster label of every node.
#[derive(Debug, Clone)]
pub struct GeneratedNetwork {
    pub adjacency: AdjacencyMatrix,
    /// Block / cluster membership in `0..K`.
    pub labels: Vec<usize>,
}

/// Indices of Bernoulli(`p`) successes over `0..len`, drawn by geometric skips.
///
/// Equivalent in distribution to `len` independent coin flips but costs
/// `O(1 + len * p)`.
pub(crate) fn bernoulli_positions<R: rand::Rng + ?Sized>(
    rng: &mut R,
    len: usize,
    p: f64,
    mut on_hit: impl FnMut(usize),
) {
    if len == 0 || p <= 0.0 {
        return;
    }
    if p >= 1.0 {
        (0..len).for_each(on_hit);
        return;
    }
    let log_q = (-p).ln_1p();
    let mut pos: usize = 0;
    loop {
        // failures before the next success
        let u: f64 = rng.random::<f64>();
        let skip = ((1.0 - u).ln() / log_q).floor();
        if !skip.is_finite() || skip >= (len - pos) as f64 {
            return;
        }
        pos += skip as usize;
        on_hit(pos);
        pos += 1;
        if pos >= len {
            return;
        }
    }
}
