use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{bernoulli_positions, GeneratedNetwork};
use crate::error::{Error, Result};
use crate::netcore::AdjacencyMatrix;
use crate::rng;

/// Multiplier applied to the three SBM tier probabilities
/// `0.2 N^-1`, `0.2 N^-1.5` and `0.2 N^-2`.
///
/// `Literal` uses them as written, which yields an expected out-degree of
/// roughly `0.2 (N/K) / N`. `NodeCount` multiplies every tier by `N`, giving
/// the sparse-but-connected regime with `N`-invariant expected degrees
/// `0.2 (N/K - 1)` within blocks, `0.4 (N/K) N^-0.5` to adjacent blocks and
/// about `0.2` elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SbmScale {
    #[default]
    Literal,
    NodeCount,
    Factor(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SbmConfig {
    pub n_nodes: usize,
    pub n_blocks: usize,
    #[serde(default)]
    pub scale: SbmScale,
    #[serde(default)]
    pub seed: u64,
}

impl SbmConfig {
    pub fn new(n_nodes: usize, n_blocks: usize, seed: u64) -> Self {
        Self { n_nodes, n_blocks, scale: SbmScale::Literal, seed }
    }

    pub fn with_scale(mut self, scale: SbmScale) -> Self {
        self.scale = scale;
        self
    }

    /// Edge probabilities for `(same block, |Δc| = 1, otherwise)`.
    pub fn tier_probabilities(&self) -> [f64; 3] {
        let n = self.n_nodes as f64;
        let mult = match self.scale {
            SbmScale::Literal => 1.0,
            SbmScale::NodeCount => n,
            SbmScale::Factor(f) => f,
        };
        [0.2 * mult / n, 0.2 * mult * n.powf(-1.5), 0.2 * mult / (n * n)].map(|p| p.min(1.0))
    }

    fn validate(&self) -> Result<()> {
        if self.n_nodes < 2 {
            return Err(Error::Config("SBM needs at least 2 nodes".into()));
        }
        if self.n_blocks == 0 {
            return Err(Error::Config("SBM needs at least one block".into()));
        }
        if let SbmScale::Factor(f) = self.scale {
            if !(f.is_finite() && f >= 0.0) {
                return Err(Error::Config(format!("invalid SBM scale factor {f}")));
            }
        }
        Ok(())
    }
}

const MEMBERSHIP_STREAM: u64 = u64::MAX;

/// Directed SBM with memberships uniform over the `K` blocks and every
/// ordered pair `i != j` an independent Bernoulli draw.
///
/// Row `i` draws from its own substream, so rows are generated in parallel
/// without affecting the result.
pub fn gen_sbm(cfg: &SbmConfig) -> Result<GeneratedNetwork> {
    cfg.validate()?;
    let (n, k) = (cfg.n_nodes, cfg.n_blocks);
    let mut member_rng = rng::substream(cfg.seed, &[MEMBERSHIP_STREAM]);
    let labels: Vec<usize> = (0..n).map(|_| member_rng.random_range(0..k)).collect();
    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &c) in labels.iter().enumerate() {
        blocks[c].push(i);
    }
    let [p_same, p_adj, p_far] = cfg.tier_probabilities();

    let rows: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::substream(cfg.seed, &[i as u64]);
            let c = labels[i];
            let mut row = Vec::new();
            let same = &blocks[c];
            bernoulli_positions(&mut r, same.len(), p_same, |q| {
                if same[q] != i {
                    row.push(same[q]);
                }
            });
            for nb in [c.checked_sub(1), (c + 1 < k).then_some(c + 1)].into_iter().flatten() {
                let members = &blocks[nb];
                bernoulli_positions(&mut r, members.len(), p_adj, |q| row.push(members[q]));
            }
            // far tier: thin a rate-p_far process over all nodes, keep far ones
            bernoulli_positions(&mut r, n, p_far, |j| {
                if labels[j].abs_diff(c) > 1 {
                    row.push(j);
                }
            });
            row
        })
        .collect();

    Ok(GeneratedNetwork { adjacency: AdjacencyMatrix::from_rows(rows), labels })
}
