use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netcore::{extract_selection, AdjacencyMatrix, WeightMatrix};
use crate::qmle::{self, FitOptions};
use crate::rng;
use crate::sampler::{self, SamplerSpec};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    /// Standard deviation of the replicate estimates, divisor `B`.
    pub se_bt: f64,
    pub n_success: usize,
    /// Successful replicate estimates in replicate order.
    pub estimates: Vec<f64>,
}

/// Re-samples the same network `b` times with `spec` (replicate `r` uses the
/// sampler seed derived from `(seed, r)`), refits on the same response and
/// returns the spread of the estimates.
pub fn bootstrap_se<T: Real>(
    adj: &AdjacencyMatrix,
    w: &WeightMatrix<T>,
    y: &[T],
    spec: &SamplerSpec,
    b: usize,
    seed: u64,
    opts: &FitOptions,
) -> Result<BootstrapResult> {
    if b < 2 {
        return Err(Error::Config(format!("bootstrap needs B >= 2, got {b}")));
    }
    if y.len() != w.n_nodes() || adj.n_nodes() != w.n_nodes() {
        return Err(Error::Domain("graph, weights and response sizes differ".into()));
    }
    let fits: Vec<Option<f64>> = (0..b)
        .into_par_iter()
        .map(|r| {
            let mut s = spec.clone();
            s.seed = rng::derive_seed(seed, &[r as u64]);
            let out = sampler::sample(adj, &s)
                .and_then(|smp| extract_selection(w, &smp.nodes, false).map(|sel| (smp, sel)))
                .and_then(|(smp, sel)| {
                    let y1: Vec<T> = smp.nodes.iter().map(|&i| y[i]).collect();
                    qmle::fit(&y1, &sel.w11, opts)
                });
            match out {
                Ok(f) => Some(f.rho_hat.as_f64()),
                Err(e) => {
                    log::warn!("bootstrap replicate {r} dropped: {e}");
                    None
                }
            }
        })
        .collect();
    let estimates: Vec<f64> = fits.into_iter().flatten().collect();
    if estimates.len() < 2 {
        return Err(Error::Bootstrap(format!("only {} of {b} replicates succeeded", estimates.len())));
    }
    Ok(BootstrapResult { se_bt: population_sd(&estimates), n_success: estimates.len(), estimates })
}

fn population_sd(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mean = sorted.iter().sum::<f64>() / n;
    (sorted.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}
