//! Subnetwork sampling: simple random, snowball, cluster, depth-first,
//! forest fire, capped snowball and the two random-walk variants.
//!
//! Every method returns exactly `target_n` distinct nodes. Neighbour
//! expansion follows out-edges (`a_ij = 1` makes `j` a neighbour of `i`).
//! When a traversal runs dry before reaching the target it restarts from a
//! uniformly random unselected node.

mod pool;
mod walk;
mod wave;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netcore::AdjacencyMatrix;
use crate::rng;

pub use wave::{grow_waves, Expansion};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerMethod {
    Srs,
    Snow,
    Cs,
    Dfs,
    Ff,
    #[serde(alias = "snow-k", alias = "snow_k")]
    SnowK,
    Rwr,
    Rwj,
}

impl SamplerMethod {
    pub const ALL: [SamplerMethod; 8] = [
        SamplerMethod::Srs,
        SamplerMethod::Snow,
        SamplerMethod::Cs,
        SamplerMethod::Dfs,
        SamplerMethod::Ff,
        SamplerMethod::SnowK,
        SamplerMethod::Rwr,
        SamplerMethod::Rwj,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SamplerMethod::Srs => "SRS",
            SamplerMethod::Snow => "SNOW",
            SamplerMethod::Cs => "CS",
            SamplerMethod::Dfs => "DFS",
            SamplerMethod::Ff => "FF",
            SamplerMethod::SnowK => "SNOWK",
            SamplerMethod::Rwr => "RWR",
            SamplerMethod::Rwj => "RWJ",
        }
    }
}

impl fmt::Display for SamplerMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SamplerMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect();
        SamplerMethod::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(&key))
            .ok_or_else(|| Error::Config(format!("unknown sampling method {s:?}")))
    }
}

fn default_n_seeds() -> usize {
    5
}
fn default_k() -> usize {
    5
}
fn default_p_ff() -> f64 {
    0.25
}
fn default_p_rw() -> f64 {
    0.75
}

/// Sampling method plus its tuning constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub method: SamplerMethod,
    #[serde(default)]
    pub target_n: usize,
    /// Number of random seed nodes for SNOW, FF and SNOW-k.
    #[serde(default = "default_n_seeds")]
    pub n_seeds: usize,
    /// Per-node cap for SNOW-k.
    #[serde(default = "default_k")]
    pub k: usize,
    /// Geometric success probability for FF burn counts.
    #[serde(default = "default_p_ff")]
    pub p_ff: f64,
    /// Probability of continuing the walk for RWR / RWJ.
    #[serde(default = "default_p_rw")]
    pub p_rw: f64,
    /// Cluster label per node, required by CS.
    #[serde(skip)]
    pub cluster_labels: Option<Vec<usize>>,
    /// Explicit starting nodes; random when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_nodes: Option<Vec<usize>>,
    #[serde(default)]
    pub seed: u64,
}

impl SamplerSpec {
    pub fn new(method: SamplerMethod, target_n: usize, seed: u64) -> Self {
        Self {
            method,
            target_n,
            n_seeds: default_n_seeds(),
            k: default_k(),
            p_ff: default_p_ff(),
            p_rw: default_p_rw(),
            cluster_labels: None,
            seed_nodes: None,
            seed,
        }
    }

    pub fn with_labels(mut self, labels: Vec<usize>) -> Self {
        self.cluster_labels = Some(labels);
        self
    }

    pub fn with_seed_nodes(mut self, nodes: Vec<usize>) -> Self {
        self.seed_nodes = Some(nodes);
        self
    }

    fn validate(&self, n_nodes: usize) -> Result<()> {
        if n_nodes == 0 {
            return Err(Error::Config("cannot sample from an empty graph".into()));
        }
        if self.target_n == 0 || self.target_n > n_nodes {
            return Err(Error::Config(format!("target size {} must lie in 1..={n_nodes}", self.target_n)));
        }
        if self.k == 0 {
            return Err(Error::Config("SNOW-k needs k >= 1".into()));
        }
        for (name, p) in [("p_ff", self.p_ff), ("p_rw", self.p_rw)] {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::Config(format!("{name} = {p} must lie in (0, 1)")));
            }
        }
        if matches!(self.method, SamplerMethod::Snow | SamplerMethod::Ff | SamplerMethod::SnowK)
            && self.n_seeds == 0
            && self.seed_nodes.as_ref().is_none_or(|s| s.is_empty())
        {
            return Err(Error::Config("wave samplers need at least one seed".into()));
        }
        if let Some(seeds) = &self.seed_nodes {
            if let Some(&bad) = seeds.iter().find(|&&s| s >= n_nodes) {
                return Err(Error::Config(format!("seed node {bad} out of range")));
            }
            let mut sorted = seeds.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != seeds.len() {
                return Err(Error::Config("duplicate seed nodes".into()));
            }
        }
        if self.method == SamplerMethod::Cs {
            match &self.cluster_labels {
                None => return Err(Error::Config("CS sampling needs cluster labels".into())),
                Some(l) if l.len() != n_nodes => {
                    return Err(Error::Config(format!("{} cluster labels for {n_nodes} nodes", l.len())))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Outcome of one sampling run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    /// Selected nodes in selection order.
    pub nodes: Vec<usize>,
    /// Size of each expansion step before trimming (seed set first).
    pub waves: Vec<usize>,
    /// Number of restarts from a fresh random node.
    pub restarts: usize,
    /// Set when the graph ran out of nodes before the target was reached.
    pub short: bool,
}

/// Draws a subnetwork node set according to `spec`.
pub fn sample(adj: &AdjacencyMatrix, spec: &SamplerSpec) -> Result<Sample> {
    spec.validate(adj.n_nodes())?;
    let mut r = rng::from_seed(spec.seed);
    let out = match spec.method {
        SamplerMethod::Srs => {
            let nodes = rand::seq::index::sample(&mut r, adj.n_nodes(), spec.target_n).into_vec();
            Sample { waves: vec![nodes.len()], nodes, restarts: 0, short: false }
        }
        SamplerMethod::Snow => wave::sample_waves(adj, spec, Expansion::All, &mut r),
        SamplerMethod::SnowK => wave::sample_waves(adj, spec, Expansion::Capped(spec.k), &mut r),
        SamplerMethod::Ff => wave::sample_waves(adj, spec, Expansion::Geometric(spec.p_ff), &mut r),
        SamplerMethod::Cs => {
            let labels = spec.cluster_labels.as_deref().expect("validated");
            wave::sample_clusters(labels, spec.target_n, &mut r)
        }
        SamplerMethod::Dfs => walk::sample_dfs(adj, spec, &mut r),
        SamplerMethod::Rwr => walk::sample_walk(adj, spec, walk::Reset::Restart, &mut r),
        SamplerMethod::Rwj => walk::sample_walk(adj, spec, walk::Reset::Jump, &mut r),
    };
    if out.short {
        log::warn!("{} sampler stopped at {} of {} nodes", spec.method, out.nodes.len(), spec.target_n);
    }
    Ok(out)
}

/// Per-step expansion sizes of the traversal `sample` would perform.
pub fn wave_trace(adj: &AdjacencyMatrix, spec: &SamplerSpec) -> Result<Vec<usize>> {
    sample(adj, spec).map(|s| s.waves)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_parsing() {
        assert_eq!("snow".parse::<SamplerMethod>().unwrap(), SamplerMethod::Snow);
        assert_eq!("SNOW-k".parse::<SamplerMethod>().unwrap(), SamplerMethod::SnowK);
        assert_eq!("rwj".parse::<SamplerMethod>().unwrap(), SamplerMethod::Rwj);
        assert!("bfs".parse::<SamplerMethod>().is_err());
        let json = serde_json::to_string(&SamplerMethod::SnowK).unwrap();
        assert_eq!(json, "\"snowk\"");
    }

    #[test]
    fn config_errors() {
        let adj = AdjacencyMatrix::from_edges(4, [(0, 1)]);
        let cs = SamplerSpec::new(SamplerMethod::Cs, 2, 0);
        assert!(matches!(sample(&adj, &cs), Err(Error::Config(_))));
        let too_big = SamplerSpec::new(SamplerMethod::Srs, 5, 0);
        assert!(sample(&adj, &too_big).is_err());
        let mut bad_p = SamplerSpec::new(SamplerMethod::Ff, 2, 0);
        bad_p.p_ff = 1.0;
        assert!(sample(&adj, &bad_p).is_err());
        let dup = SamplerSpec::new(SamplerMethod::Snow, 2, 0).with_seed_nodes(vec![1, 1]);
        assert!(sample(&adj, &dup).is_err());
    }

    #[test]
    fn srs_full_population_is_permutation() {
        let adj = AdjacencyMatrix::from_edges(30, []);
        let s = sample(&adj, &SamplerSpec::new(SamplerMethod::Srs, 30, 8)).unwrap();
        let mut nodes = s.nodes.clone();
        nodes.sort_unstable();
        assert_eq!(nodes, (0..30).collect::<Vec<_>>());
    }
}
