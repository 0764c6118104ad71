use rand::seq::SliceRandom;
use rand_distr::{Distribution, Geometric};

use super::pool::Selection;
use super::{Sample, SamplerSpec};
use crate::netcore::AdjacencyMatrix;
use crate::rng::Rng;

/// How many unselected out-neighbours each frontier node recruits per wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Expansion {
    /// Every neighbour (snowball).
    All,
    /// `min(k, available)` uniformly chosen neighbours (SNOW-k).
    Capped(usize),
    /// `min(r, available)` with `r` counting failures before the first
    /// success of a Bernoulli(`p`) sequence, so `E[r] = (1 − p) / p` (FF).
    Geometric(f64),
}

impl Expansion {
    fn recruit(&self, candidates: &mut Vec<usize>, rng: &mut Rng) {
        let take = match *self {
            Expansion::All => return,
            Expansion::Capped(k) => k,
            Expansion::Geometric(p) => {
                let g = Geometric::new(p).expect("p in (0, 1)");
                usize::try_from(g.sample(rng)).unwrap_or(usize::MAX)
            }
        };
        if take < candidates.len() {
            let (chosen, _) = candidates.partial_shuffle(rng, take);
            let chosen = chosen.to_vec();
            *candidates = chosen;
        }
    }
}

/// One wave: every frontier node recruits from its unselected out-neighbours.
/// Recruits join `sel` immediately, so a node is recruited at most once.
fn expand(
    adj: &AdjacencyMatrix,
    frontier: &[usize],
    expansion: Expansion,
    sel: &mut Selection,
    rng: &mut Rng,
) -> Vec<usize> {
    let mut recruits = Vec::new();
    let mut candidates = Vec::new();
    for &i in frontier {
        candidates.clear();
        candidates.extend(adj.neighbors(i).iter().copied().filter(|&j| !sel.contains(j)));
        expansion.recruit(&mut candidates, rng);
        for &j in candidates.iter() {
            sel.add(j);
            recruits.push(j);
        }
    }
    recruits
}

fn initial_seeds(spec: &SamplerSpec, sel: &mut Selection, rng: &mut Rng) -> Vec<usize> {
    match spec.seed_nodes.as_deref() {
        Some(given) if !given.is_empty() => {
            given.iter().for_each(|&s| sel.add(s));
            given.to_vec()
        }
        _ => (0..spec.n_seeds)
            .map_while(|_| {
                let s = sel.random_unselected(rng)?;
                sel.add(s);
                Some(s)
            })
            .collect(),
    }
}

/// Wave sampling shared by SNOW, SNOW-k and FF.
pub(super) fn sample_waves(adj: &AdjacencyMatrix, spec: &SamplerSpec, expansion: Expansion, rng: &mut Rng) -> Sample {
    let target = spec.target_n;
    let mut sel = Selection::new(adj.n_nodes());
    let mut frontier = initial_seeds(spec, &mut sel, rng);
    let mut waves = vec![frontier.len()];
    let mut restarts = 0;
    sel.trim_last_step(0, target, rng);

    while sel.len() < target {
        let start = sel.len();
        let mut recruits = expand(adj, &frontier, expansion, &mut sel, rng);
        if recruits.is_empty() {
            match sel.random_unselected(rng) {
                Some(r) => {
                    sel.add(r);
                    recruits.push(r);
                    restarts += 1;
                }
                None => break,
            }
        }
        waves.push(recruits.len());
        sel.trim_last_step(start, target, rng);
        frontier = recruits;
    }

    let short = sel.len() < target;
    Sample { nodes: sel.nodes, waves, restarts, short }
}

/// Cluster sampling: whole clusters in a uniformly random order, the last
/// one trimmed at random to hit the target exactly.
pub(super) fn sample_clusters(labels: &[usize], target: usize, rng: &mut Rng) -> Sample {
    let n_labels = labels.iter().max().map_or(0, |&m| m + 1);
    let mut clusters: Vec<Vec<usize>> = vec![Vec::new(); n_labels];
    for (i, &c) in labels.iter().enumerate() {
        clusters[c].push(i);
    }
    let mut order: Vec<usize> = (0..n_labels).filter(|&c| !clusters[c].is_empty()).collect();
    order.shuffle(rng);

    let mut sel = Selection::new(labels.len());
    let mut waves = Vec::new();
    for c in order {
        let start = sel.len();
        for &i in &clusters[c] {
            sel.add(i);
        }
        waves.push(clusters[c].len());
        if sel.len() >= target {
            sel.trim_last_step(start, target, rng);
            break;
        }
    }
    let short = sel.len() < target;
    Sample { nodes: sel.nodes, waves, restarts: 0, short }
}

/// Runs `waves` expansion steps from `seeds` without a size target or
/// restarts, returning every node reached.
pub fn grow_waves(
    adj: &AdjacencyMatrix,
    seeds: &[usize],
    waves: usize,
    expansion: Expansion,
    rng: &mut Rng,
) -> Vec<usize> {
    let mut sel = Selection::new(adj.n_nodes());
    for &s in seeds {
        if !sel.contains(s) {
            sel.add(s);
        }
    }
    let mut frontier = sel.nodes.clone();
    for _ in 0..waves {
        frontier = expand(adj, &frontier, expansion, &mut sel, rng);
        if frontier.is_empty() {
            break;
        }
    }
    sel.nodes
}
