use rand::seq::IndexedRandom;
use rand::Rng as _;

use super::pool::Selection;
use super::{Sample, SamplerSpec};
use crate::netcore::AdjacencyMatrix;
use crate::rng::Rng;

/// Steps without a new node after which a random walk is declared stuck and
/// restarted at a random unselected node.
const STALL_LIMIT: usize = 1000;

fn first_node(spec: &SamplerSpec, sel: &Selection, rng: &mut Rng) -> Option<usize> {
    match spec.seed_nodes.as_deref() {
        Some([first, ..]) => Some(*first),
        _ => sel.random_unselected(rng),
    }
}

/// Depth-first search with backtracking along the current path.
pub(super) fn sample_dfs(adj: &AdjacencyMatrix, spec: &SamplerSpec, rng: &mut Rng) -> Sample {
    let target = spec.target_n;
    let mut sel = Selection::new(adj.n_nodes());
    let mut waves = Vec::new();
    let mut restarts = 0;
    let mut stack = Vec::new();
    let mut open = Vec::new();

    if let Some(s) = first_node(spec, &sel, rng) {
        sel.add(s);
        stack.push(s);
        waves.push(1);
    }
    while sel.len() < target {
        let Some(&top) = stack.last() else {
            let Some(r) = sel.random_unselected(rng) else {
                break;
            };
            sel.add(r);
            stack.push(r);
            waves.push(1);
            restarts += 1;
            continue;
        };
        open.clear();
        open.extend(adj.neighbors(top).iter().copied().filter(|&j| !sel.contains(j)));
        match open.choose(rng) {
            Some(&next) => {
                sel.add(next);
                stack.push(next);
                waves.push(1);
            }
            None => {
                stack.pop();
            }
        }
    }
    let short = sel.len() < target;
    Sample { nodes: sel.nodes, waves, restarts, short }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) enum Reset {
    /// Return to the first seed node (RWR).
    Restart,
    /// Jump to a uniformly random unselected node (RWJ).
    Jump,
}

/// Random walk over out-edges. With probability `p_rw` the walker moves to
/// a uniform out-neighbour, selecting it if new; otherwise it resets. A sink
/// forces a reset.
pub(super) fn sample_walk(adj: &AdjacencyMatrix, spec: &SamplerSpec, reset: Reset, rng: &mut Rng) -> Sample {
    let target = spec.target_n;
    let mut sel = Selection::new(adj.n_nodes());
    let mut waves = Vec::new();
    let mut restarts = 0;

    let Some(mut anchor) = first_node(spec, &sel, rng) else {
        return Sample { nodes: Vec::new(), waves, restarts, short: true };
    };
    sel.add(anchor);
    waves.push(1);
    let mut current = anchor;
    let mut stall = 0usize;

    while sel.len() < target {
        let step = if rng.random_bool(spec.p_rw) { adj.neighbors(current).choose(rng).copied() } else { None };
        match (step, reset) {
            (Some(next), _) => {
                current = next;
                if sel.contains(next) {
                    stall += 1;
                } else {
                    sel.add(next);
                    waves.push(1);
                    stall = 0;
                }
            }
            (None, Reset::Restart) => {
                current = anchor;
                stall += 1;
            }
            (None, Reset::Jump) => {
                let Some(j) = sel.random_unselected(rng) else {
                    break;
                };
                sel.add(j);
                waves.push(1);
                current = j;
                stall = 0;
            }
        }
        if stall > STALL_LIMIT {
            let Some(r) = sel.random_unselected(rng) else {
                break;
            };
            sel.add(r);
            waves.push(1);
            anchor = r;
            current = r;
            stall = 0;
            restarts += 1;
        }
    }
    let short = sel.len() < target;
    Sample { nodes: sel.nodes, waves, restarts, short }
}
