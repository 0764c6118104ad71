use rand::Rng;

use crate::rng::Rng as StdRng;

/// Nodes not yet selected, with O(1) uniform draw and removal.
#[derive(Debug, Clone)]
pub(crate) struct UnvisitedPool {
    items: Vec<usize>,
    slot: Vec<usize>,
}

impl UnvisitedPool {
    pub fn new(n: usize) -> Self {
        Self { items: (0..n).collect(), slot: (0..n).collect() }
    }

    pub fn remove(&mut self, node: usize) {
        let s = self.slot[node];
        let last = *self.items.last().expect("remove from empty pool");
        self.items.swap_remove(s);
        if last != node {
            self.slot[last] = s;
        }
        self.slot[node] = usize::MAX;
    }

    pub fn insert(&mut self, node: usize) {
        debug_assert_eq!(self.slot[node], usize::MAX);
        self.slot[node] = self.items.len();
        self.items.push(node);
    }

    pub fn draw(&self, rng: &mut StdRng) -> Option<usize> {
        (!self.items.is_empty()).then(|| self.items[rng.random_range(0..self.items.len())])
    }
}

/// Ordered selection `S*` with membership flags and the unvisited pool.
#[derive(Debug, Clone)]
pub(crate) struct Selection {
    pub nodes: Vec<usize>,
    selected: Vec<bool>,
    pool: UnvisitedPool,
}

impl Selection {
    pub fn new(n_nodes: usize) -> Self {
        Self { nodes: Vec::new(), selected: vec![false; n_nodes], pool: UnvisitedPool::new(n_nodes) }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    #[inline]
    pub fn contains(&self, node: usize) -> bool {
        self.selected[node]
    }

    pub fn add(&mut self, node: usize) {
        debug_assert!(!self.selected[node]);
        self.selected[node] = true;
        self.pool.remove(node);
        self.nodes.push(node);
    }

    /// A uniformly random node outside the selection.
    pub fn random_unselected(&self, rng: &mut StdRng) -> Option<usize> {
        self.pool.draw(rng)
    }

    /// Keeps `target` nodes overall by dropping a uniformly random subset of
    /// the nodes added since `step_start`. Survivors keep their order.
    pub fn trim_last_step(&mut self, step_start: usize, target: usize, rng: &mut StdRng) {
        if self.nodes.len() <= target {
            return;
        }
        let step: Vec<usize> = self.nodes.split_off(step_start);
        let keep = target - step_start;
        let mut keep_idx = rand::seq::index::sample(rng, step.len(), keep).into_vec();
        keep_idx.sort_unstable();
        let mut kept = vec![false; step.len()];
        for &k in &keep_idx {
            kept[k] = true;
        }
        for (node, keep) in step.into_iter().zip(kept) {
            if keep {
                self.nodes.push(node);
            } else {
                self.selected[node] = false;
                self.pool.insert(node);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn pool_draws_only_remaining() {
        let mut p = UnvisitedPool::new(5);
        p.remove(0);
        p.remove(4);
        p.remove(2);
        let mut r = rng::from_seed(0);
        for _ in 0..50 {
            let x = p.draw(&mut r).unwrap();
            assert!(x == 1 || x == 3);
        }
        p.insert(4);
        assert_eq!(p.items.len(), 3);
    }

    #[test]
    fn trim_drops_only_last_step() {
        let mut r = rng::from_seed(1);
        let mut s = Selection::new(10);
        for i in 0..7 {
            s.add(i);
        }
        s.trim_last_step(3, 5, &mut r);
        assert_eq!(s.len(), 5);
        assert_eq!(&s.nodes[..3], &[0, 1, 2]);
        let dropped: Vec<usize> = (3..7).filter(|&i| !s.contains(i)).collect();
        assert_eq!(dropped.len(), 2);
        // dropped nodes are drawable again
        let mut seen = std::collections::HashSet::new();
        for _ in 0..500 {
            seen.insert(s.random_unselected(&mut r).unwrap());
        }
        assert!(dropped.iter().all(|d| seen.contains(d)));
    }
}
