//! Radius-`r` cylinder covers partition the shift space, so the sets `X(U)`
//! of strings with a common itinerary prefix are nested. Minimal covers over
//! such a family are found by a bottom-up pass over the prefix tree: a node
//! is either taken whole (if its depth is an admissible length) or covered
//! by its children.

use super::instance::compensated_sum;
use super::window::LengthWindow;
use crate::error::Result;

/// Prefix tree whose nodes at each depth all have the same number of
/// children, as for shift-power systems over product-structured targets.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformTree {
    /// `ln` of the branching from depth `d` to `d + 1`.
    log_branch: Vec<f64>,
    /// Exact branching when it fits in `u128`.
    branch: Vec<Option<u128>>,
}

impl UniformTree {
    /// `counts[d]` lists the number of admissible symbols at each coordinate
    /// first constrained at step `d`.
    pub fn from_counts(counts: &[Vec<usize>]) -> Self {
        let mut log_branch = Vec::with_capacity(counts.len());
        let mut branch = Vec::with_capacity(counts.len());
        for group in counts {
            let exact = group.iter().try_fold(1u128, |acc, &c| acc.checked_mul(c as u128));
            let lb = match exact {
                Some(b) => (b as f64).ln(),
                None => group.iter().map(|&c| (c as f64).ln()).sum(),
            };
            log_branch.push(lb);
            branch.push(exact);
        }
        Self { log_branch, branch }
    }

    pub fn depth(&self) -> usize {
        self.log_branch.len()
    }

    pub fn branching(&self) -> &[Option<u128>] {
        &self.branch
    }

    /// `ln M` for the window; the tree must reach the window's maximal length.
    pub fn log_value(&self, window: &LengthWindow, alpha: f64) -> Result<f64> {
        Ok(self.profile(window, alpha)?.0)
    }

    /// `ln M` and the depth at which the optimal cover takes every node.
    pub fn profile(&self, window: &LengthWindow, alpha: f64) -> Result<(f64, usize)> {
        let hi = window.max_len()?;
        let lo = window.n;
        assert!(hi <= self.depth(), "tree depth {} below window length {hi}", self.depth());
        let mut take = vec![false; hi + 1];
        let mut lc = -alpha * hi as f64;
        take[hi] = true;
        for d in (1..hi).rev() {
            let through = self.log_branch[d] + lc;
            let own = -alpha * d as f64;
            if d >= lo && own <= through {
                take[d] = true;
                lc = own;
            } else {
                lc = through;
            }
        }
        let depth = (lo..=hi).find(|&d| take[d]).expect("maximal length is always taken");
        Ok((self.log_branch[0] + lc, depth))
    }

    /// `ln` of the number of nodes at `depth`.
    pub fn log_nodes(&self, depth: usize) -> f64 {
        self.log_branch[..depth].iter().sum()
    }
}

/// Prefix tree of an explicit list of itineraries.
#[derive(Debug, Clone, PartialEq)]
pub struct PrefixTree {
    /// Distinct itineraries, sorted.
    leaves: Vec<Vec<u32>>,
    /// `first_child[d][p]..first_child[d][p + 1]` are the children (at depth
    /// `d + 1`) of node `p` at depth `d`.
    first_child: Vec<Vec<u32>>,
    /// Leaf index of the first itinerary below each node, per depth.
    first_leaf: Vec<Vec<u32>>,
    depth: usize,
}

/// A node of a prefix tree: the common prefix of length `depth` of the
/// itineraries below it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeNode {
    pub depth: usize,
    pub index: usize,
}

impl PrefixTree {
    pub fn new(mut itineraries: Vec<Vec<u32>>) -> Self {
        itineraries.sort_unstable();
        itineraries.dedup();
        let depth = itineraries.first().map_or(0, Vec::len);
        assert!(itineraries.iter().all(|s| s.len() == depth), "itineraries must share one length");
        let mut first_child = vec![Vec::new(); depth];
        let mut first_leaf: Vec<Vec<u32>> = vec![Vec::new(); depth + 1];
        if !itineraries.is_empty() {
            first_leaf[0].push(0);
        }
        for (i, s) in itineraries.iter().enumerate() {
            let lcp = if i == 0 { 0 } else { s.iter().zip(&itineraries[i - 1]).take_while(|(a, b)| a == b).count() };
            for d in (lcp + 1)..=depth {
                // new node at depth d; its parent is the last node at d - 1
                let id = first_leaf[d].len() as u32;
                let parent = first_leaf[d - 1].len() - 1;
                let fc = &mut first_child[d - 1];
                while fc.len() <= parent {
                    fc.push(id);
                }
                first_leaf[d].push(i as u32);
            }
        }
        for d in 0..depth {
            first_child[d].push(first_leaf[d + 1].len() as u32);
        }
        Self { leaves: itineraries, first_child, first_leaf, depth }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn leaves(&self) -> &[Vec<u32>] {
        &self.leaves
    }

    pub fn nodes_at(&self, depth: usize) -> usize {
        self.first_leaf[depth].len()
    }

    pub fn prefix(&self, node: TreeNode) -> &[u32] {
        &self.leaves[self.first_leaf[node.depth][node.index] as usize][..node.depth]
    }

    fn children(&self, d: usize, p: usize) -> std::ops::Range<usize> {
        self.first_child[d][p] as usize..self.first_child[d][p + 1] as usize
    }

    /// Node costs per depth; `costs[0][0]` is `M`.
    fn costs(&self, window: &LengthWindow, alpha: f64) -> Result<Vec<Vec<f64>>> {
        let hi = window.max_len()?;
        let lo = window.n;
        assert!(hi <= self.depth, "tree depth {} below window length {hi}", self.depth);
        let mut costs = vec![Vec::new(); hi + 1];
        costs[hi] = vec![(-alpha * hi as f64).exp(); self.nodes_at(hi)];
        for d in (0..hi).rev() {
            let own = (-alpha * d as f64).exp();
            let below = &costs[d + 1];
            let level: Vec<f64> = (0..self.nodes_at(d))
                .map(|p| {
                    let through = compensated_sum(below[self.children(d, p)].iter().copied());
                    if d >= lo && d > 0 && own <= through {
                        own
                    } else {
                        through
                    }
                })
                .collect();
            costs[d] = level;
        }
        Ok(costs)
    }

    pub fn value(&self, window: &LengthWindow, alpha: f64) -> Result<f64> {
        if self.leaves.is_empty() {
            return Ok(0.0);
        }
        Ok(self.costs(window, alpha)?[0][0])
    }

    /// An optimal cover as a list of nodes, in prefix order, with its value.
    pub fn optimal_cover(&self, window: &LengthWindow, alpha: f64) -> Result<(Vec<TreeNode>, f64)> {
        if self.leaves.is_empty() {
            return Ok((Vec::new(), 0.0));
        }
        let costs = self.costs(window, alpha)?;
        let hi = window.max_len()?;
        let mut out = Vec::new();
        let mut stack = vec![TreeNode { depth: 0, index: 0 }];
        while let Some(node) = stack.pop() {
            let d = node.depth;
            let own = (-alpha * d as f64).exp();
            if d == hi || (d >= window.n && d > 0 && costs[d][node.index] == own) {
                out.push(node);
                continue;
            }
            for c in self.children(d, node.index).rev() {
                stack.push(TreeNode { depth: d + 1, index: c });
            }
        }
        Ok((out, costs[0][0]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::Theta;

    fn win(n: usize, t: &str) -> LengthWindow {
        LengthWindow::new(n, t.parse::<Theta>().unwrap(), None).unwrap()
    }

    #[test]
    fn full_binary_tree_at_log_two() {
        let counts = vec![vec![2usize]; 8];
        let t = UniformTree::from_counts(&counts);
        let w = win(4, "1/2");
        let lv = t.log_value(&w, std::f64::consts::LN_2).unwrap();
        assert!(lv.abs() < 1e-12);
        // below log 2 the deepest level is cheapest relative to branching
        let (_, d) = t.profile(&w, 0.5).unwrap();
        assert_eq!(d, 4);
        let (_, d) = t.profile(&w, 1.0).unwrap();
        assert_eq!(d, 8);
    }

    #[test]
    fn explicit_tree_matches_uniform() {
        let mut its = Vec::new();
        for code in 0..64u32 {
            its.push((0..6).map(|b| (code >> b) & 1).collect::<Vec<u32>>());
        }
        let tree = PrefixTree::new(its);
        let uni = UniformTree::from_counts(&vec![vec![2usize]; 6]);
        let w = win(3, "1/2");
        for &a in &[0.0, 0.3, 0.69, 1.2] {
            let explicit = tree.value(&w, a).unwrap();
            let level = uni.log_value(&w, a).unwrap().exp();
            assert!((explicit - level).abs() <= 1e-12 * level, "alpha {a}: {explicit} vs {level}");
        }
    }

    #[test]
    fn cover_extraction() {
        // two leaves sharing no prefix beyond the root
        let tree = PrefixTree::new(vec![vec![0, 5, 5, 5], vec![1, 5, 5, 5]]);
        assert_eq!(tree.nodes_at(1), 2);
        assert_eq!(tree.nodes_at(4), 2);
        let w = win(2, "1/2");
        let (cover, v) = tree.optimal_cover(&w, 0.4).unwrap();
        assert_eq!(cover.len(), 2);
        assert!(cover.iter().all(|n| n.depth == 4));
        assert!((v - 2.0 * (-1.6f64).exp()).abs() < 1e-15);
        assert_eq!(tree.prefix(cover[1]), &[1, 5, 5, 5]);
    }

    #[test]
    fn empty_tree() {
        let tree = PrefixTree::new(Vec::new());
        assert_eq!(tree.value(&win(1, "1"), 1.0).unwrap(), 0.0);
    }
}
