use fixedbitset::FixedBitSet;

use super::greedy::{dual_lower_bound, greedy_cover, residual_bound};
use super::instance::{CoverInstance, CoverSolution, REL_SLACK};
use crate::error::{Error, Result};

pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000;

struct Search<'a> {
    inst: &'a CoverInstance,
    weights: Vec<f64>,
    /// Candidates containing each point, cheapest share first.
    by_point: Vec<Vec<usize>>,
    best: Vec<usize>,
    best_cost: f64,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl Search<'_> {
    fn run(&mut self, left: &FixedBitSet, excluded: &mut FixedBitSet, chosen: &mut Vec<usize>, cost: f64) {
        if self.nodes >= self.budget {
            self.exhausted = true;
            return;
        }
        self.nodes += 1;
        if left.count_ones(..) == 0 {
            let total = self.inst.cost(chosen);
            if total < self.best_cost {
                self.best_cost = total;
                self.best = chosen.clone();
            }
            return;
        }
        let Some(bound) = residual_bound(self.inst, excluded, left) else {
            return;
        };
        if cost + bound >= self.best_cost * (1.0 - REL_SLACK) {
            return;
        }
        // branch on the uncovered point with fewest admissible candidates
        let mut pick: Option<(usize, usize)> = None;
        for u in left.ones() {
            let deg = self.by_point[u].iter().filter(|&&c| !excluded.contains(c)).count();
            if pick.is_none_or(|(d, _)| deg < d) {
                pick = Some((deg, u));
            }
        }
        let (_, u) = pick.expect("nonempty");
        let mut options: Vec<(f64, usize, usize)> = self.by_point[u]
            .iter()
            .filter(|&&c| !excluded.contains(c))
            .map(|&c| {
                let fresh = self.inst.candidates()[c].covered.intersection_count(left) as f64;
                (self.weights[c] / fresh, self.inst.candidates()[c].len, c)
            })
            .collect();
        options.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut newly_excluded = Vec::new();
        for &(_, _, c) in &options {
            let mut next = left.clone();
            next.difference_with(&self.inst.candidates()[c].covered);
            chosen.push(c);
            excluded.insert(c);
            self.run(&next, excluded, chosen, cost + self.weights[c]);
            chosen.pop();
            // later branches may assume c is not used
            newly_excluded.push(c);
            if self.exhausted {
                break;
            }
        }
        for c in newly_excluded {
            excluded.set(c, false);
        }
    }
}

/// Branch and bound with a greedy incumbent and the residual dual bound.
/// On budget exhaustion returns the best cover found with `exact = false`.
pub fn solve_exact(inst: &CoverInstance, budget: u64) -> Result<CoverSolution> {
    let root_lo = dual_lower_bound(inst)?;
    let n = inst.candidates().len();
    let incumbent = greedy_cover(inst, &FixedBitSet::with_capacity(n), None).ok_or(Error::Infeasible)?;
    let weights: Vec<f64> = inst.candidates().iter().map(|c| c.weight()).collect();
    let mut by_point = vec![Vec::new(); inst.universe()];
    for (i, c) in inst.candidates().iter().enumerate() {
        for u in c.covered.ones() {
            by_point[u].push(i);
        }
    }
    let mut search = Search {
        inst,
        weights,
        by_point,
        best_cost: inst.cost(&incumbent),
        best: incumbent,
        nodes: 0,
        budget,
        exhausted: false,
    };
    let mut all = FixedBitSet::with_capacity(inst.universe());
    all.insert_range(..);
    search.run(&all, &mut FixedBitSet::with_capacity(n), &mut Vec::new(), 0.0);
    let mut chosen = search.best;
    chosen.sort_unstable();
    let hi = search.best_cost;
    let (lo, exact) = if search.exhausted { (root_lo.min(hi), false) } else { (hi, true) };
    Ok(CoverSolution { chosen, value_lo: lo, value_hi: hi, exact, nodes: search.nodes })
}

/// Minimum number of candidates covering the universe (`α = 0`).
pub fn cardinality_cover(inst: &CoverInstance, budget: u64) -> Result<(u64, bool)> {
    let sol = solve_exact(&inst.with_alpha(0.0), budget)?;
    Ok((sol.chosen.len() as u64, sol.exact))
}
