use fixedbitset::FixedBitSet;

use super::instance::{compensated_sum, CoverInstance, CoverSolution};
use crate::error::{Error, Result};

/// Greedy cover by smallest weight per newly covered point; ties go to the
/// shorter string, then to the lower index. `value_lo` is the dual bound.
pub fn solve_greedy(inst: &CoverInstance) -> Result<CoverSolution> {
    let lo = dual_lower_bound(inst)?;
    let chosen = greedy_cover(inst, &FixedBitSet::with_capacity(inst.candidates().len()), None)
        .ok_or(Error::Infeasible)?;
    let hi = inst.cost(&chosen);
    Ok(CoverSolution { exact: hi <= lo, chosen, value_lo: lo.min(hi), value_hi: hi, nodes: 0 })
}

/// Greedy completion of the points in `uncovered` (all points if `None`),
/// never using candidates marked in `excluded`.
pub(crate) fn greedy_cover(
    inst: &CoverInstance,
    excluded: &FixedBitSet,
    uncovered: Option<&FixedBitSet>,
) -> Option<Vec<usize>> {
    let mut left = match uncovered {
        Some(u) => u.clone(),
        None => {
            let mut all = FixedBitSet::with_capacity(inst.universe());
            all.insert_range(..);
            all
        }
    };
    let weights: Vec<f64> = inst.candidates().iter().map(|c| c.weight()).collect();
    let mut chosen = Vec::new();
    while left.count_ones(..) > 0 {
        let mut best: Option<(f64, usize, usize)> = None;
        for (i, c) in inst.candidates().iter().enumerate() {
            if excluded.contains(i) {
                continue;
            }
            let fresh = c.covered.intersection_count(&left);
            if fresh == 0 {
                continue;
            }
            let ratio = weights[i] / fresh as f64;
            let better = match best {
                None => true,
                Some((r, m, _)) => ratio < r || (ratio == r && c.len < m),
            };
            if better {
                best = Some((ratio, c.len, i));
            }
        }
        let (_, _, i) = best?;
        left.difference_with(&inst.candidates()[i].covered);
        chosen.push(i);
    }
    Some(chosen)
}

/// `Σ_u min_{c ∋ u} w_c / |c|`, a lower bound on every cover's cost.
pub fn dual_lower_bound(inst: &CoverInstance) -> Result<f64> {
    let mut all = FixedBitSet::with_capacity(inst.universe());
    all.insert_range(..);
    residual_bound(inst, &FixedBitSet::with_capacity(inst.candidates().len()), &all).ok_or(Error::Infeasible)
}

/// Dual bound restricted to the points of `left`, sharing each candidate's
/// weight over the points of `left` it covers. `None` if some point of
/// `left` lies in no admissible candidate.
pub(crate) fn residual_bound(inst: &CoverInstance, excluded: &FixedBitSet, left: &FixedBitSet) -> Option<f64> {
    let mut share = vec![f64::INFINITY; inst.universe()];
    for (i, c) in inst.candidates().iter().enumerate() {
        if excluded.contains(i) {
            continue;
        }
        let k = c.covered.intersection_count(left);
        if k == 0 {
            continue;
        }
        let s = c.weight() / k as f64;
        for u in c.covered.intersection(left) {
            if s < share[u] {
                share[u] = s;
            }
        }
    }
    let mut terms = Vec::with_capacity(left.count_ones(..));
    for u in left.ones() {
        if share[u].is_infinite() {
            return None;
        }
        terms.push(share[u]);
    }
    // shares and the sum each round once; shrink so the bound stays below
    // the rounded cost of every cover
    Some(compensated_sum(terms) * (1.0 - 4.0 * f64::EPSILON))
}
