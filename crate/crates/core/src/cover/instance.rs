use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::symbolic::CoverString;

/// Relative slack used when comparing cover costs.
pub const REL_SLACK: f64 = 1e-12;

/// Where a candidate set came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Provenance {
    None,
    String(CoverString),
    Ball { center: usize, n: usize, eps: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub covered: FixedBitSet,
    pub len: usize,
    pub alpha: f64,
    pub tag: Provenance,
}

impl Candidate {
    pub fn weight(&self) -> f64 {
        (-self.alpha * self.len as f64).exp()
    }

    fn exponent(&self) -> f64 {
        self.alpha * self.len as f64
    }
}

/// Weighted set cover over points `0..universe`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverInstance {
    universe: usize,
    candidates: Vec<Candidate>,
}

impl CoverInstance {
    /// Builds an instance; empty candidates are dropped.
    pub fn new(universe: usize, candidates: Vec<Candidate>) -> Self {
        let candidates = candidates
            .into_iter()
            .filter(|c| {
                debug_assert_eq!(c.covered.len(), universe);
                c.covered.count_ones(..) > 0
            })
            .collect();
        Self { universe, candidates }
    }

    /// Convenience constructor from index lists sharing one `α`.
    pub fn from_sets(universe: usize, sets: &[(Vec<usize>, usize)], alpha: f64) -> Self {
        let cands = sets
            .iter()
            .map(|(members, len)| {
                let mut covered = FixedBitSet::with_capacity(universe);
                for &u in members {
                    covered.insert(u);
                }
                Candidate { covered, len: *len, alpha, tag: Provenance::None }
            })
            .collect();
        Self::new(universe, cands)
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        for c in &mut out.candidates {
            c.alpha = alpha;
        }
        out
    }

    pub fn is_feasible(&self) -> bool {
        let mut all = FixedBitSet::with_capacity(self.universe);
        for c in &self.candidates {
            all.union_with(&c.covered);
        }
        all.count_ones(..) == self.universe
    }

    /// Cost of a set of candidates, summed smallest weight first.
    pub fn cost(&self, chosen: &[usize]) -> f64 {
        compensated_sum(chosen.iter().map(|&i| self.candidates[i].weight()))
    }

    pub fn covers(&self, chosen: &[usize]) -> bool {
        let mut all = FixedBitSet::with_capacity(self.universe);
        for &i in chosen {
            all.union_with(&self.candidates[i].covered);
        }
        all.count_ones(..) == self.universe
    }

    /// Drops every candidate whose set is contained in another's at no
    /// smaller weight. Exact duplicates keep the lowest index. Returns the
    /// pruned instance and the surviving original indices.
    pub fn prune_dominated(&self) -> (CoverInstance, Vec<usize>) {
        let n = self.candidates.len();
        let counts: Vec<usize> = self.candidates.iter().map(|c| c.covered.count_ones(..)).collect();
        let mut keep = Vec::with_capacity(n);
        'outer: for a in 0..n {
            let ca = &self.candidates[a];
            for b in 0..n {
                if a == b || counts[b] < counts[a] {
                    continue;
                }
                let cb = &self.candidates[b];
                // weight(a) >= weight(b) iff exponent(a) <= exponent(b)
                if ca.exponent() > cb.exponent() || !ca.covered.is_subset(&cb.covered) {
                    continue;
                }
                let tie = counts[a] == counts[b] && ca.exponent() == cb.exponent();
                if !tie || b < a {
                    continue 'outer;
                }
            }
            keep.push(a);
        }
        let cands = keep.iter().map(|&i| self.candidates[i].clone()).collect();
        (CoverInstance { universe: self.universe, candidates: cands }, keep)
    }
}

/// A cover together with a certified bracket on the optimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverSolution {
    pub chosen: Vec<usize>,
    pub value_lo: f64,
    pub value_hi: f64,
    pub exact: bool,
    pub nodes: u64,
}

/// Neumaier summation of the terms in ascending order.
pub fn compensated_sum(terms: impl IntoIterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = terms.into_iter().collect();
    v.sort_by(f64::total_cmp);
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in v {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
