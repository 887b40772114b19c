//! Brute-force references shared by the integration tests. Nothing here
//! calls the library's builders or solvers; only the canonical cost sum is
//! shared so that equal covers compare bit for bit.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use theta_entropy::cover::{compensated_sum, CoverInstance};

pub type Allowed = Arc<dyn Fn(i64) -> Vec<u16> + Send + Sync>;

/// A shift-power system given by its steps.
#[derive(Clone, Debug)]
pub struct Steps {
    pub alphabet: usize,
    pub preperiod: Vec<u32>,
    pub period: Vec<u32>,
}

impl Steps {
    pub fn full(alphabet: usize) -> Self {
        Self { alphabet, preperiod: vec![], period: vec![1] }
    }

    pub fn example() -> Self {
        Self { alphabet: 2, preperiod: vec![2], period: vec![1] }
    }

    fn step(&self, i: usize) -> i64 {
        if i <= self.preperiod.len() {
            self.preperiod[i - 1] as i64
        } else {
            self.period[(i - 1 - self.preperiod.len()) % self.period.len()] as i64
        }
    }

    /// Position of the orbit after `j` maps.
    pub fn offset(&self, j: usize) -> i64 {
        (1..=j).map(|i| self.step(i)).sum()
    }
}

/// A finite union of product sets, each given by its allowed symbols per
/// coordinate.
#[derive(Clone)]
pub struct Target(pub Vec<Allowed>);

impl Target {
    pub fn whole(alphabet: usize) -> Self {
        Target(vec![Arc::new(move |_| (0..alphabet as u16).collect())])
    }

    pub fn family(alphabet: usize, tail: u16, k: i64) -> Self {
        Target::window(alphabet, tail, -k + 1, k - 1)
    }

    pub fn window(alphabet: usize, tail: u16, lo: i64, hi: i64) -> Self {
        Target(vec![Arc::new(move |n| if lo <= n && n <= hi { (0..alphabet as u16).collect() } else { vec![tail] })])
    }

    pub fn point(symbols: BTreeMap<i64, u16>, fill: u16) -> Self {
        Target(vec![Arc::new(move |n| vec![*symbols.get(&n).unwrap_or(&fill)])])
    }

    pub fn union(parts: Vec<Target>) -> Self {
        Target(parts.into_iter().flat_map(|t| t.0).collect())
    }

    /// `left × right` with symbol `(a, b)` encoded as `a * right_size + b`.
    pub fn product(left: Target, right: Target, right_size: u16) -> Self {
        assert!(left.0.len() == 1 && right.0.len() == 1);
        let (l, r) = (left.0[0].clone(), right.0[0].clone());
        Target(vec![Arc::new(move |n| {
            let rs = r(n);
            l(n).into_iter().flat_map(|a| rs.iter().map(move |&b| a * right_size + b)).collect()
        })])
    }

    /// Distinct restrictions of the points to `coords`.
    fn words(&self, coords: &[i64]) -> BTreeSet<Vec<u16>> {
        let mut out = BTreeSet::new();
        for part in &self.0 {
            let mut words = vec![Vec::new()];
            for &c in coords {
                let options = part(c);
                words = words
                    .into_iter()
                    .flat_map(|w: Vec<u16>| {
                        options.iter().map(move |&s| {
                            let mut v = w.clone();
                            v.push(s);
                            v
                        })
                    })
                    .collect();
            }
            out.extend(words);
        }
        out
    }
}

/// Lengths `m` with `N <= m < N q / p + 1`, or up to `cap` when `p = 0`.
pub fn lengths(n: usize, p: u64, q: u64, cap: usize) -> Vec<usize> {
    if p == 0 {
        return (n..=cap).collect();
    }
    (n..).take_while(|&m| (m as u64) * p < (n as u64) * q + p).collect()
}

/// Candidate sets: one per distinct itinerary prefix and length; a set
/// reached at several lengths keeps only its longest (cheapest) copy.
pub fn candidates(steps: &Steps, target: &Target, r: u32, lens: &[usize]) -> (usize, Vec<(Vec<usize>, usize)>) {
    let max_len = *lens.iter().max().unwrap();
    let r = r as i64;
    let offsets: Vec<i64> = (0..max_len).map(|j| steps.offset(j)).collect();
    let coords: Vec<i64> = {
        let set: BTreeSet<i64> = offsets.iter().flat_map(|&k| (k - r)..=(k + r)).collect();
        set.into_iter().collect()
    };
    let index: BTreeMap<i64, usize> = coords.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let points: Vec<Vec<u16>> = target.words(&coords).into_iter().collect();
    let itinerary = |w: &Vec<u16>, m: usize| -> Vec<u16> {
        offsets[..m].iter().flat_map(|&k| ((k - r)..=(k + r)).map(|c| w[index[&c]])).collect()
    };
    let mut best: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for &m in lens {
        let mut groups: BTreeMap<Vec<u16>, Vec<usize>> = BTreeMap::new();
        for (i, w) in points.iter().enumerate() {
            groups.entry(itinerary(w, m)).or_default().push(i);
        }
        for set in groups.into_values() {
            let e = best.entry(set).or_insert(m);
            *e = (*e).max(m);
        }
    }
    (points.len(), best.into_iter().collect())
}

/// Minimum of `Σ exp(-α m)` over all covering subfamilies.
pub fn exhaustive_min(universe: usize, sets: &[(Vec<usize>, usize)], alpha: f64) -> f64 {
    assert!(sets.len() <= 20, "exhaustive search over {} sets", sets.len());
    let full: u128 = if universe == 128 { u128::MAX } else { (1u128 << universe) - 1 };
    assert!(universe <= 128);
    let masks: Vec<u128> = sets.iter().map(|(s, _)| s.iter().fold(0u128, |a, &i| a | 1 << i)).collect();
    let mut best = f64::INFINITY;
    for subset in 1u32..(1 << sets.len()) {
        let mut cover = 0u128;
        let mut weights = Vec::new();
        for (i, mask) in masks.iter().enumerate() {
            if subset >> i & 1 == 1 {
                cover |= mask;
                weights.push((-alpha * sets[i].1 as f64).exp());
            }
        }
        if cover == full {
            best = best.min(compensated_sum(weights));
        }
    }
    best
}

/// Exhaustive optimum of an explicit instance with its own cost function.
pub fn instance_min(inst: &CoverInstance) -> Option<(f64, Vec<usize>)> {
    let k = inst.candidates().len();
    assert!(k <= 20);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for subset in 0u32..(1 << k) {
        let chosen: Vec<usize> = (0..k).filter(|i| subset >> i & 1 == 1).collect();
        if inst.covers(&chosen) {
            let c = inst.cost(&chosen);
            if best.as_ref().is_none_or(|(b, _)| c < *b) {
                best = Some((c, chosen));
            }
        }
    }
    best
}

/// A feasible random instance: `1..=max_universe` points, `1..=max_sets`
/// candidates of length `1..=6`, every point covered by some candidate.
pub fn random_sets(rng: &mut impl rand::Rng, max_universe: usize, max_sets: usize) -> (usize, Vec<(Vec<usize>, usize)>) {
    let universe = rng.gen_range(1..=max_universe);
    let count = rng.gen_range(1..=max_sets);
    let mut sets: Vec<(Vec<usize>, usize)> = (0..count)
        .map(|_| {
            let members: Vec<usize> = (0..universe).filter(|_| rng.gen_bool(0.35)).collect();
            (members, rng.gen_range(1..=6))
        })
        .collect();
    // patch uncovered points into random candidates
    for p in 0..universe {
        if !sets.iter().any(|(s, _)| s.contains(&p)) {
            let i = rng.gen_range(0..sets.len());
            sets[i].0.push(p);
        }
    }
    for (s, _) in &mut sets {
        s.sort_unstable();
    }
    (universe, sets)
}
