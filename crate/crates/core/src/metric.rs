//! Finite metric spaces with a sequence of self-maps.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::cover::{cardinality_cover, Candidate, CoverInstance, Provenance};
use crate::error::{Error, Result};

/// Absolute tolerance for validating the distance matrix.
pub const METRIC_TOL: f64 = 1e-12;

/// Default largest point count for which counts are computed exactly.
pub const DEFAULT_EXACT_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteMetricNDS {
    points: usize,
    dist: Vec<f64>,
    preperiod: Vec<Vec<usize>>,
    period: Vec<Vec<usize>>,
}

/// `B_n(center, eps) = {y : d_n(center, y) < eps}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BowenBallSpec {
    pub center: usize,
    pub n: usize,
    pub eps: f64,
}

/// A count together with whether it is exact or a one-sided bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Count {
    pub value: u64,
    pub exact: bool,
}

impl FiniteMetricNDS {
    pub fn new(dist: Vec<Vec<f64>>, preperiod: Vec<Vec<usize>>, period: Vec<Vec<usize>>) -> Result<Self> {
        let p = dist.len();
        if p == 0 {
            return Err(Error::invalid("metric space must have at least one point"));
        }
        if dist.iter().any(|row| row.len() != p) {
            return Err(Error::invalid("distance matrix must be square"));
        }
        for i in 0..p {
            if dist[i][i] != 0.0 {
                return Err(Error::invalid(format!("d({i},{i}) must be 0")));
            }
            for j in 0..p {
                let d = dist[i][j];
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::invalid(format!("d({i},{j}) = {d} is not a nonnegative real")));
                }
                if (d - dist[j][i]).abs() > METRIC_TOL {
                    return Err(Error::invalid(format!("distance not symmetric at ({i},{j})")));
                }
                if let Some(k) = (0..p).find(|&k| d > dist[i][k] + dist[k][j] + METRIC_TOL) {
                    return Err(Error::invalid(format!("triangle inequality fails for ({i},{k},{j})")));
                }
            }
        }
        if period.is_empty() {
            return Err(Error::invalid("map period must be nonempty"));
        }
        for m in preperiod.iter().chain(&period) {
            if m.len() != p || m.iter().any(|&y| y >= p) {
                return Err(Error::invalid(format!("map table must send 0..{p} into 0..{p}")));
            }
        }
        Ok(Self { points: p, dist: dist.concat(), preperiod, period })
    }

    pub fn autonomous(dist: Vec<Vec<f64>>, map: Vec<usize>) -> Result<Self> {
        Self::new(dist, Vec::new(), vec![map])
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn d(&self, x: usize, y: usize) -> f64 {
        self.dist[x * self.points + y]
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// `f_i`, 1-based.
    pub fn map(&self, i: usize) -> &[usize] {
        assert!(i >= 1, "maps are indexed from 1");
        let i = i - 1;
        if i < self.preperiod.len() {
            &self.preperiod[i]
        } else {
            &self.period[(i - self.preperiod.len()) % self.period.len()]
        }
    }

    /// Starting indices whose tails exhaust all tails of the sequence.
    pub fn distinct_starts(&self) -> usize {
        self.preperiod.len() + self.period.len()
    }

    /// `x, f_i x, f_i^2 x, ...` with `n` entries.
    pub fn orbit_from(&self, i: usize, x: usize, n: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(n);
        let mut cur = x;
        for j in 0..n {
            if j > 0 {
                cur = self.map(i + j - 1)[cur];
            }
            out.push(cur);
        }
        out
    }

    fn bowen_from(&self, i: usize, x: usize, y: usize, n: usize) -> f64 {
        let ox = self.orbit_from(i, x, n);
        let oy = self.orbit_from(i, y, n);
        ox.iter().zip(&oy).map(|(&a, &b)| self.d(a, b)).fold(0.0, f64::max)
    }

    /// `d_n(x, y) = max_{j<n} d(f_1^j x, f_1^j y)`.
    pub fn bowen_distance(&self, x: usize, y: usize, n: usize) -> f64 {
        assert!(n >= 1, "n must be >= 1");
        self.bowen_from(1, x, y, n)
    }

    /// `d_n*(x, y)`: the largest Bowen distance over all starting times.
    pub fn sup_metric(&self, x: usize, y: usize, n: usize) -> f64 {
        assert!(n >= 1, "n must be >= 1");
        (1..=self.distinct_starts()).map(|i| self.bowen_from(i, x, y, n)).fold(0.0, f64::max)
    }

    pub fn in_ball(&self, ball: &BowenBallSpec, y: usize) -> bool {
        self.bowen_distance(ball.center, y, ball.n) < ball.eps
    }

    fn check_subset(&self, z: &[usize]) -> Result<()> {
        if z.is_empty() {
            return Err(Error::invalid("point subset must be nonempty"));
        }
        if let Some(&bad) = z.iter().find(|&&y| y >= self.points) {
            return Err(Error::invalid(format!("point {bad} outside the space")));
        }
        Ok(())
    }

    fn cover_count(&self, z: &[usize], within: impl Fn(usize, usize) -> bool, exact_cap: usize, require_exact: bool) -> Result<Count> {
        self.check_subset(z)?;
        if self.points > exact_cap && require_exact {
            return Err(Error::CapExceeded { size: self.points, cap: exact_cap });
        }
        let cands = (0..self.points)
            .map(|x| {
                let mut covered = FixedBitSet::with_capacity(z.len());
                for (k, &y) in z.iter().enumerate() {
                    if within(x, y) {
                        covered.insert(k);
                    }
                }
                Candidate { covered, len: 1, alpha: 0.0, tag: Provenance::Ball { center: x, n: 0, eps: 0.0 } }
            })
            .collect();
        let inst = CoverInstance::new(z.len(), cands).prune_dominated().0;
        if self.points > exact_cap {
            let sol = crate::cover::solve_greedy(&inst)?;
            return Ok(Count { value: sol.chosen.len() as u64, exact: false });
        }
        let (value, exact) = cardinality_cover(&inst, crate::cover::DEFAULT_NODE_BUDGET)?;
        Ok(Count { value, exact })
    }

    /// Minimal number of centers in `X` whose closed `d_n`-balls of radius
    /// `eps` contain `Z`.
    pub fn spanning_count(&self, z: &[usize], n: usize, eps: f64, exact_cap: usize, require_exact: bool) -> Result<Count> {
        self.cover_count(z, |x, y| self.bowen_distance(x, y, n) <= eps, exact_cap, require_exact)
    }

    /// `r_n*`: spanning count for the sup metric.
    pub fn sup_spanning_count(&self, z: &[usize], n: usize, eps: f64, exact_cap: usize, require_exact: bool) -> Result<Count> {
        self.cover_count(z, |x, y| self.sup_metric(x, y, n) <= eps, exact_cap, require_exact)
    }

    /// Largest subset of `Z` with pairwise `d_n > eps`.
    pub fn separated_count(&self, z: &[usize], n: usize, eps: f64, exact_cap: usize, require_exact: bool) -> Result<Count> {
        self.check_subset(z)?;
        let mut pts = z.to_vec();
        pts.sort_unstable();
        pts.dedup();
        let k = pts.len();
        if k > exact_cap && require_exact {
            return Err(Error::CapExceeded { size: k, cap: exact_cap });
        }
        // conflict graph: too close to be separated
        let mut adj = vec![FixedBitSet::with_capacity(k); k];
        for a in 0..k {
            for b in 0..k {
                if a != b && self.bowen_distance(pts[a], pts[b], n) <= eps {
                    adj[a].insert(b);
                }
            }
        }
        if k > exact_cap {
            return Ok(Count { value: greedy_independent(&adj) as u64, exact: false });
        }
        let mut all = FixedBitSet::with_capacity(k);
        all.insert_range(..);
        let mut best = greedy_independent(&adj);
        max_independent(&adj, &all, 0, &mut best);
        Ok(Count { value: best as u64, exact: true })
    }

    /// Rows `(n, eps, r_n*, (1/n) ln r_n*)` for every requested pair.
    pub fn sup_entropy_estimate(&self, z: &[usize], ns: &[usize], eps_list: &[f64], exact_cap: usize) -> Result<Vec<SupEntropyRow>> {
        let mut rows = Vec::new();
        for &eps in eps_list {
            for &n in ns {
                let c = self.sup_spanning_count(z, n, eps, exact_cap, false)?;
                rows.push(SupEntropyRow { n, eps, count: c, value: (c.value as f64).ln() / n as f64 });
            }
        }
        Ok(rows)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupEntropyRow {
    pub n: usize,
    pub eps: f64,
    pub count: Count,
    pub value: f64,
}

fn greedy_independent(adj: &[FixedBitSet]) -> usize {
    let mut alive = FixedBitSet::with_capacity(adj.len());
    alive.insert_range(..);
    let mut size = 0;
    while let Some(v) = alive.ones().min_by_key(|&v| (adj[v].intersection_count(&alive), v)) {
        size += 1;
        alive.set(v, false);
        alive.difference_with(&adj[v]);
    }
    size
}

fn max_independent(adj: &[FixedBitSet], alive: &FixedBitSet, size: usize, best: &mut usize) {
    let left = alive.count_ones(..);
    if size + left <= *best {
        return;
    }
    let Some(v) = alive.ones().next() else {
        *best = size;
        return;
    };
    let mut with = alive.clone();
    with.set(v, false);
    with.difference_with(&adj[v]);
    max_independent(adj, &with, size + 1, best);
    let mut without = alive.clone();
    without.set(v, false);
    max_independent(adj, &without, size, best);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three() -> FiniteMetricNDS {
        let d = vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 2.0], vec![2.0, 2.0, 0.0]];
        FiniteMetricNDS::autonomous(d, vec![1, 2, 2]).unwrap()
    }

    #[test]
    fn rejects_bad_matrices() {
        let asym = vec![vec![0.0, 1.0], vec![2.0, 0.0]];
        assert!(FiniteMetricNDS::autonomous(asym, vec![0, 1]).is_err());
        let tri = vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]];
        assert!(FiniteMetricNDS::autonomous(tri, vec![0, 1, 2]).is_err());
        let ok = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert!(FiniteMetricNDS::autonomous(ok.clone(), vec![0, 2]).is_err());
        assert!(FiniteMetricNDS::autonomous(ok, vec![1, 0]).is_ok());
    }

    #[test]
    fn bowen_distance_examples() {
        let s = three();
        assert_eq!(s.bowen_distance(0, 1, 1), 1.0);
        assert_eq!(s.bowen_distance(0, 1, 2), 2.0);
        assert_eq!(s.bowen_distance(2, 2, 5), 0.0);
        assert!(s.in_ball(&BowenBallSpec { center: 0, n: 1, eps: 1.5 }, 1));
        assert!(!s.in_ball(&BowenBallSpec { center: 0, n: 1, eps: 1.0 }, 1));
    }

    #[test]
    fn spanning_examples() {
        let s = three();
        let all = [0, 1, 2];
        assert_eq!(s.spanning_count(&[1], 3, 0.1, 64, true).unwrap().value, 1);
        assert_eq!(s.spanning_count(&all, 3, s.diameter(), 64, true).unwrap().value, 1);
        // d_2: (0,1) -> 2, (0,2) -> 2, (1,2) -> 2; eps 1.5 separates all three
        let c = s.spanning_count(&all, 2, 1.5, 64, true).unwrap();
        assert_eq!(c, Count { value: 3, exact: true });
        assert!(matches!(s.spanning_count(&all, 2, 1.5, 2, true), Err(Error::CapExceeded { .. })));
        assert!(!s.spanning_count(&all, 2, 1.5, 2, false).unwrap().exact);
    }

    #[test]
    fn separated_examples() {
        let s = three();
        assert_eq!(s.separated_count(&[0], 4, 0.5, 64, true).unwrap().value, 1);
        assert_eq!(s.separated_count(&[0, 1, 2], 1, 0.5, 64, true).unwrap().value, 3);
        assert_eq!(s.separated_count(&[0, 1, 2], 1, 2.0, 64, true).unwrap().value, 1);
    }

    #[test]
    fn sup_metric_examples() {
        let s = three();
        for n in 1..4 {
            assert_eq!(s.sup_metric(0, 1, n), s.bowen_distance(0, 1, n));
        }
        let d = vec![vec![0.0, 1.0, 3.0], vec![1.0, 0.0, 3.0], vec![3.0, 3.0, 0.0]];
        let two = FiniteMetricNDS::new(d, Vec::new(), vec![vec![0, 1, 2], vec![2, 0, 2]]).unwrap();
        // started at f_1: orbit pairs (0,1),(0,1); at f_2: (0,1),(2,0)
        assert_eq!(two.bowen_distance(0, 1, 2), 1.0);
        assert_eq!(two.sup_metric(0, 1, 2), 3.0);
        assert_eq!(two.sup_metric(1, 1, 3), 0.0);
    }

    #[test]
    fn sup_entropy_of_small_sets() {
        let s = three();
        let rows = s.sup_entropy_estimate(&[2], &[1, 2, 3], &[0.5], 64).unwrap();
        assert!(rows.iter().all(|r| r.value == 0.0));
        let rows = s.sup_entropy_estimate(&[0, 2], &[1, 2, 4], &[0.5], 64).unwrap();
        let vals: Vec<f64> = rows.iter().map(|r| r.value).collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
        assert!((vals[0] - std::f64::consts::LN_2).abs() < 1e-15);
    }
}
