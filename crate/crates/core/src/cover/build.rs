use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::exact::DEFAULT_NODE_BUDGET;
use super::instance::{Candidate, CoverInstance, Provenance};
use super::window::LengthWindow;
use crate::error::{Error, Result};
use crate::metric::{BowenBallSpec, FiniteMetricNDS, DEFAULT_EXACT_CAP};
use crate::symbolic::{CoverString, MapSpec, Symbol, SymbolicNDS, TargetSet, DEFAULT_COMPOSITION_CAP, DEFAULT_TABLE_CAP};

/// Resource limits shared by builders and solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Caps {
    pub universe: usize,
    pub candidates: usize,
    pub nodes: u64,
    pub exact_points: usize,
    /// Length cap for `θ = 0` is this factor times the largest `N`.
    pub theta0_cap_factor: usize,
    pub composition: usize,
    pub table: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            universe: 1 << 20,
            candidates: 1 << 16,
            nodes: DEFAULT_NODE_BUDGET,
            exact_points: DEFAULT_EXACT_CAP,
            theta0_cap_factor: 4,
            composition: DEFAULT_COMPOSITION_CAP,
            table: DEFAULT_TABLE_CAP,
        }
    }
}

impl Caps {
    pub fn validate(&self) -> Result<()> {
        let all = [self.universe, self.candidates, self.exact_points, self.theta0_cap_factor, self.composition, self.table];
        if all.contains(&0) || self.nodes == 0 {
            return Err(Error::invalid("caps must be positive"));
        }
        Ok(())
    }
}

/// Encoded radius-`r` cover elements visited by each universe point over
/// `len` steps, one row per point of `project_universe`.
#[derive(Debug, Clone, PartialEq)]
pub struct Itineraries {
    pub coords: Vec<i64>,
    pub words: Vec<Vec<Symbol>>,
    pub codes: Vec<Vec<u32>>,
    pub radius: u32,
    pub alphabet: usize,
}

impl Itineraries {
    pub fn compute(system: &SymbolicNDS, z: &TargetSet, r: u32, len: usize, caps: &Caps) -> Result<Self> {
        let alphabet = system.alphabet();
        z.check_alphabet(alphabet)?;
        let width = 2 * r + 1;
        if (alphabet.size() as u128).checked_pow(width).is_none_or(|v| v > u32::MAX as u128 + 1) {
            return Err(Error::invalid(format!("radius {r} too large to encode cover elements")));
        }
        if !system.is_shift_system() && len > caps.composition {
            return Err(Error::CompositionTooDeep { depth: len, cap: caps.composition });
        }
        let coords = system.dependence_coords(len, r);
        let words = z.project(&coords, alphabet, caps.universe)?;
        let codes = if system.is_shift_system() {
            let offsets = system.cumulative_offsets(len.saturating_sub(1))?;
            let pos: BTreeMap<i64, usize> = coords.iter().enumerate().map(|(i, &c)| (c, i)).collect();
            let slots: Vec<Vec<usize>> = offsets
                .iter()
                .map(|&k| (-(r as i64)..=r as i64).map(|t| pos[&(k + t)]).collect())
                .collect();
            words.iter().map(|w| slots.iter().map(|s| encode(s.iter().map(|&i| w[i]), alphabet.size())).collect()).collect()
        } else {
            words.iter().map(|w| block_itinerary(system, &coords, w, r, len)).collect()
        };
        Ok(Self { coords, words, codes, radius: r, alphabet: alphabet.size() })
    }

    pub fn decode(&self, code: u32) -> Vec<Symbol> {
        let w = 2 * self.radius as usize + 1;
        let mut out = vec![0 as Symbol; w];
        let mut rem = code as usize;
        for slot in out.iter_mut().rev() {
            *slot = (rem % self.alphabet) as Symbol;
            rem /= self.alphabet;
        }
        out
    }

    pub fn string(&self, prefix: &[u32]) -> Result<CoverString> {
        CoverString::new(self.radius, prefix.iter().map(|&c| self.decode(c)).collect())
    }
}

fn encode(symbols: impl Iterator<Item = Symbol>, base: usize) -> u32 {
    symbols.fold(0u32, |acc, s| acc * base as u32 + s as u32)
}

/// Itinerary of a point given on `coords` under a system with block codes,
/// evaluated on the coordinate hull; coordinates outside `coords` never
/// influence the observed windows.
fn block_itinerary(system: &SymbolicNDS, coords: &[i64], word: &[Symbol], r: u32, len: usize) -> Vec<u32> {
    let base = system.alphabet().size();
    let (mut lo, hi) = (coords[0], *coords.last().unwrap());
    let mut cur = vec![0 as Symbol; (hi - lo + 1) as usize];
    for (&c, &s) in coords.iter().zip(word) {
        cur[(c - lo) as usize] = s;
    }
    let r = r as i64;
    let mut out = Vec::with_capacity(len);
    for j in 0..len {
        if j > 0 {
            let (a, b) = system.map(j).window();
            let new_lo = lo - a;
            let new_len = cur.len() as i64 - (b - a);
            let next: Vec<Symbol> = (0..new_len.max(0))
                .map(|i| {
                    let n = new_lo + i;
                    let at = |c: i64| cur[(c - lo) as usize];
                    match system.map(j) {
                        MapSpec::ShiftPower(k) => at(n + *k as i64),
                        MapSpec::BlockCode(code) => {
                            let w: Vec<Symbol> = (a..=b).map(|o| at(n + o)).collect();
                            code.lookup(&w)
                        }
                    }
                })
                .collect();
            cur = next;
            lo = new_lo;
        }
        out.push(encode((-r..=r).map(|t| cur[(t - lo) as usize]), base));
    }
    out
}

/// The weighted set-cover instance for `M(Z, α, U_r, N, θ)`; universe
/// points are the projections of `Z` onto the dependence coordinates.
pub fn build_symbolic_instance(
    system: &SymbolicNDS,
    z: &TargetSet,
    r: u32,
    window: &LengthWindow,
    alpha: f64,
    caps: &Caps,
) -> Result<CoverInstance> {
    if alpha < 0.0 {
        return Err(Error::invalid("alpha must be >= 0"));
    }
    let lens = window.allowed_lengths()?;
    let its = Itineraries::compute(system, z, r, *lens.end(), caps)?;
    let u = its.words.len();
    let mut cands = Vec::new();
    for m in lens {
        let mut groups: BTreeMap<&[u32], FixedBitSet> = BTreeMap::new();
        for (i, code) in its.codes.iter().enumerate() {
            groups.entry(&code[..m]).or_insert_with(|| FixedBitSet::with_capacity(u)).insert(i);
        }
        if cands.len() + groups.len() > caps.candidates {
            return Err(Error::CandidateBudgetExceeded { count: cands.len() + groups.len(), cap: caps.candidates });
        }
        for (prefix, covered) in groups {
            cands.push(Candidate { covered, len: m, alpha, tag: Provenance::String(its.string(prefix)?) });
        }
    }
    Ok(CoverInstance::new(u, cands).prune_dominated().0)
}

/// Cover instance by Bowen balls `B_n(x, eps)`, `x ∈ X`, `n` admissible.
pub fn build_metric_instance(
    sys: &FiniteMetricNDS,
    z: &[usize],
    eps: f64,
    window: &LengthWindow,
    alpha: f64,
    caps: &Caps,
) -> Result<CoverInstance> {
    if z.is_empty() {
        return Err(Error::invalid("point subset must be nonempty"));
    }
    if let Some(&bad) = z.iter().find(|&&y| y >= sys.points()) {
        return Err(Error::invalid(format!("point {bad} outside the space")));
    }
    if alpha < 0.0 {
        return Err(Error::invalid("alpha must be >= 0"));
    }
    let lens = window.allowed_lengths()?;
    let count = sys.points() * lens.clone().count();
    if count > caps.candidates {
        return Err(Error::CandidateBudgetExceeded { count, cap: caps.candidates });
    }
    let mut cands = Vec::with_capacity(count);
    for n in lens {
        for center in 0..sys.points() {
            let ball = BowenBallSpec { center, n, eps };
            let mut covered = FixedBitSet::with_capacity(z.len());
            for (k, &y) in z.iter().enumerate() {
                if sys.in_ball(&ball, y) {
                    covered.insert(k);
                }
            }
            cands.push(Candidate { covered, len: n, alpha, tag: Provenance::Ball { center, n, eps } });
        }
    }
    let inst = CoverInstance::new(z.len(), cands).prune_dominated().0;
    if !inst.is_feasible() {
        return Err(Error::Infeasible);
    }
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{solve_exact, Theta};
    use crate::symbolic::{Alphabet, BlockCode};

    fn win(n: usize, t: &str) -> LengthWindow {
        LengthWindow::new(n, t.parse::<Theta>().unwrap(), None).unwrap()
    }

    #[test]
    fn full_shift_instance() {
        let sys = SymbolicNDS::full_shift(2).unwrap();
        let inst = build_symbolic_instance(&sys, &TargetSet::WholeSpace, 0, &win(3, "1"), 0.5, &Caps::default()).unwrap();
        assert_eq!(inst.universe(), 8);
        assert_eq!(inst.candidates().len(), 8);
        assert!(inst.candidates().iter().all(|c| c.covered.count_ones(..) == 1));
        let s = solve_exact(&inst.with_alpha(std::f64::consts::LN_2), 1000).unwrap();
        assert!(s.exact);
        assert!((s.value_hi - 1.0).abs() < 1e-15);
    }

    #[test]
    fn family_instance() {
        let sys = SymbolicNDS::two_shift_example();
        let z = TargetSet::family(1, 2);
        let inst = build_symbolic_instance(&sys, &z, 0, &win(4, "1"), 0.0, &Caps::default()).unwrap();
        assert_eq!(inst.universe(), 2);
        assert_eq!(inst.candidates().len(), 2);
        for c in inst.candidates() {
            let Provenance::String(s) = &c.tag else { panic!("missing tag") };
            assert_eq!(&s.words()[1..], &[vec![1], vec![1], vec![1]]);
        }
    }

    #[test]
    fn block_itinerary_matches_orbit() {
        let a = Alphabet::new(2).unwrap();
        let xor = MapSpec::BlockCode(BlockCode::new(a, 0, 1, vec![0, 1, 1, 0]).unwrap());
        let sys = SymbolicNDS::new(a, vec![MapSpec::ShiftPower(2)], vec![xor, MapSpec::ShiftPower(1)]).unwrap();
        let its = Itineraries::compute(&sys, &TargetSet::WholeSpace, 1, 4, &Caps::default()).unwrap();
        for (w, code) in its.words.iter().zip(&its.codes).step_by(37) {
            let x = TargetSet::WholeSpace.lift(&its.coords, w, a);
            let want: Vec<u32> = sys
                .itinerary(&x, 4, 1)
                .iter()
                .map(|e| encode(e.iter().copied(), 2))
                .collect();
            assert_eq!(code, &want);
        }
    }

    #[test]
    fn metric_instance() {
        let d = vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 2.0], vec![2.0, 2.0, 0.0]];
        let sys = FiniteMetricNDS::autonomous(d, vec![1, 2, 2]).unwrap();
        let inst = build_metric_instance(&sys, &[0, 1, 2], 10.0, &win(2, "1/2"), 0.3, &Caps::default()).unwrap();
        let s = solve_exact(&inst, 1000).unwrap();
        assert!((s.value_hi - (-0.3f64 * 4.0).exp()).abs() < 1e-15);
    }
}
