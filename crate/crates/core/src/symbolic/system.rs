use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::map::{BlockCode, MapSpec, DEFAULT_TABLE_CAP};
use super::point::{Alphabet, Symbol, TailedPoint};
use crate::error::{Error, Result};

/// Default cap on the number of block-code compositions evaluated per orbit.
pub const DEFAULT_COMPOSITION_CAP: usize = 64;

/// A sequence of maps `f_1, f_2, ...` on a two-sided shift space, given as a
/// finite preperiod followed by a repeating period.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymbolicNDS {
    alphabet: Alphabet,
    preperiod: Vec<MapSpec>,
    period: Vec<MapSpec>,
}

impl SymbolicNDS {
    pub fn new(alphabet: Alphabet, preperiod: Vec<MapSpec>, period: Vec<MapSpec>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::invalid("map period must be nonempty"));
        }
        for m in preperiod.iter().chain(&period) {
            m.check_alphabet(alphabet)?;
        }
        Ok(Self { alphabet, preperiod, period })
    }

    /// Autonomous system iterating a single map.
    pub fn autonomous(alphabet: Alphabet, map: MapSpec) -> Result<Self> {
        Self::new(alphabet, Vec::new(), vec![map])
    }

    /// Shift-power system from explicit steps.
    pub fn shifts(alphabet: Alphabet, preperiod: &[u32], period: &[u32]) -> Result<Self> {
        let pre = preperiod.iter().map(|&k| MapSpec::shift(k)).collect::<Result<Vec<_>>>()?;
        let per = period.iter().map(|&k| MapSpec::shift(k)).collect::<Result<Vec<_>>>()?;
        Self::new(alphabet, pre, per)
    }

    /// `f_1 = σ_2`, `f_i = σ` for `i > 1`, on two symbols.
    pub fn two_shift_example() -> Self {
        Self::shifts(Alphabet::new(2).unwrap(), &[2], &[1]).unwrap()
    }

    pub fn full_shift(size: usize) -> Result<Self> {
        Self::shifts(Alphabet::new(size)?, &[], &[1])
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn preperiod(&self) -> &[MapSpec] {
        &self.preperiod
    }

    pub fn period(&self) -> &[MapSpec] {
        &self.period
    }

    /// `f_i`, 1-based.
    pub fn map(&self, i: usize) -> &MapSpec {
        assert!(i >= 1, "maps are indexed from 1");
        let i = i - 1;
        if i < self.preperiod.len() {
            &self.preperiod[i]
        } else {
            &self.period[(i - self.preperiod.len()) % self.period.len()]
        }
    }

    pub fn is_shift_system(&self) -> bool {
        self.preperiod.iter().chain(&self.period).all(MapSpec::is_shift)
    }

    pub fn is_autonomous(&self) -> bool {
        let first = self.map(1);
        self.preperiod.iter().chain(&self.period).all(|m| m == first)
    }

    /// `K_0 = 0`, `K_j = k_1 + ... + k_j`, so that `f_1^j = σ^{K_j}`.
    pub fn cumulative_offsets(&self, j_max: usize) -> Result<Vec<i64>> {
        let mut out = Vec::with_capacity(j_max + 1);
        out.push(0i64);
        for j in 1..=j_max {
            match self.map(j) {
                MapSpec::ShiftPower(k) => {
                    let last = *out.last().unwrap();
                    out.push(last + *k as i64);
                }
                MapSpec::BlockCode(_) => return Err(Error::NotShiftSystem),
            }
        }
        Ok(out)
    }

    /// Input window read by coordinate 0 of `f_1^j x`, for `j = 0..j_max`.
    pub fn composed_windows(&self, j_max: usize) -> Vec<(i64, i64)> {
        let mut out = Vec::with_capacity(j_max + 1);
        let (mut lo, mut hi) = (0i64, 0i64);
        out.push((lo, hi));
        for j in 1..=j_max {
            let (a, b) = self.map(j).window();
            lo += a;
            hi += b;
            out.push((lo, hi));
        }
        out
    }

    pub fn string_constraint(&self, s: &CoverString) -> Result<CylinderConstraint> {
        let offsets = self.cumulative_offsets(s.len().saturating_sub(1))?;
        let r = s.radius() as i64;
        let mut map = BTreeMap::new();
        for (j, word) in s.words().iter().enumerate() {
            for t in -r..=r {
                let c = offsets[j] + t;
                let sym = word[(t + r) as usize];
                match map.insert(c, sym) {
                    Some(prev) if prev != sym => return Ok(CylinderConstraint::Empty),
                    _ => {}
                }
            }
        }
        Ok(CylinderConstraint::Partial(map))
    }

    /// Orbit `x, f_1 x, ..., f_1^{m-1} x`.
    pub fn orbit(&self, x: &TailedPoint, m: usize) -> Vec<TailedPoint> {
        let mut out = Vec::with_capacity(m);
        let mut cur = x.clone();
        for j in 0..m {
            if j > 0 {
                cur = self.map(j).apply(&cur);
            }
            out.push(cur.clone());
        }
        out
    }

    pub fn point_in_string(&self, x: &TailedPoint, s: &CoverString) -> bool {
        let r = s.radius() as i64;
        let mut cur = x.clone();
        for (j, word) in s.words().iter().enumerate() {
            if j > 0 {
                cur = self.map(j).apply(&cur);
            }
            if (-r..=r).any(|t| cur.coord(t) != word[(t + r) as usize]) {
                return false;
            }
        }
        true
    }

    /// The cover elements visited by `x` at radius `r` for `m` steps.
    pub fn itinerary(&self, x: &TailedPoint, m: usize, r: u32) -> Vec<Vec<Symbol>> {
        let r = r as i64;
        self.orbit(x, m).iter().map(|y| (-r..=r).map(|t| y.coord(t)).collect()).collect()
    }

    /// Coordinates on which membership in any string of length `<= m_max`
    /// at radius `r` depends, in ascending order.
    pub fn dependence_coords(&self, m_max: usize, r: u32) -> Vec<i64> {
        let r = r as i64;
        let mut set = BTreeSet::new();
        for &(lo, hi) in self.composed_windows(m_max.saturating_sub(1)).iter() {
            for c in (lo - r)..=(hi + r) {
                set.insert(c);
            }
        }
        set.into_iter().collect()
    }

    /// Coordinates constrained by strings of length exactly `m`, grouped by
    /// the step at which they first appear: `groups[j]` lists the coordinates
    /// of `C_{j+1} \ C_j`. Shift systems only.
    pub fn new_coords_per_step(&self, m: usize, r: u32) -> Result<Vec<Vec<i64>>> {
        let offsets = self.cumulative_offsets(m.saturating_sub(1))?;
        let r = r as i64;
        let mut seen = BTreeSet::new();
        let mut groups = Vec::with_capacity(m);
        for &k in offsets.iter().take(m) {
            let fresh: Vec<i64> = ((k - r)..=(k + r)).filter(|c| seen.insert(*c)).collect();
            groups.push(fresh);
        }
        Ok(groups)
    }

    /// Componentwise product `(f_i × g_i)` over the product alphabet, with
    /// symbol `(a, b)` encoded as `a * |B| + b`.
    pub fn product(&self, other: &SymbolicNDS) -> Result<SymbolicNDS> {
        let a1 = self.alphabet.size();
        let a2 = other.alphabet.size();
        let alphabet = Alphabet::new(a1 * a2)?;
        let p1 = self.preperiod.len();
        let p2 = other.preperiod.len();
        let q1 = self.period.len();
        let q2 = other.period.len();
        let pre_len = p1.max(p2);
        let per_len = lcm(q1, q2);
        let mut maps = Vec::with_capacity(pre_len + per_len);
        for i in 1..=(pre_len + per_len) {
            maps.push(product_map(self.map(i), other.map(i), a1, a2, alphabet)?);
        }
        let period = maps.split_off(pre_len);
        SymbolicNDS::new(alphabet, maps, period)
    }

    /// `f^m_{1,∞}`: the i-th map is `f_{im+m} ∘ ... ∘ f_{im+1}`.
    pub fn power(&self, m: usize) -> Result<SymbolicNDS> {
        if m == 0 {
            return Err(Error::invalid("power must be >= 1"));
        }
        if m == 1 {
            return Ok(self.clone());
        }
        let p = self.preperiod.len();
        let q = self.period.len();
        let pre_len = p.div_ceil(m);
        let per_len = q / gcd(q, m);
        let mut maps = Vec::with_capacity(pre_len + per_len);
        for i in 0..(pre_len + per_len) {
            let mut acc = self.map(i * m + 1).clone();
            for step in 2..=m {
                acc = acc.then(self.map(i * m + step), self.alphabet, DEFAULT_TABLE_CAP)?;
            }
            maps.push(acc);
        }
        let period = maps.split_off(pre_len);
        SymbolicNDS::new(self.alphabet, maps, period)
    }

    /// `f_{k,∞} = (f_k, f_{k+1}, ...)`.
    pub fn tail(&self, k: usize) -> Result<SymbolicNDS> {
        if k == 0 {
            return Err(Error::invalid("tail index must be >= 1"));
        }
        let drop = k - 1;
        if drop <= self.preperiod.len() {
            return SymbolicNDS::new(self.alphabet, self.preperiod[drop..].to_vec(), self.period.clone());
        }
        let rot = (drop - self.preperiod.len()) % self.period.len();
        let mut period = self.period[rot..].to_vec();
        period.extend_from_slice(&self.period[..rot]);
        SymbolicNDS::new(self.alphabet, Vec::new(), period)
    }

    /// Conjugate by a symbol permutation. Shift powers commute with every
    /// relabeling, so only block-code tables change.
    pub fn relabel(&self, perm: &Relabeling) -> Result<SymbolicNDS> {
        if perm.size() != self.alphabet.size() {
            return Err(Error::invalid("permutation size does not match alphabet"));
        }
        let conj = |v: &[MapSpec]| v.iter().map(|m| m.conjugate(&perm.forward, &perm.inverse)).collect();
        SymbolicNDS::new(self.alphabet, conj(&self.preperiod), conj(&self.period))
    }

    /// Largest shift step, or `None` if any map is a block code.
    pub fn max_step(&self) -> Option<u32> {
        self.preperiod
            .iter()
            .chain(&self.period)
            .map(|m| match m {
                MapSpec::ShiftPower(k) => Some(*k),
                MapSpec::BlockCode(_) => None,
            })
            .try_fold(0u32, |acc, k| k.map(|k| acc.max(k)))
    }
}

fn product_map(f: &MapSpec, g: &MapSpec, a1: usize, a2: usize, alphabet: Alphabet) -> Result<MapSpec> {
    if let (MapSpec::ShiftPower(k1), MapSpec::ShiftPower(k2)) = (f, g) {
        if k1 == k2 {
            return Ok(MapSpec::ShiftPower(*k1));
        }
    }
    let (lo1, hi1) = f.window();
    let (lo2, hi2) = g.window();
    let (lo, hi) = (lo1.min(lo2), hi1.max(hi2));
    let code = BlockCode::tabulate(alphabet, lo, hi, DEFAULT_TABLE_CAP, |word| {
        let first: Vec<Symbol> = (lo1..=hi1).map(|c| word[(c - lo) as usize] / a2 as Symbol).collect();
        let second: Vec<Symbol> = (lo2..=hi2).map(|c| word[(c - lo) as usize] % a2 as Symbol).collect();
        let x = match f {
            MapSpec::ShiftPower(_) => first[0],
            MapSpec::BlockCode(b) => b.lookup(&first),
        };
        let y = match g {
            MapSpec::ShiftPower(_) => second[0],
            MapSpec::BlockCode(b) => b.lookup(&second),
        };
        debug_assert!((x as usize) < a1);
        x * a2 as Symbol + y
    })?;
    Ok(MapSpec::BlockCode(code))
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// A string `(U_0, ..., U_{m-1})` over the radius-`r` cylinder cover.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CoverString {
    radius: u32,
    words: Vec<Vec<Symbol>>,
}

impl CoverString {
    pub fn new(radius: u32, words: Vec<Vec<Symbol>>) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::invalid("cover string must have length >= 1"));
        }
        let w = 2 * radius as usize + 1;
        if let Some(bad) = words.iter().find(|word| word.len() != w) {
            return Err(Error::invalid(format!("cover word {bad:?} must have {w} symbols")));
        }
        Ok(Self { radius, words })
    }

    /// Radius-0 string from single symbols.
    pub fn symbols(word: &[Symbol]) -> Result<Self> {
        Self::new(0, word.iter().map(|&s| vec![s]).collect())
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn words(&self) -> &[Vec<Symbol>] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Initial truncation of length `k`; its set contains this string's set.
    pub fn prefix(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.len() {
            return Err(Error::invalid(format!("prefix length {k} out of range 1..={}", self.len())));
        }
        Ok(Self { radius: self.radius, words: self.words[..k].to_vec() })
    }
}

/// The set `X(U)` of a string under a shift-power system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CylinderConstraint {
    Empty,
    Partial(BTreeMap<i64, Symbol>),
}

impl CylinderConstraint {
    pub fn is_satisfied_by(&self, x: &TailedPoint) -> bool {
        match self {
            CylinderConstraint::Empty => false,
            CylinderConstraint::Partial(m) => m.iter().all(|(&n, &s)| x.coord(n) == s),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, CylinderConstraint::Empty)
    }
}

/// A symbol permutation together with its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relabeling {
    forward: Vec<Symbol>,
    inverse: Vec<Symbol>,
}

impl Relabeling {
    pub fn new(forward: Vec<Symbol>) -> Result<Self> {
        let n = forward.len();
        let mut inverse = vec![Symbol::MAX; n];
        for (i, &s) in forward.iter().enumerate() {
            if (s as usize) >= n || inverse[s as usize] != Symbol::MAX {
                return Err(Error::invalid(format!("{forward:?} is not a permutation")));
            }
            inverse[s as usize] = i as Symbol;
        }
        Ok(Self { forward, inverse })
    }

    pub fn identity(n: usize) -> Self {
        let forward: Vec<Symbol> = (0..n as Symbol).collect();
        Self { inverse: forward.clone(), forward }
    }

    pub fn swap01() -> Self {
        Self::new(vec![1, 0]).unwrap()
    }

    pub fn size(&self) -> usize {
        self.forward.len()
    }

    pub fn apply(&self, s: Symbol) -> Symbol {
        self.forward[s as usize]
    }

    pub fn forward(&self) -> &[Symbol] {
        &self.forward
    }

    pub fn then(&self, next: &Relabeling) -> Relabeling {
        Relabeling::new(self.forward.iter().map(|&s| next.apply(s)).collect()).unwrap()
    }

    pub fn point(&self, x: &TailedPoint) -> TailedPoint {
        x.map_symbols(|s| self.apply(s))
    }

    /// The permutation as a width-1 block code.
    pub fn as_block_code(&self, alphabet: Alphabet) -> Result<MapSpec> {
        Ok(MapSpec::BlockCode(BlockCode::new(alphabet, 0, 0, self.forward.clone())?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    #[test]
    fn offsets_for_two_shift_example() {
        let sys = SymbolicNDS::two_shift_example();
        assert_eq!(sys.cumulative_offsets(4).unwrap(), vec![0, 2, 3, 4, 5]);
        let sigma = SymbolicNDS::full_shift(2).unwrap();
        assert_eq!(sigma.cumulative_offsets(3).unwrap(), vec![0, 1, 2, 3]);
        let s = SymbolicNDS::shifts(two(), &[3], &[1]).unwrap();
        assert_eq!(s.cumulative_offsets(2).unwrap(), vec![0, 3, 4]);
        for (j, k) in sys.cumulative_offsets(30).unwrap().iter().enumerate().skip(1) {
            assert_eq!(*k, j as i64 + 1);
        }
    }

    #[test]
    fn offsets_reject_block_codes() {
        let xor = BlockCode::new(two(), 0, 1, vec![0, 1, 1, 0]).unwrap();
        let sys = SymbolicNDS::autonomous(two(), MapSpec::BlockCode(xor)).unwrap();
        assert_eq!(sys.cumulative_offsets(2), Err(Error::NotShiftSystem));
        let s = CoverString::symbols(&[0, 1]).unwrap();
        assert_eq!(sys.string_constraint(&s), Err(Error::NotShiftSystem));
    }

    #[test]
    fn constraint_examples() {
        let sys = SymbolicNDS::two_shift_example();
        let s = CoverString::symbols(&[0, 1, 1]).unwrap();
        let c = sys.string_constraint(&s).unwrap();
        let want: BTreeMap<i64, Symbol> = [(0, 0), (2, 1), (3, 1)].into_iter().collect();
        assert_eq!(c, CylinderConstraint::Partial(want));

        let sigma = SymbolicNDS::full_shift(2).unwrap();
        let c = sigma.string_constraint(&CoverString::symbols(&[1, 0]).unwrap()).unwrap();
        let want: BTreeMap<i64, Symbol> = [(0, 1), (1, 0)].into_iter().collect();
        assert_eq!(c, CylinderConstraint::Partial(want));

        // σ² at radius 1: windows {-1,0,1} and {1,2,3} share coordinate 1
        let sigma2 = SymbolicNDS::shifts(two(), &[], &[2]).unwrap();
        let s = CoverString::new(1, vec![vec![0, 0, 1], vec![0, 1, 1]]).unwrap();
        assert!(sigma2.string_constraint(&s).unwrap().is_empty());
        let s = CoverString::new(1, vec![vec![0, 0, 1], vec![1, 1, 1]]).unwrap();
        assert!(!sigma2.string_constraint(&s).unwrap().is_empty());
    }

    #[test]
    fn point_in_string_examples() {
        let sys = SymbolicNDS::two_shift_example();
        let ones = TailedPoint::constant(1);
        assert!(sys.point_in_string(&ones, &CoverString::symbols(&[1, 1, 1]).unwrap()));
        assert!(!sys.point_in_string(&ones, &CoverString::symbols(&[1, 0, 1]).unwrap()));
        let x = TailedPoint::new(1, 1, vec![0, 1], 0);
        assert!(sys.point_in_string(&x, &CoverString::symbols(&[0, 1, 1]).unwrap()));
    }

    #[test]
    fn dependence_coord_examples() {
        assert_eq!(SymbolicNDS::two_shift_example().dependence_coords(5, 0), vec![0, 2, 3, 4, 5]);
        assert_eq!(SymbolicNDS::full_shift(2).unwrap().dependence_coords(4, 0), vec![0, 1, 2, 3]);
        let sigma2 = SymbolicNDS::shifts(two(), &[], &[2]).unwrap();
        assert_eq!(sigma2.dependence_coords(3, 1), (-1..=5).collect::<Vec<_>>());
    }

    #[test]
    fn product_examples() {
        let s = SymbolicNDS::full_shift(2).unwrap();
        let p = s.product(&s).unwrap();
        assert_eq!(p.alphabet().size(), 4);
        assert_eq!(p.period(), &[MapSpec::ShiftPower(1)]);
        let e = SymbolicNDS::two_shift_example();
        let pe = e.product(&e).unwrap();
        assert_eq!(pe.cumulative_offsets(3).unwrap(), vec![0, 2, 3, 4]);
        let s2 = SymbolicNDS::shifts(two(), &[], &[2]).unwrap();
        let mixed = s.product(&s2).unwrap();
        assert!(!mixed.is_shift_system());
        // componentwise action
        let x = TailedPoint::new(0, 0, vec![1, 2, 3, 1], 0);
        let y = mixed.map(1).apply(&x);
        for n in -3..6 {
            let a = x.coord(n + 1) / 2;
            let b = x.coord(n + 2) % 2;
            assert_eq!(y.coord(n), a * 2 + b);
        }
    }

    #[test]
    fn power_examples() {
        let s = SymbolicNDS::full_shift(2).unwrap();
        assert_eq!(s.power(2).unwrap(), SymbolicNDS::shifts(two(), &[], &[2]).unwrap());
        let e = SymbolicNDS::two_shift_example();
        let p = e.power(2).unwrap();
        assert_eq!(p.cumulative_offsets(3).unwrap(), vec![0, 3, 5, 7]);
        assert_eq!(e.power(1).unwrap(), e);
        let periodic = SymbolicNDS::shifts(two(), &[], &[1, 2, 3]).unwrap();
        let p2 = periodic.power(2).unwrap();
        // blocks (1,2),(3,1),(2,3),(1,2),...
        assert_eq!(p2.cumulative_offsets(4).unwrap(), vec![0, 3, 7, 12, 15]);
    }

    #[test]
    fn tail_examples() {
        let e = SymbolicNDS::two_shift_example();
        assert_eq!(e.tail(2).unwrap(), SymbolicNDS::full_shift(2).unwrap());
        assert_eq!(e.tail(1).unwrap(), e);
        let periodic = SymbolicNDS::shifts(two(), &[], &[1, 2]).unwrap();
        assert_eq!(periodic.tail(2).unwrap(), SymbolicNDS::shifts(two(), &[], &[2, 1]).unwrap());
        assert_eq!(periodic.tail(3).unwrap(), periodic);
    }

    #[test]
    fn relabel_examples() {
        let three = Alphabet::new(3).unwrap();
        let cyc = Relabeling::new(vec![1, 2, 0]).unwrap();
        let sq = cyc.then(&cyc);
        let x = TailedPoint::new(0, 2, vec![1, 0, 2], -1);
        assert_eq!(sq.point(&x), cyc.point(&cyc.point(&x)));
        let code = BlockCode::tabulate(three, 0, 1, 64, |w| (w[0] + 2 * w[1]) % 3).unwrap();
        let sys = SymbolicNDS::autonomous(three, MapSpec::BlockCode(code)).unwrap();
        assert_eq!(sys.relabel(&sq).unwrap(), sys.relabel(&cyc).unwrap().relabel(&cyc).unwrap());
        assert_eq!(sys.relabel(&Relabeling::identity(3)).unwrap(), sys);
        // conjugated map commutes with relabeling of points
        let conj = sys.relabel(&cyc).unwrap();
        assert_eq!(conj.map(1).apply(&cyc.point(&x)), cyc.point(&sys.map(1).apply(&x)));
    }
}
