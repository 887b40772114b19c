use serde::{Deserialize, Serialize};

use super::point::{Alphabet, Symbol, TailedPoint};
use crate::error::{Error, Result};

/// Default cap on the number of entries of a tabulated block code.
pub const DEFAULT_TABLE_CAP: usize = 1 << 22;

/// Sliding-block code: `(F x)_n = table[x_{n+lo} .. x_{n+hi}]`.
///
/// Words are indexed in base `alphabet` with the first symbol most significant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockCode {
    lo: i64,
    hi: i64,
    alphabet: usize,
    table: Vec<Symbol>,
}

impl BlockCode {
    pub fn new(alphabet: Alphabet, lo: i64, hi: i64, table: Vec<Symbol>) -> Result<Self> {
        if hi < lo {
            return Err(Error::invalid(format!("block window [{lo}, {hi}] is empty")));
        }
        let width = (hi - lo + 1) as u32;
        let entries = (alphabet.size() as u128).checked_pow(width).unwrap_or(u128::MAX);
        if entries != table.len() as u128 {
            return Err(Error::invalid(format!(
                "block table has {} entries, window of width {width} over {} symbols needs {entries}",
                table.len(),
                alphabet.size()
            )));
        }
        if let Some(&bad) = table.iter().find(|&&s| !alphabet.contains(s)) {
            return Err(Error::invalid(format!("block table emits symbol {bad} outside alphabet")));
        }
        Ok(Self { lo, hi, alphabet: alphabet.size(), table })
    }

    /// Tabulate `f` over all words of the window.
    pub fn tabulate(alphabet: Alphabet, lo: i64, hi: i64, cap: usize, f: impl Fn(&[Symbol]) -> Symbol) -> Result<Self> {
        if hi < lo {
            return Err(Error::invalid(format!("block window [{lo}, {hi}] is empty")));
        }
        let width = (hi - lo + 1) as usize;
        let entries = (alphabet.size() as u128).checked_pow(width as u32).unwrap_or(u128::MAX);
        if entries > cap as u128 {
            return Err(Error::TableTooLarge { entries, cap });
        }
        let a = alphabet.size();
        let mut word = vec![0 as Symbol; width];
        let mut table = Vec::with_capacity(entries as usize);
        for _ in 0..entries {
            table.push(f(&word));
            // odometer increment, last symbol least significant
            for pos in (0..width).rev() {
                word[pos] += 1;
                if (word[pos] as usize) < a {
                    break;
                }
                word[pos] = 0;
            }
        }
        Self::new(alphabet, lo, hi, table)
    }

    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    pub fn table(&self) -> &[Symbol] {
        &self.table
    }

    pub fn lookup(&self, word: &[Symbol]) -> Symbol {
        let idx = word.iter().fold(0usize, |acc, &s| acc * self.alphabet + s as usize);
        self.table[idx]
    }

    /// Output coordinate `n` of the image of `x`.
    pub fn eval_at(&self, x: &TailedPoint, n: i64) -> Symbol {
        let word: Vec<Symbol> = (self.lo..=self.hi).map(|o| x.coord(n + o)).collect();
        self.lookup(&word)
    }

    pub fn apply(&self, x: &TailedPoint) -> TailedPoint {
        let w = (self.hi - self.lo + 1) as usize;
        let left = self.lookup(&vec![x.left_tail(); w]);
        let right = self.lookup(&vec![x.right_tail(); w]);
        let (s_lo, s_hi) = x.support();
        // outputs away from the core and from the tail boundary read constant words
        let (lo, hi) = if s_lo > s_hi {
            let b = x.core_start();
            (b - self.hi - 1, b - self.lo)
        } else {
            (s_lo - self.hi, s_hi - self.lo)
        };
        TailedPoint::from_window(left, right, lo, hi, |n| self.eval_at(x, n))
    }

    /// True when the table reads a single coordinate and copies it.
    pub fn as_shift(&self) -> Option<i64> {
        let a = self.alphabet;
        let width = (self.hi - self.lo + 1) as usize;
        'pos: for pos in 0..width {
            let stride = a.pow((width - 1 - pos) as u32);
            for (idx, &s) in self.table.iter().enumerate() {
                if (idx / stride) % a != s as usize {
                    continue 'pos;
                }
            }
            return Some(self.lo + pos as i64);
        }
        None
    }
}

/// One map of a symbolic nonautonomous system.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MapSpec {
    /// `σ_k`, with `(σ_k x)_n = x_{n+k}`.
    ShiftPower(u32),
    BlockCode(BlockCode),
}

impl MapSpec {
    pub fn shift(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("shift power must be >= 1"));
        }
        Ok(MapSpec::ShiftPower(k))
    }

    /// Input coordinates read by output coordinate 0.
    pub fn window(&self) -> (i64, i64) {
        match self {
            MapSpec::ShiftPower(k) => (*k as i64, *k as i64),
            MapSpec::BlockCode(b) => b.window(),
        }
    }

    pub fn is_shift(&self) -> bool {
        matches!(self, MapSpec::ShiftPower(_))
    }

    pub fn apply(&self, x: &TailedPoint) -> TailedPoint {
        match self {
            MapSpec::ShiftPower(k) => x.shifted(*k as i64),
            MapSpec::BlockCode(b) => b.apply(x),
        }
    }

    pub fn eval_at(&self, x: &TailedPoint, n: i64) -> Symbol {
        match self {
            MapSpec::ShiftPower(k) => x.coord(n + *k as i64),
            MapSpec::BlockCode(b) => b.eval_at(x, n),
        }
    }

    pub fn check_alphabet(&self, alphabet: Alphabet) -> Result<()> {
        match self {
            MapSpec::ShiftPower(0) => Err(Error::invalid("shift power must be >= 1")),
            MapSpec::ShiftPower(_) => Ok(()),
            MapSpec::BlockCode(b) if b.alphabet == alphabet.size() => Ok(()),
            MapSpec::BlockCode(b) => Err(Error::invalid(format!(
                "block code over {} symbols used in system over {}",
                b.alphabet,
                alphabet.size()
            ))),
        }
    }

    /// `next ∘ self`: apply `self` first.
    pub fn then(&self, next: &MapSpec, alphabet: Alphabet, cap: usize) -> Result<MapSpec> {
        if let (MapSpec::ShiftPower(a), MapSpec::ShiftPower(b)) = (self, next) {
            return Ok(MapSpec::ShiftPower(a + b));
        }
        let (lo1, hi1) = self.window();
        let (lo2, hi2) = next.window();
        let (lo, hi) = (lo1 + lo2, hi1 + hi2);
        let code = BlockCode::tabulate(alphabet, lo, hi, cap, |word| {
            // word[i] is input coordinate lo + i; evaluate self on the
            // intermediate coordinates lo2..=hi2, then next at 0.
            let mid: Vec<Symbol> = (lo2..=hi2)
                .map(|t| {
                    let inner: Vec<Symbol> = (lo1..=hi1).map(|o| word[(t + o - lo) as usize]).collect();
                    match self {
                        MapSpec::ShiftPower(_) => inner[0],
                        MapSpec::BlockCode(b) => b.lookup(&inner),
                    }
                })
                .collect();
            match next {
                MapSpec::ShiftPower(_) => mid[0],
                MapSpec::BlockCode(b) => b.lookup(&mid),
            }
        })?;
        Ok(MapSpec::BlockCode(code))
    }

    /// Conjugate by a symbol permutation: `P ∘ self ∘ P⁻¹`.
    pub fn conjugate(&self, perm: &[Symbol], inverse: &[Symbol]) -> MapSpec {
        match self {
            MapSpec::ShiftPower(k) => MapSpec::ShiftPower(*k),
            MapSpec::BlockCode(b) => {
                let width = (b.hi - b.lo + 1) as usize;
                let a = b.alphabet;
                let table = (0..b.table.len())
                    .map(|idx| {
                        let mut rem = idx;
                        let mut word = vec![0 as Symbol; width];
                        for pos in (0..width).rev() {
                            word[pos] = inverse[rem % a];
                            rem /= a;
                        }
                        perm[b.lookup(&word) as usize]
                    })
                    .collect();
                MapSpec::BlockCode(BlockCode { lo: b.lo, hi: b.hi, alphabet: a, table })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    fn xor() -> BlockCode {
        BlockCode::new(two(), 0, 1, vec![0, 1, 1, 0]).unwrap()
    }

    #[test]
    fn shift_power_moves_coordinates() {
        let x = TailedPoint::new(0, 0, vec![1], 5);
        let y = MapSpec::ShiftPower(2).apply(&x);
        assert_eq!(y.coord(3), 1);
        assert_eq!(y.coord(5), 0);
    }

    #[test]
    fn block_code_apply_matches_pointwise() {
        let x = TailedPoint::new(0, 1, vec![1, 0, 1, 1, 0], -2);
        let y = xor().apply(&x);
        for n in -10..10 {
            assert_eq!(y.coord(n), x.coord(n) ^ x.coord(n + 1), "n = {n}");
        }
        let c = TailedPoint::new(0, 1, vec![], 3);
        let yc = xor().apply(&c);
        for n in -5..10 {
            assert_eq!(yc.coord(n), c.coord(n) ^ c.coord(n + 1));
        }
    }

    #[test]
    fn composition_of_codes() {
        let a = two();
        let f = MapSpec::BlockCode(xor());
        let g = MapSpec::ShiftPower(1);
        let h = f.then(&g, a, DEFAULT_TABLE_CAP).unwrap();
        let x = TailedPoint::new(1, 0, vec![0, 1, 1, 0, 1], 0);
        let want = g.apply(&f.apply(&x));
        assert_eq!(h.apply(&x), want);
        assert_eq!(MapSpec::ShiftPower(2).then(&MapSpec::ShiftPower(3), a, 16).unwrap(), MapSpec::ShiftPower(5));
    }

    #[test]
    fn detects_copy_tables() {
        let c = BlockCode::tabulate(two(), 1, 2, 64, |w| w[1]).unwrap();
        assert_eq!(c.as_shift(), Some(2));
        assert_eq!(xor().as_shift(), None);
    }

    #[test]
    fn table_cap_is_enforced() {
        let err = BlockCode::tabulate(two(), 0, 30, 1 << 10, |w| w[0]).unwrap_err();
        assert!(matches!(err, Error::TableTooLarge { .. }));
    }
}
