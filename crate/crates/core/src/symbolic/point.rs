use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Symbol = u16;

/// Finite alphabet `{0, .., size - 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    size: usize,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::invalid(format!("alphabet size must be >= 2, got {size}")));
        }
        if size > Symbol::MAX as usize + 1 {
            return Err(Error::invalid(format!("alphabet size {size} too large")));
        }
        Ok(Self { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn contains(&self, s: Symbol) -> bool {
        (s as usize) < self.size
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> {
        (0..self.size).map(|s| s as Symbol)
    }
}

/// A bi-infinite sequence that is constant outside a finite core.
///
/// Always stored in canonical form: the core never starts with the left tail
/// symbol nor ends with the right tail symbol, so structural equality is
/// equality of sequences.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TailedPoint {
    left: Symbol,
    right: Symbol,
    core: Vec<Symbol>,
    start: i64,
}

impl TailedPoint {
    pub fn new(left: Symbol, right: Symbol, core: Vec<Symbol>, start: i64) -> Self {
        let mut p = Self { left, right, core, start };
        p.canonicalize();
        p
    }

    pub fn constant(s: Symbol) -> Self {
        Self { left: s, right: s, core: Vec::new(), start: 0 }
    }

    /// Build from a coordinate function on `[lo, hi]` with the given tails.
    pub fn from_window(left: Symbol, right: Symbol, lo: i64, hi: i64, f: impl Fn(i64) -> Symbol) -> Self {
        let core = if hi >= lo { (lo..=hi).map(f).collect() } else { Vec::new() };
        Self::new(left, right, core, lo)
    }

    fn canonicalize(&mut self) {
        let lead = self.core.iter().take_while(|&&s| s == self.left).count();
        if lead == self.core.len() {
            // Everything left of the core end equals the left tail; the
            // remaining boundary is where the right tail begins.
            let end = self.start + self.core.len() as i64;
            self.core.clear();
            self.start = end;
        } else {
            self.core.drain(..lead);
            self.start += lead as i64;
        }
        while self.core.last() == Some(&self.right) {
            self.core.pop();
        }
        if self.core.is_empty() && self.left == self.right {
            self.start = 0;
        }
    }

    pub fn left_tail(&self) -> Symbol {
        self.left
    }

    pub fn right_tail(&self) -> Symbol {
        self.right
    }

    pub fn core(&self) -> &[Symbol] {
        &self.core
    }

    pub fn core_start(&self) -> i64 {
        self.start
    }

    /// First coordinate of the right tail.
    pub fn core_end(&self) -> i64 {
        self.start + self.core.len() as i64
    }

    pub fn coord(&self, n: i64) -> Symbol {
        if n < self.start {
            self.left
        } else if n >= self.core_end() {
            self.right
        } else {
            self.core[(n - self.start) as usize]
        }
    }

    /// Smallest window `[lo, hi]` outside of which the point equals its tails.
    /// Empty (`lo > hi`) for constant points.
    pub fn support(&self) -> (i64, i64) {
        (self.start, self.core_end() - 1)
    }

    /// `y_n = x_{n+k}`.
    pub fn shifted(&self, k: i64) -> Self {
        if self.core.is_empty() && self.left == self.right {
            return self.clone();
        }
        Self { left: self.left, right: self.right, core: self.core.clone(), start: self.start - k }
    }

    pub fn with_coord(&self, n: i64, s: Symbol) -> Self {
        let lo = self.start.min(n);
        let hi = (self.core_end() - 1).max(n);
        Self::from_window(self.left, self.right, lo, hi, |c| if c == n { s } else { self.coord(c) })
    }

    pub fn map_symbols(&self, f: impl Fn(Symbol) -> Symbol) -> Self {
        Self::new(f(self.left), f(self.right), self.core.iter().map(|&s| f(s)).collect(), self.start)
    }

    pub fn check_alphabet(&self, alphabet: Alphabet) -> Result<()> {
        let ok = alphabet.contains(self.left)
            && alphabet.contains(self.right)
            && self.core.iter().all(|&s| alphabet.contains(s));
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("point {self:?} uses symbols outside alphabet of size {}", alphabet.size())))
        }
    }
}

impl fmt::Debug for TailedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "…{}{}[", self.left, self.left)?;
        for s in &self.core {
            write!(f, "{s}")?;
        }
        write!(f, "]@{}{}{}…", self.start, self.right, self.right)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_rejects_small() {
        assert!(Alphabet::new(1).is_err());
        assert!(Alphabet::new(0).is_err());
        assert_eq!(Alphabet::new(2).unwrap().size(), 2);
    }

    #[test]
    fn coord_accessor_is_total() {
        let x = TailedPoint::new(1, 1, vec![0, 1], 0);
        assert_eq!(x.coord(-5), 1);
        assert_eq!(x.coord(0), 0);
        assert_eq!(x.coord(1), 1);
        assert_eq!(x.coord(2), 1);
        assert_eq!(x.core(), &[0]);
    }

    #[test]
    fn canonical_form_trims_tails() {
        let a = TailedPoint::new(1, 0, vec![1, 1, 0, 1, 0, 0], -3);
        let b = TailedPoint::new(1, 0, vec![0, 1], -1);
        assert_eq!(a, b);
        assert_eq!(a.core_start(), -1);
        let c = TailedPoint::new(0, 0, vec![0, 0], 7);
        assert_eq!(c, TailedPoint::constant(0));
    }

    #[test]
    fn boundary_between_distinct_tails() {
        let a = TailedPoint::new(0, 1, vec![0, 0, 1, 1], 4);
        assert_eq!(a.core(), &[] as &[Symbol]);
        assert_eq!(a.coord(5), 0);
        assert_eq!(a.coord(6), 1);
        assert_eq!(a, TailedPoint::new(0, 1, vec![], 6));
    }

    #[test]
    fn shift_and_mutate() {
        let x = TailedPoint::new(1, 1, vec![0], 3);
        let y = x.shifted(2);
        assert_eq!(y.coord(1), 0);
        assert_eq!(y.coord(3), 1);
        let z = x.with_coord(3, 1);
        assert_eq!(z, TailedPoint::constant(1));
        let w = TailedPoint::constant(1).with_coord(-2, 0);
        assert_eq!(w.coord(-2), 0);
        assert_eq!(w.support(), (-2, -2));
    }
}
