use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A rational exponent in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Theta(Ratio<u64>);

impl Theta {
    pub const ONE: Theta = Theta(Ratio::new_raw(1, 1));
    pub const ZERO: Theta = Theta(Ratio::new_raw(0, 1));

    pub fn new(numer: u64, denom: u64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::invalid("theta denominator is zero"));
        }
        if numer > denom {
            return Err(Error::invalid(format!("theta {numer}/{denom} exceeds 1")));
        }
        Ok(Theta(Ratio::new(numer, denom)))
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.numer() == 0
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    /// `N / θ + 1` as a float, for reporting and certificates.
    pub fn upper_bound(&self, n: usize) -> f64 {
        n as f64 * self.denom() as f64 / self.numer() as f64 + 1.0
    }
}

impl FromStr for Theta {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let (p, q) = match t.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (t, "1"),
        };
        let parse = |x: &str| {
            x.parse::<u64>().map_err(|_| Error::invalid(format!("theta must be a rational \"p/q\" in [0, 1], got {s:?}")))
        };
        Theta::new(parse(p)?, parse(q)?)
    }
}

impl fmt::Display for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl Serialize for Theta {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Theta {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Admissible string lengths `N <= m < N/θ + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthWindow {
    pub n: usize,
    pub theta: Theta,
    /// Largest length when `θ = 0`; ignored otherwise.
    pub cap: Option<usize>,
}

impl LengthWindow {
    pub fn new(n: usize, theta: Theta, cap: Option<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("N must be >= 1"));
        }
        let w = Self { n, theta, cap };
        w.max_len()?;
        Ok(w)
    }

    /// Largest admissible length.
    pub fn max_len(&self) -> Result<usize> {
        if self.theta.is_zero() {
            let cap = self.cap.ok_or(Error::ThetaZeroNeedsCap)?;
            if cap < self.n {
                return Err(Error::invalid(format!("length cap {cap} is below N = {}", self.n)));
            }
            return Ok(cap);
        }
        // m < N q / p + 1  <=>  (m - 1) p < N q  <=>  m <= ceil(N q / p)
        let nq = self.n as u128 * self.theta.denom() as u128;
        let p = self.theta.numer() as u128;
        Ok(nq.div_ceil(p) as usize)
    }

    pub fn allowed_lengths(&self) -> Result<RangeInclusive<usize>> {
        Ok(self.n..=self.max_len()?)
    }

    pub fn contains(&self, m: usize) -> bool {
        m >= self.n && self.max_len().is_ok_and(|hi| m <= hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn th(s: &str) -> Theta {
        s.parse().unwrap()
    }

    #[test]
    fn window_examples() {
        let w = |n, t: &str| LengthWindow::new(n, th(t), None).unwrap().allowed_lengths().unwrap();
        assert_eq!(w(4, "1"), 4..=4);
        assert_eq!(w(4, "1/2"), 4..=8);
        assert_eq!(w(5, "2/5"), 5..=13);
        assert_eq!(w(6, "2/4"), 6..=12);
    }

    #[test]
    fn theta_zero_needs_cap() {
        assert_eq!(LengthWindow::new(3, Theta::ZERO, None).unwrap_err(), Error::ThetaZeroNeedsCap);
        let w = LengthWindow::new(3, Theta::ZERO, Some(9)).unwrap();
        assert_eq!(w.allowed_lengths().unwrap(), 3..=9);
    }

    #[test]
    fn parse_rejects_bad_theta() {
        assert!("-1".parse::<Theta>().is_err());
        assert!("3/2".parse::<Theta>().is_err());
        assert!("0.5".parse::<Theta>().is_err());
        assert!("1/0".parse::<Theta>().is_err());
        assert_eq!(th(" 2/4 "), th("1/2"));
        assert_eq!(th("1/2").to_string(), "1/2");
        assert_eq!(th("0").to_string(), "0");
    }

    #[test]
    fn boundary_is_exact() {
        // brute-force rational comparison against the closed form
        for p in 1..=7u64 {
            for q in p..=9u64 {
                let t = Theta::new(p, q).unwrap();
                for n in 1..=20usize {
                    let w = LengthWindow::new(n, t, None).unwrap();
                    let hi = w.max_len().unwrap();
                    let ok = |m: usize| ((m as u64 - 1) * t.numer()) < n as u64 * t.denom();
                    assert!(ok(hi));
                    assert!(!ok(hi + 1));
                }
            }
        }
    }
}
