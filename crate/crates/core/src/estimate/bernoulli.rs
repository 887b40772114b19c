use serde::{Deserialize, Serialize};

use crate::cover::compensated_sum;
use crate::error::{Error, Result};
use crate::symbolic::{SymbolicNDS, TailedPoint};

/// Product measure with i.i.d. coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernoulliMeasure {
    p: Vec<f64>,
}

impl BernoulliMeasure {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.len() < 2 || p.iter().any(|&x| x.is_nan() || x <= 0.0) {
            return Err(Error::invalid("Bernoulli weights must be positive, at least two"));
        }
        if (compensated_sum(p.iter().copied()) - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("Bernoulli weights must sum to 1"));
        }
        Ok(Self { p })
    }

    pub fn uniform(size: usize) -> Result<Self> {
        Self::new(vec![1.0 / size as f64; size])
    }

    pub fn weights(&self) -> &[f64] {
        &self.p
    }

    /// Largest and smallest `-ln p` over the given symbols.
    pub fn info_range(&self, symbols: impl IntoIterator<Item = u16>) -> (f64, f64) {
        symbols.into_iter().map(|s| -self.p[s as usize].ln()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }
}

/// Measure of the radius-`r` Bowen ball of length `n` at `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallMass {
    pub log_mass: f64,
    /// Number of constrained coordinates.
    pub coords: usize,
}

impl BallMass {
    pub fn mass(&self) -> f64 {
        self.log_mass.exp()
    }
}

pub fn bernoulli_ball_mass(mu: &BernoulliMeasure, system: &SymbolicNDS, x: &TailedPoint, n: usize, r: u32) -> Result<BallMass> {
    if n == 0 {
        return Err(Error::invalid("n must be >= 1"));
    }
    if mu.p.len() != system.alphabet().size() {
        return Err(Error::invalid("measure and system alphabets differ"));
    }
    x.check_alphabet(system.alphabet())?;
    if !system.is_shift_system() {
        return Err(Error::NotShiftSystem);
    }
    let coords = system.dependence_coords(n, r);
    let log_mass = compensated_sum(coords.iter().map(|&c| mu.p[x.coord(c) as usize].ln()));
    Ok(BallMass { log_mass, coords: coords.len() })
}

/// `-(1/n) ln μ(B_n(x))` for each `n`.
pub fn local_entropy_sequence(mu: &BernoulliMeasure, system: &SymbolicNDS, x: &TailedPoint, ns: &[usize], r: u32) -> Result<Vec<f64>> {
    ns.iter().map(|&n| Ok(-bernoulli_ball_mass(mu, system, x, n, r)?.log_mass / n as f64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn uniform_masses() {
        let mu = BernoulliMeasure::uniform(2).unwrap();
        let sys = SymbolicNDS::full_shift(2).unwrap();
        let x = TailedPoint::new(0, 1, vec![1, 0, 1], -1);
        for n in 1..10 {
            let m = bernoulli_ball_mass(&mu, &sys, &x, n, 0).unwrap();
            assert!((m.mass() - 0.5f64.powi(n as i32)).abs() < 1e-15);
        }
        let seq = local_entropy_sequence(&mu, &SymbolicNDS::two_shift_example(), &x, &[1, 3, 7, 20], 0).unwrap();
        assert!(seq.iter().all(|v| (v - LN_2).abs() < 1e-12));
    }

    #[test]
    fn biased_all_ones() {
        let mu = BernoulliMeasure::new(vec![0.25, 0.75]).unwrap();
        let sys = SymbolicNDS::full_shift(2).unwrap();
        let seq = local_entropy_sequence(&mu, &sys, &TailedPoint::constant(1), &[1, 5, 12], 0).unwrap();
        assert!(seq.iter().all(|v| (v + 0.75f64.ln()).abs() < 1e-12));
        assert!((seq[0] - 0.2876820724517809).abs() < 1e-12);
    }

    #[test]
    fn skipped_coordinate() {
        let mu = BernoulliMeasure::new(vec![0.25, 0.75]).unwrap();
        // coordinate 1 is free for the example system: mass over {0, 2, 3}
        let x = TailedPoint::new(1, 1, vec![0], 1);
        let m = bernoulli_ball_mass(&mu, &SymbolicNDS::two_shift_example(), &x, 3, 0).unwrap();
        assert_eq!(m.coords, 3);
        assert!((m.mass() - 0.75f64.powi(3)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_measures() {
        assert!(BernoulliMeasure::new(vec![0.5, 0.6]).is_err());
        assert!(BernoulliMeasure::new(vec![1.0, 0.0]).is_err());
    }
}
