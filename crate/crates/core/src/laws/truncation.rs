//! Shortening a cover for one window into a cover for a narrower window.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::cover::{compensated_sum, LengthWindow, Theta, REL_SLACK};
use crate::error::{Error, Result};
use crate::estimate::Prepared;

/// A cover by cylinder strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverShape {
    /// Every string of one length (uniform prefix trees).
    Level { depth: usize, log_count: f64 },
    /// Explicit itinerary prefixes.
    Prefixes(Vec<Vec<u32>>),
}

impl CoverShape {
    /// `ln Σ exp(-α m)` over the cover.
    pub fn log_cost(&self, alpha: f64) -> f64 {
        match self {
            CoverShape::Level { depth, log_count } => log_count - alpha * *depth as f64,
            CoverShape::Prefixes(p) => compensated_sum(p.iter().map(|s| (-alpha * s.len() as f64).exp())).ln(),
        }
    }

    pub fn lengths(&self) -> Vec<usize> {
        match self {
            CoverShape::Level { depth, .. } => vec![*depth],
            CoverShape::Prefixes(p) => p.iter().map(Vec::len).collect::<BTreeSet<_>>().into_iter().collect(),
        }
    }
}

/// An optimal cover for the window at `α`, with `ln` of its cost.
pub fn optimal_cover(prepared: &Prepared, window: &LengthWindow, alpha: f64) -> Result<(CoverShape, f64)> {
    if let Some(tree) = prepared.uniform_tree() {
        let (log_m, depth) = tree.profile(window, alpha)?;
        return Ok((CoverShape::Level { depth, log_count: tree.log_nodes(depth) }, log_m));
    }
    if let Some((tree, _)) = prepared.prefix_tree() {
        let (nodes, value) = tree.optimal_cover(window, alpha)?;
        let prefixes = nodes.iter().map(|&n| tree.prefix(n).to_vec()).collect();
        return Ok((CoverShape::Prefixes(prefixes), value.ln()));
    }
    Err(Error::invalid("optimal covers are only extracted from prefix-tree evaluations"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub cover: CoverShape,
    /// Exponent `s (N/θ + 1) / ⌊N/φ⌋` charged to the new cover.
    pub t_n: f64,
    pub truncated_len: usize,
    pub log_cost_before: f64,
    pub log_cost_after: f64,
    /// Every point of `Z` lies in some string of the new cover.
    pub covers: bool,
    /// Every new length is admissible for `(N, φ)`.
    pub in_window: bool,
    /// `Σ_{G'} exp(-t_N m) <= Σ_G exp(-s m)`.
    pub holds: bool,
}

impl Truncation {
    pub fn valid(&self) -> bool {
        self.covers && self.in_window && self.holds
    }
}

/// Keeps strings shorter than `N/φ + 1` and cuts longer ones to length
/// `⌊N/φ⌋`; a prefix constrains fewer steps, so it contains the longer
/// string's set. `upper` is `N/θ + 1` (or the length cap plus one at `θ = 0`).
pub fn truncation_transform(
    prepared: &Prepared,
    cover: &CoverShape,
    n: usize,
    theta: Theta,
    phi: Theta,
    s: f64,
    upper: f64,
) -> Result<Truncation> {
    if phi <= theta || phi.is_zero() {
        return Err(Error::invalid("truncation needs 0 < θ < φ"));
    }
    let phi_window = LengthWindow::new(n, phi, None)?;
    let keep_max = phi_window.max_len()?;
    let cut = (n as u128 * phi.denom() as u128 / phi.numer() as u128) as usize;
    let t_n = s * upper / cut as f64;
    let (new_cover, covers) = match cover {
        CoverShape::Level { depth, .. } => {
            let tree = prepared.uniform_tree().ok_or_else(|| Error::invalid("level cover needs a uniform tree"))?;
            let d = if *depth <= keep_max { *depth } else { cut };
            (CoverShape::Level { depth: d, log_count: tree.log_nodes(d) }, true)
        }
        CoverShape::Prefixes(prefixes) => {
            let set: BTreeSet<Vec<u32>> = prefixes
                .iter()
                .map(|p| if p.len() <= keep_max { p.clone() } else { p[..cut].to_vec() })
                .collect();
            let covers = match prepared.prefix_tree() {
                Some((tree, _)) => tree.leaves().iter().all(|leaf| set.iter().any(|p| leaf.starts_with(p))),
                None => false,
            };
            (CoverShape::Prefixes(set.into_iter().collect()), covers)
        }
    };
    let in_window = new_cover.lengths().iter().all(|&m| phi_window.contains(m));
    let before = cover.log_cost(s);
    let after = new_cover.log_cost(t_n);
    let holds = after <= before + REL_SLACK * before.abs().max(1.0);
    Ok(Truncation {
        cover: new_cover,
        t_n,
        truncated_len: cut,
        log_cost_before: before,
        log_cost_after: after,
        covers,
        in_window,
        holds,
    })
}
