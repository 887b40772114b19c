use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::point::{Alphabet, Symbol, TailedPoint};
use super::system::Relabeling;
use crate::error::{Error, Result};

/// The subset `Z` whose entropy is computed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TargetSet {
    WholeSpace,
    /// Distinct points in canonical form, sorted.
    PointList(Vec<TailedPoint>),
    /// `⋃_{k <= k_max} Z_k` with `Z_k = {x : x_n = tail for |n| >= k}`;
    /// the union is nested, so this equals `Z_{k_max}`.
    EventuallyConstantFamily { tail: Symbol, k_max: i64 },
    /// `{x : x_n = tail for n ∉ [lo, hi]}`, the shifted form of a family.
    FreeWindow { tail: Symbol, lo: i64, hi: i64 },
    Union(Vec<TargetSet>),
    /// `Z × W` over the product alphabet; symbol `(a, b)` is `a * right_size + b`.
    Product { left: Box<TargetSet>, right: Box<TargetSet>, right_size: usize },
}

impl TargetSet {
    pub fn points(points: Vec<TailedPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("point list must be nonempty"));
        }
        let set: BTreeSet<TailedPoint> = points.into_iter().collect();
        Ok(TargetSet::PointList(set.into_iter().collect()))
    }

    pub fn family(tail: Symbol, k_max: i64) -> Self {
        TargetSet::EventuallyConstantFamily { tail, k_max }
    }

    pub fn product(left: TargetSet, right: TargetSet, right_alphabet: Alphabet) -> Self {
        TargetSet::Product { left: Box::new(left), right: Box::new(right), right_size: right_alphabet.size() }
    }

    pub fn check_alphabet(&self, alphabet: Alphabet) -> Result<()> {
        match self {
            TargetSet::WholeSpace => Ok(()),
            TargetSet::PointList(ps) => ps.iter().try_for_each(|p| p.check_alphabet(alphabet)),
            TargetSet::EventuallyConstantFamily { tail, .. } | TargetSet::FreeWindow { tail, .. } => {
                if alphabet.contains(*tail) {
                    Ok(())
                } else {
                    Err(Error::invalid(format!("tail symbol {tail} outside alphabet")))
                }
            }
            TargetSet::Union(parts) => {
                if parts.is_empty() {
                    return Err(Error::invalid("empty union"));
                }
                parts.iter().try_for_each(|p| p.check_alphabet(alphabet))
            }
            TargetSet::Product { left, right, right_size } => {
                if !alphabet.size().is_multiple_of(*right_size) {
                    return Err(Error::invalid("product target does not match alphabet"));
                }
                left.check_alphabet(Alphabet::new(alphabet.size() / right_size)?)?;
                right.check_alphabet(Alphabet::new(*right_size)?)
            }
        }
    }

    /// Symbols allowed at coordinate `n`, when `Z` is a product of
    /// per-coordinate symbol sets; `None` otherwise.
    pub fn allowed_at(&self, n: i64, alphabet: Alphabet) -> Option<Vec<Symbol>> {
        match self {
            TargetSet::WholeSpace => Some(alphabet.symbols().collect()),
            TargetSet::EventuallyConstantFamily { tail, k_max } => {
                if n.abs() < *k_max {
                    Some(alphabet.symbols().collect())
                } else {
                    Some(vec![*tail])
                }
            }
            TargetSet::FreeWindow { tail, lo, hi } => {
                if (*lo..=*hi).contains(&n) {
                    Some(alphabet.symbols().collect())
                } else {
                    Some(vec![*tail])
                }
            }
            TargetSet::PointList(ps) if ps.len() == 1 => Some(vec![ps[0].coord(n)]),
            TargetSet::PointList(_) | TargetSet::Union(_) => None,
            TargetSet::Product { left, right, right_size } => {
                let la = Alphabet::new(alphabet.size() / right_size).ok()?;
                let ra = Alphabet::new(*right_size).ok()?;
                let a = left.allowed_at(n, la)?;
                let b = right.allowed_at(n, ra)?;
                Some(a.iter().flat_map(|&x| b.iter().map(move |&y| x * *right_size as Symbol + y)).collect())
            }
        }
    }

    pub fn is_product_structured(&self) -> bool {
        match self {
            TargetSet::WholeSpace
            | TargetSet::EventuallyConstantFamily { .. }
            | TargetSet::FreeWindow { .. } => true,
            TargetSet::PointList(ps) => ps.len() == 1,
            TargetSet::Union(_) => false,
            TargetSet::Product { left, right, .. } => left.is_product_structured() && right.is_product_structured(),
        }
    }

    pub fn contains(&self, x: &TailedPoint, alphabet: Alphabet) -> bool {
        match self {
            TargetSet::WholeSpace => true,
            TargetSet::PointList(ps) => ps.binary_search(x).is_ok(),
            TargetSet::EventuallyConstantFamily { tail, k_max } => {
                let k = (*k_max).max(0);
                x.left_tail() == *tail
                    && x.right_tail() == *tail
                    && (x.core().is_empty() || (x.core_start() > -k && x.core_end() - 1 < k))
            }
            TargetSet::FreeWindow { tail, lo, hi } => {
                x.left_tail() == *tail
                    && x.right_tail() == *tail
                    && (x.core().is_empty() || (x.core_start() >= *lo && x.core_end() - 1 <= *hi))
            }
            TargetSet::Union(parts) => parts.iter().any(|p| p.contains(x, alphabet)),
            TargetSet::Product { left, right, right_size } => {
                let rs = *right_size as Symbol;
                let (Ok(la), Ok(ra)) = (Alphabet::new(alphabet.size() / right_size), Alphabet::new(*right_size)) else {
                    return false;
                };
                left.contains(&x.map_symbols(|s| s / rs), la) && right.contains(&x.map_symbols(|s| s % rs), ra)
            }
        }
    }

    /// The distinct restrictions `x|_J`, `x ∈ Z`, in lexicographic order.
    pub fn project(&self, coords: &[i64], alphabet: Alphabet, cap: usize) -> Result<Vec<Vec<Symbol>>> {
        if cap == 0 {
            return Err(Error::invalid("universe cap must be positive"));
        }
        if self.is_product_structured() {
            let sets: Vec<Vec<Symbol>> = coords
                .iter()
                .map(|&c| self.allowed_at(c, alphabet).expect("product-structured"))
                .collect();
            let count = sets.iter().try_fold(1u128, |acc, s| acc.checked_mul(s.len() as u128)).unwrap_or(u128::MAX);
            if count > cap as u128 {
                return Err(Error::UniverseTooLarge { count, cap });
            }
            return Ok(cartesian(&sets));
        }
        let words: BTreeSet<Vec<Symbol>> = match self {
            TargetSet::PointList(ps) => ps.iter().map(|p| coords.iter().map(|&c| p.coord(c)).collect()).collect(),
            TargetSet::Union(parts) => {
                let mut all = BTreeSet::new();
                for part in parts {
                    all.extend(part.project(coords, alphabet, cap)?);
                    if all.len() > cap {
                        return Err(Error::UniverseTooLarge { count: all.len() as u128, cap });
                    }
                }
                all
            }
            TargetSet::Product { left, right, right_size } => {
                let la = Alphabet::new(alphabet.size() / right_size)?;
                let ra = Alphabet::new(*right_size)?;
                let l = left.project(coords, la, cap)?;
                let r = right.project(coords, ra, cap)?;
                let count = l.len() as u128 * r.len() as u128;
                if count > cap as u128 {
                    return Err(Error::UniverseTooLarge { count, cap });
                }
                l.iter()
                    .flat_map(|a| {
                        r.iter().map(move |b| {
                            a.iter().zip(b).map(|(&x, &y)| x * *right_size as Symbol + y).collect::<Vec<_>>()
                        })
                    })
                    .collect()
            }
            _ => unreachable!("product-structured targets handled above"),
        };
        if words.len() > cap {
            return Err(Error::UniverseTooLarge { count: words.len() as u128, cap });
        }
        Ok(words.into_iter().collect())
    }

    /// Image under a symbol permutation.
    pub fn relabel(&self, perm: &Relabeling) -> Result<TargetSet> {
        Ok(match self {
            TargetSet::WholeSpace => TargetSet::WholeSpace,
            TargetSet::PointList(ps) => TargetSet::points(ps.iter().map(|p| perm.point(p)).collect())?,
            TargetSet::EventuallyConstantFamily { tail, k_max } => {
                TargetSet::EventuallyConstantFamily { tail: perm.apply(*tail), k_max: *k_max }
            }
            TargetSet::FreeWindow { tail, lo, hi } => TargetSet::FreeWindow { tail: perm.apply(*tail), lo: *lo, hi: *hi },
            TargetSet::Union(parts) => TargetSet::Union(parts.iter().map(|p| p.relabel(perm)).collect::<Result<_>>()?),
            TargetSet::Product { .. } => {
                return Err(Error::invalid("relabeling of product targets is not supported"));
            }
        })
    }

    /// Image under `σ_k`.
    pub fn shift_image(&self, k: i64) -> Result<TargetSet> {
        Ok(match self {
            TargetSet::WholeSpace => TargetSet::WholeSpace,
            TargetSet::PointList(ps) => TargetSet::points(ps.iter().map(|p| p.shifted(k)).collect())?,
            TargetSet::EventuallyConstantFamily { tail, k_max } => {
                if *k_max <= 0 {
                    return Ok(self.clone());
                }
                TargetSet::FreeWindow { tail: *tail, lo: -k_max + 1 - k, hi: k_max - 1 - k }
            }
            TargetSet::FreeWindow { tail, lo, hi } => TargetSet::FreeWindow { tail: *tail, lo: lo - k, hi: hi - k },
            TargetSet::Union(parts) => TargetSet::Union(parts.iter().map(|p| p.shift_image(k)).collect::<Result<_>>()?),
            TargetSet::Product { left, right, right_size } => TargetSet::Product {
                left: Box::new(left.shift_image(k)?),
                right: Box::new(right.shift_image(k)?),
                right_size: *right_size,
            },
        })
    }

    /// Whether a Bernoulli measure with full support gives `Z` positive mass.
    pub fn has_positive_bernoulli_mass(&self) -> bool {
        match self {
            TargetSet::WholeSpace => true,
            TargetSet::PointList(_) | TargetSet::EventuallyConstantFamily { .. } | TargetSet::FreeWindow { .. } => false,
            TargetSet::Union(parts) => parts.iter().any(TargetSet::has_positive_bernoulli_mass),
            TargetSet::Product { left, right, .. } => {
                left.has_positive_bernoulli_mass() && right.has_positive_bernoulli_mass()
            }
        }
    }

    /// A representative point of `Z` agreeing with `word` on `coords`, when
    /// the word is the projection of some point of `Z`.
    pub fn lift(&self, coords: &[i64], word: &[Symbol], alphabet: Alphabet) -> TailedPoint {
        let fill = match self {
            TargetSet::EventuallyConstantFamily { tail, .. } | TargetSet::FreeWindow { tail, .. } => *tail,
            TargetSet::PointList(ps) => {
                if let Some(p) = ps.iter().find(|p| coords.iter().zip(word).all(|(&c, &s)| p.coord(c) == s)) {
                    return p.clone();
                }
                0
            }
            _ => 0,
        };
        let _ = alphabet;
        match (coords.first(), coords.last()) {
            (Some(&lo), Some(&hi)) => TailedPoint::from_window(fill, fill, lo, hi, |n| match coords.binary_search(&n) {
                Ok(i) => word[i],
                Err(_) => fill,
            }),
            _ => TailedPoint::constant(fill),
        }
    }
}

fn cartesian(sets: &[Vec<Symbol>]) -> Vec<Vec<Symbol>> {
    let mut out = vec![Vec::with_capacity(sets.len())];
    for set in sets {
        let mut next = Vec::with_capacity(out.len() * set.len());
        for prefix in &out {
            for &s in set {
                let mut w = prefix.clone();
                w.push(s);
                next.push(w);
            }
        }
        out = next;
    }
    out
}
