//! Critical exponents of the cover cost `M(Z, α, U, N, θ)`.

mod bernoulli;

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cover::laminar::{PrefixTree, UniformTree};
use crate::cover::{
    build_metric_instance, build_symbolic_instance, solve_exact, Caps, CoverInstance, Itineraries, LengthWindow,
    Theta, REL_SLACK,
};
use crate::error::{Error, Result};
use crate::metric::FiniteMetricNDS;
use crate::symbolic::{SymbolicNDS, TargetSet};

pub use bernoulli::{bernoulli_ball_mass, local_entropy_sequence, BallMass, BernoulliMeasure};

/// Absolute tolerance of the bisection on `α`.
pub const ROOT_TOL: f64 = 1e-9;

/// A set `Z` in a system together with the cover scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Source {
    Symbolic { system: SymbolicNDS, target: TargetSet, radius: u32 },
    Metric { system: FiniteMetricNDS, subset: Vec<usize>, eps: f64 },
}

impl Source {
    pub fn symbolic(system: SymbolicNDS, target: TargetSet, radius: u32) -> Self {
        Source::Symbolic { system, target, radius }
    }

    /// Right end of the bracket searched for roots.
    pub fn alpha_upper(&self) -> f64 {
        match self {
            Source::Symbolic { system, radius, .. } => {
                (2 * *radius + 1) as f64 * (system.alphabet().size() as f64).ln() + 1.0
            }
            Source::Metric { system, .. } => (system.points() as f64).ln() + 1.0,
        }
    }

    pub fn scale(&self) -> Scale {
        match self {
            Source::Symbolic { radius, .. } => Scale::Radius(*radius),
            Source::Metric { eps, .. } => Scale::Eps(*eps),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Radius(u32),
    Eps(f64),
}

/// How `M` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Prefix-tree recursion for cylinder covers, set cover otherwise.
    #[default]
    Auto,
    /// Always build and solve the explicit set-cover instance.
    Instance,
}

#[derive(Debug, Clone)]
enum Base {
    Uniform(Arc<UniformTree>),
    Tree(Arc<PrefixTree>, Arc<Itineraries>),
    Instance,
}

/// A source prepared for evaluation on windows up to a fixed length.
#[derive(Debug, Clone)]
pub struct Prepared {
    source: Source,
    caps: Caps,
    depth: usize,
    base: Base,
}

impl Prepared {
    pub fn new(source: &Source, max_len: usize, caps: &Caps, method: Method) -> Result<Self> {
        caps.validate()?;
        let base = match (source, method) {
            (Source::Symbolic { system, target, radius }, Method::Auto) => {
                if system.is_shift_system() && target.is_product_structured() {
                    target.check_alphabet(system.alphabet())?;
                    let groups = system.new_coords_per_step(max_len, *radius)?;
                    let counts: Vec<Vec<usize>> = groups
                        .iter()
                        .map(|g| {
                            g.iter()
                                .map(|&c| target.allowed_at(c, system.alphabet()).map_or(0, |s| s.len()))
                                .collect()
                        })
                        .collect();
                    Base::Uniform(Arc::new(UniformTree::from_counts(&counts)))
                } else {
                    let its = Itineraries::compute(system, target, *radius, max_len, caps)?;
                    let tree = PrefixTree::new(its.codes.clone());
                    Base::Tree(Arc::new(tree), Arc::new(its))
                }
            }
            _ => Base::Instance,
        };
        Ok(Self { source: source.clone(), caps: *caps, depth: max_len, base })
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn uniform_tree(&self) -> Option<&UniformTree> {
        match &self.base {
            Base::Uniform(t) => Some(t),
            _ => None,
        }
    }

    pub fn prefix_tree(&self) -> Option<(&PrefixTree, &Itineraries)> {
        match &self.base {
            Base::Tree(t, its) => Some((t, its)),
            _ => None,
        }
    }

    pub fn problem(&self, window: LengthWindow) -> Result<MProblem> {
        let hi = window.max_len()?;
        if hi > self.depth {
            return Err(Error::invalid(format!("window length {hi} exceeds prepared depth {}", self.depth)));
        }
        let kernel = match &self.base {
            Base::Uniform(t) => Kernel::Uniform(t.clone()),
            Base::Tree(t, _) => Kernel::Tree(t.clone()),
            Base::Instance => {
                // at α = 1 dominance reduces to set inclusion plus length order,
                // which is valid for every α >= 0
                let inst = match &self.source {
                    Source::Symbolic { system, target, radius } => {
                        build_symbolic_instance(system, target, *radius, &window, 1.0, &self.caps)?
                    }
                    Source::Metric { system, subset, eps } => {
                        build_metric_instance(system, subset, *eps, &window, 1.0, &self.caps)?
                    }
                };
                Kernel::Instance(Arc::new(inst), self.caps.nodes)
            }
        };
        Ok(MProblem { kernel, window, upper: self.source.alpha_upper() })
    }
}

#[derive(Debug, Clone)]
enum Kernel {
    Uniform(Arc<UniformTree>),
    Tree(Arc<PrefixTree>),
    Instance(Arc<CoverInstance>, u64),
}

/// Certified bracket `[lo, hi]` on `M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MBracket {
    pub lo: f64,
    pub hi: f64,
    pub exact: bool,
}

/// Interval containing the solution of `M(α) = c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootInterval {
    pub lo: f64,
    pub hi: f64,
    pub exact: bool,
}

impl RootInterval {
    pub fn contains(&self, a: f64) -> bool {
        self.lo <= a && a <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// `M` for one window, reusable across `α`.
#[derive(Debug, Clone)]
pub struct MProblem {
    kernel: Kernel,
    window: LengthWindow,
    upper: f64,
}

impl MProblem {
    pub fn window(&self) -> &LengthWindow {
        &self.window
    }

    pub fn m(&self, alpha: f64) -> Result<MBracket> {
        if alpha.is_nan() || alpha < 0.0 {
            return Err(Error::invalid("alpha must be >= 0"));
        }
        match &self.kernel {
            Kernel::Uniform(t) => {
                let v = t.log_value(&self.window, alpha)?.exp();
                Ok(MBracket { lo: v, hi: v, exact: true })
            }
            Kernel::Tree(t) => {
                let v = t.value(&self.window, alpha)?;
                Ok(MBracket { lo: v, hi: v, exact: true })
            }
            Kernel::Instance(inst, budget) => {
                let s = solve_exact(&inst.with_alpha(alpha), *budget)?;
                Ok(MBracket { lo: s.value_lo, hi: s.value_hi, exact: s.exact })
            }
        }
    }

    /// `ln M`, exact kernels only; avoids overflow for large counts.
    pub fn log_m(&self, alpha: f64) -> Result<MBracket> {
        match &self.kernel {
            Kernel::Uniform(t) => {
                let v = t.log_value(&self.window, alpha)?;
                Ok(MBracket { lo: v, hi: v, exact: true })
            }
            _ => {
                let b = self.m(alpha)?;
                Ok(MBracket { lo: b.lo.ln(), hi: b.hi.ln(), exact: b.exact })
            }
        }
    }

    pub fn root(&self) -> Result<RootInterval> {
        self.root_at(1.0)
    }

    /// Brackets the `α` with `M(α) = level`: `M_lo(lo) >= level` and
    /// `M_hi(hi) <= level`, up to the relative slack.
    pub fn root_at(&self, level: f64) -> Result<RootInterval> {
        let mut exact = true;
        let mut eval = |a: f64| -> Result<MBracket> {
            let b = self.m(a)?;
            exact &= b.exact;
            Ok(b)
        };
        let above = level * (1.0 + REL_SLACK);
        let below = level * (1.0 - REL_SLACK);

        let lo = if eval(0.0)?.lo >= above {
            let (mut a, mut b) = (0.0, self.upper);
            while b - a > ROOT_TOL {
                let mid = 0.5 * (a + b);
                if eval(mid)?.lo >= above {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            a
        } else {
            0.0
        };
        let hi = if eval(0.0)?.hi <= below {
            0.0
        } else {
            let (mut a, mut b) = (lo, self.upper);
            if eval(b)?.hi > below {
                return Err(Error::invalid("cover cost does not fall below the level on the search bracket"));
            }
            while b - a > ROOT_TOL {
                let mid = 0.5 * (a + b);
                if eval(mid)?.hi <= below {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            b
        };
        Ok(RootInterval { lo, hi, exact })
    }
}

/// Window for `N` and `θ`; `θ = 0` uses `cap`.
pub fn window_for(n: usize, theta: Theta, theta0_cap: usize) -> Result<LengthWindow> {
    LengthWindow::new(n, theta, theta.is_zero().then_some(theta0_cap))
}

pub fn m_value(source: &Source, alpha: f64, window: LengthWindow, caps: &Caps, method: Method) -> Result<MBracket> {
    let p = Prepared::new(source, window.max_len()?, caps, method)?;
    p.problem(window)?.m(alpha)
}

pub fn alpha_root(source: &Source, window: LengthWindow, caps: &Caps, method: Method) -> Result<RootInterval> {
    let p = Prepared::new(source, window.max_len()?, caps, method)?;
    p.problem(window)?.root()
}

/// Root for one `N`, or the reason it could not be computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootRow {
    pub n: usize,
    pub alpha_lo: f64,
    pub alpha_hi: f64,
    pub exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub theta: Theta,
    pub scale: Scale,
    /// Length cap used when `θ = 0`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length_cap: Option<usize>,
    pub rows: Vec<RootRow>,
    /// Smallest `α_lo` over the upper half of the `N` range.
    pub tail_lo: f64,
    /// Largest `α_hi` over the upper half of the `N` range.
    pub tail_hi: f64,
}

impl EntropyEstimate {
    pub fn all_exact(&self) -> bool {
        self.rows.iter().all(|r| r.exact && r.error.is_none())
    }

    pub fn row(&self, n: usize) -> Option<&RootRow> {
        self.rows.iter().find(|r| r.n == n)
    }
}

fn check_range(ns: &[usize]) -> Result<()> {
    if ns.len() < 4 {
        return Err(Error::invalid("N range needs at least 4 values"));
    }
    if ns[0] == 0 || ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("N range must be positive and strictly increasing"));
    }
    Ok(())
}

/// Length cap used for `θ = 0` over the given `N` range.
pub fn theta0_cap(ns: &[usize], caps: &Caps) -> usize {
    ns.iter().copied().max().unwrap_or(1) * caps.theta0_cap_factor
}

/// Per-`N` roots with tail statistics over the upper half of the range.
pub fn estimate_entropy(source: &Source, theta: Theta, ns: &[usize], caps: &Caps, method: Method) -> Result<EntropyEstimate> {
    check_range(ns)?;
    let cap = theta0_cap(ns, caps);
    let windows = ns.iter().map(|&n| window_for(n, theta, cap)).collect::<Result<Vec<_>>>()?;
    let depth = windows.iter().map(|w| w.max_len()).collect::<Result<Vec<_>>>()?.into_iter().max().unwrap();
    let prepared = Prepared::new(source, depth, caps, method)?;
    estimate_prepared(&prepared, theta, &windows, cap)
}

/// As [`estimate_entropy`] for explicitly given windows.
pub fn estimate_prepared(prepared: &Prepared, theta: Theta, windows: &[LengthWindow], cap: usize) -> Result<EntropyEstimate> {
    let results: Vec<(usize, Result<RootInterval>)> = windows
        .par_iter()
        .map(|w| (w.n, prepared.problem(*w).and_then(|p| p.root())))
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (n, r) in results {
        match r {
            Ok(iv) => rows.push(RootRow { n, alpha_lo: iv.lo, alpha_hi: iv.hi, exact: iv.exact, error: None }),
            Err(e) => {
                rows.push(RootRow { n, alpha_lo: f64::NAN, alpha_hi: f64::NAN, exact: false, error: Some(e.to_string()) });
                failures.push(e);
            }
        }
    }
    if failures.len() * 2 > rows.len() {
        return Err(failures.swap_remove(0));
    }
    let tail = &rows[rows.len() / 2..];
    let ok = tail.iter().filter(|r| r.error.is_none());
    let tail_lo = ok.clone().map(|r| r.alpha_lo).fold(f64::INFINITY, f64::min);
    let tail_hi = ok.map(|r| r.alpha_hi).fold(f64::NEG_INFINITY, f64::max);
    Ok(EntropyEstimate {
        theta,
        scale: prepared.source().scale(),
        length_cap: theta.is_zero().then_some(cap),
        rows,
        tail_lo,
        tail_hi,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaCurve {
    pub estimates: Vec<EntropyEstimate>,
}

pub fn theta_sweep(source: &Source, grid: &[Theta], ns: &[usize], caps: &Caps, method: Method) -> Result<ThetaCurve> {
    if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("theta grid must be nonempty and strictly increasing"));
    }
    let estimates = grid
        .par_iter()
        .map(|&t| estimate_entropy(source, t, ns, caps, method))
        .collect::<Result<Vec<_>>>()?;
    Ok(ThetaCurve { estimates })
}

/// `Λ(Z, U, N)`, the fewest length-`N` strings covering `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityRow {
    pub n: usize,
    pub log_lambda: f64,
    /// `(1/N) ln Λ`.
    pub value: f64,
    pub exact: bool,
}

pub fn capacity_entropy(source: &Source, ns: &[usize], caps: &Caps, method: Method) -> Result<Vec<CapacityRow>> {
    let depth = ns.iter().copied().max().ok_or_else(|| Error::invalid("empty N range"))?;
    let prepared = Prepared::new(source, depth, caps, method)?;
    ns.par_iter()
        .map(|&n| {
            let p = prepared.problem(LengthWindow::new(n, Theta::ONE, None)?)?;
            let b = p.log_m(0.0)?;
            // at α = 0 every candidate has weight 1, so M counts strings
            let log_lambda = b.hi;
            Ok(CapacityRow { n, log_lambda, value: log_lambda / n as f64, exact: b.exact && b.lo == b.hi })
        })
        .collect()
}
