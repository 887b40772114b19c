//! The shipped scenarios run by the `laws` command.

use rayon::prelude::*;

use super::checks::*;
use super::{LawContext, LawReport};
use crate::cover::{Caps, Theta};
use crate::error::Result;
use crate::estimate::{BernoulliMeasure, Method, Source};
use crate::metric::FiniteMetricNDS;
use crate::symbolic::{Alphabet, BlockCode, MapSpec, Relabeling, SymbolicNDS, TailedPoint, TargetSet};

pub const LAW_IDS: [&str; 13] = [
    "theta_monotonicity",
    "continuity",
    "finite_stability",
    "closure_stability",
    "power_rule",
    "shift_lemma",
    "invariance",
    "commutation",
    "product_bounds",
    "conjugacy",
    "factor",
    "billingsley",
    "refinement",
];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SuiteOptions {
    /// Substring matched against law ids.
    pub filter: Option<String>,
    pub caps: Caps,
    /// Negative control: evaluate the continuity bound on wrong windows.
    pub corrupt_windows: bool,
}

type Check = Box<dyn Fn() -> Result<LawReport> + Send + Sync>;

fn th(p: u64, q: u64) -> Theta {
    Theta::new(p, q).expect("valid theta literal")
}

fn example() -> SymbolicNDS {
    SymbolicNDS::two_shift_example()
}

fn full(size: usize) -> SymbolicNDS {
    SymbolicNDS::full_shift(size).expect("alphabet size >= 2")
}

fn sym(system: SymbolicNDS, target: TargetSet, r: u32) -> Source {
    Source::symbolic(system, target, r)
}

fn metric_sample() -> Source {
    let pos = [0.0, 0.1, 0.35, 0.5, 0.8, 1.0];
    let dist = pos.iter().map(|a| pos.iter().map(|b| f64::abs(a - b)).collect()).collect();
    let system = FiniteMetricNDS::autonomous(dist, vec![1, 3, 5, 0, 2, 4]).expect("valid metric table");
    Source::Metric { system, subset: (0..6).collect(), eps: 0.3 }
}

fn scenarios(opts: &SuiteOptions) -> Vec<(&'static str, Check)> {
    let ctx = LawContext { caps: opts.caps, ..LawContext::new((4..=10).collect()) };
    let mut out: Vec<(&'static str, Check)> = Vec::new();
    let mut add = |id: &'static str, f: Check| out.push((id, f));
    let two = Alphabet::new(2).expect("two symbols");
    let half = th(1, 2);
    let quarter = th(1, 4);

    // theta monotonicity
    {
        let c = ctx.clone();
        add("theta_monotonicity", Box::new(move || check_theta_monotonicity(&sym(full(2), TargetSet::WholeSpace, 0), std::f64::consts::LN_2, half, Theta::ONE, &c)));
        let c = ctx.clone();
        add("theta_monotonicity", Box::new(move || check_theta_monotonicity(&sym(example(), TargetSet::family(1, 2), 0), 0.1, quarter, Theta::ONE, &c)));
        let c = LawContext { method: Method::Instance, ..ctx.with_ns((4..=7).collect()) };
        add("theta_monotonicity", Box::new(move || check_theta_monotonicity(&metric_sample(), 0.5, half, Theta::ONE, &c)));
    }

    // continuity bound with truncation certificates
    let corrupt = opts.corrupt_windows;
    for (theta, phi) in [(quarter, half), (half, Theta::ONE)] {
        for target in [TargetSet::WholeSpace, TargetSet::family(1, 40)] {
            let c = ctx.clone();
            add("continuity", Box::new(move || check_continuity_bound(&sym(example(), target.clone(), 0), theta, phi, &c, corrupt)));
        }
    }
    {
        let c = ctx.clone();
        let single = TargetSet::points(vec![TailedPoint::constant(0)]).expect("nonempty");
        add("continuity", Box::new(move || check_continuity_bound(&sym(example(), single.clone(), 0), half, Theta::ONE, &c, corrupt)));
        let c = ctx.clone();
        add("continuity", Box::new(move || check_continuity_bound(&sym(example(), TargetSet::family(1, 2), 0), quarter, half, &c, corrupt)));
    }

    // finite stability
    {
        let c = ctx.clone();
        let parts = vec![TargetSet::family(1, 2), TargetSet::family(0, 3)];
        add("finite_stability", Box::new(move || check_finite_stability(&example(), &parts, 0, half, &c)));
        let c = ctx.clone();
        let same = vec![TargetSet::family(1, 3), TargetSet::family(1, 3)];
        add("finite_stability", Box::new(move || check_finite_stability(&example(), &same, 0, half, &c)));
        let c = ctx.clone();
        let with_whole = vec![TargetSet::WholeSpace, TargetSet::family(1, 2)];
        add("finite_stability", Box::new(move || check_finite_stability(&example(), &with_whole, 0, Theta::ONE, &c)));
    }

    // closure stability
    for theta in [half, Theta::ONE] {
        let c = ctx.clone();
        add("closure_stability", Box::new(move || check_closure_stability(&example(), 1, &[1, 2, 5, 10, 40], 0, theta, &c)));
    }

    // power rule
    {
        let c = ctx.with_ns((4..=12).collect());
        add("power_rule", Box::new(move || check_power_rule(&full(2), 2, &TargetSet::WholeSpace, &[0, 1], Theta::ONE, &c)));
        let c = ctx.with_ns((4..=12).collect());
        add("power_rule", Box::new(move || check_power_rule(&full(2), 3, &TargetSet::WholeSpace, &[0, 1, 2], Theta::ONE, &c)));
        let c = ctx.clone();
        add("power_rule", Box::new(move || check_power_rule(&example(), 1, &TargetSet::WholeSpace, &[0], half, &c)));
    }

    // shift lemma
    for (target, k) in [(TargetSet::WholeSpace, 1), (TargetSet::family(1, 40), 1), (TargetSet::family(1, 40), 3)] {
        let c = ctx.clone();
        add("shift_lemma", Box::new(move || check_shift_lemma(&example(), &target, k, 0, half, &c)));
    }

    // invariance corollaries
    {
        let c = ctx.clone();
        add("invariance", Box::new(move || check_invariance(&example(), &TargetSet::WholeSpace, Invariance::Invariant, 1, 3, 0, half, &c)));
        let c = ctx.clone();
        add("invariance", Box::new(move || check_invariance(&example(), &TargetSet::family(1, 40), Invariance::Forward, 2, 3, 0, half, &c)));
        let c = ctx.clone();
        add("invariance", Box::new(move || check_invariance(&example(), &TargetSet::family(1, 3), Invariance::Invariant, 2, 2, 0, half, &c)));
    }

    // commutation
    {
        let c = ctx.clone();
        add("commutation", Box::new(move || check_commutation(two, &MapSpec::ShiftPower(1), &MapSpec::ShiftPower(2), &TargetSet::WholeSpace, 0, half, &c)));
        let c = ctx.with_ns((3..=6).collect());
        let swap = Relabeling::swap01().as_block_code(two).expect("width-1 code");
        add("commutation", Box::new(move || check_commutation(two, &MapSpec::ShiftPower(1), &swap, &TargetSet::WholeSpace, 0, half, &c)));
        let c = ctx.clone();
        add("commutation", Box::new(move || check_commutation(two, &MapSpec::ShiftPower(1), &MapSpec::ShiftPower(1), &TargetSet::WholeSpace, 0, half, &c)));
    }

    // product bounds
    {
        let c = ctx.with_ns((3..=7).collect());
        add("product_bounds", Box::new(move || check_product_bounds(&full(2), &TargetSet::WholeSpace, &full(2), &TargetSet::WholeSpace, 0, half, &c)));
        let c = ctx.with_ns((3..=7).collect());
        let single = TargetSet::points(vec![TailedPoint::constant(1)]).expect("nonempty");
        add("product_bounds", Box::new(move || check_product_bounds(&full(2), &TargetSet::WholeSpace, &full(2), &single, 0, half, &c)));
        let c = ctx.with_ns((3..=7).collect());
        add("product_bounds", Box::new(move || check_product_bounds(&full(2), &TargetSet::family(1, 3), &full(2), &TargetSet::WholeSpace, 0, half, &c)));
    }

    // conjugacy
    for (target, perm) in [
        (TargetSet::WholeSpace, Relabeling::swap01()),
        (TargetSet::family(1, 6), Relabeling::swap01()),
        (TargetSet::family(1, 6), Relabeling::identity(2)),
    ] {
        let c = ctx.clone();
        add("conjugacy", Box::new(move || check_conjugacy(&example(), &target, &perm, 0, half, &c)));
    }

    // factor inequality
    {
        let xor = BlockCode::new(two, 0, 1, vec![0, 1, 1, 0]).expect("xor table");
        let identity = BlockCode::new(two, 0, 0, vec![0, 1]).expect("identity table");
        let swap = BlockCode::new(two, 0, 0, vec![1, 0]).expect("swap table");
        for code in [xor, identity, swap] {
            let c = ctx.clone();
            add("factor", Box::new(move || check_factor_inequality(&full(2), &code, &TargetSet::WholeSpace, 0, half, &c)));
        }
    }

    // billingsley
    {
        let uniform = BernoulliMeasure::uniform(2).expect("two symbols");
        for system in [full(2), example()] {
            let c = ctx.clone();
            let mu = uniform.clone();
            add("billingsley", Box::new(move || check_billingsley(&system, &mu, &TargetSet::WholeSpace, 0, half, &c)));
        }
        let c = ctx.clone();
        let mu = uniform.clone();
        let single = TargetSet::points(vec![TailedPoint::new(0, 0, vec![1, 0, 1], 0)]).expect("nonempty");
        add("billingsley", Box::new(move || check_billingsley(&full(2), &mu, &single, 0, half, &c)));
        let c = ctx.clone();
        let biased = BernoulliMeasure::new(vec![0.3, 0.7]).expect("probability vector");
        add("billingsley", Box::new(move || check_billingsley(&full(2), &biased, &TargetSet::WholeSpace, 0, half, &c)));
    }

    // refinement
    {
        let c = ctx.clone();
        add("refinement", Box::new(move || check_refinement(&full(2), &TargetSet::WholeSpace, &[0, 1, 2], half, &c)));
        let c = ctx.clone();
        add("refinement", Box::new(move || check_refinement(&example(), &TargetSet::family(1, 3), &[0, 1, 2], half, &c)));
    }
    out
}

/// Runs every shipped scenario whose law id contains the filter, in a
/// fixed order.
pub fn run_suite(opts: &SuiteOptions) -> Result<Vec<LawReport>> {
    let selected: Vec<(&'static str, Check)> = scenarios(opts)
        .into_iter()
        .filter(|(id, _)| opts.filter.as_deref().is_none_or(|f| id.contains(f)))
        .collect();
    selected.par_iter().map(|(_, check)| check()).collect()
}
