//! Every law on an instance small enough that each `M` it relies on can be
//! recomputed by exhaustive search over the candidate sets.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::LN_2;
use std::sync::Arc;

use common::{candidates, exhaustive_min, lengths, Steps, Target};
use theta_entropy::cover::{Caps, LengthWindow, Theta};
use theta_entropy::estimate::{m_value, BernoulliMeasure, Method, Source};
use theta_entropy::laws::*;
use theta_entropy::symbolic::{Alphabet, BlockCode, MapSpec, Relabeling, SymbolicNDS, TargetSet};

const NS: [usize; 4] = [1, 2, 3, 4];
const ALPHAS: [f64; 3] = [0.25, LN_2, 1.0];
/// Whole-space scenarios on two symbols need `2^4` cylinders at `N = 4`.
const WHOLE_SPACE_BOUND: usize = 16;
const SMALL_BOUND: usize = 12;

fn th(p: u64, q: u64) -> Theta {
    Theta::new(p, q).unwrap()
}

fn steps_of(system: &SymbolicNDS) -> Steps {
    let step = |m: &MapSpec| match m {
        MapSpec::ShiftPower(k) => *k,
        MapSpec::BlockCode(_) => panic!("oracle covers shift systems only"),
    };
    Steps {
        alphabet: system.alphabet().size(),
        preperiod: system.preperiod().iter().map(step).collect(),
        period: system.period().iter().map(step).collect(),
    }
}

fn target_of(z: &TargetSet, alphabet: usize) -> Target {
    match z {
        TargetSet::WholeSpace => Target::whole(alphabet),
        TargetSet::EventuallyConstantFamily { tail, k_max } => Target::family(alphabet, *tail, *k_max),
        TargetSet::FreeWindow { tail, lo, hi } => Target::window(alphabet, *tail, *lo, *hi),
        TargetSet::PointList(ps) => Target::union(
            ps.iter()
                .map(|p| {
                    let p = p.clone();
                    Target(vec![Arc::new(move |n| vec![p.coord(n)])])
                })
                .collect(),
        ),
        TargetSet::Union(parts) => Target::union(parts.iter().map(|p| target_of(p, alphabet)).collect()),
        TargetSet::Product { left, right, right_size } => Target::product(
            target_of(left, alphabet / right_size),
            target_of(right, *right_size),
            *right_size as u16,
        ),
    }
}

/// Compares both evaluation routes with exhaustive search on every window
/// of the scenario; returns the largest candidate count seen.
fn cross_validate(source: &Source, theta: Theta) -> usize {
    let Source::Symbolic { system, target, radius } = source else { panic!("symbolic only") };
    let steps = steps_of(system);
    let z = target_of(target, steps.alphabet);
    let mut largest = 0;
    for n in NS {
        let lens = lengths(n, theta.numer(), theta.denom(), 0);
        let (universe, sets) = candidates(&steps, &z, *radius, &lens);
        largest = largest.max(sets.len());
        let window = LengthWindow::new(n, theta, None).unwrap();
        for alpha in ALPHAS {
            let want = exhaustive_min(universe, &sets, alpha);
            for method in [Method::Auto, Method::Instance] {
                let got = m_value(source, alpha, window, &Caps::default(), method).unwrap();
                assert!(got.exact, "{method:?} not exact at N={n}");
                assert!(
                    (got.hi - want).abs() <= 1e-12 * want && (got.lo - want).abs() <= 1e-12 * want,
                    "{method:?} N={n} θ={theta} α={alpha}: {} vs oracle {want}",
                    got.hi
                );
            }
        }
    }
    largest
}

/// Cross-validates the sources, then runs the check under both routes.
fn law(sources: &[(Source, Theta)], bound: usize, check: impl Fn(&LawContext) -> theta_entropy::Result<LawReport>) {
    for (s, t) in sources {
        let largest = cross_validate(s, *t);
        assert!(largest <= bound, "{largest} candidates exceed the oracle bound {bound}");
    }
    for method in [Method::Auto, Method::Instance] {
        let ctx = LawContext { method, ..LawContext::new(NS.to_vec()) };
        let report = check(&ctx).unwrap();
        assert_eq!(report.verdict, Verdict::Pass, "{method:?}: {}", serde_json::to_string_pretty(&report).unwrap());
    }
}

fn sym(system: SymbolicNDS, z: TargetSet, r: u32) -> Source {
    Source::symbolic(system, z, r)
}

fn full() -> SymbolicNDS {
    SymbolicNDS::full_shift(2).unwrap()
}

fn example() -> SymbolicNDS {
    SymbolicNDS::two_shift_example()
}

#[test]
fn theta_monotonicity() {
    let src = sym(full(), TargetSet::family(1, 2), 0);
    law(&[(src.clone(), th(1, 2)), (src.clone(), Theta::ONE)], SMALL_BOUND, |ctx| {
        check_theta_monotonicity(&src, 0.3, th(1, 2), Theta::ONE, ctx)
    });
}

#[test]
fn continuity() {
    let src = sym(example(), TargetSet::family(1, 2), 0);
    let sources: Vec<_> = [th(1, 4), th(1, 2), Theta::ONE].into_iter().map(|t| (src.clone(), t)).collect();
    law(&sources, SMALL_BOUND, |ctx| {
        check_continuity_bound(&src, th(1, 4), th(1, 2), ctx, false)?;
        check_continuity_bound(&src, th(1, 2), Theta::ONE, ctx, false)
    });
}

#[test]
fn finite_stability() {
    let parts = vec![TargetSet::family(1, 2), TargetSet::family(0, 3)];
    let mut sources: Vec<_> = parts.iter().map(|p| (sym(example(), p.clone(), 0), th(1, 2))).collect();
    sources.push((sym(example(), TargetSet::Union(parts.clone()), 0), th(1, 2)));
    law(&sources, SMALL_BOUND, |ctx| check_finite_stability(&example(), &parts, 0, th(1, 2), ctx));
}

#[test]
fn closure_stability() {
    let ks = [1, 2, 3, 4, 5, 6];
    let mut sources: Vec<_> = ks.iter().map(|&k| (sym(example(), TargetSet::family(1, k), 0), Theta::ONE)).collect();
    sources.push((sym(example(), TargetSet::WholeSpace, 0), Theta::ONE));
    // depth 4 reads coordinates 0, 2, 3, 4
    assert_eq!(closure_threshold(&example(), 1, 0, 4), 5);
    law(&sources, WHOLE_SPACE_BOUND, |ctx| check_closure_stability(&example(), 1, &ks, 0, Theta::ONE, ctx));
}

#[test]
fn power_rule() {
    let z = TargetSet::family(1, 2);
    let square = full().power(2).unwrap();
    let sources = [
        (sym(full(), z.clone(), 0), Theta::ONE),
        (sym(full(), z.clone(), 1), Theta::ONE),
        (sym(square.clone(), z.clone(), 0), Theta::ONE),
        (sym(square, z.clone(), 1), Theta::ONE),
    ];
    law(&sources, SMALL_BOUND, |ctx| check_power_rule(&full(), 2, &z, &[0, 1], Theta::ONE, ctx));
}

#[test]
fn shift_lemma() {
    // per-N equality needs every coordinate read up to N = 4 to be free
    let z = TargetSet::family(1, 6);
    let image = z.shift_image(2).unwrap();
    let sources = [
        (sym(example().tail(1).unwrap(), z.clone(), 0), Theta::ONE),
        (sym(example().tail(2).unwrap(), image, 0), Theta::ONE),
    ];
    law(&sources, WHOLE_SPACE_BOUND, |ctx| check_shift_lemma(&example(), &z, 1, 0, Theta::ONE, ctx));
}

#[test]
fn invariance() {
    let sources = [
        (sym(example().tail(1).unwrap(), TargetSet::WholeSpace, 0), Theta::ONE),
        (sym(example().tail(2).unwrap(), TargetSet::WholeSpace, 0), Theta::ONE),
    ];
    law(&sources, WHOLE_SPACE_BOUND, |ctx| {
        check_invariance(&example(), &TargetSet::WholeSpace, Invariance::Invariant, 1, 2, 0, Theta::ONE, ctx)
    });
}

#[test]
fn commutation() {
    let two = Alphabet::new(2).unwrap();
    let cube = SymbolicNDS::shifts(two, &[], &[3]).unwrap();
    let sources = [(sym(cube, TargetSet::WholeSpace, 0), Theta::ONE)];
    law(&sources, WHOLE_SPACE_BOUND, |ctx| {
        check_commutation(two, &MapSpec::ShiftPower(1), &MapSpec::ShiftPower(2), &TargetSet::WholeSpace, 0, Theta::ONE, ctx)
    });
}

#[test]
fn product_bounds() {
    let z = TargetSet::family(1, 2);
    let w = TargetSet::family(0, 1);
    let prod = full().product(&full()).unwrap();
    let sources = [
        (sym(prod, TargetSet::product(z.clone(), w.clone(), Alphabet::new(2).unwrap()), 0), th(1, 2)),
        (sym(full(), z.clone(), 0), th(1, 2)),
        (sym(full(), w.clone(), 0), th(1, 2)),
        (sym(full(), w.clone(), 0), Theta::ONE),
    ];
    law(&sources, SMALL_BOUND, |ctx| check_product_bounds(&full(), &z, &full(), &w, 0, th(1, 2), ctx));
}

#[test]
fn conjugacy() {
    let z = TargetSet::family(1, 3);
    let swap = Relabeling::swap01();
    let sources = [
        (sym(example(), z.clone(), 0), th(1, 2)),
        (sym(example().relabel(&swap).unwrap(), z.relabel(&swap).unwrap(), 0), th(1, 2)),
    ];
    law(&sources, SMALL_BOUND, |ctx| check_conjugacy(&example(), &z, &swap, 0, th(1, 2), ctx));
}

#[test]
fn factor() {
    let xor = BlockCode::new(Alphabet::new(2).unwrap(), 0, 1, vec![0, 1, 1, 0]).unwrap();
    let sources = [(sym(full(), TargetSet::WholeSpace, 0), Theta::ONE)];
    law(&sources, WHOLE_SPACE_BOUND, |ctx| check_factor_inequality(&full(), &xor, &TargetSet::WholeSpace, 0, Theta::ONE, ctx));
}

#[test]
fn billingsley() {
    let z = TargetSet::family(1, 2);
    let mu = BernoulliMeasure::uniform(2).unwrap();
    let sources = [(sym(full(), z.clone(), 0), th(1, 2))];
    law(&sources, SMALL_BOUND, |ctx| check_billingsley(&full(), &mu, &z, 0, th(1, 2), ctx));
}

#[test]
fn refinement() {
    let z = TargetSet::family(1, 2);
    let sources = [(sym(full(), z.clone(), 0), th(1, 2)), (sym(full(), z.clone(), 1), th(1, 2))];
    law(&sources, SMALL_BOUND, |ctx| check_refinement(&full(), &z, &[0, 1], th(1, 2), ctx));
}

#[test]
fn every_law_has_an_oracle_scenario() {
    let covered: BTreeMap<&str, ()> = [
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
    ]
    .into_iter()
    .map(|id| (id, ()))
    .collect();
    for id in LAW_IDS {
        assert!(covered.contains_key(id), "{id} lacks an oracle scenario");
    }
}

#[test]
fn oracle_agrees_with_closed_forms() {
    // full shift: 2^N cylinders of length N, so M(α) = 2^N e^{-αN}
    let (universe, sets) = candidates(&Steps::full(2), &Target::whole(2), 0, &[3]);
    assert_eq!((universe, sets.len()), (8, 8));
    let v = exhaustive_min(universe, &sets, 0.5);
    assert!((v - 8.0 * (-1.5f64).exp()).abs() < 1e-12);
    // the example system reads coordinates 0, 2, 3 for N = 3
    let (universe, sets) = candidates(&Steps::example(), &Target::whole(2), 0, &[3]);
    assert_eq!((universe, sets.len()), (8, 8));
    // a point has a single candidate per length
    let mut word = BTreeMap::new();
    word.insert(0, 1u16);
    let (universe, sets) = candidates(&Steps::full(2), &Target::point(word, 0), 0, &[2, 3]);
    assert_eq!((universe, sets.len()), (1, 1));
    assert_eq!(sets[0].1, 3);
}
