use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::truncation::{optimal_cover, truncation_transform};
use super::{LawContext, LawReport, Recorder};
use crate::cover::{LengthWindow, Theta, REL_SLACK};
use crate::error::{Error, Result};
use crate::estimate::{
    capacity_entropy, estimate_entropy, estimate_prepared, local_entropy_sequence, theta0_cap, window_for,
    BernoulliMeasure, EntropyEstimate, MBracket, Prepared, RootRow, Source,
};
use crate::metric::FiniteMetricNDS;
use crate::symbolic::{Alphabet, BlockCode, MapSpec, Relabeling, Symbol, SymbolicNDS, TailedPoint, TargetSet};

/// `α` values at which M brackets are compared.
pub const ALPHA_SAMPLES: [f64; 3] = [0.25, std::f64::consts::LN_2, 1.0];

fn estimate(source: &Source, theta: Theta, ctx: &LawContext) -> Result<EntropyEstimate> {
    estimate_entropy(source, theta, &ctx.ns, &ctx.caps, ctx.method)
}

fn windows(theta: Theta, ctx: &LawContext) -> Result<Vec<LengthWindow>> {
    let cap = theta0_cap(&ctx.ns, &ctx.caps);
    ctx.ns.iter().map(|&n| window_for(n, theta, cap)).collect()
}

fn prepare(source: &Source, theta: Theta, ctx: &LawContext) -> Result<Prepared> {
    let depth = windows(theta, ctx)?.iter().map(|w| w.max_len()).collect::<Result<Vec<_>>>()?;
    Prepared::new(source, depth.into_iter().max().unwrap_or(1), &ctx.caps, ctx.method)
}

/// M brackets at [`ALPHA_SAMPLES`] for every `N`.
fn m_table(source: &Source, theta: Theta, ctx: &LawContext) -> Result<Vec<Vec<MBracket>>> {
    let prepared = prepare(source, theta, ctx)?;
    windows(theta, ctx)?
        .into_iter()
        .map(|w| {
            let p = prepared.problem(w)?;
            ALPHA_SAMPLES.iter().map(|&a| p.m(a)).collect()
        })
        .collect()
}

fn same_rows(a: &[RootRow], b: &[RootRow]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| {
            x.n == y.n && x.alpha_lo.to_bits() == y.alpha_lo.to_bits() && x.alpha_hi.to_bits() == y.alpha_hi.to_bits() && x.exact == y.exact
        })
}

fn same_brackets(a: &[Vec<MBracket>], b: &[Vec<MBracket>]) -> bool {
    a.len() == b.len()
        && a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| {
            x.lo.to_bits() == y.lo.to_bits() && x.hi.to_bits() == y.hi.to_bits() && x.exact == y.exact
        })
}

/// Largest per-`N` distance between root midpoints.
fn max_root_gap(a: &EntropyEstimate, b: &EntropyEstimate) -> f64 {
    a.rows
        .iter()
        .zip(&b.rows)
        .map(|(x, y)| (x.alpha_lo - y.alpha_lo).abs().max((x.alpha_hi - y.alpha_hi).abs()))
        .fold(0.0, f64::max)
}

fn tails(e: &EntropyEstimate) -> serde_json::Value {
    json!({ "theta": e.theta.to_string(), "tail_lo": e.tail_lo, "tail_hi": e.tail_hi, "rows": e.rows })
}

fn describe(source: &Source) -> String {
    match source {
        Source::Symbolic { target, radius, .. } => format!("{} r={radius}", target_name(target)),
        Source::Metric { system, subset, eps } => format!("metric P={} |Z|={} eps={eps}", system.points(), subset.len()),
    }
}

fn map_name(m: &MapSpec) -> String {
    match m {
        MapSpec::ShiftPower(k) => format!("σ^{k}"),
        MapSpec::BlockCode(b) => format!("code{:?}", b.window()),
    }
}

fn system_name(s: &SymbolicNDS) -> String {
    let list = |v: &[MapSpec]| v.iter().map(map_name).collect::<Vec<_>>().join(",");
    format!("[{}|{}]", list(s.preperiod()), list(s.period()))
}

fn target_name(t: &TargetSet) -> String {
    match t {
        TargetSet::WholeSpace => "whole".into(),
        TargetSet::PointList(ps) => format!("points[{}]", ps.len()),
        TargetSet::EventuallyConstantFamily { tail, k_max } => format!("family(tail={tail},k={k_max})"),
        TargetSet::FreeWindow { tail, lo, hi } => format!("window(tail={tail},{lo}..{hi})"),
        TargetSet::Union(parts) => parts.iter().map(target_name).collect::<Vec<_>>().join("∪"),
        TargetSet::Product { left, right, .. } => format!("{}×{}", target_name(left), target_name(right)),
    }
}

pub fn check_theta_monotonicity(source: &Source, alpha: f64, theta: Theta, phi: Theta, ctx: &LawContext) -> Result<LawReport> {
    if theta >= phi {
        return Err(Error::invalid("theta monotonicity needs θ < φ"));
    }
    let mut rec = Recorder::new("theta_monotonicity", format!("{} θ={theta} φ={phi} α={alpha}", describe(source)));
    rec.tol("tail", ctx.tol);
    rec.tol("m_relative", REL_SLACK);
    let cap = theta0_cap(&ctx.ns, &ctx.caps);
    let prepared = prepare(source, theta, ctx)?;
    let mut levels = Vec::new();
    for &n in &ctx.ns {
        let a = prepared.problem(window_for(n, theta, cap)?)?.m(alpha)?;
        let b = prepared.problem(window_for(n, phi, cap)?)?.m(alpha)?;
        let row = json!({ "n": n, "m_theta": a, "m_phi": b });
        if a.lo > b.hi * (1.0 + REL_SLACK) {
            rec.expect(false, json!({ "m_level": row }));
        } else if a.hi > b.lo * (1.0 + REL_SLACK) {
            rec.skip(format!("brackets overlap at N={n}"));
        }
        levels.push(row);
    }
    rec.note("m_level", levels);
    let et = estimate(source, theta, ctx)?;
    let ep = estimate(source, phi, ctx)?;
    rec.expect(et.tail_lo <= ep.tail_lo + ctx.tol, json!({ "tail_lo": [et.tail_lo, ep.tail_lo] }));
    rec.expect(et.tail_hi <= ep.tail_hi + ctx.tol, json!({ "tail_hi": [et.tail_hi, ep.tail_hi] }));
    rec.note("theta", tails(&et));
    rec.note("phi", tails(&ep));
    Ok(rec.finish())
}

/// `corrupt` swaps the `φ` windows for `θ = 1` windows (negative control).
pub fn check_continuity_bound(source: &Source, theta: Theta, phi: Theta, ctx: &LawContext, corrupt: bool) -> Result<LawReport> {
    if theta >= phi {
        return Err(Error::invalid("continuity bound needs θ < φ"));
    }
    let mut rec = Recorder::new("continuity", format!("{} θ={theta} φ={phi}", describe(source)));
    rec.tol("tail", ctx.tol);
    let cap = theta0_cap(&ctx.ns, &ctx.caps);
    let prepared = prepare(source, theta, ctx)?;
    let et = estimate_prepared(&prepared, theta, &windows(theta, ctx)?, cap)?;
    let phi_windows = windows(if corrupt { Theta::ONE } else { phi }, ctx)?;
    let ep = estimate_prepared(&prepared, phi, &phi_windows, cap)?;
    if corrupt {
        rec.note("corrupted_windows", true);
    }
    rec.note("theta", tails(&et));
    rec.note("phi", tails(&ep));
    if !et.all_exact() || !ep.all_exact() {
        rec.skip("root brackets are not exact");
        return Ok(rec.finish());
    }
    rec.expect(et.tail_hi <= ep.tail_hi + ctx.tol, json!({ "lower": { "tail_hi_theta": et.tail_hi, "tail_hi_phi": ep.tail_hi } }));
    if theta.is_zero() {
        rec.note("upper", "not applicable at θ = 0");
    } else {
        let ratio = phi.to_f64() / theta.to_f64();
        rec.expect(
            ep.tail_hi <= ratio * et.tail_hi + ctx.tol,
            json!({ "upper": { "tail_hi_phi": ep.tail_hi, "ratio": ratio, "tail_hi_theta": et.tail_hi } }),
        );
    }

    // per-N: the truncated optimal θ-cover certifies the φ root
    let symbolic_auto = matches!(source, Source::Symbolic { .. }) && ctx.method == crate::estimate::Method::Auto;
    if !symbolic_auto {
        rec.note("certificates", "not extracted for explicit instances");
        return Ok(rec.finish());
    }
    let mut certs = Vec::new();
    for ((w, row_t), row_p) in windows(theta, ctx)?.iter().zip(&et.rows).zip(&ep.rows) {
        let s = row_t.alpha_hi;
        let upper = if theta.is_zero() { (cap + 1) as f64 } else { theta.upper_bound(w.n) };
        let (cover, _) = optimal_cover(&prepared, w, s)?;
        let t = truncation_transform(&prepared, &cover, w.n, theta, phi, s, upper)?;
        rec.expect(t.valid(), json!({ "n": w.n, "certificate": t }));
        rec.expect(
            row_p.alpha_lo <= t.t_n + ctx.tol,
            json!({ "n": w.n, "root_phi_lo": row_p.alpha_lo, "t_n": t.t_n }),
        );
        certs.push(json!({ "n": w.n, "s": s, "t_n": t.t_n, "valid": t.valid(), "lengths": t.cover.lengths() }));
    }
    rec.note("certificates", certs);
    Ok(rec.finish())
}

pub fn check_finite_stability(system: &SymbolicNDS, parts: &[TargetSet], radius: u32, theta: Theta, ctx: &LawContext) -> Result<LawReport> {
    if parts.is_empty() {
        return Err(Error::invalid("finite stability needs at least one part"));
    }
    let union = Source::symbolic(system.clone(), TargetSet::Union(parts.to_vec()), radius);
    let sources: Vec<Source> = parts.iter().map(|p| Source::symbolic(system.clone(), p.clone(), radius)).collect();
    let mut rec = Recorder::new("finite_stability", format!("{} {} θ={theta}", system_name(system), describe(&union)));
    let slack = (parts.len() as f64).ln();
    rec.tol("tail", ctx.tol);
    rec.tol("m_relative", REL_SLACK);
    rec.tol("union_excess_times_n", slack);

    let mu = m_table(&union, theta, ctx)?;
    let mp = sources.iter().map(|s| m_table(s, theta, ctx)).collect::<Result<Vec<_>>>()?;
    for (i, &n) in ctx.ns.iter().enumerate() {
        for (j, &a) in ALPHA_SAMPLES.iter().enumerate() {
            let u = mu[i][j];
            let max = mp.iter().map(|t| t[i][j].lo).fold(0.0, f64::max);
            let sum: f64 = mp.iter().map(|t| t[i][j].hi).sum();
            rec.expect(u.hi >= max * (1.0 - REL_SLACK), json!({ "n": n, "alpha": a, "union": u, "max_parts": max }));
            rec.expect(u.lo <= sum * (1.0 + REL_SLACK), json!({ "n": n, "alpha": a, "union": u, "sum_parts": sum }));
        }
    }

    let eu = estimate(&union, theta, ctx)?;
    let ep = sources.iter().map(|s| estimate(s, theta, ctx)).collect::<Result<Vec<_>>>()?;
    for (i, row) in eu.rows.iter().enumerate() {
        let max_lo = ep.iter().map(|e| e.rows[i].alpha_lo).fold(0.0, f64::max);
        let max_hi = ep.iter().map(|e| e.rows[i].alpha_hi).fold(0.0, f64::max);
        rec.expect(row.alpha_hi + ctx.tol >= max_lo, json!({ "n": row.n, "union": row, "max_parts_lo": max_lo }));
        rec.expect(
            row.alpha_lo <= max_hi + slack / row.n as f64 + ctx.tol,
            json!({ "n": row.n, "union": row, "max_parts_hi": max_hi }),
        );
    }
    let max_tail = ep.iter().map(|e| e.tail_hi).fold(0.0, f64::max);
    let n_tail = eu.rows[eu.rows.len() / 2].n;
    rec.expect(eu.tail_hi + ctx.tol >= max_tail, json!({ "tail_hi_union": eu.tail_hi, "max_tail_hi_parts": max_tail }));
    rec.expect(
        eu.tail_hi <= max_tail + slack / n_tail as f64 + ctx.tol,
        json!({ "tail_hi_union": eu.tail_hi, "max_tail_hi_parts": max_tail }),
    );
    rec.note("tail_gap", eu.tail_hi - max_tail);
    rec.note("union", tails(&eu));
    rec.note("parts", ep.iter().map(tails).collect::<Vec<_>>());
    Ok(rec.finish())
}

/// Smallest `k_max` whose family projects onto every coordinate read by
/// strings of length up to `depth`.
pub fn closure_threshold(system: &SymbolicNDS, tail: Symbol, radius: u32, depth: usize) -> i64 {
    let coords = system.dependence_coords(depth, radius);
    let a = system.alphabet();
    let bound = coords.iter().map(|c| c.abs()).max().unwrap_or(0) + 1;
    (1..=bound)
        .find(|&k| {
            let z = TargetSet::family(tail, k);
            coords.iter().all(|&c| z.allowed_at(c, a).is_some_and(|s| s.len() == a.size()))
        })
        .unwrap_or(bound)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosureRow {
    pub k_max: i64,
    pub tail_hi: f64,
    pub identical: bool,
    pub smaller_at: Vec<usize>,
}

pub fn check_closure_stability(system: &SymbolicNDS, tail: Symbol, ks: &[i64], radius: u32, theta: Theta, ctx: &LawContext) -> Result<LawReport> {
    if theta.is_zero() {
        return Err(Error::invalid("closure stability is checked for θ > 0"));
    }
    let mut rec = Recorder::new("closure_stability", format!("{} family(tail={tail}) r={radius} θ={theta}", system_name(system)));
    rec.tol("tail", ctx.tol);
    let depth = windows(theta, ctx)?.iter().map(|w| w.max_len()).collect::<Result<Vec<_>>>()?.into_iter().max().unwrap();
    let threshold = closure_threshold(system, tail, radius, depth);
    rec.note("threshold", threshold);
    rec.note("max_coordinate", system.dependence_coords(depth, radius).iter().map(|c| c.abs()).max());
    let whole = estimate(&Source::symbolic(system.clone(), TargetSet::WholeSpace, radius), theta, ctx)?;
    let mut sweep: BTreeSet<i64> = ks.iter().copied().filter(|&k| k >= 1).collect();
    sweep.insert(threshold);
    if threshold > 1 {
        sweep.insert(threshold - 1);
    }
    let mut rows = Vec::new();
    for k in sweep {
        let e = estimate(&Source::symbolic(system.clone(), TargetSet::family(tail, k), radius), theta, ctx)?;
        let identical = same_rows(&e.rows, &whole.rows);
        let smaller_at: Vec<usize> = e.rows.iter().zip(&whole.rows).filter(|(a, b)| a.alpha_hi < b.alpha_lo).map(|(a, _)| a.n).collect();
        rec.expect(e.tail_hi <= whole.tail_hi + ctx.tol, json!({ "k_max": k, "subset_monotonicity": [e.tail_hi, whole.tail_hi] }));
        if k >= threshold {
            rec.expect(identical, json!({ "k_max": k, "rows": e.rows, "whole": whole.rows }));
        } else {
            rec.expect(!smaller_at.is_empty(), json!({ "k_max": k, "below_threshold_not_smaller": e.rows }));
        }
        rows.push(ClosureRow { k_max: k, tail_hi: e.tail_hi, identical, smaller_at });
    }
    rec.note("sweep", rows);
    rec.note("whole", tails(&whole));
    Ok(rec.finish())
}

pub fn check_power_rule(system: &SymbolicNDS, m: usize, target: &TargetSet, radii: &[u32], theta: Theta, ctx: &LawContext) -> Result<LawReport> {
    let power = system.power(m)?;
    let mut rec = Recorder::new("power_rule", format!("{} {} m={m} θ={theta}", system_name(system), target_name(target)));
    rec.tol("tail", ctx.tol);
    let base_at = |r: u32| estimate(&Source::symbolic(system.clone(), target.clone(), r), theta, ctx);
    let power_at = |r: u32| estimate(&Source::symbolic(power.clone(), target.clone(), r), theta, ctx);
    let mut sweep = Vec::new();
    for &r in radii {
        let b = base_at(r)?;
        let p = power_at(r)?;
        rec.expect(
            p.tail_hi <= m as f64 * b.tail_hi + ctx.tol,
            json!({ "radius": r, "tail_hi_power": p.tail_hi, "m_times_base": m as f64 * b.tail_hi }),
        );
        sweep.push(json!({ "radius": r, "base": b.tail_hi, "power": p.tail_hi }));
    }
    rec.note("sweep", sweep);

    let r_m = (m - 1) as u32;
    let p = power_at(r_m)?;
    let b = base_at(0)?;
    let gap = p.tail_hi - m as f64 * b.tail_hi;
    let eq_tol = (2 * r_m + 1) as f64 * (system.alphabet().size() as f64).ln() / ctx.ns[0] as f64;
    rec.note("equality", json!({ "radius": r_m, "power": tails(&p), "base_r0": b.tail_hi, "gap": gap }));
    if system.is_autonomous() {
        rec.tol("equality", eq_tol);
        rec.expect(gap.abs() <= eq_tol, json!({ "equality_radius": r_m, "gap": gap }));
    } else {
        rec.note("equality_checked", false);
    }
    Ok(rec.finish())
}

pub fn check_shift_lemma(system: &SymbolicNDS, target: &TargetSet, k: usize, radius: u32, theta: Theta, ctx: &LawContext) -> Result<LawReport> {
    let mut rec = Recorder::new("shift_lemma", format!("{} {} k={k} r={radius} θ={theta}", system_name(system), target_name(target)));
    rec.tol("per_n", ctx.tol);
    let step = match system.map(k) {
        MapSpec::ShiftPower(s) => *s as i64,
        MapSpec::BlockCode(_) => {
            rec.skip("image under a block code is not computed");
            return Ok(rec.finish());
        }
    };
    let image = target.shift_image(step)?;
    let lhs = Source::symbolic(system.tail(k)?, target.clone(), radius);
    let rhs = Source::symbolic(system.tail(k + 1)?, image.clone(), radius);
    let el = estimate(&lhs, theta, ctx)?;
    let er = estimate(&rhs, theta, ctx)?;
    let gap = max_root_gap(&el, &er);
    rec.expect(gap <= ctx.tol, json!({ "max_root_gap": gap, "lhs": el.rows, "rhs": er.rows }));
    let roots_identical = same_rows(&el.rows, &er.rows);
    let m_identical = same_brackets(&m_table(&lhs, theta, ctx)?, &m_table(&rhs, theta, ctx)?);
    rec.note("image", target_name(&image));
    rec.note("roots_identical", roots_identical);
    rec.note("m_identical", m_identical);
    rec.note("lhs", tails(&el));
    rec.note("rhs", tails(&er));
    Ok(rec.finish())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Invariance {
    /// `f_k(Z) ⊆ Z` for every `k`.
    Forward,
    /// `f_k(Z) ⊇ Z` for every `k`.
    Backward,
    Invariant,
}

#[allow(clippy::too_many_arguments)]
pub fn check_invariance(
    system: &SymbolicNDS,
    target: &TargetSet,
    class: Invariance,
    i: usize,
    j: usize,
    radius: u32,
    theta: Theta,
    ctx: &LawContext,
) -> Result<LawReport> {
    if i == 0 || i > j {
        return Err(Error::invalid("invariance check needs 1 <= i <= j"));
    }
    let mut rec = Recorder::new("invariance", format!("{} {} {class:?} i={i} j={j} θ={theta}", system_name(system), target_name(target)));
    rec.tol("tail", ctx.tol);
    let ei = estimate(&Source::symbolic(system.tail(i)?, target.clone(), radius), theta, ctx)?;
    let ej = estimate(&Source::symbolic(system.tail(j)?, target.clone(), radius), theta, ctx)?;
    let le = |a: f64, b: f64| a <= b + ctx.tol;
    let (up, down) = match class {
        Invariance::Forward => (true, false),
        Invariance::Backward => (false, true),
        Invariance::Invariant => (true, true),
    };
    for (name, a, b) in [("tail_lo", ei.tail_lo, ej.tail_lo), ("tail_hi", ei.tail_hi, ej.tail_hi)] {
        if up {
            rec.expect(le(a, b), json!({ name: [a, b], "relation": "i <= j" }));
        }
        if down {
            rec.expect(le(b, a), json!({ name: [a, b], "relation": "i >= j" }));
        }
    }
    rec.note("i", tails(&ei));
    rec.note("j", tails(&ej));
    Ok(rec.finish())
}

pub fn check_commutation(alphabet: Alphabet, f1: &MapSpec, f2: &MapSpec, target: &TargetSet, radius: u32, theta: Theta, ctx: &LawContext) -> Result<LawReport> {
    let mut rec = Recorder::new(
        "commutation",
        format!("{} and {} on {} r={radius} θ={theta}", map_name(f1), map_name(f2), target_name(target)),
    );
    rec.tol("per_n", ctx.tol);
    let g12 = f2.then(f1, alphabet, ctx.caps.table)?;
    let g21 = f1.then(f2, alphabet, ctx.caps.table)?;
    let a = Source::symbolic(SymbolicNDS::autonomous(alphabet, g12.clone())?, target.clone(), radius);
    let b = Source::symbolic(SymbolicNDS::autonomous(alphabet, g21.clone())?, target.clone(), radius);
    let ea = estimate(&a, theta, ctx)?;
    let eb = estimate(&b, theta, ctx)?;
    let gap = max_root_gap(&ea, &eb);
    rec.expect(gap <= ctx.tol, json!({ "max_root_gap": gap, "f1_after_f2": ea.rows, "f2_after_f1": eb.rows }));
    rec.note("maps_identical", g12 == g21);
    rec.note("roots_identical", same_rows(&ea.rows, &eb.rows));
    rec.note("m_identical", same_brackets(&m_table(&a, theta, ctx)?, &m_table(&b, theta, ctx)?));
    rec.note("f1_after_f2", tails(&ea));
    rec.note("f2_after_f1", tails(&eb));
    Ok(rec.finish())
}

#[allow(clippy::too_many_arguments)]
pub fn check_product_bounds(
    first: &SymbolicNDS,
    z: &TargetSet,
    second: &SymbolicNDS,
    w: &TargetSet,
    radius: u32,
    theta: Theta,
    ctx: &LawContext,
) -> Result<LawReport> {
    let mut rec = Recorder::new("product_bounds", format!("{} × {} r={radius} θ={theta}", target_name(z), target_name(w)));
    rec.tol("tail", ctx.tol);
    let prod = Source::symbolic(first.product(second)?, TargetSet::product(z.clone(), w.clone(), second.alphabet()), radius);
    let sz = Source::symbolic(first.clone(), z.clone(), radius);
    let sw = Source::symbolic(second.clone(), w.clone(), radius);
    let ep = estimate(&prod, theta, ctx)?;
    let ez = estimate(&sz, theta, ctx)?;
    let ew = estimate(&sw, theta, ctx)?;
    let cap = capacity_entropy(&sw, &ctx.ns, &ctx.caps, ctx.method)?;
    let cap_tail = cap[cap.len() / 2..].iter().map(|r| r.value).fold(f64::NEG_INFINITY, f64::max);
    let lower = ez.tail_hi.max(ew.tail_hi);
    let upper = ez.tail_hi + cap_tail;
    rec.expect(lower - ctx.tol <= ep.tail_hi, json!({ "lower": lower, "product": ep.tail_hi }));
    rec.expect(ep.tail_hi <= upper + ctx.tol, json!({ "product": ep.tail_hi, "upper": upper }));
    rec.note("product", tails(&ep));
    rec.note("first", tails(&ez));
    rec.note("second", tails(&ew));
    rec.note("capacity_second", cap);
    rec.note("capacity_tail", cap_tail);
    Ok(rec.finish())
}

pub fn check_conjugacy(system: &SymbolicNDS, target: &TargetSet, perm: &Relabeling, radius: u32, theta: Theta, ctx: &LawContext) -> Result<LawReport> {
    let mut rec = Recorder::new("conjugacy", format!("{} {} perm={:?} r={radius} θ={theta}", system_name(system), target_name(target), perm.forward()));
    rec.tol("bits", 0.0);
    let a = Source::symbolic(system.clone(), target.clone(), radius);
    let b = Source::symbolic(system.relabel(perm)?, target.relabel(perm)?, radius);
    let ea = estimate(&a, theta, ctx)?;
    let eb = estimate(&b, theta, ctx)?;
    let ma = m_table(&a, theta, ctx)?;
    let mb = m_table(&b, theta, ctx)?;
    rec.expect(same_rows(&ea.rows, &eb.rows), json!({ "roots": ea.rows, "relabeled": eb.rows }));
    rec.expect(same_brackets(&ma, &mb), json!({ "alphas": ALPHA_SAMPLES, "m": ma, "relabeled_m": mb }));
    rec.note("original", tails(&ea));
    rec.note("relabeled", tails(&eb));
    Ok(rec.finish())
}

/// Whether every word of length `len` is an output of the code.
fn onto_words(code: &BlockCode, size: usize, len: usize) -> bool {
    let (lo, hi) = code.window();
    let width = (hi - lo + 1) as usize;
    let input = len + width - 1;
    let total = size.pow(input as u32);
    let mut seen = BTreeSet::new();
    let mut word = vec![0 as Symbol; input];
    for idx in 0..total {
        let mut rem = idx;
        for pos in (0..input).rev() {
            word[pos] = (rem % size) as Symbol;
            rem /= size;
        }
        seen.insert((0..len).map(|i| code.lookup(&word[i..i + width])).collect::<Vec<_>>());
    }
    seen.len() == size.pow(len as u32)
}

/// Metric model of the periodic points of one period: `d = 2^{-min |n|}`
/// over the coordinates where two points differ, maps acting as rotations.
fn periodic_model(system: &SymbolicNDS, period: usize) -> Result<(FiniteMetricNDS, Vec<Vec<Symbol>>)> {
    let a = system.alphabet().size();
    let total = a.pow(period as u32);
    let words: Vec<Vec<Symbol>> = (0..total)
        .map(|idx| {
            let mut rem = idx;
            let mut w = vec![0 as Symbol; period];
            for pos in (0..period).rev() {
                w[pos] = (rem % a) as Symbol;
                rem /= a;
            }
            w
        })
        .collect();
    let p = period as i64;
    let dist: Vec<Vec<f64>> = words
        .iter()
        .map(|u| {
            words
                .iter()
                .map(|v| {
                    (0..=p / 2)
                        .find(|&n| u[n.rem_euclid(p) as usize] != v[n.rem_euclid(p) as usize] || u[(-n).rem_euclid(p) as usize] != v[(-n).rem_euclid(p) as usize])
                        .map_or(0.0, |n| 0.5f64.powi(n as i32))
                })
                .collect()
        })
        .collect();
    let index = |w: &[Symbol]| w.iter().fold(0usize, |acc, &s| acc * a + s as usize);
    let table = |m: &MapSpec| -> Result<Vec<usize>> {
        let MapSpec::ShiftPower(k) = m else {
            return Err(Error::NotShiftSystem);
        };
        Ok(words
            .iter()
            .map(|w| {
                let rotated: Vec<Symbol> = (0..period).map(|n| w[(n + *k as usize) % period]).collect();
                index(&rotated)
            })
            .collect())
    };
    let pre = system.preperiod().iter().map(&table).collect::<Result<Vec<_>>>()?;
    let per = system.period().iter().map(&table).collect::<Result<Vec<_>>>()?;
    Ok((FiniteMetricNDS::new(dist, pre, per)?, words))
}

pub const FIBER_PERIOD: usize = 8;

pub fn check_factor_inequality(system: &SymbolicNDS, code: &BlockCode, target: &TargetSet, radius: u32, theta: Theta, ctx: &LawContext) -> Result<LawReport> {
    let (lo, hi) = code.window();
    let mut rec = Recorder::new("factor", format!("{} code[{lo},{hi}]={:?} r={radius} θ={theta}", target_name(target), code.table()));
    rec.tol("tail", ctx.tol);
    let size = system.alphabet().size();
    if *target != TargetSet::WholeSpace || !system.is_shift_system() || code.table().len() != size.pow((hi - lo + 1) as u32) {
        rec.skip("image is only computed for the whole space of a shift system");
        return Ok(rec.finish());
    }
    const ONTO_LEN: usize = 8;
    if !onto_words(code, size, ONTO_LEN) {
        rec.skip("code image is not the whole space");
        return Ok(rec.finish());
    }
    rec.note("onto_checked_to_length", ONTO_LEN);
    let source = Source::symbolic(system.clone(), target.clone(), radius);
    let es = estimate(&source, theta, ctx)?;
    // the code commutes with shifts and is onto, so the image system is the same
    let ei = estimate(&source, theta, ctx)?;

    let (model, words) = periodic_model(system, FIBER_PERIOD)?;
    let image = |w: &[Symbol]| -> Vec<Symbol> {
        (0..FIBER_PERIOD as i64)
            .map(|n| {
                let window: Vec<Symbol> = (lo..=hi).map(|o| w[(n + o).rem_euclid(FIBER_PERIOD as i64) as usize]).collect();
                code.lookup(&window)
            })
            .collect()
    };
    let base: Vec<Symbol> = (0..FIBER_PERIOD).map(|n| [0, 1, 1, 0, 1, 0, 0, 0][n % 8] % size as Symbol).collect();
    let y = image(&base);
    let fiber: Vec<usize> = words.iter().enumerate().filter(|(_, w)| image(w) == y).map(|(i, _)| i).collect();
    let sup_rows = model.sup_entropy_estimate(&fiber, &ctx.ns, &[0.5, 0.25], ctx.caps.exact_points)?;
    let bound = |n: usize| (fiber.len() as f64).ln() / n as f64;
    for row in &sup_rows {
        rec.expect(
            row.count.value as usize <= fiber.len() && row.value <= bound(row.n) + f64::EPSILON,
            json!({ "fiber_row": row, "fiber_size": fiber.len() }),
        );
    }
    let fiber_term = 0.0;
    rec.note("fiber_size", fiber.len());
    rec.note("fiber_rows", sup_rows);
    rec.note("fiber_term", fiber_term);
    rec.expect(es.tail_hi + ctx.tol >= ei.tail_hi, json!({ "source": es.tail_hi, "image": ei.tail_hi }));
    rec.expect(es.tail_hi <= ei.tail_hi + fiber_term + ctx.tol, json!({ "source": es.tail_hi, "image_plus_fiber": ei.tail_hi + fiber_term }));
    rec.note("source", tails(&es));
    rec.note("image", tails(&ei));
    Ok(rec.finish())
}

fn sample_points(target: &TargetSet, alphabet: Alphabet) -> Vec<TailedPoint> {
    let a = alphabet.size() as Symbol;
    let mut pts: Vec<TailedPoint> = alphabet.symbols().map(TailedPoint::constant).collect();
    for (core, start) in [(vec![0, 1, 1, 0], -2), (vec![1, 0, 1, 1, 0, 0, 1], 0), (vec![1, 1, 0], 3)] {
        let core: Vec<Symbol> = core.iter().map(|s| s % a).collect();
        pts.push(TailedPoint::new(0, (1 % a) as Symbol, core.clone(), start));
        pts.push(TailedPoint::new(0, 0, core, start));
    }
    pts.retain(|p| target.contains(p, alphabet));
    if pts.is_empty() {
        if let TargetSet::PointList(ps) = target {
            pts.extend(ps.iter().take(3).cloned());
        }
    }
    pts.sort();
    pts.dedup();
    pts
}

pub fn check_billingsley(system: &SymbolicNDS, mu: &BernoulliMeasure, target: &TargetSet, radius: u32, theta: Theta, ctx: &LawContext) -> Result<LawReport> {
    let mut rec = Recorder::new(
        "billingsley",
        format!("{} {} p={:?} r={radius} θ={theta}", system_name(system), target_name(target), mu.weights()),
    );
    rec.tol("tail", ctx.tol);
    let alphabet = system.alphabet();
    if !system.is_shift_system() || !target.is_product_structured() {
        rec.skip("local entropy bounds need a shift system and a product-structured target");
        return Ok(rec.finish());
    }
    let samples = sample_points(target, alphabet);
    let sequences = samples
        .iter()
        .map(|x| local_entropy_sequence(mu, system, x, &ctx.ns, radius))
        .collect::<Result<Vec<_>>>()?;
    // exact extremes of the local entropy over Z
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for &n in &ctx.ns {
        let coords = system.dependence_coords(n, radius);
        let (mut lo, mut hi) = (Vec::new(), Vec::new());
        for &c in &coords {
            let allowed = target.allowed_at(c, alphabet).unwrap_or_default();
            let (a, b) = mu.info_range(allowed);
            lo.push(a);
            hi.push(b);
        }
        lower.push(crate::cover::compensated_sum(lo) / n as f64);
        upper.push(crate::cover::compensated_sum(hi) / n as f64);
    }
    let half = ctx.ns.len() / 2;
    let sup_tail = upper[half..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let inf_tail = lower[half..].iter().copied().fold(f64::INFINITY, f64::min);
    let e = estimate(&Source::symbolic(system.clone(), target.clone(), radius), theta, ctx)?;
    rec.expect(e.tail_hi <= sup_tail + ctx.tol, json!({ "upper": { "tail_hi": e.tail_hi, "local_sup": sup_tail } }));
    if target.has_positive_bernoulli_mass() {
        rec.expect(e.tail_lo + ctx.tol >= inf_tail, json!({ "lower": { "tail_lo": e.tail_lo, "local_inf": inf_tail } }));
        rec.note("lower_bound", "checked");
    } else {
        rec.note("lower_bound", "skipped: target has zero measure");
    }
    let first = sequences.first().and_then(|s| s.first()).copied();
    let constant = first.filter(|&s| {
        sequences.iter().flatten().chain(&lower).chain(&upper).all(|&v| (v - s).abs() <= 1e-12)
    });
    rec.note("constant_local_entropy", constant);
    rec.note("samples", samples.iter().map(|p| format!("{p:?}")).collect::<Vec<_>>());
    rec.note("local_entropy", &sequences);
    rec.note("local_sup", &upper);
    rec.note("local_inf", &lower);
    rec.note("estimate", tails(&e));
    Ok(rec.finish())
}

pub fn check_refinement(system: &SymbolicNDS, target: &TargetSet, radii: &[u32], theta: Theta, ctx: &LawContext) -> Result<LawReport> {
    let mut rec = Recorder::new("refinement", format!("{} {} radii={radii:?} θ={theta}", system_name(system), target_name(target)));
    rec.tol("per_n", ctx.tol);
    let ests = radii
        .iter()
        .map(|&r| estimate(&Source::symbolic(system.clone(), target.clone(), r), theta, ctx))
        .collect::<Result<Vec<_>>>()?;
    for (pair, rs) in ests.windows(2).zip(radii.windows(2)) {
        for (a, b) in pair[0].rows.iter().zip(&pair[1].rows) {
            rec.expect(b.alpha_hi + ctx.tol >= a.alpha_lo, json!({ "n": a.n, "radii": rs, "coarse": a, "fine": b }));
        }
        rec.expect(pair[1].tail_hi + ctx.tol >= pair[0].tail_hi, json!({ "radii": rs, "tail_hi": [pair[0].tail_hi, pair[1].tail_hi] }));
    }
    rec.note("sweep", ests.iter().map(tails).collect::<Vec<_>>());
    Ok(rec.finish())
}
