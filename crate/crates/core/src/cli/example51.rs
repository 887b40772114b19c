//! The two-shift example: `f_1 = σ_2`, `f_i = σ` afterwards, on two symbols.

use std::collections::BTreeSet;
use std::f64::consts::LN_2;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use super::report::{num, write_curve_csv, write_file, write_json, Units};
use super::{engine, say, CliError};
use crate::cover::{Caps, Theta};
use crate::estimate::{capacity_entropy, estimate_entropy, theta0_cap, theta_sweep, window_for, Method, Source};
use crate::laws::closure_threshold;
use crate::symbolic::{SymbolicNDS, TargetSet};

#[derive(Debug, Clone, PartialEq)]
pub struct Example51Options {
    pub thetas: Vec<Theta>,
    /// Largest family index in the closure sweep.
    pub k_max: i64,
    pub ns: Vec<usize>,
    /// Largest `k` in the `θ = 0` decay table.
    pub theta0_k_max: i64,
    /// Level the `θ = 0` roots must fall below.
    pub decay_level: f64,
    pub caps: Caps,
}

impl Default for Example51Options {
    fn default() -> Self {
        Self {
            thetas: ["1/8", "1/4", "1/2", "3/4", "1"].iter().map(|s| s.parse().expect("theta literal")).collect(),
            k_max: 40,
            ns: (4..=10).collect(),
            theta0_k_max: 5,
            decay_level: 0.1,
            caps: Caps::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct FamilyRow {
    k_max: i64,
    identical_to_whole: bool,
    tail_hi: f64,
}

#[derive(Debug, Clone, Serialize)]
struct DecayRow {
    n: usize,
    alpha_lo: f64,
    alpha_hi: f64,
    bound: f64,
    within_bound: bool,
}

/// `N` by which the `θ = 0` root for `Z_k` must be below `level`.
pub fn decay_horizon(k: i64, level: f64) -> usize {
    ((2 * k - 1) as f64 * LN_2 / level).ceil() as usize
}

pub fn run_example51(opts: &Example51Options, out: &Path, units: Units, stdout: &mut dyn Write) -> Result<(), CliError> {
    let system = SymbolicNDS::two_shift_example();
    let whole = Source::symbolic(system.clone(), TargetSet::WholeSpace, 0);
    let grid: Vec<Theta> = opts.thetas.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let method = Method::Auto;

    // (a) whole space across θ
    let curve = theta_sweep(&whole, &grid, &opts.ns, &opts.caps, method).map_err(engine)?;
    let positive: Vec<_> = curve.estimates.iter().filter(|e| !e.theta.is_zero()).collect();
    let constant = positive.iter().all(|e| e.rows.iter().all(|r| r.exact && r.alpha_lo <= LN_2 + 1e-6 && r.alpha_hi >= LN_2 - 1e-6));
    let sweep_units: Vec<_> = curve.estimates.iter().map(|e| units.estimate(e)).collect();
    write_curve_csv(&out.join("example51_sweep.csv"), &sweep_units)?;
    let capacity = if grid.contains(&Theta::ONE) {
        let rows = capacity_entropy(&whole, &opts.ns, &opts.caps, method).map_err(engine)?;
        let mut s = String::from("N,log_lambda,value,exact\n");
        for r in &rows {
            let _ = writeln!(s, "{},{},{},{}", r.n, num(units.value(r.log_lambda)), num(units.value(r.value)), r.exact);
        }
        write_file(&out.join("example51_capacity.csv"), &s)?;
        Some(rows)
    } else {
        None
    };

    // (b) families against the whole space
    let mut family = Vec::new();
    let mut family_csv = String::from("theta,k_max,N,alpha_lo,alpha_hi,exact\n");
    for (theta, base) in grid.iter().zip(&curve.estimates) {
        if theta.is_zero() {
            continue;
        }
        let cap = theta0_cap(&opts.ns, &opts.caps);
        let depth = opts
            .ns
            .iter()
            .map(|&n| window_for(n, *theta, cap).and_then(|w| w.max_len()))
            .collect::<crate::Result<Vec<_>>>()
            .map_err(engine)?
            .into_iter()
            .max()
            .unwrap_or(1);
        let threshold = closure_threshold(&system, 1, 0, depth);
        let mut ks: BTreeSet<i64> = [1, 2, 5, 10, opts.k_max].into_iter().collect();
        ks.insert(threshold);
        ks.insert(threshold - 1);
        ks.retain(|&k| 1 <= k && k <= opts.k_max);
        let mut rows = Vec::new();
        for k in ks {
            let src = Source::symbolic(system.clone(), TargetSet::family(1, k), 0);
            let e = estimate_entropy(&src, *theta, &opts.ns, &opts.caps, method).map_err(engine)?;
            let identical = e.rows.len() == base.rows.len()
                && e.rows.iter().zip(&base.rows).all(|(a, b)| {
                    a.alpha_lo.to_bits() == b.alpha_lo.to_bits() && a.alpha_hi.to_bits() == b.alpha_hi.to_bits() && a.exact == b.exact
                });
            for r in &e.rows {
                let _ = writeln!(family_csv, "{theta},{k},{},{},{},{}", r.n, num(units.value(r.alpha_lo)), num(units.value(r.alpha_hi)), r.exact);
            }
            rows.push(FamilyRow { k_max: k, identical_to_whole: identical, tail_hi: units.value(e.tail_hi) });
        }
        let onset = rows.iter().filter(|r| r.identical_to_whole).map(|r| r.k_max).min();
        let max_coordinate = system.dependence_coords(depth, 0).iter().map(|c| c.abs()).max();
        family.push(json!({
            "theta": theta,
            "threshold": threshold,
            "max_coordinate": max_coordinate,
            "first_identical_k": onset,
            "rows": rows,
        }));
    }
    write_file(&out.join("example51_family.csv"), &family_csv)?;

    // (c) θ = 0 with a fixed length cap
    let ks: Vec<i64> = (1..=opts.theta0_k_max.min(opts.k_max).max(1)).collect();
    let horizon = ks.iter().map(|&k| decay_horizon(k, opts.decay_level)).max().unwrap_or(1).max(12);
    let ns0: Vec<usize> = (4..=horizon).collect();
    let cap = theta0_cap(&ns0, &opts.caps);
    let mut theta0 = Vec::new();
    let mut theta0_csv = String::from("k,theta,N,alpha_lo,alpha_hi,exact\n");
    let mut sup_at_12 = f64::NEG_INFINITY;
    let mut decay_ok = true;
    for &k in &ks {
        let src = Source::symbolic(system.clone(), TargetSet::family(1, k), 0);
        let e = estimate_entropy(&src, Theta::ZERO, &ns0, &opts.caps, method).map_err(engine)?;
        let n_star = decay_horizon(k, opts.decay_level);
        let mut rows = Vec::new();
        for r in &e.rows {
            let bound = (2 * k - 1) as f64 * LN_2 / r.n as f64;
            let within = r.alpha_hi <= bound;
            decay_ok &= within;
            if r.n == 12 {
                sup_at_12 = sup_at_12.max(r.alpha_hi);
            }
            let _ = writeln!(theta0_csv, "{k},0,{},{},{},{}", r.n, num(units.value(r.alpha_lo)), num(units.value(r.alpha_hi)), r.exact);
            rows.push(DecayRow { n: r.n, alpha_lo: units.value(r.alpha_lo), alpha_hi: units.value(r.alpha_hi), bound: units.value(bound), within_bound: within });
        }
        let below = e.row(n_star).is_some_and(|r| r.alpha_hi < opts.decay_level);
        decay_ok &= below;
        theta0.push(json!({ "k": k, "n_star": n_star, "below_level_at_n_star": below, "rows": rows }));
    }
    write_file(&out.join("example51_theta0.csv"), &theta0_csv)?;

    let half = Theta::new(1, 2).expect("theta literal");
    let half_value = match curve.estimates.iter().find(|e| e.theta == half) {
        Some(e) => e.tail_hi,
        None => estimate_entropy(&whole, half, &opts.ns, &opts.caps, method).map_err(engine)?.tail_hi,
    };
    let discontinuous = sup_at_12 < 0.45 && (half_value - LN_2).abs() <= 1e-6;
    let summary = json!({
        "positive_theta_constant_log2": constant,
        "theta0_decay_within_bounds": decay_ok,
        "theta0_sup_root_at_n12": units.value(sup_at_12),
        "theta_half_value": units.value(half_value),
        "discontinuous_at_zero": discontinuous,
        "theta0_length_cap": cap,
    });
    let sweep_json: Vec<_> = sweep_units
        .iter()
        .map(|e| json!({ "theta": e.theta, "tail_lo": e.tail_lo, "tail_hi": e.tail_hi, "exact": e.all_exact(), "rows": e.rows }))
        .collect();
    let capacity_json = capacity.map(|rows| {
        rows.iter()
            .map(|r| json!({ "n": r.n, "log_lambda": units.value(r.log_lambda), "value": units.value(r.value), "exact": r.exact }))
            .collect::<Vec<_>>()
    });
    let options = json!({
        "thetas": grid,
        "k_max": opts.k_max,
        "ns": opts.ns,
        "theta0_k_max": opts.theta0_k_max,
        "theta0_ns": [ns0.first(), ns0.last()],
        "decay_level": opts.decay_level,
        "caps": opts.caps,
    });
    write_json(
        &out.join("example51.json"),
        "example51",
        units,
        json!({ "options": options, "sweep": sweep_json, "capacity": capacity_json, "family": family, "theta0": theta0, "summary": summary }),
    )?;

    for e in &sweep_units {
        say(stdout, format!("theta={} tail_lo={} tail_hi={}", e.theta, num(e.tail_lo), num(e.tail_hi)))?;
    }
    for f in &family {
        say(stdout, format!("theta={} family threshold k_max={}", f["theta"].as_str().unwrap_or("?"), f["threshold"]))?;
    }
    say(stdout, format!("theta=0 sup root at N=12: {}; theta=1/2: {}", num(units.value(sup_at_12)), num(units.value(half_value))))?;
    say(stdout, format!("discontinuous at theta=0: {discontinuous}"))?;
    say(stdout, format!("wrote {}", out.join("example51.json").display()))
}
