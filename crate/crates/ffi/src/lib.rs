//! C ABI over `theta-entropy`.
//!
//! Objects are opaque heap handles released with the matching `*_free`
//! function. Every call returns a [`TeStatus`]; on failure the message is
//! available from [`te_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use theta_entropy::cover::{Caps, LengthWindow, Theta};
use theta_entropy::estimate::{estimate_entropy, Method, Prepared, Source};
use theta_entropy::metric::FiniteMetricNDS;
use theta_entropy::symbolic::{Alphabet, SymbolicNDS, TailedPoint, TargetSet};
use theta_entropy::Error;

/// Result code of every exported function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ResourceCap = 3,
    Infeasible = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

pub struct TeSystem {
    inner: SymbolicNDS,
}

pub struct TeTarget {
    inner: TargetSet,
}

pub struct TeMetric {
    inner: FiniteMetricNDS,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TeBracket {
    pub lo: f64,
    pub hi: f64,
    pub exact: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TeRootRow {
    pub n: usize,
    pub alpha_lo: f64,
    pub alpha_hi: f64,
    pub exact: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> TeStatus {
    if e.is_resource_cap() {
        TeStatus::ResourceCap
    } else if matches!(e, Error::Infeasible) {
        TeStatus::Infeasible
    } else {
        TeStatus::InvalidArgument
    }
}

enum Failure {
    Status(TeStatus, String),
    Engine(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(TeStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            TeStatus::Ok
        }
        Ok(Err(Failure::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Ok(Err(Failure::Engine(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            TeStatus::Panic
        }
    }
}

unsafe fn slice_or_empty<'a, T>(ptr: *const T, len: usize) -> Result<&'a [T], Failure> {
    if len == 0 {
        Ok(&[])
    } else if ptr.is_null() {
        Err(null("array"))
    } else {
        Ok(slice::from_raw_parts(ptr, len))
    }
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn get<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, Failure> {
    ptr.as_ref().ok_or_else(|| null(what))
}

fn theta(numer: u64, denom: u64) -> Result<Theta, Failure> {
    Ok(Theta::new(numer, denom)?)
}

fn window(n: usize, t: Theta, length_cap: usize) -> Result<LengthWindow, Failure> {
    Ok(LengthWindow::new(n, t, (length_cap > 0).then_some(length_cap))?)
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length in bytes.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn te_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Shift-power system: `preperiod` steps followed by a repeating `period`.
///
/// # Safety
/// Arrays must be valid for their lengths; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn te_system_shifts(
    alphabet: usize,
    preperiod: *const u32,
    preperiod_len: usize,
    period: *const u32,
    period_len: usize,
    out: *mut *mut TeSystem,
) -> TeStatus {
    guard(|| {
        let pre = slice_or_empty(preperiod, preperiod_len)?;
        let per = slice_or_empty(period, period_len)?;
        let inner = SymbolicNDS::shifts(Alphabet::new(alphabet)?, pre, per)?;
        put(out, TeSystem { inner })
    })
}

/// # Safety
/// `system` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn te_system_free(system: *mut TeSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn te_target_whole(out: *mut *mut TeTarget) -> TeStatus {
    guard(|| put(out, TeTarget { inner: TargetSet::WholeSpace }))
}

/// Points equal to `tail` outside `(-k_max, k_max)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn te_target_family(tail: u16, k_max: i64, out: *mut *mut TeTarget) -> TeStatus {
    guard(|| put(out, TeTarget { inner: TargetSet::family(tail, k_max) }))
}

/// A single point: `left` before `start`, `core` from `start`, `right` after.
///
/// # Safety
/// `core` must be valid for `core_len` symbols; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn te_target_point(
    left: u16,
    right: u16,
    core: *const u16,
    core_len: usize,
    start: i64,
    out: *mut *mut TeTarget,
) -> TeStatus {
    guard(|| {
        let core = slice_or_empty(core, core_len)?.to_vec();
        let inner = TargetSet::points(vec![TailedPoint::new(left, right, core, start)])?;
        put(out, TeTarget { inner })
    })
}

/// # Safety
/// `target` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn te_target_free(target: *mut TeTarget) {
    if !target.is_null() {
        drop(Box::from_raw(target));
    }
}

/// Finite metric system with one map; `dist` is row-major `points × points`.
///
/// # Safety
/// `dist` must hold `points²` values and `map` `points` indices.
#[no_mangle]
pub unsafe extern "C" fn te_metric_new(points: usize, dist: *const f64, map: *const usize, out: *mut *mut TeMetric) -> TeStatus {
    guard(|| {
        let d = slice_or_empty(dist, points * points)?;
        let m = slice_or_empty(map, points)?.to_vec();
        let rows = d.chunks(points.max(1)).map(<[f64]>::to_vec).collect();
        put(out, TeMetric { inner: FiniteMetricNDS::autonomous(rows, m)? })
    })
}

/// # Safety
/// `metric` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn te_metric_free(metric: *mut TeMetric) {
    if !metric.is_null() {
        drop(Box::from_raw(metric));
    }
}

/// Writes the cumulative shift offsets `k_0 .. k_{j_max}` into `out`.
///
/// # Safety
/// `out` must be valid for `out_len` values.
#[no_mangle]
pub unsafe extern "C" fn te_cumulative_offsets(system: *const TeSystem, j_max: usize, out: *mut i64, out_len: usize) -> TeStatus {
    guard(|| {
        let sys = get(system, "system")?;
        let offsets = sys.inner.cumulative_offsets(j_max)?;
        if out_len < offsets.len() {
            return Err(Failure::Status(TeStatus::BufferTooSmall, format!("need {} slots", offsets.len())));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        slice::from_raw_parts_mut(out, offsets.len()).copy_from_slice(&offsets);
        Ok(())
    })
}

/// Cover cost `M` at `alpha` for the window of `n` and `θ = numer/denom`;
/// `length_cap = 0` means no cap (required nonzero when `θ = 0`).
///
/// # Safety
/// Handles must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn te_m_value(
    system: *const TeSystem,
    target: *const TeTarget,
    radius: u32,
    alpha: f64,
    n: usize,
    theta_numer: u64,
    theta_denom: u64,
    length_cap: usize,
    out: *mut TeBracket,
) -> TeStatus {
    guard(|| {
        let source = Source::symbolic(get(system, "system")?.inner.clone(), get(target, "target")?.inner.clone(), radius);
        let w = window(n, theta(theta_numer, theta_denom)?, length_cap)?;
        let caps = Caps::default();
        let b = Prepared::new(&source, w.max_len()?, &caps, Method::Auto)?.problem(w)?.m(alpha)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = TeBracket { lo: b.lo, hi: b.hi, exact: b.exact };
        Ok(())
    })
}

fn root(source: &Source, w: LengthWindow, out: *mut TeBracket) -> Result<(), Failure> {
    let caps = Caps::default();
    let r = Prepared::new(source, w.max_len()?, &caps, Method::Auto)?.problem(w)?.root()?;
    let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
    *out = TeBracket { lo: r.lo, hi: r.hi, exact: r.exact };
    Ok(())
}

/// Interval containing the `α` with `M = 1` for one window.
///
/// # Safety
/// Handles must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn te_alpha_root(
    system: *const TeSystem,
    target: *const TeTarget,
    radius: u32,
    n: usize,
    theta_numer: u64,
    theta_denom: u64,
    length_cap: usize,
    out: *mut TeBracket,
) -> TeStatus {
    guard(|| {
        let source = Source::symbolic(get(system, "system")?.inner.clone(), get(target, "target")?.inner.clone(), radius);
        root(&source, window(n, theta(theta_numer, theta_denom)?, length_cap)?, out)
    })
}

/// As [`te_alpha_root`] for a subset of a finite metric system at scale `eps`.
///
/// # Safety
/// `subset` must be valid for `subset_len` indices; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn te_metric_alpha_root(
    metric: *const TeMetric,
    subset: *const usize,
    subset_len: usize,
    eps: f64,
    n: usize,
    theta_numer: u64,
    theta_denom: u64,
    length_cap: usize,
    out: *mut TeBracket,
) -> TeStatus {
    guard(|| {
        let system = get(metric, "metric")?.inner.clone();
        let subset = slice_or_empty(subset, subset_len)?.to_vec();
        if subset.is_empty() || subset.iter().any(|&p| p >= system.points()) {
            return Err(Failure::Status(TeStatus::InvalidArgument, "subset must be nonempty and in range".into()));
        }
        let source = Source::Metric { system, subset, eps };
        root(&source, window(n, theta(theta_numer, theta_denom)?, length_cap)?, out)
    })
}

/// Per-`N` roots for `N = n_min ..= n_max` into `rows` (which must hold
/// `n_max - n_min + 1` entries) and the tail statistics.
///
/// # Safety
/// Handles must be valid; `rows` valid for `rows_len`; tails writable.
#[no_mangle]
pub unsafe extern "C" fn te_estimate(
    system: *const TeSystem,
    target: *const TeTarget,
    radius: u32,
    theta_numer: u64,
    theta_denom: u64,
    n_min: usize,
    n_max: usize,
    rows: *mut TeRootRow,
    rows_len: usize,
    tail_lo: *mut f64,
    tail_hi: *mut f64,
) -> TeStatus {
    guard(|| {
        let source = Source::symbolic(get(system, "system")?.inner.clone(), get(target, "target")?.inner.clone(), radius);
        if n_min == 0 || n_min > n_max {
            return Err(Failure::Status(TeStatus::InvalidArgument, "need 1 <= n_min <= n_max".into()));
        }
        let ns: Vec<usize> = (n_min..=n_max).collect();
        if rows_len < ns.len() {
            return Err(Failure::Status(TeStatus::BufferTooSmall, format!("need {} rows", ns.len())));
        }
        if rows.is_null() || tail_lo.is_null() || tail_hi.is_null() {
            return Err(null("output"));
        }
        let e = estimate_entropy(&source, theta(theta_numer, theta_denom)?, &ns, &Caps::default(), Method::Auto)?;
        let out = slice::from_raw_parts_mut(rows, ns.len());
        for (slot, r) in out.iter_mut().zip(&e.rows) {
            *slot = TeRootRow { n: r.n, alpha_lo: r.alpha_lo, alpha_hi: r.alpha_hi, exact: r.exact && r.error.is_none() };
        }
        *tail_lo = e.tail_lo;
        *tail_hi = e.tail_hi;
        Ok(())
    })
}
