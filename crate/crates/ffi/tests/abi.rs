use std::f64::consts::LN_2;
use std::ptr;

use theta_entropy_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let n = unsafe { te_last_error(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf[..n.min(255)].iter().map(|&c| c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

fn example() -> *mut TeSystem {
    let mut sys = ptr::null_mut();
    let st = unsafe { te_system_shifts(2, [2u32].as_ptr(), 1, [1u32].as_ptr(), 1, &mut sys) };
    assert_eq!(st, TeStatus::Ok);
    sys
}

fn whole() -> *mut TeTarget {
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { te_target_whole(&mut t) }, TeStatus::Ok);
    t
}

#[test]
fn offsets_and_roots() {
    let sys = example();
    let z = whole();
    let mut offs = [0i64; 4];
    assert_eq!(unsafe { te_cumulative_offsets(sys, 3, offs.as_mut_ptr(), 4) }, TeStatus::Ok);
    assert_eq!(offs, [0, 2, 3, 4]);
    assert_eq!(unsafe { te_cumulative_offsets(sys, 3, offs.as_mut_ptr(), 2) }, TeStatus::BufferTooSmall);

    let mut b = TeBracket::default();
    assert_eq!(unsafe { te_m_value(sys, z, 0, 0.0, 3, 1, 1, 0, &mut b) }, TeStatus::Ok);
    assert!((b.lo - 8.0).abs() < 1e-12 && b.lo == b.hi && b.exact, "{b:?}");

    let mut r = TeBracket::default();
    assert_eq!(unsafe { te_alpha_root(sys, z, 0, 6, 1, 2, 0, &mut r) }, TeStatus::Ok);
    assert!(r.lo <= LN_2 && LN_2 <= r.hi && r.hi - r.lo <= 1e-6 && r.exact);

    let mut rows = [TeRootRow::default(); 7];
    let (mut lo, mut hi) = (0.0, 0.0);
    assert_eq!(unsafe { te_estimate(sys, z, 0, 1, 4, 4, 10, rows.as_mut_ptr(), 7, &mut lo, &mut hi) }, TeStatus::Ok);
    assert!(rows.iter().all(|row| row.alpha_lo <= LN_2 && LN_2 <= row.alpha_hi && row.exact));
    assert!((hi - LN_2).abs() < 1e-6 && (lo - LN_2).abs() < 1e-6);
    unsafe {
        te_target_free(z);
        te_system_free(sys);
    }
}

#[test]
fn family_and_point_targets() {
    let sys = example();
    let mut fam = ptr::null_mut();
    assert_eq!(unsafe { te_target_family(1, 2, &mut fam) }, TeStatus::Ok);
    let mut r = TeBracket::default();
    assert_eq!(unsafe { te_alpha_root(sys, fam, 0, 5, 1, 1, 0, &mut r) }, TeStatus::Ok);
    assert!(r.lo <= LN_2 / 5.0 && LN_2 / 5.0 <= r.hi);

    let mut pt = ptr::null_mut();
    let core = [1u16, 0, 1];
    assert_eq!(unsafe { te_target_point(0, 0, core.as_ptr(), 3, -1, &mut pt) }, TeStatus::Ok);
    let mut b = TeBracket::default();
    assert_eq!(unsafe { te_m_value(sys, pt, 0, 0.5, 4, 1, 1, 0, &mut b) }, TeStatus::Ok);
    assert!((b.hi - (-2.0f64).exp()).abs() < 1e-15);
    unsafe {
        te_target_free(pt);
        te_target_free(fam);
        te_system_free(sys);
    }
}

#[test]
fn metric_roots() {
    let dist = [0.0, 1.0, 1.0, 0.0];
    let map = [1usize, 0];
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { te_metric_new(2, dist.as_ptr(), map.as_ptr(), &mut m) }, TeStatus::Ok);
    let mut r = TeBracket::default();
    let subset = [0usize, 1];
    assert_eq!(unsafe { te_metric_alpha_root(m, subset.as_ptr(), 2, 0.5, 4, 1, 1, 0, &mut r) }, TeStatus::Ok);
    assert!(r.lo <= LN_2 / 4.0 + 1e-9 && LN_2 / 4.0 - 1e-9 <= r.hi, "{r:?}");
    assert_eq!(unsafe { te_metric_alpha_root(m, [5usize].as_ptr(), 1, 0.5, 4, 1, 1, 0, &mut r) }, TeStatus::InvalidArgument);
    unsafe { te_metric_free(m) };
}

#[test]
fn errors_are_reported() {
    let mut sys = ptr::null_mut();
    assert_eq!(unsafe { te_system_shifts(1, ptr::null(), 0, [1u32].as_ptr(), 1, &mut sys) }, TeStatus::InvalidArgument);
    assert!(last_error().contains("alphabet"));
    assert_eq!(unsafe { te_system_shifts(2, ptr::null(), 0, [1u32].as_ptr(), 1, ptr::null_mut()) }, TeStatus::NullPointer);

    let sys = example();
    let z = whole();
    let mut b = TeBracket::default();
    assert_eq!(unsafe { te_m_value(sys, z, 0, 1.0, 4, 0, 1, 0, &mut b) }, TeStatus::InvalidArgument);
    assert_eq!(unsafe { te_m_value(sys, z, 0, 1.0, 4, 3, 2, 0, &mut b) }, TeStatus::InvalidArgument);
    assert_eq!(unsafe { te_m_value(ptr::null(), z, 0, 1.0, 4, 1, 1, 0, &mut b) }, TeStatus::NullPointer);
    assert!(last_error().contains("null"));
    unsafe {
        te_target_free(z);
        te_system_free(sys);
        te_system_free(ptr::null_mut());
    }
}

#[test]
fn header_is_generated() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/theta_entropy.h")).unwrap();
    for sym in ["te_estimate", "te_alpha_root", "te_m_value", "typedef struct TeSystem TeSystem", "TeStatus_ResourceCap"] {
        assert!(h.contains(sym), "{sym}");
    }
}
