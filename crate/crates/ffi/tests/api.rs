use std::ffi::CStr;
use std::process::Command;
use std::ptr;

use itp_ffi::*;

fn constant(dim: usize, prefix: &[f64], tail: &[f64]) -> *mut ItpProductState {
    let mut out = ptr::null_mut();
    let st = unsafe { itp_state_new_constant(dim, prefix.as_ptr(), prefix.len() / (2 * dim), tail.as_ptr(), &mut out) };
    assert_eq!(st, ItpStatus::Ok);
    out
}

fn spin(pattern: ItpSpinPattern, flips: &[usize]) -> *mut ItpProductState {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { itp_state_new_spin(pattern, flips.as_ptr(), flips.len(), &mut out) }, ItpStatus::Ok);
    out
}

fn last_error() -> String {
    let p = itp_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn overlap_of_up_and_flipped_state() {
    let up = constant(2, &[], &[1.0, 0.0, 0.0, 0.0]);
    let mut flipped = ptr::null_mut();
    let down = [0.0, 0.0, 1.0, 0.0];
    assert_eq!(unsafe { itp_state_with_factor(up, 3, down.as_ptr(), 2, &mut flipped) }, ItpStatus::Ok);

    let mut o = ItpOverlap { log_magnitude: 0.0, phase: 0.0, has_phase: 0, verdict: ItpVerdict::NonzeroConvergent };
    assert_eq!(unsafe { itp_inner_product(up, flipped, &mut o) }, ItpStatus::Ok);
    assert_eq!(o.verdict, ItpVerdict::ZeroExactFactor);
    assert_eq!(o.log_magnitude, f64::NEG_INFINITY);
    assert_eq!(o.has_phase, 0);

    let (mut same, mut sum) = (0, 0.0);
    assert_eq!(unsafe { itp_sector_equivalent(up, flipped, &mut same, &mut sum) }, ItpStatus::Ok);
    assert_eq!((same, sum), (1, 1.0));

    unsafe {
        itp_state_free(up);
        itp_state_free(flipped);
    }
}

#[test]
fn rotated_telescoping_tail() {
    let base = [1.0, 0.0, 0.0, 0.0];
    let flat = ItpAngleFamily { kind: ItpFamilyKind::Constant, a: 0.0, b: 0.0, start: 1 };
    let tele = ItpAngleFamily { kind: ItpFamilyKind::OverlapPowerLaw, a: 1.0, b: 2.0, start: 2 };
    let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(itp_state_new_rotated(ptr::null(), 0, base.as_ptr(), &flat, &mut a), ItpStatus::Ok);
        assert_eq!(itp_state_new_rotated(ptr::null(), 0, base.as_ptr(), &tele, &mut b), ItpStatus::Ok);
    }
    let mut o = ItpOverlap { log_magnitude: 0.0, phase: 0.0, has_phase: 0, verdict: ItpVerdict::ZeroExactFactor };
    assert_eq!(unsafe { itp_inner_product(a, b, &mut o) }, ItpStatus::Ok);
    assert_eq!(o.verdict, ItpVerdict::NonzeroConvergent);
    assert!((o.log_magnitude.exp() - 0.5).abs() < 1e-12);

    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { itp_truncated_overlap(a, b, 99, &mut re, &mut im) }, ItpStatus::Ok);
    // factors i = 2..=100: (N + 1) / (2N) with N = 100
    assert!((re - 101.0 / 200.0).abs() < 1e-14);
    assert_eq!(im, 0.0);
    unsafe {
        itp_state_free(a);
        itp_state_free(b);
    }
}

#[test]
fn spin_sectors() {
    let up = spin(ItpSpinPattern::Up, &[]);
    let down = spin(ItpSpinPattern::Down, &[]);
    let flips = spin(ItpSpinPattern::Up, &[1, 4, 7]);
    let (mut same, mut sum) = (0, 0.0);
    unsafe {
        assert_eq!(itp_sector_equivalent(up, down, &mut same, &mut sum), ItpStatus::Ok);
        assert_eq!((same, sum), (0, f64::INFINITY));
        assert_eq!(itp_sector_equivalent(up, flips, &mut same, ptr::null_mut()), ItpStatus::Ok);
        assert_eq!(same, 1);
        for s in [up, down, flips] {
            itp_state_free(s);
        }
    }
}

#[test]
fn errors_carry_status_and_message() {
    let mut out = ptr::null_mut();
    let unnormalized = [1.0, 0.0, 1.0, 0.0];
    let st = unsafe { itp_state_new_constant(2, ptr::null(), 0, unnormalized.as_ptr(), &mut out) };
    assert_eq!(st, ItpStatus::Normalization);
    assert!(last_error().contains("not normalized"));
    assert!(out.is_null());

    let st = unsafe { itp_state_new_constant(2, ptr::null(), 0, ptr::null(), &mut out) };
    assert_eq!(st, ItpStatus::NullPointer);

    let a = constant(2, &[], &[1.0, 0.0, 0.0, 0.0]);
    let b = constant(3, &[], &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let mut o = ItpOverlap { log_magnitude: 0.0, phase: 0.0, has_phase: 0, verdict: ItpVerdict::NonzeroConvergent };
    assert_eq!(unsafe { itp_inner_product(a, b, &mut o) }, ItpStatus::TailMismatch);
    assert_eq!(unsafe { itp_inner_product(a, ptr::null(), &mut o) }, ItpStatus::NullPointer);
    unsafe {
        itp_state_free(a);
        itp_state_free(b);
        itp_state_free(ptr::null_mut());
    }
}

#[test]
fn decay_and_sqrt2() {
    let (mut p, mut e) = (0.0, 0.0);
    assert_eq!(unsafe { itp_constant_decay(0.99, 100, &mut p, &mut e) }, ItpStatus::Ok);
    assert!((p - 0.99f64.powi(100)).abs() < 1e-12);
    assert!((e - (-1.0f64).exp()).abs() < 1e-12);
    assert_eq!(unsafe { itp_constant_decay(1.5, 10, &mut p, &mut e) }, ItpStatus::InvalidArgument);

    let term = |seq, i| {
        let mut s = ptr::null_mut();
        assert_eq!(unsafe { itp_sqrt2_term(seq, i, &mut s) }, ItpStatus::Ok);
        let owned = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
        unsafe { itp_string_free(s) };
        owned
    };
    assert_eq!(term(ItpSequence::ContinuedFraction, 9), "3363/2378");
    assert_eq!(term(ItpSequence::Binomial, 9), "93009/65536");
    assert_eq!(term(ItpSequence::Binomial, 0), "1");
}

#[test]
fn header_is_valid_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/itp.h");
    let src = format!("#include \"{header}\"\nint main(void) {{ return ITP_STATUS_OK; }}\n");
    let dir = std::env::temp_dir().join(format!("itp-header-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let c_file = dir.join("check.c");
    std::fs::write(&c_file, src).unwrap();
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    match Command::new(&cc).args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only"]).arg(&c_file).output() {
        Ok(out) => assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr)),
        Err(e) => eprintln!("skipping header check: cannot run {cc}: {e}"),
    }
}
