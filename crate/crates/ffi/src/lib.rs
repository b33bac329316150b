//! C interface to `itp-core`.
//!
//! States are opaque handles created by the `itp_state_*` constructors and
//! released with [`itp_state_free`]. Every fallible call returns an
//! [`ItpStatus`]; on failure [`itp_last_error_message`] describes the error.
//! Complex amplitudes are passed as interleaved `re, im` pairs of doubles.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use itp_core::analogues::{binomial_partial_sums, cf_convergents};
use itp_core::chain::{decay_curve, ChainConfig};
use itp_core::linalg::LocalVector;
use itp_core::product::{inner_product, truncated_overlap, AngleFamily, ProductState, TailSpec, Verdict};
use itp_core::sectors::{sector_equivalent, Relation};
use itp_core::spinchain::{spin_state, SpinPattern};
use itp_core::Error;
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ItpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Dimension = 3,
    Normalization = 4,
    TailMismatch = 5,
    Unsupported = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ItpVerdict {
    NonzeroConvergent = 0,
    ZeroExactFactor = 1,
    ZeroDivergentSeries = 2,
    ZeroOscillatoryPhase = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ItpFamilyKind {
    /// `θ_i = a`.
    Constant = 0,
    /// `θ_i = a·i^(−b)`, `i ≥ start`.
    PowerLaw = 1,
    /// `θ_i = a·b^i`, `i ≥ 1`.
    Geometric = 2,
    /// `1 − cos θ_i = a·i^(−b)`, `i ≥ start`.
    OverlapPowerLaw = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ItpAngleFamily {
    pub kind: ItpFamilyKind,
    pub a: f64,
    pub b: f64,
    pub start: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ItpSpinPattern {
    Up = 0,
    Down = 1,
    Mixed = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ItpSequence {
    ContinuedFraction = 0,
    Binomial = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ItpOverlap {
    /// `ln |⟨Ψ|Φ⟩|`; `-INFINITY` for the zero verdicts.
    pub log_magnitude: f64,
    /// Phase in `(−π, π]`; meaningful only when `has_phase` is non-zero.
    pub phase: f64,
    pub has_phase: i32,
    pub verdict: ItpVerdict,
}

/// An infinite product state.
pub struct ItpProductState {
    inner: ProductState,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> ItpStatus {
    match e {
        Error::Dimension { .. } => ItpStatus::Dimension,
        Error::Normalization { .. } | Error::ZeroVector => ItpStatus::Normalization,
        Error::TailMismatch(_) => ItpStatus::TailMismatch,
        Error::UnsupportedTail(_) => ItpStatus::Unsupported,
        _ => ItpStatus::InvalidArgument,
    }
}

struct Failure(ItpStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(ItpStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ItpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ItpStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            ItpStatus::Panic
        }
    }
}

/// # Safety
/// `amps` must point to `2 * count` readable doubles when `count > 0`.
unsafe fn read_amps(amps: *const f64, count: usize, what: &str) -> Result<Vec<Complex64>, Failure> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if amps.is_null() {
        return Err(null(what));
    }
    let raw = std::slice::from_raw_parts(amps, 2 * count);
    Ok(raw.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect())
}

/// # Safety
/// As [`read_amps`] with `count = len * dim`.
unsafe fn read_vectors(amps: *const f64, len: usize, dim: usize, what: &str) -> Result<Vec<LocalVector>, Failure> {
    if len > 0 && dim == 0 {
        return Err(Failure(ItpStatus::InvalidArgument, "dimension must be positive".into()));
    }
    let flat = read_amps(amps, len * dim, what)?;
    flat.chunks(dim.max(1)).map(|c| Ok(LocalVector::new(c.to_vec())?)).collect()
}

fn family(f: &ItpAngleFamily) -> AngleFamily {
    match f.kind {
        ItpFamilyKind::Constant => AngleFamily::Constant { theta: f.a },
        ItpFamilyKind::PowerLaw => AngleFamily::PowerLaw { c: f.a, p: f.b, start: f.start },
        ItpFamilyKind::Geometric => AngleFamily::Geometric { c: f.a, r: f.b },
        ItpFamilyKind::OverlapPowerLaw => AngleFamily::OverlapPowerLaw { c: f.a, p: f.b, start: f.start },
    }
}

/// # Safety
/// `out` must be a valid pointer to write a handle to.
unsafe fn emit(state: ProductState, out: *mut *mut ItpProductState) {
    *out = Box::into_raw(Box::new(ItpProductState { inner: state }));
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn itp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// A state with `prefix_len` explicit factors followed by a constant tail,
/// all of dimension `dim`. `prefix` holds `prefix_len * dim` amplitudes,
/// `tail` holds `dim`.
///
/// # Safety
/// Pointers must be valid for the stated lengths; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn itp_state_new_constant(
    dim: usize,
    prefix: *const f64,
    prefix_len: usize,
    tail: *const f64,
    out: *mut *mut ItpProductState,
) -> ItpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if dim == 0 {
            return Err(Failure(ItpStatus::InvalidArgument, "dimension must be positive".into()));
        }
        let prefix = read_vectors(prefix, prefix_len, dim, "prefix")?;
        let tail = LocalVector::new(read_amps(tail, dim, "tail")?)?;
        emit(ProductState::new(prefix, TailSpec::constant(tail))?, out);
        Ok(())
    })
}

/// A qubit state whose tail factors are `R(θ_k)·base`. `prefix` holds
/// `2 * prefix_len` amplitudes, `base` holds 2.
///
/// # Safety
/// Pointers must be valid for the stated lengths; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn itp_state_new_rotated(
    prefix: *const f64,
    prefix_len: usize,
    base: *const f64,
    angles: *const ItpAngleFamily,
    out: *mut *mut ItpProductState,
) -> ItpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if angles.is_null() {
            return Err(null("angles"));
        }
        let prefix = read_vectors(prefix, prefix_len, 2, "prefix")?;
        let base = LocalVector::new(read_amps(base, 2, "base")?)?;
        emit(ProductState::new(prefix, TailSpec::rotated(base, family(&*angles)))?, out);
        Ok(())
    })
}

/// The blocked spin chain with the sites in `flips` reversed.
///
/// # Safety
/// `flips` must hold `n_flips` entries; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn itp_state_new_spin(
    pattern: ItpSpinPattern,
    flips: *const usize,
    n_flips: usize,
    out: *mut *mut ItpProductState,
) -> ItpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let flips = if n_flips == 0 {
            &[][..]
        } else if flips.is_null() {
            return Err(null("flips"));
        } else {
            std::slice::from_raw_parts(flips, n_flips)
        };
        let pattern = match pattern {
            ItpSpinPattern::Up => SpinPattern::Up,
            ItpSpinPattern::Down => SpinPattern::Down,
            ItpSpinPattern::Mixed => SpinPattern::Mixed,
        };
        emit(spin_state(pattern, flips), out);
        Ok(())
    })
}

/// A copy of `state` with factor `n` replaced by `dim` amplitudes.
///
/// # Safety
/// `state` must be a live handle; `amps` must hold `dim` amplitudes.
#[no_mangle]
pub unsafe extern "C" fn itp_state_with_factor(
    state: *const ItpProductState,
    n: usize,
    amps: *const f64,
    dim: usize,
    out: *mut *mut ItpProductState,
) -> ItpStatus {
    guard(|| {
        let state = state.as_ref().ok_or_else(|| null("state"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let v = LocalVector::new(read_amps(amps, dim, "amps")?)?;
        emit(state.inner.with_factor(n, v)?, out);
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `state` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn itp_state_free(state: *mut ItpProductState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// `⟨a|b⟩` with its verdict.
///
/// # Safety
/// `a`, `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn itp_inner_product(
    a: *const ItpProductState,
    b: *const ItpProductState,
    out: *mut ItpOverlap,
) -> ItpStatus {
    guard(|| {
        let a = a.as_ref().ok_or_else(|| null("a"))?;
        let b = b.as_ref().ok_or_else(|| null("b"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let r = inner_product(&a.inner, &b.inner)?;
        *out = ItpOverlap {
            log_magnitude: r.log_magnitude,
            phase: r.phase.unwrap_or(0.0),
            has_phase: r.phase.is_some() as i32,
            verdict: match r.verdict {
                Verdict::NonzeroConvergent => ItpVerdict::NonzeroConvergent,
                Verdict::ZeroExactFactor => ItpVerdict::ZeroExactFactor,
                Verdict::ZeroDivergentSeries => ItpVerdict::ZeroDivergentSeries,
                Verdict::ZeroOscillatoryPhase => ItpVerdict::ZeroOscillatoryPhase,
            },
        };
        Ok(())
    })
}

/// `∏_{i<n} ⟨a_i|b_i⟩` as `re + i·im`.
///
/// # Safety
/// `a`, `b` must be live handles; `re`, `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn itp_truncated_overlap(
    a: *const ItpProductState,
    b: *const ItpProductState,
    n: usize,
    re: *mut f64,
    im: *mut f64,
) -> ItpStatus {
    guard(|| {
        let a = a.as_ref().ok_or_else(|| null("a"))?;
        let b = b.as_ref().ok_or_else(|| null("b"))?;
        let re = re.as_mut().ok_or_else(|| null("re"))?;
        let im = im.as_mut().ok_or_else(|| null("im"))?;
        let t = truncated_overlap(&a.inner, &b.inner, n)?;
        (*re, *im) = (t.value.re, t.value.im);
        Ok(())
    })
}

/// Writes 1 to `same_sector` when `Σ |1 − ⟨a_i|b_i⟩|` converges, else 0.
/// `sum_estimate` (optional) receives the sum, or `INFINITY`.
///
/// # Safety
/// `a`, `b` must be live handles; `same_sector` must be writable;
/// `sum_estimate` may be null.
#[no_mangle]
pub unsafe extern "C" fn itp_sector_equivalent(
    a: *const ItpProductState,
    b: *const ItpProductState,
    same_sector: *mut i32,
    sum_estimate: *mut f64,
) -> ItpStatus {
    guard(|| {
        let a = a.as_ref().ok_or_else(|| null("a"))?;
        let b = b.as_ref().ok_or_else(|| null("b"))?;
        let same = same_sector.as_mut().ok_or_else(|| null("same_sector"))?;
        let v = sector_equivalent(&a.inner, &b.inner)?;
        *same = (v.relation == Relation::SameSector) as i32;
        if let Some(s) = sum_estimate.as_mut() {
            *s = v.sum_bound_estimate.unwrap_or(f64::INFINITY);
        }
        Ok(())
    })
}

/// Overlap of two `steps`-friend chains whose per-friend angles differ by a
/// constant with cosine `cos_delta`: writes `∏ δ_i` and `exp(−Σ ε_i)`.
///
/// # Safety
/// `product` and `exp_approx` must be writable.
#[no_mangle]
pub unsafe extern "C" fn itp_constant_decay(
    cos_delta: f64,
    steps: usize,
    product: *mut f64,
    exp_approx: *mut f64,
) -> ItpStatus {
    guard(|| {
        let product = product.as_mut().ok_or_else(|| null("product"))?;
        let exp_approx = exp_approx.as_mut().ok_or_else(|| null("exp_approx"))?;
        if !(-1.0..=1.0).contains(&cos_delta) {
            return Err(Failure(ItpStatus::InvalidArgument, format!("cos_delta {cos_delta} is not in [-1, 1]")));
        }
        let a = ChainConfig::new(LocalVector::up(), steps, AngleFamily::Constant { theta: cos_delta.acos() });
        let b = ChainConfig::new(LocalVector::up(), steps, AngleFamily::Constant { theta: 0.0 });
        let rows = decay_curve(&a, &b)?;
        (*product, *exp_approx) = rows.last().map_or((1.0, 1.0), |r| (r.product, r.exp_approx));
        Ok(())
    })
}

/// The `index`-th (0-based) element of a √2 sequence as `"p/q"` (or `"p"`).
/// Release the string with [`itp_string_free`].
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn itp_sqrt2_term(sequence: ItpSequence, index: usize, out: *mut *mut c_char) -> ItpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let n = index.checked_add(1).ok_or_else(|| Failure(ItpStatus::InvalidArgument, "index too large".into()))?;
        let seq = match sequence {
            ItpSequence::ContinuedFraction => cf_convergents(n)?,
            ItpSequence::Binomial => binomial_partial_sums(n)?,
        };
        let s = CString::new(seq[index].to_string()).expect("rationals print without nul bytes");
        *out = s.into_raw();
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn itp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
