//! Inner products of product states: the analytic infinite overlap, finite
//! truncations and the polarization-identity diagnostic.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use super::summation::KahanSum;
use super::tail::{aligned_pair, Rule, SeriesClass, TailAnalysis, EXACT_ZERO_TOL};
use super::ProductState;
use crate::error::{Error, Result};
use crate::linalg::local_inner;

/// Number of factors the evidence partial sums run over.
pub const EVIDENCE_DEPTH: usize = 1000;

/// Classification of an infinite inner product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    NonzeroConvergent,
    ZeroExactFactor,
    ZeroDivergentSeries,
    ZeroOscillatoryPhase,
}

impl Verdict {
    pub fn is_zero(self) -> bool {
        self != Verdict::NonzeroConvergent
    }
}

/// What decided the verdict, plus partial sums at a finite depth.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapEvidence {
    /// The rule that fired.
    #[serde(flatten)]
    pub rule: Rule,
    pub log_modulus_series: SeriesClass,
    pub phase_series: SeriesClass,
    /// Number of factors the partial sums cover.
    pub truncation: usize,
    /// `Σ (1 − Re δ_i)` over the first `truncation` factors.
    pub partial_eps_re: f64,
    /// `Σ |1 − δ_i|` over the first `truncation` factors.
    pub partial_eps_mod: f64,
    /// `ln |∏ δ_i|` over the first `truncation` factors.
    #[serde(serialize_with = "finite_or_null")]
    pub partial_log_magnitude: f64,
}

/// `⟨Ψ|Φ⟩` in log-polar form with its verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapResult {
    /// `ln |⟨Ψ|Φ⟩|`, `−∞` for the zero verdicts.
    #[serde(serialize_with = "finite_or_null")]
    pub log_magnitude: f64,
    /// Phase in `(−π, π]`; `None` unless the product converges to a non-zero value.
    pub phase: Option<f64>,
    pub verdict: Verdict,
    pub evidence: OverlapEvidence,
}

impl OverlapResult {
    pub fn magnitude(&self) -> f64 {
        self.log_magnitude.exp()
    }

    /// The overlap as a complex number; exactly 0 for the zero verdicts.
    pub fn value(&self) -> Complex64 {
        match (self.verdict, self.phase) {
            (Verdict::NonzeroConvergent, Some(phase)) => Complex64::from_polar(self.magnitude(), phase),
            _ => Complex64::new(0.0, 0.0),
        }
    }
}

pub(crate) fn finite_or_null<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_none()
    }
}

pub(crate) fn wrap_phase(phi: f64) -> f64 {
    let mut p = phi.rem_euclid(2.0 * PI);
    if p > PI {
        p -= 2.0 * PI;
    }
    p
}

/// `⟨Ψ|Φ⟩ = ∏_n ⟨ψ_n|φ_n⟩` with a convergence verdict.
///
/// The explicit prefix contributes an exact log-domain product. The tail is
/// classified by rule, and when the product converges to a non-zero value
/// the tail's `Σ ln δ_i` is summed to near machine precision.
pub fn inner_product(psi: &ProductState, phi: &ProductState) -> Result<OverlapResult> {
    let (a, b) = aligned_pair(psi, phi)?;
    let analysis = TailAnalysis::new(a.tail(), b.tail())?;

    let mut log_mag = KahanSum::new();
    let mut phase = KahanSum::new();
    let mut orthogonal_at = None;
    for (n, (x, y)) in a.prefix().iter().zip(b.prefix()).enumerate() {
        let d = local_inner(x, y)?;
        if d.norm() <= EXACT_ZERO_TOL {
            orthogonal_at.get_or_insert(n);
            continue;
        }
        log_mag.add(d.norm().ln());
        phase.add(d.arg());
    }

    let log_series = analysis.log_modulus_series();
    let phase_series = analysis.phase_series();
    let (verdict, rule) = if let Some(position) = orthogonal_at {
        (Verdict::ZeroExactFactor, Rule::ExactOrthogonalFactor { position: Some(position) })
    } else if analysis.is_orthogonal() {
        (Verdict::ZeroExactFactor, log_series.rule)
    } else if !log_series.convergent {
        (Verdict::ZeroDivergentSeries, log_series.rule)
    } else if !phase_series.convergent {
        (Verdict::ZeroOscillatoryPhase, phase_series.rule)
    } else {
        let rule = match (log_series.rule, phase_series.rule) {
            (Rule::IdenticalFactors, other) => other,
            (lead, _) => lead,
        };
        (Verdict::NonzeroConvergent, rule)
    };

    let evidence = evidence(psi, phi, rule, log_series, phase_series)?;
    if verdict.is_zero() {
        return Ok(OverlapResult { log_magnitude: f64::NEG_INFINITY, phase: None, verdict, evidence });
    }
    let (tail_log, tail_phase) = analysis.log_sum();
    log_mag.add(tail_log);
    phase.add(tail_phase);
    Ok(OverlapResult { log_magnitude: log_mag.value(), phase: Some(wrap_phase(phase.value())), verdict, evidence })
}

fn evidence(
    psi: &ProductState,
    phi: &ProductState,
    rule: Rule,
    log_modulus_series: SeriesClass,
    phase_series: SeriesClass,
) -> Result<OverlapEvidence> {
    let truncation = psi.prefix().len().max(phi.prefix().len()) + EVIDENCE_DEPTH;
    let mut eps_re = KahanSum::new();
    let mut eps_mod = KahanSum::new();
    let mut last = None;
    for p in partial_products(psi, phi)?.take(truncation) {
        let p = p?;
        eps_re.add(1.0 - p.factor.re);
        eps_mod.add((1.0 - p.factor).norm());
        last = Some(p.log_magnitude);
    }
    Ok(OverlapEvidence {
        rule,
        log_modulus_series,
        phase_series,
        truncation,
        partial_eps_re: eps_re.value(),
        partial_eps_mod: eps_mod.value(),
        partial_log_magnitude: last.unwrap_or(0.0),
    })
}

/// One row of a partial-product trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartialProduct {
    /// Number of factors included.
    pub n: usize,
    /// `δ_n = ⟨ψ_n|φ_n⟩`.
    #[serde(skip)]
    pub factor: Complex64,
    /// `|∏_{i≤n} δ_i|`.
    pub magnitude: f64,
    #[serde(serialize_with = "finite_or_null")]
    pub log_magnitude: f64,
    /// Accumulated phase `Σ arg δ_i`, wrapped to `(−π, π]`.
    pub phase: f64,
    /// `exp(−Σ_{i≤n} (1 − Re δ_i))`.
    pub exp_bound: f64,
}

impl PartialProduct {
    pub fn value(&self) -> Complex64 {
        if self.log_magnitude == f64::NEG_INFINITY {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::from_polar(self.magnitude, self.phase)
        }
    }
}

/// Lazy stream of partial products `∏_{i≤n} ⟨ψ_i|φ_i⟩`, `n = 1, 2, ...`,
/// accumulated in the log domain.
#[derive(Debug, Clone)]
pub struct PartialProducts {
    psi: ProductState,
    phi: ProductState,
    n: usize,
    log_mag: KahanSum,
    phase: KahanSum,
    eps: KahanSum,
    zero: bool,
}

impl Iterator for PartialProducts {
    type Item = Result<PartialProduct>;

    fn next(&mut self) -> Option<Self::Item> {
        let x = self.psi.factor(self.n);
        let y = self.phi.factor(self.n);
        self.n += 1;
        let d = match local_inner(&x, &y) {
            Ok(d) => d,
            Err(e) => return Some(Err(e)),
        };
        if d == Complex64::new(0.0, 0.0) {
            self.zero = true;
        } else {
            self.log_mag.add(d.norm().ln());
            self.phase.add(d.arg());
        }
        self.eps.add(1.0 - d.re);
        let log_magnitude = if self.zero { f64::NEG_INFINITY } else { self.log_mag.value() };
        Some(Ok(PartialProduct {
            n: self.n,
            factor: d,
            magnitude: log_magnitude.exp(),
            log_magnitude,
            phase: if self.zero { 0.0 } else { wrap_phase(self.phase.value()) },
            exp_bound: (-self.eps.value()).exp(),
        }))
    }
}

/// Partial products of `⟨Ψ|Φ⟩`. Tails must be comparable.
pub fn partial_products(psi: &ProductState, phi: &ProductState) -> Result<PartialProducts> {
    psi.tail().check_comparable(phi.tail())?;
    Ok(PartialProducts {
        psi: psi.clone(),
        phi: phi.clone(),
        n: 0,
        log_mag: KahanSum::new(),
        phase: KahanSum::new(),
        eps: KahanSum::new(),
        zero: false,
    })
}

/// `∏_{i=1}^{N} ⟨ψ_i|φ_i⟩` with its full partial-product trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncatedOverlap {
    #[serde(skip)]
    pub value: Complex64,
    #[serde(serialize_with = "finite_or_null")]
    pub log_magnitude: f64,
    pub phase: f64,
    pub trace: Vec<PartialProduct>,
}

pub fn truncated_overlap(psi: &ProductState, phi: &ProductState, n: usize) -> Result<TruncatedOverlap> {
    let trace = partial_products(psi, phi)?.take(n).collect::<Result<Vec<_>>>()?;
    Ok(match trace.last() {
        Some(p) => TruncatedOverlap { value: p.value(), log_magnitude: p.log_magnitude, phase: p.phase, trace },
        None => TruncatedOverlap { value: Complex64::new(1.0, 0.0), log_magnitude: 0.0, phase: 0.0, trace },
    })
}

/// `|⟨Ψ|Φ⟩_N − ¼[‖Ψ+Φ‖² − ‖Ψ−Φ‖² + i(‖Ψ−iΦ‖² − ‖Ψ+iΦ‖²)]_N|` on the first
/// `N` factors.
///
/// The left side is the log-domain truncated product. The norms on the
/// right are built from the four Gram entries `⟨X|Y⟩_N`, each accumulated
/// independently by plain multiplication.
pub fn polarization_check(psi: &ProductState, phi: &ProductState, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("polarization check needs N >= 1".into()));
    }
    psi.tail().check_comparable(phi.tail())?;
    let lhs = truncated_overlap(psi, phi, n)?.value;

    let (a, b) = (psi.truncate(n), phi.truncate(n));
    let gram = |x: &[crate::linalg::LocalVector], y: &[crate::linalg::LocalVector]| -> Result<Complex64> {
        x.iter().zip(y).try_fold(Complex64::new(1.0, 0.0), |acc, (u, v)| Ok(acc * local_inner(u, v)?))
    };
    let (g_aa, g_ab, g_ba, g_bb) = (gram(&a, &a)?, gram(&a, &b)?, gram(&b, &a)?, gram(&b, &b)?);
    // ‖Ψ + λΦ‖² = ⟨Ψ|Ψ⟩ + λ⟨Ψ|Φ⟩ + λ̄⟨Φ|Ψ⟩ + |λ|²⟨Φ|Φ⟩
    let norm_sq = |lambda: Complex64| (g_aa + lambda * g_ab + lambda.conj() * g_ba + lambda.norm_sqr() * g_bb).re;
    let i = Complex64::new(0.0, 1.0);
    let rhs =
        0.25 * (Complex64::new(norm_sq(1.0.into()) - norm_sq((-1.0).into()), 0.0) + i * (norm_sq(-i) - norm_sq(i)));
    Ok((lhs - rhs).norm())
}
