//! Rule-based classification of the series generated by two aligned tails.
//!
//! For rotated tails the overlap of the `k`-th factors is
//! `δ_k = ⟨a|R(Δ∞ + u_k)|b⟩ = d·cos u_k + κ·sin u_k` with `d = ⟨a|R(Δ∞) b⟩`,
//! `κ = ⟨a|J R(Δ∞) b⟩` and `u_k → 0`. Every series the library cares about
//! (deficits, log-moduli, phases) is then governed by `d`, `|κ|` and the
//! decay class of `u_k`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::family::{relative_decay, Decay};
use super::summation::{sum_to_infinity, TermDecay};
use super::{ProductState, TailSpec};
use crate::error::Result;
use crate::linalg::{local_inner, quarter_turn, rotate2};

/// Overlaps at or below this modulus count as exactly orthogonal.
pub(crate) const EXACT_ZERO_TOL: f64 = 1e-14;
const UNIT_TOL: f64 = 1e-12;
const SIGMA_TOL: f64 = 1e-12;
const EXPONENT_TOL: f64 = 1e-12;

/// Which classification rule decided a series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Rule {
    /// Every term is zero.
    IdenticalFactors,
    /// A factor overlap is exactly zero; `position` is `None` when the whole
    /// tail is orthogonal factor by factor.
    ExactOrthogonalFactor { position: Option<usize> },
    /// Terms tend to a non-zero limit (`None` for an unbounded limit).
    NonVanishingTerms { limit: Option<f64> },
    /// Terms decay like `k^(−exponent)`; convergent iff `exponent > 1`.
    PowerLawTerms { exponent: f64 },
    /// Terms decay geometrically.
    GeometricTerms,
}

impl Rule {
    pub fn citation(&self) -> &'static str {
        match self {
            Rule::IdenticalFactors => "all terms vanish: the series is zero",
            Rule::ExactOrthogonalFactor { .. } => "a factor overlap is exactly zero: the product vanishes",
            Rule::NonVanishingTerms { .. } => "terms do not tend to zero: the series diverges",
            Rule::PowerLawTerms { .. } => "p-series comparison: terms ~ k^-q converge iff q > 1",
            Rule::GeometricTerms => "ratio test: geometric terms converge",
        }
    }
}

/// A rule verdict on one series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesClass {
    #[serde(flatten)]
    pub rule: Rule,
    pub convergent: bool,
}

impl SeriesClass {
    fn identical() -> Self {
        Self { rule: Rule::IdenticalFactors, convergent: true }
    }

    fn non_vanishing(limit: f64) -> Self {
        let limit = limit.is_finite().then_some(limit);
        Self { rule: Rule::NonVanishingTerms { limit }, convergent: false }
    }

    fn power(exponent: f64) -> Self {
        Self { rule: Rule::PowerLawTerms { exponent }, convergent: exponent > 1.0 + EXPONENT_TOL }
    }

    fn geometric() -> Self {
        Self { rule: Rule::GeometricTerms, convergent: true }
    }

    fn decaying(decay: Decay, order: f64) -> Self {
        match decay {
            Decay::Zero => Self::identical(),
            Decay::Geometric => Self::geometric(),
            Decay::Algebraic { exponent } => Self::power(order * exponent),
        }
    }

    fn term_decay(&self) -> Option<TermDecay> {
        match self.rule {
            Rule::PowerLawTerms { exponent } => Some(TermDecay::Power(exponent)),
            Rule::GeometricTerms => Some(TermDecay::Geometric),
            _ => None,
        }
    }
}

/// Both states re-expressed with a common explicit prefix length, so that
/// their tails line up factor by factor.
pub(crate) fn aligned_pair(psi: &ProductState, phi: &ProductState) -> Result<(ProductState, ProductState)> {
    psi.tail().check_comparable(phi.tail())?;
    let len = psi.prefix().len().max(phi.prefix().len());
    Ok((psi.with_prefix_len(len), phi.with_prefix_len(len)))
}

#[derive(Debug, Clone)]
pub(crate) struct TailAnalysis {
    /// `lim δ_k`.
    pub limit_overlap: Complex64,
    kappa: Complex64,
    pub decay: Decay,
    families: Option<(super::AngleFamily, super::AngleFamily)>,
}

impl TailAnalysis {
    /// Analysis of two aligned, comparable tails.
    pub fn new(a: &TailSpec, b: &TailSpec) -> Result<Self> {
        a.check_comparable(b)?;
        match (a, b) {
            (TailSpec::ConstantVector { vector: va }, TailSpec::ConstantVector { vector: vb }) => Ok(Self {
                limit_overlap: local_inner(va, vb)?,
                kappa: Complex64::new(0.0, 0.0),
                decay: Decay::Zero,
                families: None,
            }),
            (
                TailSpec::RotatedSequence { base: ba, angles: fa },
                TailSpec::RotatedSequence { base: bb, angles: fb },
            ) => {
                let rotated = &rotate2(fb.limit() - fa.limit()) * bb;
                Ok(Self {
                    limit_overlap: local_inner(ba, &rotated)?,
                    kappa: local_inner(ba, &(&quarter_turn() * &rotated))?,
                    decay: relative_decay(fa, fb),
                    families: Some((*fa, *fb)),
                })
            }
            _ => unreachable!("comparability checked above"),
        }
    }

    fn sigma(&self) -> f64 {
        self.kappa.norm().min(1.0)
    }

    fn unit_modulus(&self) -> bool {
        (self.limit_overlap.norm() - 1.0).abs() <= UNIT_TOL
    }

    fn unit_limit(&self) -> bool {
        (self.limit_overlap - 1.0).norm() <= UNIT_TOL
    }

    /// Every tail factor pair is exactly orthogonal.
    pub fn is_orthogonal(&self) -> bool {
        self.decay == Decay::Zero && self.limit_overlap.norm() <= EXACT_ZERO_TOL
    }

    /// `Σ |1 − δ_k|`.
    pub fn modulus_series(&self) -> SeriesClass {
        if self.unit_limit() {
            let order = if self.sigma() > SIGMA_TOL { 1.0 } else { 2.0 };
            SeriesClass::decaying(self.decay, order)
        } else {
            SeriesClass::non_vanishing((1.0 - self.limit_overlap).norm())
        }
    }

    /// `Σ (1 − Re δ_k)`.
    pub fn real_series(&self) -> SeriesClass {
        if self.unit_limit() {
            SeriesClass::decaying(self.decay, 2.0)
        } else {
            SeriesClass::non_vanishing(1.0 - self.limit_overlap.re)
        }
    }

    /// `Σ −ln|δ_k|`.
    pub fn log_modulus_series(&self) -> SeriesClass {
        if self.is_orthogonal() {
            return SeriesClass { rule: Rule::ExactOrthogonalFactor { position: None }, convergent: false };
        }
        if !self.unit_modulus() {
            return SeriesClass::non_vanishing(-self.limit_overlap.norm().ln());
        }
        if 1.0 - self.sigma() <= SIGMA_TOL {
            // the base is a rotation eigenvector: factors differ by pure phases
            return SeriesClass::identical();
        }
        SeriesClass::decaying(self.decay, 2.0)
    }

    /// `Σ arg δ_k`.
    pub fn phase_series(&self) -> SeriesClass {
        let limit_phase = self.limit_overlap.arg().abs();
        if limit_phase > UNIT_TOL || self.limit_overlap.norm() <= EXACT_ZERO_TOL {
            return SeriesClass::non_vanishing(limit_phase);
        }
        if self.sigma() <= SIGMA_TOL {
            return SeriesClass::identical();
        }
        SeriesClass::decaying(self.decay, 1.0)
    }

    /// `δ_k − 1` at real step `x`, valid when `lim δ_k = 1`.
    fn deficit(&self, x: f64) -> Complex64 {
        let Some((fa, fb)) = &self.families else {
            return Complex64::new(0.0, 0.0);
        };
        let u = fb.deviation(x) - fa.deviation(x);
        let half = (0.5 * u).sin();
        Complex64::new(-2.0 * half * half, 0.0) + self.kappa * u.sin()
    }

    fn log_factor(&self, x: f64) -> (f64, f64) {
        let w = self.deficit(x);
        (0.5 * (2.0 * w.re + w.norm_sqr()).ln_1p(), w.im.atan2(1.0 + w.re))
    }

    /// `(Σ ln|δ_k|, Σ arg δ_k)` over the whole tail. Only meaningful when
    /// both series converge.
    pub fn log_sum(&self) -> (f64, f64) {
        let modulus = match self.log_modulus_series().term_decay() {
            Some(decay) => sum_to_infinity(|x| self.log_factor(x).0, decay),
            None => 0.0,
        };
        let phase = match self.phase_series().term_decay() {
            Some(decay) => sum_to_infinity(|x| self.log_factor(x).1, decay),
            None => 0.0,
        };
        (modulus, phase)
    }

    /// Estimate of `Σ |1 − δ_k|`; `+∞` when the series diverges.
    pub fn modulus_sum(&self) -> f64 {
        let class = self.modulus_series();
        if !class.convergent {
            return f64::INFINITY;
        }
        match class.term_decay() {
            Some(decay) => sum_to_infinity(|x| self.deficit(x).norm(), decay),
            None => 0.0,
        }
    }

    /// Estimate of `Σ (1 − Re δ_k)`; `+∞` when the series diverges.
    pub fn real_sum(&self) -> f64 {
        let class = self.real_series();
        if !class.convergent {
            return f64::INFINITY;
        }
        match class.term_decay() {
            Some(decay) => sum_to_infinity(|x| -self.deficit(x).re, decay),
            None => 0.0,
        }
    }
}
