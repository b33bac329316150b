//! Elementary tensors with an analytically specified infinite tail.
//!
//! A [`ProductState`] stores a finite prefix of factors explicitly and
//! describes everything after it with a [`TailSpec`]. Two closed tail
//! families are supported, which is what makes the convergence of infinite
//! overlaps decidable by rule.

mod family;
mod overlap;
pub mod summation;
mod tail;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{rotate2, LocalVector};

pub use family::{relative_decay, AngleFamily, Decay};
pub use overlap::{
    inner_product, partial_products, polarization_check, truncated_overlap, OverlapEvidence, OverlapResult,
    PartialProduct, PartialProducts, TruncatedOverlap, Verdict,
};
pub(crate) use tail::{aligned_pair, TailAnalysis, EXACT_ZERO_TOL};
pub use tail::{Rule, SeriesClass};

/// The infinite remainder of a product state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TailSpec {
    /// Every factor beyond the prefix equals `vector`.
    ConstantVector { vector: LocalVector },
    /// Tail factor `k` is `rotate2(θ_k)·base`.
    RotatedSequence { base: LocalVector, angles: AngleFamily },
}

impl TailSpec {
    pub fn constant(vector: LocalVector) -> Self {
        TailSpec::ConstantVector { vector }
    }

    pub fn rotated(base: LocalVector, angles: AngleFamily) -> Self {
        TailSpec::RotatedSequence { base, angles }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            TailSpec::ConstantVector { vector } => vector.check_normalized(),
            TailSpec::RotatedSequence { base, angles } => {
                if base.dim() != 2 {
                    return Err(Error::Dimension { expected: 2, found: base.dim() });
                }
                base.check_normalized()?;
                angles.validate()
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            TailSpec::ConstantVector { vector } => vector.dim(),
            TailSpec::RotatedSequence { .. } => 2,
        }
    }

    /// The `k`-th tail factor (0-based).
    pub fn factor(&self, k: u64) -> LocalVector {
        match self {
            TailSpec::ConstantVector { vector } => vector.clone(),
            TailSpec::RotatedSequence { base, angles } => &rotate2(angles.angle(k)) * base,
        }
    }

    /// The tail that remains after dropping `steps` factors.
    pub fn advanced(&self, steps: u64) -> Self {
        match self {
            TailSpec::ConstantVector { .. } => self.clone(),
            TailSpec::RotatedSequence { base, angles } => {
                TailSpec::RotatedSequence { base: base.clone(), angles: angles.advanced(steps) }
            }
        }
    }

    pub(crate) fn check_comparable(&self, other: &Self) -> Result<()> {
        match (self, other) {
            (TailSpec::ConstantVector { vector: a }, TailSpec::ConstantVector { vector: b }) => {
                if a.dim() == b.dim() {
                    Ok(())
                } else {
                    Err(Error::TailMismatch(format!("constant tails of dimension {} and {}", a.dim(), b.dim())))
                }
            }
            (TailSpec::RotatedSequence { .. }, TailSpec::RotatedSequence { .. }) => Ok(()),
            _ => Err(Error::TailMismatch("a constant tail cannot be compared with a rotated tail".into())),
        }
    }
}

/// `⊗_n |ψ_n⟩`: an explicit prefix followed by a tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductState {
    prefix: Vec<LocalVector>,
    tail: TailSpec,
}

impl ProductState {
    pub fn new(prefix: Vec<LocalVector>, tail: TailSpec) -> Result<Self> {
        for v in &prefix {
            v.check_normalized()?;
        }
        tail.validate()?;
        Ok(Self { prefix, tail })
    }

    /// `|v v v ⋯⟩`.
    pub fn uniform(v: LocalVector) -> Result<Self> {
        Self::new(Vec::new(), TailSpec::constant(v))
    }

    pub fn prefix(&self) -> &[LocalVector] {
        &self.prefix
    }

    pub fn tail(&self) -> &TailSpec {
        &self.tail
    }

    /// Factor at 0-based position `n`.
    pub fn factor(&self, n: usize) -> LocalVector {
        match self.prefix.get(n) {
            Some(v) => v.clone(),
            None => self.tail.factor((n - self.prefix.len()) as u64),
        }
    }

    pub fn factor_dim(&self, n: usize) -> usize {
        self.prefix.get(n).map_or(self.tail.dim(), LocalVector::dim)
    }

    /// First `n` factors.
    pub fn truncate(&self, n: usize) -> Vec<LocalVector> {
        (0..n).map(|i| self.factor(i)).collect()
    }

    /// The same state with at least `len` factors stored explicitly.
    pub fn with_prefix_len(&self, len: usize) -> Self {
        if len <= self.prefix.len() {
            return self.clone();
        }
        let extra = len - self.prefix.len();
        let mut prefix = self.prefix.clone();
        prefix.extend((0..extra as u64).map(|k| self.tail.factor(k)));
        Self { prefix, tail: self.tail.advanced(extra as u64) }
    }

    /// Replaces the factor at position `n`.
    pub fn with_factor(&self, n: usize, v: LocalVector) -> Result<Self> {
        v.check_normalized()?;
        let mut out = self.with_prefix_len(n + 1);
        if out.prefix[n].dim() != v.dim() {
            return Err(Error::Dimension { expected: out.prefix[n].dim(), found: v.dim() });
        }
        out.prefix[n] = v;
        Ok(out)
    }
}
