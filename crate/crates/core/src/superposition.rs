//! Finite linear combinations of product states.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{ComplexScalar, ZERO};
use crate::product::{aligned_pair, inner_product, OverlapResult, ProductState};
use crate::sectors::partition_sectors;

/// `Σ_i c_i |Ψ_i⟩` with at least one term. No closure is taken: only finite
/// sums exist here.
#[derive(Debug, Clone, PartialEq)]
pub struct Superposition {
    terms: Vec<(ComplexScalar, ProductState)>,
}

impl Superposition {
    pub fn new(terms: Vec<(ComplexScalar, ProductState)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidParameter("a superposition needs at least one term".into()));
        }
        for (i, (_, a)) in terms.iter().enumerate() {
            for (_, b) in &terms[i + 1..] {
                let (a, b) = aligned_pair(a, b)?;
                for (x, y) in a.prefix().iter().zip(b.prefix()) {
                    if x.dim() != y.dim() {
                        return Err(Error::Dimension { expected: x.dim(), found: y.dim() });
                    }
                }
            }
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[(ComplexScalar, ProductState)] {
        &self.terms
    }

    pub fn states(&self) -> Vec<ProductState> {
        self.terms.iter().map(|(_, s)| s.clone()).collect()
    }

    /// `λ · s`.
    pub fn scale(&self, lambda: ComplexScalar) -> Self {
        Self { terms: self.terms.iter().map(|(c, s)| (lambda * c, s.clone())).collect() }
    }
}

/// `G_ij = ⟨Ψ_i|Ψ_j⟩` with the verdict of every entry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GramMatrix {
    pub entries: Vec<Vec<OverlapResult>>,
}

impl GramMatrix {
    pub fn values(&self) -> Vec<Vec<ComplexScalar>> {
        self.entries.iter().map(|row| row.iter().map(OverlapResult::value).collect()).collect()
    }
}

pub fn gram_matrix(s: &Superposition) -> Result<GramMatrix> {
    let entries = s
        .terms
        .iter()
        .map(|(_, a)| s.terms.iter().map(|(_, b)| inner_product(a, b)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(GramMatrix { entries })
}

/// `√(c† G c)`.
pub fn norm(s: &Superposition) -> Result<f64> {
    let g = gram_matrix(s)?.values();
    let mut q = ZERO;
    for (i, (ci, _)) in s.terms.iter().enumerate() {
        for (j, (cj, _)) in s.terms.iter().enumerate() {
            q += ci.conj() * g[i][j] * cj;
        }
    }
    Ok(q.re.max(0.0).sqrt())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SectorReport {
    pub sector_count: usize,
    /// Sector index of each term, in order of first appearance.
    pub per_term_sector: Vec<usize>,
    pub coherent_within_sector: bool,
    /// True when the terms span several sectors: the sum is stored, but its
    /// parts cannot interfere.
    pub formal_only: bool,
}

pub fn sector_report(s: &Superposition) -> Result<SectorReport> {
    let p = partition_sectors(&s.states())?;
    let per_term_sector = (0..s.terms.len()).map(|i| p.sector_of(i).expect("every term is partitioned")).collect();
    let sector_count = p.groups.len();
    Ok(SectorReport {
        sector_count,
        per_term_sector,
        coherent_within_sector: sector_count == 1,
        formal_only: sector_count > 1,
    })
}
