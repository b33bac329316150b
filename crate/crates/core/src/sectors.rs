//! Sector equivalence of product states and partitioning of state families.
//!
//! Two states share a sector when `Σ_i |1 − ⟨ψ_i|φ_i⟩|` converges. The
//! criterion is the series, not the product: finitely many orthogonal
//! factors keep two states in one sector even though their overlap is 0.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::local_inner;
use crate::product::{aligned_pair, Decay, ProductState, Rule, SeriesClass, TailAnalysis, EXACT_ZERO_TOL};

/// The deviation series `ε_i` of two states.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesSpec {
    /// `|1 − δ_i|` over the aligned explicit prefix; exactly 1 for orthogonal factors.
    pub prefix_terms: Vec<f64>,
    /// `1 − Re δ_i` over the same positions.
    pub prefix_terms_re: Vec<f64>,
    /// Classification of `Σ |1 − δ_k|` over the tail.
    pub tail_modulus: SeriesClass,
    /// Classification of `Σ (1 − Re δ_k)` over the tail.
    pub tail_real: SeriesClass,
    /// Decay class of the relative tail angles.
    pub tail_decay: Decay,
}

impl SeriesSpec {
    pub fn convergent(&self) -> bool {
        self.tail_modulus.convergent
    }
}

/// The series `ε_i` with exact prefix terms and a rule-classified tail.
pub fn epsilon_series(psi: &ProductState, phi: &ProductState) -> Result<SeriesSpec> {
    Ok(series_with_analysis(psi, phi)?.0)
}

fn series_with_analysis(psi: &ProductState, phi: &ProductState) -> Result<(SeriesSpec, TailAnalysis)> {
    let (a, b) = aligned_pair(psi, phi)?;
    let analysis = TailAnalysis::new(a.tail(), b.tail())?;
    let mut prefix_terms = Vec::with_capacity(a.prefix().len());
    let mut prefix_terms_re = Vec::with_capacity(a.prefix().len());
    for (x, y) in a.prefix().iter().zip(b.prefix()) {
        let d = local_inner(x, y)?;
        if d.norm() <= EXACT_ZERO_TOL {
            prefix_terms.push(1.0);
            prefix_terms_re.push(1.0);
        } else {
            prefix_terms.push((1.0 - d).norm());
            prefix_terms_re.push(1.0 - d.re);
        }
    }
    let spec = SeriesSpec {
        prefix_terms,
        prefix_terms_re,
        tail_modulus: analysis.modulus_series(),
        tail_real: analysis.real_series(),
        tail_decay: analysis.decay,
    };
    Ok((spec, analysis))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    SameSector,
    DifferentSector,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorVerdict {
    pub relation: Relation,
    /// The rule that decided the tail series.
    pub rule: Rule,
    pub evidence: SeriesSpec,
    /// Estimate of `Σ |1 − δ_i|`; `None` (infinite) for different sectors.
    pub sum_bound_estimate: Option<f64>,
    /// Estimate of `Σ (1 − Re δ_i)`, recorded as secondary evidence.
    pub real_sum_estimate: Option<f64>,
}

pub fn sector_equivalent(psi: &ProductState, phi: &ProductState) -> Result<SectorVerdict> {
    let (evidence, analysis) = series_with_analysis(psi, phi)?;
    let finite = |x: f64| x.is_finite().then_some(x);
    let prefix_sum: f64 = evidence.prefix_terms.iter().sum();
    let prefix_re: f64 = evidence.prefix_terms_re.iter().sum();
    let sum_bound_estimate = finite(prefix_sum + analysis.modulus_sum());
    let real_sum_estimate = finite(prefix_re + analysis.real_sum());
    let relation = if evidence.convergent() { Relation::SameSector } else { Relation::DifferentSector };
    Ok(SectorVerdict { relation, rule: evidence.tail_modulus.rule, evidence, sum_bound_estimate, real_sum_estimate })
}

/// Pairwise evidence for one ordered pair of input states.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairEvidence {
    pub left: usize,
    pub right: usize,
    pub relation: Relation,
    pub rule: Rule,
    pub sum_bound_estimate: Option<f64>,
}

/// Disjoint groups of input indices, plus the evidence that produced them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    pub groups: Vec<Vec<usize>>,
    pub pairwise: Vec<PairEvidence>,
}

impl Partition {
    pub fn sector_of(&self, index: usize) -> Option<usize> {
        self.groups.iter().position(|g| g.contains(&index))
    }
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller index becomes the root so groups come out ordered
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }
}

/// Groups states into sectors.
///
/// The relation is evaluated on every ordered pair and checked for symmetry
/// and transitivity; a failure is reported with the offending indices
/// instead of being merged away.
#[allow(clippy::needless_range_loop)]
pub fn partition_sectors(states: &[ProductState]) -> Result<Partition> {
    let n = states.len();
    let mut same = vec![vec![false; n]; n];
    let mut pairwise = Vec::with_capacity(n * n);
    for (i, a) in states.iter().enumerate() {
        for (j, b) in states.iter().enumerate() {
            let v = sector_equivalent(a, b)?;
            same[i][j] = v.relation == Relation::SameSector;
            pairwise.push(PairEvidence {
                left: i,
                right: j,
                relation: v.relation,
                rule: v.rule,
                sum_bound_estimate: v.sum_bound_estimate,
            });
        }
    }

    for i in 0..n {
        if !same[i][i] {
            return Err(Error::TransitivityViolation(i, i, i));
        }
        for j in 0..n {
            if same[i][j] != same[j][i] {
                return Err(Error::TransitivityViolation(i, j, i));
            }
            if !same[i][j] {
                continue;
            }
            for k in 0..n {
                if same[j][k] && !same[i][k] {
                    return Err(Error::TransitivityViolation(i, j, k));
                }
            }
        }
    }

    let mut sets = DisjointSets::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if same[i][j] {
                sets.union(i, j);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_to_group = vec![usize::MAX; n];
    for i in 0..n {
        let r = sets.find(i);
        if root_to_group[r] == usize::MAX {
            root_to_group[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_to_group[r]].push(i);
    }
    Ok(Partition { groups, pairwise })
}
