//! Infinite tensor products of local operators acting on product states.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{LocalOperator, LocalVector, NORM_TOL};
use crate::product::{ProductState, TailSpec};

const PROJECTION_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-8;

/// What acts on the factors beyond the explicit operator prefix.
#[derive(Debug, Clone, PartialEq)]
pub enum TailOperator {
    Identity,
    Repeat(LocalOperator),
}

/// `A_1 ⊗ A_2 ⊗ ⋯`: explicit prefix operators followed by a tail operator.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductOperator {
    prefix_ops: Vec<LocalOperator>,
    tail: TailOperator,
}

impl ProductOperator {
    pub fn new(prefix_ops: Vec<LocalOperator>, tail: TailOperator) -> Self {
        Self { prefix_ops, tail }
    }

    /// `⊗_n op`.
    pub fn repeat(op: LocalOperator) -> Self {
        Self::new(Vec::new(), TailOperator::Repeat(op))
    }

    pub fn identity() -> Self {
        Self::new(Vec::new(), TailOperator::Identity)
    }

    pub fn tail(&self) -> &TailOperator {
        &self.tail
    }

    fn op_at(&self, n: usize) -> Option<&LocalOperator> {
        match (self.prefix_ops.get(n), &self.tail) {
            (Some(op), _) => Some(op),
            (None, TailOperator::Repeat(op)) => Some(op),
            (None, TailOperator::Identity) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroReason {
    /// Some factor was mapped to the zero vector.
    AnnihilatedFactor { position: usize },
    /// Every tail factor shrinks by the same factor below 1.
    TailAttenuation,
}

/// Result of applying a product operator.
#[derive(Debug, Clone, PartialEq)]
pub enum Image {
    /// The zero vector; it has no normalized product representation.
    Zero(ZeroReason),
    /// `scale·|state⟩` with `state` normalized factor by factor.
    Scaled { scale: f64, state: ProductState },
}

impl Image {
    pub fn norm(&self) -> f64 {
        match self {
            Image::Zero(_) => 0.0,
            Image::Scaled { scale, .. } => *scale,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Image::Zero(_))
    }

    /// The same image with its scale reset to 1.
    pub fn normalized(&self) -> Self {
        match self {
            Image::Zero(r) => Image::Zero(*r),
            Image::Scaled { state, .. } => Image::Scaled { scale: 1.0, state: state.clone() },
        }
    }

    /// Scale agreement and factorwise agreement within `tol` over the first
    /// `depth` factors, regardless of where each state's prefix ends.
    pub fn approx_eq(&self, other: &Self, depth: usize, tol: f64) -> bool {
        match (self, other) {
            (Image::Zero(_), Image::Zero(_)) => true,
            (Image::Scaled { scale: s1, state: a }, Image::Scaled { scale: s2, state: b }) => {
                (s1 - s2).abs() <= tol && (0..depth).all(|n| a.factor(n).approx_eq(&b.factor(n), tol))
            }
            _ => false,
        }
    }
}

fn split_norm(v: LocalVector) -> Option<(f64, LocalVector)> {
    let n = v.norm();
    (n > 0.0).then(|| (n, v.scale((1.0 / n).into())))
}

/// Applies `A` factor by factor. Surviving factors are renormalized and
/// their norms collected into the image's scale; nothing is normalized away
/// unless [`Image::normalized`] is called.
pub fn apply(op: &ProductOperator, psi: &ProductState) -> Result<Image> {
    let mut scale = 1.0;
    let state = psi.with_prefix_len(op.prefix_ops.len());
    let mut prefix = Vec::with_capacity(state.prefix().len());
    for (n, v) in state.prefix().iter().enumerate() {
        match op.op_at(n) {
            None => prefix.push(v.clone()),
            Some(a) => match split_norm(a.apply(v)?) {
                None => return Ok(Image::Zero(ZeroReason::AnnihilatedFactor { position: n })),
                Some((norm, w)) => {
                    scale *= norm;
                    prefix.push(w);
                }
            },
        }
    }

    let tail = match (&op.tail, state.tail()) {
        (TailOperator::Identity, t) => t.clone(),
        (TailOperator::Repeat(a), TailSpec::ConstantVector { vector }) => match split_norm(a.apply(vector)?) {
            None => return Ok(Image::Zero(ZeroReason::AnnihilatedFactor { position: prefix.len() })),
            Some((norm, _)) if norm < 1.0 - NORM_TOL => return Ok(Image::Zero(ZeroReason::TailAttenuation)),
            Some((norm, _)) if norm > 1.0 + NORM_TOL => {
                return Err(Error::UnsupportedTail(format!("tail factors grow by {norm} each: the image is unbounded")))
            }
            Some((_, w)) => TailSpec::constant(w),
        },
        (TailOperator::Repeat(_), TailSpec::RotatedSequence { .. }) => {
            return Err(Error::UnsupportedTail("a repeated tail operator needs a constant-vector tail".into()))
        }
    };
    Ok(Image::Scaled { scale, state: ProductState::new(prefix, tail)? })
}

/// Applies `A` to an image (`A·0 = 0`).
pub fn apply_image(op: &ProductOperator, image: &Image) -> Result<Image> {
    match image {
        Image::Zero(r) => Ok(Image::Zero(*r)),
        Image::Scaled { scale, state } => Ok(match apply(op, state)? {
            Image::Scaled { scale: s, state } => Image::Scaled { scale: s * scale, state },
            zero => zero,
        }),
    }
}

/// Trace of a finite projection given as the tensor product of `ops`,
/// returned as the integer rank.
pub fn projection_trace(ops: &[LocalOperator]) -> Result<u64> {
    let Some((first, rest)) = ops.split_first() else {
        return Err(Error::InvalidParameter("projection_trace needs at least one operator".into()));
    };
    let block = rest.iter().fold(first.clone(), |acc, op| acc.kron(op));
    let residual = block.projection_residual();
    if residual > PROJECTION_TOL {
        return Err(Error::NotAProjection { residual });
    }
    let t = block.trace().re;
    let k = t.round();
    if (t - k).abs() >= TRACE_TOL {
        return Err(Error::NotAProjection { residual: (t - k).abs() });
    }
    Ok(k as u64)
}

/// Norm of `F|Ψ⟩` before and after replacing one factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeReport {
    pub flip_index: usize,
    pub before: f64,
    pub after: f64,
}

pub fn sensitivity_probe(
    op: &ProductOperator,
    psi: &ProductState,
    flip_index: usize,
    replacement: &LocalVector,
) -> Result<ProbeReport> {
    match op.tail() {
        TailOperator::Repeat(p) if p.is_projection(PROJECTION_TOL) => {}
        _ => return Err(Error::InvalidParameter("sensitivity probe needs a repeated projection".into())),
    }
    let before = apply(op, psi)?.norm();
    let after = apply(op, &psi.with_factor(flip_index, replacement.clone())?)?.norm();
    Ok(ProbeReport { flip_index, before, after })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{projector_onto, ONE, ZERO};
    use crate::product::AngleFamily;

    fn e() -> LocalOperator {
        LocalOperator::diag(&[ONE, ZERO])
    }

    fn up() -> ProductState {
        ProductState::uniform(LocalVector::up()).unwrap()
    }

    #[test]
    fn f_fixes_all_up() {
        let f = ProductOperator::repeat(e());
        let img = apply(&f, &up()).unwrap();
        assert_eq!(img.norm(), 1.0);
        assert!(img.approx_eq(&Image::Scaled { scale: 1.0, state: up() }, 10, 0.0));
    }

    #[test]
    fn f_annihilates_single_down() {
        let f = ProductOperator::repeat(e());
        let img = apply(&f, &up().with_factor(6, LocalVector::down()).unwrap()).unwrap();
        assert_eq!(img, Image::Zero(ZeroReason::AnnihilatedFactor { position: 6 }));
    }

    #[test]
    fn f_annihilates_tilted_tail() {
        let f = ProductOperator::repeat(e());
        let tilted = ProductState::uniform(LocalVector::at_angle(0.01)).unwrap();
        assert_eq!(apply(&f, &tilted).unwrap(), Image::Zero(ZeroReason::TailAttenuation));
    }

    #[test]
    fn identity_operator_is_a_no_op() {
        let rotated = ProductState::new(
            vec![LocalVector::at_angle(0.3)],
            TailSpec::rotated(LocalVector::up(), AngleFamily::Geometric { c: 1.0, r: 0.5 }),
        )
        .unwrap();
        let id = ProductOperator::new(vec![LocalOperator::identity(2); 3], TailOperator::Identity);
        let img = apply(&id, &rotated).unwrap();
        assert!(img.approx_eq(&Image::Scaled { scale: 1.0, state: rotated.clone() }, 12, 1e-15));
        assert!(apply(&ProductOperator::repeat(e()), &rotated).is_err());
    }

    #[test]
    fn prefix_dimension_errors() {
        let op = ProductOperator::new(vec![LocalOperator::identity(3)], TailOperator::Identity);
        assert!(matches!(apply(&op, &up()), Err(Error::Dimension { .. })));
    }

    #[test]
    fn projection_traces() {
        assert_eq!(projection_trace(&[e()]).unwrap(), 1);
        assert_eq!(projection_trace(&[LocalOperator::identity(4)]).unwrap(), 4);
        let plus = LocalVector::from_real(&[1.0, 1.0]).unwrap().normalize().unwrap();
        assert_eq!(projection_trace(&[projector_onto(&plus).unwrap()]).unwrap(), 1);
        assert_eq!(projection_trace(&[e(), LocalOperator::identity(2), e()]).unwrap(), 2);
        let not_proj = LocalOperator::from_real(2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(projection_trace(&[not_proj]), Err(Error::NotAProjection { .. })));
    }

    #[test]
    fn probes() {
        let f = ProductOperator::repeat(e());
        let r = sensitivity_probe(&f, &up(), 5, &LocalVector::down()).unwrap();
        assert_eq!((r.before, r.after), (1.0, 0.0));
        let v = LocalVector::from_real(&[0.8, 0.6]).unwrap();
        let r = sensitivity_probe(&f, &up(), 5, &v).unwrap();
        assert!((r.after - 0.8).abs() < 1e-15);
        let r = sensitivity_probe(&f, &up(), 5, &LocalVector::up()).unwrap();
        assert_eq!((r.before, r.after), (1.0, 1.0));
    }
}
