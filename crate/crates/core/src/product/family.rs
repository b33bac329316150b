//! Angle families for rotated tails and the asymptotic bookkeeping needed to
//! classify the difference of two families without summing anything.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the rotation angle of the `k`-th tail factor (`k = 0, 1, 2, ...`)
/// depends on `k`.
///
/// `PowerLaw` and `OverlapPowerLaw` run their index `i` from `start`, so the
/// `k`-th tail factor uses `i = start + k`. `Geometric` uses `i = k + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AngleFamily {
    /// `θ_i = θ`.
    Constant { theta: f64 },
    /// `θ_i = c·i^(−p)`.
    PowerLaw { c: f64, p: f64, start: u64 },
    /// `θ_i = c·r^i`, `0 < r < 1`.
    Geometric { c: f64, r: f64 },
    /// The angle whose cosine deficit is a power law: `1 − cos θ_i = c·i^(−p)`.
    OverlapPowerLaw { c: f64, p: f64, start: u64 },
}

impl AngleFamily {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            AngleFamily::Constant { theta } if !theta.is_finite() => {
                bad(format!("constant angle {theta} is not finite"))
            }
            AngleFamily::Constant { .. } => Ok(()),
            AngleFamily::PowerLaw { c, p, start } => {
                if !c.is_finite() || !p.is_finite() {
                    bad("power-law parameters must be finite".into())
                } else if p < 0.0 {
                    bad(format!("power-law exponent p = {p} must be >= 0"))
                } else if start == 0 {
                    bad("power-law start index must be >= 1".into())
                } else {
                    Ok(())
                }
            }
            AngleFamily::Geometric { c, r } => {
                if !c.is_finite() {
                    bad("geometric amplitude must be finite".into())
                } else if !(r > 0.0 && r < 1.0) {
                    bad(format!("geometric ratio r = {r} must lie in (0, 1)"))
                } else {
                    Ok(())
                }
            }
            AngleFamily::OverlapPowerLaw { c, p, start } => {
                if !c.is_finite() || !p.is_finite() {
                    bad("overlap power-law parameters must be finite".into())
                } else if p < 0.0 {
                    bad(format!("overlap power-law exponent p = {p} must be >= 0"))
                } else if start == 0 {
                    bad("overlap power-law start index must be >= 1".into())
                } else if c < 0.0 || c * (start as f64).powf(-p) > 2.0 {
                    bad(format!("cosine deficit c·start^(−p) must lie in [0, 2] (c = {c})"))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Limit of the angle as the index grows.
    pub fn limit(&self) -> f64 {
        match *self {
            AngleFamily::Constant { theta } => theta,
            AngleFamily::PowerLaw { c, p: 0.0, .. } => c,
            AngleFamily::OverlapPowerLaw { c, p: 0.0, .. } => half_chord_angle(c),
            _ => 0.0,
        }
    }

    /// `θ(k) − limit`, evaluated without cancellation. `k` may be fractional.
    pub fn deviation(&self, k: f64) -> f64 {
        match *self {
            AngleFamily::Constant { .. } => 0.0,
            AngleFamily::PowerLaw { p, .. } | AngleFamily::OverlapPowerLaw { p, .. } if p == 0.0 => 0.0,
            AngleFamily::PowerLaw { c, p, start } => c * (start as f64 + k).powf(-p),
            AngleFamily::Geometric { c, r } => c * r.powf(k + 1.0),
            AngleFamily::OverlapPowerLaw { c, p, start } => half_chord_angle(c * (start as f64 + k).powf(-p)),
        }
    }

    /// Angle of the `k`-th tail factor.
    pub fn angle(&self, k: u64) -> f64 {
        self.limit() + self.deviation(k as f64)
    }

    /// The same family advanced by `steps` factors.
    pub fn advanced(&self, steps: u64) -> Self {
        match *self {
            AngleFamily::Constant { .. } => *self,
            AngleFamily::PowerLaw { c, p, start } => AngleFamily::PowerLaw { c, p, start: start + steps },
            AngleFamily::Geometric { c, r } => AngleFamily::Geometric { c: c * r.powf(steps as f64), r },
            AngleFamily::OverlapPowerLaw { c, p, start } => AngleFamily::OverlapPowerLaw { c, p, start: start + steps },
        }
    }

    fn deviation_shape(&self) -> Shape {
        match *self {
            AngleFamily::Constant { .. } => Shape::Zero,
            AngleFamily::PowerLaw { p, .. } | AngleFamily::OverlapPowerLaw { p, .. } if p == 0.0 => Shape::Zero,
            AngleFamily::PowerLaw { c, .. }
            | AngleFamily::Geometric { c, .. }
            | AngleFamily::OverlapPowerLaw { c, .. }
                if c == 0.0 =>
            {
                Shape::Zero
            }
            AngleFamily::Geometric { .. } => Shape::Geometric,
            AngleFamily::PowerLaw { c, p, start } => {
                Shape::Power(vec![ShiftedPower { coef: c, shift: start as f64, exponent: p }])
            }
            AngleFamily::OverlapPowerLaw { c, p, start } => {
                // 2·asin(√(y/2)) = √(2y)·Σ_j a_j y^j with y = c·(start + k)^(−p)
                let lead = (2.0 * c).sqrt();
                let terms = arcsin_half_chord_coefficients(MAX_SERIES_TERMS)
                    .into_iter()
                    .enumerate()
                    .map(|(j, a)| ShiftedPower {
                        coef: lead * a * c.powi(j as i32),
                        shift: start as f64,
                        exponent: p / 2.0 + p * j as f64,
                    })
                    .collect();
                Shape::Power(terms)
            }
        }
    }
}

/// `θ` with `1 − cos θ = y`, i.e. `2·asin(√(y/2))`; accurate for tiny `y`.
pub(crate) fn half_chord_angle(y: f64) -> f64 {
    2.0 * (y / 2.0).sqrt().asin()
}

const MAX_SERIES_TERMS: usize = 64;

/// Coefficients `a_j` of `arccos(1 − y) = √(2y)·Σ a_j y^j`.
fn arcsin_half_chord_coefficients(n: usize) -> Vec<f64> {
    // asin(z) = Σ b_j z^(2j+1),  b_j = (2j)! / (4^j (j!)² (2j+1));  a_j = b_j / 2^j
    let mut out = Vec::with_capacity(n);
    let mut central = 1.0; // (2j)! / (4^j (j!)²)
    for j in 0..n {
        if j > 0 {
            central *= (2 * j - 1) as f64 / (2 * j) as f64;
        }
        out.push(central / (2 * j + 1) as f64 / 2f64.powi(j as i32));
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct ShiftedPower {
    coef: f64,
    shift: f64,
    exponent: f64,
}

enum Shape {
    Zero,
    Geometric,
    Power(Vec<ShiftedPower>),
}

/// Asymptotic decay of the angle difference between two aligned tails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "decay", rename_all = "snake_case")]
pub enum Decay {
    /// The difference is identically zero.
    Zero,
    /// `|Δθ_k| ~ C·k^(−exponent)` (a lower bound on the exponent when all
    /// expanded orders cancel).
    Algebraic { exponent: f64 },
    /// `|Δθ_k| ≤ C·ρ^k` for some `ρ < 1`.
    Geometric,
}

const EXPONENT_MERGE_TOL: f64 = 1e-9;
const COEF_CANCEL_TOL: f64 = 1e-12;

/// Decay class of `θ^b_k − θ^a_k − (lim θ^b − lim θ^a)`.
pub fn relative_decay(a: &AngleFamily, b: &AngleFamily) -> Decay {
    if a == b {
        return Decay::Zero;
    }
    let (sa, sb) = (a.deviation_shape(), b.deviation_shape());
    let mut powers: Vec<(f64, ShiftedPower)> = Vec::new();
    let mut geometric = false;
    for (sign, shape) in [(-1.0, sa), (1.0, sb)] {
        match shape {
            Shape::Zero => {}
            Shape::Geometric => geometric = true,
            Shape::Power(terms) => powers.extend(terms.into_iter().map(|t| (sign, t))),
        }
    }
    if powers.is_empty() {
        return if geometric { Decay::Geometric } else { Decay::Zero };
    }

    let lead = powers.iter().map(|(_, t)| t.exponent).fold(f64::INFINITY, f64::min);
    // Any cancellation that survives past this horizon is already summable
    // for every series the classifier asks about.
    let horizon = lead.max(1.0) + 2.0;

    let mut expanded: Vec<(f64, f64)> = Vec::new();
    let mut scale: f64 = 0.0;
    for (sign, t) in &powers {
        // (s + k)^(−q) = k^(−q) Σ_m binom(−q, m) s^m k^(−m)
        let mut binom = 1.0;
        let mut m = 0usize;
        while t.exponent + (m as f64) < horizon {
            if m > 0 {
                binom *= (-t.exponent - (m as f64 - 1.0)) / m as f64;
            }
            let coef = sign * t.coef * binom * t.shift.powi(m as i32);
            scale = scale.max(coef.abs());
            expanded.push((t.exponent + m as f64, coef));
            m += 1;
        }
    }
    expanded.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut i = 0;
    while i < expanded.len() {
        let e = expanded[i].0;
        let mut sum = 0.0;
        while i < expanded.len() && expanded[i].0 - e <= EXPONENT_MERGE_TOL {
            sum += expanded[i].1;
            i += 1;
        }
        if sum.abs() > COEF_CANCEL_TOL * scale.max(1e-300) {
            return Decay::Algebraic { exponent: e };
        }
    }
    Decay::Algebraic { exponent: horizon }
}
