//! Compensated summation and infinite-tail summation for smooth, eventually
//! monotone term sequences.

use std::f64::consts::FRAC_PI_2;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = KahanSum::new();
        iter.into_iter().for_each(|x| s.add(x));
        s
    }
}

/// How fast the summand decays, which selects the far-tail correction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TermDecay {
    /// `g(x) ~ C·x^(−exponent)` with `exponent > 1`.
    Power(f64),
    Geometric,
}

/// Terms summed directly before switching to Euler–Maclaurin.
pub const DIRECT_TERMS: usize = 2000;

/// `Σ_{k=0}^∞ g(k)` for a smooth summand defined on the non-negative reals.
///
/// The first [`DIRECT_TERMS`] terms are added with compensation; the rest is
/// `∫_M^∞ g + g(M)/2 − g'(M)/12 + g'''(M)/720`, the integral taken with
/// exp-sinh quadrature and its far end closed with the power-law tail.
pub fn sum_to_infinity<G: Fn(f64) -> f64>(g: G, decay: TermDecay) -> f64 {
    let m = DIRECT_TERMS as f64;
    let mut direct: KahanSum = (0..DIRECT_TERMS).map(|k| g(k as f64)).collect();

    let integral = tail_integral(&g, m, decay);
    let h1 = m / 20.0;
    let d1 = (g(m - 2.0 * h1) - 8.0 * g(m - h1) + 8.0 * g(m + h1) - g(m + 2.0 * h1)) / (12.0 * h1);
    let h3 = m / 10.0;
    let d3 = (g(m + 2.0 * h3) - 2.0 * g(m + h3) + 2.0 * g(m - h3) - g(m - 2.0 * h3)) / (2.0 * h3.powi(3));
    direct.add(integral);
    direct.add(0.5 * g(m));
    direct.add(-d1 / 12.0);
    direct.add(d3 / 720.0);
    direct.value()
}

const LOG_X_MAX: f64 = 550.0; // x stays below e^550 ≈ 1e239

fn tail_integral<G: Fn(f64) -> f64>(g: &G, a: f64, decay: TermDecay) -> f64 {
    // x = a + exp(π/2·sinh t),  dx = π/2·cosh t·exp(π/2·sinh t) dt
    let t_max = (LOG_X_MAX / FRAC_PI_2).asinh();
    let t_min = -4.0;
    let node = |t: f64| {
        let e = (FRAC_PI_2 * t.sinh()).exp();
        g(a + e) * FRAC_PI_2 * t.cosh() * e
    };

    let mut h = 0.5;
    let mut sum: KahanSum =
        std::iter::successors(Some(t_min), |t| Some(t + h)).take_while(|t| *t <= t_max).map(node).collect();
    let mut estimate = h * sum.value();
    for _ in 0..10 {
        let half = h / 2.0;
        std::iter::successors(Some(t_min + half), |t| Some(t + h))
            .take_while(|t| *t <= t_max)
            .for_each(|t| sum.add(node(t)));
        h = half;
        let next = h * sum.value();
        let converged = (next - estimate).abs() <= 1e-15 * next.abs().max(1e-300);
        estimate = next;
        if converged && h <= 1.0 / 64.0 {
            break;
        }
    }

    // beyond the last node the summand follows its power law
    let far = match decay {
        TermDecay::Power(q) => {
            let x_end = a + LOG_X_MAX.exp();
            g(x_end) * x_end / (q - 1.0)
        }
        TermDecay::Geometric => 0.0,
    };
    estimate + far
}
