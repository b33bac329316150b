//! Reference computations that do not go through the library's algorithms.
#![allow(dead_code)]

use itp_core::linalg::LocalVector;
use itp_core::product::{AngleFamily, ProductState, TailSpec};
use num_complex::Complex64;
use rand::{Rng, RngExt};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense simulation of a measurement chain on `n + 1` qubits. Friend `m`
/// is a new least-significant qubit: a CNOT from the previous qubit onto
/// it, then the rotation `[[cos, −sin], [sin, cos]]` on it alone.
pub fn dense_chain(object: [Complex64; 2], thetas: &[f64]) -> Vec<Complex64> {
    let mut psi = object.to_vec();
    for &t in thetas {
        let (s, co) = t.sin_cos();
        let r = [[co, -s], [s, co]];
        let mut next = vec![c(0.0, 0.0); psi.len() * 2];
        for (x, &a) in psi.iter().enumerate() {
            let control = x & 1;
            for b in 0..2 {
                next[(x << 1) | b] += a * r[b][control];
            }
        }
        psi = next;
    }
    psi
}

pub fn fidelity(a: &[Complex64], b: &[Complex64]) -> f64 {
    let dot: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let na: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    let nb: f64 = b.iter().map(|x| x.norm_sqr()).sum();
    dot.norm_sqr() / (na * nb)
}

/// `∏_{n<N} ⟨ψ_n|φ_n⟩` by plain complex multiplication.
pub fn brute_overlap(psi: &ProductState, phi: &ProductState, n: usize) -> Complex64 {
    (0..n)
        .map(|i| psi.factor(i).amps().iter().zip(phi.factor(i).amps()).map(|(x, y)| x.conj() * y).sum::<Complex64>())
        .product()
}

/// Composite Simpson rule on `[a, b]` with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|k| f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

pub fn random_qubit<R: Rng>(rng: &mut R) -> LocalVector {
    loop {
        let v: Vec<Complex64> = (0..2).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        if let Ok(v) = LocalVector::new(v).and_then(|v| v.normalize()) {
            return v;
        }
    }
}

pub fn up_state() -> ProductState {
    ProductState::uniform(LocalVector::up()).unwrap()
}

/// `|↑↑⋯⟩` with the given prefix factors replaced.
pub fn up_with(replacements: &[(usize, LocalVector)]) -> ProductState {
    replacements.iter().fold(up_state(), |s, (i, v)| s.with_factor(*i, v.clone()).unwrap())
}

pub fn rotated(prefix: Vec<LocalVector>, family: AngleFamily) -> ProductState {
    ProductState::new(prefix, TailSpec::rotated(LocalVector::up(), family)).unwrap()
}

pub fn flat() -> ProductState {
    rotated(Vec::new(), AngleFamily::Constant { theta: 0.0 })
}
