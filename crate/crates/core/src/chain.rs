//! Chains of measurement-by-entanglement steps: every new friend is a qubit
//! that copies the computational-basis value of the previous party into its
//! own basis, rotated by a per-friend mismatch angle.

use num_complex::Complex64;
use rand::RngExt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{rotate2, ComplexScalar, LocalVector, ZERO};
use crate::product::summation::KahanSum;
use crate::product::{AngleFamily, ProductState, TailSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub object: LocalVector,
    pub steps: usize,
    /// `θ_i` of friend `i = 1, 2, ...` is `mismatch.angle(i − 1)`.
    pub mismatch: AngleFamily,
    pub seed: Option<u64>,
    pub branch_cap: usize,
    /// Branches with `|coeff|` strictly below this are dropped.
    pub prune_threshold: f64,
}

impl ChainConfig {
    pub fn new(object: LocalVector, steps: usize, mismatch: AngleFamily) -> Self {
        Self { object, steps, mismatch, seed: None, branch_cap: 1024, prune_threshold: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.object.dim() != 2 {
            return Err(Error::Dimension { expected: 2, found: self.object.dim() });
        }
        self.object.check_normalized()?;
        self.mismatch.validate()?;
        if self.branch_cap == 0 {
            return Err(Error::InvalidParameter("branch_cap must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.prune_threshold) {
            return Err(Error::InvalidParameter(format!("prune_threshold {} is not in [0, 1)", self.prune_threshold)));
        }
        Ok(())
    }

    /// Mismatch angle of friend `i` (1-based).
    pub fn theta(&self, i: usize) -> f64 {
        self.mismatch.angle(i as u64 - 1)
    }
}

/// One elementary tensor `coeff · |f_0⟩⊗|f_1⟩⊗⋯` of the object and its friends.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub coeff: ComplexScalar,
    pub factors: Vec<LocalVector>,
}

/// A finite superposition of branches. Distinct branches are orthogonal:
/// each one carries a different computational-basis record in some factor
/// other than the last.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub branches: Vec<Branch>,
    /// Total squared amplitude removed by pruning so far.
    pub pruned_weight: f64,
}

impl ChainState {
    pub fn object(object: LocalVector) -> Self {
        Self { branches: vec![Branch { coeff: Complex64::new(1.0, 0.0), factors: vec![object] }], pruned_weight: 0.0 }
    }

    pub fn factor_count(&self) -> usize {
        self.branches.first().map_or(0, |b| b.factors.len())
    }

    /// `Σ |coeff|²`; equal to the squared norm since branches are orthogonal.
    pub fn weight(&self) -> f64 {
        self.branches.iter().map(|b| b.coeff.norm_sqr()).sum()
    }

    /// The state as a dense vector over all factors, first factor most significant.
    pub fn to_dense(&self) -> Vec<ComplexScalar> {
        let dim = self.branches.first().map_or(1, |b| b.factors.iter().map(LocalVector::dim).product());
        let mut out = vec![ZERO; dim];
        for b in &self.branches {
            let v = b
                .factors
                .iter()
                .fold(vec![b.coeff], |acc, f| acc.iter().flat_map(|x| f.amps().iter().map(move |y| x * y)).collect());
            for (o, x) in out.iter_mut().zip(v) {
                *o += x;
            }
        }
        out
    }
}

/// Appends one friend. Each branch splits along the computational basis of
/// its last factor: the component `|k⟩` keeps amplitude `v_k` and gains the
/// friend factor `R(θ)|k⟩`. With `θ = 0` a basis-valued last factor does not
/// split, giving the perfectly correlated record.
pub fn entangle_step(state: &ChainState, theta: f64, branch_cap: usize, prune_threshold: f64) -> Result<ChainState> {
    let r = rotate2(theta);
    let mut branches = Vec::with_capacity(state.branches.len() * 2);
    let mut pruned_weight = state.pruned_weight;
    for b in &state.branches {
        let (last, head) = b.factors.split_last().expect("branches have at least one factor");
        if last.dim() != 2 {
            return Err(Error::Dimension { expected: 2, found: last.dim() });
        }
        for (k, &vk) in last.amps().iter().enumerate() {
            if vk == ZERO {
                continue;
            }
            let coeff = b.coeff * vk;
            if coeff.norm() < prune_threshold {
                pruned_weight += coeff.norm_sqr();
                continue;
            }
            let record = LocalVector::basis(2, k)?;
            let friend = r.apply(&record)?;
            let mut factors = head.to_vec();
            factors.push(record);
            factors.push(friend);
            branches.push(Branch { coeff, factors });
        }
    }
    if branches.len() > branch_cap {
        return Err(Error::BranchOverflow { cap: branch_cap, needed: branches.len() });
    }
    Ok(ChainState { branches, pruned_weight })
}

/// `steps` entangling steps with the configured mismatch angles.
pub fn build_chain(config: &ChainConfig) -> Result<ChainState> {
    config.validate()?;
    let mut state = ChainState::object(config.object.clone());
    for i in 1..=config.steps {
        state = entangle_step(&state, config.theta(i), config.branch_cap, config.prune_threshold)?;
    }
    Ok(state)
}

/// As [`build_chain`], with the angle of every friend perturbed by a draw
/// from `distribution`. Requires a seed.
pub fn build_chain_stochastic(config: &ChainConfig, distribution: &MismatchDistribution) -> Result<ChainState> {
    config.validate()?;
    let angles = sampled_angles(config, distribution, 0)?;
    let mut state = ChainState::object(config.object.clone());
    for theta in angles {
        state = entangle_step(&state, theta, config.branch_cap, config.prune_threshold)?;
    }
    Ok(state)
}

/// The record left by an object in `|0⟩`: the object factor followed by
/// `R(θ_i)|0⟩` for each friend, then `|0⟩` forever.
pub fn pointer_state(config: &ChainConfig) -> Result<ProductState> {
    config.validate()?;
    let mut prefix = vec![LocalVector::up()];
    prefix.extend((1..=config.steps).map(|i| LocalVector::at_angle(config.theta(i))));
    ProductState::new(prefix, TailSpec::constant(LocalVector::up()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DecayRow {
    pub i: usize,
    pub delta: f64,
    /// `∏_{k≤i} |δ_k|` by repeated multiplication.
    pub product: f64,
    /// `exp(−Σ_{k≤i} ε_k)`.
    pub exp_approx: f64,
    /// `Σ_{k≤i} ln |δ_k|`, accurate where `product` underflows.
    pub log_product: f64,
}

/// Rows for the angle differences `d_i`, plus the running sums `Σ ε_k`.
fn rows_from_differences(diffs: impl Iterator<Item = f64>) -> (Vec<DecayRow>, Vec<f64>) {
    let mut product = 1.0;
    let mut eps_sum = KahanSum::new();
    let mut log_sum = KahanSum::new();
    let (mut rows, mut sums) = (Vec::new(), Vec::new());
    for (k, d) in diffs.enumerate() {
        let delta = d.cos();
        let half = (0.5 * d).sin();
        let eps = 2.0 * half * half;
        product *= delta.abs();
        eps_sum.add(eps);
        log_sum.add(if delta >= 0.0 { (-eps).ln_1p() } else { delta.abs().ln() });
        rows.push(DecayRow {
            i: k + 1,
            delta,
            product,
            exp_approx: (-eps_sum.value()).exp(),
            log_product: log_sum.value(),
        });
        sums.push(eps_sum.value());
    }
    (rows, sums)
}

/// Overlap decay between two chains that differ only in their mismatch
/// angles: `δ_i = cos(θ_i^A − θ_i^B)`, `ε_i = 1 − δ_i`.
pub fn decay_curve(a: &ChainConfig, b: &ChainConfig) -> Result<Vec<DecayRow>> {
    a.validate()?;
    b.validate()?;
    if a.steps != b.steps || a.object != b.object {
        return Err(Error::InvalidParameter("decay curves need configs differing only in mismatch".into()));
    }
    Ok(rows_from_differences((1..=a.steps).map(|i| a.theta(i) - b.theta(i))).0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MismatchDistribution {
    /// `θ ~ U(0, max)`.
    Uniform { max: f64 },
    /// `θ ~ N(0, σ²)`.
    Gaussian { sigma: f64 },
}

impl MismatchDistribution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            MismatchDistribution::Uniform { max } if !(max.is_finite() && max >= 0.0) => {
                Err(Error::InvalidParameter(format!("uniform max {max} must be finite and non-negative")))
            }
            MismatchDistribution::Gaussian { sigma } if !(sigma.is_finite() && sigma >= 0.0) => {
                Err(Error::InvalidParameter(format!("gaussian sigma {sigma} must be finite and non-negative")))
            }
            _ => Ok(()),
        }
    }

    /// `E[1 − cos θ]`.
    pub fn mean_epsilon(&self) -> f64 {
        match *self {
            MismatchDistribution::Uniform { max: 0.0 } => 0.0,
            MismatchDistribution::Uniform { max } => 1.0 - max.sin() / max,
            MismatchDistribution::Gaussian { sigma } => -(-0.5 * sigma * sigma).exp_m1(),
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            MismatchDistribution::Uniform { max: 0.0 } => 0.0,
            MismatchDistribution::Uniform { max } => rng.random_range(0.0..max),
            MismatchDistribution::Gaussian { sigma: 0.0 } => 0.0,
            MismatchDistribution::Gaussian { sigma } => Normal::new(0.0, sigma).expect("validated").sample(rng),
        }
    }
}

/// Trial `t` draws from its own stream of the seeded generator, so results
/// do not depend on how trials are scheduled.
fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn sampled_angles(config: &ChainConfig, distribution: &MismatchDistribution, trial: u64) -> Result<Vec<f64>> {
    distribution.validate()?;
    let seed = config.seed.ok_or_else(|| Error::InvalidParameter("stochastic mode requires a seed".into()))?;
    let mut rng = trial_rng(seed, trial);
    Ok((1..=config.steps).map(|i| config.theta(i) + distribution.sample(&mut rng)).collect())
}

fn trial_rows(
    config: &ChainConfig,
    distribution: &MismatchDistribution,
    trial: u64,
) -> Result<(Vec<DecayRow>, Vec<f64>)> {
    let angles = sampled_angles(config, distribution, trial)?;
    Ok(rows_from_differences(angles.iter().enumerate().map(|(k, t)| t - config.theta(k + 1))))
}

/// Decay curve of trial `trial`: the noisy chain against the noiseless one.
pub fn trial_curve(config: &ChainConfig, distribution: &MismatchDistribution, trial: u64) -> Result<Vec<DecayRow>> {
    Ok(trial_rows(config, distribution, trial)?.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepthStats {
    pub i: usize,
    pub mean_log_product: f64,
    pub var_log_product: f64,
    /// Standard error of `mean_log_product`.
    pub std_error: f64,
    pub mean_epsilon_sum: f64,
    pub std_error_epsilon_sum: f64,
    /// `i · E[ε]`.
    pub analytic_epsilon_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StochasticReport {
    pub seed: u64,
    pub trials: usize,
    pub steps: usize,
    pub distribution: MismatchDistribution,
    pub depths: Vec<DepthStats>,
    pub final_log_products: Vec<f64>,
}

fn mean_and_var(xs: impl Iterator<Item = f64> + Clone, n: usize) -> (f64, f64) {
    let mean = xs.clone().collect::<KahanSum>().value() / n as f64;
    let var =
        if n > 1 { xs.map(|x| (x - mean) * (x - mean)).collect::<KahanSum>().value() / (n - 1) as f64 } else { 0.0 };
    (mean, var)
}

/// Decay statistics of a chain whose friends receive random extra rotations.
/// The noiseless chain with the configured mismatch is the reference.
pub fn stochastic_context_translation(
    config: &ChainConfig,
    distribution: &MismatchDistribution,
    trials: usize,
) -> Result<StochasticReport> {
    config.validate()?;
    distribution.validate()?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let seed = config.seed.ok_or_else(|| Error::InvalidParameter("stochastic mode requires a seed".into()))?;
    let curves: Vec<(Vec<f64>, Vec<f64>)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let (rows, eps) = trial_rows(config, distribution, t)?;
            Ok((rows.iter().map(|r| r.log_product).collect(), eps))
        })
        .collect::<Result<_>>()?;
    let mean_eps = distribution.mean_epsilon();
    let depths = (0..config.steps)
        .map(|d| {
            let (mean, var) = mean_and_var(curves.iter().map(|c| c.0[d]), trials);
            let (eps_mean, eps_var) = mean_and_var(curves.iter().map(|c| c.1[d]), trials);
            DepthStats {
                i: d + 1,
                mean_log_product: mean,
                var_log_product: var,
                std_error: (var / trials as f64).sqrt(),
                mean_epsilon_sum: eps_mean,
                std_error_epsilon_sum: (eps_var / trials as f64).sqrt(),
                analytic_epsilon_sum: (d + 1) as f64 * mean_eps,
            }
        })
        .collect();
    let final_log_products = curves.iter().map(|c| c.0.last().copied().unwrap_or(0.0)).collect();
    Ok(StochasticReport { seed, trials, steps: config.steps, distribution: *distribution, depths, final_log_products })
}
