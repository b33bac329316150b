mod common;

use std::f64::consts::FRAC_PI_4;

use common::*;
use itp_core::chain::{
    build_chain, decay_curve, entangle_step, pointer_state, stochastic_context_translation, trial_curve, ChainConfig,
    ChainState, MismatchDistribution,
};
use itp_core::linalg::LocalVector;
use itp_core::product::{truncated_overlap, AngleFamily};
use itp_core::Error;

fn alpha_beta() -> LocalVector {
    LocalVector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap()
}

fn constant(theta: f64) -> AngleFamily {
    AngleFamily::Constant { theta }
}

#[test]
fn ideal_step_copies_the_object() {
    let s = entangle_step(&ChainState::object(LocalVector::up()), 0.0, 4, 0.0).unwrap();
    assert_eq!(s.branches.len(), 1);
    assert_eq!(s.branches[0].coeff, c(1.0, 0.0));

    let s = entangle_step(&ChainState::object(alpha_beta()), 0.0, 4, 0.0).unwrap();
    assert_eq!(s.branches.len(), 2);
    assert_eq!(s.to_dense(), vec![c(0.6, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.8)]);
}

#[test]
fn quarter_turn_mixes_against_rotation_oracle() {
    let s = entangle_step(&ChainState::object(LocalVector::up()), FRAC_PI_4, 4, 0.0).unwrap();
    let oracle = dense_chain([c(1.0, 0.0), c(0.0, 0.0)], &[FRAC_PI_4]);
    let h = FRAC_PI_4.cos();
    assert!((oracle[0].re - h).abs() < 1e-15 && (oracle[1].re - h).abs() < 1e-15);
    for (a, b) in s.to_dense().iter().zip(&oracle) {
        assert!((a - b).norm() < 1e-15);
    }
}

#[test]
fn empty_chain_is_the_object() {
    let s = build_chain(&ChainConfig::new(alpha_beta(), 0, constant(0.3))).unwrap();
    assert_eq!(s.to_dense(), alpha_beta().amps().to_vec());
}

#[test]
fn three_friends_give_ghz_state() {
    let s = build_chain(&ChainConfig::new(alpha_beta(), 3, constant(0.0))).unwrap();
    assert_eq!(s.branches.len(), 2);
    let dense = s.to_dense();
    assert_eq!(dense.len(), 16);
    let oracle = dense_chain([c(0.6, 0.0), c(0.0, 0.8)], &[0.0; 3]);
    assert_eq!(dense, oracle);
    assert_eq!(oracle[0], c(0.6, 0.0));
    assert_eq!(oracle[15], c(0.0, 0.8));
    assert_eq!(oracle.iter().filter(|z| z.norm() > 0.0).count(), 2);
}

#[test]
fn ten_friends_at_constant_angle() {
    let object = alpha_beta();
    let s = build_chain(&ChainConfig::new(object.clone(), 10, constant(0.2))).unwrap();
    assert!(s.branches.len() <= 1024);
    assert!((s.weight() - 1.0).abs() < 1e-8);
    let oracle = dense_chain([object.amps()[0], object.amps()[1]], &[0.2; 10]);
    assert_eq!(oracle.len(), 1 << 11);
    assert!(fidelity(&s.to_dense(), &oracle) > 1.0 - 1e-9);
}

#[test]
fn branch_cap_is_enforced() {
    let mut cfg = ChainConfig::new(alpha_beta(), 10, constant(0.2));
    cfg.branch_cap = 64;
    assert!(matches!(build_chain(&cfg), Err(Error::BranchOverflow { .. })));
}

#[test]
fn identical_configs_never_decay() {
    let a = ChainConfig::new(LocalVector::up(), 40, constant(0.3));
    let rows = decay_curve(&a, &a).unwrap();
    assert!(rows.iter().all(|r| r.delta == 1.0 && r.product == 1.0 && r.exp_approx == 1.0));
}

#[test]
fn decay_matches_pointer_overlap() {
    let fam_a = AngleFamily::PowerLaw { c: 0.7, p: 0.5, start: 1 };
    let a = ChainConfig::new(LocalVector::up(), 300, fam_a);
    let b = ChainConfig::new(LocalVector::up(), 300, constant(0.1));
    let rows = decay_curve(&a, &b).unwrap();
    let t = truncated_overlap(&pointer_state(&a).unwrap(), &pointer_state(&b).unwrap(), 301).unwrap();
    for (row, p) in rows.iter().zip(&t.trace[1..]) {
        assert!((row.product - p.magnitude).abs() < 1e-10, "depth {}", row.i);
    }
    assert!(rows.windows(2).all(|w| w[1].product <= w[0].product));
}

#[test]
fn harmonic_angle_mismatch_converges() {
    // Δθ_i = 1/i, so ε_i = 1 − cos(1/i) is summable.
    let n = 1_000_000;
    let a = ChainConfig::new(LocalVector::up(), n, AngleFamily::PowerLaw { c: 1.0, p: 1.0, start: 1 });
    let b = ChainConfig::new(LocalVector::up(), n, constant(0.0));
    let rows = decay_curve(&a, &b).unwrap();
    let mut direct = 1.0f64;
    for i in 1..=n {
        direct *= (1.0 / i as f64).cos();
    }
    let last = rows.last().unwrap();
    assert!((last.product - direct).abs() < 1e-12);
    assert!(last.product > 0.1);
    assert!((rows[n / 2 - 1].product - last.product).abs() < 1e-6);
}

#[test]
fn zero_noise_keeps_product_one() {
    let mut cfg = ChainConfig::new(LocalVector::up(), 25, constant(0.0));
    cfg.seed = Some(3);
    let r = stochastic_context_translation(&cfg, &MismatchDistribution::Uniform { max: 0.0 }, 20).unwrap();
    assert!(r.depths.iter().all(|d| d.mean_log_product == 0.0 && d.var_log_product == 0.0));
    assert!(r.final_log_products.iter().all(|&x| x == 0.0));
    assert!(trial_curve(&cfg, &MismatchDistribution::Gaussian { sigma: 0.0 }, 4)
        .unwrap()
        .iter()
        .all(|r| r.product == 1.0));
}

#[test]
fn stochastic_runs_are_reproducible() {
    let mut cfg = ChainConfig::new(LocalVector::up(), 30, constant(0.0));
    cfg.seed = Some(77);
    let d = MismatchDistribution::Gaussian { sigma: 0.2 };
    let a = stochastic_context_translation(&cfg, &d, 64).unwrap();
    let b = stochastic_context_translation(&cfg, &d, 64).unwrap();
    assert_eq!(a, b);
    let curve = trial_curve(&cfg, &d, 5).unwrap();
    assert_eq!(curve.last().unwrap().log_product, a.final_log_products[5]);
    cfg.seed = None;
    assert!(stochastic_context_translation(&cfg, &d, 4).is_err());
}

/// `E[ln cos θ]` by quadrature against the density.
fn mean_log_cos(d: MismatchDistribution) -> f64 {
    match d {
        MismatchDistribution::Uniform { max } => simpson(|t| t.cos().ln(), 0.0, max, 2000) / max,
        MismatchDistribution::Gaussian { sigma } => {
            let pdf = |t: f64| (-0.5 * (t / sigma).powi(2)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt());
            simpson(|t| pdf(t) * t.cos().ln(), -10.0 * sigma, 10.0 * sigma, 4000)
        }
    }
}

fn check_monte_carlo(d: MismatchDistribution, steps: usize, trials: usize, eps_per_step: f64) {
    let mut cfg = ChainConfig::new(LocalVector::up(), steps, constant(0.0));
    cfg.seed = Some(20240611);
    let r = stochastic_context_translation(&cfg, &d, trials).unwrap();
    let last = r.depths.last().unwrap();
    assert!((d.mean_epsilon() - eps_per_step).abs() < 1e-15);
    assert!((last.analytic_epsilon_sum - steps as f64 * eps_per_step).abs() < 1e-12);
    let z_eps = (last.mean_epsilon_sum - last.analytic_epsilon_sum) / last.std_error_epsilon_sum;
    assert!(z_eps.abs() < 3.0, "epsilon sum off by {z_eps} standard errors");
    let expected_log = steps as f64 * mean_log_cos(d);
    let z_log = (last.mean_log_product - expected_log) / last.std_error;
    assert!(z_log.abs() < 3.0, "log product off by {z_log} standard errors");
    // first-order agreement with −n·E[ε]; the fourth-order gap is a few percent at θ ~ 0.5
    assert!((last.mean_log_product + last.analytic_epsilon_sum).abs() < 0.05 * last.analytic_epsilon_sum);
}

#[test]
fn gaussian_noise_monte_carlo() {
    let sigma: f64 = 0.1;
    check_monte_carlo(MismatchDistribution::Gaussian { sigma }, 200, 1000, 1.0 - (-sigma * sigma / 2.0).exp());
}

#[test]
fn uniform_noise_monte_carlo() {
    check_monte_carlo(MismatchDistribution::Uniform { max: 0.5 }, 50, 1000, 1.0 - 0.5f64.sin() / 0.5);
}
