mod common;

use common::*;
use itp_core::linalg::{LocalOperator, LocalVector};
use itp_core::operators::{apply, projection_trace, sensitivity_probe, Image, ProductOperator, ZeroReason};
use itp_core::product::{inner_product, AngleFamily, ProductState, Verdict};
use itp_core::sectors::{epsilon_series, partition_sectors, sector_equivalent, Relation};
use itp_core::spinchain::{spin_state, SpinPattern};
use itp_core::superposition::{gram_matrix, norm, sector_report, Superposition};
use num_complex::Complex64;

fn relation(a: &ProductState, b: &ProductState) -> Relation {
    sector_equivalent(a, b).unwrap().relation
}

/// `(Σ_{i<N/2} |1 − δ_i|, Σ_{i<N} |1 − δ_i|)` by direct summation.
fn partial_sums(psi: &ProductState, phi: &ProductState, n: usize) -> (f64, f64) {
    let (mut half, mut sum) = (0.0, 0.0);
    for i in 0..n {
        let d: Complex64 = psi.factor(i).amps().iter().zip(phi.factor(i).amps()).map(|(x, y)| x.conj() * y).sum();
        sum += (c(1.0, 0.0) - d).norm();
        if i + 1 == n / 2 {
            half = sum;
        }
    }
    (half, sum)
}

#[test]
fn rule_agrees_with_partial_sums() {
    let n = 1_000_000;
    let cases = [
        (AngleFamily::Constant { theta: 0.1 }, false),
        (AngleFamily::Constant { theta: 0.0 }, true),
        (AngleFamily::PowerLaw { c: 1.0, p: 0.5, start: 1 }, false),
        (AngleFamily::PowerLaw { c: 1.0, p: 0.25, start: 1 }, false),
        (AngleFamily::PowerLaw { c: 1.0, p: 2.0, start: 1 }, true),
        (AngleFamily::Geometric { c: 1.0, r: 0.9 }, true),
        (AngleFamily::OverlapPowerLaw { c: 1.0, p: 1.0, start: 2 }, false),
        (AngleFamily::OverlapPowerLaw { c: 0.5, p: 3.0, start: 1 }, true),
    ];
    for (fam, convergent) in cases {
        let phi = rotated(Vec::new(), fam);
        let spec = epsilon_series(&flat(), &phi).unwrap();
        assert_eq!(spec.convergent(), convergent, "{fam:?}");
        let (half, full) = partial_sums(&flat(), &phi, n);
        if convergent {
            assert!(full - half < 1e-6, "{fam:?}: Cauchy tail {}", full - half);
        } else {
            assert!(full > 1e3 || full - half > 0.1, "{fam:?}: sums {half} -> {full}");
        }
    }
}

#[test]
fn one_flip_gives_a_single_unit_term() {
    let spec = epsilon_series(&up_state(), &up_with(&[(3, LocalVector::down())])).unwrap();
    assert_eq!(spec.prefix_terms.iter().filter(|&&t| t == 1.0).count(), 1);
    assert_eq!(spec.prefix_terms.iter().filter(|&&t| t != 0.0).count(), 1);
    assert!(spec.convergent());
    let same = epsilon_series(&up_state(), &up_state()).unwrap();
    assert!(same.prefix_terms.iter().all(|&t| t == 0.0) && same.convergent());
}

#[test]
fn spin_sector_examples() {
    let up = spin_state(SpinPattern::Up, &[]);
    assert_eq!(relation(&up, &spin_state(SpinPattern::Up, &[0, 5, 9])), Relation::SameSector);
    assert_eq!(relation(&up, &spin_state(SpinPattern::Down, &[])), Relation::DifferentSector);
    assert_eq!(relation(&up, &spin_state(SpinPattern::Mixed, &[])), Relation::DifferentSector);
    let v = sector_equivalent(&up, &spin_state(SpinPattern::Down, &[])).unwrap();
    assert_eq!(v.sum_bound_estimate, None);
    let w = sector_equivalent(&up, &spin_state(SpinPattern::Up, &[0, 5, 9])).unwrap();
    assert!(w.sum_bound_estimate.unwrap().is_finite());
}

#[test]
fn power_law_tails_share_a_sector() {
    let phi = rotated(Vec::new(), AngleFamily::PowerLaw { c: 0.8, p: 2.0, start: 1 });
    let v = sector_equivalent(&flat(), &phi).unwrap();
    assert_eq!(v.relation, Relation::SameSector);
    // |1 − cos θ| ≤ θ²/2
    let bound: f64 = (1..100_000).map(|i| 0.32 / (i as f64).powi(4)).sum();
    assert!(v.sum_bound_estimate.unwrap() <= bound + 1e-12);
}

#[test]
fn orthogonality_does_not_imply_different_sectors() {
    let flipped = up_with(&[(0, LocalVector::down())]);
    assert_eq!(inner_product(&up_state(), &flipped).unwrap().verdict, Verdict::ZeroExactFactor);
    assert_eq!(relation(&up_state(), &flipped), Relation::SameSector);
}

#[test]
fn partition_examples() {
    let p = partition_sectors(&[
        spin_state(SpinPattern::Up, &[]),
        spin_state(SpinPattern::Up, &[2]),
        spin_state(SpinPattern::Up, &[2, 7]),
    ])
    .unwrap();
    assert_eq!(p.groups, vec![vec![0, 1, 2]]);
    let p = partition_sectors(&[]).unwrap();
    assert!(p.groups.is_empty() && p.pairwise.is_empty());
}

#[test]
fn gram_and_norm_examples() {
    let up = up_state();
    let flipped = up_with(&[(2, LocalVector::down())]);
    let down = ProductState::uniform(LocalVector::down()).unwrap();
    let one = |s: &ProductState| Superposition::new(vec![(c(1.0, 0.0), s.clone())]).unwrap();

    assert_eq!(gram_matrix(&one(&up)).unwrap().values(), vec![vec![c(1.0, 0.0)]]);
    assert_eq!(norm(&one(&up)).unwrap(), 1.0);

    let within = Superposition::new(vec![(c(0.6, 0.0), up.clone()), (c(0.8, 0.0), flipped)]).unwrap();
    let g = gram_matrix(&within).unwrap();
    assert_eq!(g.entries[0][1].verdict, Verdict::ZeroExactFactor);
    assert_eq!(g.values(), vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]]);
    let r = sector_report(&within).unwrap();
    assert_eq!((r.sector_count, r.formal_only, r.coherent_within_sector), (1, false, true));

    let across = Superposition::new(vec![(c(0.6, 0.0), up.clone()), (c(0.8, 0.0), down)]).unwrap();
    assert_eq!(gram_matrix(&across).unwrap().values()[1][0], c(0.0, 0.0));
    assert!((norm(&across).unwrap() - 1.0).abs() < 1e-15);
    let r = sector_report(&across).unwrap();
    assert_eq!((r.sector_count, r.formal_only), (2, true));
    assert_eq!(r.per_term_sector, vec![0, 1]);

    let doubled = Superposition::new(vec![(c(1.0, 0.0), up.clone()), (c(1.0, 0.0), up)]).unwrap();
    assert!((norm(&doubled).unwrap() - 2.0).abs() < 1e-15);
    assert!(Superposition::new(Vec::new()).is_err());
}

fn e() -> LocalOperator {
    LocalOperator::diag(&[c(1.0, 0.0), c(0.0, 0.0)])
}

#[test]
fn projection_examples() {
    let f = ProductOperator::repeat(e());
    let up = up_state();
    assert!(apply(&f, &up).unwrap().approx_eq(&Image::Scaled { scale: 1.0, state: up.clone() }, 100, 0.0));
    let killed = apply(&f, &up_with(&[(9, LocalVector::down())])).unwrap();
    assert!(matches!(killed, Image::Zero(ZeroReason::AnnihilatedFactor { position: 9 })));
    assert!(apply(&ProductOperator::identity(), &up).unwrap().approx_eq(
        &Image::Scaled { scale: 1.0, state: up.clone() },
        100,
        0.0
    ));
    let tilted = ProductState::uniform(LocalVector::at_angle(0.1)).unwrap();
    assert!(matches!(apply(&f, &tilted).unwrap(), Image::Zero(ZeroReason::TailAttenuation)));
}

#[test]
fn probe_examples() {
    let f = ProductOperator::repeat(e());
    let up = up_state();
    let probe = |v: LocalVector| sensitivity_probe(&f, &up, 5, &v).unwrap();
    let r = probe(LocalVector::down());
    assert_eq!((r.before, r.after), (1.0, 0.0));
    let r = probe(LocalVector::from_real(&[0.8, 0.6]).unwrap());
    assert!((r.after - 0.8).abs() < 1e-15);
    let r = probe(LocalVector::up());
    assert_eq!((r.before, r.after), (1.0, 1.0));
    assert!(sensitivity_probe(&ProductOperator::identity(), &up, 5, &LocalVector::down()).is_err());
}

#[test]
fn trace_examples() {
    assert_eq!(projection_trace(&[e()]).unwrap(), 1);
    assert_eq!(projection_trace(&[LocalOperator::identity(4)]).unwrap(), 4);
    let h = LocalOperator::from_real(2, &[0.5, 0.5, 0.5, 0.5]).unwrap();
    assert_eq!(projection_trace(std::slice::from_ref(&h)).unwrap(), 1);
    assert_eq!(projection_trace(&[h, e(), LocalOperator::identity(2)]).unwrap(), 2);
    assert!(projection_trace(&[LocalOperator::from_real(2, &[1.0, 1.0, 0.0, 0.0]).unwrap()]).is_err());
}
