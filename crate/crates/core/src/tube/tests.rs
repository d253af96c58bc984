use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::group::GroupSpec;
use crate::orbit::{left_translate, GroupElement, TubePoint};
use crate::sampling::{random_group_element, random_tube_point};
use crate::C64;

/// `I_0(a)·e^{−a}` by its power series (moderate `a`) or asymptotic series.
fn bessel_i0_scaled(a: f64) -> f64 {
    if a < 30.0 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for j in 1..200 {
            term *= (a / 2.0) * (a / 2.0) / (j * j) as f64;
            sum += term;
        }
        sum * (-a).exp()
    } else {
        let mut term = 1.0;
        let mut sum = 1.0;
        for j in 1..12 {
            term *= ((2 * j - 1) as f64).powi(2) / (8.0 * a * j as f64);
            sum += term;
        }
        sum / (2.0 * PI * a).sqrt()
    }
}

fn torus_field(k: usize, tau: f64, az: usize) -> KernelField {
    let t = GroupSpec::torus(2);
    let l = t.weight(&[3, 4]).unwrap();
    let b = IsotypicBasis::new(&t, &l, k).unwrap();
    let g = x_tau_grid(&t, tau, Resolution::new(2, 1, az)).unwrap();
    KernelField::build(b, g, GramRoute::Dense).unwrap()
}

fn su2_field(k: usize, tau: f64, res: Resolution, route: GramRoute) -> KernelField {
    let s = GroupSpec::su2();
    let l = s.weight(&[1]).unwrap();
    let b = IsotypicBasis::new(&s, &l, k).unwrap();
    let g = x_tau_grid(&s, tau, res).unwrap();
    KernelField::build(b, g, route).unwrap()
}

#[test]
fn torus_gram_is_the_bessel_norm_integral() {
    // ‖φ̃‖² = τ ∫_{S¹} e^{2kτ⟨λ,ω⟩} dω = 2πτ I_0(2kτ‖λ‖)
    for k in [1usize, 8, 40] {
        let tau = 0.4;
        let f = torus_field(k, tau, 256);
        let a = 2.0 * k as f64 * tau * 5.0;
        let exact_scaled = 2.0 * PI * tau * bessel_i0_scaled(a);
        let got = f.gram.inner[(0, 0)].re;
        assert!((got / exact_scaled - 1.0).abs() < 1e-12, "k={k}");
        assert!(f.warnings.is_empty());
    }
}

#[test]
fn torus_szego_diagonal_matches_leading_density_on_ray() {
    // Π(x,x) = |φ̃|²/‖φ̃‖² → (2π)^{−d} (k‖λ‖/τπ)^{(d−1)/2}
    let tau = 0.4;
    let k = 64;
    let f = torus_field(k, tau, 256);
    let x = TubePoint::torus_polar(&[0.1, 0.2], tau, &[-0.6, -0.8]);
    let pi_xx = f.szego(&x, &x).unwrap().re;
    let lead = (2.0 * PI).powi(-2) * (k as f64 * 5.0 / (tau * PI)).sqrt();
    assert!((pi_xx / lead - 1.0).abs() < 2.0 / k as f64);
}

#[test]
fn torus_husimi_integrates_to_one_and_peaks_on_ray() {
    let tau = 0.4;
    let f = torus_field(10, tau, 256);
    let c = [C64::new(1.0, 0.0)];
    let mut total = 0.0;
    let mut best = (0.0, 0);
    for i in 0..f.grid.len() {
        let (x, w) = f.grid.node(i);
        let u = f.husimi(&c, &x).unwrap();
        total += u * w;
        if u > best.0 {
            best = (u, i);
        }
    }
    assert!((total - 1.0).abs() < 1e-10);
    let (x, _) = f.grid.node(best.1);
    let omega: Vec<f64> = x.xi.iter().map(|v| -v / tau).collect();
    // nearest grid direction to −ω = λ/‖λ‖
    assert!((-omega[0] - 0.6).abs() < 0.03 && (-omega[1] - 0.8).abs() < 0.03);
    assert!(f.husimi(&[C64::new(0.0, 0.0)], &x).is_err());
}

#[test]
fn tempered_poisson_is_bounded_on_the_torus_ray() {
    let t = GroupSpec::torus(2);
    let l = t.weight(&[3, 4]).unwrap();
    let x = TubePoint::torus_polar(&[0.0, 0.0], 0.4, &[-0.6, -0.8]);
    for k in [1usize, 10, 100, 400] {
        let b = IsotypicBasis::new(&t, &l, k).unwrap();
        let p = b.poisson(&x, &x).unwrap().re;
        assert!((p * (2.0 * PI).powi(2) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn grid_doubling_changes_norm_by_less_than_1e8() {
    let t = torus_field(10, 0.4, 128);
    let t2 = torus_field(10, 0.4, 256);
    let (a, b) = (t.gram.inner[(0, 0)].re, t2.gram.inner[(0, 0)].re);
    assert!((a / b - 1.0).abs() < 1e-8);
    let r = Resolution::exact_for_su2(10);
    let s = su2_field(10, 0.3, r, GramRoute::Factorized);
    let s2 = su2_field(10, 0.3, r.doubled(), GramRoute::Factorized);
    let tr = |f: &KernelField| f.gram.inner.trace().re;
    assert!((tr(&s) / tr(&s2) - 1.0).abs() < 1e-8);
}

#[test]
fn su2_gram_is_block_diagonal_with_equal_blocks() {
    let f = su2_field(2, 0.3, Resolution::exact_for_su2(2), GramRoute::Dense);
    let g = &f.gram.inner;
    let n = 3;
    for a in 0..n {
        for b in 0..n {
            let block = g.view((a * n, b * n), (n, n));
            if a == b {
                let first = g.view((0, 0), (n, n));
                assert!((block - first).norm() < 1e-6);
            } else {
                assert!(block.norm() < 1e-6);
            }
        }
    }
    assert!(f.gram.hermitian_defect() < 1e-12);
    assert!(f.min_eigenvalue > 0.0);
    // factorized route agrees with brute force
    let h = su2_field(2, 0.3, Resolution::exact_for_su2(2), GramRoute::Factorized);
    assert!((h.gram.to_dense() - g).norm() < 1e-10 * g.norm());
}

#[test]
fn su2_szego_diagonal_has_closed_form() {
    // Schur: Gram = N·I with N = 4πτ² sinh(2(K+1)τ)/((K+1) sinh 2τ), so
    // Π(x,x) = (K+1)²/(vol(G)·4πτ²) = (K+1)²/(8π³τ²)
    let tau = 0.3;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for k in [1usize, 4, 12] {
        let f = su2_field(k, tau, Resolution::exact_for_su2(k), GramRoute::Factorized);
        let x = random_tube_point(&GroupSpec::su2(), tau, &mut rng);
        let got = f.szego(&x, &x).unwrap().re;
        let expect = ((k + 1) * (k + 1)) as f64 / (8.0 * PI.powi(3) * tau * tau);
        assert!((got / expect - 1.0).abs() < 1e-10, "k={k}");
    }
}

#[test]
fn kernels_are_hermitian_and_left_invariant() {
    let tau = 0.3;
    let s = GroupSpec::su2();
    let f = su2_field(3, tau, Resolution::exact_for_su2(3), GramRoute::Factorized);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let x = random_tube_point(&s, tau, &mut rng);
        let y = random_tube_point(&s, tau, &mut rng);
        let pxy = f.szego(&x, &y).unwrap();
        let pyx = f.szego(&y, &x).unwrap();
        assert!((pxy - pyx.conj()).norm() <= 1e-12 * pxy.norm().max(1.0));
        let h = random_group_element(&s, &mut rng);
        let moved = f.szego(&left_translate(&h, &x), &left_translate(&h, &y)).unwrap();
        assert!((moved - pxy).norm() <= 1e-8 * pxy.norm().max(1.0));
        let qxy = f.poisson(&x, &y).unwrap();
        assert!((qxy - f.poisson(&y, &x).unwrap().conj()).norm() <= 1e-12 * qxy.norm().max(1.0));
        let qxx = f.poisson(&x, &x).unwrap();
        assert!(qxx.re >= 0.0 && qxx.im.abs() < 1e-12 * qxx.re);
    }
    let other = random_tube_point(&s, 0.5, &mut rng);
    assert!(f.szego(&other, &other).is_err());
}

#[test]
fn reproducing_property_at_k4() {
    let tau = 0.3;
    let s = GroupSpec::su2();
    let f = su2_field(4, tau, Resolution::exact_for_su2(4), GramRoute::Factorized);
    let fine = x_tau_grid(&s, tau, Resolution::new(10, 7, 13)).unwrap();
    let b = f.overlap_on(&fine).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..4 {
        let x = random_tube_point(&s, tau, &mut rng);
        let y = random_tube_point(&s, tau, &mut rng);
        let direct = f.szego(&x, &y).unwrap();
        let composed = f.compose_with_overlap(&x, &y, &b).unwrap();
        let scale = (f.szego(&x, &x).unwrap().re * f.szego(&y, &y).unwrap().re).sqrt();
        assert!((direct - composed).norm() <= 1e-3 * scale);
    }
}

#[test]
fn dense_brute_force_and_factorized_kernels_agree() {
    let tau = 0.3;
    let s = GroupSpec::su2();
    let r = Resolution::exact_for_su2(2);
    let d = su2_field(2, tau, r, GramRoute::Dense);
    let f = su2_field(2, tau, r, GramRoute::Factorized);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5 {
        let x = random_tube_point(&s, tau, &mut rng);
        let y = random_tube_point(&s, tau, &mut rng);
        let a = d.szego(&x, &y).unwrap();
        let b = f.szego(&x, &y).unwrap();
        assert!((a - b).norm() < 1e-9 * a.norm().max(1e-3));
    }
}

#[test]
fn discretized_projector_has_unit_norm() {
    let tau = 0.3;
    let s = GroupSpec::su2();
    let f = su2_field(2, tau, Resolution::exact_for_su2(2), GramRoute::Factorized);
    let other = x_tau_grid(&s, tau, Resolution::new(6, 5, 9)).unwrap();
    assert!((f.discretized_norm(&other).unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn under_resolved_grid_is_rejected_or_flagged() {
    let s = GroupSpec::su2();
    let l = s.weight(&[1]).unwrap();
    let b = IsotypicBasis::new(&s, &l, 3).unwrap();
    // a single group node cannot separate 16 functions
    let g = x_tau_grid(&s, 0.3, Resolution::new(1, 1, 1)).unwrap();
    assert!(matches!(KernelField::build(b.clone(), g, GramRoute::Dense), Err(crate::LabError::IllConditioned { .. })));
    let g = x_tau_grid(&s, 0.3, Resolution::new(6, 3, 5)).unwrap();
    let f = KernelField::build(b, g, GramRoute::Factorized).unwrap();
    assert!(!f.warnings.is_empty());
}

#[test]
fn husimi_max_finds_a_value_at_least_the_grid_max() {
    let tau = 0.3;
    let s = GroupSpec::su2();
    let f = su2_field(3, tau, Resolution::exact_for_su2(3), GramRoute::Factorized);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let coeffs: Vec<C64> = (0..f.basis.size).map(|i| C64::new((i as f64).sin(), 0.3)).collect();
    let cands: Vec<TubePoint> = (0..50).map(|_| random_tube_point(&s, tau, &mut rng)).collect();
    let grid_max = cands.iter().map(|x| f.husimi(&coeffs, x).unwrap()).fold(0.0, f64::max);
    let (m, at) = f.husimi_max(&coeffs, &cands, 30).unwrap();
    assert!(m * m >= grid_max);
    assert!((f.husimi(&coeffs, &at).unwrap().sqrt() - m).abs() < 1e-12);
    let _ = GroupElement::identity(&s);
}
