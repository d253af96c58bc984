use std::f64::consts::PI;

use grauert_core::asymptotics::{predicted_poisson_scaled, predicted_szego_scaled, Displacements, PredictionInputs};
use grauert_core::orbit::{kirillov_character, orbit_grid, symplectic_volume};
use grauert_core::sampling::{random_group_element, random_tube_point};
use grauert_core::{orbit, x_tau_grid, GramRoute, GroupSpec, IsotypicBasis, KernelField, Resolution, TubePoint, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

// Clebsch–Gordan: V_a ⊗ V_b ⊃ V_c exactly once iff |a−b| ≤ c ≤ a+b and a+b+c even.
#[test]
fn triple_character_integrals_count_clebsch_gordan_multiplicities() {
    let s = GroupSpec::su2();
    for a in 0..6i64 {
        for b in 0..6i64 {
            for c in 0..8i64 {
                let (wa, wb, wc) = (s.weight(&[a]).unwrap(), s.weight(&[b]).unwrap(), s.weight(&[c]).unwrap());
                let v = s
                    .weyl_integrate(
                        |t| {
                            s.weyl_character(&wa, t).unwrap()
                                * s.weyl_character(&wb, t).unwrap()
                                * s.weyl_character(&wc, t).unwrap().conj()
                        },
                        64,
                    )
                    .unwrap();
                let expected = ((a - b).abs() <= c && c <= a + b && (a + b + c) % 2 == 0) as i32 as f64;
                assert!((v - C64::from(expected)).norm() < 1e-12, "({a},{b},{c}): {v}");
            }
        }
    }
}

#[test]
fn kirillov_at_identity_recovers_the_dimension_polynomial() {
    let s = GroupSpec::su2();
    for n in 0..30i64 {
        let w = s.weight(&[n]).unwrap();
        let shifted = s.shift_by_delta(&w);
        let vol = symplectic_volume(&s, &shifted).unwrap();
        assert!((vol / (2.0 * PI) - (n + 1) as f64).abs() < 1e-12);
        let grid = orbit_grid(&s, &shifted, 64).unwrap();
        let chi0 = kirillov_character(&s, &[0.0; 3], &grid).unwrap();
        assert!((chi0.re - s.weyl_dimension(&w).unwrap() as f64).abs() < 1e-10);
    }
}

// Untempered P(x, x) = (K+1)/vol(G) · tr π(aa†) with eigenvalues e^{±2τ} of aa†.
#[test]
fn poisson_diagonal_is_the_complexified_character() {
    let s = GroupSpec::su2();
    let lambda = s.weight(&[1]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in [1usize, 3, 10, 25] {
        let basis = IsotypicBasis::new(&s, &lambda, k).unwrap();
        for tau in [0.2, 0.7] {
            let x = random_tube_point(&s, tau, &mut rng);
            let c = basis.c_lambda();
            let p = basis.poisson(&x, &x).unwrap().re;
            let kk = k as f64;
            let h = (2.0 * (kk + 1.0) * tau).sinh() / (2.0 * tau).sinh();
            let expected = (kk + 1.0) / (2.0 * PI * PI) * h * (-2.0 * tau * c).exp();
            assert!((p / expected - 1.0).abs() < 1e-11, "k={k} τ={tau}: {p} vs {expected}");
        }
    }
}

#[test]
fn szego_kernel_is_invariant_and_reproduces_itself() {
    let s = GroupSpec::su2();
    let lambda = s.weight(&[1]).unwrap();
    let tau = 0.4;
    let k = 3;
    let res = Resolution::exact_for_su2(k);
    let basis = IsotypicBasis::new(&s, &lambda, k).unwrap();
    let grid = x_tau_grid(&s, tau, res).unwrap();
    let f = KernelField::build(basis, grid, GramRoute::Factorized).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let check = x_tau_grid(&s, tau, res.doubled()).unwrap();
    let overlap = f.overlap_on(&check).unwrap();
    for _ in 0..5 {
        let x = random_tube_point(&s, tau, &mut rng);
        let y = random_tube_point(&s, tau, &mut rng);
        let h = random_group_element(&s, &mut rng);
        let direct = f.szego(&x, &y).unwrap();
        let moved = f.szego(&orbit::left_translate(&h, &x), &orbit::left_translate(&h, &y)).unwrap();
        assert!((direct - moved).norm() < 1e-10 * direct.norm().max(1.0));
        let composed = f.compose_with_overlap(&x, &y, &overlap).unwrap();
        assert!((direct - composed).norm() < 1e-10 * f.szego(&x, &x).unwrap().re);
        assert!(direct.norm_sqr() <= f.szego(&x, &x).unwrap().re * f.szego(&y, &y).unwrap().re * (1.0 + 1e-12));
    }
}

#[test]
fn torus_kernels_approach_their_leading_terms() {
    let t = GroupSpec::torus(2);
    let lambda = t.weight(&[3, 4]).unwrap();
    let tau = 0.4;
    let x = TubePoint::torus_polar(&[0.2, -0.5], tau, &[-0.6, -0.8]);
    let inputs = PredictionInputs::from_spec(&t, &lambda, tau, &x).unwrap();
    let zero = Displacements::default();
    let mut previous = f64::INFINITY;
    for k in [4usize, 8, 16, 32, 64] {
        let basis = IsotypicBasis::new(&t, &lambda, k).unwrap();
        let grid = x_tau_grid(&t, tau, Resolution::new(1, 64, 256)).unwrap();
        let f = KernelField::build(basis, grid, GramRoute::Dense).unwrap();
        let p = f.poisson(&x, &x).unwrap().re;
        let pp = predicted_poisson_scaled(&inputs, k, &zero).unwrap().value.re;
        assert!((p / pp - 1.0).abs() < 1e-12);
        let sz = f.szego(&x, &x).unwrap().re;
        let ps = predicted_szego_scaled(&inputs, k, &zero).unwrap().value.re;
        let err = (sz / ps - 1.0).abs();
        assert!(err < previous);
        previous = err;
    }
    assert!(previous < 2.0 / 64.0);
}
