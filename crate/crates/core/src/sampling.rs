//! Seeded random points on `G`, on unit spheres and on `X^τ`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::group::{GroupKind, GroupSpec};
use crate::orbit::{GroupElement, TubePoint};
use crate::su2;

pub fn random_unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Haar-distributed element of `G`.
pub fn random_group_element<R: Rng + ?Sized>(spec: &GroupSpec, rng: &mut R) -> GroupElement {
    match spec.name {
        GroupKind::Torus { d } => {
            GroupElement::Torus((0..d).map(|_| rng.gen_range(0.0..2.0 * std::f64::consts::PI)).collect())
        }
        GroupKind::Su2 => GroupElement::Su2(su2::random_su2(rng)),
    }
}

/// Uniform point of `X^τ` for the product measure Haar ⊗ sphere area.
pub fn random_tube_point<R: Rng + ?Sized>(spec: &GroupSpec, tau: f64, rng: &mut R) -> TubePoint {
    let g = random_group_element(spec, rng);
    let xi = random_unit_vector(spec.dim, rng).into_iter().map(|x| x * tau).collect();
    TubePoint::new(g, xi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn samples_are_valid_and_reproducible() {
        let spec = GroupSpec::su2();
        let mut a = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let mut b = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let x = random_tube_point(&spec, 0.3, &mut a);
            x.validate(&spec).unwrap();
            assert!((x.tau - 0.3).abs() < 1e-15);
            assert_eq!(x, random_tube_point(&spec, 0.3, &mut b));
        }
    }
}
