//! One-dimensional rules and compensated accumulation.

use std::f64::consts::PI;

use crate::C64;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending nodes.
///
/// Newton iteration on `P_n` from the Tricomi initial guess; converges to
/// machine precision for every `n` used here (n ≤ a few hundred).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Equispaced periodic nodes `period·j/n`, `j = 0..n`.
pub fn trapezoid_nodes(n: usize, period: f64) -> Vec<f64> {
    (0..n).map(|j| period * j as f64 / n as f64).collect()
}

/// Product grid on the unit sphere `S²`: Gauss–Legendre in `cos φ` times
/// trapezoid in azimuth. Integrates spherical polynomials of degree
/// `< min(2·n_polar, n_azimuth)` exactly; weights sum to `4π`.
pub fn sphere_grid(n_polar: usize, n_azimuth: usize) -> (Vec<[f64; 3]>, Vec<f64>) {
    let (xs, ws) = gauss_legendre(n_polar);
    let az = trapezoid_nodes(n_azimuth, 2.0 * std::f64::consts::PI);
    let dphi = 2.0 * std::f64::consts::PI / n_azimuth as f64;
    let mut nodes = Vec::with_capacity(n_polar * n_azimuth);
    let mut weights = Vec::with_capacity(n_polar * n_azimuth);
    for (z, w) in xs.iter().zip(&ws) {
        let rho = (1.0 - z * z).max(0.0).sqrt();
        for &p in &az {
            nodes.push([rho * p.cos(), rho * p.sin(), *z]);
            weights.push(w * dphi);
        }
    }
    (nodes, weights)
}

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexKahanSum {
    re: KahanSum,
    im: KahanSum,
}

impl ComplexKahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: C64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> C64 {
        C64::new(self.re.value(), self.im.value())
    }
}

impl std::iter::FromIterator<C64> for ComplexKahanSum {
    fn from_iter<I: IntoIterator<Item = C64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}

impl std::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_grid_integrates_low_degree_harmonics() {
        let (nodes, w) = sphere_grid(6, 12);
        let total: f64 = w.iter().sum();
        assert!((total - 4.0 * std::f64::consts::PI).abs() < 1e-13);
        // ∫ x² = ∫ z² = 4π/3, ∫ x⁴ = 4π/5
        let x2: f64 = nodes.iter().zip(&w).map(|(n, w)| n[0] * n[0] * w).sum();
        let z2: f64 = nodes.iter().zip(&w).map(|(n, w)| n[2] * n[2] * w).sum();
        let x4: f64 = nodes.iter().zip(&w).map(|(n, w)| n[0].powi(4) * w).sum();
        let pi = std::f64::consts::PI;
        assert!((x2 - 4.0 * pi / 3.0).abs() < 1e-13);
        assert!((z2 - 4.0 * pi / 3.0).abs() < 1e-13);
        assert!((x4 - 4.0 * pi / 5.0).abs() < 1e-13);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in 1..40 {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn gauss_legendre_nodes_sorted_and_weights_positive() {
        let (x, w) = gauss_legendre(101);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
        assert!(w.iter().all(|&w| w > 0.0));
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn compensated_sum_recovers_cancelled_terms() {
        let s: KahanSum = [1e16, 1.0, -1e16, 1.0].into_iter().collect();
        assert_eq!(s.value(), 2.0);
    }
}
