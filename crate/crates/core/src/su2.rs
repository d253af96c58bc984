//! `SU(2)` and its complexification `SL(2, ℂ)` in the defining representation.
//!
//! The invariant product on `su(2)` is `κ_e(X, Y) = −½·tr(XY)`; the basis
//! `f_j = −i·σ_j` is orthonormal for it and `[f_i, f_j] = 2·ε_ijk·f_k`.
//! With this choice `SU(2)` is the unit 3-sphere, the fundamental weight has
//! norm 1 and the maximal torus `exp(θ f_3)` has length `2π`.

use nalgebra::{DMatrix, Matrix2, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::C64;

pub type Mat2 = Matrix2<C64>;

/// Scale of the structure constants: `[f_i, f_j] = STRUCTURE_SCALE·ε_ijk·f_k`.
pub const STRUCTURE_SCALE: f64 = 2.0;

const I: C64 = C64::new(0.0, 1.0);
const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);

pub fn pauli() -> [Mat2; 3] {
    [Mat2::new(ZERO, ONE, ONE, ZERO), Mat2::new(ZERO, -I, I, ZERO), Mat2::new(ONE, ZERO, ZERO, -ONE)]
}

/// The κ-orthonormal basis `f_j = −i·σ_j` of `su(2)`.
pub fn algebra_basis() -> [Mat2; 3] {
    pauli().map(|s| s * (-I))
}

pub fn kappa(x: &Mat2, y: &Mat2) -> f64 {
    -0.5 * (x * y).trace().re
}

/// Coordinates of an anti-Hermitian traceless matrix in the `f_j` basis.
pub fn coords(x: &Mat2) -> [f64; 3] {
    let f = algebra_basis();
    [kappa(x, &f[0]), kappa(x, &f[1]), kappa(x, &f[2])]
}

pub fn from_coords(v: &[f64]) -> Mat2 {
    let f = algebra_basis();
    f[0] * C64::from(v[0]) + f[1] * C64::from(v[1]) + f[2] * C64::from(v[2])
}

fn sigma_dot(unit: &[f64]) -> Mat2 {
    let s = pauli();
    s[0] * C64::from(unit[0]) + s[1] * C64::from(unit[1]) + s[2] * C64::from(unit[2])
}

fn norm3(v: &[f64]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// `exp(Σ v_j f_j) = cos|v|·1 − i·sin|v|·(v̂·σ)`.
pub fn exp_algebra(v: &[f64]) -> Mat2 {
    let r = norm3(v);
    if r == 0.0 {
        return Mat2::identity();
    }
    let unit = [v[0] / r, v[1] / r, v[2] / r];
    Mat2::identity() * C64::from(r.cos()) - sigma_dot(&unit) * (I * r.sin())
}

/// `exp(i·Σ v_j f_j) = cosh|v|·1 + sinh|v|·(v̂·σ)`, a positive Hermitian matrix.
pub fn exp_imaginary(v: &[f64]) -> Mat2 {
    let r = norm3(v);
    if r == 0.0 {
        return Mat2::identity();
    }
    let unit = [v[0] / r, v[1] / r, v[2] / r];
    Mat2::identity() * C64::from(r.cosh()) + sigma_dot(&unit) * C64::from(r.sinh())
}

/// Coordinates of `Ad_g(ξ) = g ξ g⁻¹`.
pub fn adjoint(g: &Mat2, v: &[f64]) -> [f64; 3] {
    coords(&(g * from_coords(v) * g.adjoint()))
}

pub fn is_special_unitary(g: &Mat2, tol: f64) -> bool {
    let unitary = (g * g.adjoint() - Mat2::identity()).norm() <= tol;
    unitary && (g.determinant() - ONE).norm() <= tol
}

/// Haar-uniform element of `SU(2)` (normalised Gaussian quaternion).
pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let a = C64::new(q[0] / n, q[1] / n);
    let b = C64::new(q[2] / n, q[3] / n);
    Mat2::new(a, -b.conj(), b, a.conj())
}

/// `R_z(φ) = diag(e^{−iφ/2}, e^{iφ/2})`.
pub fn rot_z(phi: f64) -> Mat2 {
    Mat2::new(C64::from_polar(1.0, -phi / 2.0), ZERO, ZERO, C64::from_polar(1.0, phi / 2.0))
}

/// `R_x(β) = exp(−iβσ_x/2)`.
pub fn rot_x(beta: f64) -> Mat2 {
    let (s, c) = (beta / 2.0).sin_cos();
    Mat2::new(C64::from(c), -I * s, -I * s, C64::from(c))
}

/// `R_z(α)·R_x(β)·R_z(γ)`; covers `SU(2)` once for `α ∈ [0,2π)`, `β ∈ [0,π]`, `γ ∈ [0,4π)`.
pub fn from_euler(alpha: f64, beta: f64, gamma: f64) -> Mat2 {
    rot_z(alpha) * rot_x(beta) * rot_z(gamma)
}

/// Product quadrature for the Riemannian volume of `SU(2) = S³` in Euler
/// angles: trapezoid in `α` and `γ`, Gauss–Legendre in `cos β`. The volume
/// element is `⅛ sin β dα dβ dγ`, so the weights sum to `2π²`.
pub fn euler_haar_grid(n_alpha: usize, n_beta: usize, n_gamma: usize) -> Vec<(Mat2, f64)> {
    use crate::quadrature::{gauss_legendre, trapezoid_nodes};
    use std::f64::consts::PI;
    let alphas = trapezoid_nodes(n_alpha, 2.0 * PI);
    let gammas = trapezoid_nodes(n_gamma, 4.0 * PI);
    let (xs, ws) = gauss_legendre(n_beta);
    let base = 0.125 * (2.0 * PI / n_alpha as f64) * (4.0 * PI / n_gamma as f64);
    let mut out = Vec::with_capacity(n_alpha * n_beta * n_gamma);
    for &a in &alphas {
        for (x, w) in xs.iter().zip(&ws) {
            let b = x.clamp(-1.0, 1.0).acos();
            for &g in &gammas {
                out.push((from_euler(a, b, g), base * w));
            }
        }
    }
    out
}

/// Half Euler angles `(α/2, β/2, γ/2)` of `u ∈ SU(2)` in the ZXZ convention.
fn half_euler(u: &Mat2) -> (f64, f64, f64) {
    let a = u[(0, 0)];
    let b = u[(1, 0)];
    let half_beta = b.norm().atan2(a.norm());
    let p = if a.norm() > 1e-300 { -a.arg() } else { 0.0 };
    let q = if b.norm() > 1e-300 { b.arg() + std::f64::consts::FRAC_PI_2 } else { 0.0 };
    ((p + q) / 2.0, half_beta, (p - q) / 2.0)
}

/// Singular value decomposition `m = U·diag(s₁, s₂)·V†` of a 2×2 complex
/// matrix with `s₁ ≥ s₂ > 0`.
fn svd2(m: &Mat2) -> (Mat2, f64, f64, Mat2) {
    let h = m.adjoint() * m;
    let a = h[(0, 0)].re;
    let d = h[(1, 1)].re;
    let b = h[(0, 1)];
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    let l1 = mean + rad;
    let v1 = if b.norm() > 1e-300 * (a.abs() + d.abs()).max(1e-300) {
        let v = nalgebra::Vector2::new(b, C64::from(l1 - a));
        v / C64::from(v.norm())
    } else if a >= d {
        nalgebra::Vector2::new(ONE, ZERO)
    } else {
        nalgebra::Vector2::new(ZERO, ONE)
    };
    let v2 = nalgebra::Vector2::new(-v1[1].conj(), v1[0].conj());
    let s1 = l1.max(0.0).sqrt();
    let s2 = m.determinant().norm() / s1;
    let u1 = (m * v1) / C64::from(s1);
    let u2 = (m * v2) / C64::from(s2);
    let u = Mat2::from_columns(&[u1, u2]);
    let v = Mat2::from_columns(&[v1, v2]);
    (u, s1, s2, v)
}

/// The degree-`k` irreducible representation of `GL(2, ℂ)` on homogeneous
/// polynomials, `(π(M)p)(z) = p(Mᵀz)`, in the orthonormal monomial basis
/// `e_n = z₁^{k−n} z₂^n / √(n!(k−n)!)`. Unitary on `U(2)`, `π(M†) = π(M)†`.
///
/// Matrices are built from the SVD and a ZXZ Euler factorisation; the
/// `R_x` factor is exponentiated through the eigenbasis of the real symmetric
/// generator, so no binomial cancellation occurs.
#[derive(Debug, Clone)]
pub struct Su2Rep {
    degree: usize,
    sx_vectors: DMatrix<f64>,
    sx_values: Vec<f64>,
}

impl Su2Rep {
    pub fn new(degree: usize) -> Self {
        let eig = SymmetricEigen::new(Self::sigma_x_generator(degree));
        Self { degree, sx_vectors: eig.eigenvectors, sx_values: eig.eigenvalues.iter().copied().collect() }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.degree + 1
    }

    fn sigma_x_generator(k: usize) -> DMatrix<f64> {
        let n = k + 1;
        let mut s = DMatrix::zeros(n, n);
        for j in 0..k {
            let v = (((k - j) * (j + 1)) as f64).sqrt();
            s[(j + 1, j)] = v;
            s[(j, j + 1)] = v;
        }
        s
    }

    /// Infinitesimal generators `π_*(f_j)`, `j = 0, 1, 2`.
    pub fn generators(&self) -> [DMatrix<C64>; 3] {
        let k = self.degree;
        let n = k + 1;
        let sx = Self::sigma_x_generator(k).map(C64::from);
        let mut sy = DMatrix::<C64>::zeros(n, n);
        for j in 0..k {
            let v = (((k - j) * (j + 1)) as f64).sqrt();
            // i z₂∂₁ raises n, −i z₁∂₂ lowers it
            sy[(j + 1, j)] = I * v;
            sy[(j, j + 1)] = -I * v;
        }
        let sz =
            DMatrix::<C64>::from_diagonal(&nalgebra::DVector::from_fn(n, |j, _| C64::from(k as f64 - 2.0 * j as f64)));
        [sx * (-I), sy * (-I), sz * (-I)]
    }

    fn diag_rz(&self, half_angle: f64) -> Vec<C64> {
        let k = self.degree as f64;
        (0..=self.degree).map(|n| C64::from_polar(1.0, -half_angle * (k - 2.0 * n as f64))).collect()
    }

    fn special_unitary(&self, u: &Mat2) -> DMatrix<C64> {
        let (ha, hb, hg) = half_euler(u);
        let n = self.dim();
        let left = self.diag_rz(ha);
        let right = self.diag_rz(hg);
        let phases: Vec<C64> = self.sx_values.iter().map(|&l| C64::from_polar(1.0, -hb * l)).collect();
        let v = &self.sx_vectors;
        DMatrix::from_fn(n, n, |r, c| {
            let mut acc = ZERO;
            for j in 0..n {
                acc += phases[j] * (v[(r, j)] * v[(c, j)]);
            }
            left[r] * acc * right[c]
        })
    }

    /// `π(u)` for `u ∈ U(2)`.
    pub fn unitary(&self, u: &Mat2) -> DMatrix<C64> {
        let half_phase = 0.5 * u.determinant().arg();
        let su = u * C64::from_polar(1.0, -half_phase);
        self.special_unitary(&su) * C64::from_polar(1.0, self.degree as f64 * half_phase)
    }

    /// `(log s, π(m)/s)` with `s = σ_max(m)^k`, so the returned matrix has
    /// entries of modulus at most one.
    pub fn matrix_scaled(&self, m: &Mat2) -> (f64, DMatrix<C64>) {
        let (u, s1, s2, v) = svd2(m);
        let ratio = s2 / s1;
        let pu = self.unitary(&u);
        let pv = self.unitary(&v);
        let diag: Vec<f64> = (0..=self.degree).map(|n| ratio.powi(n as i32)).collect();
        let mut scaled = pu;
        for c in 0..self.dim() {
            let f = diag[c];
            scaled.column_mut(c).scale_mut(f);
        }
        (self.degree as f64 * s1.ln(), scaled * pv.adjoint())
    }

    pub fn matrix(&self, m: &Mat2) -> DMatrix<C64> {
        let (log_scale, scaled) = self.matrix_scaled(m);
        scaled * C64::from(log_scale.exp())
    }
}
