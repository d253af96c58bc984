//! Holomorphic extensions of `L²(G)`-orthonormal matrix elements.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{LabError, Result};
use crate::group::{GroupKind, GroupSpec, Weight};
use crate::orbit::{GroupElement, TubePoint};
use crate::su2::Su2Rep;
use crate::C64;

/// The `d_{kλ}²` functions `σ̃_{kλ,j}` spanning `H(X^τ)_{kλ}`.
///
/// Torus: `φ̃ = (2π)^{−d/2} e^{−ik⟨λ, θ + iξ⟩}`. `SU(2)`: the entries of
/// `√(K+1)/vol^κ(G)^{1/2} · π_K(g·exp(iξ))`, `K = k·n`, which restrict to an
/// orthonormal basis of `L²(G)` for the Riemannian volume.
#[derive(Debug, Clone)]
pub struct IsotypicBasis {
    pub spec: GroupSpec,
    pub lambda: Weight,
    pub k: usize,
    pub size: usize,
    rep: Option<Su2Rep>,
    c: f64,
}

impl IsotypicBasis {
    pub fn new(spec: &GroupSpec, lambda: &Weight, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(LabError::Domain("the ladder index k must be ≥ 1".into()));
        }
        let kl = lambda.scaled(k as i64);
        let c = spec.c_lambda(&kl)?;
        let dim = spec.weyl_dimension(&kl)? as usize;
        let rep = match spec.name {
            GroupKind::Su2 => Some(Su2Rep::new(kl.lattice[0] as usize)),
            GroupKind::Torus { .. } => None,
        };
        Ok(Self { spec: spec.clone(), lambda: lambda.clone(), k, size: dim * dim, rep, c })
    }

    /// `d_{kλ}`.
    pub fn rep_dim(&self) -> usize {
        self.rep.as_ref().map_or(1, |r| r.dim())
    }

    /// Degree `K` of the `SU(2)` representation (0 on the torus).
    pub fn degree(&self) -> usize {
        self.rep.as_ref().map_or(0, |r| r.degree())
    }

    /// `c_{kλ}`.
    pub fn c_lambda(&self) -> f64 {
        self.c
    }

    /// Log-scale `L = kτ‖λ‖` by which all values at radius `τ` are divided.
    pub fn log_scale(&self, tau: f64) -> f64 {
        self.k as f64 * tau * self.lambda.norm
    }

    fn su2_normalization(&self) -> f64 {
        (self.rep_dim() as f64 / self.spec.haar_normalization).sqrt()
    }

    /// Values as a `d_{kλ} × d_{kλ}` matrix, divided by `e^{L}`; entry `(m, n)`
    /// is basis function `m·d_{kλ} + n`.
    pub fn matrix_scaled(&self, x: &TubePoint) -> Result<(f64, DMatrix<C64>)> {
        let l = self.log_scale(x.tau);
        match (&x.g, &self.rep) {
            (GroupElement::Torus(theta), None) => {
                if theta.len() != self.spec.dim || x.xi.len() != self.spec.dim {
                    return Err(LabError::DimensionMismatch { expected: self.spec.dim, got: theta.len() });
                }
                let k = self.k as f64;
                let lam = &self.lambda.covector;
                let phase: f64 = -k * lam.iter().zip(theta).map(|(a, b)| a * b).sum::<f64>();
                let growth: f64 = k * lam.iter().zip(&x.xi).map(|(a, b)| a * b).sum::<f64>();
                let cd = (2.0 * PI).powf(-(self.spec.dim as f64) / 2.0);
                Ok((l, DMatrix::from_element(1, 1, C64::from_polar(cd * (growth - l).exp(), phase))))
            }
            (GroupElement::Su2(_), Some(rep)) => {
                let a = x.complex_matrix().expect("SU(2) point");
                let (log_s, m) = rep.matrix_scaled(&a);
                let f = self.su2_normalization() * (log_s - l).exp();
                Ok((l, m * C64::from(f)))
            }
            _ => Err(LabError::Domain("tube point does not belong to this group".into())),
        }
    }

    /// `(L, v)` with `σ̃(x) = e^{L}·v`.
    pub fn evaluate_scaled(&self, x: &TubePoint) -> Result<(f64, Vec<C64>)> {
        let (l, m) = self.matrix_scaled(x)?;
        // row-major flattening
        Ok((l, m.transpose().iter().copied().collect()))
    }

    /// Unscaled values `σ̃_j(x)`; overflows for large `kτ‖λ‖`.
    pub fn evaluate(&self, x: &TubePoint) -> Result<Vec<C64>> {
        let (l, v) = self.evaluate_scaled(x)?;
        let s = l.exp();
        Ok(v.into_iter().map(|z| z * s).collect())
    }

    /// Tempered Poisson kernel `e^{−2τc_{kλ}} Σ_j σ̃_j(x) conj σ̃_j(y)`.
    pub fn poisson(&self, x: &TubePoint, y: &TubePoint) -> Result<C64> {
        if (x.tau - y.tau).abs() > 1e-12 * x.tau.max(1.0) {
            return Err(LabError::Domain("points lie on different tubes".into()));
        }
        let (lx, vx) = self.evaluate_scaled(x)?;
        let (ly, vy) = self.evaluate_scaled(y)?;
        let s: C64 = vx.iter().zip(&vy).map(|(a, b)| a * b.conj()).sum();
        Ok(s * (lx + ly - 2.0 * x.tau * self.c).exp())
    }
}

/// Values of the extended matrix elements of `kλ` at `x`.
pub fn matrix_elements(spec: &GroupSpec, lambda: &Weight, k: usize, x: &TubePoint) -> Result<Vec<C64>> {
    IsotypicBasis::new(spec, lambda, k)?.evaluate(x)
}
