//! Tube points, the moment map, coadjoint orbits and the Kirillov character
//! formula.
//!
//! A point of `G̃` is stored as `(g, ξ)` and stands for `g·exp(iξ)`; on the
//! torus the holomorphic coordinate is `e^{iθ − ξ}`, so the polar point
//! `e^{iθ + τω}` has `ξ = −τω`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::group::{GroupKind, GroupSpec, Weight};
use crate::quadrature::{sphere_grid, ComplexKahanSum};
use crate::su2::{self, Mat2};
use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub enum GroupElement {
    /// Angle vector `θ`, standing for `e^{iθ}`.
    Torus(Vec<f64>),
    Su2(Mat2),
}

impl GroupElement {
    pub fn identity(spec: &GroupSpec) -> Self {
        match spec.name {
            GroupKind::Torus { d } => GroupElement::Torus(vec![0.0; d]),
            GroupKind::Su2 => GroupElement::Su2(Mat2::identity()),
        }
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        match (self, other) {
            (GroupElement::Torus(a), GroupElement::Torus(b)) => {
                GroupElement::Torus(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (GroupElement::Su2(a), GroupElement::Su2(b)) => GroupElement::Su2(a * b),
            _ => panic!("mixed group elements"),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        match self {
            GroupElement::Torus(a) => GroupElement::Torus(a.iter().map(|x| -x).collect()),
            GroupElement::Su2(a) => GroupElement::Su2(a.adjoint()),
        }
    }

    pub fn satisfies_constraint(&self, tol: f64) -> bool {
        match self {
            GroupElement::Torus(a) => a.iter().all(|x| x.is_finite()),
            GroupElement::Su2(a) => su2::is_special_unitary(a, tol),
        }
    }

    fn matches(&self, spec: &GroupSpec) -> bool {
        match (self, spec.name) {
            (GroupElement::Torus(a), GroupKind::Torus { d }) => a.len() == d,
            (GroupElement::Su2(_), GroupKind::Su2) => true,
            _ => false,
        }
    }
}

/// `x = g·exp(iξ) ∈ G̃`, with `τ = ‖ξ‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct TubePoint {
    pub g: GroupElement,
    pub xi: Vec<f64>,
    pub tau: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl TubePoint {
    pub fn new(g: GroupElement, xi: Vec<f64>) -> Self {
        let tau = norm(&xi);
        Self { g, xi, tau }
    }

    /// Checks the group constraint, the length of `ξ` and the cached `τ`.
    pub fn validate(&self, spec: &GroupSpec) -> Result<()> {
        if !self.g.matches(spec) || self.xi.len() != spec.dim {
            return Err(LabError::DimensionMismatch { expected: spec.dim, got: self.xi.len() });
        }
        if !self.g.satisfies_constraint(1e-12) {
            return Err(LabError::Domain("group element violates its constraint".into()));
        }
        if (norm(&self.xi) - self.tau).abs() > 1e-12 {
            return Err(LabError::Domain("cached τ disagrees with ‖ξ‖".into()));
        }
        Ok(())
    }

    /// The torus point `e^{iθ + τω}` of the worked example (`ξ = −τω`).
    pub fn torus_polar(theta: &[f64], tau: f64, omega: &[f64]) -> Self {
        let xi = omega.iter().map(|w| -tau * w).collect();
        Self::new(GroupElement::Torus(theta.to_vec()), xi)
    }

    /// `g·exp(iξ)` as a matrix in `SL(2, ℂ)`.
    pub fn complex_matrix(&self) -> Option<Mat2> {
        match &self.g {
            GroupElement::Su2(g) => Some(g * su2::exp_imaginary(&self.xi)),
            GroupElement::Torus(_) => None,
        }
    }

    /// Unit direction `ξ/τ`.
    pub fn direction(&self) -> Vec<f64> {
        self.xi.iter().map(|x| x / self.tau).collect()
    }
}

/// Left translation `μ_h(g, ξ) = (hg, ξ)`.
pub fn left_translate(h: &GroupElement, x: &TubePoint) -> TubePoint {
    TubePoint { g: h.mul(&x.g), xi: x.xi.clone(), tau: x.tau }
}

/// Coadjoint action on κ-orthonormal coordinates (`Coad_h = Ad_h` under κ).
pub fn coadjoint(h: &GroupElement, v: &[f64]) -> Vec<f64> {
    match h {
        GroupElement::Torus(_) => v.to_vec(),
        GroupElement::Su2(g) => su2::adjoint(g, v).to_vec(),
    }
}

/// `Φ(g·exp(iξ)) = Coad_g(ξ_κ)`.
pub fn moment_map(_spec: &GroupSpec, x: &TubePoint) -> Vec<f64> {
    coadjoint(&x.g, &x.xi)
}

/// `τ`-scaled chordal distance from `Φ(x)/‖Φ(x)‖` to the unit orbit
/// `{Coad_g λ/‖λ‖}`; zero exactly on `X^τ_𝒪`.
pub fn dist_to_cone(spec: &GroupSpec, x: &TubePoint, lambda: &Weight) -> Result<f64> {
    if lambda.is_zero() {
        return Err(LabError::Domain("the cone over the zero orbit is degenerate".into()));
    }
    let phi = moment_map(spec, x);
    let r = norm(&phi);
    if r == 0.0 {
        return Err(LabError::Domain("Φ(x) = 0: x lies on the zero section".into()));
    }
    match spec.name {
        GroupKind::Torus { .. } => {
            let d: f64 =
                phi.iter().zip(&lambda.covector).map(|(p, l)| (p / r - l / lambda.norm).powi(2)).sum::<f64>().sqrt();
            Ok(x.tau * d)
        }
        // Every nonzero direction lies on the sphere through λ/‖λ‖.
        GroupKind::Su2 => Ok(0.0),
    }
}

/// Quadrature on the coadjoint orbit `𝒪_{scale·λ}` with weights of the
/// Kirillov–Kostant–Souriau volume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitGrid {
    pub base_weight: Weight,
    pub scale: f64,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub sym_volume: f64,
    pub n_polar: usize,
    pub n_azimuth: usize,
}

impl OrbitGrid {
    pub fn radius(&self) -> f64 {
        self.scale * self.base_weight.norm
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Symplectic (KKS) volume of `𝒪_λ`. On `SU(2)` with `[f_i, f_j] = c·ε_ijk f_k`
/// the KKS form on the sphere of radius `r` is `dA/(c·r)`, so the volume is
/// `4πr/c = 2πr`.
pub fn symplectic_volume(spec: &GroupSpec, lambda: &Weight) -> Result<f64> {
    if !spec.is_dominant(lambda) {
        return Err(LabError::Domain(format!("weight {:?} is not dominant", lambda.lattice)));
    }
    Ok(match spec.name {
        GroupKind::Torus { .. } => 1.0,
        GroupKind::Su2 if lambda.is_zero() => 1.0,
        GroupKind::Su2 => 4.0 * PI * lambda.norm / su2::STRUCTURE_SCALE,
    })
}

/// Orbit grid on `𝒪_λ` with about `n` nodes.
pub fn orbit_grid(spec: &GroupSpec, lambda: &Weight, n: usize) -> Result<OrbitGrid> {
    orbit_grid_scaled(spec, lambda, 1.0, n)
}

/// Orbit grid on `𝒪_{scale·λ}`. On `SU(2)` the `n` nodes are split into
/// `⌊√(n/2)⌋` Gauss–Legendre polar rings times `n / n_polar` azimuths.
pub fn orbit_grid_scaled(spec: &GroupSpec, lambda: &Weight, scale: f64, n: usize) -> Result<OrbitGrid> {
    if n == 0 {
        return Err(LabError::Config("orbit grid needs at least one node".into()));
    }
    if !spec.is_dominant(lambda) || scale <= 0.0 {
        return Err(LabError::Domain("orbit grid needs a dominant weight and positive scale".into()));
    }
    match spec.name {
        GroupKind::Torus { .. } => Ok(OrbitGrid {
            base_weight: lambda.clone(),
            scale,
            nodes: vec![lambda.covector.iter().map(|c| c * scale).collect()],
            weights: vec![1.0],
            sym_volume: 1.0,
            n_polar: 1,
            n_azimuth: 1,
        }),
        GroupKind::Su2 => {
            if lambda.is_zero() {
                return Err(LabError::Domain("the zero orbit is a point".into()));
            }
            let n_polar = ((n as f64 / 2.0).sqrt().floor() as usize).max(1);
            let n_azimuth = (n / n_polar).max(1);
            let r = scale * lambda.norm;
            let (unit, area) = sphere_grid(n_polar, n_azimuth);
            let density = 1.0 / (su2::STRUCTURE_SCALE * r);
            let nodes = unit.iter().map(|u| u.iter().map(|c| c * r).collect()).collect();
            let weights: Vec<f64> = area.iter().map(|a| a * r * r * density).collect();
            Ok(OrbitGrid {
                base_weight: lambda.clone(),
                scale,
                nodes,
                weights,
                sym_volume: 4.0 * PI * r / su2::STRUCTURE_SCALE,
                n_polar,
                n_azimuth,
            })
        }
    }
}

/// `P(ξ)` with `exp^*(dV_G) = P² dV_𝔤`; on `SU(2) = S³` it is `sin‖ξ‖/‖ξ‖`.
pub fn jacobian_p(spec: &GroupSpec, xi: &[f64]) -> Result<f64> {
    match spec.name {
        GroupKind::Torus { .. } => Ok(1.0),
        GroupKind::Su2 => {
            let s = norm(xi);
            if s >= PI {
                return Err(LabError::Domain(format!("‖ξ‖ = {s} outside the injectivity ball")));
            }
            Ok(if s < 1e-8 { 1.0 - s * s / 6.0 } else { s.sin() / s })
        }
    }
}

/// Kirillov character formula: `(2π)^{−n_G} P(ξ)^{−1} ∫_𝒪 e^{i⟨β, ξ⟩} dβ`,
/// using a grid on `𝒪_{λ+δ}`.
pub fn kirillov_character(spec: &GroupSpec, xi: &[f64], grid: &OrbitGrid) -> Result<C64> {
    let p = jacobian_p(spec, xi)?;
    if xi.len() != spec.dim {
        return Err(LabError::DimensionMismatch { expected: spec.dim, got: xi.len() });
    }
    let s: ComplexKahanSum = grid
        .nodes
        .iter()
        .zip(&grid.weights)
        .map(|(b, w)| C64::from_polar(*w, b.iter().zip(xi).map(|(x, y)| x * y).sum()))
        .collect();
    let n_g = spec.orbit_half_dim() as i32;
    Ok(s.value() / ((2.0 * PI).powi(n_g) * p))
}

/// `𝔡_λ = det(ad_{λ^κ}|_{𝔱^⊥})`.
pub fn skew_determinant(spec: &GroupSpec, lambda: &Weight) -> Result<f64> {
    if !lambda.regular {
        return Err(LabError::Domain(format!("weight {:?} is not regular", lambda.lattice)));
    }
    let perp = spec.torus_complement();
    if perp.is_empty() {
        return Ok(1.0);
    }
    let c = &spec.structure_constants;
    let m = DMatrix::from_fn(perp.len(), perp.len(), |a, b| {
        let (k, j) = (perp[a], perp[b]);
        (0..spec.dim).map(|i| lambda.covector[i] * c[i][j][k]).sum::<f64>()
    });
    Ok(m.determinant())
}
