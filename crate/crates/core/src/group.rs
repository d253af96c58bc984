//! Group data for `T^d` and `SU(2)`: structure constants, roots, Weyl group,
//! weights, Weyl characters and the Weyl integration formula.
//!
//! Coordinates on `𝔱` are κ-orthonormal. For `SU(2)`, `𝔱 = ℝ·f₃`, the torus
//! element with angle `θ` is `exp(θ f₃) = diag(e^{−iθ}, e^{iθ})`, the
//! fundamental weight is the covector `1`, the positive root is `2` and
//! `δ = 1`. For `T^d = ℝ^d / 2πℤ^d` the weights are the integer covectors.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::quadrature::{trapezoid_nodes, ComplexKahanSum};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GroupKind {
    Torus { d: usize },
    Su2,
}

impl std::fmt::Display for GroupKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GroupKind::Torus { d } => write!(f, "torus{d}"),
            GroupKind::Su2 => write!(f, "su2"),
        }
    }
}

/// Algebraic description of a compact group `G`.
///
/// `structure_constants[i][j][k] = c^k_{ij}` for a κ-orthonormal basis of `𝔤`;
/// roots, `delta` and the Weyl group act on κ-orthonormal coordinates of `𝔱`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub name: GroupKind,
    pub dim: usize,
    pub rank: usize,
    pub structure_constants: Vec<Vec<Vec<f64>>>,
    pub positive_roots: Vec<Vec<f64>>,
    pub delta: Vec<f64>,
    pub weyl_group: Vec<Vec<Vec<f64>>>,
    /// Riemannian volume `vol^κ(G)`.
    pub haar_normalization: f64,
    /// Riemannian volume `vol^κ(T)` of the maximal torus.
    pub torus_volume: f64,
}

fn identity(r: usize) -> Vec<Vec<f64>> {
    (0..r).map(|i| (0..r).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let r = a.len();
    (0..r).map(|i| (0..r).map(|j| (0..r).map(|l| a[i][l] * b[l][j]).sum()).collect()).collect()
}

fn mat_vec(a: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

/// Determinant of a small square matrix by Gaussian elimination.
fn det(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut m = a.to_vec();
    let mut d = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        if m[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= m[c][c];
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for j in c..n {
                m[r][j] -= f * m[c][j];
            }
        }
    }
    d
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl GroupSpec {
    pub fn torus(d: usize) -> Self {
        assert!(d >= 1, "torus dimension must be positive");
        Self {
            name: GroupKind::Torus { d },
            dim: d,
            rank: d,
            structure_constants: vec![vec![vec![0.0; d]; d]; d],
            positive_roots: Vec::new(),
            delta: vec![0.0; d],
            weyl_group: vec![identity(d)],
            haar_normalization: (2.0 * PI).powi(d as i32),
            torus_volume: (2.0 * PI).powi(d as i32),
        }
    }

    pub fn su2() -> Self {
        let mut c = vec![vec![vec![0.0; 3]; 3]; 3];
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            c[i][j][k] = crate::su2::STRUCTURE_SCALE;
            c[j][i][k] = -crate::su2::STRUCTURE_SCALE;
        }
        Self {
            name: GroupKind::Su2,
            dim: 3,
            rank: 1,
            structure_constants: c,
            positive_roots: vec![vec![2.0]],
            delta: vec![1.0],
            weyl_group: vec![vec![vec![1.0]], vec![vec![-1.0]]],
            haar_normalization: 2.0 * PI * PI,
            torus_volume: 2.0 * PI,
        }
    }

    pub fn from_kind(kind: GroupKind) -> Self {
        match kind {
            GroupKind::Torus { d } => Self::torus(d),
            GroupKind::Su2 => Self::su2(),
        }
    }

    /// Half the real dimension of a regular coadjoint orbit, `n_G = (d − r_G)/2`.
    pub fn orbit_half_dim(&self) -> usize {
        (self.dim - self.rank) / 2
    }

    /// Indices of the basis vectors of `𝔤` spanning `𝔱^⊥`.
    pub fn torus_complement(&self) -> Vec<usize> {
        match self.name {
            GroupKind::Torus { .. } => Vec::new(),
            GroupKind::Su2 => vec![0, 1],
        }
    }

    /// Checks every structural invariant.
    pub fn validate(&self) -> Result<()> {
        let d = self.dim;
        let r = self.rank;
        let bad = |m: &str| Err(LabError::Config(format!("{}: {m}", self.name)));
        if r > d || !(d - r).is_multiple_of(2) {
            return bad("dim − rank must be a nonnegative even number");
        }
        let c = &self.structure_constants;
        if c.len() != d || c.iter().any(|x| x.len() != d || x.iter().any(|y| y.len() != d)) {
            return bad("structure constants must be a dim³ tensor");
        }
        // κ([x,y],z) + κ(y,[x,z]) = c^k_ij + c^j_ik for orthonormal e_i, e_j, e_k.
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    if (c[i][j][k] + c[i][k][j]).abs() > 1e-12 {
                        return bad("κ is not Ad-invariant");
                    }
                }
            }
        }
        if self.delta.len() != r || self.positive_roots.iter().any(|a| a.len() != r) {
            return bad("roots and delta must be covectors on 𝔱");
        }
        for (l, dl) in self.delta.iter().enumerate() {
            let half: f64 = 0.5 * self.positive_roots.iter().map(|a| a[l]).sum::<f64>();
            if (half - dl).abs() > 1e-12 {
                return bad("delta is not half the sum of positive roots");
            }
        }
        if matches!(self.name, GroupKind::Torus { .. })
            && (!self.positive_roots.is_empty() || self.delta.iter().any(|&x| x != 0.0))
        {
            return bad("a torus has no roots");
        }
        let close = |a: &[Vec<f64>], b: &[Vec<f64>]| {
            a.iter().zip(b).all(|(x, y)| x.iter().zip(y).all(|(u, v)| (u - v).abs() < 1e-12))
        };
        if self.weyl_group.iter().any(|w| w.len() != r || w.iter().any(|row| row.len() != r)) {
            return bad("Weyl group elements must be rank × rank");
        }
        if !self.weyl_group.iter().any(|w| close(w, &identity(r))) {
            return bad("Weyl group lacks the identity");
        }
        for a in &self.weyl_group {
            for b in &self.weyl_group {
                let ab = mat_mul(a, b);
                if !self.weyl_group.iter().any(|w| close(w, &ab)) {
                    return bad("Weyl group is not closed under composition");
                }
            }
        }
        if !(self.haar_normalization > 0.0 && self.torus_volume > 0.0) {
            return bad("volumes must be positive");
        }
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| LabError::Serialization(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| LabError::Serialization(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Builds a weight from lattice coordinates (integer covector on `T^d`,
    /// multiple of the fundamental weight on `SU(2)`).
    pub fn weight(&self, lattice: &[i64]) -> Result<Weight> {
        if lattice.len() != self.rank {
            return Err(LabError::DimensionMismatch { expected: self.rank, got: lattice.len() });
        }
        let torus: Vec<f64> = lattice.iter().map(|&n| n as f64).collect();
        let covector = match self.name {
            GroupKind::Torus { .. } => torus.clone(),
            GroupKind::Su2 => vec![0.0, 0.0, torus[0]],
        };
        let norm = dot(&torus, &torus).sqrt();
        let regular = self.positive_roots.iter().all(|a| dot(a, &torus) != 0.0);
        Ok(Weight { lattice: lattice.to_vec(), covector, norm, regular })
    }

    /// Coordinates of `λ` on `𝔱` (the restriction of the covector).
    pub fn torus_coords(&self, w: &Weight) -> Vec<f64> {
        w.lattice.iter().map(|&n| n as f64).collect()
    }

    pub fn is_dominant(&self, w: &Weight) -> bool {
        let t = self.torus_coords(w);
        self.positive_roots.iter().all(|a| dot(a, &t) >= 0.0)
    }

    fn require_dominant(&self, w: &Weight) -> Result<()> {
        if self.is_dominant(w) {
            Ok(())
        } else {
            Err(LabError::Domain(format!("weight {:?} is not dominant", w.lattice)))
        }
    }

    /// `λ + δ`; on `SU(2)` δ is the fundamental weight.
    pub fn shift_by_delta(&self, w: &Weight) -> Weight {
        let lattice: Vec<i64> = match self.name {
            GroupKind::Torus { .. } => w.lattice.clone(),
            GroupKind::Su2 => vec![w.lattice[0] + 1],
        };
        self.weight(&lattice).expect("rank preserved")
    }

    /// `c_λ = κ^∨(λ, λ + 2δ)^{1/2}`; `c_λ²` is the Laplace eigenvalue on `L²(G)_λ`.
    pub fn c_lambda(&self, w: &Weight) -> Result<f64> {
        self.require_dominant(w)?;
        let t = self.torus_coords(w);
        let shifted: Vec<f64> = t.iter().zip(&self.delta).map(|(l, d)| l + 2.0 * d).collect();
        Ok(dot(&t, &shifted).max(0.0).sqrt())
    }

    /// Weyl dimension formula `∏_α ⟨λ+δ, α⟩ / ⟨δ, α⟩`.
    pub fn weyl_dimension(&self, w: &Weight) -> Result<u64> {
        self.require_dominant(w)?;
        let t = self.torus_coords(w);
        let nu: Vec<f64> = t.iter().zip(&self.delta).map(|(l, d)| l + d).collect();
        let p: f64 = self.positive_roots.iter().map(|a| dot(&nu, a) / dot(&self.delta, a)).product();
        Ok(p.round() as u64)
    }

    /// `Alt_W(e^{iη})(θ) = Σ_w det(w) e^{i⟨wη, θ⟩}`.
    pub fn alternating_sum(&self, eta: &[f64], theta: &[f64]) -> C64 {
        self.weyl_group.iter().map(|w| C64::from_polar(det(w), dot(&mat_vec(w, eta), theta))).sum()
    }

    /// Weyl denominator `Δ(θ) = Alt_W(e^{iδ})(θ)`.
    pub fn weyl_denominator(&self, theta: &[f64]) -> C64 {
        self.alternating_sum(&self.delta, theta)
    }

    /// `χ_λ(exp θ)`, the ratio `A_{λ+δ}/Δ` continued across the walls.
    pub fn weyl_character(&self, w: &Weight, theta: &[f64]) -> Result<C64> {
        self.require_dominant(w)?;
        if theta.len() != self.rank {
            return Err(LabError::DimensionMismatch { expected: self.rank, got: theta.len() });
        }
        let t = self.torus_coords(w);
        match self.name {
            GroupKind::Torus { .. } => Ok(C64::from_polar(1.0, dot(&t, theta))),
            GroupKind::Su2 => {
                let delta = self.weyl_denominator(theta);
                if delta.norm() < 1e-8 {
                    // Removable singularity: sum the weights n, n−2, …, −n directly.
                    let n = w.lattice[0];
                    return Ok((0..=n).map(|j| C64::from_polar(1.0, (n - 2 * j) as f64 * theta[0])).sum());
                }
                let nu: Vec<f64> = t.iter().zip(&self.delta).map(|(l, d)| l + d).collect();
                Ok(self.alternating_sum(&nu, theta) / delta)
            }
        }
    }

    /// Haar integral (total mass 1) of a class function via the Weyl
    /// integration formula `(1/|W|) ∫_T |Δ|² f`, using `resolution` trapezoid
    /// nodes per torus direction.
    pub fn weyl_integrate<F>(&self, f: F, resolution: usize) -> Result<C64>
    where
        F: Fn(&[f64]) -> C64,
    {
        if resolution < 2 {
            return Err(LabError::Config("Weyl integration needs at least 2 nodes".into()));
        }
        let r = self.rank;
        let nodes = trapezoid_nodes(resolution, 2.0 * PI);
        let total = resolution.checked_pow(r as u32).ok_or_else(|| LabError::Config("torus grid too large".into()))?;
        let mut acc = ComplexKahanSum::new();
        let mut theta = vec![0.0; r];
        for idx in 0..total {
            let mut rem = idx;
            for t in theta.iter_mut() {
                *t = nodes[rem % resolution];
                rem /= resolution;
            }
            acc.add(self.weyl_denominator(&theta).norm_sqr() * f(&theta));
        }
        Ok(acc.value() / (total as f64 * self.weyl_group.len() as f64))
    }
}

/// A weight `λ`: lattice coordinates plus its covector in `𝔤^∨`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    pub lattice: Vec<i64>,
    pub covector: Vec<f64>,
    pub norm: f64,
    pub regular: bool,
}

impl Weight {
    pub fn is_zero(&self) -> bool {
        self.lattice.iter().all(|&n| n == 0)
    }

    /// `kλ` along the ladder.
    pub fn scaled(&self, k: i64) -> Weight {
        Weight {
            lattice: self.lattice.iter().map(|&n| k * n).collect(),
            covector: self.covector.iter().map(|&c| k as f64 * c).collect(),
            norm: self.norm * (k as f64).abs(),
            regular: k != 0 && self.regular,
        }
    }
}
