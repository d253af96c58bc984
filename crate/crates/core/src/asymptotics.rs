//! Leading-order predictions for the equivariant kernels and decay fits.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::group::{GroupKind, GroupSpec};
use crate::orbit::TubePoint;
use crate::C64;

/// Hermitian form `h(v, w) = Σ v_i H_ij conj(w_j) = φ(v, w) − iγ(v, w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianForm {
    matrix: DMatrix<C64>,
}

impl HermitianForm {
    pub fn standard(n: usize) -> Self {
        Self { matrix: DMatrix::identity(n, n) }
    }

    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if !matrix.is_square() || (&matrix - matrix.adjoint()).norm() > 1e-12 * matrix.norm() {
            return Err(LabError::Domain("form matrix must be Hermitian".into()));
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn h(&self, v: &[C64], w: &[C64]) -> Result<C64> {
        let n = self.dim();
        for len in [v.len(), w.len()] {
            if len != n {
                return Err(LabError::DimensionMismatch { expected: n, got: len });
            }
        }
        let mut s = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                s += v[i] * self.matrix[(i, j)] * w[j].conj();
            }
        }
        Ok(s)
    }

    /// `‖v‖²_φ = h(v, v)`.
    pub fn norm_sqr(&self, v: &[C64]) -> Result<f64> {
        Ok(self.h(v, v)?.re)
    }
}

/// `ψ₂(v, w) = −iγ(v, w) − ½‖v − w‖²_φ` with `γ = −Im h`.
pub fn psi2(form: &HermitianForm, v: &[C64], w: &[C64]) -> Result<C64> {
    let gamma = -form.h(v, w)?.im;
    let diff: Vec<C64> = v.iter().zip(w).map(|(a, b)| a - b).collect();
    Ok(C64::new(-0.5 * form.norm_sqr(&diff)?, -gamma))
}

/// Everything the leading coefficients depend on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionInputs {
    pub tau: f64,
    pub lambda_norm: f64,
    pub d: usize,
    pub r_g: usize,
    pub orbit_volume: f64,
    pub group_volume: f64,
    pub torus_volume: f64,
    pub skew_det: f64,
    pub d_kappa: f64,
}

impl PredictionInputs {
    pub fn from_spec(spec: &GroupSpec, lambda: &crate::Weight, tau: f64, x: &TubePoint) -> Result<Self> {
        Ok(Self {
            tau,
            lambda_norm: lambda.norm,
            d: spec.dim,
            r_g: spec.rank,
            orbit_volume: crate::orbit::symplectic_volume(spec, lambda)?,
            group_volume: spec.haar_normalization,
            torus_volume: spec.torus_volume,
            skew_det: crate::orbit::skew_determinant(spec, lambda)?,
            d_kappa: d_kappa_factor(spec, x)?,
        })
    }

    fn constant(&self) -> f64 {
        (self.orbit_volume / self.group_volume).powi(2) * self.torus_volume / (self.d_kappa * self.skew_det)
    }

    fn base(&self, k: usize) -> f64 {
        k as f64 * self.lambda_norm / (2.0 * PI * self.tau)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictionKind {
    SzegoDiag,
    PoissonDiag,
    SzegoScaled,
    PoissonScaled,
    HusimiBound,
    LpBound,
    TorusNorm,
}

impl PredictionKind {
    /// Power of `k` in the leading term.
    pub fn exponent(self, d: usize, r_g: usize) -> f64 {
        let (d, r) = (d as f64, r_g as f64);
        match self {
            PredictionKind::SzegoDiag | PredictionKind::SzegoScaled => d - 1.0 + (1.0 - r) / 2.0,
            PredictionKind::PoissonDiag | PredictionKind::PoissonScaled => (d - r) / 2.0,
            PredictionKind::HusimiBound => d / 2.0 - (1.0 + r) / 4.0,
            PredictionKind::LpBound => (d - r) / 2.0,
            PredictionKind::TorusNorm => -(d - 1.0) / 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub kind: PredictionKind,
    pub k: usize,
    pub value: C64,
    pub exponent: f64,
    pub prefactor: f64,
    pub inputs: PredictionInputs,
}

impl Prediction {
    /// Recomputes exponent and prefactor from the echoed inputs.
    pub fn is_self_consistent(&self) -> bool {
        let exponent = self.kind.exponent(self.inputs.d, self.inputs.r_g);
        let recomputed = match self.kind {
            PredictionKind::SzegoDiag | PredictionKind::SzegoScaled => szego_prefactor(&self.inputs, self.k),
            PredictionKind::PoissonDiag | PredictionKind::PoissonScaled => poisson_prefactor(&self.inputs, self.k),
            _ => self.prefactor,
        };
        self.prefactor > 0.0
            && (exponent - self.exponent).abs() <= 1e-12
            && (recomputed - self.prefactor).abs() <= 1e-12 * self.prefactor
    }
}

fn szego_prefactor(inp: &PredictionInputs, k: usize) -> f64 {
    inp.base(k).powf(PredictionKind::SzegoScaled.exponent(inp.d, inp.r_g)) * inp.constant()
}

fn poisson_prefactor(inp: &PredictionInputs, k: usize) -> f64 {
    0.5f64.powf((inp.d as f64 - 1.0) / 2.0)
        * inp.base(k).powf(PredictionKind::PoissonScaled.exponent(inp.d, inp.r_g))
        * inp.constant()
}

/// Scaled displacements `(s₁, s₂, n₁, n₂)` of the two points.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Displacements {
    pub s1: Vec<C64>,
    pub s2: Vec<C64>,
    pub n1: Vec<f64>,
    pub n2: Vec<f64>,
}

fn exponential_factor(inp: &PredictionInputs, disp: &Displacements) -> Result<C64> {
    if inp.skew_det <= 0.0 {
        return Err(LabError::Domain("λ must be regular".into()));
    }
    let form = HermitianForm::standard(disp.s1.len());
    let psi =
        if disp.s1.is_empty() && disp.s2.is_empty() { C64::new(0.0, 0.0) } else { psi2(&form, &disp.s1, &disp.s2)? };
    let n1: f64 = disp.n1.iter().map(|x| x * x).sum();
    let n2: f64 = disp.n2.iter().map(|x| x * x).sum();
    Ok(((psi - n1 - n2) * (inp.lambda_norm / inp.tau)).exp())
}

/// Leading term of `Π^τ_{kλ}` at scaled displacements.
pub fn predicted_szego_scaled(inp: &PredictionInputs, k: usize, disp: &Displacements) -> Result<Prediction> {
    let prefactor = szego_prefactor(inp, k);
    let value = exponential_factor(inp, disp)? * prefactor;
    let kind = if disp == &Displacements::default() { PredictionKind::SzegoDiag } else { PredictionKind::SzegoScaled };
    Ok(Prediction { kind, k, value, exponent: kind.exponent(inp.d, inp.r_g), prefactor, inputs: *inp })
}

/// Leading term of `P^τ_{kλ}` at scaled displacements.
pub fn predicted_poisson_scaled(inp: &PredictionInputs, k: usize, disp: &Displacements) -> Result<Prediction> {
    let prefactor = poisson_prefactor(inp, k);
    let value = exponential_factor(inp, disp)? * prefactor;
    let kind =
        if disp == &Displacements::default() { PredictionKind::PoissonDiag } else { PredictionKind::PoissonScaled };
    Ok(Prediction { kind, k, value, exponent: kind.exponent(inp.d, inp.r_g), prefactor, inputs: *inp })
}

/// Leading `L²(X^τ)` norm of the torus extension,
/// `e^{2kτ‖λ‖}(τπ/(k‖λ‖))^{(d−1)/2}`, returned as its logarithm.
pub fn torus_norm_leading_log(d: usize, tau: f64, lambda_norm: f64, k: usize) -> f64 {
    let a = k as f64 * lambda_norm;
    2.0 * tau * a + 0.5 * (d as f64 - 1.0) * (tau * PI / a).ln()
}

/// `𝔇^κ(x)`: `2^{−(d−1)/2}` on `T^d`, `1` on `SU(2)`.
pub fn d_kappa_factor(spec: &GroupSpec, x: &TubePoint) -> Result<f64> {
    if x.tau <= 0.0 {
        return Err(LabError::Domain("Φ(x) = 0 is not regular".into()));
    }
    Ok(match spec.name {
        GroupKind::Torus { d } => 0.5f64.powf((d as f64 - 1.0) / 2.0),
        GroupKind::Su2 => 1.0,
    })
}

/// Growth exponent of `‖Π^τ_{kλ}‖_{L^p → L^q}`: with `1/R = 1 − 1/p + 1/q`,
/// `(1/2R)[(d−1)(R−1) + R(d−r_G)]`. `q = ∞` is allowed.
pub fn lp_bound_exponent(d: usize, r_g: usize, p: f64, q: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 || p > q {
        return Err(LabError::Domain(format!("need 1 ≤ p ≤ q, got p = {p}, q = {q}")));
    }
    let inv_r = 1.0 - 1.0 / p + 1.0 / q;
    Ok(0.5 * (d as f64 - 1.0) * (1.0 - inv_r) + 0.5 * (d as f64 - r_g as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayModel {
    Power,
    Exponential,
    Superpolynomial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub samples: Vec<(f64, f64)>,
    pub model: DecayModel,
    /// Exponent of the power-law fit `log v = slope·log k + b`.
    pub slope: f64,
    /// Rate of the exponential fit `log v = rate·k + b`.
    pub rate: f64,
    /// r² of the fit for the chosen model.
    pub r2: f64,
    pub power_r2: f64,
    pub exponential_r2: f64,
    /// Local log–log slope over the first third minus that over the last third.
    pub slope_drop: f64,
}

impl DecayFit {
    pub fn is_superpolynomial(&self) -> bool {
        self.model != DecayModel::Power
    }
}

/// Least squares `y ≈ X β`; returns `(β, r²)`.
fn least_squares(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    let svd = x.clone().svd(true, true);
    let beta = svd.solve(y, 1e-14).map_err(|e| LabError::Domain(format!("least squares failed: {e}")))?;
    let resid = y - x * &beta;
    let mean = y.mean();
    let tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let r2 = if tot > 0.0 { 1.0 - resid.norm_squared() / tot } else { 1.0 };
    Ok((beta, r2))
}

fn line_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let x = DMatrix::from_fn(xs.len(), 2, |i, j| if j == 0 { xs[i] } else { 1.0 });
    let (b, r2) = least_squares(&x, &DVector::from_column_slice(ys))?;
    Ok((b[0], b[1], r2))
}

fn validate_samples(samples: &[(f64, f64)]) -> Result<()> {
    if samples.len() < 5 {
        return Err(LabError::Domain("decay fits need at least 5 samples".into()));
    }
    if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(LabError::Domain("sample abscissae must increase strictly".into()));
    }
    if samples.iter().any(|&(k, v)| v.is_nan() || k.is_nan() || v <= 0.0 || k <= 0.0) {
        return Err(LabError::Domain("decay fits need positive k and magnitudes".into()));
    }
    Ok(())
}

/// Power-law and exponential fits with superpolynomial classification at a
/// slope drop of 2.
pub fn decay_fit(samples: &[(f64, f64)]) -> Result<DecayFit> {
    decay_fit_with_threshold(samples, 2.0)
}

pub fn decay_fit_with_threshold(samples: &[(f64, f64)], threshold: f64) -> Result<DecayFit> {
    validate_samples(samples)?;
    let lk: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let k: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let lv: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let (slope, _, power_r2) = line_fit(&lk, &lv)?;
    let (rate, _, exponential_r2) = line_fit(&k, &lv)?;
    let n = samples.len();
    let m = (n / 3).max(2);
    let (first, _, _) = line_fit(&lk[..m], &lv[..m])?;
    let (last, _, _) = line_fit(&lk[n - m..], &lv[n - m..])?;
    let slope_drop = first - last;
    let (model, r2) = if slope_drop < threshold {
        (DecayModel::Power, power_r2)
    } else if exponential_r2 >= 0.999 {
        (DecayModel::Exponential, exponential_r2)
    } else {
        (DecayModel::Superpolynomial, exponential_r2)
    };
    Ok(DecayFit { samples: samples.to_vec(), model, slope, rate, r2, power_r2, exponential_r2, slope_drop })
}

/// Power fit with a `1/k` correction, `log v = p·log k + b + c/k`; returns
/// `(p, b, c, r²)`. Removes the bias that `(k+1)^p`-type subleading terms put
/// into a plain log–log fit over moderate `k`.
pub fn power_fit_with_correction(samples: &[(f64, f64)]) -> Result<(f64, f64, f64, f64)> {
    validate_samples(samples)?;
    let x = DMatrix::from_fn(samples.len(), 3, |i, j| match j {
        0 => samples[i].0.ln(),
        1 => 1.0,
        _ => 1.0 / samples[i].0,
    });
    let y = DVector::from_iterator(samples.len(), samples.iter().map(|s| s.1.ln()));
    let (b, r2) = least_squares(&x, &y)?;
    Ok((b[0], b[1], b[2], r2))
}

/// Plain log–log power fit; returns `(exponent, log-prefactor, r²)`.
pub fn power_fit(samples: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    if samples.len() < 2 || samples.iter().any(|&(k, v)| v.is_nan() || k.is_nan() || v <= 0.0 || k <= 0.0) {
        return Err(LabError::Domain("power fit needs ≥ 2 positive samples".into()));
    }
    let lk: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let lv: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    line_fit(&lk, &lv)
}
