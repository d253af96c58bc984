//! Gram matrices on `X^τ` and the kernels `Π^τ_{kλ}`, `P^τ_{kλ}` and the
//! Husimi distribution.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::basis::IsotypicBasis;
use super::grid::XtauGrid;
use crate::error::{LabError, Result};
use crate::group::GroupKind;
use crate::orbit::{GroupElement, TubePoint};
use crate::quadrature::ComplexKahanSum;
use crate::C64;

const CHUNK: usize = 256;

/// How the Gram matrix is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GramRoute {
    /// Full `d² × d²` quadrature over the whole `X^τ` grid.
    Dense,
    /// `SU(2)` only: the group integral is done exactly by Schur
    /// orthogonality, leaving `I_d ⊗ M` with
    /// `M = ∫_{S²(τ)} π(exp iξ)ᵀ conj π(exp iξ)` computed on the sphere grid.
    Factorized,
}

/// `gram = e^{log_scale} · (I_outer ⊗ inner)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    pub outer: usize,
    pub inner: DMatrix<C64>,
    pub log_scale: f64,
}

impl GramMatrix {
    pub fn dim(&self) -> usize {
        self.outer * self.inner.nrows()
    }

    /// Expanded, still scaled, matrix.
    pub fn to_dense(&self) -> DMatrix<C64> {
        let n = self.inner.nrows();
        let mut out = DMatrix::zeros(self.dim(), self.dim());
        for b in 0..self.outer {
            out.view_mut((b * n, b * n), (n, n)).copy_from(&self.inner);
        }
        out
    }

    /// `(λ_min, λ_max)` of the scaled matrix.
    pub fn eigen_range(&self) -> (f64, f64) {
        let e = SymmetricEigen::new(self.inner.clone()).eigenvalues;
        let min = e.iter().copied().fold(f64::INFINITY, f64::min);
        let max = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (min, max)
    }

    pub fn hermitian_defect(&self) -> f64 {
        (&self.inner - self.inner.adjoint()).norm() / self.inner.norm().max(f64::MIN_POSITIVE)
    }
}

/// Deterministic parallel sum `Σ_i w_i Σ_r u_r u_r†` over nodes, where node
/// `i` yields its weight and the rows `u_rᵀ`. Each fixed chunk is one
/// `AᵀĀ` product; chunk results are combined in order with compensated
/// summation.
fn accumulate<F>(count: usize, n: usize, node: F) -> Result<DMatrix<C64>>
where
    F: Fn(usize) -> Result<(f64, DMatrix<C64>)> + Sync,
{
    let chunks: Vec<Result<DMatrix<C64>>> = (0..count.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let range = c * CHUNK..((c + 1) * CHUNK).min(count);
            let mut rows: Vec<C64> = Vec::new();
            let mut m = 0;
            for i in range {
                let (w, u) = node(i)?;
                debug_assert!(w >= 0.0 && u.ncols() == n);
                let s = w.sqrt();
                for r in 0..u.nrows() {
                    rows.extend(u.row(r).iter().map(|z| z * s));
                }
                m += u.nrows();
            }
            let a = DMatrix::from_row_slice(m, n, &rows);
            Ok(a.transpose() * a.map(|z| z.conj()))
        })
        .collect();
    let mut sums = vec![ComplexKahanSum::new(); n * n];
    for chunk in chunks {
        for (s, z) in sums.iter_mut().zip(chunk?.iter()) {
            s.add(*z);
        }
    }
    let out = DMatrix::from_iterator(n, n, sums.iter().map(|s| s.value()));
    // exact Hermitian symmetrisation
    Ok((&out + out.adjoint()) * C64::from(0.5))
}

/// `G_ij = ∫_{X^τ} σ̃_i conj σ̃_j`, scaled by `e^{−2L}`.
pub fn gram(basis: &IsotypicBasis, grid: &XtauGrid, route: GramRoute) -> Result<GramMatrix> {
    let tau = grid.tau;
    let log_scale = 2.0 * basis.log_scale(tau);
    match route {
        GramRoute::Dense => {
            let n = basis.size;
            let inner = accumulate(grid.len(), n, |i| {
                let (x, w) = grid.node(i);
                let (_, v) = basis.evaluate_scaled(&x)?;
                Ok((w, DMatrix::from_row_slice(1, n, &v)))
            })?;
            Ok(GramMatrix { outer: 1, inner, log_scale })
        }
        GramRoute::Factorized => {
            if !matches!(basis.spec.name, GroupKind::Su2) {
                return gram(basis, grid, GramRoute::Dense);
            }
            let n = basis.rep_dim();
            // Schur: ∫_G π(g)_{mj} conj π(g)_{m'j'} = vol/d · δδ cancels the
            // normalisation of the basis.
            let unnorm = basis.spec.haar_normalization / n as f64;
            let inner = accumulate(grid.sphere_nodes.len(), n, |i| {
                let (omega, w) = &grid.sphere_nodes[i];
                let xi = omega.iter().map(|o| o * tau).collect();
                let x = TubePoint::new(GroupElement::identity(&basis.spec), xi);
                let (_, m) = basis.matrix_scaled(&x)?;
                Ok((*w * unnorm, m))
            })?;
            Ok(GramMatrix { outer: n, inner, log_scale })
        }
    }
}

/// Cholesky with greedy diagonal pivoting; returns the indices kept before
/// the residual diagonal falls under `tol · max diag`.
fn pivoted_indices(a: &DMatrix<C64>, tol: f64) -> Vec<usize> {
    let n = a.nrows();
    let mut l = DMatrix::<C64>::zeros(n, n);
    let mut diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let max = diag.iter().copied().fold(0.0, f64::max);
    let mut kept = Vec::new();
    for r in 0..n {
        let (p, &d) =
            diag.iter().enumerate().filter(|(i, _)| !kept.contains(i)).max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        if d <= tol * max {
            break;
        }
        let s = d.sqrt();
        for i in 0..n {
            let mut v = a[(i, p)];
            for j in 0..r {
                v -= l[(i, j)] * l[(p, j)].conj();
            }
            l[(i, r)] = v / s;
        }
        for i in 0..n {
            diag[i] -= l[(i, r)].norm_sqr();
        }
        kept.push(p);
    }
    kept.sort_unstable();
    kept
}

/// Isotypic basis plus the Cholesky data orthonormalising it in `L²(X^τ)`.
#[derive(Debug, Clone)]
pub struct KernelField {
    pub basis: IsotypicBasis,
    pub grid: XtauGrid,
    pub gram: GramMatrix,
    pub route: GramRoute,
    /// Lower Cholesky factor of `inner[kept, kept]`.
    pub chol: DMatrix<C64>,
    pub kept: Vec<usize>,
    pub min_eigenvalue: f64,
    pub condition: f64,
    pub warnings: Vec<String>,
}

impl KernelField {
    pub fn build(basis: IsotypicBasis, grid: XtauGrid, route: GramRoute) -> Result<Self> {
        let g = gram(&basis, &grid, route)?;
        Self::from_gram(basis, grid, g, route)
    }

    /// Assemble from an already computed (e.g. cached) Gram matrix.
    pub fn from_gram(basis: IsotypicBasis, grid: XtauGrid, gram: GramMatrix, route: GramRoute) -> Result<Self> {
        let expected = if gram.outer == 1 { basis.size } else { basis.rep_dim() };
        if gram.inner.nrows() != expected {
            return Err(LabError::DimensionMismatch { expected, got: gram.inner.nrows() });
        }
        let exponent = 2.0 * basis.log_scale(grid.tau);
        let warnings = grid.adequacy_warnings(&basis.spec, basis.degree(), exponent);
        let (min, max) = gram.eigen_range();
        let condition = if min > 0.0 { max / min } else { f64::INFINITY };
        if condition > 1e12 {
            return Err(LabError::IllConditioned { cond: condition, hint: "refine the grid or lower k·τ".into() });
        }
        let n = gram.inner.nrows();
        let (chol, kept) = match gram.inner.clone().cholesky() {
            Some(c) => (c.unpack(), (0..n).collect()),
            None => {
                let kept = pivoted_indices(&gram.inner, 1e-12);
                let sub = gram.inner.select_rows(&kept).select_columns(&kept);
                let c = sub.cholesky().ok_or_else(|| LabError::IllConditioned {
                    cond: condition,
                    hint: "pivoted Cholesky failed; refine the grid".into(),
                })?;
                (c.unpack(), kept)
            }
        };
        Ok(Self { basis, grid, gram, route, chol, kept, min_eigenvalue: min, condition, warnings })
    }

    pub fn tau(&self) -> f64 {
        self.grid.tau
    }

    fn check_tau(&self, x: &TubePoint) -> Result<()> {
        if (x.tau - self.tau()).abs() > 1e-9 * self.tau() {
            return Err(LabError::Domain(format!("point has τ = {}, field has τ = {}", x.tau, self.tau())));
        }
        Ok(())
    }

    /// Coordinates of `x` in the Gram-orthonormalised basis `s = L⁻¹σ̃`
    /// (scale-free), as an `outer × kept` matrix.
    pub fn orthonormal_values(&self, x: &TubePoint) -> Result<DMatrix<C64>> {
        self.check_tau(x)?;
        let (_, v) = self.basis.evaluate_scaled(x)?;
        let inner = self.gram.inner.nrows();
        let rows = self.gram.outer;
        let vm = DMatrix::from_fn(rows, self.kept.len(), |m, j| v[m * inner + self.kept[j]]);
        let solved =
            self.chol.solve_lower_triangular(&vm.transpose()).expect("Cholesky factor has a positive diagonal");
        Ok(solved.transpose())
    }

    /// `Π^τ_{kλ}(x, y) = Σ_j s_j(x) conj s_j(y)`.
    pub fn szego(&self, x: &TubePoint, y: &TubePoint) -> Result<C64> {
        let ux = self.orthonormal_values(x)?;
        let uy = self.orthonormal_values(y)?;
        Ok(ux.iter().zip(uy.iter()).map(|(a, b)| a * b.conj()).sum())
    }

    pub fn poisson(&self, x: &TubePoint, y: &TubePoint) -> Result<C64> {
        self.check_tau(x)?;
        self.check_tau(y)?;
        self.basis.poisson(x, y)
    }

    /// `φ̃^τ(x)·e^{−L}` and `‖φ̃^τ‖²·e^{−2L}` for `φ = Σ c_j σ_j`.
    fn husimi_parts(&self, coeffs: &[C64], x: &TubePoint) -> Result<(C64, f64)> {
        if coeffs.len() != self.basis.size {
            return Err(LabError::DimensionMismatch { expected: self.basis.size, got: coeffs.len() });
        }
        if coeffs.iter().all(|c| c.norm() == 0.0) {
            return Err(LabError::Domain("zero coefficient vector".into()));
        }
        self.check_tau(x)?;
        let (_, v) = self.basis.evaluate_scaled(x)?;
        let value: C64 = coeffs.iter().zip(&v).map(|(c, s)| c * s).sum();
        Ok((value, self.norm_sqr_scaled(coeffs)))
    }

    /// `Σ_ij c_i conj c_j G_ij · e^{−2L}`.
    pub fn norm_sqr_scaled(&self, coeffs: &[C64]) -> f64 {
        let n = self.gram.inner.nrows();
        let mut total = 0.0;
        for b in 0..self.gram.outer {
            let c = DVector::from_iterator(n, coeffs[b * n..(b + 1) * n].iter().copied());
            // cᵀ G c̄ = (c̄)† G (c̄)
            let cc = c.map(|z| z.conj());
            total += (cc.adjoint() * &self.gram.inner * &cc)[(0, 0)].re;
        }
        total
    }

    /// Husimi density `|φ̃^τ(x)|² / ‖φ̃^τ‖²_{L²(X^τ)}`.
    pub fn husimi(&self, coeffs: &[C64], x: &TubePoint) -> Result<f64> {
        let (v, n) = self.husimi_parts(coeffs, x)?;
        Ok(v.norm_sqr() / n)
    }

    /// `B = Σ_z w_z conj(s(z)) s(z)ᵀ` over an arbitrary grid. `B = I` when
    /// the grid reproduces the Gram inner products; its spectrum is the
    /// spectrum of the discretised projector.
    pub fn overlap_on(&self, grid: &XtauGrid) -> Result<DMatrix<C64>> {
        let n = self.gram.outer * self.kept.len();
        accumulate(grid.len(), n, |i| {
            let (z, w) = grid.node(i);
            let u = self.orthonormal_values(&z)?;
            Ok((w, DMatrix::from_row_slice(1, n, &u.transpose().iter().map(|c| c.conj()).collect::<Vec<_>>())))
        })
    }

    /// `∫ Π(x, z) Π(z, y) dz` evaluated on `grid`.
    pub fn compose(&self, x: &TubePoint, y: &TubePoint, grid: &XtauGrid) -> Result<C64> {
        let b = self.overlap_on(grid)?;
        self.compose_with_overlap(x, y, &b)
    }

    pub fn compose_with_overlap(&self, x: &TubePoint, y: &TubePoint, overlap: &DMatrix<C64>) -> Result<C64> {
        let n = overlap.nrows();
        let flat = |u: DMatrix<C64>| DVector::from_iterator(n, u.transpose().iter().copied());
        let ux = flat(self.orthonormal_values(x)?);
        let uy = flat(self.orthonormal_values(y)?);
        Ok((ux.transpose() * overlap * uy.map(|c| c.conj()))[(0, 0)])
    }

    /// Spectral norm of the discretised operator `Π` on `L²(grid)`.
    pub fn discretized_norm(&self, grid: &XtauGrid) -> Result<f64> {
        let b = self.overlap_on(grid)?;
        let e = SymmetricEigen::new(b).eigenvalues;
        Ok(e.iter().copied().fold(0.0, f64::max))
    }

    /// Largest `U^{1/2}` over the candidates, refined by a compass search in
    /// the group and sphere directions. Returns the value and its location.
    pub fn husimi_max(&self, coeffs: &[C64], candidates: &[TubePoint], refine: usize) -> Result<(f64, TubePoint)> {
        let values: Vec<f64> = candidates.par_iter().map(|x| self.husimi(coeffs, x)).collect::<Result<_>>()?;
        let best = values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .ok_or_else(|| LabError::Domain("no candidate points".into()))?;
        let mut x = candidates[best].clone();
        let mut val = values[best];
        let mut step = 0.2;
        let dim = self.basis.spec.dim;
        for _ in 0..refine {
            let mut improved = false;
            for dir in 0..2 * dim {
                for sign in [1.0, -1.0] {
                    let trial = perturb(&x, dir, sign * step, dim);
                    let v = self.husimi(coeffs, &trial)?;
                    if v > val {
                        val = v;
                        x = trial;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
                if step < 1e-6 {
                    break;
                }
            }
        }
        Ok((val.sqrt(), x))
    }
}

/// Moves `x` along group direction `dir < dim` or sphere direction `dir − dim`.
fn perturb(x: &TubePoint, dir: usize, h: f64, dim: usize) -> TubePoint {
    if dir < dim {
        let g = match &x.g {
            GroupElement::Torus(t) => {
                let mut t = t.clone();
                t[dir] += h;
                GroupElement::Torus(t)
            }
            GroupElement::Su2(m) => {
                let mut v = [0.0; 3];
                v[dir] = h;
                GroupElement::Su2(m * crate::su2::exp_algebra(&v))
            }
        };
        TubePoint { g, xi: x.xi.clone(), tau: x.tau }
    } else {
        let mut xi = x.xi.clone();
        xi[dir - dim] += h * x.tau;
        let n = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        let xi = xi.into_iter().map(|v| v * x.tau / n).collect();
        TubePoint { g: x.g.clone(), xi, tau: x.tau }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pivoting_drops_dependent_columns() {
        // rank-2 Hermitian matrix with a duplicated basis vector
        let v = DMatrix::<C64>::from_row_slice(
            3,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.0, 1.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 1.0),
                C64::new(0.5, 0.0),
                C64::new(2.0, 0.0),
            ],
        );
        let a = &v * v.adjoint();
        let kept = pivoted_indices(&a, 1e-12);
        assert_eq!(kept.len(), 2);
        assert!(kept.contains(&2));
    }
}
