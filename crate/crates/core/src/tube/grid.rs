//! Product quadrature on `X^τ`: Haar-type grid on `G` times an area grid on
//! the sphere `S^{d−1}(τ) ⊂ 𝔤`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::group::{GroupKind, GroupSpec};
use crate::orbit::{GroupElement, TubePoint};
use crate::quadrature::{sphere_grid, trapezoid_nodes};
use crate::su2;

/// Grid resolution. `group` is the number of nodes per torus angle on `T^d`
/// and the number of `α` nodes of the Euler grid on `SU(2)` (with
/// `group/2 + 1` Gauss–Legendre `β` nodes and `2·group` `γ` nodes). `polar`
/// and `azimuth` describe the sphere grid; on `T²` only `azimuth` is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Resolution {
    pub group: usize,
    pub polar: usize,
    pub azimuth: usize,
}

impl Resolution {
    pub fn new(group: usize, polar: usize, azimuth: usize) -> Self {
        Self { group, polar, azimuth }
    }

    /// Smallest `SU(2)` resolution integrating degree-`k` products exactly.
    pub fn exact_for_su2(k: usize) -> Self {
        Self { group: (2 * k).max(2), polar: k + 1, azimuth: 2 * k + 1 }
    }

    pub fn doubled(&self) -> Self {
        Self { group: 2 * self.group, polar: 2 * self.polar, azimuth: 2 * self.azimuth }
    }
}

#[derive(Debug, Clone)]
pub struct XtauGrid {
    pub tau: f64,
    pub group_nodes: Vec<(GroupElement, f64)>,
    /// Unit directions `ω` with weights for the area of `S^{d−1}(τ)`.
    pub sphere_nodes: Vec<(Vec<f64>, f64)>,
    pub measure_total: f64,
    pub resolution: Resolution,
}

fn sphere_area(d: usize, tau: f64) -> f64 {
    // 2π^{d/2}/Γ(d/2) τ^{d−1} for the dimensions we grid
    let unit = match d {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => unreachable!(),
    };
    unit * tau.powi(d as i32 - 1)
}

pub fn x_tau_grid(spec: &GroupSpec, tau: f64, res: Resolution) -> Result<XtauGrid> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(LabError::Domain(format!("τ must be positive, got {tau}")));
    }
    if res.group == 0 || res.polar == 0 || res.azimuth == 0 {
        return Err(LabError::Config("grid resolution must be positive".into()));
    }
    let d = spec.dim;
    if d > 3 {
        return Err(LabError::Unimplemented(format!("sphere grids for dim {d} > 3")));
    }
    let group_nodes = match spec.name {
        GroupKind::Torus { d } => {
            let n = res.group;
            let angles = trapezoid_nodes(n, 2.0 * PI);
            let w = (2.0 * PI / n as f64).powi(d as i32);
            let total = n.pow(d as u32);
            (0..total)
                .map(|mut idx| {
                    let theta = (0..d)
                        .map(|_| {
                            let a = angles[idx % n];
                            idx /= n;
                            a
                        })
                        .collect();
                    (GroupElement::Torus(theta), w)
                })
                .collect()
        }
        GroupKind::Su2 => su2::euler_haar_grid(res.group, res.group / 2 + 1, 2 * res.group)
            .into_iter()
            .map(|(g, w)| (GroupElement::Su2(g), w))
            .collect(),
    };
    let scale = tau.powi(d as i32 - 1);
    let sphere_nodes: Vec<(Vec<f64>, f64)> = match d {
        1 => vec![(vec![1.0], 1.0), (vec![-1.0], 1.0)],
        2 => trapezoid_nodes(res.azimuth, 2.0 * PI)
            .into_iter()
            .map(|p| (vec![p.cos(), p.sin()], 2.0 * PI / res.azimuth as f64 * scale))
            .collect(),
        _ => {
            let (nodes, weights) = sphere_grid(res.polar, res.azimuth);
            nodes.into_iter().zip(weights).map(|(n, w)| (n.to_vec(), w * scale)).collect()
        }
    };
    Ok(XtauGrid {
        tau,
        group_nodes,
        sphere_nodes,
        measure_total: spec.haar_normalization * sphere_area(d, tau),
        resolution: res,
    })
}

impl XtauGrid {
    pub fn len(&self) -> usize {
        self.group_nodes.len() * self.sphere_nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Node `i` in group-major order, with its weight.
    pub fn node(&self, i: usize) -> (TubePoint, f64) {
        let ns = self.sphere_nodes.len();
        let (g, wg) = &self.group_nodes[i / ns];
        let (omega, ws) = &self.sphere_nodes[i % ns];
        let xi = omega.iter().map(|o| o * self.tau).collect();
        (TubePoint { g: g.clone(), xi, tau: self.tau }, wg * ws)
    }

    /// Sum of the weights; equals `measure_total` up to rounding.
    pub fn quadrature_total(&self) -> f64 {
        let g: f64 = self.group_nodes.iter().map(|(_, w)| w).sum();
        let s: f64 = self.sphere_nodes.iter().map(|(_, w)| w).sum();
        g * s
    }

    /// Reasons the grid may under-resolve a basis of representation degree
    /// `degree` (SU(2)) or exponent `a = 2kτ‖λ‖` (torus).
    pub fn adequacy_warnings(&self, spec: &GroupSpec, degree: usize, exponent: f64) -> Vec<String> {
        let r = self.resolution;
        let mut out = Vec::new();
        match spec.name {
            GroupKind::Su2 => {
                let need = Resolution::exact_for_su2(degree);
                if r.group < need.group {
                    out.push(format!("group resolution {} < {} for degree {degree}", r.group, need.group));
                }
                if r.polar < need.polar || r.azimuth < need.azimuth {
                    out.push(format!(
                        "sphere resolution {}x{} < {}x{} for degree {degree}",
                        r.polar, r.azimuth, need.polar, need.azimuth
                    ));
                }
            }
            GroupKind::Torus { d } => {
                // trapezoid error for e^{a cos φ} decays like e^{−n²/2a}
                let need = (80.0 * exponent).sqrt().ceil() as usize + 8;
                let short = match d {
                    1 => false,
                    2 => r.azimuth < need,
                    _ => r.azimuth < need || r.polar < need,
                };
                if short {
                    out.push(format!("sphere resolution too coarse for exponent {exponent:.1} (need ≥ {need})"));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_total_measure() {
        let g = x_tau_grid(&GroupSpec::torus(2), 1.0, Resolution::new(4, 1, 16)).unwrap();
        let expect = (2.0 * PI).powi(2) * 2.0 * PI;
        assert!((g.measure_total - expect).abs() < 1e-12);
        assert!((g.quadrature_total() - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn su2_total_measure() {
        let tau = 0.3;
        let g = x_tau_grid(&GroupSpec::su2(), tau, Resolution::new(4, 3, 6)).unwrap();
        let expect = 2.0 * PI * PI * 4.0 * PI * tau * tau;
        assert!((g.measure_total - expect).abs() < 1e-12 * expect);
        assert!((g.quadrature_total() - expect).abs() < 1e-12 * expect);
        let (x, _) = g.node(17);
        x.validate(&GroupSpec::su2()).unwrap();
    }

    #[test]
    fn rejects_bad_input() {
        let s = GroupSpec::su2();
        assert!(x_tau_grid(&s, 0.0, Resolution::new(4, 3, 6)).is_err());
        assert!(x_tau_grid(&s, 0.3, Resolution::new(0, 3, 6)).is_err());
        assert!(x_tau_grid(&GroupSpec::torus(4), 0.3, Resolution::new(2, 2, 2)).is_err());
    }

    #[test]
    fn warnings_flag_coarse_grids() {
        let s = GroupSpec::su2();
        let g = x_tau_grid(&s, 0.3, Resolution::new(4, 3, 6)).unwrap();
        assert!(g.adequacy_warnings(&s, 2, 0.0).is_empty());
        assert!(!g.adequacy_warnings(&s, 4, 0.0).is_empty());
    }
}
