//! Equivariant Szegő and Poisson kernels on Grauert-tube sphere bundles
//! over the torus `T^d` and `SU(2)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`group`]: group data, weights, Weyl characters and Weyl integration.
//! * [`orbit`]: tube points, the moment map, coadjoint-orbit quadrature and
//!   the Kirillov character formula.
//! * [`tube`]: holomorphically extended matrix elements, quadrature grids on
//!   `X^τ`, Gram matrices and the kernels `Π^τ_{kλ}` and `P^τ_{kλ}`.
//! * [`asymptotics`]: closed-form leading-order predictions and decay fits.

#![allow(clippy::needless_range_loop)]

pub mod asymptotics;
pub mod error;
pub mod group;
pub mod orbit;
pub mod quadrature;
pub mod sampling;
pub mod su2;
pub mod tube;

pub use error::{LabError, Result};
pub use group::{GroupKind, GroupSpec, Weight};
pub use orbit::{GroupElement, OrbitGrid, TubePoint};
pub use tube::{x_tau_grid, GramMatrix, GramRoute, IsotypicBasis, KernelField, Resolution, XtauGrid};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
