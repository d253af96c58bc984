//! Holomorphic extensions, `X^τ` quadrature, Gram matrices and kernels.

mod basis;
mod field;
mod grid;

pub use basis::{matrix_elements, IsotypicBasis};
pub use field::{gram, GramMatrix, GramRoute, KernelField};
pub use grid::{x_tau_grid, Resolution, XtauGrid};

#[cfg(test)]
mod tests;
