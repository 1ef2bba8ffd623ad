//! Dense complex linear algebra for small quantum systems.
//!
//! Matrices are square and stored densely; the total dimension is capped at
//! [`DEFAULT_MAX_DIM`] unless a `*_with_limit` constructor is used.

mod density;
mod eig;
mod matrix;

pub use density::{partial_trace, DensityMatrix, SitedSpace, StateJson};
pub(crate) use density::partial_trace_matrix;
pub use eig::{
    hermitian_eig, hermitian_eig_with_tolerance, SpectralDecomposition,
    DEFAULT_SUPPORT_TOLERANCE,
};
pub use matrix::{tensor_product, tensor_product_with_limit, ComplexMatrix, C64, DEFAULT_MAX_DIM};

use crate::error::Result;

/// Base-2 logarithm of `rho` restricted to its support, and the support
/// projector. Eigenvalues at or below the support cutoff map to zero in both.
pub fn log2_on_support(rho: &DensityMatrix) -> (ComplexMatrix, ComplexMatrix) {
    log2_on_support_with_tolerance(rho, DEFAULT_SUPPORT_TOLERANCE)
}

pub fn log2_on_support_with_tolerance(
    rho: &DensityMatrix,
    support_tolerance: f64,
) -> (ComplexMatrix, ComplexMatrix) {
    let spec = rho.spectrum_with_tolerance(support_tolerance);
    let cut = spec.support_cutoff();
    let log = spec.map_eigenvalues(|l| C64::new(if l > cut { l.log2() } else { 0.0 }, 0.0));
    (log, spec.support_projector())
}

/// exp(−i h t) for Hermitian `h`.
pub fn unitary_propagator(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let spec = hermitian_eig(h)?;
    Ok(spec.map_eigenvalues(|e| C64::from_polar(1.0, -e * t)))
}
