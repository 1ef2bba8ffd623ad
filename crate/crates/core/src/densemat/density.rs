use serde::{Deserialize, Serialize};

use super::eig::{hermitian_eig, hermitian_eig_with_tolerance, SpectralDecomposition};
use super::matrix::{ComplexMatrix, C64, DEFAULT_MAX_DIM};
use crate::error::{Error, Result};

const TRACE_TOLERANCE: f64 = 1e-10;
const HERMITIAN_TOLERANCE: f64 = 1e-10;
const NEGATIVITY_TOLERANCE: f64 = 1e-10;

/// Ordered local dimensions of a tensor-product Hilbert space.
///
/// Site 0 is the most significant digit of a computational-basis index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SitedSpace {
    local_dims: Vec<usize>,
}

impl SitedSpace {
    pub fn new(local_dims: Vec<usize>) -> Result<Self> {
        Self::with_limit(local_dims, DEFAULT_MAX_DIM)
    }

    pub fn with_limit(local_dims: Vec<usize>, max_dim: usize) -> Result<Self> {
        if local_dims.is_empty() {
            return Err(Error::arg("a sited space needs at least one site"));
        }
        if let Some(d) = local_dims.iter().find(|&&d| d < 2) {
            return Err(Error::arg(format!("local dimension {d} is below 2")));
        }
        let mut total: usize = 1;
        for &d in &local_dims {
            total = total
                .checked_mul(d)
                .filter(|&t| t <= max_dim)
                .ok_or_else(|| {
                    Error::capacity(format!(
                        "total dimension of {local_dims:?} exceeds maximum {max_dim}"
                    ))
                })?;
        }
        Ok(SitedSpace { local_dims })
    }

    pub fn qubits(n: usize) -> Result<Self> {
        Self::new(vec![2; n])
    }

    pub fn local_dims(&self) -> &[usize] {
        &self.local_dims
    }

    pub fn n_sites(&self) -> usize {
        self.local_dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.local_dims.iter().product()
    }

    /// Index stride of each site in the flattened basis.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.local_dims.len()];
        for i in (0..self.local_dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.local_dims[i + 1];
        }
        strides
    }

    /// Subspace on the given sites, in the given order.
    pub fn select(&self, sites: &[usize]) -> Result<Self> {
        let dims = sites
            .iter()
            .map(|&s| {
                self.local_dims
                    .get(s)
                    .copied()
                    .ok_or_else(|| Error::arg(format!("site {s} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SitedSpace { local_dims: dims })
    }

    /// Digits of a flattened basis index, site 0 first.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.local_dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.local_dims).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }
}

/// A trace-one positive semidefinite Hermitian matrix on a [`SitedSpace`].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    space: SitedSpace,
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates and stores `mat`. Small Hermiticity defects (≤ 1e-10) are
    /// removed by symmetrization; larger ones, trace defects beyond 1e-10 and
    /// eigenvalues below −1e-10 are rejected.
    pub fn new(space: SitedSpace, mat: ComplexMatrix) -> Result<Self> {
        if mat.dim() != space.total_dim() {
            return Err(Error::arg(format!(
                "matrix dimension {} does not match space dimension {}",
                mat.dim(),
                space.total_dim()
            )));
        }
        mat.check_finite()?;
        let herm = mat.hermiticity_error();
        if herm > HERMITIAN_TOLERANCE {
            return Err(Error::arg(format!("density matrix not Hermitian ({herm:e})")));
        }
        let mat = mat.hermitian_part();
        let tr = mat.trace().re;
        if (tr - 1.0).abs() > TRACE_TOLERANCE {
            return Err(Error::arg(format!("density matrix trace is {tr}, expected 1")));
        }
        let spec = hermitian_eig(&mat)?;
        let min = spec.eigenvalues.first().copied().unwrap_or(0.0);
        if min < -NEGATIVITY_TOLERANCE {
            return Err(Error::arg(format!(
                "density matrix has negative eigenvalue {min:e}"
            )));
        }
        Ok(DensityMatrix { space, mat })
    }

    /// Divides by the trace, then validates.
    pub fn normalized(space: SitedSpace, mat: ComplexMatrix) -> Result<Self> {
        let tr = mat.trace().re;
        if !(tr > 0.0) {
            return Err(Error::arg("cannot normalize a matrix with non-positive trace"));
        }
        Self::new(space, mat.scaled_real(1.0 / tr))
    }

    /// |ψ⟩⟨ψ| for a (not necessarily normalized) amplitude vector.
    pub fn pure(space: SitedSpace, amplitudes: &[C64]) -> Result<Self> {
        if amplitudes.len() != space.total_dim() {
            return Err(Error::arg("amplitude vector length does not match the space"));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::arg("amplitude vector has zero or non-finite norm"));
        }
        let psi: Vec<C64> = amplitudes.iter().map(|a| a / norm).collect();
        Ok(DensityMatrix {
            space,
            mat: ComplexMatrix::outer(&psi),
        })
    }

    /// Skips validation; used for integrator intermediates that are
    /// checked separately.
    pub(crate) fn from_parts_unchecked(space: SitedSpace, mat: ComplexMatrix) -> Self {
        DensityMatrix { space, mat }
    }

    pub fn space(&self) -> &SitedSpace {
        &self.space
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn n_sites(&self) -> usize {
        self.space.n_sites()
    }

    pub fn purity(&self) -> f64 {
        self.mat.inner(&self.mat).re
    }

    pub fn coherence_l1(&self) -> f64 {
        self.mat.l1_off_diagonal()
    }

    pub fn spectrum(&self) -> SpectralDecomposition {
        // Hermiticity was established on construction.
        hermitian_eig(&self.mat).expect("density matrix is Hermitian")
    }

    pub fn spectrum_with_tolerance(&self, support_tolerance: f64) -> SpectralDecomposition {
        hermitian_eig_with_tolerance(&self.mat, support_tolerance)
            .expect("density matrix is Hermitian")
    }

    /// Reorders sites: new site `k` is old site `order[k]`.
    pub fn permute_sites(&self, order: &[usize]) -> Result<Self> {
        let n = self.n_sites();
        let mut seen = vec![false; n];
        if order.len() != n
            || order.iter().any(|&s| s >= n || std::mem::replace(&mut seen[s], true))
        {
            return Err(Error::arg(format!("{order:?} is not a permutation of {n} sites")));
        }
        let new_space = self.space.select(order)?;
        let old_strides = self.space.strides();
        let dim = self.dim();
        let map: Vec<usize> = (0..dim)
            .map(|idx| {
                new_space
                    .digits(idx)
                    .iter()
                    .zip(order)
                    .map(|(&digit, &old_site)| digit * old_strides[old_site])
                    .sum()
            })
            .collect();
        let mat = ComplexMatrix::from_fn(dim, |i, j| self.mat[(map[i], map[j])]);
        Ok(DensityMatrix {
            space: new_space,
            mat,
        })
    }

    /// Uhlmann fidelity (Tr √(√σ ρ √σ))².
    pub fn fidelity(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::arg("fidelity of states with different dimensions"));
        }
        // eigenvalues below the support cutoff are round-off; their square
        // roots would otherwise add ~1e-8 each
        let spec = other.spectrum();
        let cut = spec.support_cutoff();
        let sqrt_sigma = spec.map_eigenvalues(|l| C64::new(if l > cut { l.sqrt() } else { 0.0 }, 0.0));
        let inner = sqrt_sigma.matmul(&self.mat).matmul(&sqrt_sigma);
        let inner_spec = hermitian_eig(&inner.hermitian_part())?;
        let cut = inner_spec.support_cutoff();
        let root_trace: f64 = inner_spec.eigenvalues.iter().filter(|&&l| l > cut).map(|l| l.sqrt()).sum();
        Ok(root_trace * root_trace)
    }

    pub fn to_json(&self) -> StateJson {
        StateJson {
            local_dims: self.space.local_dims().to_vec(),
            re: self.mat.real_rows(),
            im: self.mat.imag_rows(),
        }
    }

    pub fn from_json(json: &StateJson) -> Result<Self> {
        let space = SitedSpace::new(json.local_dims.clone())?;
        let mat = ComplexMatrix::from_parts(&json.re, &json.im)?;
        Self::new(space, mat)
    }
}

/// Serialized state: local dimensions plus real and imaginary rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    pub local_dims: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

/// Reduced state on `keep` (ascending site order, duplicates ignored).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let (space, mat) = partial_trace_matrix(rho.space(), rho.matrix(), keep)?;
    Ok(DensityMatrix { space, mat })
}

pub(crate) fn partial_trace_matrix(
    space: &SitedSpace,
    mat: &ComplexMatrix,
    keep: &[usize],
) -> Result<(SitedSpace, ComplexMatrix)> {
    let n = space.n_sites();
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() {
        return Err(Error::arg("partial trace must keep at least one site"));
    }
    if let Some(&s) = kept.iter().find(|&&s| s >= n) {
        return Err(Error::arg(format!("site {s} out of range for {n} sites")));
    }
    let traced: Vec<usize> = (0..n).filter(|s| !kept.contains(s)).collect();
    let kept_space = space.select(&kept)?;
    if traced.is_empty() {
        return Ok((kept_space, mat.clone()));
    }
    let strides = space.strides();
    let offsets = |sites: &[usize]| -> Result<Vec<usize>> {
        let sub = space.select(sites)?;
        Ok((0..sub.total_dim())
            .map(|idx| {
                sub.digits(idx)
                    .iter()
                    .zip(sites)
                    .map(|(&d, &s)| d * strides[s])
                    .sum()
            })
            .collect())
    };
    let keep_off = offsets(&kept)?;
    let trace_off = offsets(&traced)?;
    let out = ComplexMatrix::from_fn(keep_off.len(), |i, j| {
        trace_off
            .iter()
            .map(|&t| mat[(keep_off[i] + t, keep_off[j] + t)])
            .sum()
    });
    Ok((kept_space, out))
}
