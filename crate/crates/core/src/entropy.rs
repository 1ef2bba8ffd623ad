//! Von Neumann entropy, quantum relative entropy and products of marginals.
//!
//! All values are in bits.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::densemat::{
    partial_trace, partial_trace_matrix, tensor_product, ComplexMatrix, DensityMatrix,
    SitedSpace, SpectralDecomposition, DEFAULT_SUPPORT_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::partitions::Partition;

/// Negative round-off down to this size is reported as zero.
pub const NEGATIVE_CLAMP: f64 = 1e-10;

/// S(ρ‖σ), either a finite number of bits or +∞ when supp ρ ⊄ supp σ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RelEntResult {
    Finite(f64),
    Infinite,
}

impl RelEntResult {
    pub fn support_violated(&self) -> bool {
        matches!(self, RelEntResult::Infinite)
    }

    pub fn value_bits(&self) -> Option<f64> {
        match *self {
            RelEntResult::Finite(v) => Some(v),
            RelEntResult::Infinite => None,
        }
    }
}

impl fmt::Display for RelEntResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelEntResult::Finite(v) => write!(f, "{v:.9}"),
            RelEntResult::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for RelEntResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            RelEntResult::Finite(v) => serializer.serialize_f64(*v),
            RelEntResult::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for RelEntResult {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(v) => Ok(RelEntResult::Finite(v)),
            Raw::Text(s) if s == "inf" => Ok(RelEntResult::Infinite),
            Raw::Text(s) => Err(serde::de::Error::custom(format!("expected number or \"inf\", got {s:?}"))),
        }
    }
}

fn entropy_of_spectrum(spec: &SpectralDecomposition) -> f64 {
    let cut = spec.support_cutoff();
    let s: f64 = spec
        .eigenvalues
        .iter()
        .filter(|&&l| l > cut)
        .map(|&l| -l * l.log2())
        .sum();
    s.max(0.0)
}

/// −Tr ρ log₂ ρ over the support of ρ.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&rho.spectrum())
}

/// Entropy of a Hermitian matrix assumed to be a density matrix.
pub(crate) fn matrix_entropy(mat: &ComplexMatrix) -> f64 {
    let spec = crate::densemat::hermitian_eig(mat).expect("reduced state is Hermitian");
    entropy_of_spectrum(&spec)
}

/// S(ρ‖σ) = Tr ρ log₂ ρ − Tr ρ log₂ σ, computed from both spectra.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<RelEntResult> {
    relative_entropy_with_tolerance(rho, sigma, DEFAULT_SUPPORT_TOLERANCE)
}

pub fn relative_entropy_with_tolerance(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    support_tolerance: f64,
) -> Result<RelEntResult> {
    if rho.dim() != sigma.dim() {
        return Err(Error::arg(format!(
            "relative entropy of states with dimensions {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let rho_spec = rho.spectrum_with_tolerance(support_tolerance);
    let sigma_spec = sigma.spectrum_with_tolerance(support_tolerance);

    // ⟨v_k|ρ|v_k⟩ for each eigenvector of σ
    let weights = sigma_spec.expectations(rho.matrix());
    let mut leaked = 0.0;
    let mut cross = 0.0;
    for (k, &w) in weights.iter().enumerate() {
        if sigma_spec.in_support(k) {
            cross += w * sigma_spec.eigenvalues[k].log2();
        } else {
            leaked += w;
        }
    }
    if leaked > support_tolerance {
        return Ok(RelEntResult::Infinite);
    }
    let value = -entropy_of_spectrum(&rho_spec) - cross;
    Ok(RelEntResult::Finite(clamp(value)))
}

fn clamp(value: f64) -> f64 {
    if value < 0.0 && value >= -NEGATIVE_CLAMP {
        0.0
    } else {
        value
    }
}

/// ⊗_blocks Tr_{other}(ρ), laid out in the partition's block order.
#[derive(Clone, Debug)]
pub struct MarginalProduct {
    /// Product state whose site `k` is native site `site_order[k]`.
    pub blocked: DensityMatrix,
    pub site_order: Vec<usize>,
}

impl MarginalProduct {
    /// The same product with sites returned to native order.
    pub fn to_native_order(&self) -> DensityMatrix {
        let mut inverse = vec![0; self.site_order.len()];
        for (k, &s) in self.site_order.iter().enumerate() {
            inverse[s] = k;
        }
        self.blocked
            .permute_sites(&inverse)
            .expect("site order is a permutation")
    }
}

fn check_partition(rho: &DensityMatrix, p: &Partition) -> Result<()> {
    if p.n_sites() != rho.n_sites() {
        return Err(Error::arg(format!(
            "partition {p} covers {} sites, state has {}",
            p.n_sites(),
            rho.n_sites()
        )));
    }
    Ok(())
}

pub fn product_of_marginals(rho: &DensityMatrix, p: &Partition) -> Result<MarginalProduct> {
    check_partition(rho, p)?;
    let mut acc: Option<ComplexMatrix> = None;
    for block in p.blocks() {
        let marginal = partial_trace(rho, block)?.into_matrix();
        acc = Some(match acc {
            None => marginal,
            Some(m) => tensor_product(&m, &marginal)?,
        });
    }
    let site_order = p.site_order();
    let space = rho.space().select(&site_order)?;
    let mat = acc.expect("partition has blocks");
    let blocked = DensityMatrix::new(space, mat)?;
    Ok(MarginalProduct {
        blocked,
        site_order,
    })
}

/// S(ρ ‖ ⊗ᵢ ρᵢ) through the identity Σᵢ S(ρᵢ) − S(ρ).
pub fn rel_ent_to_marginals(rho: &DensityMatrix, p: &Partition) -> Result<f64> {
    check_partition(rho, p)?;
    let whole = von_neumann_entropy(rho);
    let parts = p
        .blocks()
        .iter()
        .map(|block| block_entropy(rho.space(), rho.matrix(), block))
        .sum::<Result<f64>>()?;
    Ok(clamp(parts - whole))
}

pub(crate) fn block_entropy(space: &SitedSpace, mat: &ComplexMatrix, block: &[usize]) -> Result<f64> {
    let (_, marginal) = partial_trace_matrix(space, mat, block)?;
    Ok(matrix_entropy(&marginal))
}
