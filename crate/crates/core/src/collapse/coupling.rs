use serde::{Deserialize, Serialize};

use crate::densemat::{hermitian_eig, ComplexMatrix};
use crate::error::{Error, Result};

const PSD_TOLERANCE: f64 = 1e-10;
const ZERO_AT_ORIGIN: f64 = 1e-15;

/// One sample of a tabulated rate matrix h(Φ).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableNode {
    pub phi: f64,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

/// How the rate matrix h depends on Φ.
///
/// `diagonal_linear` is h = λΦ·I. `custom_table` interpolates linearly
/// between samples, is anchored at h(0) = 0 below the first sample and held
/// constant past the last.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CouplingSpec {
    DiagonalLinear { lambda: f64 },
    CustomTable { table: Vec<TableNode> },
}

impl Default for CouplingSpec {
    fn default() -> Self {
        CouplingSpec::DiagonalLinear { lambda: 1.0 }
    }
}

impl CouplingSpec {
    pub fn diagonal_linear(lambda: f64) -> Self {
        CouplingSpec::DiagonalLinear { lambda }
    }

    /// Checks the table against a basis of `basis_len` operators: h(0) = 0,
    /// every sample Hermitian and positive semidefinite.
    pub fn validate(&self, basis_len: usize) -> Result<()> {
        self.nodes(basis_len).map(|_| ())
    }

    /// Matrices the rate is a non-negative combination of.
    pub(crate) fn nodes(&self, basis_len: usize) -> Result<Vec<ComplexMatrix>> {
        match self {
            CouplingSpec::DiagonalLinear { lambda } => {
                if !(lambda.is_finite() && *lambda >= 0.0) {
                    return Err(Error::arg(format!("coupling lambda must be finite and >= 0, got {lambda}")));
                }
                Ok(vec![ComplexMatrix::identity(basis_len)])
            }
            CouplingSpec::CustomTable { table } => {
                if table.is_empty() {
                    return Err(Error::arg("custom coupling table is empty"));
                }
                let mut previous = f64::NEG_INFINITY;
                let mut out = Vec::with_capacity(table.len());
                for node in table {
                    if !(node.phi.is_finite() && node.phi >= 0.0 && node.phi > previous) {
                        return Err(Error::arg(
                            "coupling table Φ samples must be finite, non-negative and strictly increasing",
                        ));
                    }
                    previous = node.phi;
                    let h = ComplexMatrix::from_parts(&node.re, &node.im)?;
                    if h.dim() != basis_len {
                        return Err(Error::arg(format!(
                            "coupling matrix at Φ = {} is {}x{}, basis has {basis_len} operators",
                            node.phi,
                            h.dim(),
                            h.dim()
                        )));
                    }
                    let spec = hermitian_eig(&h).map_err(|_| {
                        Error::arg(format!("coupling matrix at Φ = {} is not Hermitian", node.phi))
                    })?;
                    if spec.eigenvalues[0] < -PSD_TOLERANCE {
                        return Err(Error::arg(format!(
                            "coupling matrix at Φ = {} is not positive semidefinite (eigenvalue {:e})",
                            node.phi, spec.eigenvalues[0]
                        )));
                    }
                    if node.phi == 0.0 && h.max_abs() > ZERO_AT_ORIGIN {
                        return Err(Error::arg("coupling must vanish at Φ = 0"));
                    }
                    out.push(h);
                }
                Ok(out)
            }
        }
    }

    /// Non-negative weights on [`nodes`](Self::nodes) giving h(Φ).
    pub(crate) fn weights(&self, phi: f64) -> Vec<(usize, f64)> {
        let phi = phi.max(0.0);
        match self {
            CouplingSpec::DiagonalLinear { lambda } => vec![(0, lambda * phi)],
            CouplingSpec::CustomTable { table } => {
                let first = table[0].phi;
                if phi <= first {
                    return if first > 0.0 { vec![(0, phi / first)] } else { vec![(0, 0.0)] };
                }
                for (i, pair) in table.windows(2).enumerate() {
                    let (lo, hi) = (pair[0].phi, pair[1].phi);
                    if phi <= hi {
                        let w = (phi - lo) / (hi - lo);
                        return vec![(i, 1.0 - w), (i + 1, w)];
                    }
                }
                vec![(table.len() - 1, 1.0)]
            }
        }
    }

    /// h(Φ) as a matrix over the basis.
    pub fn rate_matrix(&self, phi: f64, basis_len: usize) -> Result<ComplexMatrix> {
        let nodes = self.nodes(basis_len)?;
        let mut h = ComplexMatrix::zeros(basis_len);
        for (i, w) in self.weights(phi) {
            h.add_scaled(w.into(), &nodes[i]);
        }
        Ok(h)
    }
}
