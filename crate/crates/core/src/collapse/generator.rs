use serde::{Deserialize, Serialize};

use super::basis::LindbladBasis;
use crate::densemat::{ComplexMatrix, DensityMatrix, SitedSpace, C64};
use crate::error::{Error, Result};

/// D_h(ρ) = Σ_{n,m} h_nm (L_n ρ L_m† − ½{L_m† L_n, ρ}), stored as
/// Σ_m A_m ρ L_m† − ½{K, ρ} with A_m = Σ_n h_nm L_n and K = Σ_m L_m† A_m.
#[derive(Clone, Debug)]
pub(crate) struct Dissipator {
    jumps: Vec<(ComplexMatrix, ComplexMatrix)>,
    k: ComplexMatrix,
}

impl Dissipator {
    pub(crate) fn new(basis: &LindbladBasis, h: &ComplexMatrix) -> Result<Self> {
        let ops = basis.operators();
        if h.dim() != ops.len() {
            return Err(Error::arg(format!(
                "rate matrix is {}x{}, basis has {} operators",
                h.dim(),
                h.dim(),
                ops.len()
            )));
        }
        let dim = basis.dim();
        let mut jumps = Vec::new();
        let mut k = ComplexMatrix::zeros(dim);
        for (m, l_m) in ops.iter().enumerate() {
            let mut a_m = ComplexMatrix::zeros(dim);
            for (n, l_n) in ops.iter().enumerate() {
                let w = h[(n, m)];
                if w.re != 0.0 || w.im != 0.0 {
                    a_m.add_scaled(w, l_n);
                }
            }
            if a_m.is_zero() {
                continue;
            }
            k = &k + &l_m.adjoint().matmul(&a_m);
            jumps.push((a_m, l_m.clone()));
        }
        Ok(Dissipator { jumps, k })
    }

    /// out += scale · D(ρ)
    pub(crate) fn accumulate(&self, rho: &ComplexMatrix, scale: f64, out: &mut ComplexMatrix) {
        if scale == 0.0 || self.jumps.is_empty() {
            return;
        }
        let s = C64::new(scale, 0.0);
        for (a, l) in &self.jumps {
            out.add_scaled(s, &a.matmul(rho).matmul_adjoint(l));
        }
        let anti = &rho.matmul(&self.k) + &self.k.matmul(rho);
        out.add_scaled(C64::new(-0.5 * scale, 0.0), &anti);
    }
}

/// −i[H, ρ]
pub(crate) fn unitary_part(hamiltonian: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    hamiltonian.commutator(rho).scaled(C64::new(0.0, -1.0))
}

/// dρ/dt = −i[H, ρ] + D_h(ρ) for a fixed rate matrix `h` (ħ = 1).
pub fn generator(
    rho: &DensityMatrix,
    hamiltonian: &ComplexMatrix,
    basis: &LindbladBasis,
    h: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let dim = rho.dim();
    if hamiltonian.dim() != dim || basis.dim() != dim {
        return Err(Error::arg(format!(
            "state dimension {dim}, Hamiltonian {}, basis operators {}",
            hamiltonian.dim(),
            basis.dim()
        )));
    }
    let dissipator = Dissipator::new(basis, h)?;
    let mut out = unitary_part(hamiltonian, rho.matrix());
    dissipator.accumulate(rho.matrix(), 1.0, &mut out);
    Ok(out)
}

/// Named Hamiltonians, or an explicit matrix.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HamiltonianSpec {
    #[default]
    Zero,
    /// g Σᵢ Xᵢ on qubits.
    TransverseField { g: f64 },
    Matrix { re: Vec<Vec<f64>>, im: Vec<Vec<f64>> },
}

impl HamiltonianSpec {
    pub fn build(&self, space: &SitedSpace) -> Result<ComplexMatrix> {
        let dim = space.total_dim();
        match self {
            HamiltonianSpec::Zero => Ok(ComplexMatrix::zeros(dim)),
            HamiltonianSpec::TransverseField { g } => {
                if space.local_dims().iter().any(|&d| d != 2) {
                    return Err(Error::arg("transverse_field is defined on qubits only"));
                }
                let n = space.n_sites();
                let mut h = ComplexMatrix::zeros(dim);
                for site in 0..n {
                    let bit = 1usize << (n - 1 - site);
                    for i in 0..dim {
                        h[(i, i ^ bit)] += C64::new(*g, 0.0);
                    }
                }
                Ok(h)
            }
            HamiltonianSpec::Matrix { re, im } => {
                let h = ComplexMatrix::from_parts(re, im)?;
                if h.dim() != dim {
                    return Err(Error::arg(format!(
                        "Hamiltonian is {}x{}, state space has dimension {dim}",
                        h.dim(),
                        h.dim()
                    )));
                }
                if h.hermiticity_error() > 1e-10 {
                    return Err(Error::arg("Hamiltonian is not Hermitian"));
                }
                Ok(h)
            }
        }
    }
}
