use serde::{Deserialize, Serialize};

use crate::densemat::{ComplexMatrix, C64};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    GellMann,
    #[default]
    SiteProjectors,
    Custom,
}

/// The jump operators {L_k} the rate matrix h is indexed by.
#[derive(Clone, Debug, PartialEq)]
pub struct LindbladBasis {
    kind: BasisKind,
    operators: Vec<ComplexMatrix>,
}

impl LindbladBasis {
    /// The N² − 1 generalized Gell-Mann matrices, normalised to Tr(λₐλ_b) = 2δₐ_b:
    /// symmetric pairs, then antisymmetric pairs, then diagonals.
    pub fn gell_mann(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::arg("Gell-Mann basis needs dimension at least 2"));
        }
        let mut ops = Vec::with_capacity(dim * dim - 1);
        for j in 0..dim {
            for k in j + 1..dim {
                let mut m = ComplexMatrix::zeros(dim);
                m[(j, k)] = C64::new(1.0, 0.0);
                m[(k, j)] = C64::new(1.0, 0.0);
                ops.push(m);
            }
        }
        for j in 0..dim {
            for k in j + 1..dim {
                let mut m = ComplexMatrix::zeros(dim);
                m[(j, k)] = C64::new(0.0, -1.0);
                m[(k, j)] = C64::new(0.0, 1.0);
                ops.push(m);
            }
        }
        for l in 1..dim {
            let lf = l as f64;
            let norm = (2.0 / (lf * (lf + 1.0))).sqrt();
            let mut m = ComplexMatrix::zeros(dim);
            for j in 0..l {
                m[(j, j)] = C64::new(norm, 0.0);
            }
            m[(l, l)] = C64::new(-lf * norm, 0.0);
            ops.push(m);
        }
        Ok(LindbladBasis {
            kind: BasisKind::GellMann,
            operators: ops,
        })
    }

    /// Projectors |i⟩⟨i| onto the computational basis.
    pub fn site_projectors(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::arg("projector basis needs a positive dimension"));
        }
        let operators = (0..dim)
            .map(|i| {
                let mut m = ComplexMatrix::zeros(dim);
                m[(i, i)] = C64::new(1.0, 0.0);
                m
            })
            .collect();
        Ok(LindbladBasis {
            kind: BasisKind::SiteProjectors,
            operators,
        })
    }

    pub fn custom(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = operators
            .first()
            .map(ComplexMatrix::dim)
            .ok_or_else(|| Error::arg("custom basis needs at least one operator"))?;
        for (i, op) in operators.iter().enumerate() {
            if op.dim() != dim {
                return Err(Error::arg(format!("operator {i} has dimension {}, expected {dim}", op.dim())));
            }
            op.check_finite()?;
        }
        Ok(LindbladBasis {
            kind: BasisKind::Custom,
            operators,
        })
    }

    /// Builds a non-custom basis of the given kind.
    pub fn of_kind(kind: BasisKind, dim: usize) -> Result<Self> {
        match kind {
            BasisKind::GellMann => Self::gell_mann(dim),
            BasisKind::SiteProjectors => Self::site_projectors(dim),
            BasisKind::Custom => Err(Error::arg("custom bases need explicit operators")),
        }
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.operators[0].dim()
    }
}
