//! Quantum integrated information (Φ) of finite-dimensional states and a
//! master equation whose dissipative rates are driven by Φ.
//!
//! The crate is organised bottom-up:
//!
//! - [`densemat`]: dense complex matrices, sited tensor-product spaces,
//!   density matrices, Hermitian eigendecomposition and matrix functions.
//! - [`entropy`]: von Neumann and relative entropies, products of marginals.
//! - [`partitions`]: set partitions of sites, the search space for Φ.
//! - [`qii`]: Φ(ρ) and the minimum information partition.
//! - [`states`]: GHZ, W, Dicke, basis/product and random states.
//! - [`collapse`]: the Φ-coupled Lindblad equation, an RK4 integrator and
//!   collapse races between states.
//!
//! All entropies are in bits. Time is measured in units of inverse energy
//! (ħ = 1).

pub mod collapse;
pub mod densemat;
pub mod entropy;
mod error;
pub mod partitions;
pub mod qii;
pub mod states;

pub use error::{Error, Result};

pub use collapse::{
    evolve, generator, race, CouplingSpec, HalfTime, IntegratorConfig, LindbladBasis, RaceEntry,
    TrajectoryRecord,
};
pub use densemat::{
    hermitian_eig, log2_on_support, partial_trace, tensor_product, unitary_propagator,
    ComplexMatrix, DensityMatrix, SitedSpace, SpectralDecomposition, C64,
};
pub use entropy::{
    product_of_marginals, rel_ent_to_marginals, relative_entropy, von_neumann_entropy,
    RelEntResult,
};
pub use partitions::{bipartitions_only, enumerate_partitions, Partition};
pub use qii::{compute_qii, qii_profile, QiiResult, QiiSearch, Strategy};
pub use states::StateSpec;
