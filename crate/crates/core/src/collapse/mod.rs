//! The Φ-coupled collapse master equation
//!
//! ```text
//! dρ/dt = −i[H, ρ] + Σ_{n,m} h_nm(Φ(ρ)) (L_n ρ L_m† − ½{L_m† L_n, ρ})
//! ```
//!
//! with h(0) = 0, so states without integrated information evolve unitarily.
//! The rate matrix is rebuilt from the current state's Φ, which makes the
//! equation nonlinear in ρ.

mod basis;
mod coupling;
mod generator;
mod integrator;
mod race;

pub use basis::{BasisKind, LindbladBasis};
pub use coupling::{CouplingSpec, TableNode};
pub use generator::{generator, HamiltonianSpec};
pub use integrator::{
    evolve, evolve_with_reference, Diagnostics, IntegratorConfig, TrajectoryJson, TrajectoryRecord,
};
pub use race::{race, HalfTime, RaceEntry};
