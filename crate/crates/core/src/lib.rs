//! Sextic double-well oscillator: exact and variational eigenstates,
//! phase-space quasi-distributions, and their information measures.
//!
//! The pipeline runs bottom-up: [`model`] defines the potential and its
//! exactly solvable sector, [`variational`] produces accurate states for any
//! coupling, [`phasespace`] samples W, |W| and H on grids, and
//! [`infotheory`] reduces the grids to entropies and divergences.

pub mod error;
pub mod export;
pub mod infotheory;
pub mod model;
pub mod phasespace;
pub mod quadrature;
pub mod variational;

pub use error::{Error, Result};
pub use infotheory::{CrjPair, CrjRow, EntropyReport, MarginalDensity, MarginalSet, Projection};
pub use model::{build_qes_matrix, Parity, QesSector, SexticPotential, Wavefunction};
pub use phasespace::{DistributionKind, GridSpec, PhaseGrid, PhaseSpaceSet};
pub use variational::{solve_state, AnsatzState, MomentumWavefunction};
