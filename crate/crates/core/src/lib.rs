//! Exact-diagonalization laboratory for the truncated Bose-Hubbard model.
//!
//! The crate builds the grand-canonical Hamiltonian
//! `H = U·N₂ + T − μ·N + λ·L` on a truncated Fock space (total occupation
//! at most `M`), diagonalizes it densely, and checks the operator identities
//! and inequalities that rule out Bose-Einstein condensation in one and two
//! dimensions: the finite-dimensional Bogolyubov inequality, the summed
//! momentum-space bound on the order parameter, relative-boundedness and
//! spectral estimates, and the density band built from the single-site
//! series `g(r)`.
//!
//! Layout:
//!
//! - [`lattice`]: periodic cubic lattice and its Brillouin-zone momenta.
//! - [`fock`]: sector-ordered truncated occupation basis.
//! - [`operators`]: sparse operators, hopping, Hamiltonian, momentum
//!   operators and closed-form commutators.
//! - [`thermal`]: spectral decomposition and Gibbs averages.
//! - [`bogolyubov`]: projection identities and the Bogolyubov chain.
//! - [`bounds`]: norm and spectral estimates, density band and window,
//!   k-sums, condensation scan.
//! - [`harness`]: JSON configuration, the `verify`/`scan` drivers and CSV
//!   reports used by the `bhl` binary.

pub mod bogolyubov;
pub mod bounds;
pub mod error;
pub mod fock;
pub mod harness;
pub mod lattice;
pub mod operators;
pub mod thermal;

pub use error::{Error, Result};
pub use fock::{OccupationState, TruncatedBasis};
pub use lattice::{LatticeSpec, Momentum};
pub use num_complex::Complex64;
pub use operators::{HoppingSpec, ModelSpec, SectorShift, SparseOperator};
pub use thermal::{SpectralDecomposition, ThermalState};
