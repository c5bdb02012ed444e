//! Sparse operator algebra and the lattice operators built on it.

mod builders;
mod hopping;
mod sparse;

pub use builders::{
    annihilate, closed_form_commutators, create, density_wave, global_operators, hamiltonian,
    hopping, hopping_off_diagonal, hopping_on_site, momentum_annihilate, momentum_create,
    momentum_operators, number, number_squared, pair_hopping, symmetry_breaking, total_number,
    ClosedForms, GlobalOperators, MomentumOperators,
};
pub use hopping::{HoppingMatrix, HoppingSpec, ModelSpec};
pub use sparse::{commutator, SectorShift, SparseOperator, PRUNE};
