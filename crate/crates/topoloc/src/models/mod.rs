//! Tight-binding models, finite samples and position operators.

mod builtin;
mod config;
mod geometry;
mod model;
pub mod small;

pub use builtin::{
    builtin_model, chiral_3d, flux_from_real, haldane, haldane_benchmark, haldane_critical_mass, harper, kane_mele,
    pip_bdg, spin_flip, ssh, wilson_dirac_3d, ModelInfo, Params, CATALOG,
};
pub use config::{BoundarySpec, DisorderSpec, GeometrySpec, ModelSpec};
pub use geometry::{commutator_with_diagonal, position_operators, Boundary, LatticeGeometry, PositionOperators};
pub use model::{
    bloch_hamiltonian, build_hamiltonian, counter_uniform, validate_symmetries, AntiUnitary, Disorder,
    DisorderChannel, Flux, Hopping, Symmetries, TightBindingModel,
};
