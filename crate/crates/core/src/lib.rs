//! Open-system dynamics of a harmonic oscillator coupled to a thermal bath:
//! Gaussian closed forms, entropy-based selection of preferred states,
//! decoherence of superpositions, and bath spectral properties.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cat;
pub mod error;
pub mod gaussian;
pub mod grid;
pub mod kernel;
pub mod medium;
pub mod optim;
pub mod oracle;
pub mod params;
pub mod propagator;
pub mod quad;
pub mod sieve;

pub use cat::{
    cat_dm_general, cat_dm_initial, cat_dm_stroboscopic, decoherence_time, halo_demo_fock,
    halo_radius, separation, visibility, CatDM, CatSpec, FockDemo,
};
pub use error::{Error, Result};
pub use gaussian::{
    make_coherent, make_squeezed, multimode_entropy, thermal_entropy, wigner, GaussianDM,
    WignerField,
};
pub use grid::GridSpec;
pub use medium::{
    im_k, ohmic_d, refractive_index, spectral_density, DielectricTable, MediumSpec, MolecularSpectrum,
};
pub use kernel::{sample_density, GaussianKernel, PositionDensity};
pub use params::{PhaseSpacePoint, SimParams, SqueezeParam};
pub use propagator::{
    evolve_coherent, evolve_gaussian, evolve_kernel, evolve_special, evolve_squeezed, mixing_factor,
    sigma, EvolvedSpecial,
};
pub use sieve::{
    coherent_entropy, entropy_of_initial, sieve_minimize, sieve_scan, superselection_valid,
    SieveResult,
};
pub use oracle::{
    fock_superposition_dm, grid_entropy, propagate_numeric, EntropyReport, LorentzOracle, NumericDM,
};
