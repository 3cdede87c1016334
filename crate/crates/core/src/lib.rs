//! Charged-particle motion in an n-dimensional constant magnetic field.
//!
//! The crate covers the whole chain from a linear gauge to observable
//! quantities:
//!
//! - [`tensors`]: metrics, linear gauges and the antisymmetric field tensor.
//! - [`canonical`]: the basis in which the field splits into 2x2 blocks.
//! - [`heisenberg`]: exact commutators of first-order operators and the
//!   magnetic-translation composition phase.
//! - [`dynamics`]: classical equations of motion, exact and RK4 evolution,
//!   orbit centers and relative coordinates.
//! - [`spectrum`]: cyclotron frequencies, Landau levels, discreteness.
//!
//! All indices in the Rust API are zero-based.

pub mod canonical;
pub mod dynamics;
pub mod error;
pub mod expm;
pub mod heisenberg;
pub mod spectrum;
pub mod tensors;

pub use canonical::{decompose, to_canonical, CanonicalCoords, CanonicalForm, GammaTensor};
pub use dynamics::{
    dual_momentum_value, dynamics_matrix, evolve_exact, evolve_rk4, kinetic_energy,
    orbit_decomposition, DynamicsMatrix, ExactPropagator, OrbitDecomposition, ParticleState,
};
pub use error::{Error, Result};
pub use heisenberg::{
    canonical_momentum, commutator, dual_momentum, translation_phase, AffineOperator,
    CommutatorTables,
};
pub use spectrum::{
    classify_spectrum, cyclotron_frequencies, landau_level, Discreteness, SpectrumReport,
};
pub use tensors::{
    check_radiation_gauge, field_from_3d_vector, field_from_gauge, gauge_antisymmetric,
    gauge_triangular, FieldTensor, GaugeMatrix, MetricTensor, PhysicalConstants,
};

pub use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64;
