//! Traveling breather ground states of cubic nonlinear Maxwell equations with retarded
//! material laws, in slab and cylindrical waveguides.
//!
//! The pipeline is: describe a material ([`kernels`]), discretize space with finite
//! differences and time with a Fourier basis ([`discretization`]), minimize the energy on
//! the Nehari manifold ([`functional`], [`solver`]), recover the physical profile and the
//! electromagnetic fields ([`reconstruction`]) and check residuals ([`verification`]).
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the aliases below fix
//! the common choices.

pub mod config;
pub mod discretization;
pub mod error;
pub mod functional;
pub mod kernels;
pub mod reconstruction;
pub mod scalar;
pub mod solver;
pub mod verification;

pub use config::RunConfig;
pub use discretization::{Field, ModeSet, SpaceGrid, TimeGrid};
pub use error::{Error, Result};
pub use functional::{energy, gradient, EnergyBreakdown, Problem};
pub use kernels::{Geometry, MaterialSpec, Variant};
pub use reconstruction::{EMFieldSet, ProfilePair};
pub use scalar::Real;
pub use solver::{ground_state, SolveReport, SolveSummary, SolverConfig};

pub type Field64 = Field<f64>;
pub type Field32 = Field<f32>;
pub type Problem64 = Problem<f64>;
pub type Problem32 = Problem<f32>;
pub type Material64 = MaterialSpec<f64>;
pub type Material32 = MaterialSpec<f32>;
