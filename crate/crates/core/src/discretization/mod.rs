//! Discrete function space: spatial grids, temporal mode sets, fields, time transforms and
//! per-mode spatial operators.

mod field;
mod grid;
mod inner;
pub mod io;
mod modes;
mod operator;
mod time;

pub use field::Field;
pub use grid::{GridSpec, SpaceGrid, MIN_CELLS};
pub use inner::{
    fractional_time_derivative, h_inner_product, project_regular, project_singular, stiffness_form,
    weighted_mass, InnerKind, ModeWeights,
};
pub use modes::ModeSet;
pub use operator::{build_mode_operator, sample_potential, solve_mode_operator, ModeOperator};
pub use time::{TimeGrid, TimeSamples};
