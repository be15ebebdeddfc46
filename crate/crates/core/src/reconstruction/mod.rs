//! From the surrogate `u` back to the physical profile `w` and the traveling fields.

mod fields;
mod profile;
mod spline;

pub use fields::{
    assemble_fields_cylindrical, assemble_fields_slab, EMFieldSet, FieldEvaluator, FieldSample, Lattice, Normalization,
    CSV_HEADER,
};
pub use profile::{profile_from_u, time_antiderivative, ProfilePair, ProfileStats};
pub use spline::CubicSpline;
