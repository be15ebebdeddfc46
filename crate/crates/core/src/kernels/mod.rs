//! Material-law kernels, their periodic reduction, and admissibility checks.

mod assumptions;
mod material;
mod measure;
mod profile;

pub use assumptions::{validate_assumptions, AssumptionCheck, AssumptionReport, Verdict, Witness};
pub use material::{
    regular_set, subharmonic_restrict, CoefficientField, Geometry, KernelTerm, LinearKernelField,
    MaterialSpec, Part, Variant, DEFAULT_ZERO_TOL,
};
pub use measure::{
    builtin_nu_truncated_sine, periodic_reduce, Density, KernelDef, LineMeasure, Provenance,
    TorusMeasure,
};
pub use profile::Profile;
