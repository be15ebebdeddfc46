#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use breather::kernels::{
    builtin_nu_truncated_sine, CoefficientField, Geometry, KernelTerm, LinearKernelField, MaterialSpec, Part, Profile,
    TorusMeasure, Variant,
};
use breather::{Problem, SpaceGrid, TimeGrid};

pub const T: f64 = 2.0 * PI;

pub fn gaussian(amplitude: f64, width: f64) -> Profile {
    Profile::Gaussian {
        amplitude,
        center: 0.0,
        width,
    }
}

/// Slab material with a smooth localized instantaneous `𝒢`, Gaussian `h` and the given `𝒩`.
pub fn slab_spec(nu: TorusMeasure<f64>, variant: Variant) -> MaterialSpec<f64> {
    let k = nu.k_max().max(24);
    MaterialSpec {
        geometry: Geometry::Slab,
        c: 0.8,
        period: T,
        linear: LinearKernelField {
            terms: vec![KernelTerm {
                profile: gaussian(0.2, 2.0),
                kernel: TorusMeasure::delta(T, 1.0, k).unwrap(),
                part: Part::Whole,
            }],
            split_period: None,
        },
        h: CoefficientField::from_profile(Profile::Sum {
            terms: vec![Profile::Constant { value: 0.2 }, gaussian(1.0, 3.0)],
        }),
        nu,
        variant,
        alpha: 2.0,
        beta: 2.0,
    }
}

pub fn cylinder_spec(variant: Variant) -> MaterialSpec<f64> {
    MaterialSpec {
        geometry: Geometry::Cylindrical,
        c: 0.8,
        period: T,
        linear: LinearKernelField {
            terms: vec![KernelTerm {
                profile: gaussian(0.2, 2.0),
                kernel: TorusMeasure::delta(T, 1.0, 24).unwrap(),
                part: Part::Whole,
            }],
            split_period: None,
        },
        h: CoefficientField::from_profile(gaussian(1.0, 3.0)),
        nu: TorusMeasure::delta(T, 1.0, 24).unwrap(),
        variant,
        alpha: 0.0,
        beta: 0.0,
    }
}

pub fn truncated_sine_slab(cells: usize, extent: f64, k_max: usize) -> Problem<f64> {
    let spec = slab_spec(builtin_nu_truncated_sine(T, 3 * k_max).unwrap(), Variant::Retarded);
    let grid = Arc::new(SpaceGrid::slab(cells, extent).unwrap());
    Problem::with_cutoff(spec, grid, k_max, TimeGrid::cubic_safe(k_max).unwrap()).unwrap()
}

pub fn cylinder(cells: usize, extent: f64, k_max: usize) -> Problem<f64> {
    let grid = Arc::new(SpaceGrid::cylindrical(cells, extent).unwrap());
    Problem::with_cutoff(cylinder_spec(Variant::Retarded), grid, k_max, TimeGrid::cubic_safe(k_max).unwrap()).unwrap()
}

/// `𝒩` with coefficients only at `k = ±1` (and `±3` when `with_three`).
pub fn table_nu(with_three: bool) -> TorusMeasure<f64> {
    let mut e = vec![(0, 1.0), (1, 1.0)];
    if with_three {
        e.push((3, 0.5));
    }
    TorusMeasure::fourier_table(T, &e).unwrap()
}

pub fn problem(spec: MaterialSpec<f64>, cells: usize, extent: f64, k_max: usize) -> Problem<f64> {
    let grid = Arc::new(SpaceGrid::new(spec.geometry, cells, extent).unwrap());
    Problem::with_cutoff(spec, grid, k_max, TimeGrid::cubic_safe(k_max).unwrap()).unwrap()
}

pub fn config_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

/// Loads a shipped config as JSON so tests can adjust it before parsing.
pub fn config_json(name: &str) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(config_path(name)).unwrap()).unwrap()
}

pub fn run_config(value: &serde_json::Value) -> breather::RunConfig {
    breather::RunConfig::from_json(&value.to_string()).unwrap()
}
