mod common;

use std::sync::Arc;

use approx::assert_relative_eq;
use breather::kernels::Variant;
use breather::reconstruction::{profile_from_u, FieldEvaluator};
use breather::solver::{ground_state, SolverConfig};
use breather::verification::{
    converges_at_order, decay_probe, embedding_diagnostic, invariant_suite, maxwell_probes, maxwell_residuals,
    periodicity_defect, residual_report, smoothness_probe, strong_residual, ReportOptions, SuiteTolerances,
};
use breather::Field;
use num_complex::Complex64;

#[test]
fn zero_field_has_zero_residual() {
    let p = common::truncated_sine_slab(32, 6.0, 2);
    let r = strong_residual(&p, &p.zero_field()).unwrap();
    assert_eq!(r.absolute, 0.0);
    assert_eq!(r.relative, 0.0);
}

#[test]
fn time_derivatives_of_a_single_mode_scale_by_frequency() {
    let p = common::truncated_sine_slab(64, 8.0, 4);
    let k = 2;
    let u = Field::from_fn(p.grid().clone(), p.regular().clone(), |m, j| {
        if m == k {
            let x = p.grid().nodes()[j];
            Complex64::new((-x * x).exp(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let base = p.norm_sq(&u).unwrap().sqrt();
    let rep = smoothness_probe(&p, &u, &[1.0, 2.0, 0.5]).unwrap();
    let wk = p.omega() * k as f64;
    for (s, h, _) in rep.norms {
        assert_relative_eq!(h, wk.powf(s) * base, max_relative = 1e-12);
    }
}

#[test]
fn flat_spectrum_is_flagged() {
    let p = common::truncated_sine_slab(48, 8.0, 6);
    let u = Field::from_fn(p.grid().clone(), p.regular().clone(), |_, j| {
        let x = p.grid().nodes()[j];
        Complex64::new((-x * x).exp(), 0.0)
    });
    assert!(smoothness_probe(&p, &u, &[1.0]).unwrap().flat_spectrum);
}

#[test]
fn compactly_supported_field_has_no_tail() {
    let p = common::truncated_sine_slab(64, 10.0, 2);
    let u = Field::from_fn(p.grid().clone(), p.regular().clone(), |_, j| {
        let x: f64 = p.grid().nodes()[j];
        Complex64::new(if x.abs() < 7.0 { 1.0 } else { 0.0 }, 0.0)
    });
    let tails = decay_probe(&u, &[0.1, 0.25, 0.5]);
    assert_eq!(tails[0], 0.0);
    assert_eq!(tails[1], 0.0);
    assert!(tails[2] > 0.0 && tails[2] < 1.0);
    assert!(tails.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn embedding_constant_is_finite() {
    let p = common::truncated_sine_slab(64, 10.0, 4);
    let e = embedding_diagnostic(&p, 16, 3).unwrap();
    assert!(e.subcritical);
    assert!(e.constant.is_finite() && e.constant > 0.0);
    assert_eq!(e.samples, 16);
}

#[test]
fn order_criterion() {
    assert!(converges_at_order(4e-4, 1e-4));
    assert!(!converges_at_order(4e-4, 2e-4));
    assert!(converges_at_order(0.0, 0.0));
    assert!(converges_at_order(1e-12, 1e-12));
}

#[test]
fn solved_slab_passes_the_invariant_suite() {
    let p = common::truncated_sine_slab(160, 16.0, 4);
    let cfg = SolverConfig { tol_grad: 1e-10, ..Default::default() };
    let u = ground_state(&p, &cfg).unwrap().u;
    let pair = profile_from_u(&p, &u, None).unwrap();
    let report = residual_report(&p, &u, &pair, &ReportOptions::default()).unwrap();
    assert!(report.is_well_formed());
    let suite = invariant_suite(&p, &u, &report, &SuiteTolerances { tol_grad: 1e-10, ..Default::default() }).unwrap();
    let failed: Vec<_> = suite.failures().map(|c| c.name.clone()).collect();
    assert!(suite.all_pass(), "failed: {failed:?}");
}

#[test]
fn reconstructed_fields_are_periodic_and_converge() {
    let spec = common::slab_spec(common::table_nu(false), Variant::RetardedField);
    let p = common::problem(spec, 160, 14.0, 3);
    let cfg = SolverConfig { tol_grad: 1e-10, ..Default::default() };
    let u = ground_state(&p, &cfg).unwrap().u;
    let pair = profile_from_u(&p, &u, None).unwrap();
    let eval = FieldEvaluator::new(&pair, p.spec()).unwrap();
    let probes = maxwell_probes(&eval, 14.0, 0.2, 24, 5);
    assert!(periodicity_defect(&eval, &probes) <= 1e-10);
    let dx = p.grid().spacing();
    let coarse = maxwell_residuals(&eval, &probes, 0.25 * dx);
    let fine = maxwell_residuals(&eval, &probes, 0.125 * dx);
    assert!(converges_at_order(coarse.faraday, fine.faraday), "{} → {}", coarse.faraday, fine.faraday);
    assert!(converges_at_order(coarse.gauss_b, fine.gauss_b));
    assert!(converges_at_order(coarse.gauss_d, fine.gauss_d));
    let _ = Arc::clone(p.grid());
}
