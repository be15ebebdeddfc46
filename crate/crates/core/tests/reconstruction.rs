mod common;

use std::sync::Arc;

use approx::assert_relative_eq;
use breather::kernels::{CoefficientField, LinearKernelField, Profile, Variant};
use breather::reconstruction::{profile_from_u, time_antiderivative, FieldEvaluator, Lattice};
use breather::solver::{ground_state, SolverConfig};
use breather::verification::{random_field, variant_consistency, w_equation_residual};
use breather::{Field, Problem};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn solved(p: &Problem<f64>) -> Field<f64> {
    let cfg = SolverConfig { tol_grad: 1e-11, ..Default::default() };
    ground_state(p, &cfg).unwrap().u
}

#[test]
fn first_variant_profile_is_the_solution_itself() {
    let p = common::truncated_sine_slab(64, 10.0, 4);
    let u = random_field(&p, &mut ChaCha8Rng::seed_from_u64(1));
    let pair = profile_from_u(&p, &u, None).unwrap();
    assert_eq!(pair.w1.data(), u.data());
    assert!(pair.w2.modes().is_empty());
}

#[test]
fn instantaneous_response_has_no_singular_part() {
    let spec = common::slab_spec(breather::kernels::TorusMeasure::delta(common::T, 1.0, 24).unwrap(), Variant::RetardedField);
    let p = common::problem(spec, 64, 10.0, 3);
    let u = random_field(&p, &mut ChaCha8Rng::seed_from_u64(2));
    let pair = profile_from_u(&p, &u, None).unwrap();
    assert!(pair.w2.modes().is_empty());
    // ℱ_k[δ₀] = 1, so w₁ = u.
    for (a, b) in pair.w1.data().iter().zip(u.data()) {
        assert!((a - b).norm() <= 1e-15 * b.norm().max(1.0));
    }
}

#[test]
fn second_variant_recovers_singular_harmonics() {
    // 𝒩 with only ℱ_{±1} ≠ 0: u lives on k = 1, the cube feeds k = 3 which is singular.
    let spec = common::slab_spec(common::table_nu(false), Variant::RetardedField);
    let p = common::problem(spec, 160, 14.0, 3);
    let u = solved(&p);
    let pair = profile_from_u(&p, &u, None).unwrap();
    assert!(pair.w2.modes().contains(&3));
    assert!(pair.w2.mode(3).unwrap().iter().any(|c| c.norm() > 1e-6));
    let r = w_equation_residual(&p, &pair).unwrap();
    assert!(r.relative <= 1e-9, "w residual {:e}", r.relative);
    assert!(variant_consistency(&p, &u, &pair).unwrap() <= 1e-10);
    let stats = pair.stats(p.time().len());
    assert!(stats.w2_max_abs > 0.0);
}

#[test]
fn antiderivative_of_a_cosine_is_a_sine() {
    let p = common::truncated_sine_slab(32, 5.0, 4);
    let modes: Arc<[usize]> = vec![2].into();
    let w = Field::from_fn(p.grid().clone(), modes, |_, _| Complex64::new(0.5, 0.0));
    let omega = p.omega();
    let big_w = time_antiderivative(&w, omega);
    // w = cos(2ωt) ⇒ W = sin(2ωt)/(2ω), i.e. Ŵ₂ = 1/(2i·2ω).
    let expected = Complex64::new(0.0, -0.5 / (2.0 * omega));
    assert!(big_w.data().iter().all(|c| (c - expected).norm() < 1e-15));
    // ∂ₜW = w mode by mode.
    for (i, &k) in big_w.modes().iter().enumerate() {
        let back = big_w.profile(i)[0] * Complex64::new(0.0, omega * k as f64);
        assert_relative_eq!(back.re, 0.5, max_relative = 1e-14);
    }
}

#[test]
fn slab_fields_have_te_structure() {
    let p = common::truncated_sine_slab(96, 12.0, 4);
    let u = solved(&p);
    let pair = profile_from_u(&p, &u, None).unwrap();
    let eval = FieldEvaluator::new(&pair, p.spec()).unwrap();
    let c = eval.c();
    let set = eval.assemble(&Lattice::periodic(p.spec().geometry, 3.0, 13, 3, 5, c, eval.period()));
    assert_eq!(set.samples.len(), 13 * 3 * 5);
    let mut peak: f64 = 0.0;
    for s in &set.samples {
        assert_eq!(s.e[0], 0.0);
        assert_eq!(s.e[2], 0.0);
        assert_eq!(s.b[1], 0.0);
        assert_relative_eq!(s.b[0], -s.e[1] / c, epsilon = 1e-14);
        assert_eq!(s.h, s.b);
        peak = peak.max(s.e[1].abs());
    }
    assert!(peak > 1e-3);
}

#[test]
fn vacuum_without_nonlinearity_has_d_equal_e() {
    let mut spec = common::slab_spec(common::table_nu(true), Variant::Retarded);
    spec.linear = LinearKernelField::vacuum();
    spec.h = CoefficientField::from_profile(Profile::Constant { value: 0.0 });
    let p = common::problem(spec, 64, 10.0, 3);
    let u = random_field(&p, &mut ChaCha8Rng::seed_from_u64(5));
    let pair = profile_from_u(&p, &u, None).unwrap();
    let eval = FieldEvaluator::new(&pair, p.spec()).unwrap();
    for x in [-2.0, -0.3, 0.0, 1.7] {
        for t in [0.0, 0.9, 2.5] {
            let s = eval.sample([x, 0.0, 0.4, t]);
            for i in 0..3 {
                assert!((s.d[i] - s.e[i]).abs() <= 1e-13 * (1.0 + s.e[i].abs()));
            }
        }
    }
}

#[test]
fn cylinder_fields_are_azimuthal() {
    let p = common::cylinder(96, 12.0, 3);
    let u = solved(&p);
    let pair = profile_from_u(&p, &u, None).unwrap();
    let eval = FieldEvaluator::new(&pair, p.spec()).unwrap();
    let set = eval.assemble(&Lattice::periodic(p.spec().geometry, 4.0, 9, 2, 3, eval.c(), eval.period()));
    assert!(set.radial_e_component() <= 1e-12);
    let mut seen = 0.0_f64;
    for s in &set.samples {
        let [x, y, _, _] = s.position;
        assert!((s.e[0] * x + s.e[1] * y).abs() <= 1e-12 * (1.0 + x.hypot(y)));
        assert_eq!(s.e[2], 0.0);
        seen = seen.max(s.e[0].hypot(s.e[1]));
    }
    assert!(seen > 1e-4);
    let axis = eval.sample([0.0, 0.0, 0.3, 1.1]);
    assert_eq!(axis.e, [0.0; 3]);
}

#[test]
fn zero_profile_gives_zero_fields() {
    let p = common::cylinder(48, 8.0, 3);
    let pair = profile_from_u(&p, &p.zero_field(), None).unwrap();
    let eval = FieldEvaluator::new(&pair, p.spec()).unwrap();
    let set = eval.assemble(&Lattice::periodic(p.spec().geometry, 2.0, 5, 2, 2, eval.c(), eval.period()));
    assert!(set.samples.iter().all(|s| s.e == [0.0; 3] && s.b == [0.0; 3] && s.d == [0.0; 3]));
}

#[test]
fn csv_has_one_row_per_lattice_point() {
    let p = common::truncated_sine_slab(48, 8.0, 2);
    let u = random_field(&p, &mut ChaCha8Rng::seed_from_u64(9));
    let pair = profile_from_u(&p, &u, None).unwrap();
    let eval = FieldEvaluator::new(&pair, p.spec()).unwrap();
    let set = eval.assemble(&Lattice::periodic(p.spec().geometry, 2.0, 4, 2, 3, eval.c(), eval.period()));
    let mut buf = Vec::new();
    set.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 1 + set.lattice.len());
    assert!(text.starts_with("x,y,z,t,Ex"));
}
