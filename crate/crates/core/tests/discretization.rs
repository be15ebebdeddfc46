mod common;

use std::sync::Arc;

use approx::assert_relative_eq;
use breather::discretization::io::{read_field, write_field};
use breather::discretization::{
    build_mode_operator, h_inner_product, stiffness_form, weighted_mass, InnerKind, ModeOperator,
};
use breather::kernels::Geometry;
use breather::{Error, Field, SpaceGrid, TimeGrid};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;

fn grid(geometry: Geometry, cells: usize) -> SpaceGrid<f64> {
    SpaceGrid::new(geometry, cells, 10.0).unwrap()
}

fn dense(op: &ModeOperator<f64>) -> DMatrix<f64> {
    let n = op.diag.len();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            op.diag[i]
        } else if j + 1 == i {
            op.lower[i]
        } else if i + 1 == j {
            op.upper[i]
        } else {
            0.0
        }
    })
}

fn complex_vec(re: &[f64], im: &[f64]) -> Vec<Complex64> {
    re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect()
}

fn geometry_strategy() -> impl Strategy<Value = Geometry> {
    prop_oneof![Just(Geometry::Slab), Just(Geometry::Cylindrical)]
}

#[test]
fn thomas_matches_dense_lu() {
    for geometry in [Geometry::Slab, Geometry::Cylindrical] {
        let g = grid(geometry, 40);
        let v: Vec<f64> = g.nodes().iter().map(|x| 0.3 + 0.1 * (x * 0.7).sin()).collect();
        let op = ModeOperator::new(&g, 3, 1.0, &v).unwrap();
        let rhs: Vec<Complex64> = (0..g.len()).map(|j| Complex64::new((j as f64).cos(), 0.5)).collect();
        let x = op.solve(&rhs).unwrap();
        let a = dense(&op);
        let lu = a.clone().lu();
        let xr = lu.solve(&DVector::from_iterator(g.len(), rhs.iter().map(|c| c.re))).unwrap();
        let xi = lu.solve(&DVector::from_iterator(g.len(), rhs.iter().map(|c| c.im))).unwrap();
        for j in 0..g.len() {
            assert_relative_eq!(x[j].re, xr[j], epsilon = 1e-12, max_relative = 1e-10);
            assert_relative_eq!(x[j].im, xi[j], epsilon = 1e-12, max_relative = 1e-10);
        }
        let back = op.apply(&x);
        let err: f64 = back.iter().zip(&rhs).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        let scale: f64 = rhs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        assert!(err <= 1e-12 * scale);
    }
}

#[test]
fn nonpositive_potential_is_rejected() {
    let g = grid(Geometry::Slab, 16);
    let mut v = vec![1.0; g.len()];
    v[5] = 0.0;
    assert!(matches!(ModeOperator::new(&g, 1, 1.0, &v), Err(Error::NonElliptic { k: 1, .. })));
}

#[test]
fn cube_of_a_cosine() {
    // cos³θ = ¾ cos θ + ¼ cos 3θ, so the stored coefficients are 3/8 and 1/8.
    let g = Arc::new(grid(Geometry::Slab, 8));
    let modes: Arc<[usize]> = Arc::from(vec![1usize]);
    let u = Field::from_fn(g.clone(), modes, |_, _| Complex64::new(0.5, 0.0));
    let tg = TimeGrid::cubic_safe(3).unwrap();
    let s = tg.synthesize(&u).unwrap();
    let cube = tg.analyze(&s.map(|_, v| v * v * v), g, Arc::from(vec![1usize, 2, 3])).unwrap();
    for j in 0..7 {
        assert_relative_eq!(cube.profile(0)[j].re, 3.0 / 8.0, epsilon = 1e-15);
        assert_relative_eq!(cube.profile(1)[j].norm(), 0.0, epsilon = 1e-15);
        assert_relative_eq!(cube.profile(2)[j].re, 1.0 / 8.0, epsilon = 1e-15);
    }
}

#[test]
fn undersampled_time_grid_is_flagged() {
    let tg = TimeGrid::<f64>::new(16).unwrap();
    assert!(tg.ensure_cubic_safe(3).is_ok());
    assert!(matches!(tg.ensure_cubic_safe(4), Err(Error::AliasRisk { required: 17, .. })));
}

#[test]
fn field_file_round_trip_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let g = Arc::new(grid(Geometry::Cylindrical, 12));
    let u = Field::from_fn(g, Arc::from(vec![1usize, 5]), |k, j| Complex64::new(k as f64 + j as f64, -0.25 * j as f64));
    let path = dir.path().join("u.field");
    let meta = write_field(&path, &u, serde_json::json!({"note": "test"})).unwrap();
    assert_eq!(meta.modes, vec![1, 5]);
    let (back, m2) = read_field::<f64>(&path).unwrap();
    assert_eq!(back, u);
    assert_eq!(m2, meta);

    let mut bytes = std::fs::read(&path).unwrap();
    let last = bytes.len() - 1;
    bytes[last] ^= 0x01;
    std::fs::write(&path, bytes).unwrap();
    assert!(matches!(read_field::<f64>(&path), Err(Error::ChecksumMismatch { .. })));
}

#[test]
fn single_precision_field_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = Arc::new(SpaceGrid::<f32>::slab(16, 4.0).unwrap());
    let u = Field::from_fn(g, Arc::from(vec![2usize]), |_, j| num_complex::Complex32::new(j as f32 * 0.5, 1.0));
    let path = dir.path().join("u32.field");
    write_field(&path, &u, serde_json::Value::Null).unwrap();
    let (back, _) = read_field::<f32>(&path).unwrap();
    assert_eq!(back, u);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn operator_is_symmetric_in_the_weighted_product(
        geometry in geometry_strategy(),
        ar in proptest::collection::vec(-1.0f64..1.0, 24),
        ai in proptest::collection::vec(-1.0f64..1.0, 24),
        br in proptest::collection::vec(-1.0f64..1.0, 24),
        bi in proptest::collection::vec(-1.0f64..1.0, 24),
        k in 1usize..6,
    ) {
        let g = grid(geometry, 24);
        let n = g.len();
        let (a, b) = (complex_vec(&ar[..n], &ai[..n]), complex_vec(&br[..n], &bi[..n]));
        let v: Vec<f64> = g.nodes().iter().map(|x| 0.2 + 0.05 * x.cos()).collect();
        let op = ModeOperator::new(&g, k, 1.3, &v).unwrap();
        let lhs = weighted_mass(&g, &op.apply(&a), &b, None);
        let rhs = weighted_mass(&g, &a, &op.apply(&b), None);
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + lhs.norm()));
        // The edge form is the stiffness part of the operator.
        let wk2 = (1.3 * k as f64).powi(2);
        let pot = weighted_mass(&g, &a, &b, Some(&v)) * wk2;
        let s = stiffness_form(&g, &a, &b);
        prop_assert!((s + pot - lhs).norm() <= 1e-10 * (1.0 + lhs.norm()));
        prop_assert!(stiffness_form(&g, &a, &a).re >= -1e-12);
    }

    #[test]
    fn parseval_on_the_time_grid(
        geometry in geometry_strategy(),
        seed in proptest::collection::vec(-1.0f64..1.0, 12),
    ) {
        let g = Arc::new(grid(geometry, 8));
        let modes: Arc<[usize]> = match geometry {
            Geometry::Slab => Arc::from(vec![1usize, 2, 4]),
            Geometry::Cylindrical => Arc::from(vec![1usize, 3, 5]),
        };
        let n = g.len();
        let mk = |off: usize| Field::from_fn(g.clone(), modes.clone(), |k, j| {
            Complex64::new(seed[(k + j + off) % 12], seed[(3 * k + 2 * j + off) % 12])
        });
        let (u, v) = (mk(0), mk(5));
        let tg = TimeGrid::cubic_safe(5).unwrap();
        let (su, sv) = (tg.synthesize(&u).unwrap(), tg.synthesize(&v).unwrap());
        let m = tg.len();
        let w = g.weights();
        let mut direct = 0.0;
        for j in 0..n {
            let s: f64 = su.at(j).iter().zip(sv.at(j)).map(|(a, b)| a * b).sum();
            direct += w[j] * s / m as f64;
        }
        let spectral = u.l2_inner(&v).unwrap();
        prop_assert!((direct - spectral).abs() <= 1e-12 * (1.0 + direct.abs()));
    }

    #[test]
    fn h_norm_dominates_weighted_l2(
        geometry in geometry_strategy(),
        amp in proptest::collection::vec(-1.0f64..1.0, 8),
    ) {
        let p = match geometry {
            Geometry::Slab => common::truncated_sine_slab(64, 10.0, 4),
            Geometry::Cylindrical => common::cylinder(64, 10.0, 3),
        };
        let nodes = p.grid().nodes().to_vec();
        let u = Field::from_fn(p.grid().clone(), p.regular().clone(), |k, j| {
            let x = nodes[j];
            let env = match geometry {
                Geometry::Slab => (-x * x / 4.0).exp(),
                Geometry::Cylindrical => x * (-x * x / 4.0).exp(),
            };
            Complex64::new(amp[k % 8] * env, amp[(k + 3) % 8] * env)
        });
        let h = h_inner_product(&u, &u, p.weights(), InnerKind::Potential).unwrap();
        let (vmin, _) = p.weights().potential_range();
        let mut lower = 0.0;
        for (k, prof) in u.iter_modes() {
            let f = p.weights().nu_coeff(k).unwrap();
            let mass = weighted_mass(p.grid(), prof, prof, None).re;
            lower += 2.0 * vmin / f * mass;
        }
        prop_assert!(h >= lower * (1.0 - 1e-12));
        prop_assert!(h >= 0.0);
    }
}

#[test]
fn operator_from_material_uses_the_local_potential() {
    let p = common::truncated_sine_slab(32, 8.0, 2);
    let op = build_mode_operator(p.spec(), p.grid(), 2).unwrap();
    let stiff_only = ModeOperator::new(p.grid(), 2, p.omega(), &vec![1e-300; p.grid().len()]).unwrap();
    let wk2 = (2.0 * p.omega()).powi(2);
    for (j, x) in p.grid().nodes().iter().enumerate() {
        let v = p.spec().potential(2, *x).unwrap();
        assert_relative_eq!(op.diag[j] - stiff_only.diag[j], wk2 * v, max_relative = 1e-12);
    }
}
