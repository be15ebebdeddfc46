//! The energy `J(u) = ½⟨u,u⟩_H − ¼∫h u⁴`, its derivative, `H`-gradient and Nehari scaling.

use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discretization::{
    h_inner_product, Field, InnerKind, ModeOperator, ModeSet, ModeWeights, SpaceGrid, TimeGrid, TimeSamples,
};
use crate::error::{Error, Result};
use crate::kernels::{regular_set, MaterialSpec, DEFAULT_ZERO_TOL};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown<T> {
    /// `½⟨u,u⟩_H`
    pub quadratic: T,
    /// `¼∫h u⁴`
    pub quartic: T,
    pub total: T,
}

impl<T: Real> EnergyBreakdown<T> {
    fn new(quadratic: T, quartic: T) -> Self {
        Self {
            quadratic,
            quartic,
            total: quadratic - quartic,
        }
    }
}

/// Point where the ray through `u` meets the Nehari manifold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NehariPoint<T> {
    pub t: T,
    /// `J(t u) = ⟨u,u⟩²_H / (4∫h u⁴)`, the maximum of `J` along the ray.
    pub energy: T,
}

/// Everything needed to evaluate the functional for one material on one discretization.
#[derive(Clone, Debug)]
pub struct Problem<T: Real> {
    spec: MaterialSpec<T>,
    grid: Arc<SpaceGrid<T>>,
    modes: ModeSet,
    regular: Arc<[usize]>,
    time: TimeGrid<T>,
    weights: ModeWeights<T>,
    ops: Vec<ModeOperator<T>>,
    h: Vec<T>,
}

impl<T: Real> Problem<T> {
    pub fn new(spec: MaterialSpec<T>, grid: Arc<SpaceGrid<T>>, modes: ModeSet, time: TimeGrid<T>) -> Result<Self> {
        if spec.geometry != grid.geometry() || spec.geometry != modes.geometry() {
            return Err(Error::InvalidConfig(format!(
                "geometry mismatch: material {}, grid {}, modes {}",
                spec.geometry,
                grid.geometry(),
                modes.geometry()
            )));
        }
        time.ensure_cubic_safe(modes.k_max())?;
        let regular = modes.regular_list();
        let weights = ModeWeights::new(&spec, &grid, &regular)?;
        for &k in regular.iter() {
            weights.mode_factor(k)?;
        }
        let ops = regular
            .iter()
            .map(|&k| ModeOperator::new(&grid, k, spec.omega(), weights.potential(k)?))
            .collect::<Result<Vec<_>>>()?;
        let h = grid.nodes().iter().map(|x| spec.h_at(x.to_f64_lossy())).collect();
        Ok(Self {
            spec,
            grid,
            modes,
            regular,
            time,
            weights,
            ops,
            h,
        })
    }

    /// Builds the regular set from the nonlinear kernel with the default threshold.
    pub fn with_cutoff(spec: MaterialSpec<T>, grid: Arc<SpaceGrid<T>>, k_max: usize, time: TimeGrid<T>) -> Result<Self> {
        let modes = regular_set(&spec.nu, k_max, DEFAULT_ZERO_TOL, spec.geometry)?;
        Self::new(spec, grid, modes, time)
    }

    pub fn spec(&self) -> &MaterialSpec<T> {
        &self.spec
    }

    pub fn grid(&self) -> &Arc<SpaceGrid<T>> {
        &self.grid
    }

    pub fn modes(&self) -> &ModeSet {
        &self.modes
    }

    pub fn regular(&self) -> &Arc<[usize]> {
        &self.regular
    }

    pub fn time(&self) -> &TimeGrid<T> {
        &self.time
    }

    pub fn weights(&self) -> &ModeWeights<T> {
        &self.weights
    }

    pub fn operators(&self) -> &[ModeOperator<T>] {
        &self.ops
    }

    pub fn operator(&self, k: usize) -> Option<&ModeOperator<T>> {
        self.regular.binary_search(&k).ok().map(|i| &self.ops[i])
    }

    /// `h` sampled at the grid nodes.
    pub fn h(&self) -> &[T] {
        &self.h
    }

    pub fn omega(&self) -> T {
        self.spec.omega()
    }

    pub fn zero_field(&self) -> Field<T> {
        Field::zeros(self.grid.clone(), self.regular.clone())
    }

    /// Same discretization with `h` replaced by `factor · h`.
    pub fn with_scaled_h(&self, factor: T) -> Self {
        Self {
            spec: self.spec.with_scaled_h(factor.to_f64_lossy()),
            h: self.h.iter().map(|&v| v * factor).collect(),
            ..self.clone()
        }
    }

    pub(crate) fn check(&self, u: &Field<T>) -> Result<()> {
        let same_grid = Arc::ptr_eq(u.grid(), &self.grid) || **u.grid() == *self.grid;
        if !same_grid || u.modes().as_ref() != self.regular.as_ref() {
            return Err(Error::ModeMismatch);
        }
        Ok(())
    }

    /// `⟨u,v⟩_H` with the potential weight.
    pub fn inner(&self, u: &Field<T>, v: &Field<T>) -> Result<T> {
        h_inner_product(u, v, &self.weights, InnerKind::Potential)
    }

    pub fn norm_sq(&self, u: &Field<T>) -> Result<T> {
        self.inner(u, u)
    }

    /// `∫ f g` over space × normalized torus, from time samples.
    pub fn sample_integral(&self, f: &TimeSamples<T>, weight: impl Fn(usize) -> T) -> T {
        let means = self.time.mean(f);
        means
            .iter()
            .zip(self.grid.weights())
            .enumerate()
            .map(|(j, (&m, &w))| w * weight(j) * m)
            .sum()
    }
}

/// `∫ h u⁴ d(x,t)`.
pub fn quartic_integral<T: Real>(p: &Problem<T>, u: &Field<T>) -> Result<T> {
    let s = p.time.synthesize(u)?;
    let s4 = s.map(|_, v| {
        let v2 = v * v;
        v2 * v2
    });
    Ok(p.sample_integral(&s4, |j| p.h[j]))
}

pub fn energy<T: Real>(p: &Problem<T>, u: &Field<T>) -> Result<EnergyBreakdown<T>> {
    p.check(u)?;
    let quad = p.norm_sq(u)?;
    let quart = quartic_integral(p, u)?;
    Ok(EnergyBreakdown::new(T::lit(0.5) * quad, T::lit(0.25) * quart))
}

/// `J'(u)[v] = ⟨u,v⟩_H − ∫ h u³ v`.
pub fn derivative<T: Real>(p: &Problem<T>, u: &Field<T>, v: &Field<T>) -> Result<T> {
    p.check(u)?;
    p.check(v)?;
    let su = p.time.synthesize(u)?;
    let sv = p.time.synthesize(v)?;
    let prod = TimeSamples {
        values: su.values.iter().zip(&sv.values).map(|(&a, &b)| a * a * a * b).collect(),
        ..su
    };
    Ok(p.inner(u, v)? - p.sample_integral(&prod, |j| p.h[j]))
}

/// `(h u³)^_k` on the given modes (analysis on the problem's time grid).
pub fn cubic_term<T: Real>(p: &Problem<T>, u: &Field<T>, modes: Arc<[usize]>) -> Result<Field<T>> {
    let s = p.time.synthesize(u)?;
    let hu3 = s.map(|j, v| p.h[j] * v * v * v);
    p.time.analyze(&hu3, p.grid.clone(), modes)
}

/// Riesz representative of `v ↦ ∫ f v` in `H`: `ω²k²ℱ_k[𝒩] op_k⁻¹ f̂_k` on each regular mode.
/// Modes of `f` outside `ℛ` are discarded.
pub fn lift<T: Real>(p: &Problem<T>, f: &Field<T>) -> Result<Field<T>> {
    let f = f.remapped(p.regular.clone());
    let omega = p.omega();
    let solved: Vec<Vec<Complex<T>>> = p
        .ops
        .par_iter()
        .enumerate()
        .map(|(i, op)| {
            let k = p.regular[i];
            let wk = omega * T::from_usize_lossy(k);
            let scale = wk * wk * p.weights.nu_coeff(k)?;
            let mut x = op.solve(f.profile(i))?;
            x.iter_mut().for_each(|c| *c = *c * scale);
            Ok(x)
        })
        .collect::<Result<_>>()?;
    let mut out = p.zero_field();
    for (i, x) in solved.into_iter().enumerate() {
        out.profile_mut(i).copy_from_slice(&x);
    }
    Ok(out)
}

/// `H`-gradient `g = u − lift(h u³)`, so that `⟨g, v⟩_H = J'(u)[v]`.
pub fn gradient<T: Real>(p: &Problem<T>, u: &Field<T>) -> Result<Field<T>> {
    p.check(u)?;
    let c = cubic_term(p, u, p.regular.clone())?;
    u.sub(&lift(p, &c)?)
}

/// Scaling `t⋆ = sqrt(⟨u,u⟩_H / ∫h u⁴)` onto the Nehari manifold.
pub fn nehari_scale<T: Real>(p: &Problem<T>, u: &Field<T>) -> Result<NehariPoint<T>> {
    p.check(u)?;
    let quad = p.norm_sq(u)?;
    let quart = quartic_integral(p, u)?;
    nehari_point(quad, quart)
}

pub(crate) fn nehari_point<T: Real>(quad: T, quart: T) -> Result<NehariPoint<T>> {
    if !(quart > T::zero()) {
        return Err(Error::NoPositiveQuartic(quart.to_f64_lossy()));
    }
    Ok(NehariPoint {
        t: (quad / quart).sqrt(),
        energy: quad * quad / (T::lit(4.0) * quart),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{builtin_nu_truncated_sine, CoefficientField, Geometry, LinearKernelField, Profile, Variant};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn problem(h: f64) -> Problem<f64> {
        let t = 2.0 * PI;
        let spec = MaterialSpec {
            geometry: Geometry::Slab,
            c: 0.8,
            period: t,
            linear: LinearKernelField::instantaneous(0.3, t, 8).unwrap(),
            h: CoefficientField::from_profile(Profile::Gaussian { amplitude: h, center: 0.0, width: 3.0 }),
            nu: builtin_nu_truncated_sine(t, 8).unwrap(),
            variant: Variant::Retarded,
            alpha: 2.0,
            beta: 2.0,
        };
        let grid = Arc::new(SpaceGrid::slab(64, 8.0).unwrap());
        Problem::with_cutoff(spec, grid, 6, TimeGrid::new(32).unwrap()).unwrap()
    }

    fn bump(p: &Problem<f64>) -> Field<f64> {
        Field::from_fn(p.grid().clone(), p.regular().clone(), |k, j| {
            let x = p.grid().nodes()[j];
            Complex::new((-x * x / 4.0).exp() / k as f64, 0.1 * x * (-x * x / 2.0).exp())
        })
    }

    #[test]
    fn zero_field_has_zero_energy() {
        let p = problem(1.0);
        let e = energy(&p, &p.zero_field()).unwrap();
        assert_eq!((e.quadratic, e.quartic, e.total), (0.0, 0.0, 0.0));
    }

    #[test]
    fn euler_identity() {
        let p = problem(1.0);
        let u = bump(&p);
        let e = energy(&p, &u).unwrap();
        let d = derivative(&p, &u, &u).unwrap();
        assert_relative_eq!(d, 2.0 * e.quadratic - 4.0 * e.quartic, max_relative = 1e-12);
    }

    #[test]
    fn nehari_point_properties() {
        let p = problem(1.0);
        let u = bump(&p);
        let n = nehari_scale(&p, &u).unwrap();
        let v = u.scaled(n.t);
        assert!(derivative(&p, &v, &u).unwrap().abs() < 1e-12 * p.norm_sq(&u).unwrap());
        assert_relative_eq!(energy(&p, &v).unwrap().total, n.energy, max_relative = 1e-12);
        let np = nehari_point(4.0, 1.0).unwrap();
        assert_eq!((np.t, np.energy), (2.0, 4.0));
    }

    #[test]
    fn negative_h_has_no_nehari_point() {
        let p = problem(-1.0);
        assert!(matches!(nehari_scale(&p, &bump(&p)), Err(Error::NoPositiveQuartic(_))));
    }

    #[test]
    fn gradient_without_nonlinearity_is_identity() {
        let p = problem(0.0);
        let u = bump(&p);
        let g = gradient(&p, &u).unwrap();
        assert_eq!(g, u);
    }
}
