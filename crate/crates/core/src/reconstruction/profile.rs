use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::discretization::{build_mode_operator, Field, TimeGrid};
use crate::error::Result;
use crate::functional::Problem;
use crate::kernels::{regular_set, MaterialSpec, Variant, DEFAULT_ZERO_TOL};
use crate::scalar::Real;

/// Physical profile `w = w₁ + w₂` split into its regular and singular parts.
#[derive(Clone, Debug)]
pub struct ProfilePair<T> {
    /// Component on the regular modes.
    pub w1: Field<T>,
    /// Component on the singular modes (empty mode list when there is none).
    pub w2: Field<T>,
    pub variant: Variant,
}

/// Extra numbers recorded next to the reconstructed profile.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ProfileStats {
    pub singular_modes: Vec<usize>,
    pub w2_max_abs: f64,
    pub time_samples: usize,
}

impl<T: Real> ProfilePair<T> {
    /// `w = w₁ + w₂` on the union of both mode lists.
    pub fn combined(&self) -> Field<T> {
        let mut modes: Vec<usize> = self.w1.modes().iter().chain(self.w2.modes().iter()).copied().collect();
        modes.sort_unstable();
        modes.dedup();
        let modes: Arc<[usize]> = modes.into();
        let a = self.w1.remapped(modes.clone());
        let b = self.w2.remapped(modes);
        a.axpy(T::one(), &b).expect("remapped fields share a layout")
    }

    /// `𝒩 ∗ w` for variant (ii) (the surrogate), or `w` itself for variant (i).
    pub fn surrogate(&self, spec: &MaterialSpec<T>) -> Result<Field<T>> {
        match self.variant {
            Variant::Retarded => Ok(self.w1.clone()),
            Variant::RetardedField => {
                let mut out = self.w1.clone();
                for (i, &k) in self.w1.modes().clone().iter().enumerate() {
                    let f = spec.nu_coeff(k as i64)?;
                    out.profile_mut(i).iter_mut().for_each(|c| *c = *c * f);
                }
                Ok(out)
            }
        }
    }

    pub fn stats(&self, time_samples: usize) -> ProfileStats {
        ProfileStats {
            singular_modes: self.w2.modes().to_vec(),
            w2_max_abs: self.w2.max_abs().to_f64_lossy(),
            time_samples,
        }
    }
}

/// Recovers the physical profile from the surrogate `u`.
///
/// Variant (i) returns `w = u`. Variant (ii) divides by `ℱ_k[𝒩]` on the regular modes and
/// solves `op_k ŵ₂_k = ω²k² (h u³)^_k` on every admissible mode up to `k_sing` (default `3K`)
/// with `ℱ_k[𝒩] = 0`. The cube is analyzed on a grid of at least `6K + 1` samples so that
/// all modes up to `3K` are exact.
pub fn profile_from_u<T: Real>(p: &Problem<T>, u: &Field<T>, k_sing: Option<usize>) -> Result<ProfilePair<T>> {
    p.check(u)?;
    let spec = p.spec();
    let grid = p.grid().clone();
    match spec.variant {
        Variant::Retarded => Ok(ProfilePair {
            w1: u.clone(),
            w2: Field::zeros(grid, Arc::from(Vec::new())),
            variant: Variant::Retarded,
        }),
        Variant::RetardedField => {
            let k_top = p.modes().k_max();
            let k_sing = k_sing.unwrap_or(3 * k_top);
            let mut w1 = u.clone();
            for (i, &k) in u.modes().clone().iter().enumerate() {
                let f = p.weights().nu_coeff(k)?;
                w1.profile_mut(i).iter_mut().for_each(|c| *c = *c / f);
            }
            // Modes above the cutoff where ℱ_k[𝒩] ≠ 0 are truncated, not singular.
            let full = regular_set(&spec.nu, k_sing.max(k_top), DEFAULT_ZERO_TOL, spec.geometry)?;
            let singular: Arc<[usize]> = full.singular(k_sing).into();
            let mut w2 = Field::zeros(grid.clone(), singular.clone());
            if !singular.is_empty() {
                let band = u.modes().last().copied().unwrap_or(0);
                let need = (2 * k_sing.max(band) + 1).max(6 * band + 1);
                let local;
                let tg = if p.time().len() >= need {
                    p.time()
                } else {
                    local = TimeGrid::new(need)?;
                    &local
                };
                let s = tg.synthesize(u)?;
                let h = p.h();
                let cube = tg.analyze(&s.map(|j, v| h[j] * v * v * v), grid.clone(), singular.clone())?;
                let omega = p.omega();
                for (i, &k) in singular.iter().enumerate() {
                    let op = build_mode_operator(spec, &grid, k)?;
                    let wk = omega * T::from_usize_lossy(k);
                    let rhs: Vec<Complex<T>> = cube.profile(i).iter().map(|&c| c * (wk * wk)).collect();
                    let x = op.solve(&rhs)?;
                    w2.profile_mut(i).copy_from_slice(&x);
                }
            }
            Ok(ProfilePair {
                w1,
                w2,
                variant: Variant::RetardedField,
            })
        }
    }
}

/// `W = ∂ₜ⁻¹ w`: `Ŵ_k = ŵ_k / (iωk)` on every stored mode.
pub fn time_antiderivative<T: Real>(w: &Field<T>, omega: T) -> Field<T> {
    let mut out = w.clone();
    for (i, &k) in w.modes().clone().iter().enumerate() {
        let d = Complex::new(T::zero(), omega * T::from_usize_lossy(k));
        out.profile_mut(i).iter_mut().for_each(|c| *c = *c / d);
    }
    out
}

/// Checks that the linear kernel and `𝒩` provide coefficients up to `k`.
pub(crate) fn ensure_kernel_range<T: Real>(spec: &MaterialSpec<T>, k: usize) -> Result<()> {
    spec.nu.try_coeff(k as i64)?;
    for t in &spec.linear.terms {
        t.kernel.try_coeff(k as i64)?;
    }
    Ok(())
}
