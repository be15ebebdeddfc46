use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::field::Field;
use super::grid::SpaceGrid;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `M` equispaced samples `t_m = mT/M` on the time torus, with cached FFT plans.
#[derive(Clone)]
pub struct TimeGrid<T: Real> {
    samples: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> std::fmt::Debug for TimeGrid<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TimeGrid").field("samples", &self.samples).finish()
    }
}

/// Real samples `u(x_j, t_m)` stored node-major: index `j * M + m`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSamples<T> {
    pub nodes: usize,
    pub samples: usize,
    pub values: Vec<T>,
}

impl<T: Real> TimeSamples<T> {
    pub fn at(&self, j: usize) -> &[T] {
        &self.values[j * self.samples..(j + 1) * self.samples]
    }

    pub fn map(&self, f: impl Fn(usize, T) -> T) -> Self {
        let m = self.samples;
        Self {
            values: self.values.iter().enumerate().map(|(i, &v)| f(i / m, v)).collect(),
            ..*self
        }
    }
}

impl<T: Real> TimeGrid<T> {
    pub fn new(samples: usize) -> Result<Self> {
        if samples < 3 {
            return Err(Error::InvalidGrid(format!("need at least 3 time samples, got {samples}")));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            samples,
            forward: planner.plan_fft_forward(samples),
            inverse: planner.plan_fft_inverse(samples),
        })
    }

    /// Smallest grid on which cubes of degree-`k_max` fields are analyzed exactly.
    pub fn cubic_safe(k_max: usize) -> Result<Self> {
        Self::new(4 * k_max + 1)
    }

    pub fn len(&self) -> usize {
        self.samples
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Highest mode represented without aliasing.
    pub fn nyquist(&self) -> usize {
        (self.samples - 1) / 2
    }

    /// Fails with `AliasRisk` unless `M ≥ 4K + 1`.
    pub fn ensure_cubic_safe(&self, k_max: usize) -> Result<()> {
        let required = 4 * k_max + 1;
        if self.samples < required {
            return Err(Error::AliasRisk {
                samples: self.samples,
                k_max,
                required,
            });
        }
        Ok(())
    }

    pub fn times(&self, period: T) -> Vec<T> {
        let m = T::from_usize_lossy(self.samples);
        (0..self.samples).map(|i| period * T::from_usize_lossy(i) / m).collect()
    }

    fn check_band(&self, modes: &[usize]) -> Result<()> {
        match modes.last() {
            Some(&k) if k > self.nyquist() => Err(Error::AliasRisk {
                samples: self.samples,
                k_max: k,
                required: 2 * k + 1,
            }),
            _ => Ok(()),
        }
    }

    /// `u(x_j, t_m) = Σ_k û_k(x_j) e^{ikωt_m}` summed over `±k`.
    pub fn synthesize(&self, u: &Field<T>) -> Result<TimeSamples<T>> {
        self.check_band(u.modes())?;
        let n = u.nodes();
        let m = self.samples;
        let zero = Complex::new(T::zero(), T::zero());
        let mut buf = vec![zero; m];
        let mut scratch = vec![zero; self.inverse.get_inplace_scratch_len()];
        let mut values = vec![T::zero(); n * m];
        for j in 0..n {
            buf.iter_mut().for_each(|c| *c = zero);
            for (k, p) in u.iter_modes() {
                buf[k] = p[j];
                buf[m - k] = p[j].conj();
            }
            self.inverse.process_with_scratch(&mut buf, &mut scratch);
            for (dst, c) in values[j * m..(j + 1) * m].iter_mut().zip(&buf) {
                *dst = c.re;
            }
        }
        Ok(TimeSamples {
            nodes: n,
            samples: m,
            values,
        })
    }

    /// Coefficients `û_k = (1/M) Σ_m u(t_m) e^{-ikωt_m}` for the requested modes.
    pub fn analyze(&self, samples: &TimeSamples<T>, grid: Arc<SpaceGrid<T>>, modes: Arc<[usize]>) -> Result<Field<T>> {
        if samples.samples != self.samples || samples.nodes != grid.len() {
            return Err(Error::ModeMismatch);
        }
        self.check_band(&modes)?;
        let n = grid.len();
        let m = self.samples;
        let scale = T::one() / T::from_usize_lossy(m);
        let zero = Complex::new(T::zero(), T::zero());
        let mut buf = vec![zero; m];
        let mut scratch = vec![zero; self.forward.get_inplace_scratch_len()];
        let mut out = Field::zeros(grid, modes);
        let modes = out.modes().clone();
        for j in 0..n {
            for (c, &v) in buf.iter_mut().zip(samples.at(j)) {
                *c = Complex::new(v, T::zero());
            }
            self.forward.process_with_scratch(&mut buf, &mut scratch);
            for (i, &k) in modes.iter().enumerate() {
                out.profile_mut(i)[j] = buf[k] * scale;
            }
        }
        Ok(out)
    }

    /// Time mean `(1/M) Σ_m f(t_m)` at each node (the `k = 0` coefficient).
    pub fn mean(&self, samples: &TimeSamples<T>) -> Vec<T> {
        let scale = T::one() / T::from_usize_lossy(samples.samples);
        (0..samples.nodes).map(|j| samples.at(j).iter().copied().sum::<T>() * scale).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn grid() -> Arc<SpaceGrid<f64>> {
        Arc::new(SpaceGrid::slab(8, 1.0).unwrap())
    }

    #[test]
    fn single_mode_synthesizes_cosine() {
        // Re e₂ ⇔ û₂ = ½
        let u = Field::from_fn(grid(), vec![2].into(), |_, _| Complex::new(0.5, 0.0));
        let tg = TimeGrid::new(17).unwrap();
        let s = tg.synthesize(&u).unwrap();
        for m in 0..17 {
            let t = 2.0 * PI * m as f64 / 17.0;
            assert_abs_diff_eq!(s.at(3)[m], (2.0 * t).cos(), epsilon = 1e-14);
        }
    }

    #[test]
    fn cube_of_cosine() {
        let k_max = 3;
        let tg = TimeGrid::cubic_safe(k_max).unwrap();
        let u = Field::from_fn(grid(), vec![1].into(), |_, _| Complex::new(0.5, 0.0));
        let s = tg.synthesize(&u).unwrap().map(|_, v| v * v * v);
        let c = tg.analyze(&s, grid(), vec![1, 2, 3].into()).unwrap();
        // cos³ = (3 cos θ + cos 3θ)/4, i.e. cosine amplitudes 3/4 and 1/4
        assert_abs_diff_eq!(2.0 * c.mode(1).unwrap()[0].re, 0.75, epsilon = 1e-14);
        assert_abs_diff_eq!(2.0 * c.mode(3).unwrap()[0].re, 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(c.mode(2).unwrap()[0].norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn alias_guard() {
        let tg = TimeGrid::<f64>::new(12).unwrap();
        assert!(matches!(tg.ensure_cubic_safe(3), Err(Error::AliasRisk { required: 13, .. })));
        let u = Field::zeros(grid(), vec![6].into());
        assert!(tg.synthesize(&u).is_err());
    }
}
