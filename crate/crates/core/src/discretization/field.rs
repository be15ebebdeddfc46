use std::sync::Arc;

use num_complex::Complex;

use super::grid::SpaceGrid;
use super::modes::ModeSet;
use crate::error::{Error, Result};
use crate::kernels::Geometry;
use crate::scalar::Real;

/// A real, time-periodic field stored as complex spatial profiles `û_k(x_j)` for a
/// strictly increasing list of positive modes `k`; `û_{-k} = conj(û_k)` is implied.
#[derive(Clone, Debug)]
pub struct Field<T> {
    grid: Arc<SpaceGrid<T>>,
    modes: Arc<[usize]>,
    data: Vec<Complex<T>>,
}

impl<T: Real> PartialEq for Field<T> {
    fn eq(&self, other: &Self) -> bool {
        self.same_layout(other) && self.data == other.data
    }
}

impl<T: Real> Field<T> {
    /// Zero field on the given modes.
    ///
    /// # Panics
    /// If the modes are not strictly increasing and positive, or if an even mode is
    /// requested on a cylindrical grid.
    pub fn zeros(grid: Arc<SpaceGrid<T>>, modes: Arc<[usize]>) -> Self {
        assert!(
            modes.first().map_or(true, |&k| k > 0) && modes.windows(2).all(|w| w[0] < w[1]),
            "field modes must be positive and strictly increasing: {modes:?}"
        );
        if grid.geometry() == Geometry::Cylindrical {
            assert!(
                modes.iter().all(|k| k % 2 == 1),
                "cylindrical fields carry odd modes only: {modes:?}"
            );
        }
        let data = vec![Complex::new(T::zero(), T::zero()); modes.len() * grid.len()];
        Self { grid, modes, data }
    }

    pub fn regular_zeros(grid: Arc<SpaceGrid<T>>, modes: &ModeSet) -> Self {
        Self::zeros(grid, modes.regular_list())
    }

    /// Field whose profile for mode `k` at node `j` is `f(k, j)`.
    pub fn from_fn(grid: Arc<SpaceGrid<T>>, modes: Arc<[usize]>, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut out = Self::zeros(grid, modes);
        let n = out.grid.len();
        for (i, &k) in out.modes.clone().iter().enumerate() {
            for j in 0..n {
                out.data[i * n + j] = f(k, j);
            }
        }
        out
    }

    pub fn grid(&self) -> &Arc<SpaceGrid<T>> {
        &self.grid
    }

    pub fn modes(&self) -> &Arc<[usize]> {
        &self.modes
    }

    pub fn nodes(&self) -> usize {
        self.grid.len()
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    pub fn mode_index(&self, k: usize) -> Option<usize> {
        self.modes.binary_search(&k).ok()
    }

    /// Profile of the `i`-th stored mode.
    pub fn profile(&self, i: usize) -> &[Complex<T>] {
        let n = self.grid.len();
        &self.data[i * n..(i + 1) * n]
    }

    pub fn profile_mut(&mut self, i: usize) -> &mut [Complex<T>] {
        let n = self.grid.len();
        &mut self.data[i * n..(i + 1) * n]
    }

    /// Profile of mode `k`, if stored.
    pub fn mode(&self, k: usize) -> Option<&[Complex<T>]> {
        self.mode_index(k).map(|i| self.profile(i))
    }

    pub fn iter_modes(&self) -> impl Iterator<Item = (usize, &[Complex<T>])> {
        let n = self.grid.len();
        self.modes.iter().copied().zip(self.data.chunks(n.max(1)))
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    pub fn same_layout(&self, other: &Self) -> bool {
        self.same_grid(other) && (Arc::ptr_eq(&self.modes, &other.modes) || self.modes == other.modes)
    }

    pub fn ensure_same_layout(&self, other: &Self) -> Result<()> {
        if self.same_layout(other) {
            Ok(())
        } else {
            Err(Error::ModeMismatch)
        }
    }

    pub fn scaled(&self, s: T) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|c| *c = *c * s);
        out
    }

    /// `self + s · other`.
    pub fn axpy(&self, s: T, other: &Self) -> Result<Self> {
        self.ensure_same_layout(other)?;
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a = *a + *b * s;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-T::one(), other)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, c| m.max(c.norm()))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.re.is_zero() && c.im.is_zero())
    }

    /// Copy onto another mode list: shared modes are kept, the rest are zero.
    pub fn remapped(&self, modes: Arc<[usize]>) -> Self {
        let grid = self.grid.clone();
        let mut out = Self::zeros(grid, modes);
        let n = self.grid.len();
        for i in 0..out.modes.len() {
            if let Some(src) = self.mode_index(out.modes[i]) {
                out.data[i * n..(i + 1) * n].copy_from_slice(self.profile(src));
            }
        }
        out
    }

    /// `Σ_{k} pair(k) Σ_j w_j |û_k(x_j)|²`: the squared `L²` norm over space × normalized torus.
    pub fn l2_norm_sq(&self) -> T {
        let two = T::lit(2.0);
        let w = self.grid.weights();
        self.iter_modes()
            .map(|(_, p)| two * p.iter().zip(w).map(|(c, &wj)| wj * c.norm_sqr()).sum::<T>())
            .sum()
    }

    pub fn l2_inner(&self, other: &Self) -> Result<T> {
        self.ensure_same_layout(other)?;
        let two = T::lit(2.0);
        let w = self.grid.weights();
        let n = self.grid.len();
        Ok(self
            .data
            .chunks(n.max(1))
            .zip(other.data.chunks(n.max(1)))
            .map(|(a, b)| {
                two * a
                    .iter()
                    .zip(b)
                    .zip(w)
                    .map(|((x, y), &wj)| wj * (x.re * y.re + x.im * y.im))
                    .sum::<T>()
            })
            .sum())
    }

    /// Lossless widening to `f64` (used for output).
    pub fn to_f64(&self) -> Field<f64> {
        let g = &*self.grid;
        let grid = Arc::new(SpaceGrid::<f64>::new(g.geometry(), g.cells(), g.extent().to_f64_lossy()).expect("valid grid"));
        let mut out = Field::zeros(grid, self.modes.clone());
        for (o, c) in out.data.iter_mut().zip(&self.data) {
            *o = Complex::new(c.re.to_f64_lossy(), c.im.to_f64_lossy());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Arc<SpaceGrid<f64>> {
        Arc::new(SpaceGrid::slab(16, 4.0).unwrap())
    }

    #[test]
    fn remap_keeps_shared_modes() {
        let f = Field::from_fn(grid(), vec![1, 3].into(), |k, j| Complex::new((k * 100 + j) as f64, 0.0));
        let g = f.remapped(vec![2, 3].into());
        assert!(g.mode(2).unwrap().iter().all(|c| c.re == 0.0));
        assert_eq!(g.mode(3).unwrap(), f.mode(3).unwrap());
    }

    #[test]
    fn axpy_requires_matching_layout() {
        let a = Field::zeros(grid(), vec![1].into());
        let b = Field::zeros(grid(), vec![2].into());
        assert!(matches!(a.axpy(1.0, &b), Err(Error::ModeMismatch)));
    }

    #[test]
    #[should_panic(expected = "odd modes")]
    fn cylindrical_even_mode_panics() {
        let g = Arc::new(SpaceGrid::<f64>::cylindrical(16, 4.0).unwrap());
        let _ = Field::zeros(g, vec![2].into());
    }
}
