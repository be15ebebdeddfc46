use num_complex::Complex;

use super::grid::SpaceGrid;
use crate::error::{Error, Result};
use crate::kernels::{Geometry, MaterialSpec};
use crate::scalar::Real;

/// Real tridiagonal matrix `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1]` acting on one
/// mode's complex profile: the discretization of `-∂ₓ² + ω²k²V_k` (slab) or
/// `-∂ᵣ² - (1/r)∂ᵣ + 1/r² + ω²k²V_k` (cylinder).
#[derive(Clone, Debug, PartialEq)]
pub struct ModeOperator<T> {
    pub k: usize,
    pub lower: Vec<T>,
    pub diag: Vec<T>,
    pub upper: Vec<T>,
}

/// Spatial part only (the `k = 0` operator with unit potential factor dropped).
fn stiffness<T: Real>(grid: &SpaceGrid<T>) -> (Vec<T>, Vec<T>, Vec<T>) {
    let n = grid.len();
    let h = grid.spacing();
    let h2 = h * h;
    match grid.geometry() {
        Geometry::Slab => {
            let off = -T::one() / h2;
            let mut lower = vec![off; n];
            let mut upper = vec![off; n];
            lower[0] = T::zero();
            upper[n - 1] = T::zero();
            (lower, vec![T::lit(2.0) / h2; n], upper)
        }
        Geometry::Cylindrical => {
            // (1/r²) ∂ᵣ r³ ∂ᵣ (u/r) with fluxes at cell faces e_j = jΔr; the outer face sits
            // half a cell from the last node, where u = 0.
            let r = grid.nodes();
            let face = |j: usize| {
                let e = T::from_usize_lossy(j) * h;
                e * e * e
            };
            let mut lower = vec![T::zero(); n];
            let mut diag = vec![T::zero(); n];
            let mut upper = vec![T::zero(); n];
            for j in 0..n {
                let scale = T::one() / (r[j] * r[j] * h2);
                let outer = if j + 1 < n { face(j + 1) } else { T::lit(2.0) * face(n) };
                let inner = face(j);
                diag[j] = scale * (outer + inner) / r[j];
                if j + 1 < n {
                    upper[j] = -scale * outer / r[j + 1];
                }
                if j > 0 {
                    lower[j] = -scale * inner / r[j - 1];
                }
            }
            (lower, diag, upper)
        }
    }
}

impl<T: Real> ModeOperator<T> {
    /// Operator for mode `k` with potential samples `V_k(x_j)`; requires `V_k > 0`.
    pub fn new(grid: &SpaceGrid<T>, k: usize, omega: T, potential: &[T]) -> Result<Self> {
        assert_eq!(potential.len(), grid.len());
        let (lower, mut diag, upper) = stiffness(grid);
        let wk = omega * T::from_usize_lossy(k);
        let wk2 = wk * wk;
        for (j, (d, &v)) in diag.iter_mut().zip(potential).enumerate() {
            if !(v > T::zero()) {
                return Err(Error::NonElliptic {
                    k,
                    x: grid.nodes()[j].to_f64_lossy(),
                    value: v.to_f64_lossy(),
                });
            }
            *d += wk2 * v;
        }
        Ok(Self { k, lower, diag, upper })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.len();
        assert_eq!(x.len(), n);
        (0..n)
            .map(|i| {
                let mut y = x[i] * self.diag[i];
                if i > 0 {
                    y = y + x[i - 1] * self.lower[i];
                }
                if i + 1 < n {
                    y = y + x[i + 1] * self.upper[i];
                }
                y
            })
            .collect()
    }

    /// Thomas algorithm. The matrix is diagonally similar to a symmetric positive definite
    /// one whenever the potential is positive, so elimination without pivoting is stable.
    pub fn solve(&self, rhs: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let n = self.len();
        assert_eq!(rhs.len(), n);
        let scale = self.diag.iter().fold(T::zero(), |m, d| m.max(d.abs()));
        let tiny = scale * T::EPS * T::lit(16.0);
        let mut c = vec![T::zero(); n];
        let mut d = vec![Complex::new(T::zero(), T::zero()); n];
        let mut pivot = self.diag[0];
        if !(pivot.abs() > tiny) {
            return Err(Error::SingularOperator { row: 0 });
        }
        c[0] = self.upper[0] / pivot;
        d[0] = rhs[0] / pivot;
        for i in 1..n {
            pivot = self.diag[i] - self.lower[i] * c[i - 1];
            if !(pivot.abs() > tiny) || !pivot.is_finite() {
                return Err(Error::SingularOperator { row: i });
            }
            c[i] = self.upper[i] / pivot;
            d[i] = (rhs[i] - d[i - 1] * self.lower[i]) / pivot;
        }
        for i in (0..n - 1).rev() {
            d[i] = d[i] - d[i + 1] * c[i];
        }
        Ok(d)
    }
}

/// Samples `V_k = 1/c² − 1 − ℱ_k[𝒢(x_j)]` on the grid.
pub fn sample_potential<T: Real>(spec: &MaterialSpec<T>, grid: &SpaceGrid<T>, k: usize) -> Result<Vec<T>> {
    grid.nodes()
        .iter()
        .map(|x| spec.potential(k as i64, x.to_f64_lossy()))
        .collect()
}

pub fn build_mode_operator<T: Real>(spec: &MaterialSpec<T>, grid: &SpaceGrid<T>, k: usize) -> Result<ModeOperator<T>> {
    let v = sample_potential(spec, grid, k)?;
    ModeOperator::new(grid, k, spec.omega(), &v)
}

pub fn solve_mode_operator<T: Real>(op: &ModeOperator<T>, rhs: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    op.solve(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn c(x: f64) -> Complex<f64> {
        Complex::new(x, 0.0)
    }

    #[test]
    fn slab_sine_is_eigenvector() {
        let l = 3.0;
        let g = SpaceGrid::<f64>::slab(64, l).unwrap();
        let (omega, k, v) = (0.7, 2, 0.3);
        let op = ModeOperator::new(&g, k, omega, &vec![v; g.len()]).unwrap();
        let m = 3.0;
        let x: Vec<_> = g.nodes().iter().map(|&x| c((PI * m * (x + l) / (2.0 * l)).sin())).collect();
        let dx = g.spacing();
        let lambda = 4.0 / (dx * dx) * (PI * m * dx / (4.0 * l)).sin().powi(2) + (omega * k as f64).powi(2) * v;
        let y = op.apply(&x);
        for (a, b) in y.iter().zip(&x) {
            assert_relative_eq!(a.re, lambda * b.re, epsilon = 1e-10, max_relative = 1e-10);
        }
        let s = op.solve(&x).unwrap();
        for (a, b) in s.iter().zip(&x) {
            assert_relative_eq!(a.re, b.re / lambda, epsilon = 1e-13);
        }
    }

    #[test]
    fn nonelliptic_potential_is_rejected() {
        let g = SpaceGrid::<f64>::slab(16, 1.0).unwrap();
        let mut v = vec![1.0; g.len()];
        v[4] = -0.1;
        assert!(matches!(ModeOperator::new(&g, 1, 1.0, &v), Err(Error::NonElliptic { k: 1, .. })));
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let g = SpaceGrid::<f64>::cylindrical(16, 2.0).unwrap();
        let op = ModeOperator::new(&g, 1, 1.0, &vec![0.5; g.len()]).unwrap();
        assert!(op.solve(&vec![c(0.0); g.len()]).unwrap().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn singular_pivot_detected() {
        let op = ModeOperator {
            k: 1,
            lower: vec![0.0, 1.0],
            diag: vec![1.0, 1.0],
            upper: vec![1.0, 0.0],
        };
        assert!(matches!(op.solve(&[c(1.0), c(1.0)]), Err(Error::SingularOperator { row: 1 })));
    }
}
