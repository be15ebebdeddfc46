use num_complex::Complex;

use super::field::Field;
use super::grid::SpaceGrid;
use super::modes::ModeSet;
use super::operator::sample_potential;
use crate::error::{Error, Result};
use crate::kernels::{Geometry, MaterialSpec};
use crate::scalar::Real;

/// Which spatial weight enters the zeroth-order term of the `H` inner product.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InnerKind {
    /// `W_k ≡ 1`.
    Plain,
    /// `W_k = V_k(x)`; this is the inner product the energy is built on.
    Potential,
}

/// Per-mode data entering the `H` inner product: `ℱ_k[𝒩]` and sampled `V_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeWeights<T> {
    omega: T,
    modes: Vec<usize>,
    nu: Vec<T>,
    potential: Vec<Vec<T>>,
}

impl<T: Real> ModeWeights<T> {
    pub fn new(spec: &MaterialSpec<T>, grid: &SpaceGrid<T>, modes: &[usize]) -> Result<Self> {
        let nu = modes.iter().map(|&k| spec.nu_coeff(k as i64)).collect::<Result<_>>()?;
        let potential = modes
            .iter()
            .map(|&k| sample_potential(spec, grid, k))
            .collect::<Result<_>>()?;
        Ok(Self {
            omega: spec.omega(),
            modes: modes.to_vec(),
            nu,
            potential,
        })
    }

    pub fn omega(&self) -> T {
        self.omega
    }

    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    fn index(&self, k: usize) -> Result<usize> {
        self.modes.binary_search(&k).map_err(|_| Error::ModeMismatch)
    }

    pub fn nu_coeff(&self, k: usize) -> Result<T> {
        Ok(self.nu[self.index(k)?])
    }

    pub fn potential(&self, k: usize) -> Result<&[T]> {
        Ok(&self.potential[self.index(k)?])
    }

    /// Smallest and largest sampled `V_k` over all modes.
    pub fn potential_range(&self) -> (T, T) {
        self.potential.iter().flatten().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// `2 / (ω²k²ℱ_k[𝒩])`: the weight of mode `k` (counting `±k`).
    pub fn mode_factor(&self, k: usize) -> Result<T> {
        let f = self.nu_coeff(k)?;
        if !(f > T::zero()) {
            return Err(Error::NonpositiveKernel {
                k,
                value: f.to_f64_lossy(),
            });
        }
        let wk = self.omega * T::from_usize_lossy(k);
        Ok(T::lit(2.0) / (wk * wk * f))
    }
}

/// Discrete Dirichlet form, written edge by edge so that it equals `⟨A a, b⟩_w` for the
/// stiffness part `A` of the mode operators.
///
/// Slab: `Σ_e (a_{e+1} − a_e) conj(b_{e+1} − b_e) / Δx` with zero boundary values.
/// Cylinder: the same for `φ = a/r` with edge weights `r_e³`, which is the `r dr`
/// form of `|∂ᵣa|² + |a|²/r²`.
pub fn stiffness_form<T: Real>(grid: &SpaceGrid<T>, a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    let n = grid.len();
    let h = grid.spacing();
    let mut acc = Complex::new(T::zero(), T::zero());
    match grid.geometry() {
        Geometry::Slab => {
            let at = |v: &[Complex<T>], i: isize| {
                if i < 0 || i as usize >= n {
                    Complex::new(T::zero(), T::zero())
                } else {
                    v[i as usize]
                }
            };
            for e in 0..=n as isize {
                let da = at(a, e) - at(a, e - 1);
                let db = at(b, e) - at(b, e - 1);
                acc = acc + da * db.conj();
            }
            acc / h
        }
        Geometry::Cylindrical => {
            let r = grid.nodes();
            let phi = |v: &[Complex<T>], j: usize| v[j] / r[j];
            for e in 1..n {
                let re = T::from_usize_lossy(e) * h;
                let da = phi(a, e) - phi(a, e - 1);
                let db = phi(b, e) - phi(b, e - 1);
                acc = acc + da * db.conj() * (re * re * re);
            }
            let big_r = grid.extent();
            acc = acc + phi(a, n - 1) * phi(b, n - 1).conj() * (T::lit(2.0) * big_r * big_r * big_r);
            acc / h
        }
    }
}

/// `Σ_j w_j W_j a_j conj(b_j)`, with `W ≡ 1` when `weight` is `None`.
pub fn weighted_mass<T: Real>(grid: &SpaceGrid<T>, a: &[Complex<T>], b: &[Complex<T>], weight: Option<&[T]>) -> Complex<T> {
    let w = grid.weights();
    let mut acc = Complex::new(T::zero(), T::zero());
    for j in 0..a.len() {
        let s = match weight {
            Some(v) => w[j] * v[j],
            None => w[j],
        };
        acc = acc + a[j] * b[j].conj() * s;
    }
    acc
}

/// `Σ_{k} 2/(ω²k²ℱ_k[𝒩]) · Re[ S(û_k, v̂_k) + ω²k² Σ_j w_j W_k(x_j) û_k conj(v̂_k) ]`.
pub fn h_inner_product<T: Real>(u: &Field<T>, v: &Field<T>, weights: &ModeWeights<T>, kind: InnerKind) -> Result<T> {
    u.ensure_same_layout(v)?;
    let grid = u.grid();
    let mut total = T::zero();
    for ((k, a), (_, b)) in u.iter_modes().zip(v.iter_modes()) {
        let factor = weights.mode_factor(k)?;
        let wk = weights.omega() * T::from_usize_lossy(k);
        let pot = match kind {
            InnerKind::Plain => None,
            InnerKind::Potential => Some(weights.potential(k)?),
        };
        let s = stiffness_form(grid, a, b) + weighted_mass(grid, a, b, pot) * (wk * wk);
        total += factor * s.re;
    }
    Ok(total)
}

/// `P_ℛ u`: keeps the regular modes (missing ones become zero).
pub fn project_regular<T: Real>(u: &Field<T>, modes: &ModeSet) -> Field<T> {
    u.remapped(modes.regular_list())
}

/// `P_𝔖 u`: the modes of `u` outside `ℛ`.
pub fn project_singular<T: Real>(u: &Field<T>, modes: &ModeSet) -> Field<T> {
    let singular: Vec<usize> = u.modes().iter().copied().filter(|&k| !modes.contains(k as i64)).collect();
    u.remapped(singular.into())
}

/// Fourier multiplier `|ωk|^s`.
pub fn fractional_time_derivative<T: Real>(u: &Field<T>, s: T, omega: T) -> Field<T> {
    let mut out = u.clone();
    let modes = out.modes().clone();
    for (i, &k) in modes.iter().enumerate() {
        let m = (omega * T::from_usize_lossy(k)).abs().powf(s);
        out.profile_mut(i).iter_mut().for_each(|c| *c = *c * m);
    }
    out
}
