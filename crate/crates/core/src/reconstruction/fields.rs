use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::profile::{ensure_kernel_range, ProfilePair};
use super::spline::CubicSpline;
use crate::error::{Error, Result};
use crate::kernels::{Geometry, MaterialSpec, Variant};
use crate::scalar::Real;

/// Tensor-product evaluation lattice. In slab geometry `ys` is usually `[0.0]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lattice {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub zs: Vec<f64>,
    pub ts: Vec<f64>,
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

impl Lattice {
    /// `nx` transverse points on `[-half, half]` (times `ny` in cylindrical geometry),
    /// `nz` points per spatial period `cT` and `nt` points per time period, both starting at 0.
    pub fn periodic(
        geometry: Geometry,
        half: f64,
        nx: usize,
        nz: usize,
        nt: usize,
        c: f64,
        period: f64,
    ) -> Self {
        let ys = match geometry {
            Geometry::Slab => vec![0.0],
            Geometry::Cylindrical => linspace(-half, half, nx),
        };
        Self {
            xs: linspace(-half, half, nx),
            ys,
            zs: (0..nz).map(|i| c * period * i as f64 / nz as f64).collect(),
            ts: (0..nt).map(|i| period * i as f64 / nt as f64).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.xs.len() * self.ys.len() * self.zs.len() * self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Unit conventions of the exported fields.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub c0: f64,
    pub eps0: f64,
    pub mu0: f64,
}

impl Default for Normalization {
    fn default() -> Self {
        Self {
            c0: 1.0,
            eps0: 1.0,
            mu0: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    /// `(x, y, z, t)`.
    pub position: [f64; 4],
    pub e: [f64; 3],
    pub b: [f64; 3],
    pub d: [f64; 3],
    pub h: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EMFieldSet {
    pub geometry: Geometry,
    pub c: f64,
    pub period: f64,
    pub normalization: Normalization,
    pub lattice: Lattice,
    pub samples: Vec<FieldSample>,
}

pub const CSV_HEADER: [&str; 16] = [
    "x", "y", "z", "t", "Ex", "Ey", "Ez", "Bx", "By", "Bz", "Dx", "Dy", "Dz", "Hx", "Hy", "Hz",
];

impl EMFieldSet {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for s in &self.samples {
            let row = s.position.iter().chain(&s.e).chain(&s.b).chain(&s.d).chain(&s.h);
            w.write_record(row.map(|v| format!("{v:.17e}")))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    /// Largest `|E·(x, y)|` over the lattice; zero for a purely azimuthal field.
    pub fn radial_e_component(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| (s.e[0] * s.position[0] + s.e[1] * s.position[1]).abs())
            .fold(0.0, f64::max)
    }
}

/// Complex mode coefficients of every scalar field quantity at one transverse point.
#[derive(Clone, Debug)]
struct PointSpectrum {
    /// Mode numbers `1..=top`.
    top: usize,
    /// Slab: `ŵ_k`. Cylinder: `ŵ_k / r`.
    e: Vec<Complex64>,
    /// Slab: `ŵ'_k`. Cylinder: `Ŵ_k / r + Ŵ_{k,r}` (the axial magnetic amplitude, up to sign).
    bz: Vec<Complex64>,
    /// Slab: `D̂_k`. Cylinder: `D̂_k / r`.
    d: Vec<Complex64>,
}

/// `Σ_k 2 Re(ĉ_k e^{ikωτ})`.
fn synth(coeffs: &[Complex64], omega: f64, tau: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let ph = Complex64::from_polar(1.0, omega * (i + 1) as f64 * tau);
            2.0 * (c * ph).re
        })
        .sum()
}

/// Evaluates `E, B, D, H` anywhere in space-time from a reconstructed profile.
///
/// Mode profiles are interpolated with natural cubic splines between grid nodes (with the
/// homogeneous boundary values appended); the cylindrical interpolant acts on the even
/// extension of `w/r`, which keeps the fields smooth on the axis.
#[derive(Clone, Debug)]
pub struct FieldEvaluator {
    geometry: Geometry,
    c: f64,
    omega: f64,
    period: f64,
    variant: Variant,
    spec: MaterialSpec<f64>,
    /// Modes carried by `w`, with their splines.
    modes: Vec<usize>,
    splines: Vec<CubicSpline>,
    /// Modes of the base field whose cube enters `N(w)` (`w` for (i), `𝒩∗w` for (ii)).
    base_top: usize,
    top: usize,
    extent: f64,
}

fn spec_to_f64<T: Real>(spec: &MaterialSpec<T>) -> MaterialSpec<f64> {
    MaterialSpec {
        geometry: spec.geometry,
        c: spec.c.to_f64_lossy(),
        period: spec.period.to_f64_lossy(),
        linear: crate::kernels::LinearKernelField {
            terms: spec
                .linear
                .terms
                .iter()
                .map(|t| crate::kernels::KernelTerm {
                    profile: t.profile.clone(),
                    kernel: t.kernel.to_f64(),
                    part: t.part,
                })
                .collect(),
            split_period: spec.linear.split_period,
        },
        h: spec.h.clone(),
        nu: spec.nu.to_f64(),
        variant: spec.variant,
        alpha: spec.alpha,
        beta: spec.beta,
    }
}

impl FieldEvaluator {
    pub fn new<T: Real>(pair: &ProfilePair<T>, spec: &MaterialSpec<T>) -> Result<Self> {
        let w = pair.combined().to_f64();
        let grid = w.grid().clone();
        if grid.geometry() != spec.geometry {
            return Err(Error::InvalidConfig(format!(
                "profile lives on a {} grid but the material is {}",
                grid.geometry(),
                spec.geometry
            )));
        }
        let spec = spec_to_f64(spec);
        let extent = grid.extent();
        let nodes = grid.nodes_f64();
        let zero = Complex64::new(0.0, 0.0);
        let splines = w
            .iter_modes()
            .map(|(_, prof)| match spec.geometry {
                Geometry::Slab => {
                    let knots = std::iter::once(-extent).chain(nodes.iter().copied()).chain([extent]).collect();
                    let vals = std::iter::once(zero).chain(prof.iter().copied()).chain([zero]).collect();
                    CubicSpline::natural(knots, vals)
                }
                Geometry::Cylindrical => {
                    let phi: Vec<Complex64> = prof.iter().zip(&nodes).map(|(v, r)| v / r).collect();
                    let knots = std::iter::once(-extent)
                        .chain(nodes.iter().rev().map(|r| -r))
                        .chain(nodes.iter().copied())
                        .chain([extent])
                        .collect();
                    let vals = std::iter::once(zero)
                        .chain(phi.iter().rev().copied())
                        .chain(phi.iter().copied())
                        .chain([zero])
                        .collect();
                    CubicSpline::natural(knots, vals)
                }
            })
            .collect();
        let modes = w.modes().to_vec();
        let base_top = match pair.variant {
            Variant::Retarded => modes.last().copied().unwrap_or(0),
            Variant::RetardedField => pair.w1.modes().last().copied().unwrap_or(0),
        };
        let top = (3 * base_top).max(modes.last().copied().unwrap_or(0));
        ensure_kernel_range(&spec, top)?;
        Ok(Self {
            geometry: spec.geometry,
            c: spec.c,
            omega: spec.omega(),
            period: spec.period,
            variant: pair.variant,
            spec,
            modes,
            splines,
            base_top,
            top,
            extent,
        })
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `ŵ_k(s)` and its derivative (slab), or `ŵ_k/r` and its `r`-derivative (cylinder).
    fn profile_at(&self, s: f64) -> Vec<(usize, Complex64, Complex64)> {
        self.modes
            .iter()
            .zip(&self.splines)
            .map(|(&k, sp)| {
                let (v, d) = sp.eval(s);
                (k, v, d)
            })
            .collect()
    }

    /// `N(w)^_k` for `k = 1..=top` from the base coefficients `b̂_k` (`k = 1..=base_top`).
    fn nonlinear(&self, base: &[Complex64]) -> Vec<Complex64> {
        let zero = Complex64::new(0.0, 0.0);
        let m = 6 * self.base_top + 1;
        let mut out = vec![zero; self.top];
        if self.base_top == 0 {
            return out;
        }
        let samples: Vec<f64> = (0..m)
            .map(|i| {
                let theta = 2.0 * PI * i as f64 / m as f64;
                let v: f64 = base
                    .iter()
                    .enumerate()
                    .map(|(j, c)| 2.0 * (c * Complex64::from_polar(1.0, (j + 1) as f64 * theta)).re)
                    .sum();
                v * v * v
            })
            .collect();
        for (k, slot) in out.iter_mut().enumerate().take(3 * self.base_top) {
            let k = k + 1;
            let mut acc = zero;
            for (i, v) in samples.iter().enumerate() {
                acc += Complex64::from_polar(*v, -2.0 * PI * (k * i % m) as f64 / m as f64);
            }
            *slot = acc / m as f64;
            if self.variant == Variant::Retarded {
                *slot *= self.spec.nu.coeff(k as i64).unwrap_or(0.0);
            }
        }
        out
    }

    fn spectrum(&self, s: f64) -> PointSpectrum {
        let zero = Complex64::new(0.0, 0.0);
        let top = self.top;
        let mut e = vec![zero; top];
        let mut bz = vec![zero; top];
        let r = s.abs();
        for (k, v, d) in self.profile_at(s) {
            e[k - 1] = v;
            let scale = Complex64::new(0.0, self.omega * k as f64);
            bz[k - 1] = match self.geometry {
                Geometry::Slab => d / scale,
                // W/r + W_r = 2Φ + rΦ' with Φ = W/r.
                Geometry::Cylindrical => (v * 2.0 + d * s) / scale,
            };
        }
        // Base field for the cubic: w (variant i) or 𝒩∗w (variant ii), scaled like `e`.
        let base: Vec<Complex64> = (1..=self.base_top)
            .map(|k| match self.variant {
                Variant::Retarded => e[k - 1],
                Variant::RetardedField => e[k - 1] * self.spec.nu.coeff(k as i64).unwrap_or(0.0),
            })
            .collect();
        let n = self.nonlinear(&base);
        let h = self.spec.h.eval(r);
        // N is cubic: for cylinders N(w)/r = r² N(w/r).
        let h_eff = match self.geometry {
            Geometry::Slab => h,
            Geometry::Cylindrical => h * r * r,
        };
        let d = (1..=top)
            .map(|k| {
                let g = self.spec.linear.coeff(k as i64, r).unwrap_or(0.0);
                e[k - 1] * (1.0 + g) + n[k - 1] * h_eff
            })
            .collect();
        PointSpectrum { top, e, bz, d }
    }

    fn sample_with(&self, sp: &PointSpectrum, pos: [f64; 4]) -> FieldSample {
        let [x, y, z, t] = pos;
        let tau = t - z / self.c;
        debug_assert_eq!(sp.top, sp.e.len());
        let e = synth(&sp.e, self.omega, tau);
        let bz = synth(&sp.bz, self.omega, tau);
        let d = synth(&sp.d, self.omega, tau);
        let (ev, bv, dv) = match self.geometry {
            Geometry::Slab => ([0.0, e, 0.0], [-e / self.c, 0.0, -bz], [0.0, d, 0.0]),
            Geometry::Cylindrical => (
                [-y * e, x * e, 0.0],
                [-x * e / self.c, -y * e / self.c, -bz],
                [-y * d, x * d, 0.0],
            ),
        };
        FieldSample {
            position: pos,
            e: ev,
            b: bv,
            d: dv,
            h: bv,
        }
    }

    fn transverse(&self, x: f64, y: f64) -> f64 {
        match self.geometry {
            Geometry::Slab => x,
            Geometry::Cylindrical => x.hypot(y),
        }
    }

    /// All four fields at `(x, y, z, t)`; zero outside the computational domain.
    pub fn sample(&self, pos: [f64; 4]) -> FieldSample {
        let s = self.transverse(pos[0], pos[1]);
        if s.abs() > self.extent {
            return FieldSample {
                position: pos,
                ..Default::default()
            };
        }
        self.sample_with(&self.spectrum(s), pos)
    }

    /// Evaluates the fields on a lattice, in parallel over transverse points.
    pub fn assemble(&self, lattice: &Lattice) -> EMFieldSet {
        let planes: Vec<(f64, f64)> = lattice
            .xs
            .iter()
            .flat_map(|&x| lattice.ys.iter().map(move |&y| (x, y)))
            .collect();
        let samples = planes
            .par_iter()
            .flat_map_iter(|&(x, y)| {
                let s = self.transverse(x, y);
                let sp = (s.abs() <= self.extent).then(|| self.spectrum(s));
                let mut out = Vec::with_capacity(lattice.zs.len() * lattice.ts.len());
                for &z in &lattice.zs {
                    for &t in &lattice.ts {
                        let pos = [x, y, z, t];
                        out.push(match &sp {
                            Some(sp) => self.sample_with(sp, pos),
                            None => FieldSample {
                                position: pos,
                                ..Default::default()
                            },
                        });
                    }
                }
                out
            })
            .collect();
        EMFieldSet {
            geometry: self.geometry,
            c: self.c,
            period: self.period,
            normalization: Normalization::default(),
            lattice: lattice.clone(),
            samples,
        }
    }
}

pub fn assemble_fields_slab<T: Real>(pair: &ProfilePair<T>, spec: &MaterialSpec<T>, lattice: &Lattice) -> Result<EMFieldSet> {
    if spec.geometry != Geometry::Slab {
        return Err(Error::InvalidConfig("slab assembly needs a slab material".into()));
    }
    Ok(FieldEvaluator::new(pair, spec)?.assemble(lattice))
}

pub fn assemble_fields_cylindrical<T: Real>(
    pair: &ProfilePair<T>,
    spec: &MaterialSpec<T>,
    lattice: &Lattice,
) -> Result<EMFieldSet> {
    if spec.geometry != Geometry::Cylindrical {
        return Err(Error::InvalidConfig("cylindrical assembly needs a cylindrical material".into()));
    }
    Ok(FieldEvaluator::new(pair, spec)?.assemble(lattice))
}
