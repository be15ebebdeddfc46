//! Retardation kernels reduced to the torus and represented by their Fourier coefficients.

use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::Arc;

use gauss_quad::legendre::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// How a kernel's coefficients were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    Quadrature,
    UserTable,
}

/// A real, even measure on the torus `R / T Z`, stored as its coefficients
/// `F_k` for `0 <= k <= k_max` (with `F_{-k} = F_k`).
///
/// Coefficients are normalized so that the point mass at zero has `F_k = 1`
/// and a density `f(τ) dτ` has `F_k = (1/T) ∫ f(τ) e^{-ikωτ} dτ`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusMeasure<T> {
    period: T,
    coeffs: Vec<T>,
    /// Coefficients beyond `k_max` are exactly zero (finite Fourier tables).
    exact_tail: bool,
    provenance: Provenance,
}

impl<T: Real> TorusMeasure<T> {
    pub fn new(period: T, coeffs: Vec<T>, provenance: Provenance) -> Result<Self> {
        if !(period > T::zero()) || !period.is_finite() {
            return Err(Error::NonFiniteMeasure(format!("period {period} must be positive")));
        }
        if coeffs.is_empty() {
            return Err(Error::NonFiniteMeasure("empty coefficient sequence".into()));
        }
        if let Some(k) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFiniteMeasure(format!("coefficient {k} is not finite")));
        }
        Ok(Self {
            period,
            coeffs,
            exact_tail: false,
            provenance,
        })
    }

    /// Point mass `mass · δ₀`.
    pub fn delta(period: T, mass: T, k_max: usize) -> Result<Self> {
        Self::new(period, vec![mass; k_max + 1], Provenance::ClosedForm)
    }

    /// Finite Fourier table; unlisted modes are zero, including all `|k|` past the largest entry.
    pub fn fourier_table(period: T, entries: &[(i64, f64)]) -> Result<Self> {
        let k_max = entries.iter().map(|(k, _)| k.unsigned_abs() as usize).max().unwrap_or(0);
        let mut coeffs = vec![T::zero(); k_max + 1];
        let mut seen = vec![None::<f64>; k_max + 1];
        for &(k, v) in entries {
            let idx = k.unsigned_abs() as usize;
            match seen[idx] {
                Some(prev) if prev != v => {
                    return Err(Error::NotEven {
                        k,
                        imag: (prev - v).abs(),
                    })
                }
                _ => seen[idx] = Some(v),
            }
            coeffs[idx] = T::lit(v);
        }
        let mut m = Self::new(period, coeffs, Provenance::UserTable)?;
        m.exact_tail = true;
        Ok(m)
    }

    pub fn period(&self) -> T {
        self.period
    }

    pub fn omega(&self) -> T {
        T::lit(2.0 * PI) / self.period
    }

    /// Largest stored mode index.
    pub fn k_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn has_exact_tail(&self) -> bool {
        self.exact_tail
    }

    /// Coefficients for `k = 0..=k_max`.
    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// `F_k`, or `None` when `|k|` lies beyond the known coefficients.
    pub fn coeff(&self, k: i64) -> Option<T> {
        let idx = k.unsigned_abs() as usize;
        match self.coeffs.get(idx) {
            Some(&c) => Some(c),
            None if self.exact_tail => Some(T::zero()),
            None => None,
        }
    }

    pub fn try_coeff(&self, k: i64) -> Result<T> {
        self.coeff(k).ok_or(Error::KernelTruncated {
            requested: k.unsigned_abs() as usize,
            available: self.k_max(),
        })
    }

    pub fn max_abs(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|&c| c * factor).collect(),
            ..self.clone()
        }
    }

    /// The same kernel seen on the torus of period `T/n`: `F'_k = F_{nk}`.
    pub fn restrict(&self, n: usize) -> Self {
        assert!(n >= 1, "subharmonic index must be positive");
        let k_max = self.k_max() / n;
        Self {
            period: self.period / T::from_usize_lossy(n),
            coeffs: (0..=k_max).map(|k| self.coeffs[n * k]).collect(),
            exact_tail: self.exact_tail,
            provenance: self.provenance,
        }
    }

    /// Lossless-to-`f64` copy, used for reporting and file output.
    pub fn to_f64(&self) -> TorusMeasure<f64> {
        TorusMeasure {
            period: self.period.to_f64_lossy(),
            coeffs: self.coeffs.iter().map(|c| c.to_f64_lossy()).collect(),
            exact_tail: self.exact_tail,
            provenance: self.provenance,
        }
    }
}

/// `ν(τ) = (2 - |sin ωτ|) 𝟙_[0,T](τ)` reduced to the torus, in closed form.
pub fn builtin_nu_truncated_sine<T: Real>(period: T, k_max: usize) -> Result<TorusMeasure<T>> {
    let coeffs = (0..=k_max)
        .map(|k| T::lit(truncated_sine_coeff(k)))
        .collect();
    TorusMeasure::new(period, coeffs, Provenance::ClosedForm)
}

fn truncated_sine_coeff(k: usize) -> f64 {
    if k == 0 {
        2.0 - 2.0 / PI
    } else if k % 2 == 1 {
        0.0
    } else {
        let k = k as f64;
        2.0 / (PI * (k * k - 1.0))
    }
}

/// Density of an absolutely continuous measure on the line.
#[derive(Clone)]
pub enum Density {
    /// Piecewise-linear interpolation of `(τ, value)` samples; zero outside the sampled range.
    Table(Vec<(f64, f64)>),
    /// Arbitrary density on `support`, with known kink locations used as panel breakpoints.
    Function {
        support: (f64, f64),
        breakpoints: Vec<f64>,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl std::fmt::Debug for Density {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Density::Table(pts) => f.debug_tuple("Table").field(&pts.len()).finish(),
            Density::Function { support, .. } => {
                f.debug_struct("Function").field("support", support).finish()
            }
        }
    }
}

impl Density {
    fn support(&self) -> (f64, f64) {
        match self {
            Density::Table(pts) => (pts[0].0, pts[pts.len() - 1].0),
            Density::Function { support, .. } => *support,
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self {
            Density::Table(pts) => pts.iter().map(|p| p.0).collect(),
            Density::Function {
                support,
                breakpoints,
                ..
            } => {
                let mut b = vec![support.0, support.1];
                b.extend(breakpoints.iter().copied().filter(|&x| x > support.0 && x < support.1));
                b
            }
        }
    }

    fn eval(&self, tau: f64) -> f64 {
        match self {
            Density::Table(pts) => {
                let i = pts.partition_point(|p| p.0 <= tau);
                if i == 0 || i == pts.len() && tau > pts[pts.len() - 1].0 {
                    return 0.0;
                }
                let i = i.min(pts.len() - 1);
                let (x0, y0) = pts[i - 1];
                let (x1, y1) = pts[i];
                if x1 == x0 {
                    y1
                } else {
                    y0 + (y1 - y0) * (tau - x0) / (x1 - x0)
                }
            }
            Density::Function { f, .. } => f(tau),
        }
    }
}

/// A finite signed measure on the real line: point masses plus densities.
#[derive(Clone, Debug, Default)]
pub struct LineMeasure {
    pub atoms: Vec<(f64, f64)>,
    pub densities: Vec<Density>,
}

impl LineMeasure {
    pub fn delta() -> Self {
        Self {
            atoms: vec![(0.0, 1.0)],
            densities: Vec::new(),
        }
    }

    /// `(2 - |sin ωτ|) 𝟙_[0,T](τ) dτ`.
    pub fn truncated_sine(period: f64) -> Self {
        let omega = 2.0 * PI / period;
        Self {
            atoms: Vec::new(),
            densities: vec![Density::Function {
                support: (0.0, period),
                breakpoints: vec![0.5 * period],
                f: Arc::new(move |t| 2.0 - (omega * t).sin().abs()),
            }],
        }
    }
}

const NODES_PER_PANEL: usize = 16;
const QUADRATURE_TOL: f64 = 1e-12;
const MAX_REFINEMENTS: usize = 6;

/// Reduces a measure on the line to the torus of the given period and returns
/// its coefficients for `|k| <= k_max`.
pub fn periodic_reduce<T: Real>(
    measure: &LineMeasure,
    period: f64,
    k_max: usize,
) -> Result<TorusMeasure<T>> {
    if !(period > 0.0) || !period.is_finite() {
        return Err(Error::NonFiniteMeasure(format!("period {period} must be positive")));
    }
    let omega = 2.0 * PI / period;
    let mut re = vec![0.0; k_max + 1];
    let mut im = vec![0.0; k_max + 1];

    for &(tau, mass) in &measure.atoms {
        if !tau.is_finite() || !mass.is_finite() {
            return Err(Error::NonFiniteMeasure(format!("atom ({tau}, {mass})")));
        }
        for k in 0..=k_max {
            let phase = omega * k as f64 * tau;
            re[k] += mass * phase.cos();
            im[k] -= mass * phase.sin();
        }
    }

    let rule = GaussLegendre::new(NonZeroUsize::new(NODES_PER_PANEL).unwrap());
    for density in &measure.densities {
        let (a, b) = density.support();
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::NonFiniteMeasure(format!("density support [{a}, {b}]")));
        }
        // One panel per oscillation period of the highest mode, then refine until stable.
        let mut panels = ((b - a) * k_max.max(1) as f64 / period).ceil().max(1.0) as usize;
        let mut prev = density_coeffs(density, &rule, panels, omega, k_max)?;
        let mut converged = false;
        for _ in 0..MAX_REFINEMENTS {
            panels *= 2;
            let next = density_coeffs(density, &rule, panels, omega, k_max)?;
            let scale = next.0.iter().chain(&next.1).fold(1e-300_f64, |m, v| m.max(v.abs()));
            let diff = prev
                .0
                .iter()
                .zip(&next.0)
                .chain(prev.1.iter().zip(&next.1))
                .fold(0.0_f64, |m, (p, n)| m.max((p - n).abs()));
            prev = next;
            if diff <= QUADRATURE_TOL * scale {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonFiniteMeasure(
                "density quadrature does not converge".into(),
            ));
        }
        for k in 0..=k_max {
            re[k] += prev.0[k] / period;
            im[k] += prev.1[k] / period;
        }
    }

    let scale = re.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1e-300);
    for (k, &v) in im.iter().enumerate() {
        if v.abs() > 1e-10 * scale {
            return Err(Error::NotEven { k: k as i64, imag: v });
        }
    }
    let provenance = if measure.densities.is_empty() {
        Provenance::ClosedForm
    } else {
        Provenance::Quadrature
    };
    TorusMeasure::new(T::lit(period), re.into_iter().map(T::lit).collect(), provenance)
}

/// Unnormalized `∫ f(τ) e^{-ikωτ} dτ` (real and imaginary parts) on `panels` panels per
/// breakpoint interval.
fn density_coeffs(
    density: &Density,
    rule: &GaussLegendre,
    panels: usize,
    omega: f64,
    k_max: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut bps = density.breakpoints();
    bps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    bps.dedup();
    let (a, b) = density.support();
    let width = (b - a) / panels as f64;
    let mut re = vec![0.0; k_max + 1];
    let mut im = vec![0.0; k_max + 1];
    for seg in bps.windows(2) {
        let (s0, s1) = (seg[0], seg[1]);
        let n = ((s1 - s0) / width).ceil().max(1.0) as usize;
        let h = (s1 - s0) / n as f64;
        for p in 0..n {
            let lo = s0 + p as f64 * h;
            let hi = lo + h;
            for &(node, weight) in rule.as_node_weight_pairs() {
                let tau = 0.5 * ((hi - lo) * node + (hi + lo));
                let w = 0.5 * (hi - lo) * weight;
                let f = density.eval(tau);
                if !f.is_finite() {
                    return Err(Error::NonFiniteMeasure(format!("density not finite at τ = {tau}")));
                }
                let fw = f * w;
                for k in 0..=k_max {
                    let phase = omega * k as f64 * tau;
                    re[k] += fw * phase.cos();
                    im[k] -= fw * phase.sin();
                }
            }
        }
    }
    Ok((re, im))
}

/// Serializable kernel definition, as found in kernel and material files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelDef {
    /// `mass · δ₀` (instantaneous response).
    Delta {
        #[serde(default = "one")]
        mass: f64,
    },
    /// `(2 - |sin ωτ|) 𝟙_[0,T](τ) dτ`, optionally scaled.
    TruncatedSine {
        #[serde(default = "one")]
        scale: f64,
    },
    /// Piecewise-linear density through `[τ, value]` samples, zero outside `support`.
    DensityTable {
        support: [f64; 2],
        samples: Vec<[f64; 2]>,
    },
    /// Explicit coefficients as `[k, value]` pairs.
    FourierTable { coeffs: Vec<(i64, f64)> },
}

fn one() -> f64 {
    1.0
}

impl KernelDef {
    /// Materializes the kernel with coefficients up to `k_max` (tables keep their own length).
    pub fn build<T: Real>(&self, period: f64, k_max: usize) -> Result<TorusMeasure<T>> {
        match self {
            KernelDef::Delta { mass } => TorusMeasure::delta(T::lit(period), T::lit(*mass), k_max),
            KernelDef::TruncatedSine { scale } => {
                Ok(builtin_nu_truncated_sine(T::lit(period), k_max)?.scaled(T::lit(*scale)))
            }
            KernelDef::DensityTable { support, samples } => {
                if samples.len() < 2 {
                    return Err(Error::NonFiniteMeasure("density table needs two samples".into()));
                }
                let mut pts: Vec<(f64, f64)> = samples
                    .iter()
                    .map(|s| (s[0], s[1]))
                    .filter(|p| p.0 >= support[0] && p.0 <= support[1])
                    .collect();
                pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
                if pts.len() < 2 {
                    return Err(Error::NonFiniteMeasure(
                        "density table has fewer than two samples inside its support".into(),
                    ));
                }
                let measure = LineMeasure {
                    atoms: Vec::new(),
                    densities: vec![Density::Table(pts)],
                };
                periodic_reduce(&measure, period, k_max)
            }
            KernelDef::FourierTable { coeffs } => TorusMeasure::fourier_table(T::lit(period), coeffs),
        }
    }
}
