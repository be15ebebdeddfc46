//! Material laws: linear kernel family `𝒢(x)`, cubic coefficient `h(x)`, nonlinear kernel `𝒩`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::measure::TorusMeasure;
use super::profile::Profile;
use crate::discretization::ModeSet;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    Slab,
    Cylindrical,
}

impl Geometry {
    /// Critical decay exponent of the nonlinear kernel's coefficients.
    pub fn alpha_star(self) -> f64 {
        match self {
            Geometry::Slab => 1.0,
            Geometry::Cylindrical => 1.5,
        }
    }

    pub fn admits_mode(self, k: usize) -> bool {
        match self {
            Geometry::Slab => true,
            Geometry::Cylindrical => k % 2 == 1,
        }
    }
}

impl std::fmt::Display for Geometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Geometry::Slab => "slab",
            Geometry::Cylindrical => "cylindrical",
        })
    }
}

impl std::str::FromStr for Geometry {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "slab" => Ok(Geometry::Slab),
            "cylindrical" | "cylinder" => Ok(Geometry::Cylindrical),
            other => Err(format!("unknown geometry {other:?} (expected slab or cylindrical)")),
        }
    }
}

/// Which cubic law the polarization follows: `𝒩 ∗ w³` (i) or `(𝒩 ∗ w)³` (ii).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "i")]
    Retarded,
    #[serde(rename = "ii")]
    RetardedField,
}

/// Periodic/localized split tag of a coefficient term.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    #[default]
    Whole,
    Per,
    Loc,
}

/// One summand `profile(x) · kernel` of the linear susceptibility.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelTerm<T> {
    pub profile: Profile,
    pub kernel: TorusMeasure<T>,
    pub part: Part,
}

/// `𝒢(x) = Σ_i p_i(x) κ_i`, optionally split into periodic and localized parts.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearKernelField<T> {
    pub terms: Vec<KernelTerm<T>>,
    /// Spatial period `X` of the periodic part, when a split is declared.
    pub split_period: Option<f64>,
}

impl<T: Real> LinearKernelField<T> {
    pub fn vacuum() -> Self {
        Self {
            terms: Vec::new(),
            split_period: None,
        }
    }

    /// Instantaneous, spatially constant susceptibility `g δ₀`.
    pub fn instantaneous(g: f64, period: T, k_max: usize) -> Result<Self> {
        Ok(Self {
            terms: vec![KernelTerm {
                profile: Profile::Constant { value: g },
                kernel: TorusMeasure::delta(period, T::one(), k_max)?,
                part: Part::Whole,
            }],
            split_period: None,
        })
    }

    /// `ℱ_k[𝒢(x)]`, restricted to terms accepted by `keep`.
    fn coeff_filtered(&self, k: i64, x: f64, keep: impl Fn(Part) -> bool) -> Result<T> {
        let mut sum = T::zero();
        for term in self.terms.iter().filter(|t| keep(t.part)) {
            let p = term.profile.eval(x);
            if p != 0.0 {
                sum += T::lit(p) * term.kernel.try_coeff(k)?;
            }
        }
        Ok(sum)
    }

    pub fn coeff(&self, k: i64, x: f64) -> Result<T> {
        self.coeff_filtered(k, x, |_| true)
    }

    pub fn part_coeff(&self, part: Part, k: i64, x: f64) -> Result<T> {
        self.coeff_filtered(k, x, |p| p == part)
    }

    pub fn has_split(&self) -> bool {
        self.split_period.is_some()
    }

    pub fn restrict(&self, n: usize) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| KernelTerm {
                    kernel: t.kernel.restrict(n),
                    ..t.clone()
                })
                .collect(),
            split_period: self.split_period,
        }
    }

    /// Keeps only terms matching `keep`.
    pub fn filtered(&self, keep: impl Fn(Part) -> bool) -> Self {
        Self {
            terms: self.terms.iter().filter(|t| keep(t.part)).cloned().collect(),
            split_period: self.split_period,
        }
    }
}

/// `h(x) = Σ_i p_i(x)`, with each summand tagged as periodic, localized or unsplit.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CoefficientField {
    pub terms: Vec<(Part, Profile)>,
}

impl CoefficientField {
    pub fn constant(value: f64) -> Self {
        Self {
            terms: vec![(Part::Whole, Profile::Constant { value })],
        }
    }

    pub fn from_profile(profile: Profile) -> Self {
        Self {
            terms: vec![(Part::Whole, profile)],
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|(_, p)| p.eval(x)).sum()
    }

    pub fn part(&self, part: Part, x: f64) -> f64 {
        self.terms
            .iter()
            .filter(|(q, _)| *q == part)
            .map(|(_, p)| p.eval(x))
            .sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(part, p)| (*part, scale_profile(p.clone(), factor)))
                .collect(),
        }
    }

    pub fn filtered(&self, keep: impl Fn(Part) -> bool) -> Self {
        Self {
            terms: self.terms.iter().filter(|(p, _)| keep(*p)).cloned().collect(),
        }
    }
}

fn scale_profile(p: Profile, f: f64) -> Profile {
    match p {
        Profile::Constant { value } => Profile::Constant { value: value * f },
        Profile::Gaussian {
            amplitude,
            center,
            width,
        } => Profile::Gaussian {
            amplitude: amplitude * f,
            center,
            width,
        },
        Profile::Cosine {
            offset,
            amplitude,
            period,
            phase,
        } => Profile::Cosine {
            offset: offset * f,
            amplitude: amplitude * f,
            period,
            phase,
        },
        Profile::Table { points } => Profile::Table {
            points: points.into_iter().map(|[x, y]| [x, y * f]).collect(),
        },
        Profile::Sum { terms } => Profile::Sum {
            terms: terms.into_iter().map(|t| scale_profile(t, f)).collect(),
        },
    }
}

/// Complete description of the material and waveguide for one breather problem.
#[derive(Clone, Debug, PartialEq)]
pub struct MaterialSpec<T> {
    pub geometry: Geometry,
    /// Speed of travel in units of the vacuum light speed.
    pub c: T,
    /// Time period `T`.
    pub period: T,
    pub linear: LinearKernelField<T>,
    pub h: CoefficientField,
    pub nu: TorusMeasure<T>,
    pub variant: Variant,
    /// Declared decay exponents of `ℱ_k[𝒩]`: `|k|^{-β} ≲ ℱ_k ≲ |k|^{-α}`.
    pub alpha: f64,
    pub beta: f64,
}

impl<T: Real> MaterialSpec<T> {
    /// Checks the structural invariants (`0 < c < 1`, `T > 0`, `α ≤ β`, `𝒩 ≠ 0`, matching periods).
    pub fn validated(self) -> Result<Self> {
        if !(self.c > T::zero() && self.c < T::one()) {
            return Err(Error::InvalidConfig(format!("speed c = {} must lie in (0, 1)", self.c)));
        }
        if !(self.period > T::zero()) || !self.period.is_finite() {
            return Err(Error::InvalidConfig(format!("period T = {} must be positive", self.period)));
        }
        if !(self.alpha <= self.beta) {
            return Err(Error::InvalidConfig(format!(
                "decay exponents need alpha <= beta (got {} > {})",
                self.alpha, self.beta
            )));
        }
        if self.nu.is_zero() {
            return Err(Error::InvalidConfig("nonlinear kernel vanishes identically".into()));
        }
        let tol = T::lit(1e-12) * self.period;
        let periods = std::iter::once(self.nu.period()).chain(self.linear.terms.iter().map(|t| t.kernel.period()));
        for p in periods {
            if (p - self.period).abs() > tol {
                return Err(Error::InvalidConfig(format!(
                    "kernel period {p} differs from material period {}",
                    self.period
                )));
            }
        }
        for (_, p) in &self.h.terms {
            p.check().map_err(Error::InvalidConfig)?;
        }
        for t in &self.linear.terms {
            t.profile.check().map_err(Error::InvalidConfig)?;
        }
        Ok(self)
    }

    pub fn omega(&self) -> T {
        T::lit(2.0 * PI) / self.period
    }

    /// `V_k(x) = 1/c² − 1 − ℱ_k[𝒢(x)]`.
    pub fn potential(&self, k: i64, x: f64) -> Result<T> {
        Ok(T::one() / (self.c * self.c) - T::one() - self.linear.coeff(k, x)?)
    }

    pub fn h_at(&self, x: f64) -> T {
        T::lit(self.h.eval(x))
    }

    pub fn nu_coeff(&self, k: i64) -> Result<T> {
        self.nu.try_coeff(k)
    }

    /// Same material with `h` multiplied by `factor`.
    pub fn with_scaled_h(&self, factor: f64) -> Self {
        Self {
            h: self.h.scaled(factor),
            ..self.clone()
        }
    }

    /// The periodic background: localized parts of `𝒢` and `h` removed.
    pub fn periodic_part(&self) -> Self {
        Self {
            linear: self.linear.filtered(|p| p != Part::Loc),
            h: self.h.filtered(|p| p != Part::Loc),
            ..self.clone()
        }
    }

    pub fn has_split(&self) -> bool {
        self.linear.has_split() || self.h.terms.iter().any(|(p, _)| *p != Part::Whole)
    }
}

/// `ℛ = {1 ≤ k ≤ K : |ℱ_k[𝒩]| > zero_tol · max_k |ℱ_k[𝒩]|}` (positive representatives),
/// intersected with the odd integers in cylindrical geometry.
pub fn regular_set<T: Real>(
    nu: &TorusMeasure<T>,
    k_max: usize,
    zero_tol: f64,
    geometry: Geometry,
) -> Result<ModeSet> {
    let coeffs: Vec<T> = (0..=k_max).map(|k| nu.try_coeff(k as i64)).collect::<Result<_>>()?;
    let scale = coeffs.iter().fold(T::zero(), |m, c| m.max(c.abs()));
    let threshold = T::lit(zero_tol) * scale;
    let regular: Vec<usize> = (1..=k_max)
        .filter(|&k| coeffs[k].abs() > threshold && geometry.admits_mode(k))
        .collect();
    if regular.is_empty() {
        return Err(Error::EmptyRegularSet);
    }
    ModeSet::new(k_max, geometry, regular)
}

pub const DEFAULT_ZERO_TOL: f64 = 1e-14;

/// The material seen by `T/n`-periodic solutions: `ω' = nω`, `ℱ'_k = ℱ_{nk}` for every kernel.
pub fn subharmonic_restrict<T: Real>(spec: &MaterialSpec<T>, n: usize) -> Result<MaterialSpec<T>> {
    if n == 0 {
        return Err(Error::InvalidConfig("subharmonic index must be at least 1".into()));
    }
    if n == 1 {
        return Ok(spec.clone());
    }
    let nu = spec.nu.restrict(n);
    let k_avail = nu.k_max().max(1);
    let nonempty = (1..=k_avail).any(|k| {
        spec.geometry.admits_mode(k)
            && nu
                .coeff(k as i64)
                .map(|c| c.abs() > T::lit(DEFAULT_ZERO_TOL) * spec.nu.max_abs())
                .unwrap_or(false)
    });
    if !nonempty {
        return Err(Error::EmptyRegularSet);
    }
    Ok(MaterialSpec {
        period: spec.period / T::from_usize_lossy(n),
        linear: spec.linear.restrict(n),
        nu,
        ..spec.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::measure::builtin_nu_truncated_sine;
    use approx::assert_abs_diff_eq;

    fn spec(nu: TorusMeasure<f64>, geometry: Geometry) -> MaterialSpec<f64> {
        MaterialSpec {
            geometry,
            c: 0.8,
            period: nu.period(),
            linear: LinearKernelField::instantaneous(0.5, nu.period(), 32).unwrap(),
            h: CoefficientField::constant(1.0),
            nu,
            variant: Variant::Retarded,
            alpha: 2.0,
            beta: 2.0,
        }
        .validated()
        .unwrap()
    }

    #[test]
    fn regular_set_examples() {
        let ts = builtin_nu_truncated_sine(2.0 * PI, 6).unwrap();
        let r = regular_set(&ts, 6, DEFAULT_ZERO_TOL, Geometry::Slab).unwrap();
        assert_eq!(r.regular(), &[2, 4, 6]);
        assert!(matches!(
            regular_set(&ts, 6, DEFAULT_ZERO_TOL, Geometry::Cylindrical),
            Err(Error::EmptyRegularSet)
        ));
        let d = TorusMeasure::delta(1.0, 1.0, 4).unwrap();
        assert_eq!(regular_set(&d, 4, DEFAULT_ZERO_TOL, Geometry::Slab).unwrap().regular(), &[1, 2, 3, 4]);
    }

    #[test]
    fn subharmonic_coefficients() {
        let s = spec(builtin_nu_truncated_sine(2.0 * PI, 32).unwrap(), Geometry::Slab);
        let s2 = subharmonic_restrict(&s, 2).unwrap();
        assert_abs_diff_eq!(s2.nu.coeff(1).unwrap(), 2.0 / (3.0 * PI), epsilon = 1e-15);
        assert_abs_diff_eq!(s2.omega(), 2.0 * s.omega(), epsilon = 1e-14);
        let s3 = subharmonic_restrict(&s, 3).unwrap();
        assert_eq!(s3.nu.coeff(1).unwrap(), 0.0);
        assert_abs_diff_eq!(s3.nu.coeff(2).unwrap(), 2.0 / (35.0 * PI), epsilon = 1e-15);
        assert_eq!(subharmonic_restrict(&s, 1).unwrap(), s);
    }

    #[test]
    fn cylindrical_subharmonic_can_be_empty() {
        let s = spec(builtin_nu_truncated_sine(2.0 * PI, 32).unwrap(), Geometry::Slab);
        let cyl = MaterialSpec {
            geometry: Geometry::Cylindrical,
            ..s
        };
        assert!(matches!(subharmonic_restrict(&cyl, 3), Err(Error::EmptyRegularSet)));
    }

    #[test]
    fn potential_uses_linear_kernel() {
        let s = spec(TorusMeasure::delta(1.0, 1.0, 8).unwrap(), Geometry::Slab);
        let s = MaterialSpec {
            linear: LinearKernelField::instantaneous(0.5, 1.0, 8).unwrap(),
            ..s
        };
        assert_abs_diff_eq!(s.potential(3, 0.0).unwrap(), 1.0 / 0.64 - 1.5, epsilon = 1e-14);
        assert!(matches!(s.potential(9, 0.0), Err(Error::KernelTruncated { .. })));
    }

    #[test]
    fn rejects_bad_speed() {
        let s = spec(TorusMeasure::delta(1.0, 1.0, 8).unwrap(), Geometry::Slab);
        assert!(MaterialSpec { c: 1.0, ..s.clone() }.validated().is_err());
        assert!(MaterialSpec { alpha: 3.0, ..s }.validated().is_err());
    }

    #[test]
    fn scaled_h_doubles_values() {
        let h = CoefficientField {
            terms: vec![
                (Part::Per, Profile::Cosine { offset: 1.0, amplitude: 0.5, period: 3.0, phase: 0.0 }),
                (Part::Loc, Profile::Gaussian { amplitude: 1.0, center: 0.0, width: 2.0 }),
            ],
        };
        let h2 = h.scaled(2.0);
        for x in [-3.0, 0.1, 2.7] {
            assert_abs_diff_eq!(h2.eval(x), 2.0 * h.eval(x), epsilon = 1e-15);
        }
    }
}
