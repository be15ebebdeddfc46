//! Machine-checkable versions of the admissibility conditions on the material.
//!
//! Each check yields a verdict plus, on failure, a witness `(k, x, value)`.
//! Checks marked `hard` make the discrete problem ill-posed when they fail
//! (unbounded coefficients, non-elliptic operators, non-positive norm weights);
//! the others mirror continuum hypotheses and are advisory.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::material::{regular_set, Geometry, MaterialSpec, Part, DEFAULT_ZERO_TOL};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub k: Option<i64>,
    pub x: Option<f64>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssumptionCheck {
    pub id: String,
    pub verdict: Verdict,
    pub hard: bool,
    pub detail: String,
    pub witness: Option<Witness>,
    /// Diagnostic numbers (margins, fitted constants, ...).
    pub values: BTreeMap<String, f64>,
}

impl AssumptionCheck {
    fn new(id: &str, hard: bool) -> Self {
        Self {
            id: id.to_string(),
            verdict: Verdict::Pass,
            hard,
            detail: String::new(),
            witness: None,
            values: BTreeMap::new(),
        }
    }

    fn fail(mut self, detail: impl Into<String>, witness: Witness) -> Self {
        self.verdict = Verdict::Fail;
        self.detail = detail.into();
        self.witness = Some(witness);
        self
    }

    fn not_applicable(mut self, detail: impl Into<String>) -> Self {
        self.verdict = Verdict::NotApplicable;
        self.detail = detail.into();
        self
    }

    fn value(mut self, key: &str, v: f64) -> Self {
        self.values.insert(key.to_string(), v);
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub checks: Vec<AssumptionCheck>,
}

impl AssumptionReport {
    pub fn get(&self, id: &str) -> Option<&AssumptionCheck> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn verdict(&self, id: &str) -> Option<Verdict> {
        self.get(id).map(|c| c.verdict)
    }

    pub fn hard_failures(&self) -> impl Iterator<Item = &AssumptionCheck> {
        self.checks.iter().filter(|c| c.hard && c.verdict == Verdict::Fail)
    }

    pub fn passes_hard(&self) -> bool {
        self.hard_failures().next().is_none()
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.verdict != Verdict::Fail)
    }

    /// Smallest `1/c² − 1 − ℱ_k[𝒢(x)]` over the sampled `(k, x)`.
    pub fn min_margin(&self) -> Option<f64> {
        self.get("A4").and_then(|c| c.values.get("min_margin").copied())
    }
}

/// Relative size below which a coefficient counts as having decayed at the domain ends.
const END_DECAY_TOL: f64 = 1e-6;
/// Allowed ratio between the worst point and the fitted constant in the (A5) power-law fits.
const A5_SPREAD: f64 = 10.0;
const PERIODICITY_TOL: f64 = 1e-9;

/// Runs all checks on the sample locations `xs` (grid nodes) for `0 ≤ k ≤ k_max`.
pub fn validate_assumptions<T: Real>(spec: &MaterialSpec<T>, xs: &[f64], k_max: usize) -> AssumptionReport {
    let mut checks = vec![check_bounded(spec, xs, k_max), check_margin(spec, xs, k_max)];
    checks.extend(check_kernel_decay(spec, k_max));
    checks.extend(check_localization(spec, xs, k_max));
    AssumptionReport { checks }
}

fn check_bounded<T: Real>(spec: &MaterialSpec<T>, xs: &[f64], k_max: usize) -> AssumptionCheck {
    let check = AssumptionCheck::new("A3", true);
    let mut sup_g = 0.0_f64;
    let mut sup_h = 0.0_f64;
    let mut max_h = f64::NEG_INFINITY;
    let mut max_h_at = 0.0;
    for &x in xs {
        for k in 0..=k_max as i64 {
            match spec.linear.coeff(k, x) {
                Ok(v) if v.is_finite() => sup_g = sup_g.max(v.to_f64_lossy().abs()),
                Ok(v) => {
                    return check.fail(
                        "linear kernel coefficient is not finite",
                        Witness {
                            k: Some(k),
                            x: Some(x),
                            value: v.to_f64_lossy(),
                        },
                    )
                }
                Err(e) => {
                    return check.fail(
                        format!("linear kernel unavailable: {e}"),
                        Witness {
                            k: Some(k),
                            x: Some(x),
                            value: f64::NAN,
                        },
                    )
                }
            }
        }
        let h = spec.h.eval(x);
        if !h.is_finite() {
            return check.fail("h is not finite", Witness { k: None, x: Some(x), value: h });
        }
        sup_h = sup_h.max(h.abs());
        if h > max_h {
            max_h = h;
            max_h_at = x;
        }
    }
    let check = check.value("sup_linear", sup_g).value("sup_h", sup_h).value("max_h", max_h);
    if !(max_h > 0.0) {
        return check.fail(
            "h is nonpositive at every sample",
            Witness {
                k: None,
                x: Some(max_h_at),
                value: max_h,
            },
        );
    }
    check
}

fn check_margin<T: Real>(spec: &MaterialSpec<T>, xs: &[f64], k_max: usize) -> AssumptionCheck {
    let check = AssumptionCheck::new("A4", true);
    let mut worst = (f64::INFINITY, 0_i64, 0.0);
    for &x in xs {
        for k in 0..=k_max as i64 {
            let m = match spec.potential(k, x) {
                Ok(v) => v.to_f64_lossy(),
                Err(_) => f64::NAN,
            };
            if !(m >= worst.0) {
                worst = (m, k, x);
            }
        }
    }
    let (m, k, x) = worst;
    let check = check
        .value("min_margin", m)
        .value("worst_k", k as f64)
        .value("worst_x", x);
    if !(m > 0.0) {
        return check.fail(
            format!("1/c^2 - 1 - F_k[G(x)] = {m:.6e} is not positive"),
            Witness {
                k: Some(k),
                x: Some(x),
                value: m,
            },
        );
    }
    check
}

/// Positivity of `ℱ_k[𝒩]` on the regular set (hard) and the power-law bounds (advisory).
fn check_kernel_decay<T: Real>(spec: &MaterialSpec<T>, k_max: usize) -> Vec<AssumptionCheck> {
    let positivity = AssumptionCheck::new("A5-positivity", true);
    let decay = AssumptionCheck::new("A5", false);
    let regular = match regular_set(&spec.nu, k_max, DEFAULT_ZERO_TOL, spec.geometry) {
        Ok(r) => r,
        Err(e) => {
            let w = Witness {
                k: None,
                x: None,
                value: 0.0,
            };
            return vec![
                positivity.fail(format!("no regular modes: {e}"), w.clone()),
                decay.fail("no regular modes", w),
            ];
        }
    };
    let pts: Vec<(f64, f64)> = regular
        .regular()
        .iter()
        .map(|&k| (k as f64, spec.nu.coeff(k as i64).unwrap().to_f64_lossy()))
        .collect();

    let positivity = match pts.iter().find(|p| p.1 <= 0.0) {
        Some(&(k, f)) => positivity.fail(
            "nonlinear kernel coefficient is not positive on the regular set",
            Witness {
                k: Some(k as i64),
                x: None,
                value: f,
            },
        ),
        None => positivity,
    };
    if positivity.verdict == Verdict::Fail {
        return vec![positivity, decay.not_applicable("kernel not positive on the regular set")];
    }

    let (alpha, beta) = (spec.alpha, spec.beta);
    let alpha_star = spec.geometry.alpha_star();
    // Upper: F_k ≤ C₂ k^{-α}; lower: k^{-β} ≤ C₁ F_k. Constants by least squares in log space.
    let upper: Vec<f64> = pts.iter().map(|&(k, f)| (f * k.powf(alpha)).ln()).collect();
    let lower: Vec<f64> = pts.iter().map(|&(k, f)| (k.powf(-beta) / f).ln()).collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (lc2, lc1) = (mean(&upper), mean(&lower));
    let worst_upper = upper.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, &v)| {
        if v - lc2 > acc.1 {
            (i, v - lc2)
        } else {
            acc
        }
    });
    let worst_lower = lower.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, &v)| {
        if v - lc1 > acc.1 {
            (i, v - lc1)
        } else {
            acc
        }
    });
    let decay = decay
        .value("alpha", alpha)
        .value("beta", beta)
        .value("alpha_star", alpha_star)
        .value("c_upper", lc2.exp())
        .value("c_lower", lc1.exp())
        .value("upper_spread", worst_upper.1.exp())
        .value("lower_spread", worst_lower.1.exp());
    let decay = if !(alpha > alpha_star) {
        decay.fail(
            format!("declared alpha = {alpha} does not exceed the critical exponent {alpha_star}"),
            Witness {
                k: None,
                x: None,
                value: alpha,
            },
        )
    } else if worst_upper.1.exp() > A5_SPREAD {
        let (k, f) = pts[worst_upper.0];
        decay.fail(
            format!("F_k exceeds {A5_SPREAD} x C2 k^-alpha"),
            Witness {
                k: Some(k as i64),
                x: None,
                value: f,
            },
        )
    } else if worst_lower.1.exp() > A5_SPREAD {
        let (k, f) = pts[worst_lower.0];
        decay.fail(
            format!("F_k falls below k^-beta / ({A5_SPREAD} x C1)"),
            Witness {
                k: Some(k as i64),
                x: None,
                value: f,
            },
        )
    } else {
        decay
    };
    vec![positivity, decay]
}

/// Localization conditions in the slab: either `h → 0` at both ends (A6a), or a
/// periodic + localized split with the sign conditions of (A6b).
fn check_localization<T: Real>(spec: &MaterialSpec<T>, xs: &[f64], k_max: usize) -> Vec<AssumptionCheck> {
    if spec.geometry == Geometry::Cylindrical {
        return ["A6a", "A6b", "A6"]
            .iter()
            .map(|id| AssumptionCheck::new(id, false).not_applicable("cylindrical geometry"))
            .collect();
    }
    let (Some(&first), Some(&last)) = (xs.first(), xs.last()) else {
        return vec![AssumptionCheck::new("A6", false).not_applicable("no samples")];
    };
    let sup_h = xs.iter().fold(0.0_f64, |m, &x| m.max(spec.h.eval(x).abs())).max(f64::MIN_POSITIVE);

    let a6a = {
        let c = AssumptionCheck::new("A6a", false);
        let end = [first, last]
            .into_iter()
            .map(|x| (x, spec.h.eval(x).abs()))
            .fold((first, 0.0), |m, p| if p.1 > m.1 { p } else { m });
        let c = c.value("end_h", end.1).value("sup_h", sup_h);
        if end.1 > END_DECAY_TOL * sup_h {
            c.fail(
                "h does not decay at the domain ends",
                Witness {
                    k: None,
                    x: Some(end.0),
                    value: end.1,
                },
            )
        } else {
            c
        }
    };

    let a6b = check_split(spec, xs, k_max, sup_h);

    let mut a6 = AssumptionCheck::new("A6", false);
    if a6a.verdict == Verdict::Fail && a6b.verdict != Verdict::Pass {
        let w = a6a.witness.clone().unwrap();
        a6 = a6.fail("neither decay of h nor the periodic/localized sign conditions hold", w);
    }
    vec![a6a, a6b, a6]
}

fn check_split<T: Real>(spec: &MaterialSpec<T>, xs: &[f64], k_max: usize, sup_h: f64) -> AssumptionCheck {
    let c = AssumptionCheck::new("A6b", false);
    if !spec.has_split() {
        return c.not_applicable("no periodic/localized split declared");
    }
    let Some(period) = spec.linear.split_period else {
        return c.not_applicable("split declared without a spatial period");
    };
    let c = c.value("spatial_period", period);
    let (first, last) = (xs[0], xs[xs.len() - 1]);
    let coeff = |part: Part, k: i64, x: f64| {
        spec.linear
            .part_coeff(part, k, x)
            .map(|v| v.to_f64_lossy())
            .unwrap_or(f64::NAN)
    };
    let sup_g = xs
        .iter()
        .flat_map(|&x| (0..=k_max as i64).map(move |k| (k, x)))
        .fold(0.0_f64, |m, (k, x)| m.max(spec.linear.coeff(k, x).map(|v| v.to_f64_lossy().abs()).unwrap_or(0.0)))
        .max(1.0);

    for &x in xs {
        for k in 0..=k_max as i64 {
            let g = coeff(Part::Loc, k, x);
            if !(g >= -1e-14 * sup_g) {
                return c.fail("localized linear kernel is not positive definite", Witness { k: Some(k), x: Some(x), value: g });
            }
        }
        let h = spec.h.part(Part::Loc, x);
        if h < 0.0 {
            return c.fail("localized h is negative", Witness { k: None, x: Some(x), value: h });
        }
    }
    for x in [first, last] {
        for k in 0..=k_max as i64 {
            let g = coeff(Part::Loc, k, x);
            if g.abs() > END_DECAY_TOL * sup_g {
                return c.fail("localized linear kernel does not decay", Witness { k: Some(k), x: Some(x), value: g });
            }
        }
        let h = spec.h.part(Part::Loc, x);
        if h.abs() > END_DECAY_TOL * sup_h {
            return c.fail("localized h does not decay", Witness { k: None, x: Some(x), value: h });
        }
    }
    let max_hper = xs.iter().map(|&x| spec.h.part(Part::Per, x)).fold(f64::NEG_INFINITY, f64::max);
    if !(max_hper > 0.0) {
        return c.fail("periodic h is nonpositive", Witness { k: None, x: None, value: max_hper });
    }
    for &x in xs {
        let dh = spec.h.part(Part::Per, x + period) - spec.h.part(Part::Per, x);
        if dh.abs() > PERIODICITY_TOL * sup_h {
            return c.fail("periodic h is not X-periodic", Witness { k: None, x: Some(x), value: dh });
        }
        for k in 0..=k_max as i64 {
            let dg = coeff(Part::Per, k, x + period) - coeff(Part::Per, k, x);
            if dg.abs() > PERIODICITY_TOL * sup_g {
                return c.fail("periodic linear kernel is not X-periodic", Witness { k: Some(k), x: Some(x), value: dg });
            }
        }
    }
    c.value("max_h_per", max_hper)
}
