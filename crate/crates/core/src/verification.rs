//! Residuals, decay and smoothness diagnostics, and the invariant suite.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discretization::{
    build_mode_operator, fractional_time_derivative, h_inner_product, Field, InnerKind, TimeGrid,
};
use crate::error::Result;
use crate::functional::{cubic_term, energy, quartic_integral, Problem};
use crate::kernels::{validate_assumptions, Geometry, Variant};
use crate::reconstruction::{FieldEvaluator, FieldSample, ProfilePair};
use crate::scalar::Real;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StrongResidual {
    /// `‖r‖ / ‖op u‖`, or the absolute norm when `op u = 0`.
    pub relative: f64,
    pub absolute: f64,
    /// Per-mode norms relative to the same reference.
    pub per_mode: Vec<(usize, f64)>,
}

/// `√(2 Σ_j w_j |v_j|²)`: the space-time `L²` norm of one mode pair.
pub(crate) fn mode_norm_sq<T: Real>(weights: &[T], v: &[Complex<T>]) -> f64 {
    2.0 * v
        .iter()
        .zip(weights)
        .map(|(c, &w)| (w * c.norm_sqr()).to_f64_lossy())
        .sum::<f64>()
}

/// Strong form of the profile equation on the regular modes:
/// `r_k = op_k û_k − ω²k² ℱ_k[𝒩] (h u³)^_k`.
pub fn strong_residual<T: Real>(p: &Problem<T>, u: &Field<T>) -> Result<StrongResidual> {
    let cube = cubic_term(p, u, p.regular().clone())?;
    let w = p.grid().weights();
    let omega = p.omega();
    let mut per = Vec::new();
    let (mut num, mut den) = (0.0, 0.0);
    for (i, op) in p.operators().iter().enumerate() {
        let k = op.k;
        let wk = omega * T::from_usize_lossy(k);
        let s = wk * wk * p.weights().nu_coeff(k)?;
        let au = op.apply(u.profile(i));
        let r: Vec<_> = au.iter().zip(cube.profile(i)).map(|(&a, &c)| a - c * s).collect();
        let rn = mode_norm_sq(w, &r);
        num += rn;
        den += mode_norm_sq(w, &au);
        per.push((k, rn));
    }
    let reference = if den > 0.0 { den.sqrt() } else { 1.0 };
    Ok(StrongResidual {
        relative: num.sqrt() / reference,
        absolute: num.sqrt(),
        per_mode: per.into_iter().map(|(k, r)| (k, r.sqrt() / reference)).collect(),
    })
}

/// Relative space-time `L²` mass of `u` outside `(1 − f)` of the domain extent, per fraction `f`.
pub fn decay_probe<T: Real>(u: &Field<T>, fractions: &[f64]) -> Vec<f64> {
    let grid = u.grid();
    let extent = grid.extent().to_f64_lossy();
    let w = grid.weights();
    let density: Vec<f64> = (0..grid.len())
        .map(|j| {
            u.iter_modes()
                .map(|(_, p)| 2.0 * (w[j] * p[j].norm_sqr()).to_f64_lossy())
                .sum::<f64>()
        })
        .collect();
    let total: f64 = density.iter().sum();
    fractions
        .iter()
        .map(|&f| {
            if total == 0.0 {
                return 0.0;
            }
            let cut = (1.0 - f) * extent;
            let tail: f64 = (0..grid.len())
                .filter(|&j| grid.radius(j).to_f64_lossy() > cut)
                .map(|j| density[j])
                .sum();
            tail / total
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessReport {
    /// `(s, ‖∂ₜˢu‖_H, sup_{x,t} |∂ₜˢu|)`
    pub norms: Vec<(f64, f64, f64)>,
    /// Peak amplitude of the highest regular mode over the largest peak amplitude.
    pub tail_ratio: f64,
    /// Set when the spectrum does not decay to `TAIL_FLAG` at the cutoff.
    pub flat_spectrum: bool,
}

pub const TAIL_FLAG: f64 = 1e-4;

pub fn smoothness_probe<T: Real>(p: &Problem<T>, u: &Field<T>, s_list: &[f64]) -> Result<SmoothnessReport> {
    let mut norms = Vec::new();
    for &s in s_list {
        let d = fractional_time_derivative(u, T::lit(s), p.omega());
        let h = h_inner_product(&d, &d, p.weights(), InnerKind::Potential)?.max(T::zero()).sqrt();
        let samples = p.time().synthesize(&d)?;
        let sup = samples.values.iter().fold(0.0_f64, |m, v| m.max(v.to_f64_lossy().abs()));
        norms.push((s, h.to_f64_lossy(), sup));
    }
    let peaks: Vec<f64> = u
        .iter_modes()
        .map(|(_, pr)| pr.iter().fold(0.0_f64, |m, c| m.max(c.norm().to_f64_lossy())))
        .collect();
    let max = peaks.iter().copied().fold(0.0, f64::max);
    let tail_ratio = match (peaks.last(), max > 0.0) {
        (Some(&last), true) => last / max,
        _ => 0.0,
    };
    Ok(SmoothnessReport {
        norms,
        tail_ratio,
        flat_spectrum: tail_ratio > TAIL_FLAG,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    /// Critical Lebesgue exponent for the declared kernel decay (infinite when α reaches the dimension bound).
    pub p_star: f64,
    /// `4 < p⋆`: the `L⁴` embedding is subcritical.
    pub subcritical: bool,
    /// Largest observed `‖u‖_{L⁴} / ‖u‖_H` over the random sample.
    pub constant: f64,
    pub samples: usize,
}

pub fn critical_exponent(geometry: Geometry, alpha: f64) -> f64 {
    let (num, dim) = match geometry {
        Geometry::Slab => (4.0, 2.0),
        Geometry::Cylindrical => (6.0, 3.0),
    };
    if alpha >= dim {
        f64::INFINITY
    } else {
        num / (dim - alpha)
    }
}

/// Random smooth fields supported on the regular modes, localized in space.
pub fn random_field<T: Real>(p: &Problem<T>, rng: &mut impl Rng) -> Field<T> {
    let grid = p.grid().clone();
    let extent = grid.extent().to_f64_lossy();
    let params: Vec<[f64; 5]> = p
        .regular()
        .iter()
        .map(|_| {
            [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(0.05..0.3) * extent,
                rng.gen_range(-0.3..0.3) * extent,
                rng.gen_range(0.0..3.0),
            ]
        })
        .collect();
    let modes = p.regular().clone();
    Field::from_fn(grid.clone(), modes.clone(), |k, j| {
        let i = modes.binary_search(&k).unwrap();
        let [a, b, width, center, freq] = params[i];
        let x = grid.nodes()[j].to_f64_lossy();
        let env = match grid.geometry() {
            Geometry::Slab => (-((x - center) / width).powi(2)).exp(),
            Geometry::Cylindrical => (x / width) * (-(x / width).powi(2)).exp(),
        };
        let osc = (freq * x / width).cos();
        Complex::new(T::lit(a * env * osc), T::lit(b * env))
    })
}

/// Empirical `L⁴ ≲ H` embedding constant over random fields (`h` replaced by 1).
pub fn embedding_diagnostic<T: Real>(p: &Problem<T>, samples: usize, seed: u64) -> Result<EmbeddingReport> {
    let unit = p.with_scaled_h(T::zero());
    let ones: Vec<T> = vec![T::one(); p.grid().len()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut constant = 0.0_f64;
    for _ in 0..samples {
        let u = random_field(p, &mut rng);
        let s = unit.time().synthesize(&u)?;
        let s4 = s.map(|_, v| v * v * v * v);
        let l4 = unit.sample_integral(&s4, |j| ones[j]).to_f64_lossy().powf(0.25);
        let h = unit.norm_sq(&u)?.to_f64_lossy().sqrt();
        if h > 0.0 {
            constant = constant.max(l4 / h);
        }
    }
    let p_star = critical_exponent(p.spec().geometry, p.spec().alpha);
    Ok(EmbeddingReport {
        p_star,
        subcritical: 4.0 < p_star,
        constant,
        samples,
    })
}

/// `|J(u) − ¼⟨u,u⟩_H|`.
pub fn energy_identity_defect<T: Real>(p: &Problem<T>, u: &Field<T>) -> Result<f64> {
    let quad = p.norm_sq(u)?;
    let quart = quartic_integral(p, u)?;
    let j = T::lit(0.5) * quad - T::lit(0.25) * quart;
    Ok((j - T::lit(0.25) * quad).abs().to_f64_lossy())
}

/// Defect of the physical profile equation `op_k ŵ_k − ω²k² (h N(w))^_k` over every stored
/// mode of `w`, relative to `‖op w‖`. For variant (i) this is the strong residual of `u`.
pub fn w_equation_residual<T: Real>(p: &Problem<T>, pair: &ProfilePair<T>) -> Result<StrongResidual> {
    if pair.variant == Variant::Retarded {
        return strong_residual(p, &pair.w1);
    }
    let w = pair.combined();
    let u = pair.surrogate(p.spec())?;
    let band = u.modes().last().copied().unwrap_or(0);
    let top = w.modes().last().copied().unwrap_or(0);
    let tg = TimeGrid::new((6 * band + 1).max(2 * top + 1))?;
    let s = tg.synthesize(&u)?;
    let h = p.h();
    let cube = tg.analyze(&s.map(|j, v| h[j] * v * v * v), p.grid().clone(), w.modes().clone())?;
    let weights = p.grid().weights();
    let omega = p.omega();
    let (mut num, mut den) = (0.0, 0.0);
    let mut per = Vec::new();
    for (i, &k) in w.modes().iter().enumerate() {
        let op = build_mode_operator(p.spec(), p.grid(), k)?;
        let wk = omega * T::from_usize_lossy(k);
        let aw = op.apply(w.profile(i));
        let r: Vec<_> = aw.iter().zip(cube.profile(i)).map(|(&a, &c)| a - c * (wk * wk)).collect();
        let rn = mode_norm_sq(weights, &r);
        num += rn;
        den += mode_norm_sq(weights, &aw);
        per.push((k, rn));
    }
    let reference = if den > 0.0 { den.sqrt() } else { 1.0 };
    Ok(StrongResidual {
        relative: num.sqrt() / reference,
        absolute: num.sqrt(),
        per_mode: per.into_iter().map(|(k, r)| (k, r.sqrt() / reference)).collect(),
    })
}

/// `max|𝒩∗w − u| / max|u|` on the problem's time grid.
pub fn variant_consistency<T: Real>(p: &Problem<T>, u: &Field<T>, pair: &ProfilePair<T>) -> Result<f64> {
    let back = pair.surrogate(p.spec())?;
    let a = p.time().synthesize(u)?;
    let b = p.time().synthesize(&back.remapped(u.modes().clone()))?;
    let scale = a.values.iter().fold(0.0_f64, |m, v| m.max(v.to_f64_lossy().abs()));
    let diff = a
        .values
        .iter()
        .zip(&b.values)
        .fold(0.0_f64, |m, (x, y)| m.max((*x - *y).to_f64_lossy().abs()));
    Ok(if scale > 0.0 { diff / scale } else { diff })
}

/// Relative centered-difference residuals of the first-order Maxwell system.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MaxwellResiduals {
    /// Stencil half-width used in every direction.
    pub delta: f64,
    /// `max|∇×E + ∂ₜB| / max|∂ₜB|`
    pub faraday: f64,
    /// `max|∇·B| / max Σ_i|∂_i B_i|`
    pub gauss_b: f64,
    /// `max|∇·D| / max Σ_i|∂_i D_i|` (zero when `D` has no varying divergence terms)
    pub gauss_d: f64,
    /// `max|∇×H − ∂ₜD| / max|∂ₜD|`: inherits the profile residual, so it is a diagnostic only.
    pub ampere: f64,
}

/// Deterministic probe points in the core of the domain (transverse radius up to
/// `core · extent`), spread over one period in `z` and `t`.
pub fn maxwell_probes(eval: &FieldEvaluator, extent: f64, core: f64, count: usize, seed: u64) -> Vec<[f64; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reach = core * extent;
    let period = eval.period();
    (0..count)
        .map(|_| {
            let (x, y) = match eval.geometry() {
                Geometry::Slab => (rng.gen_range(-reach..reach), 0.0),
                Geometry::Cylindrical => {
                    let r = reach * rng.gen_range(0.0_f64..1.0).sqrt();
                    let a = rng.gen_range(0.0..std::f64::consts::TAU);
                    (r * a.cos(), r * a.sin())
                }
            };
            [x, y, rng.gen_range(0.0..eval.c() * period), rng.gen_range(0.0..period)]
        })
        .collect()
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

pub fn maxwell_residuals(eval: &FieldEvaluator, probes: &[[f64; 4]], delta: f64) -> MaxwellResiduals {
    type Grad = [[f64; 3]; 4];
    // Centered differences of each field component along (x, y, z, t).
    let partials = |pos: [f64; 4]| -> [Grad; 4] {
        let mut out = [[[0.0; 3]; 4]; 4];
        for axis in 0..4 {
            let mut a = pos;
            let mut b = pos;
            a[axis] += delta;
            b[axis] -= delta;
            let (fa, fb) = (eval.sample(a), eval.sample(b));
            let pairs = [(fa.e, fb.e), (fa.b, fb.b), (fa.d, fb.d), (fa.h, fb.h)];
            for (f, (va, vb)) in pairs.iter().enumerate() {
                for c in 0..3 {
                    out[f][axis][c] = (va[c] - vb[c]) / (2.0 * delta);
                }
            }
        }
        out
    };
    let curl = |g: &Grad| [g[1][2] - g[2][1], g[2][0] - g[0][2], g[0][1] - g[1][0]];
    let norm = |v: [f64; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let rows: Vec<[f64; 8]> = probes
        .par_iter()
        .map(|&pos| {
            let [e, b, d, h] = partials(pos);
            let ce = curl(&e);
            let ch = curl(&h);
            let bt = b[3];
            let dt = d[3];
            let far = norm([ce[0] + bt[0], ce[1] + bt[1], ce[2] + bt[2]]);
            let amp = norm([ch[0] - dt[0], ch[1] - dt[1], ch[2] - dt[2]]);
            let div = |g: &Grad| (g[0][0] + g[1][1] + g[2][2]).abs();
            let div_scale = |g: &Grad| g[0][0].abs() + g[1][1].abs() + g[2][2].abs();
            [far, norm(bt), div(&b), div_scale(&b), div(&d), div_scale(&d), amp, norm(dt)]
        })
        .collect();
    let max = |i: usize| rows.iter().map(|r| r[i]).fold(0.0, f64::max);
    MaxwellResiduals {
        delta,
        faraday: ratio(max(0), max(1)),
        gauss_b: ratio(max(2), max(3)),
        gauss_d: ratio(max(4), max(5)),
        ampere: ratio(max(6), max(7)),
    }
}

/// `max |F(x, z + cT, t) − F|` and `max |F(x, z, t + T) − F|` over the probes, relative to
/// the largest field value seen.
pub fn periodicity_defect(eval: &FieldEvaluator, probes: &[[f64; 4]]) -> f64 {
    let flat = |s: &FieldSample| -> [f64; 12] {
        let mut o = [0.0; 12];
        o[..3].copy_from_slice(&s.e);
        o[3..6].copy_from_slice(&s.b);
        o[6..9].copy_from_slice(&s.d);
        o[9..].copy_from_slice(&s.h);
        o
    };
    let (mut diff, mut scale) = (0.0_f64, 0.0_f64);
    for &[x, y, z, t] in probes {
        let base = flat(&eval.sample([x, y, z, t]));
        let shifted = [
            flat(&eval.sample([x, y, z + eval.c() * eval.period(), t])),
            flat(&eval.sample([x, y, z, t + eval.period()])),
        ];
        scale = base.iter().fold(scale, |m, v| m.max(v.abs()));
        for s in &shifted {
            diff = s.iter().zip(&base).fold(diff, |m, (a, b)| m.max((a - b).abs()));
        }
    }
    ratio(diff, scale)
}

/// Knobs for [`residual_report`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportOptions {
    pub decay_fractions: Vec<f64>,
    pub smoothness_orders: Vec<f64>,
    pub probes: usize,
    /// Probe region as a fraction of the domain extent.
    pub core: f64,
    /// Coarse stencil half-width as a fraction of the grid spacing; the fine one is half of it.
    pub delta_fraction: f64,
    pub seed: u64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            decay_fractions: vec![0.1, 0.25, 0.5],
            smoothness_orders: vec![1.0, 2.0, 4.0],
            probes: 48,
            core: 0.2,
            delta_fraction: 0.25,
            seed: 7,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// Strong residual of the effective equation for `u`.
    pub profile_residual: f64,
    pub profile_residual_absolute: f64,
    pub per_mode: Vec<(usize, f64)>,
    /// Residual of the physical equation for `w` (includes the singular modes).
    pub w_residual: f64,
    /// `max|𝒩∗w − u| / max|u|`
    pub variant_consistency: f64,
    /// Coarse and fine stencil results.
    pub maxwell: MaxwellResiduals,
    pub maxwell_refined: MaxwellResiduals,
    pub periodicity_defect: f64,
    pub energy_identity_defect: f64,
    /// `(fraction, relative tail mass)`
    pub decay: Vec<(f64, f64)>,
    pub smoothness: SmoothnessReport,
}

impl ResidualReport {
    /// Every number in the report is finite and nonnegative.
    pub fn is_well_formed(&self) -> bool {
        let m = |r: &MaxwellResiduals| [r.delta, r.faraday, r.gauss_b, r.gauss_d, r.ampere];
        let mut all: Vec<f64> = vec![
            self.profile_residual,
            self.profile_residual_absolute,
            self.w_residual,
            self.variant_consistency,
            self.periodicity_defect,
            self.energy_identity_defect,
            self.smoothness.tail_ratio,
        ];
        all.extend(self.per_mode.iter().map(|p| p.1));
        all.extend(m(&self.maxwell));
        all.extend(m(&self.maxwell_refined));
        all.extend(self.decay.iter().flat_map(|d| [d.0, d.1]));
        all.extend(self.smoothness.norms.iter().flat_map(|n| [n.1, n.2]));
        all.iter().all(|v| v.is_finite() && *v >= 0.0)
    }
}

pub fn residual_report<T: Real>(
    p: &Problem<T>,
    u: &Field<T>,
    pair: &ProfilePair<T>,
    opts: &ReportOptions,
) -> Result<ResidualReport> {
    let strong = strong_residual(p, u)?;
    let w_res = w_equation_residual(p, pair)?;
    let eval = FieldEvaluator::new(pair, p.spec())?;
    let extent = p.grid().extent().to_f64_lossy();
    let probes = maxwell_probes(&eval, extent, opts.core, opts.probes, opts.seed);
    let delta = opts.delta_fraction * p.grid().spacing().to_f64_lossy();
    Ok(ResidualReport {
        profile_residual: strong.relative,
        profile_residual_absolute: strong.absolute,
        per_mode: strong.per_mode,
        w_residual: w_res.relative,
        variant_consistency: variant_consistency(p, u, pair)?,
        maxwell: maxwell_residuals(&eval, &probes, delta),
        maxwell_refined: maxwell_residuals(&eval, &probes, 0.5 * delta),
        periodicity_defect: periodicity_defect(&eval, &probes),
        energy_identity_defect: energy_identity_defect(p, u)?,
        decay: opts
            .decay_fractions
            .iter()
            .copied()
            .zip(decay_probe(u, &opts.decay_fractions))
            .collect(),
        smoothness: smoothness_probe(p, u, &opts.smoothness_orders)?,
    })
}

/// Minimum error reduction expected from halving the stencil of a second-order difference.
pub const MAXWELL_ORDER_FACTOR: f64 = 3.0;
/// Residuals this small (relative) count as exact and need not decrease further.
pub const MAXWELL_EXACT: f64 = 1e-11;

/// `true` when `fine` improves on `coarse` by [`MAXWELL_ORDER_FACTOR`], or both are at roundoff.
pub fn converges_at_order(coarse: f64, fine: f64) -> bool {
    (coarse <= MAXWELL_EXACT && fine <= MAXWELL_EXACT) || coarse >= MAXWELL_ORDER_FACTOR * fine
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantCheck {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

/// Pass/fail matrix over the end-to-end invariants.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InvariantSuite {
    pub checks: Vec<InvariantCheck>,
}

impl InvariantSuite {
    pub fn push(&mut self, name: &str, value: f64, threshold: f64, passed: bool, detail: impl Into<String>) {
        self.checks.push(InvariantCheck {
            name: name.to_string(),
            passed,
            value,
            threshold,
            detail: detail.into(),
        });
    }

    /// Records an artifact problem (unreadable file, checksum mismatch, ...) as a failure.
    pub fn push_failure(&mut self, name: &str, detail: impl Into<String>) {
        self.push(name, f64::NAN, f64::NAN, false, detail);
    }

    pub fn all_pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &InvariantCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Tolerances used by [`invariant_suite`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteTolerances {
    pub tol_grad: f64,
    pub residual: f64,
    pub tail_mass: f64,
    pub consistency: f64,
    pub periodicity: f64,
}

impl Default for SuiteTolerances {
    fn default() -> Self {
        Self {
            tol_grad: 1e-9,
            residual: 1e-6,
            tail_mass: 1e-3,
            consistency: 1e-10,
            periodicity: 1e-10,
        }
    }
}

/// Runs every end-to-end invariant on a solution and its residual report.
pub fn invariant_suite<T: Real>(
    p: &Problem<T>,
    u: &Field<T>,
    report: &ResidualReport,
    tol: &SuiteTolerances,
) -> Result<InvariantSuite> {
    let mut s = InvariantSuite::default();
    let assumptions = validate_assumptions(p.spec(), &p.grid().nodes_f64(), p.modes().k_max());
    let hard: Vec<String> = assumptions.hard_failures().map(|c| c.id.clone()).collect();
    s.push(
        "assumptions",
        hard.len() as f64,
        0.0,
        hard.is_empty(),
        format!("hard failures: {hard:?}"),
    );
    let e = energy(p, u)?;
    let total = e.total.to_f64_lossy();
    s.push("energy_positive", total, 0.0, total > 0.0, "J(u) > 0");
    let quad = e.quadratic.to_f64_lossy() * 2.0;
    let bound = 10.0 * tol.tol_grad * quad;
    s.push(
        "energy_identity",
        report.energy_identity_defect,
        bound,
        report.energy_identity_defect <= bound,
        "|J − ¼⟨u,u⟩_H| ≤ 10·tol_grad·⟨u,u⟩_H",
    );
    s.push(
        "strong_residual",
        report.profile_residual,
        tol.residual,
        report.profile_residual <= tol.residual,
        "relative strong residual",
    );
    s.push(
        "w_residual",
        report.w_residual,
        tol.residual,
        report.w_residual <= tol.residual,
        "physical profile equation",
    );
    let tail = report.decay.iter().find(|d| (d.0 - 0.1).abs() < 1e-12).map_or(f64::NAN, |d| d.1);
    s.push("tail_mass", tail, tol.tail_mass, tail <= tol.tail_mass, "outer 10% mass");
    s.push(
        "variant_consistency",
        report.variant_consistency,
        tol.consistency,
        report.variant_consistency <= tol.consistency,
        "𝒩∗w = u",
    );
    s.push(
        "periodicity",
        report.periodicity_defect,
        tol.periodicity,
        report.periodicity_defect <= tol.periodicity,
        "shifts by cT in z and T in t",
    );
    let (a, b) = (report.maxwell, report.maxwell_refined);
    for (name, c, f) in [
        ("faraday_order", a.faraday, b.faraday),
        ("gauss_b_order", a.gauss_b, b.gauss_b),
        ("gauss_d_order", a.gauss_d, b.gauss_d),
    ] {
        let r = if f > 0.0 { c / f } else { f64::INFINITY };
        s.push(name, r, MAXWELL_ORDER_FACTOR, converges_at_order(c, f), format!("{c:.3e} -> {f:.3e}"));
    }
    s.push(
        "report_well_formed",
        0.0,
        0.0,
        report.is_well_formed(),
        "all entries finite and nonnegative",
    );
    Ok(s)
}
