//! Ground states by Nehari-constrained, `H`-preconditioned gradient descent.

use std::sync::Arc;

use num_complex::Complex;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discretization::{Field, SpaceGrid, TimeGrid};
use crate::error::{Error, Result};
use crate::functional::{energy, gradient, nehari_point, quartic_integral, EnergyBreakdown, Problem};
use crate::kernels::{subharmonic_restrict, validate_assumptions, AssumptionReport, Geometry, MaterialSpec};
use crate::scalar::Real;
use crate::verification::{decay_probe, strong_residual};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Stop when `‖∇J(u)‖_H ≤ tol_grad · ‖u‖_H`.
    pub tol_grad: f64,
    pub max_iter: usize,
    pub initial_step: f64,
    pub backtrack: f64,
    pub armijo: f64,
    /// Smallest step tried before declaring that no descent direction exists.
    pub min_step: f64,
    /// Starting harmonic; defaults to the lowest regular mode.
    pub k0: Option<usize>,
    /// Width of the initial envelope.
    pub sigma: f64,
    pub seed: u64,
    pub max_restarts: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol_grad: 1e-9,
            max_iter: 20_000,
            initial_step: 1.0,
            backtrack: 0.5,
            armijo: 1e-4,
            min_step: 1e-12,
            k0: None,
            sigma: 2.0,
            seed: 0,
            max_restarts: 3,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidConfig(format!("solver: {what}")));
        if !(self.tol_grad > 0.0) {
            return bad("tol_grad must be positive");
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return bad("backtrack must lie in (0, 1)");
        }
        if !(self.armijo > 0.0 && self.armijo < 1.0) {
            return bad("armijo must lie in (0, 1)");
        }
        if !(self.initial_step > 0.0 && self.min_step > 0.0 && self.min_step < self.initial_step) {
            return bad("need 0 < min_step < initial_step");
        }
        if !(self.sigma > 0.0) {
            return bad("sigma must be positive");
        }
        if self.max_iter == 0 {
            return bad("max_iter must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub energy: f64,
    pub rel_grad: f64,
    pub step: f64,
}

/// Serializable outcome of one solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub geometry: Geometry,
    pub period: f64,
    pub omega: f64,
    pub speed: f64,
    pub regular_modes: Vec<usize>,
    pub energy: EnergyBreakdown<f64>,
    /// `⟨u,u⟩_H`
    pub norm_sq_h: f64,
    pub grad_norm: f64,
    pub rel_grad: f64,
    pub iterations: usize,
    pub restarts: usize,
    /// `max_s J(su) = ⟨u,u⟩²/(4∫hu⁴)` along the final ray.
    pub mountain_pass_level_estimate: f64,
    /// `|J(u) − ¼⟨u,u⟩_H|`
    pub energy_identity_defect: f64,
    /// Relative L² mass in the outer 10% of the domain.
    pub tail_mass: f64,
    /// Relative L² mass in the outer half of the domain.
    pub tail_mass_half: f64,
    /// Strong-form residual relative to `‖op u‖`.
    pub residual: f64,
    pub residual_per_mode: Vec<(usize, f64)>,
    /// Modes whose amplitude exceeds `ACTIVE_TOL` of the largest.
    pub active_modes: Vec<usize>,
    pub seed: u64,
    pub trace: Vec<IterationRecord>,
    pub assumptions: AssumptionReport,
}

#[derive(Clone, Debug)]
pub struct SolveReport<T: Real> {
    pub u: Field<T>,
    pub summary: SolveSummary,
}

/// Relative amplitude above which a mode counts as active.
pub const ACTIVE_TOL: f64 = 1e-8;
/// Maximum number of envelope adjustments when the initial quartic term is not positive.
const GUESS_ATTEMPTS: usize = 8;

/// Node index of the largest `h`, preferring the one nearest the domain centre.
fn argmax_h<T: Real>(p: &Problem<T>) -> usize {
    let h = p.h();
    let max = h.iter().copied().fold(T::neg_infinity(), T::max);
    let tol = max.abs() * T::lit(1e-12);
    let nodes = p.grid().nodes();
    (0..h.len())
        .filter(|&j| h[j] >= max - tol)
        .min_by(|&a, &b| nodes[a].abs().partial_cmp(&nodes[b].abs()).unwrap())
        .unwrap_or(0)
}

fn envelope<T: Real>(grid: &SpaceGrid<T>, center: T, sigma: T) -> Vec<T> {
    grid.nodes()
        .iter()
        .map(|&x| match grid.geometry() {
            Geometry::Slab => {
                let s = (x - center) / sigma;
                (-s * s).exp()
            }
            Geometry::Cylindrical => {
                let s = x / sigma;
                s * (-s * s).exp()
            }
        })
        .collect()
}

/// `u₀ = r Re[φ(x) e^{ik₀ωt}]` with a Gaussian envelope `φ`, scaled onto the Nehari manifold.
pub fn initial_guess<T: Real>(p: &Problem<T>, cfg: &SolverConfig) -> Result<Field<T>> {
    let k0 = cfg.k0.unwrap_or_else(|| p.modes().lowest());
    let i0 = p.regular().binary_search(&k0).map_err(|_| {
        Error::InvalidConfig(format!("initial mode {k0} is not regular (regular: {:?})", p.regular()))
    })?;
    let grid = p.grid();
    let nodes = grid.nodes();
    let mut center = nodes[argmax_h(p)];
    let mut sigma = T::lit(cfg.sigma);
    let mut last = 0.0;
    for attempt in 0..GUESS_ATTEMPTS {
        let phi = envelope(grid, center, sigma);
        let mut u = p.zero_field();
        for (c, &f) in u.profile_mut(i0).iter_mut().zip(&phi) {
            *c = Complex::new(T::lit(0.5) * f, T::zero());
        }
        let quad = p.norm_sq(&u)?;
        let quart = quartic_integral(p, &u)?;
        match nehari_point(quad, quart) {
            Ok(np) => return Ok(u.scaled(np.t)),
            Err(_) => {
                last = quart.to_f64_lossy();
                // Narrow the envelope and move it towards the largest positive h.
                sigma = sigma * T::lit(0.5);
                if attempt % 2 == 1 {
                    center = nodes[argmax_h(p)];
                }
            }
        }
    }
    Err(Error::NoPositiveQuartic(last))
}

struct Iterate<T: Real> {
    u: Field<T>,
    quad: T,
    energy: T,
    g: Field<T>,
    gnorm: T,
}

fn evaluate<T: Real>(p: &Problem<T>, u: Field<T>) -> Result<Iterate<T>> {
    let quad = p.norm_sq(&u)?;
    let quart = quartic_integral(p, &u)?;
    let g = gradient(p, &u)?;
    let gnorm = p.norm_sq(&g)?.max(T::zero()).sqrt();
    Ok(Iterate {
        energy: T::lit(0.5) * quad - T::lit(0.25) * quart,
        u,
        quad,
        g,
        gnorm,
    })
}

enum Outcome<T: Real> {
    Converged(Iterate<T>, usize),
    Stalled(usize),
}

fn descend<T: Real>(
    p: &Problem<T>,
    start: Field<T>,
    cfg: &SolverConfig,
    trace: &mut Vec<IterationRecord>,
    offset: usize,
) -> Result<Outcome<T>> {
    let tol = T::lit(cfg.tol_grad);
    let eps = T::EPS;
    let mut it = evaluate(p, start)?;
    for iter in 0..cfg.max_iter {
        let unorm = it.quad.sqrt();
        let rel = it.gnorm / unorm;
        if it.gnorm <= tol * unorm {
            return Ok(Outcome::Converged(it, iter));
        }
        let mut s = cfg.initial_step;
        let accepted = loop {
            if s < cfg.min_step {
                break None;
            }
            let st = T::lit(s);
            let cand = it.u.axpy(-st, &it.g)?;
            let quad = p.norm_sq(&cand)?;
            let quart = quartic_integral(p, &cand)?;
            let Ok(np) = nehari_point(quad, quart) else {
                // Left {∫hu⁴ > 0}: shorten the step until the iterate re-enters.
                s *= cfg.backtrack;
                continue;
            };
            let next = evaluate(p, cand.scaled(np.t))?;
            let predicted = T::lit(cfg.armijo) * st * it.gnorm * it.gnorm;
            let armijo = next.energy <= it.energy - predicted;
            // Relative decreases below roundoff cannot be resolved by the energy; accept on
            // gradient decrease instead, without ever letting the energy grow beyond roundoff.
            let unresolved = predicted <= T::lit(64.0) * eps * it.energy.abs()
                && next.energy <= it.energy + T::lit(8.0) * eps * it.energy.abs()
                && next.gnorm < it.gnorm;
            if armijo || unresolved {
                break Some((next, s));
            }
            s *= cfg.backtrack;
        };
        let Some((next, s)) = accepted else {
            return Ok(Outcome::Stalled(offset + iter));
        };
        assert!(
            next.energy <= it.energy + T::lit(16.0) * eps * it.energy.abs(),
            "energy increased across an accepted step"
        );
        trace.push(IterationRecord {
            iteration: offset + iter + 1,
            energy: next.energy.to_f64_lossy(),
            rel_grad: rel.to_f64_lossy(),
            step: s,
        });
        it = next;
    }
    let rel = it.gnorm / it.quad.sqrt();
    Err(Error::MaxIterExceeded {
        iterations: offset + cfg.max_iter,
        rel_grad: rel.to_f64_lossy(),
    })
}

/// Smoothly perturbed copy of `u` (random complex multiples of each mode profile).
fn perturb<T: Real>(p: &Problem<T>, u: &Field<T>, seed: u64) -> Result<Field<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reference = u.max_abs();
    let mut out = u.clone();
    let grid = p.grid().clone();
    let phi = envelope(&grid, grid.nodes()[argmax_h(p)], T::lit(2.0) * grid.extent() / T::lit(8.0));
    for i in 0..out.modes().len() {
        let a = Complex::new(T::lit(rng.gen_range(-0.1..0.1)), T::lit(rng.gen_range(-0.1..0.1))) * reference;
        for (c, &f) in out.profile_mut(i).iter_mut().zip(&phi) {
            *c = *c + a * f;
        }
    }
    let np = crate::functional::nehari_scale(p, &out)?;
    Ok(out.scaled(np.t))
}

/// Runs the descent from the default initial guess.
pub fn ground_state<T: Real>(p: &Problem<T>, cfg: &SolverConfig) -> Result<SolveReport<T>> {
    let start = initial_guess(p, cfg)?;
    ground_state_from(p, start, cfg)
}

/// Runs the descent from a given starting field (rescaled onto the Nehari manifold first).
pub fn ground_state_from<T: Real>(p: &Problem<T>, start: Field<T>, cfg: &SolverConfig) -> Result<SolveReport<T>> {
    cfg.validate()?;
    let assumptions = validate_assumptions(p.spec(), &p.grid().nodes_f64(), p.modes().k_max());
    if let Some(bad) = assumptions.hard_failures().next() {
        return Err(Error::AssumptionFailed {
            id: bad.id.clone(),
            detail: bad.detail.clone(),
        });
    }
    let np = crate::functional::nehari_scale(p, &start)?;
    let start = start.scaled(np.t);
    let mut trace = Vec::new();
    let mut offset = 0;
    for restart in 0..=cfg.max_restarts {
        let from = if restart == 0 {
            start.clone()
        } else {
            match perturb(p, &start, cfg.seed.wrapping_add(restart as u64)) {
                Ok(u) => u,
                Err(Error::NoPositiveQuartic(_)) => continue,
                Err(e) => return Err(e),
            }
        };
        match descend(p, from, cfg, &mut trace, offset)? {
            Outcome::Converged(it, iters) => {
                let summary = summarize(p, &it, offset + iters, restart, cfg.seed, trace, assumptions)?;
                return Ok(SolveReport { u: it.u, summary });
            }
            Outcome::Stalled(at) => offset = at,
        }
    }
    Err(Error::NoDescentDirection { iteration: offset })
}

fn summarize<T: Real>(
    p: &Problem<T>,
    it: &Iterate<T>,
    iterations: usize,
    restarts: usize,
    seed: u64,
    trace: Vec<IterationRecord>,
    assumptions: AssumptionReport,
) -> Result<SolveSummary> {
    let e = energy(p, &it.u)?;
    let quart = T::lit(4.0) * e.quartic;
    let mp = nehari_point(it.quad, quart)?.energy;
    let tails = decay_probe(&it.u, &[0.1, 0.5]);
    let residual = strong_residual(p, &it.u)?;
    let f = |x: T| x.to_f64_lossy();
    Ok(SolveSummary {
        geometry: p.spec().geometry,
        period: f(p.spec().period),
        omega: f(p.omega()),
        speed: f(p.spec().c),
        regular_modes: p.regular().to_vec(),
        energy: EnergyBreakdown {
            quadratic: f(e.quadratic),
            quartic: f(e.quartic),
            total: f(e.total),
        },
        norm_sq_h: f(it.quad),
        grad_norm: f(it.gnorm),
        rel_grad: f(it.gnorm / it.quad.sqrt()),
        iterations,
        restarts,
        mountain_pass_level_estimate: f(mp),
        energy_identity_defect: f((e.total - T::lit(0.25) * it.quad).abs()),
        tail_mass: tails[0],
        tail_mass_half: tails[1],
        residual: residual.relative,
        residual_per_mode: residual.per_mode,
        active_modes: active_modes(&it.u),
        seed,
        trace,
        assumptions,
    })
}

/// Modes whose peak amplitude exceeds `ACTIVE_TOL` times the largest one.
pub fn active_modes<T: Real>(u: &Field<T>) -> Vec<usize> {
    let amp: Vec<(usize, f64)> = u
        .iter_modes()
        .map(|(k, p)| (k, p.iter().fold(0.0_f64, |m, c| m.max(c.norm().to_f64_lossy()))))
        .collect();
    let max = amp.iter().fold(0.0_f64, |m, a| m.max(a.1));
    amp.into_iter().filter(|a| a.1 > ACTIVE_TOL * max).map(|a| a.0).collect()
}

/// Largest `m` dividing every active physical mode: the minimal period is `T/m`.
pub fn period_divisor(physical_modes: &[usize]) -> usize {
    physical_modes.iter().fold(0, |g, &k| g.gcd(&k)).max(1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyMember {
    pub n: usize,
    /// Active modes in units of the base frequency `ω = 2π/T`.
    pub physical_modes: Vec<usize>,
    /// Detected minimal period as a fraction of `T` (i.e. `1/m`).
    pub minimal_period: f64,
    pub summary: SolveSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distinctness {
    pub a: usize,
    pub b: usize,
    pub distinct: bool,
    pub by_period: bool,
    /// Relative L² distance after optimal time shift (and sign).
    pub l2_distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub members: Vec<FamilyMember>,
    /// `(n, reason)` for subharmonics that could not be run.
    pub skipped: Vec<(usize, String)>,
    pub pairs: Vec<Distinctness>,
}

impl FamilyReport {
    pub fn all_distinct(&self) -> bool {
        self.pairs.iter().all(|p| p.distinct)
    }
}

pub const DISTINCT_TOL: f64 = 1e-6;

/// One solution of the family, with coefficients indexed by physical mode.
struct PhysicalField {
    n: usize,
    modes: Vec<usize>,
    data: Vec<Vec<Complex<f64>>>,
    weights: Vec<f64>,
}

impl PhysicalField {
    fn new<T: Real>(n: usize, u: &Field<T>) -> Self {
        let f = u.to_f64();
        Self {
            n,
            modes: f.modes().iter().map(|k| k * n).collect(),
            data: f.iter_modes().map(|(_, p)| p.to_vec()).collect(),
            weights: f.grid().weights().to_vec(),
        }
    }

    fn norm_sq(&self) -> f64 {
        self.data
            .iter()
            .map(|p| 2.0 * p.iter().zip(&self.weights).map(|(c, w)| w * c.norm_sqr()).sum::<f64>())
            .sum()
    }
}

/// `min_{τ, ±} ‖a − (±) S_τ b‖ / max(‖a‖, ‖b‖)` over time shifts `S_τ`.
fn aligned_distance(a: &PhysicalField, b: &PhysicalField) -> f64 {
    let mut all: Vec<usize> = a.modes.iter().chain(&b.modes).copied().collect();
    all.sort_unstable();
    all.dedup();
    fn get(f: &PhysicalField, k: usize) -> Option<&[Complex<f64>]> {
        f.modes.iter().position(|&m| m == k).map(|i| f.data[i].as_slice())
    }
    let pairs: Vec<(usize, Option<&[Complex<f64>]>, Option<&[Complex<f64>]>)> =
        all.iter().map(|&k| (k, get(a, k), get(b, k))).collect();
    let zero = Complex::new(0.0, 0.0);
    let dist = |theta: f64, sign: f64| -> f64 {
        let mut acc = 0.0;
        for &(k, pa, pb) in &pairs {
            let rot = Complex::from_polar(sign, k as f64 * theta);
            for j in 0..a.weights.len() {
                let x = pa.map_or(zero, |p| p[j]);
                let y = pb.map_or(zero, |p| p[j] * rot);
                acc += 2.0 * a.weights[j] * (x - y).norm_sqr();
            }
        }
        acc
    };
    let scale = a.norm_sq().max(b.norm_sq()).max(f64::MIN_POSITIVE);
    let kmax = *all.last().unwrap_or(&1) as f64;
    let samples = (64.0 * kmax) as usize;
    let mut best = f64::INFINITY;
    for sign in [1.0, -1.0] {
        let coarse = (0..samples)
            .map(|i| 2.0 * std::f64::consts::PI * i as f64 / samples as f64)
            .map(|t| (t, dist(t, sign)))
            .fold((0.0, f64::INFINITY), |m, v| if v.1 < m.1 { v } else { m });
        // Golden-section refinement inside the bracketing cell.
        let h = 2.0 * std::f64::consts::PI / samples as f64;
        let (mut lo, mut hi) = (coarse.0 - h, coarse.0 + h);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..60 {
            let x1 = hi - g * (hi - lo);
            let x2 = lo + g * (hi - lo);
            if dist(x1, sign) < dist(x2, sign) {
                hi = x2;
            } else {
                lo = x1;
            }
        }
        best = best.min(coarse.1).min(dist(0.5 * (lo + hi), sign));
    }
    (best.max(0.0) / scale).sqrt()
}

/// Solves the `T/n`-periodic problems for each `n` in `n_list`.
///
/// Each restricted problem keeps the physical mode cutoff: modes `k ≤ k_max / n` of the
/// restricted torus, i.e. physical harmonics `nk ≤ k_max`.
pub fn subharmonic_family<T: Real>(
    spec: &MaterialSpec<T>,
    grid: Arc<SpaceGrid<T>>,
    time: &TimeGrid<T>,
    k_max: usize,
    cfg: &SolverConfig,
    n_list: &[usize],
) -> Result<FamilyReport> {
    let jobs: Vec<(usize, Result<SolveReport<T>>)> = n_list
        .par_iter()
        .map(|&n| {
            let run = || -> Result<SolveReport<T>> {
                let k = k_max / n.max(1);
                if k == 0 {
                    return Err(Error::EmptyRegularSet);
                }
                let restricted = subharmonic_restrict(spec, n)?;
                let p = Problem::with_cutoff(restricted, grid.clone(), k, time.clone())?;
                ground_state(&p, cfg)
            };
            (n, run())
        })
        .collect();
    let mut members = Vec::new();
    let mut fields = Vec::new();
    let mut skipped = Vec::new();
    for (n, res) in jobs {
        match res {
            Ok(rep) => {
                let physical: Vec<usize> = rep.summary.active_modes.iter().map(|k| k * n).collect();
                let m = period_divisor(&physical);
                fields.push(PhysicalField::new(n, &rep.u));
                members.push(FamilyMember {
                    n,
                    physical_modes: physical,
                    minimal_period: 1.0 / m as f64,
                    summary: rep.summary,
                });
            }
            Err(Error::EmptyRegularSet) => skipped.push((n, "no regular modes for this subharmonic".to_string())),
            Err(e) => return Err(e),
        }
    }
    let mut pairs = Vec::new();
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            let by_period = members[i].minimal_period != members[j].minimal_period;
            let d = aligned_distance(&fields[i], &fields[j]);
            pairs.push(Distinctness {
                a: fields[i].n,
                b: fields[j].n,
                distinct: by_period || d > DISTINCT_TOL,
                by_period,
                l2_distance: d,
            });
        }
    }
    Ok(FamilyReport {
        members,
        skipped,
        pairs,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparisonVerdict {
    /// Full-problem level strictly below the periodic one.
    Holds,
    Violated,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicComparison {
    pub c_gs: f64,
    pub c_gs_per: f64,
    /// Full-problem Nehari level on the ray through the periodic ground state.
    pub ray_level: f64,
    pub verdict: ComparisonVerdict,
    pub full: SolveSummary,
    pub periodic: SolveSummary,
}

/// Compares the ground-state level of the full problem with that of its periodic background.
/// The full solve is warm-started on the ray through the periodic ground state.
pub fn periodic_comparison<T: Real>(p: &Problem<T>, cfg: &SolverConfig) -> Result<PeriodicComparison> {
    if !p.spec().has_split() {
        return Err(Error::InvalidConfig("periodic comparison needs a periodic/localized split".into()));
    }
    let per = Problem::new(p.spec().periodic_part(), p.grid().clone(), p.modes().clone(), p.time().clone())?;
    let rp = ground_state(&per, cfg)?;
    let ray = crate::functional::nehari_scale(p, &rp.u)?;
    let rf = ground_state_from(p, rp.u.clone(), cfg)?;
    let (a, b) = (rf.summary.energy.total, rp.summary.energy.total);
    let band = 10.0 * cfg.tol_grad * a.abs().max(b.abs());
    let verdict = if (a - b).abs() < band {
        ComparisonVerdict::Inconclusive
    } else if a < b {
        ComparisonVerdict::Holds
    } else {
        ComparisonVerdict::Violated
    };
    Ok(PeriodicComparison {
        c_gs: a,
        c_gs_per: b,
        ray_level: ray.energy.to_f64_lossy(),
        verdict,
        full: rf.summary,
        periodic: rp.summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{CoefficientField, LinearKernelField, Profile, TorusMeasure, Variant};

    fn vacuum(h: f64) -> Problem<f64> {
        let t = 2.0 * std::f64::consts::PI;
        let spec = MaterialSpec {
            geometry: Geometry::Slab,
            c: 0.8,
            period: t,
            linear: LinearKernelField::vacuum(),
            h: CoefficientField::from_profile(Profile::Constant { value: h }),
            nu: TorusMeasure::fourier_table(t, &[(1, 1.0), (3, 0.5)]).unwrap(),
            variant: Variant::Retarded,
            alpha: 2.0,
            beta: 2.0,
        };
        let grid = Arc::new(SpaceGrid::slab(128, 12.0).unwrap());
        Problem::with_cutoff(spec, grid, 3, TimeGrid::new(16).unwrap()).unwrap()
    }

    #[test]
    fn guess_lies_on_nehari_manifold() {
        let p = vacuum(1.0);
        let u = initial_guess(&p, &SolverConfig::default()).unwrap();
        let d = crate::functional::derivative(&p, &u, &u).unwrap();
        assert!(d.abs() < 1e-12 * p.norm_sq(&u).unwrap());
        assert_eq!(active_modes(&u), vec![1]);
    }

    #[test]
    fn guess_fails_for_negative_h() {
        let p = vacuum(-1.0);
        assert!(matches!(initial_guess(&p, &SolverConfig::default()), Err(Error::NoPositiveQuartic(_))));
    }

    #[test]
    fn converges_with_energy_identity() {
        let p = vacuum(1.0);
        let cfg = SolverConfig { tol_grad: 1e-8, ..Default::default() };
        let r = ground_state(&p, &cfg).unwrap();
        let s = &r.summary;
        assert!(s.energy.total > 0.0);
        assert!(s.rel_grad <= 1e-8);
        assert!(s.energy_identity_defect <= 1e-7 * s.norm_sq_h);
        assert!(s.trace.windows(2).all(|w| w[1].energy <= w[0].energy * (1.0 + 1e-14)));
    }

    #[test]
    fn period_divisor_examples() {
        assert_eq!(period_divisor(&[2, 6, 10]), 2);
        assert_eq!(period_divisor(&[1, 3]), 1);
        assert_eq!(period_divisor(&[3, 9]), 3);
    }
}
