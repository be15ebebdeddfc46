//! `breather`: validate a material, solve for the ground-state breather, export fields,
//! and summarize the results.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use breather::config::RunConfig;
use breather::discretization::io::{read_field, write_field};
use breather::kernels::{validate_assumptions, AssumptionReport, Geometry, Verdict};
use breather::reconstruction::{profile_from_u, FieldEvaluator};
use breather::solver::{ground_state, subharmonic_family};
use breather::verification::{invariant_suite, residual_report, InvariantSuite, ResidualReport};
use breather::{Error, Field64, Problem64, SolveSummary};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

/// Exit codes: 0 success, 1 assumption or verification failure, 2 usage or config error,
/// 3 solver did not converge.
#[derive(Debug)]
enum Failure {
    Verify(String),
    Usage(String),
    Solver(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verify(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Solver(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Verify(m) | Failure::Usage(m) | Failure::Solver(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Json(_)
            | Error::InvalidConfig(_)
            | Error::InvalidGrid(_)
            | Error::AliasRisk { .. }
            | Error::KernelTruncated { .. }
            | Error::Io(_) => Failure::Usage(msg),
            Error::MaxIterExceeded { .. } | Error::NoDescentDirection { .. } | Error::NoPositiveQuartic(_) => {
                Failure::Solver(msg)
            }
            _ => Failure::Verify(msg),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

#[derive(Parser, Debug)]
#[command(name = "breather", version, about = "Traveling breather ground states in nonlinear waveguides")]
struct Cli {
    /// Suppress progress output on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    /// Upper bound on worker threads.
    #[arg(long, env = "BREATHER_THREADS", global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Override the waveguide geometry of the material.
    #[arg(long)]
    geometry: Option<Geometry>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the material assumptions; exit 1 on any hard failure.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Solve, reconstruct the fields, verify and write all artifacts.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Output directory (overrides the config).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated subharmonic indices, e.g. `1,2,3`.
        #[arg(long, value_delimiter = ',')]
        subharmonics: Option<Vec<usize>>,
    },
    /// Summarize the artifacts of a previous solve (read-only).
    Report {
        /// Directory written by `solve`.
        #[arg(long)]
        out: PathBuf,
        /// Configuration to use instead of the copy stored next to the artifacts.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write plot-ready CSV tables into this directory.
        #[arg(long)]
        plots: Option<PathBuf>,
    },
}

struct Log {
    quiet: bool,
}

impl Log {
    fn info(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }
}

const CONFIG_COPY: &str = "config.json";
const U_FILE: &str = "u.field";
const W_FILE: &str = "w.field";
const SOLVE_REPORT: &str = "solve_report.json";
const FIELDS_CSV: &str = "fields.csv";
const FIELDS_META: &str = "fields.json";
const RESIDUAL_REPORT: &str = "residual_report.json";
const FAMILY_REPORT: &str = "family_report.json";

fn load_config(common: &Common) -> Outcome<RunConfig> {
    if !common.config.exists() {
        return Err(Failure::Usage(format!("config file {} does not exist", common.config.display())));
    }
    let mut cfg = RunConfig::load(&common.config)?;
    if let Some(g) = common.geometry {
        cfg.override_geometry(g)?;
    }
    Ok(cfg)
}

fn assumptions(cfg: &RunConfig) -> Outcome<AssumptionReport> {
    let spec = cfg.material::<f64>()?;
    let grid = cfg.grid::<f64>()?;
    Ok(validate_assumptions(&spec, &grid.nodes_f64(), cfg.k_max))
}

fn print_assumptions(report: &AssumptionReport, log: &Log) {
    for c in &report.checks {
        let tag = match c.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail if c.hard => "FAIL",
            Verdict::Fail => "warn",
            Verdict::NotApplicable => "n/a ",
        };
        let witness = c
            .witness
            .as_ref()
            .map(|w| format!(" (witness k={:?} x={:?} value={:.3e})", w.k, w.x, w.value))
            .unwrap_or_default();
        log.info(format!("[{tag}] {:<14} {}{witness}", c.id, c.detail));
    }
}

fn cmd_validate(common: &Common, log: &Log) -> Outcome<()> {
    let cfg = load_config(common)?;
    let report = assumptions(&cfg)?;
    print_assumptions(&report, log);
    println!("{}", serde_json::to_string_pretty(&report)?);
    if report.passes_hard() {
        Ok(())
    } else {
        let ids: Vec<_> = report.hard_failures().map(|c| c.id.as_str()).collect();
        Err(Failure::Verify(format!("hard assumption failures: {}", ids.join(", "))))
    }
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Outcome<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(&serde_json::to_vec_pretty(value)?)?;
    f.write_all(b"\n")?;
    Ok(())
}

/// Profile, fields and residual checks shared by `solve` and `report`.
fn verify(cfg: &RunConfig, p: &Problem64, u: &Field64) -> Outcome<(ResidualReport, InvariantSuite)> {
    let pair = profile_from_u(p, u, Some(cfg.k_sing()))?;
    let report = residual_report(p, u, &pair, &cfg.report)?;
    let mut tol = cfg.tolerances.clone();
    tol.tol_grad = cfg.solver.tol_grad;
    let suite = invariant_suite(p, u, &report, &tol)?;
    Ok((report, suite))
}

fn cmd_solve(
    common: &Common,
    out: Option<PathBuf>,
    seed: Option<u64>,
    subharmonics: Option<Vec<usize>>,
    log: &Log,
) -> Outcome<()> {
    let mut cfg = load_config(common)?;
    if let Some(s) = seed {
        cfg.solver.seed = s;
    }
    if let Some(list) = subharmonics {
        cfg.subharmonics = list;
    }
    cfg.check()?;
    let out = out
        .or_else(|| cfg.output.dir.clone())
        .ok_or_else(|| Failure::Usage("no output directory (use --out or output.dir)".into()))?;
    let report = assumptions(&cfg)?;
    print_assumptions(&report, log);
    if !report.passes_hard() {
        let ids: Vec<_> = report.hard_failures().map(|c| c.id.as_str()).collect();
        return Err(Failure::Verify(format!("hard assumption failures: {}", ids.join(", "))));
    }
    fs::create_dir_all(&out)?;
    cfg.output.dir = Some(out.clone());
    write_json(&out.join(CONFIG_COPY), &cfg)?;

    let p = cfg.problem::<f64>()?;
    log.info(format!(
        "solving: {} grid, N = {}, K = {}, M = {}, regular modes {:?}",
        p.spec().geometry,
        p.grid().cells(),
        cfg.k_max,
        p.time().len(),
        p.regular()
    ));
    let sol = ground_state(&p, &cfg.solver)?;
    let s = &sol.summary;
    log.info(format!(
        "converged after {} iterations: J = {:.10e}, rel. gradient {:.2e}, residual {:.2e}",
        s.iterations, s.energy.total, s.rel_grad, s.residual
    ));
    let extra = json!({
        "period": s.period,
        "speed": s.speed,
        "seed": s.seed,
        "variant": p.spec().variant,
    });
    write_field(&out.join(U_FILE), &sol.u, extra.clone())?;
    write_json(&out.join(SOLVE_REPORT), s)?;

    let pair = profile_from_u(&p, &sol.u, Some(cfg.k_sing()))?;
    write_field(&out.join(W_FILE), &pair.combined(), extra)?;
    let lattice = cfg.lattice()?;
    let fields = FieldEvaluator::new(&pair, p.spec())?.assemble(&lattice);
    fields.save_csv(&out.join(FIELDS_CSV))?;
    write_json(
        &out.join(FIELDS_META),
        &json!({
            "geometry": fields.geometry,
            "c": fields.c,
            "period": fields.period,
            "normalization": fields.normalization,
            "lattice": fields.lattice,
            "samples": fields.samples.len(),
            "profile": pair.stats(p.time().len()),
        }),
    )?;

    let (residuals, suite) = verify(&cfg, &p, &sol.u)?;
    write_json(&out.join(RESIDUAL_REPORT), &json!({ "residuals": residuals, "suite": suite }))?;

    if !cfg.subharmonics.is_empty() {
        let family = subharmonic_family(
            p.spec(),
            p.grid().clone(),
            p.time(),
            cfg.k_max,
            &cfg.solver,
            &cfg.subharmonics,
        )?;
        for m in &family.members {
            log.info(format!(
                "n = {}: J = {:.10e}, physical modes {:?}, minimal period T·{}",
                m.n, m.summary.energy.total, m.physical_modes, m.minimal_period
            ));
        }
        for pr in &family.pairs {
            log.info(format!(
                "n = {} vs n = {}: {} (distance {:.3e})",
                pr.a,
                pr.b,
                if pr.distinct { "distinct" } else { "not distinct" },
                pr.l2_distance
            ));
        }
        write_json(&out.join(FAMILY_REPORT), &family)?;
    }

    report_suite(&suite, log)
}

fn report_suite(suite: &InvariantSuite, log: &Log) -> Outcome<()> {
    for c in &suite.checks {
        log.info(format!(
            "[{}] {:<20} {:.3e} (threshold {:.3e}) {}",
            if c.passed { "pass" } else { "FAIL" },
            c.name,
            c.value,
            c.threshold,
            c.detail
        ));
    }
    if suite.all_pass() {
        Ok(())
    } else {
        let names: Vec<_> = suite.failures().map(|c| c.name.as_str()).collect();
        Err(Failure::Verify(format!("verification failed: {}", names.join(", "))))
    }
}

fn write_plots(dir: &Path, u: &Field64, summary: &SolveSummary, residuals: &ResidualReport) -> Outcome<()> {
    fs::create_dir_all(dir)?;
    let mut modes = String::from("k,peak_abs,l2_mass\n");
    let w = u.grid().weights();
    let mut rows: Vec<(usize, f64, f64)> = u
        .iter_modes()
        .map(|(k, prof)| {
            let peak = prof.iter().fold(0.0_f64, |m, c| m.max(c.norm()));
            let mass: f64 = prof.iter().zip(w).map(|(c, wj)| 2.0 * wj * c.norm_sqr()).sum();
            (k, peak, mass)
        })
        .collect();
    rows.sort_by_key(|r| r.0);
    for (k, peak, mass) in rows {
        modes.push_str(&format!("{k},{peak:.17e},{mass:.17e}\n"));
    }
    fs::write(dir.join("modes.csv"), modes)?;

    let mut prof = String::from("x");
    for &k in u.modes().iter() {
        prof.push_str(&format!(",re_{k},im_{k}"));
    }
    prof.push('\n');
    for (j, x) in u.grid().nodes().iter().enumerate() {
        prof.push_str(&format!("{x:.17e}"));
        for (_, p) in u.iter_modes() {
            prof.push_str(&format!(",{:.17e},{:.17e}", p[j].re, p[j].im));
        }
        prof.push('\n');
    }
    fs::write(dir.join("profiles.csv"), prof)?;

    let mut res = String::from("quantity,value\n");
    let entries = [
        ("energy", summary.energy.total),
        ("quarter_norm_sq", summary.norm_sq_h / 4.0),
        ("energy_identity_defect", residuals.energy_identity_defect),
        ("profile_residual", residuals.profile_residual),
        ("w_residual", residuals.w_residual),
        ("faraday", residuals.maxwell.faraday),
        ("faraday_refined", residuals.maxwell_refined.faraday),
        ("gauss_b", residuals.maxwell.gauss_b),
        ("gauss_b_refined", residuals.maxwell_refined.gauss_b),
        ("gauss_d", residuals.maxwell.gauss_d),
        ("gauss_d_refined", residuals.maxwell_refined.gauss_d),
        ("ampere", residuals.maxwell.ampere),
    ];
    for (name, v) in entries {
        res.push_str(&format!("{name},{v:.17e}\n"));
    }
    for (k, r) in &residuals.per_mode {
        res.push_str(&format!("residual_mode_{k},{r:.17e}\n"));
    }
    fs::write(dir.join("residuals.csv"), res)?;
    Ok(())
}

fn cmd_report(out: &Path, config: Option<PathBuf>, plots: Option<PathBuf>, log: &Log) -> Outcome<()> {
    let cfg_path = config.unwrap_or_else(|| out.join(CONFIG_COPY));
    for f in [cfg_path.as_path(), &out.join(U_FILE), &out.join(SOLVE_REPORT)] {
        if !f.exists() {
            return Err(Failure::Usage(format!("missing artifact {}", f.display())));
        }
    }
    let cfg = RunConfig::load(&cfg_path)?;
    let summary: SolveSummary = serde_json::from_slice(&fs::read(out.join(SOLVE_REPORT))?)?;
    let p = cfg.problem::<f64>()?;
    let loaded = read_field::<f64>(&out.join(U_FILE)).and_then(|(u, _)| {
        // Re-home the field on the problem's grid so that layouts compare by value.
        let mut v = p.zero_field();
        if u.modes() != v.modes() || u.grid().as_ref() != p.grid().as_ref() {
            return Err(Error::ModeMismatch);
        }
        v.data_mut().copy_from_slice(u.data());
        Ok(v)
    });
    let u = match loaded {
        Ok(u) => u,
        Err(e) => {
            let mut suite = InvariantSuite::default();
            suite.push_failure("field_file", e.to_string());
            println!("{}", serde_json::to_string_pretty(&suite)?);
            return report_suite(&suite, log);
        }
    };
    let (residuals, suite) = verify(&cfg, &p, &u)?;
    let quarter = summary.norm_sq_h / 4.0;
    println!("geometry           {}", summary.geometry);
    println!("regular modes      {:?}", summary.regular_modes);
    println!("active modes       {:?}", summary.active_modes);
    println!("J(u)               {:.12e}", summary.energy.total);
    println!("<u,u>_H / 4        {:.12e}", quarter);
    println!("defect             {:.3e}", (summary.energy.total - quarter).abs());
    println!("iterations         {}", summary.iterations);
    println!("strong residual    {:.3e}", residuals.profile_residual);
    println!("w residual         {:.3e}", residuals.w_residual);
    println!(
        "maxwell (coarse)   faraday {:.3e}  div B {:.3e}  div D {:.3e}  ampere {:.3e}",
        residuals.maxwell.faraday, residuals.maxwell.gauss_b, residuals.maxwell.gauss_d, residuals.maxwell.ampere
    );
    println!(
        "maxwell (fine)     faraday {:.3e}  div B {:.3e}  div D {:.3e}  ampere {:.3e}",
        residuals.maxwell_refined.faraday,
        residuals.maxwell_refined.gauss_b,
        residuals.maxwell_refined.gauss_d,
        residuals.maxwell_refined.ampere
    );
    for (f, t) in &residuals.decay {
        println!("tail mass {:>4.0}%    {:.3e}", f * 100.0, t);
    }
    println!("mode amplitudes (k, peak |û_k|):");
    let mut amps: Vec<(usize, f64)> = u
        .iter_modes()
        .map(|(k, prof)| (k, prof.iter().fold(0.0_f64, |m, c| m.max(c.norm()))))
        .collect();
    amps.sort_by_key(|a| a.0);
    for (k, a) in amps {
        println!("  {k:>4}  {a:.6e}");
    }
    if let Some(dir) = plots {
        write_plots(&dir, &u, &summary, &residuals)?;
        log.info(format!("plot tables written to {}", dir.display()));
    }
    report_suite(&suite, log)
}

fn run(cli: Cli) -> Outcome<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let log = Log { quiet: cli.quiet };
    match cli.command {
        Command::Validate { common } => cmd_validate(&common, &log),
        Command::Solve {
            common,
            out,
            seed,
            subharmonics,
        } => cmd_solve(&common, out, seed, subharmonics, &log),
        Command::Report { out, config, plots } => cmd_report(&out, config, plots, &log),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
