//! Solves the ground state described by a run config and prints the summary.
//!
//! `cargo run --release -p breather-core --example solve_config -- configs/slab_periodic.json`

use std::time::Instant;

use breather::{ground_state, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).ok_or("usage: solve_config CONFIG")?;
    let cfg = RunConfig::load(path.as_ref())?;
    let p = cfg.problem::<f64>()?;
    let start = Instant::now();
    let r = ground_state(&p, &cfg.solver)?;
    let s = &r.summary;
    println!(
        "J = {:.12e}  <u,u>/4 = {:.12e}  iterations = {}  residual = {:.3e}  tail = {:.3e}  active = {:?}  ({:.1?})",
        s.energy.total,
        s.norm_sq_h / 4.0,
        s.iterations,
        s.residual,
        s.tail_mass,
        s.active_modes,
        start.elapsed()
    );
    Ok(())
}
