use std::f64::consts::PI;

use qbm_core::{evolve_squeezed, PhaseSpacePoint, SqueezeParam};
use rayon::prelude::*;
use serde_json::json;

use crate::context::{pick, resolve_times, Context, TimeArgs};
use crate::failure::Failure;
use crate::output::{display, num};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Real part of the initial squeezing parameter C [default: 1, coherent].
    #[arg(long, allow_hyphen_values = true)]
    pub c_re: Option<f64>,
    /// Imaginary part of C [default: 0].
    #[arg(long, allow_hyphen_values = true)]
    pub c_im: Option<f64>,
    /// Initial mean position [default: 0].
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<f64>,
    /// Initial mean momentum [default: 0].
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<f64>,
    #[command(flatten)]
    pub time: TimeArgs,
}

pub fn run(ctx: &Context, args: &Args) -> Result<(), Failure> {
    let params = ctx.params()?;
    let cfg = &ctx.cfg.evolve;
    let c = SqueezeParam::from_parts(pick(args.c_re, cfg.c_re, 1.0), pick(args.c_im, cfg.c_im, 0.0))
        .map_err(|e| Failure::Config(format!("evolve: {e}")))?;
    let center = PhaseSpacePoint::new(pick(args.x, cfg.x, 0.0), pick(args.p, cfg.p, 0.0));
    let default: Vec<f64> = (0..=8).map(|i| i as f64 * PI / (2.0 * params.omega)).collect();
    let times = resolve_times(
        "evolve",
        &args.time,
        cfg.times.as_deref(),
        (cfg.t_max, cfg.steps),
        params.omega,
        &default,
    )?;
    let rows = times
        .par_iter()
        .map(|&t| {
            let dm = evolve_squeezed(c, t, &params)?.translate(center.evolve(t, &params));
            let m = dm.center();
            Ok(vec![
                num(t),
                num(params.phase(t)),
                num(dm.a()),
                num(dm.b()),
                num(dm.c()),
                num(m.x),
                num(m.p),
                num(dm.von_neumann_entropy()),
                num(dm.purity()),
            ])
        })
        .collect::<Result<Vec<_>, qbm_core::Error>>()?;
    let max_s = rows
        .iter()
        .map(|r| r[7].parse::<f64>().unwrap_or(f64::NAN))
        .fold(0.0, f64::max);
    let sink = ctx.sink("evolve", params)?;
    let state = format!(
        "C={}+{}i x={} p={}",
        num(c.value().re),
        num(c.value().im),
        num(center.x),
        num(center.p)
    );
    let table = sink.table(
        "evolve",
        &[("initial state", state)],
        &["t", "omega_t", "a", "b", "c", "x", "p", "entropy", "purity"],
        &rows,
    )?;
    sink.summary(json!({
        "initial": { "c_re": c.value().re, "c_im": c.value().im, "x": center.x, "p": center.p },
        "rows": rows.len(),
        "max_entropy": max_s,
        "table": display(&table),
    }))?;
    println!("{}", display(&table));
    Ok(())
}
