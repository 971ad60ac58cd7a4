use std::f64::consts::PI;

use qbm_core::{sieve_minimize, sieve_scan, sigma, superselection_valid, Error};
use rayon::prelude::*;
use serde_json::json;

use crate::context::{pick, resolve_times, Context, TimeArgs};
use crate::failure::Failure;
use crate::output::{display, num};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Simplex convergence tolerance [default: 1e-8].
    #[arg(long)]
    pub tol: Option<f64>,
    /// Also tabulate the entropy over a rectangle of initial C at each time.
    #[arg(long)]
    pub scan: bool,
    /// Re C range of the scan, `lo,hi` [default: 0.2,3].
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub re_range: Option<[f64; 2]>,
    /// Im C range of the scan, `lo,hi` [default: -2,2].
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub im_range: Option<[f64; 2]>,
    /// Scan points per axis [default: 41].
    #[arg(long)]
    pub resolution: Option<usize>,
    #[command(flatten)]
    pub time: TimeArgs,
}

pub fn parse_range(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => Ok([
            a.parse().map_err(|_| format!("`{a}` is not a number"))?,
            b.parse().map_err(|_| format!("`{b}` is not a number"))?,
        ]),
        _ => Err(format!("expected `lo,hi`, got `{s}`")),
    }
}

const COLUMNS: [&str; 13] = [
    "t",
    "omega_t",
    "c_re",
    "c_im",
    "sigma_re",
    "sigma_im",
    "deviation",
    "entropy",
    "iterations",
    "validity_margin",
    "valid",
    "status",
    "message",
];

pub fn run(ctx: &Context, args: &Args) -> Result<(), Failure> {
    let params = ctx.params()?;
    let cfg = &ctx.cfg.sieve;
    let tol = pick(args.tol, cfg.tol, 1e-8);
    let w = params.omega;
    let default: Vec<f64> = [PI / 4.0, PI / 2.0, 1.0, PI, 2.0 * PI, 10.0 * PI]
        .iter()
        .map(|th| th / w)
        .collect();
    let times = resolve_times("sieve", &args.time, cfg.times.as_deref(), (cfg.t_max, cfg.steps), w, &default)?;
    if params.d == 0.0 {
        log::warn!("D = 0: the entropy is zero for every initial state, so no squeezing is preferred");
    }
    let rows = times
        .par_iter()
        .map(|&t| row(t, &params, tol))
        .collect::<Result<Vec<_>, Failure>>()?;

    let sink = ctx.sink("sieve", params)?;
    let table = sink.table("sieve", &[("tol", num(tol))], &COLUMNS, &rows)?;
    let mut surfaces = Vec::new();
    if args.scan || cfg.scan.unwrap_or(false) {
        let re = pick(args.re_range, cfg.re_range, [0.2, 3.0]);
        let im = pick(args.im_range, cfg.im_range, [-2.0, 2.0]);
        let res = pick(args.resolution, cfg.resolution, 41);
        for (i, &t) in times.iter().enumerate() {
            if t == 0.0 {
                continue;
            }
            let s = sieve_scan(t, &params, (re[0], re[1]), (im[0], im[1]), (res, res))?;
            let mut cells = Vec::with_capacity(res * res);
            for (a, r) in s.re.iter().enumerate() {
                for (b, m) in s.im.iter().enumerate() {
                    cells.push(vec![num(*r), num(*m), num(s.values[a][b])]);
                }
            }
            let best = s.argmin();
            let path = sink.table(
                &format!("sieve_surface_{i}"),
                &[("t", num(t)), ("tol", num(tol))],
                &["c_re", "c_im", "entropy"],
                &cells,
            )?;
            surfaces.push(json!({ "t": t, "argmin": [best.re, best.im], "table": display(&path) }));
        }
    }
    let count = |status: &str| rows.iter().filter(|r| r[11] == status).count();
    let max_dev = rows
        .iter()
        .filter_map(|r| r[6].parse::<f64>().ok())
        .fold(0.0, f64::max);
    sink.summary(json!({
        "tol": tol,
        "rows": rows.len(),
        "converged": count("ok"),
        "not_converged": count("not_converged"),
        "degenerate": count("degenerate"),
        "max_deviation": max_dev,
        "table": display(&table),
        "surfaces": surfaces,
    }))?;
    println!("{}", display(&table));
    Ok(())
}

fn row(t: f64, params: &qbm_core::SimParams, tol: f64) -> Result<Vec<String>, Failure> {
    let check = superselection_valid(params.d, t, params);
    let sg = if t > 0.0 { sigma(t, params).ok() } else { None };
    let (sr, si) = sg.map_or((f64::NAN, f64::NAN), |z| (z.re, z.im));
    let (c, s, iters, status, message) = match sieve_minimize(t, params, tol) {
        Ok(r) => (Some(r.c_star), r.s_min, r.iterations.to_string(), "ok", String::new()),
        Err(Error::NotConverged {
            iterations,
            best_re,
            best_im,
            best_s,
        }) => (
            Some(num_complex::Complex64::new(best_re, best_im)),
            best_s,
            iterations.to_string(),
            "not_converged",
            format!("no convergence after {iterations} iterations"),
        ),
        Err(e @ Error::DegenerateObjective) => (None, 0.0, String::new(), "degenerate", e.to_string()),
        Err(e @ (Error::SingularTime(_) | Error::NegativeTime(_))) => {
            (None, f64::NAN, String::new(), "singular", e.to_string())
        }
        Err(e) => return Err(e.into()),
    };
    let dev = match (c, sg) {
        (Some(c), Some(z)) => (c - z).norm(),
        _ => f64::NAN,
    };
    let (cr, ci) = c.map_or((f64::NAN, f64::NAN), |z| (z.re, z.im));
    Ok(vec![
        num(t),
        num(params.phase(t)),
        num(cr),
        num(ci),
        num(sr),
        num(si),
        num(dev),
        num(s),
        iters,
        num(check.margin),
        check.valid.to_string(),
        status.to_string(),
        message,
    ])
}
