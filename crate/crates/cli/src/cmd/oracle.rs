use qbm_core::oracle::oracle_grid;
use qbm_core::{evolve_squeezed, make_squeezed, propagate_numeric, GridSpec, NumericDM, SimParams, SqueezeParam};
use rayon::prelude::*;
use serde_json::json;

use crate::config::{parse_time_list, TimeValue};
use crate::context::{pick, Context};
use crate::failure::Failure;
use crate::output::{display, num};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Force this many grid points instead of the automatic choice.
    #[arg(long)]
    pub points: Option<usize>,
    /// Largest allowed grid-norm difference [default: 1e-4].
    #[arg(long)]
    pub tol: Option<f64>,
    /// Largest allowed trace error [default: 1e-5].
    #[arg(long)]
    pub trace_tol: Option<f64>,
    /// Comma-separated times [default: 0.5,1,7].
    #[arg(long)]
    pub times: Option<String>,
    /// Comma-separated noise strengths [default: 0,0.01,0.1].
    #[arg(long)]
    pub d_values: Option<String>,
}

struct Case {
    c: [f64; 2],
    t: f64,
    d: f64,
}

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Config(format!("{what}: `{s}` is not a number")))
        })
        .collect()
}

fn check(case: &Case, base: &SimParams, points: Option<usize>) -> qbm_core::Result<(usize, f64, f64)> {
    let params = base.with_d(case.d);
    params.validate()?;
    let sq = SqueezeParam::from_parts(case.c[0], case.c[1])?;
    let start = make_squeezed(sq, params)?;
    let mut grid = oracle_grid(&start, case.t, &params)?;
    if let Some(n) = points {
        grid = GridSpec::new(grid.center, grid.half_width, n)?;
    }
    let out = propagate_numeric(&NumericDM::from_density(&start, grid)?, case.t, &params)?;
    let closed = evolve_squeezed(sq, case.t, &params)?;
    Ok((grid.points, out.distance_to(&closed), (out.trace() - 1.0).norm()))
}

pub fn run(ctx: &Context, args: &Args) -> Result<(), Failure> {
    let base = ctx.params()?;
    let cfg = &ctx.cfg.oracle;
    let tol = pick(args.tol, cfg.tol, 1e-4);
    let trace_tol = pick(args.trace_tol, cfg.trace_tol, 1e-5);
    let points = args.points.or(cfg.points);
    let squeezing = cfg
        .squeezing
        .clone()
        .unwrap_or_else(|| vec![[1.0, 0.0], [2.0, 0.5], [0.5, -0.3]]);
    let times: Vec<TimeValue> = match (&args.times, &cfg.times) {
        (Some(s), _) => parse_time_list(s),
        (None, Some(v)) => v.clone(),
        (None, None) => [0.5, 1.0, 7.0].map(TimeValue::Number).to_vec(),
    };
    let times = times
        .iter()
        .enumerate()
        .map(|(i, v)| v.resolve(base.omega).map_err(|m| Failure::Config(format!("oracle.times[{i}]: {m}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let ds = match (&args.d_values, &cfg.d_values) {
        (Some(s), _) => parse_list(s, "--d-values")?,
        (None, Some(v)) => v.clone(),
        (None, None) => vec![0.0, 0.01, 0.1],
    };
    let mut cases = Vec::new();
    for &c in &squeezing {
        for &t in &times {
            for &d in &ds {
                cases.push(Case { c, t, d });
            }
        }
    }

    let results: Vec<_> = cases.par_iter().map(|c| check(c, &base, points)).collect();
    let mut rows = Vec::new();
    let (mut breaches, mut errors) = (0, 0);
    for (case, res) in cases.iter().zip(&results) {
        let prefix = vec![num(case.c[0]), num(case.c[1]), num(case.t), num(case.d)];
        let (rest, line) = match res {
            Ok((n, dist, tr)) => {
                let pass = *dist < tol && *tr < trace_tol;
                if !pass {
                    breaches += 1;
                }
                let status = if pass { "pass" } else { "fail" };
                (
                    vec![n.to_string(), num(*dist), num(*tr), status.into(), String::new()],
                    format!("{} norm {dist:.2e} trace {tr:.2e}", status.to_uppercase()),
                )
            }
            Err(e) => {
                errors += 1;
                (
                    vec![String::new(), String::new(), String::new(), "error".into(), e.to_string()],
                    format!("ERROR {e}"),
                )
            }
        };
        println!("C={}{:+}i t={} D={}: {line}", case.c[0], case.c[1], case.t, case.d);
        rows.push([prefix, rest].concat());
    }

    let sink = ctx.sink("oracle-check", base)?;
    let table = sink.table(
        "oracle_check",
        &[
            ("tol", format!("grid_norm<{} trace<{}", num(tol), num(trace_tol))),
            ("points", points.map_or("auto".into(), |n| n.to_string())),
        ],
        &["c_re", "c_im", "t", "D", "points", "grid_norm", "trace_error", "status", "message"],
        &rows,
    )?;
    let max_norm = results
        .iter()
        .filter_map(|r| r.as_ref().ok().map(|x| x.1))
        .fold(0.0, f64::max);
    sink.summary(json!({
        "cases": cases.len(),
        "passed": cases.len() - breaches - errors,
        "breaches": breaches,
        "errors": errors,
        "tol": tol,
        "trace_tol": trace_tol,
        "max_grid_norm": max_norm,
        "table": display(&table),
    }))?;
    println!("{}", display(&table));
    if errors > 0 {
        return Err(Failure::Numerical(format!("{errors} of {} cases failed to run", cases.len())));
    }
    if breaches > 0 {
        return Err(Failure::Tolerance(format!("{breaches} of {} cases outside tolerance", cases.len())));
    }
    Ok(())
}
