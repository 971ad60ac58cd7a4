use qbm_core::cat::fit_decay_rate;
use qbm_core::{cat_dm_stroboscopic, decoherence_time, halo_radius, separation, visibility, CatSpec, GridSpec};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::context::{pick, Context};
use crate::failure::Failure;
use crate::output::{display, num};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Dimensionless separation Δ² of the two branches [default: 20].
    #[arg(long)]
    pub delta2: Option<f64>,
    /// Last stroboscopic period n; rows run over 0..=n [default: 5].
    #[arg(long)]
    pub periods: Option<u32>,
    /// Grid points for the sampled visibility [default: 801].
    #[arg(long)]
    pub points: Option<usize>,
    /// Grid half-width [default: branch offset plus eight ground-state widths].
    #[arg(long)]
    pub half_width: Option<f64>,
    /// Also write |ρ| and Re ρ grids for every period.
    #[arg(long)]
    pub grids: bool,
}

pub fn run(ctx: &Context, args: &Args) -> Result<(), Failure> {
    let params = ctx.params()?;
    let cfg = &ctx.cfg.cat;
    let delta2 = pick(args.delta2, cfg.delta2, 20.0);
    let last = pick(args.periods, cfg.periods, 5);
    let cat = CatSpec::with_separation(delta2, &params).map_err(|e| Failure::Config(format!("cat: {e}")))?;
    let offset = cat.s1.x.abs();
    let grid = GridSpec::new(
        0.0,
        pick(args.half_width, cfg.half_width, offset + 8.0 * params.length_scale()),
        pick(args.points, cfg.points, 801),
    )
    .map_err(|e| Failure::Config(format!("cat grid: {e}")))?;

    let halo = separation(&cat, &params) <= 1.0;
    if halo {
        log::warn!("Δ² = {delta2} <= 1: the branches lie inside each other's halo");
    }
    let periods: Vec<u32> = (0..=last).collect();
    let states = periods
        .par_iter()
        .map(|&n| cat_dm_stroboscopic(&cat, n, &params))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = periods
        .iter()
        .zip(&states)
        .map(|(&n, dm)| {
            let t = params.periods(n as f64);
            Ok(vec![
                n.to_string(),
                num(t),
                num(visibility(dm, &grid)?),
                num(dm.visibility_exact()?),
                num(dm.trace().re),
                num(dm.hermiticity_defect()),
            ])
        })
        .collect::<Result<Vec<_>, qbm_core::Error>>()?;

    let sink = ctx.sink("cat", params)?;
    let table = sink.table(
        "cat",
        &[
            ("delta2", num(delta2)),
            (
                "grid",
                format!("center=0 half_width={} points={}", num(grid.half_width), grid.points),
            ),
        ],
        &["n", "t", "visibility", "visibility_exact", "trace", "hermiticity_defect"],
        &rows,
    )?;
    let mut grid_files = Vec::new();
    if args.grids || cfg.grids.unwrap_or(false) {
        for (n, dm) in periods.iter().zip(&states) {
            let label = format!("cat Δ²={} after n={n} periods", num(delta2));
            for p in sink.density_grids(&format!("cat_n{n}"), &label, &grid, &dm.sample(&grid))? {
                grid_files.push(display(&p));
            }
        }
    }

    let t_d = decoherence_time(&cat, &params);
    let t_max = params.periods(last as f64);
    let radius = if last > 0 { halo_radius(t_max, &params).ok() } else { None };
    let fit = match (&t_d, last >= 2) {
        (Ok(_), true) => {
            let f = fit_decay_rate(&cat, &periods[1..], &grid, &params)?;
            json!({
                "rate": f.rate,
                "expected": f.expected,
                "ratio": f.ratio(),
                "within_20_percent": (f.ratio() - 1.0).abs() < 0.2,
            })
        }
        _ => Value::Null,
    };
    sink.summary(json!({
        "delta2": delta2,
        "halo_regime": halo,
        "decoherence_time": t_d.as_ref().ok(),
        "decoherence_time_note": t_d.as_ref().err().map(|e| e.to_string()),
        "halo_radius": radius,
        "t_max": t_max,
        "decay_fit": fit,
        "table": display(&table),
        "grids": grid_files,
    }))?;
    println!("{}", display(&table));
    Ok(())
}
