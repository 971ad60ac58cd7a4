use std::f64::consts::PI;

use qbm_core::{cat_dm_stroboscopic, halo_demo_fock, visibility, CatDM, CatSpec, GridSpec};
use serde_json::json;

use crate::context::{pick, Context};
use crate::failure::Failure;
use crate::output::display;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Accumulated noise 2nπD at the second snapshot; fixes D [default: 0.05].
    #[arg(long)]
    pub two_n_pi_d: Option<f64>,
    /// Number of periods n between the snapshots [default: 1].
    #[arg(long)]
    pub n: Option<u32>,
    /// Grid points per axis [default: 128].
    #[arg(long)]
    pub points: Option<usize>,
    /// Grid half-width [default: eight ground-state widths].
    #[arg(long)]
    pub half_width: Option<f64>,
}

/// Largest `|ρ|` on the diagonal block of branch `i`.
fn branch_peak(dm: &CatDM, i: usize, grid: &GridSpec) -> f64 {
    dm.kernels[i][i].sample(grid).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn run(ctx: &Context, args: &Args) -> Result<(), Failure> {
    let base = ctx.params()?;
    let cfg = &ctx.cfg.fig1;
    let noise = pick(args.two_n_pi_d, cfg.two_n_pi_d, 0.05);
    let n = pick(args.n, cfg.n, 1);
    if n == 0 || !(noise.is_finite() && noise >= 0.0) {
        return Err(Failure::Config(format!(
            "fig1: need n >= 1 and 2nπD >= 0, got n = {n}, 2nπD = {noise}"
        )));
    }
    let d = noise / (2.0 * n as f64 * PI);
    if ctx.params.d.is_some() || ctx.cfg.params.d.is_some() {
        log::warn!("fig1 sets D = {d} from 2nπD = {noise}; the given D is ignored");
    }
    let params = base.with_d(d);
    let grid = GridSpec::new(
        0.0,
        pick(args.half_width, cfg.half_width, 8.0 * params.length_scale()),
        pick(args.points, cfg.points, 128),
    )
    .map_err(|e| Failure::Config(format!("fig1 grid: {e}")))?;

    let cat = CatSpec::even_pair(&params)?;
    let before = cat_dm_stroboscopic(&cat, 0, &params)?;
    let after = cat_dm_stroboscopic(&cat, n, &params)?;
    let demo = halo_demo_fock(n, d, &params, grid)?;
    let vis_a = visibility(&before, &grid)?;
    let vis_b = visibility(&after, &grid)?;
    let kept = (0..2)
        .map(|i| branch_peak(&after, i, &grid) / branch_peak(&before, i, &grid))
        .fold(f64::INFINITY, f64::min);
    let initial_retention = qbm_core::cat::coherence_retention(&demo.initial, &params)?;
    let herm = [
        before.hermiticity_defect(),
        after.hermiticity_defect(),
        demo.initial.hermiticity_defect(),
        demo.evolved.hermiticity_defect(),
    ];

    let sink = ctx.sink("fig1", params)?;
    let mut files = Vec::new();
    for (stem, label, rho) in [
        ("fig1a", "cat (Δ²=2) initially".to_string(), before.sample(&grid)),
        ("fig1b", format!("cat (Δ²=2) after n={n} periods, 2nπD={noise}"), after.sample(&grid)),
        ("fig1a_prime", "(|0>+|1>)/√2 initially".to_string(), demo.initial.rho.clone()),
        (
            "fig1b_prime",
            format!("(|0>+|1>)/√2 after n={n} periods, 2nπD={noise}"),
            demo.evolved.rho.clone(),
        ),
    ] {
        for p in sink.density_grids(stem, &label, &grid, &rho)? {
            files.push(display(&p));
        }
    }

    let checks = [
        ("cat cross peaks decay", vis_b < vis_a),
        ("|0>+|1> retention above 0.95", demo.retention > 0.95),
        ("cat visibility below retention", vis_b < demo.retention),
        ("diagonal peaks intact (above 0.95)", kept > 0.95),
        ("all grids Hermitian", herm.iter().all(|h| *h < 1e-10)),
    ];
    sink.summary(json!({
        "two_n_pi_d": noise,
        "n": n,
        "grid": grid,
        "cat_visibility": { "fig1a": vis_a, "fig1b": vis_b, "exact_fig1b": after.visibility_exact()? },
        "diagonal_peaks_kept": kept,
        "retention": { "fig1a_prime": initial_retention, "fig1b_prime": demo.retention },
        "hermiticity_defects": herm,
        "checks": checks.iter().map(|(k, v)| json!({ "check": k, "pass": v })).collect::<Vec<_>>(),
        "files": files,
    }))?;
    for f in &files {
        println!("{f}");
    }
    let failed: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(k, _)| *k).collect();
    if !failed.is_empty() {
        return Err(Failure::Tolerance(format!("fig1: {}", failed.join("; "))));
    }
    Ok(())
}
