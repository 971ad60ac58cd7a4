use std::path::PathBuf;

use qbm_core::medium::dielectric_table;
use qbm_core::{spectral_density, MediumSpec, MolecularSpectrum};
use serde_json::json;

use crate::context::{pick, Context};
use crate::failure::Failure;
use crate::output::{display, num};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Level/dipole file (see the bundled example).
    #[arg(long)]
    pub spectrum: Option<PathBuf>,
    /// Inverse temperature β [default: 1].
    #[arg(long)]
    pub beta: Option<f64>,
    /// Molecular number density [default: 1].
    #[arg(long)]
    pub density: Option<f64>,
    /// Dipole coupling g [default: 1].
    #[arg(long)]
    pub coupling: Option<f64>,
    /// Cut-off wave number Γ [default: 1].
    #[arg(long)]
    pub cutoff: Option<f64>,
    /// Smallest non-zero tabulated frequency [default: 1e-3 of the lowest line].
    #[arg(long)]
    pub omega_min: Option<f64>,
    /// Table end; values are reported up to half of it [default: 200 times the highest line].
    #[arg(long)]
    pub omega_max: Option<f64>,
    /// Log-spaced table nodes, before refinement at the lines [default: 400].
    #[arg(long)]
    pub points: Option<usize>,
}

pub fn run(ctx: &Context, args: &Args) -> Result<(), Failure> {
    let params = ctx.params()?;
    let cfg = &ctx.cfg.medium;
    let path = args
        .spectrum
        .clone()
        .or_else(|| cfg.spectrum.clone())
        .ok_or_else(|| Failure::Config("medium: a spectrum file is required (--spectrum)".into()))?;
    let spec = MolecularSpectrum::from_file(&path)?;
    let medium = MediumSpec::new(
        pick(args.beta, cfg.beta, 1.0),
        pick(args.density, cfg.density, 1.0),
        pick(args.coupling, cfg.coupling, 1.0),
        pick(args.cutoff, cfg.cutoff, 1.0),
        params.hbar,
    )
    .map_err(|e| Failure::Config(format!("medium: {e}")))?;
    let warning = medium.validity_warning();
    if let Some(w) = &warning {
        log::warn!("{w}");
    }
    let centers = spec.line_centers(params.hbar);
    let lowest = centers.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    let highest = centers.iter().map(|c| c.0).fold(0.0, f64::max);
    let lo = pick(args.omega_min, cfg.omega_min, if lowest.is_finite() { 1e-3 * lowest } else { 1e-3 });
    let hi = pick(args.omega_max, cfg.omega_max, if highest > 0.0 { 200.0 * highest } else { 100.0 });
    let points = pick(args.points, cfg.points, 400);
    let table = dielectric_table(&spec, &medium, lo, hi, points)?;
    let (_, top) = table.support();
    let mut rows = Vec::new();
    for &w in table.omegas().iter().filter(|&&w| w <= top) {
        let k = table.k(w)?;
        let n = qbm_core::medium::refractive_index(k);
        rows.push(vec![
            num(w),
            num(spectral_density(&spec, medium.beta, medium.hbar, w)?),
            num(k.im),
            num(k.re),
            num(n.re),
            num(n.im),
        ]);
    }
    let sink = ctx.sink("medium", params)?;
    let out = sink.table(
        "medium",
        &[
            ("spectrum", display(&path)),
            (
                "medium",
                format!(
                    "beta={} density={} coupling={} cutoff={}",
                    num(medium.beta),
                    num(medium.density),
                    num(medium.coupling),
                    num(medium.cutoff)
                ),
            ),
            ("table", format!("omega_min={} omega_max={} points={points}", num(lo), num(hi))),
        ],
        &["omega", "spectral_density", "im_k", "re_k", "n_re", "n_im"],
        &rows,
    )?;
    sink.summary(json!({
        "spectrum": display(&path),
        "levels": spec.levels.len(),
        "lines": spec.lines.len(),
        "medium": medium,
        "validity_warning": warning,
        "support": [table.support().0, top],
        "static_re_k": table.re_k(0.0)?,
        "rows": rows.len(),
        "table": display(&out),
    }))?;
    println!("{}", display(&out));
    Ok(())
}
