use std::path::PathBuf;

use qbm_core::SimParams;

use crate::config::{parse_time_list, Format, RunConfig, TimeValue};
use crate::failure::Failure;
use crate::output::Sink;

pub const OUT_DIR_ENV: &str = "QBM_OUT_DIR";

#[derive(Debug, Clone, Default, clap::Args)]
pub struct ParamArgs {
    /// Oscillator frequency Ω [default: 1].
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub omega: Option<f64>,
    /// Mass M [default: 1].
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub mass: Option<f64>,
    /// Reduced Planck constant [default: 1].
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub hbar: Option<f64>,
    /// Dimensionless noise strength D [default: 0].
    #[arg(short = 'D', long = "d", global = true, allow_hyphen_values = true)]
    pub d: Option<f64>,
}

/// Time-list flags shared by several subcommands.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct TimeArgs {
    /// Comma-separated times; multiples of π/Ω may be written `pi/2`, `3pi`.
    #[arg(long, allow_hyphen_values = true)]
    pub times: Option<String>,
    /// Final time of a uniform list starting at 0.
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Number of intervals of the uniform list.
    #[arg(long)]
    pub steps: Option<usize>,
}

pub struct Context {
    pub cfg: RunConfig,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub params: ParamArgs,
}

impl Context {
    pub fn params(&self) -> Result<SimParams, Failure> {
        let c = &self.cfg.params;
        let p = SimParams {
            omega: self.params.omega.or(c.omega).unwrap_or(1.0),
            mass: self.params.mass.or(c.mass).unwrap_or(1.0),
            hbar: self.params.hbar.or(c.hbar).unwrap_or(1.0),
            d: self.params.d.or(c.d).unwrap_or(0.0),
        };
        p.validate().map_err(|e| Failure::Config(format!("params: {e}")))?;
        Ok(p)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| self.cfg.output.dir.clone())
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn sink(&self, command: &'static str, params: SimParams) -> Result<Sink, Failure> {
        let format = self.format.or(self.cfg.output.format).unwrap_or(Format::Csv);
        Sink::new(self.out_dir(), format, command, params)
    }
}

/// Resolve a time list: flag list, then flag range, then the config list,
/// then the config range, then `default`.
pub fn resolve_times(
    block: &str,
    flags: &TimeArgs,
    cfg_times: Option<&[TimeValue]>,
    cfg_range: (Option<f64>, Option<usize>),
    omega: f64,
    default: &[f64],
) -> Result<Vec<f64>, Failure> {
    let from_list = |list: &[TimeValue], origin: &str| -> Result<Vec<f64>, Failure> {
        list.iter()
            .enumerate()
            .map(|(i, v)| v.resolve(omega).map_err(|m| Failure::Config(format!("{origin}[{i}]: {m}"))))
            .collect()
    };
    let from_range = |t_max: Option<f64>, steps: Option<usize>, origin: &str| -> Result<Vec<f64>, Failure> {
        let t_max = t_max.ok_or_else(|| Failure::Config(format!("{origin}: steps given without t_max")))?;
        let steps = steps.unwrap_or(10);
        if !(t_max.is_finite() && t_max >= 0.0) || steps == 0 {
            return Err(Failure::Config(format!(
                "{origin}: need t_max >= 0 and steps >= 1, got {t_max} and {steps}"
            )));
        }
        Ok((0..=steps).map(|i| t_max * i as f64 / steps as f64).collect())
    };
    let times = if let Some(text) = &flags.times {
        from_list(&parse_time_list(text), "--times")?
    } else if flags.t_max.is_some() || flags.steps.is_some() {
        let t_max = flags.t_max.or(cfg_range.0);
        from_range(t_max, flags.steps.or(cfg_range.1), "--t-max/--steps")?
    } else if let Some(list) = cfg_times {
        from_list(list, &format!("{block}.times"))?
    } else if cfg_range.0.is_some() || cfg_range.1.is_some() {
        from_range(cfg_range.0, cfg_range.1, &format!("{block}.t_max/steps"))?
    } else {
        default.to_vec()
    };
    if times.is_empty() {
        return Err(Failure::Config(format!("{block}: empty time list")));
    }
    if let Some(t) = times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(Failure::Config(format!("{block}: time {t} must be finite and >= 0")));
    }
    Ok(times)
}

/// `flag`, else `config`, else `default`.
pub fn pick<T>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}
