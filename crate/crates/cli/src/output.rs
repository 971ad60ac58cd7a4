//! Table, grid and summary writers. Every file starts with `#` lines
//! recording the tool version, command and parameters; nothing in the
//! output depends on the clock or on the thread count.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use qbm_core::{GridSpec, SimParams};
use serde_json::Value;

use crate::config::Format;
use crate::failure::Failure;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Where and how a command writes its files.
#[derive(Debug, Clone)]
pub struct Sink {
    pub dir: PathBuf,
    pub format: Format,
    pub command: &'static str,
    pub params: SimParams,
}

/// Shortest representation that parses back to the same `f64`, in
/// scientific notation for very small or large magnitudes; empty for NaN.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if v.is_nan() {
        String::new()
    } else if a == 0.0 || (1e-4..1e15).contains(&a) || a.is_infinite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

impl Sink {
    pub fn new(dir: PathBuf, format: Format, command: &'static str, params: SimParams) -> Result<Self, Failure> {
        fs::create_dir_all(&dir)
            .map_err(|e| Failure::Config(format!("cannot create output directory {}: {e}", dir.display())))?;
        Ok(Self {
            dir,
            format,
            command,
            params,
        })
    }

    pub fn path(&self, stem: &str) -> PathBuf {
        self.dir.join(stem)
    }

    fn header(&self, out: &mut impl Write, extra: &[(&str, String)]) -> std::io::Result<()> {
        let p = &self.params;
        writeln!(out, "# qbm {VERSION} {}", self.command)?;
        writeln!(
            out,
            "# params: omega={} mass={} hbar={} D={}",
            num(p.omega),
            num(p.mass),
            num(p.hbar),
            num(p.d)
        )?;
        for (k, v) in extra {
            writeln!(out, "# {k}: {v}")?;
        }
        Ok(())
    }

    /// Write a delimited table; returns its path.
    pub fn table(
        &self,
        stem: &str,
        extra: &[(&str, String)],
        columns: &[&str],
        rows: &[Vec<String>],
    ) -> Result<PathBuf, Failure> {
        let path = self.path(&format!("{stem}.{}", self.format.extension()));
        let mut file = BufWriter::new(File::create(&path)?);
        self.header(&mut file, extra)?;
        let mut w = csv::WriterBuilder::new()
            .delimiter(self.format.delimiter())
            .from_writer(file);
        w.write_record(columns)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(path)
    }

    /// Write a square matrix sampled on `grid`, one row per line. Node
    /// coordinates are listed in the header in units of `sqrt(ħ/MΩ)`.
    pub fn grid(
        &self,
        stem: &str,
        extra: &[(&str, String)],
        grid: &GridSpec,
        values: &DMatrix<f64>,
    ) -> Result<PathBuf, Failure> {
        let path = self.path(&format!("{stem}.dat"));
        let mut out = BufWriter::new(File::create(&path)?);
        let unit = self.params.length_scale();
        let mut lines: Vec<(&str, String)> = extra.to_vec();
        lines.push((
            "grid",
            format!(
                "center={} half_width={} points={}",
                num(grid.center),
                num(grid.half_width),
                grid.points
            ),
        ));
        lines.push((
            "nodes (units of sqrt(hbar/(M Omega)))",
            grid.nodes().iter().map(|x| num(x / unit)).collect::<Vec<_>>().join(" "),
        ));
        self.header(&mut out, &lines)?;
        for i in 0..values.nrows() {
            let row: Vec<String> = (0..values.ncols()).map(|j| num(values[(i, j)])).collect();
            writeln!(out, "{}", row.join(" "))?;
        }
        out.flush()?;
        Ok(path)
    }

    /// Write `|ρ|` and `Re ρ` grids as `<stem>.dat` and `<stem>_re.dat`.
    pub fn density_grids(
        &self,
        stem: &str,
        label: &str,
        grid: &GridSpec,
        rho: &DMatrix<C64>,
    ) -> Result<Vec<PathBuf>, Failure> {
        let abs = rho.map(|z| z.norm());
        let re = rho.map(|z| z.re);
        Ok(vec![
            self.grid(
                stem,
                &[("quantity", format!("|rho(x, x')| {label}; rows x, columns x'"))],
                grid,
                &abs,
            )?,
            self.grid(
                &format!("{stem}_re"),
                &[("quantity", format!("Re rho(x, x') {label}; rows x, columns x'"))],
                grid,
                &re,
            )?,
        ])
    }

    /// Write `<command>_summary.json`.
    pub fn summary(&self, body: Value) -> Result<PathBuf, Failure> {
        let path = self.path(&format!("{}_summary.json", self.command.replace('-', "_")));
        let mut doc = serde_json::json!({
            "tool": "qbm",
            "version": VERSION,
            "command": self.command,
            "params": self.params,
        });
        if let (Value::Object(d), Value::Object(b)) = (&mut doc, body) {
            d.extend(b);
        }
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        fs::write(&path, text)?;
        Ok(path)
    }
}

pub fn display(path: &Path) -> String {
    path.display().to_string()
}
