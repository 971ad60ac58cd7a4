//! Molecular level and transition data.
//!
//! Text format, one record per line, fields separated by commas and/or
//! whitespace, `#` starting a comment:
//!
//! ```text
//! level,  <index>, <energy>
//! dipole, <l>, <m>, <|J_lm|²>, <half-width>
//! ```
//!
//! Level indices must be `0..n` with each index given once. A dipole
//! record describes the symmetric pair `(l, m)`/`(m, l)` and may appear
//! only once per unordered pair.

use std::collections::HashSet;
use std::path::Path;

use crate::error::{Error, Result};

/// A broadened transition between two levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub l: usize,
    pub m: usize,
    /// `|J_lm|²`
    pub strength: f64,
    /// Lorentzian half-width (angular frequency).
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MolecularSpectrum {
    pub levels: Vec<f64>,
    pub lines: Vec<Line>,
}

impl MolecularSpectrum {
    pub fn new(levels: Vec<f64>, lines: Vec<Line>) -> Result<Self> {
        let s = Self { levels, lines };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(e) = self.levels.iter().find(|e| !e.is_finite()) {
            return Err(Error::Spectrum(format!("level energy {e} is not finite")));
        }
        let mut seen = HashSet::new();
        for line in &self.lines {
            let n = self.levels.len();
            if line.l >= n || line.m >= n {
                return Err(Error::Spectrum(format!(
                    "dipole ({}, {}) refers to a level outside 0..{n}",
                    line.l, line.m
                )));
            }
            if !(line.strength.is_finite() && line.strength >= 0.0) {
                return Err(Error::Spectrum(format!("|J|² must be >= 0, got {}", line.strength)));
            }
            if !(line.width.is_finite() && line.width > 0.0) {
                return Err(Error::Spectrum(format!("line width must be > 0, got {}", line.width)));
            }
            if !seen.insert((line.l.min(line.m), line.l.max(line.m))) {
                return Err(Error::Spectrum(format!(
                    "dipole pair ({}, {}) given more than once",
                    line.l, line.m
                )));
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut levels: Vec<Option<f64>> = Vec::new();
        let mut lines = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line_no = no + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let fields: Vec<&str> = body
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|f| !f.is_empty())
                .collect();
            let err = |message: String| Error::SpectrumParse {
                line: line_no,
                message,
            };
            let num = |i: usize| -> Result<f64> {
                let f = fields.get(i).ok_or_else(|| err(format!("missing field {}", i + 1)))?;
                f.parse::<f64>()
                    .map_err(|_| err(format!("field {} `{f}` is not a number", i + 1)))
            };
            let index = |i: usize| -> Result<usize> {
                let f = fields.get(i).ok_or_else(|| err(format!("missing field {}", i + 1)))?;
                f.parse::<usize>()
                    .map_err(|_| err(format!("field {} `{f}` is not a level index", i + 1)))
            };
            match fields[0].to_ascii_lowercase().as_str() {
                "level" => {
                    if fields.len() != 3 {
                        return Err(err(format!("level record needs 3 fields, got {}", fields.len())));
                    }
                    let (i, e) = (index(1)?, num(2)?);
                    if !e.is_finite() {
                        return Err(err(format!("energy {e} is not finite")));
                    }
                    if levels.len() <= i {
                        levels.resize(i + 1, None);
                    }
                    if levels[i].replace(e).is_some() {
                        return Err(err(format!("level {i} defined twice")));
                    }
                }
                "dipole" => {
                    if fields.len() != 5 {
                        return Err(err(format!("dipole record needs 5 fields, got {}", fields.len())));
                    }
                    let line = Line {
                        l: index(1)?,
                        m: index(2)?,
                        strength: num(3)?,
                        width: num(4)?,
                    };
                    if !(line.strength >= 0.0) {
                        return Err(err(format!("|J|² must be >= 0, got {}", line.strength)));
                    }
                    if !(line.width > 0.0) {
                        return Err(err(format!("width must be > 0, got {}", line.width)));
                    }
                    lines.push((line_no, line));
                }
                other => return Err(err(format!("unknown record type `{other}`"))),
            }
        }
        let levels = levels
            .into_iter()
            .enumerate()
            .map(|(i, e)| e.ok_or_else(|| Error::Spectrum(format!("level {i} is missing"))))
            .collect::<Result<Vec<_>>>()?;
        let mut seen = HashSet::new();
        for &(line_no, l) in &lines {
            if l.l >= levels.len() || l.m >= levels.len() {
                return Err(Error::SpectrumParse {
                    line: line_no,
                    message: format!("dipole ({}, {}) refers to an undefined level", l.l, l.m),
                });
            }
            if !seen.insert((l.l.min(l.m), l.l.max(l.m))) {
                return Err(Error::SpectrumParse {
                    line: line_no,
                    message: format!("dipole pair ({}, {}) repeated", l.l, l.m),
                });
            }
        }
        Self::new(levels, lines.into_iter().map(|(_, l)| l).collect())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Spectrum(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Transition frequencies `(E_l - E_m)/ħ` of both orderings of every
    /// line, paired with the line.
    pub fn transitions(&self, hbar: f64) -> impl Iterator<Item = (f64, &Line)> + '_ {
        self.lines.iter().flat_map(move |line| {
            let w = (self.levels[line.l] - self.levels[line.m]) / hbar;
            [(w, line), (-w, line)]
        })
    }

    /// Positive line centres with their widths.
    pub fn line_centers(&self, hbar: f64) -> Vec<(f64, f64)> {
        self.transitions(hbar)
            .filter(|(w, _)| *w > 0.0)
            .map(|(w, l)| (w, l.width))
            .collect()
    }
}
