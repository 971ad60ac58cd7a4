//! Linear dielectric environment: effective bath spectral density from
//! molecular data, the dielectric function and the white-noise strength.

mod kk;
mod spectrum;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::params::SimParams;

pub use kk::{frequency_grid, im_k_from_re_k, refractive_index, DielectricTable, SUPPORT_FRACTION};
pub use spectrum::{Line, MolecularSpectrum};

/// A medium property that may be given as one value or as samples over
/// space. Only spatially uniform media are supported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Field {
    Uniform(f64),
    Sampled(Vec<f64>),
}

impl Field {
    fn uniform(&self, name: &'static str) -> Result<f64> {
        match self {
            Field::Uniform(v) => Ok(*v),
            Field::Sampled(vs) => {
                let first = *vs.first().ok_or_else(|| invalid(name, "no samples"))?;
                let scale = first.abs().max(f64::MIN_POSITIVE);
                if vs.iter().any(|v| (v - first).abs() > 1e-12 * scale) {
                    return Err(Error::Inhomogeneous(name));
                }
                Ok(first)
            }
        }
    }
}

/// Bulk parameters of a homogeneous medium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumSpec {
    /// Inverse temperature (1/energy).
    pub beta: f64,
    /// Number density of molecules.
    pub density: f64,
    /// Dipole coupling strength `g`.
    pub coupling: f64,
    /// Ultraviolet cut-off wave number `Γ`.
    pub cutoff: f64,
    #[serde(default = "one")]
    pub hbar: f64,
}

fn one() -> f64 {
    1.0
}

impl MediumSpec {
    pub fn new(beta: f64, density: f64, coupling: f64, cutoff: f64, hbar: f64) -> Result<Self> {
        let m = Self {
            beta,
            density,
            coupling,
            cutoff,
            hbar,
        };
        m.validate()?;
        Ok(m)
    }

    /// Accepts position-dependent inputs but requires them to be constant.
    pub fn from_fields(beta: &Field, density: &Field, coupling: f64, cutoff: f64, hbar: f64) -> Result<Self> {
        Self::new(beta.uniform("beta")?, density.uniform("density")?, coupling, cutoff, hbar)
    }

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("beta", self.beta),
            ("density", self.density),
            ("cutoff", self.cutoff),
            ("hbar", self.hbar),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(field, format!("must be finite and > 0, got {v}")));
            }
        }
        if !(self.coupling.is_finite() && self.coupling >= 0.0) {
            return Err(invalid("coupling", format!("must be finite and >= 0, got {}", self.coupling)));
        }
        Ok(())
    }

    /// The continuum description needs many molecules per cut-off volume.
    pub fn validity_warning(&self) -> Option<String> {
        let cube = self.cutoff.powi(3);
        (self.density < cube).then(|| {
            format!(
                "density {} is below Γ³ = {cube}: too few molecules per cut-off volume for a linear medium",
                self.density
            )
        })
    }
}

/// `ln sinh x` for `x > 0` without overflow.
fn ln_sinh(x: f64) -> f64 {
    if x > 20.0 {
        x - std::f64::consts::LN_2 + (-(2.0 * x).exp_m1().recip()).ln_1p()
    } else {
        x.sinh().ln()
    }
}

fn log_partition(levels: &[f64], beta: f64) -> f64 {
    let lo = levels.iter().copied().fold(f64::INFINITY, f64::min);
    lo * -beta + levels.iter().map(|e| (-beta * (e - lo)).exp()).sum::<f64>().ln()
}

/// Unit-area line profile on `ω > 0`, centred at `center` with
/// half-width `width`: the damped-oscillator shape
/// `(2/π) γω² / ((ω₀² - ω²)² + γ²ω²)`, `γ = 2 width`, which is a
/// Lorentzian near the line and vanishes like `ω²` at low frequency.
pub fn line_profile(omega: f64, center: f64, width: f64) -> f64 {
    let g = 2.0 * width;
    let d = center * center - omega * omega;
    2.0 / PI * g * omega * omega / (d * d + g * g * omega * omega)
}

/// Strength `4ω₀ sinh(ħβω₀/2) |J|² / (ħZ)` of each line at its centre
/// `ω₀ = |Eₗ - Eₘ|/ħ`, returned as `(ω₀, strength, width)`.
pub fn line_weights(spec: &MolecularSpectrum, beta: f64, hbar: f64) -> Result<Vec<(f64, f64, f64)>> {
    if spec.levels.is_empty() {
        return Err(Error::Spectrum("spectrum has no levels".into()));
    }
    let ln_z = log_partition(&spec.levels, beta);
    Ok(spec
        .lines
        .iter()
        .filter_map(|line| {
            let w = ((spec.levels[line.l] - spec.levels[line.m]) / hbar).abs();
            if w == 0.0 || line.strength == 0.0 {
                return None;
            }
            let weight = ((4.0 * w * line.strength / hbar).ln() + ln_sinh(0.5 * hbar * beta * w) - ln_z).exp();
            Some((w, weight, line.width))
        })
        .collect())
}

/// Effective bath spectral density at frequency `omega`: every line
/// contributes its centre strength (see [`line_weights`]) spread over
/// [`line_profile`].
pub fn spectral_density(spec: &MolecularSpectrum, beta: f64, hbar: f64, omega: f64) -> Result<f64> {
    if !(omega.is_finite() && omega >= 0.0) {
        return Err(invalid("omega", format!("must be >= 0, got {omega}")));
    }
    Ok(line_weights(spec, beta, hbar)?
        .iter()
        .map(|&(w0, weight, width)| weight * line_profile(omega, w0, width))
        .sum())
}

/// `Im K(ω) = π g² I(ω) / (2ω)`.
pub fn im_k(spec: &MolecularSpectrum, medium: &MediumSpec, omega: f64) -> Result<f64> {
    medium.validate()?;
    if !(omega > 0.0) {
        return Err(invalid("omega", format!("must be > 0, got {omega}")));
    }
    let i = spectral_density(spec, medium.beta, medium.hbar, omega)?;
    Ok(PI * medium.coupling * medium.coupling / (2.0 * omega) * i)
}

/// Tabulate `Im K` for `spec` on a frequency grid refined at every line
/// and build the dielectric table. `Im K(0)` is taken as its limit, 0.
pub fn dielectric_table(
    spec: &MolecularSpectrum,
    medium: &MediumSpec,
    lo: f64,
    hi: f64,
    points: usize,
) -> Result<DielectricTable> {
    let grid = frequency_grid(lo, hi, points, &spec.line_centers(medium.hbar))?;
    let vals = grid
        .iter()
        .map(|&w| if w == 0.0 { Ok(0.0) } else { im_k(spec, medium, w) })
        .collect::<Result<Vec<_>>>()?;
    DielectricTable::from_samples(&grid, &vals)
}

/// White-noise strength `D = 8γ k_BT / (ħΩ²)`.
pub fn ohmic_d(gamma: f64, kbt: f64, params: &SimParams) -> Result<f64> {
    params.validate()?;
    if !(gamma >= 0.0 && kbt >= 0.0 && gamma.is_finite() && kbt.is_finite()) {
        return Err(invalid("gamma/kBT", "must be finite and >= 0"));
    }
    Ok(8.0 * gamma * kbt / (params.hbar * params.omega * params.omega))
}
