//! Physical parameters shared by every module.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Single-mode simulation parameters.
///
/// `omega`, `mass` and `hbar` fix the unit system; `d` is the dimensionless
/// decoherence strength `8 γ k_B T / (ħ Ω²)` of the white-noise limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub omega: f64,
    #[serde(default = "one")]
    pub mass: f64,
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(rename = "D", alias = "d")]
    pub d: f64,
}

fn one() -> f64 {
    1.0
}

impl SimParams {
    /// Checked constructor.
    pub fn new(omega: f64, mass: f64, hbar: f64, d: f64) -> Result<Self> {
        let p = Self { omega, mass, hbar, d };
        p.validate()?;
        Ok(p)
    }

    /// `ħ = M = 1` with the given frequency and noise strength.
    pub fn natural(omega: f64, d: f64) -> Result<Self> {
        Self::new(omega, 1.0, 1.0, d)
    }

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [("omega", self.omega), ("mass", self.mass), ("hbar", self.hbar)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(field, format!("must be finite and > 0, got {v}")));
            }
        }
        if !(self.d.is_finite() && self.d >= 0.0) {
            return Err(invalid("D", format!("must be finite and >= 0, got {}", self.d)));
        }
        Ok(())
    }

    pub fn with_d(mut self, d: f64) -> Self {
        self.d = d;
        self
    }

    /// Inverse squared ground-state width `MΩ/ħ`.
    #[inline]
    pub fn k(&self) -> f64 {
        self.mass * self.omega / self.hbar
    }

    /// Ground-state length scale `√(ħ/MΩ)`.
    #[inline]
    pub fn length_scale(&self) -> f64 {
        self.k().recip().sqrt()
    }

    /// Momentum scale `√(ħMΩ)`.
    #[inline]
    pub fn momentum_scale(&self) -> f64 {
        (self.hbar * self.mass * self.omega).sqrt()
    }

    /// Phase angle `Ωt`.
    #[inline]
    pub fn phase(&self, t: f64) -> f64 {
        self.omega * t
    }

    /// Duration of `n` full oscillator periods.
    pub fn periods(&self, n: f64) -> f64 {
        2.0 * std::f64::consts::PI * n / self.omega
    }
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            omega: 1.0,
            mass: 1.0,
            hbar: 1.0,
            d: 0.0,
        }
    }
}

/// Squeezing parameter `C` of the wave function `exp(-(MΩ/2ħ) C Q²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeParam(C64);

impl SqueezeParam {
    pub fn new(c: C64) -> Result<Self> {
        if !(c.re.is_finite() && c.im.is_finite()) {
            return Err(invalid("C", "must be finite"));
        }
        if c.re <= 0.0 {
            return Err(invalid("C", format!("Re C must be > 0, got {}", c.re)));
        }
        Ok(Self(c))
    }

    pub fn from_parts(re: f64, im: f64) -> Result<Self> {
        Self::new(C64::new(re, im))
    }

    /// The unsqueezed value `C = 1`.
    pub fn coherent() -> Self {
        Self(C64::new(1.0, 0.0))
    }

    #[inline]
    pub fn value(&self) -> C64 {
        self.0
    }
}

/// A phase-space displacement `(x, p)` in raw units.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpacePoint {
    pub x: f64,
    pub p: f64,
}

impl PhaseSpacePoint {
    pub const ORIGIN: Self = Self { x: 0.0, p: 0.0 };

    pub fn new(x: f64, p: f64) -> Self {
        Self { x, p }
    }

    /// Free classical trajectory after time `t`.
    pub fn evolve(&self, t: f64, params: &SimParams) -> Self {
        let (s, c) = params.phase(t).sin_cos();
        let mw = params.mass * params.omega;
        Self {
            x: self.x * c + self.p / mw * s,
            p: self.p * c - mw * self.x * s,
        }
    }
}

impl std::ops::Add for PhaseSpacePoint {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.p + rhs.p)
    }
}

impl std::ops::Sub for PhaseSpacePoint {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.p - rhs.p)
    }
}
