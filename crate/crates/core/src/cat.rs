//! Superpositions of two coherent states: decoherence of the interference
//! terms, decoherence time, halo radius, and the energy-eigenstate
//! comparison.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::grid::GridSpec;
use crate::kernel::{sample_density, GaussianKernel, PositionDensity};
use crate::oracle::{fock_superposition_dm, low_eigenfunctions, propagate_numeric, NumericDM};
use crate::params::{PhaseSpacePoint, SimParams};
use crate::propagator::evolve_kernel;

/// `c₁|s₁⟩ + c₂|s₂⟩` for coherent states centred at `s₁`, `s₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatSpec {
    pub c1: C64,
    pub c2: C64,
    pub s1: PhaseSpacePoint,
    pub s2: PhaseSpacePoint,
}

/// Kernel of `|ψᵢ⟩⟨ψⱼ|` for unit-amplitude coherent branches
/// `ψ(Q) = (k/π)^¼ exp(-k(Q-x)²/2 + ipQ/ħ - ixp/2ħ)`.
fn branch_kernel(si: PhaseSpacePoint, sj: PhaseSpacePoint, params: &SimParams) -> GaussianKernel {
    let k = params.k();
    let hb = params.hbar;
    GaussianKernel {
        m11: C64::from(0.5 * k),
        m12: C64::from(0.0),
        m22: C64::from(0.5 * k),
        l1: C64::new(k * si.x, si.p / hb),
        l2: C64::new(k * sj.x, -sj.p / hb),
        log_norm: C64::new(
            0.5 * (k / PI).ln() - 0.5 * k * (si.x * si.x + sj.x * sj.x),
            -(si.x * si.p - sj.x * sj.p) / (2.0 * hb),
        ),
    }
}

impl CatSpec {
    /// Normalized superposition.
    pub fn new(c1: C64, c2: C64, s1: PhaseSpacePoint, s2: PhaseSpacePoint, params: &SimParams) -> Result<Self> {
        Self { c1, c2, s1, s2 }.normalized(params)
    }

    /// `⟨ψ|ψ⟩` including the branch overlap.
    pub fn norm_sq(&self, params: &SimParams) -> f64 {
        let overlap = branch_kernel(self.s1, self.s2, params).trace();
        self.c1.norm_sqr() + self.c2.norm_sqr() + 2.0 * (self.c1 * self.c2.conj() * overlap).re
    }

    pub fn normalized(&self, params: &SimParams) -> Result<Self> {
        params.validate()?;
        if self.c1.norm() == 0.0 || self.c2.norm() == 0.0 {
            return Err(invalid("cat", "both branch amplitudes must be nonzero"));
        }
        let n = self.norm_sq(params);
        if !(n.is_finite() && n > 0.0) {
            return Err(invalid("cat", format!("superposition has norm² {n}")));
        }
        let s = n.sqrt().recip();
        Ok(Self {
            c1: self.c1 * s,
            c2: self.c2 * s,
            ..*self
        })
    }

    /// Both branches displaced by `d`, renormalized.
    pub fn translated(&self, d: PhaseSpacePoint, params: &SimParams) -> Result<Self> {
        Self {
            s1: self.s1 + d,
            s2: self.s2 + d,
            ..*self
        }
        .normalized(params)
    }

    /// Branches exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            c1: self.c2,
            c2: self.c1,
            s1: self.s2,
            s2: self.s1,
        }
    }

    /// `√2 cos(P/√(ħMΩ))|0⟩`: equal-weight branches at `Q = ±√(ħ/MΩ)`.
    pub fn even_pair(params: &SimParams) -> Result<Self> {
        let l = params.length_scale();
        Self::new(
            C64::from(1.0),
            C64::from(1.0),
            PhaseSpacePoint::new(l, 0.0),
            PhaseSpacePoint::new(-l, 0.0),
            params,
        )
    }

    /// Equal-weight pair split symmetrically along `Q` with separation
    /// `Δ² = delta2`.
    pub fn with_separation(delta2: f64, params: &SimParams) -> Result<Self> {
        if !(delta2.is_finite() && delta2 >= 0.0) {
            return Err(invalid("delta2", format!("must be >= 0, got {delta2}")));
        }
        // Δ² = (k/2)(2x)²
        let x = (delta2 / (2.0 * params.k())).sqrt();
        Self::new(
            C64::from(1.0),
            C64::from(1.0),
            PhaseSpacePoint::new(x, 0.0),
            PhaseSpacePoint::new(-x, 0.0),
            params,
        )
    }

    fn amps(&self) -> [C64; 2] {
        [self.c1, self.c2]
    }

    fn centers(&self) -> [PhaseSpacePoint; 2] {
        [self.s1, self.s2]
    }
}

/// Dimensionless phase-space separation
/// `Δ² = (MΩ/2ħ)[(x₁-x₂)² + ((p₁-p₂)/MΩ)²]`.
pub fn separation(cat: &CatSpec, params: &SimParams) -> f64 {
    let mw = params.mass * params.omega;
    let dx = cat.s1.x - cat.s2.x;
    let dp = (cat.s1.p - cat.s2.p) / mw;
    0.5 * params.k() * (dx * dx + dp * dp)
}

/// `t_D = [ΩD(Δ²-1)]⁻¹`; divergent inside the halo or without noise.
pub fn decoherence_time(cat: &CatSpec, params: &SimParams) -> Result<f64> {
    let d2 = separation(cat, params);
    if params.d == 0.0 {
        return Err(Error::Divergent("no noise (D = 0)".into()));
    }
    if d2 <= 1.0 {
        return Err(Error::Divergent(format!("Δ² = {d2} <= 1: branches lie inside the halo")));
    }
    Ok(1.0 / (params.omega * params.d * (d2 - 1.0)))
}

/// Radius `2/√(ΩD t_max)` in units of `Δ` of the region around a pointer
/// state that is not resolved by the environment within `t_max`.
pub fn halo_radius(t_max: f64, params: &SimParams) -> Result<f64> {
    params.validate()?;
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(invalid("t_max", format!("must be > 0, got {t_max}")));
    }
    if params.d == 0.0 {
        return Err(Error::Divergent("halo is unbounded for D = 0".into()));
    }
    Ok(2.0 / (params.d * params.phase(t_max)).sqrt())
}

/// Four-kernel density matrix `Σᵢⱼ cᵢcⱼ* |ψᵢ(t)⟩⟨ψⱼ(t)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatDM {
    pub kernels: [[GaussianKernel; 2]; 2],
    pub t: f64,
    pub params: SimParams,
}

impl PositionDensity for CatDM {
    fn value(&self, q: f64, qp: f64) -> C64 {
        self.kernels.iter().flatten().map(|k| k.eval(q, qp)).sum()
    }
}

impl CatDM {
    pub fn trace(&self) -> C64 {
        self.kernels.iter().flatten().map(|k| k.trace()).sum()
    }

    /// Largest mismatch between kernel `(i, j)` and the adjoint of `(j, i)`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max(self.kernels[i][j].distance(&self.kernels[j][i].dagger()));
            }
        }
        worst
    }

    pub fn sample(&self, grid: &GridSpec) -> DMatrix<C64> {
        sample_density(self, grid)
    }

    /// Visibility from the analytic block maxima.
    pub fn visibility_exact(&self) -> Result<f64> {
        let k = &self.kernels;
        ratio(k[0][1].peak_magnitude(), k[0][0].peak_magnitude(), k[1][1].peak_magnitude())
    }
}

fn ratio(cross: f64, d1: f64, d2: f64) -> Result<f64> {
    if !(d1 > 0.0 && d2 > 0.0) {
        return Err(Error::NonPhysical("a diagonal block vanishes".into()));
    }
    Ok(cross / (d1 * d2).sqrt())
}

/// Peak `|cross block|` over the geometric mean of the diagonal-block
/// peaks, all measured on `grid`.
pub fn visibility(cat: &CatDM, grid: &GridSpec) -> Result<f64> {
    grid.validate()?;
    let peak = |kern: &GaussianKernel| kern.sample(grid).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let k = &cat.kernels;
    ratio(peak(&k[0][1]), peak(&k[0][0]), peak(&k[1][1]))
}

/// The four kernels at `t = 0`.
pub fn cat_dm_initial(cat: &CatSpec, params: &SimParams) -> Result<CatDM> {
    params.validate()?;
    let amps = cat.amps();
    let s = cat.centers();
    let kern = |i: usize, j: usize| {
        branch_kernel(s[i], s[j], params).scaled((amps[i] * amps[j].conj()).ln())
    };
    Ok(CatDM {
        kernels: [[kern(0, 0), kern(0, 1)], [kern(1, 0), kern(1, 1)]],
        t: 0.0,
        params: *params,
    })
}

/// Closed form after `n` full periods, with `Λ = 1 + 2nπD`.
pub fn cat_dm_stroboscopic(cat: &CatSpec, n: u32, params: &SimParams) -> Result<CatDM> {
    params.validate()?;
    let k = params.k();
    let hb = params.hbar;
    let mw = params.mass * params.omega;
    let nu = n as f64 * PI * params.d;
    let lam = 1.0 + 2.0 * nu;
    let amps = cat.amps();
    let s = cat.centers();
    let kern = |i: usize, j: usize| {
        let (si, sj) = (s[i], s[j]);
        let xp = si.x + sj.x;
        let xm = si.x - sj.x;
        let psum = si.p + sj.p;
        let dp = (si.p - sj.p) / mw;
        let gauss = 0.5 * (k / (PI * lam)).ln()
            - k / (4.0 * lam) * (xp * xp + xm * xm + 2.0 * nu * (xm * xm + dp * dp));
        let phase = (-(si.x * si.p - sj.x * sj.p) / 2.0 - nu * (si.x * sj.p - sj.x * si.p)) / (hb * lam);
        GaussianKernel {
            m11: C64::from(k * (1.0 + lam * lam) / (4.0 * lam)),
            m12: C64::from(k * (1.0 - lam * lam) / (4.0 * lam)),
            m22: C64::from(k * (1.0 + lam * lam) / (4.0 * lam)),
            l1: C64::new(k / (2.0 * lam) * (xp + lam * xm), (si.p + nu * psum) / (hb * lam)),
            l2: C64::new(k / (2.0 * lam) * (xp - lam * xm), -(sj.p + nu * psum) / (hb * lam)),
            log_norm: C64::new(gauss, phase) + (amps[i] * amps[j].conj()).ln(),
        }
    };
    Ok(CatDM {
        kernels: [[kern(0, 0), kern(0, 1)], [kern(1, 0), kern(1, 1)]],
        t: params.periods(n as f64),
        params: *params,
    })
}

/// Kernel-wise propagation to an arbitrary time.
pub fn cat_dm_general(cat: &CatSpec, t: f64, params: &SimParams) -> Result<CatDM> {
    let init = cat_dm_initial(cat, params)?;
    let mut kernels = init.kernels;
    for row in kernels.iter_mut() {
        for kern in row.iter_mut() {
            *kern = evolve_kernel(kern, t, params)?;
        }
    }
    Ok(CatDM {
        kernels,
        t,
        params: *params,
    })
}

/// Least-squares decay rate of `-ln V` against time over full periods.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub periods: Vec<u32>,
    pub visibilities: Vec<f64>,
    /// Fitted rate (per unit time).
    pub rate: f64,
    /// `1/t_D`.
    pub expected: f64,
}

impl DecayFit {
    pub fn ratio(&self) -> f64 {
        self.rate / self.expected
    }
}

pub fn fit_decay_rate(cat: &CatSpec, periods: &[u32], grid: &GridSpec, params: &SimParams) -> Result<DecayFit> {
    if periods.len() < 2 {
        return Err(invalid("periods", "need at least two points for a slope"));
    }
    let expected = decoherence_time(cat, params)?.recip();
    let mut vis = Vec::with_capacity(periods.len());
    for &n in periods {
        vis.push(visibility(&cat_dm_stroboscopic(cat, n, params)?, grid)?);
    }
    let ts: Vec<f64> = periods.iter().map(|&n| params.periods(n as f64)).collect();
    let ys: Vec<f64> = vis.iter().map(|v| -v.ln()).collect();
    let m = ts.len() as f64;
    let tbar = ts.iter().sum::<f64>() / m;
    let ybar = ys.iter().sum::<f64>() / m;
    let sxy: f64 = ts.iter().zip(&ys).map(|(t, y)| (t - tbar) * (y - ybar)).sum();
    let sxx: f64 = ts.iter().map(|t| (t - tbar) * (t - tbar)).sum();
    Ok(DecayFit {
        periods: periods.to_vec(),
        visibilities: vis,
        rate: sxy / sxx,
        expected,
    })
}

/// Coherence between the two lowest oscillator levels,
/// `|ρ₀₁| / √(ρ₀₀ ρ₁₁)`.
pub fn coherence_retention(dm: &NumericDM, params: &SimParams) -> Result<f64> {
    let (phi0, phi1) = low_eigenfunctions(&dm.grid, params);
    let r00 = dm.matrix_element(&phi0, &phi0).re;
    let r11 = dm.matrix_element(&phi1, &phi1).re;
    let r01 = dm.matrix_element(&phi0, &phi1).norm();
    ratio(r01, r00, r11)
}

/// `(|0⟩ + |1⟩)/√2` before and after `n` periods.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDemo {
    pub t: f64,
    pub initial: NumericDM,
    pub evolved: NumericDM,
    pub retention: f64,
}

pub fn halo_demo_fock(n: u32, d: f64, params: &SimParams, grid: GridSpec) -> Result<FockDemo> {
    let params = params.with_d(d);
    params.validate()?;
    let t = params.periods(n as f64);
    let initial = fock_superposition_dm(grid, &params)?;
    let evolved = propagate_numeric(&initial, t, &params)?;
    let retention = coherence_retention(&evolved, &params)?;
    Ok(FockDemo {
        t,
        initial,
        evolved,
        retention,
    })
}
