//! Closed-form time evolution under the single-mode propagator of the
//! weak-coupling, high-temperature (white noise) limit:
//!
//! ```text
//! ρ(A,A';t) = k/(2π|sin θ|) ∫dAᵢdAᵢ' ρ(Aᵢ,Aᵢ';0)
//!     × exp[ik/(2 sin θ) ((A² - A'² + Aᵢ² - Aᵢ'²) cos θ - 2(AAᵢ - A'Aᵢ'))]
//!     × exp[-kD/(4 sin²θ) (((A-A')² + (Aᵢ-Aᵢ')²)(θ - sin θ cos θ)
//!                          - 2(A-A')(Aᵢ-Aᵢ')(θ cos θ - sin θ))]
//! ```
//!
//! with `θ = Ωt` and `k = MΩ/ħ`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::gaussian::GaussianDM;
use crate::kernel::GaussianKernel;
use crate::params::{PhaseSpacePoint, SimParams, SqueezeParam};

/// Below this `|sin θ|` (and past the first quarter period) the propagator
/// is applied as two legs instead of directly.
const SPLIT_SIN: f64 = 0.3;
/// Shortest nonzero phase angle the direct kernel accepts.
const MIN_PHASE: f64 = 1e-8;

/// `x - sin x`, accurate for small `x`.
pub(crate) fn x_minus_sin(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let x2 = x * x;
        // x³/3! - x⁵/5! + x⁷/7! - x⁹/9! + x¹¹/11!
        x * x2 / 6.0
            * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0 * (1.0 - x2 / 110.0))))
    } else {
        x - x.sin()
    }
}

/// `θ - sin θ cos θ`.
pub(crate) fn theta_minus_sc(theta: f64) -> f64 {
    0.5 * x_minus_sin(2.0 * theta)
}

/// `θ cos θ - sin θ`, accurate for small `θ`.
pub(crate) fn theta_c_minus_s(theta: f64) -> f64 {
    if theta.abs() < 0.1 {
        // Σ (-1)ⁿ 2n θ^(2n+1) / (2n+1)!
        let t2 = theta * theta;
        let mut term = theta;
        let mut fact = 1.0;
        let mut sum = 0.0;
        for n in 1..8 {
            term *= t2;
            fact *= (2 * n) as f64 * (2 * n + 1) as f64;
            let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
            sum += sign * (2 * n) as f64 * term / fact;
        }
        sum
    } else {
        theta * theta.cos() - theta.sin()
    }
}

/// The dimensionless functions `(α, β, λ)` of a squeezed initial state,
/// together with `β - Re C` evaluated without cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedEvolution {
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub beta_excess: f64,
}

pub fn squeezed_functions(c: SqueezeParam, theta: f64, d: f64) -> SqueezedEvolution {
    let c = c.value();
    let (re, im) = (c.re, c.im);
    let (s, co) = theta.sin_cos();
    let a1 = theta_minus_sc(theta);
    let radicand = x_minus_sin(theta) * (theta + s);
    let alpha_inv = re * re * s * s + d * re * a1 + (im * s - co).powi(2);
    let beta_excess = re * d * d * radicand + d * c.norm_sqr() * a1 + d * (theta + s * co)
        - 2.0 * d * im * s * s;
    SqueezedEvolution {
        alpha: alpha_inv.recip(),
        beta: re + beta_excess,
        lambda: (c.norm_sqr() - 1.0) * s * co - im * (2.0 * theta).cos() + d * re * s * s,
        beta_excess,
    }
}

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    Ok(())
}

/// Evolve the pure squeezed state `exp(-(MΩ/2ħ) C Q²)` for time `t`.
pub fn evolve_squeezed(c: SqueezeParam, t: f64, params: &SimParams) -> Result<GaussianDM> {
    params.validate()?;
    check_time(t)?;
    let f = squeezed_functions(c, params.phase(t), params.d);
    GaussianDM::with_excess(
        f.alpha * c.value().re,
        f.alpha * f.beta,
        f.alpha * f.lambda,
        f.alpha * f.beta_excess,
        PhaseSpacePoint::ORIGIN,
        *params,
    )
}

/// Evolve the coherent state centred at `(x, p)`; the centre follows the
/// classical trajectory.
pub fn evolve_coherent(x: f64, p: f64, t: f64, params: &SimParams) -> Result<GaussianDM> {
    let shape = evolve_squeezed(SqueezeParam::coherent(), t, params)?;
    Ok(shape.with_center(PhaseSpacePoint::new(x, p).evolve(t, params)))
}

/// Squeezing parameter `σ(t)` of the initial state that is least mixed at
/// time `t`.
pub fn sigma(t: f64, params: &SimParams) -> Result<C64> {
    params.validate()?;
    let theta = params.phase(t);
    if !(theta.is_finite() && theta > 0.0) {
        return Err(Error::SingularTime(t));
    }
    let denom = x_minus_sin(2.0 * theta);
    let mod2 = (2.0 * theta + (2.0 * theta).sin()) / denom;
    let im = 2.0 * theta.sin().powi(2) / denom;
    Ok(C64::new((mod2 - im * im).max(0.0).sqrt(), im))
}

/// `Λ(t) = 1 + D √((Ωt)² - sin²Ωt)`.
pub fn mixing_factor(t: f64, params: &SimParams) -> f64 {
    1.0 + mixing_excess(params.phase(t), params.d)
}

fn mixing_excess(theta: f64, d: f64) -> f64 {
    d * (x_minus_sin(theta) * (theta + theta.sin())).max(0.0).sqrt()
}

/// The state evolved from the optimal squeezed state `σ(t)`, diagonal in
/// an oscillator eigenbasis with geometric weights `((Λ-1)/(Λ+1))ⁿ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolvedSpecial {
    pub t: f64,
    pub lambda: f64,
    pub sigma: C64,
    pub dm: GaussianDM,
}

impl EvolvedSpecial {
    /// Ratio of consecutive eigenvalues.
    pub fn ladder_ratio(&self) -> f64 {
        (self.lambda - 1.0) / (self.lambda + 1.0)
    }

    /// `n`-th eigenvalue `2/(Λ+1) · ((Λ-1)/(Λ+1))ⁿ`.
    pub fn eigenvalue(&self, n: u32) -> f64 {
        2.0 / (self.lambda + 1.0) * self.ladder_ratio().powi(n as i32)
    }
}

pub fn evolve_special(t: f64, params: &SimParams) -> Result<EvolvedSpecial> {
    let sg = sigma(t, params)?;
    let theta = params.phase(t);
    let excess = mixing_excess(theta, params.d);
    let lambda = 1.0 + excess;
    // phase coefficient from the general squeezed-state closed form
    let sq = SqueezeParam::new(sg)?;
    let f = squeezed_functions(sq, theta, params.d);
    let dm = GaussianDM::with_excess(
        sg.re / lambda,
        sg.re * lambda,
        f.alpha * f.lambda,
        sg.re * excess * (lambda + 1.0) / lambda,
        PhaseSpacePoint::ORIGIN,
        *params,
    )?;
    Ok(EvolvedSpecial {
        t,
        lambda,
        sigma: sg,
        dm,
    })
}

/// Complex symmetric 2×2 matrix `[[xx, xy], [xy, yy]]`.
#[derive(Debug, Clone, Copy)]
struct Sym2 {
    xx: C64,
    xy: C64,
    yy: C64,
}

/// Full 2×2 block.
#[derive(Debug, Clone, Copy)]
struct Mat2 {
    m: [[C64; 2]; 2],
}

/// Quadratic form `vᵀPv` of the negated propagator exponent over
/// `v = (A, A', Aᵢ, Aᵢ')`, split into output/input blocks, and the
/// log-prefactor.
struct PropagatorForm {
    out: Sym2,
    inp: Sym2,
    /// rows: (Aᵢ, Aᵢ'), columns: (A, A')
    cross: Mat2,
    log_prefactor: f64,
}

impl PropagatorForm {
    fn new(theta: f64, params: &SimParams) -> Self {
        let k = params.k();
        let (s, c) = theta.sin_cos();
        let f = C64::new(0.0, k / (2.0 * s));
        let g = -k * params.d / (4.0 * s * s);
        let ga1 = C64::from(g * theta_minus_sc(theta));
        let ga2 = C64::from(g * theta_c_minus_s(theta));
        let diag = Sym2 {
            xx: -f * c - ga1,
            xy: ga1,
            yy: f * c - ga1,
        };
        Self {
            out: diag,
            inp: diag,
            cross: Mat2 {
                m: [[f + ga2, -ga2], [-ga2, -f + ga2]],
            },
            log_prefactor: (k / (2.0 * PI * s.abs())).ln(),
        }
    }
}

/// Apply the propagator for a single leg with `sin θ` bounded away from 0.
fn propagate_leg(kernel: &GaussianKernel, theta: f64, params: &SimParams) -> Result<GaussianKernel> {
    let pf = PropagatorForm::new(theta, params);
    let g = Sym2 {
        xx: kernel.m11 + pf.inp.xx,
        xy: kernel.m12 + pf.inp.xy,
        yy: kernel.m22 + pf.inp.yy,
    };
    let schur = g.yy - g.xy * g.xy / g.xx;
    if !(g.xx.re > 0.0 && schur.re > 0.0) {
        return Err(Error::NonIntegrable(format!(
            "input kernel diverges under propagation (G11 = {}, Schur = {})",
            g.xx, schur
        )));
    }
    let det = g.xx * g.yy - g.xy * g.xy;
    let gi = Sym2 {
        xx: g.yy / det,
        xy: -g.xy / det,
        yy: g.xx / det,
    };
    let x = pf.cross.m;
    // W = G⁻¹ X  (2×2)
    let w = [
        [gi.xx * x[0][0] + gi.xy * x[1][0], gi.xx * x[0][1] + gi.xy * x[1][1]],
        [gi.xy * x[0][0] + gi.yy * x[1][0], gi.xy * x[0][1] + gi.yy * x[1][1]],
    ];
    // Xᵀ G⁻¹ X
    let q11 = x[0][0] * w[0][0] + x[1][0] * w[1][0];
    let q12 = x[0][0] * w[0][1] + x[1][0] * w[1][1];
    let q22 = x[0][1] * w[0][1] + x[1][1] * w[1][1];
    let (l1, l2) = (kernel.l1, kernel.l2);
    // G⁻¹ L
    let gl = [gi.xx * l1 + gi.xy * l2, gi.xy * l1 + gi.yy * l2];
    let out = GaussianKernel {
        m11: pf.out.xx - q11,
        m12: pf.out.xy - q12,
        m22: pf.out.yy - q22,
        l1: -(x[0][0] * gl[0] + x[1][0] * gl[1]),
        l2: -(x[0][1] * gl[0] + x[1][1] * gl[1]),
        log_norm: kernel.log_norm + 0.25 * (l1 * gl[0] + l2 * gl[1]) + pf.log_prefactor + PI.ln()
            - 0.5 * g.xx.ln()
            - 0.5 * schur.ln(),
    };
    out.check_integrable()?;
    Ok(out)
}

/// Evolve a general Gaussian kernel for time `t` by exact Gaussian
/// integration against the propagator.
///
/// Where `sin Ωt` is small the evolution is composed from two legs
/// `t - π/(2Ω)` and `π/(2Ω)`, which is exact because the propagator is a
/// semigroup; `t = 0` is the identity.
pub fn evolve_kernel(kernel: &GaussianKernel, t: f64, params: &SimParams) -> Result<GaussianKernel> {
    params.validate()?;
    check_time(t)?;
    kernel.check_integrable()?;
    evolve_phase(kernel, params.phase(t), params)
}

fn evolve_phase(kernel: &GaussianKernel, theta: f64, params: &SimParams) -> Result<GaussianKernel> {
    if theta == 0.0 {
        return Ok(*kernel);
    }
    if theta < MIN_PHASE {
        return Err(Error::SingularTime(theta / params.omega));
    }
    if theta > FRAC_PI_2 && theta.sin().abs() < SPLIT_SIN {
        let first = evolve_phase(kernel, theta - FRAC_PI_2, params)?;
        return propagate_leg(&first, FRAC_PI_2, params);
    }
    propagate_leg(kernel, theta, params)
}

/// Evolve an arbitrary Gaussian density matrix through its kernel.
pub fn evolve_gaussian(dm: &GaussianDM, t: f64, params: &SimParams) -> Result<GaussianDM> {
    let k = evolve_kernel(&dm.to_kernel(), t, params)?;
    GaussianDM::from_kernel(&k, *params)
}
