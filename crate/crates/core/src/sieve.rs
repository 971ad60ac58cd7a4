//! Entropy-based selection of the least-mixing initial squeezed states.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gaussian::{make_squeezed, thermal_entropy};
use crate::optim::{nelder_mead, SimplexOptions};
use crate::params::{PhaseSpacePoint, SimParams, SqueezeParam};
use crate::propagator::{evolve_gaussian, evolve_squeezed, sigma};

/// Default ceiling on `DΩt` for the pointer-state picture to apply.
pub const VALIDITY_THRESHOLD: f64 = 0.1;

const MAX_ITER: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SieveResult {
    pub t: f64,
    pub c_star: C64,
    pub s_min: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Entropy at time `t` of the state that started as the pure squeezed
/// state `C`.
pub fn entropy_of_initial(c: SqueezeParam, t: f64, params: &SimParams) -> Result<f64> {
    Ok(evolve_squeezed(c, t, params)?.von_neumann_entropy())
}

/// Same as [`entropy_of_initial`] for a squeezed state displaced to
/// `center`, computed through the general kernel propagation.
pub fn entropy_of_translated(
    c: SqueezeParam,
    center: PhaseSpacePoint,
    t: f64,
    params: &SimParams,
) -> Result<f64> {
    let start = make_squeezed(c, *params)?.translate(center);
    Ok(evolve_gaussian(&start, t, params)?.von_neumann_entropy())
}

fn to_squeeze(x: &[f64]) -> Option<SqueezeParam> {
    SqueezeParam::from_parts(x[0].exp(), x[1]).ok()
}

fn minimize_with<F>(t: f64, params: &SimParams, tol: f64, objective: F) -> Result<SieveResult>
where
    F: Fn(SqueezeParam) -> Result<f64>,
{
    params.validate()?;
    if !(t.is_finite() && t > 0.0) {
        return Err(if t < 0.0 { Error::NegativeTime(t) } else { Error::SingularTime(t) });
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(invalid("tol", format!("must be > 0, got {tol}")));
    }
    if params.d == 0.0 {
        return Err(Error::DegenerateObjective);
    }
    let r = nelder_mead(
        |x| match to_squeeze(x).map(&objective) {
            Some(Ok(s)) => s,
            _ => f64::INFINITY,
        },
        &[0.0, 0.0],
        SimplexOptions {
            step: 0.1,
            tol,
            max_iter: MAX_ITER,
        },
    );
    let c_star = C64::new(r.x[0].exp(), r.x[1]);
    if !r.converged {
        return Err(Error::NotConverged {
            iterations: r.iterations,
            best_re: c_star.re,
            best_im: c_star.im,
            best_s: r.f,
        });
    }
    Ok(SieveResult {
        t,
        c_star,
        s_min: r.f,
        iterations: r.iterations,
        converged: true,
    })
}

/// Minimize the entropy at time `t` over initial squeezing, starting
/// from the coherent state `C = 1`.
pub fn sieve_minimize(t: f64, params: &SimParams, tol: f64) -> Result<SieveResult> {
    minimize_with(t, params, tol, |c| entropy_of_initial(c, t, params))
}

/// [`sieve_minimize`] for initial states displaced to `center`, with the
/// objective evaluated by kernel propagation of the displaced state.
pub fn sieve_minimize_translated(
    t: f64,
    center: PhaseSpacePoint,
    params: &SimParams,
    tol: f64,
) -> Result<SieveResult> {
    minimize_with(t, params, tol, |c| entropy_of_translated(c, center, t, params))
}

/// Entropy after `n` half periods of an initially coherent state.
pub fn coherent_entropy(n: u32, d: f64) -> f64 {
    thermal_entropy(n as f64 * PI * d / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidityCheck {
    /// `DΩt`
    pub margin: f64,
    pub valid: bool,
}

/// Whether the accumulated noise `DΩt` is small enough for the
/// superselection picture, against [`VALIDITY_THRESHOLD`].
pub fn superselection_valid(d: f64, t: f64, params: &SimParams) -> ValidityCheck {
    superselection_valid_with(d, t, params, VALIDITY_THRESHOLD)
}

pub fn superselection_valid_with(d: f64, t: f64, params: &SimParams, threshold: f64) -> ValidityCheck {
    let margin = d * params.phase(t);
    ValidityCheck {
        margin,
        valid: margin < threshold,
    }
}

/// Entropy sampled over a rectangle of initial squeezing parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropySurface {
    pub t: f64,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    /// `values[i][j]` at `(re[i], im[j])`
    pub values: Vec<Vec<f64>>,
}

impl EntropySurface {
    /// Grid point with the smallest entropy.
    pub fn argmin(&self) -> C64 {
        let mut best = (f64::INFINITY, 0, 0);
        for (i, row) in self.values.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v < best.0 {
                    best = (v, i, j);
                }
            }
        }
        C64::new(self.re[best.1], self.im[best.2])
    }

    pub fn cell(&self) -> (f64, f64) {
        let step = |v: &[f64]| if v.len() > 1 { v[1] - v[0] } else { 0.0 };
        (step(&self.re), step(&self.im))
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

pub fn sieve_scan(
    t: f64,
    params: &SimParams,
    re_range: (f64, f64),
    im_range: (f64, f64),
    resolution: (usize, usize),
) -> Result<EntropySurface> {
    if !(re_range.0 > 0.0 && re_range.1 >= re_range.0) {
        return Err(invalid("re_range", format!("need 0 < lo <= hi, got {re_range:?}")));
    }
    if im_range.1 < im_range.0 {
        return Err(invalid("im_range", format!("need lo <= hi, got {im_range:?}")));
    }
    if resolution.0 == 0 || resolution.1 == 0 {
        return Err(invalid("resolution", "must be at least 1 in each direction"));
    }
    let re = linspace(re_range.0, re_range.1, resolution.0);
    let im = linspace(im_range.0, im_range.1, resolution.1);
    let values = re
        .par_iter()
        .map(|&r| {
            im.iter()
                .map(|&i| entropy_of_initial(SqueezeParam::from_parts(r, i)?, t, params))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EntropySurface { t, re, im, values })
}

/// Outcome of a randomized local-minimality check around `σ(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalCheck {
    pub s_sigma: f64,
    /// Smallest `S(C) - S(σ)` found among the samples.
    pub worst_gap: f64,
    pub samples: usize,
}

/// Sample `samples` points uniformly in a disc of `radius` around `σ(t)`
/// and compare entropies.
pub fn certify_local_minimum(
    t: f64,
    params: &SimParams,
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<LocalCheck> {
    let sg = sigma(t, params)?;
    let s_sigma = entropy_of_initial(SqueezeParam::new(sg)?, t, params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    let mut used = 0;
    while used < samples {
        let r = radius * rng.random::<f64>().sqrt();
        let phi = 2.0 * PI * rng.random::<f64>();
        let c = sg + C64::from_polar(r, phi);
        let Ok(c) = SqueezeParam::new(c) else { continue };
        worst = worst.min(entropy_of_initial(c, t, params)? - s_sigma);
        used += 1;
    }
    Ok(LocalCheck {
        s_sigma,
        worst_gap: worst,
        samples,
    })
}

/// Entropy averaged uniformly over `(0, t_max]` by the midpoint rule with
/// `samples` nodes. Extension: a simple time-averaged sieve.
pub fn time_averaged_entropy(c: SqueezeParam, t_max: f64, samples: usize, params: &SimParams) -> Result<f64> {
    if samples == 0 {
        return Err(invalid("samples", "must be >= 1"));
    }
    let dt = t_max / samples as f64;
    let mut acc = 0.0;
    for i in 0..samples {
        acc += entropy_of_initial(c, (i as f64 + 0.5) * dt, params)?;
    }
    Ok(acc / samples as f64)
}

/// Minimizer of [`time_averaged_entropy`]; `t` in the result is `t_max`.
pub fn sieve_minimize_averaged(t_max: f64, samples: usize, params: &SimParams, tol: f64) -> Result<SieveResult> {
    minimize_with(t_max, params, tol, |c| time_averaged_entropy(c, t_max, samples, params))
}
