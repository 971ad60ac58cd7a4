//! Brute-force reference computations on position grids: direct double
//! quadrature of the propagator, grid diagonalization, and non-Gaussian
//! test states.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gaussian::GaussianDM;
use crate::grid::GridSpec;
use crate::kernel::{sample_density, PositionDensity};
use crate::params::SimParams;
use crate::propagator::{theta_c_minus_s, theta_minus_sc};

/// Relative magnitude allowed at the grid boundary.
pub const EDGE_TOLERANCE: f64 = 1e-10;
/// Negative eigenvalues above this are clipped without comment.
pub const CLIP_SILENT: f64 = 1e-10;
/// Negative eigenvalues below this are a resolution failure.
pub const CLIP_FATAL: f64 = 1e-6;

/// Legs shorter than this phase are refused: the kernel oscillates too
/// fast to be sampled.
const MIN_LEG_SIN: f64 = 0.3;

/// A density matrix sampled on `grid × grid`.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericDM {
    pub grid: GridSpec,
    pub rho: DMatrix<C64>,
}

impl NumericDM {
    pub fn new(grid: GridSpec, rho: DMatrix<C64>) -> Result<Self> {
        grid.validate()?;
        if rho.nrows() != grid.points || rho.ncols() != grid.points {
            return Err(Error::DegenerateGrid(format!(
                "matrix is {}x{} but grid has {} points",
                rho.nrows(),
                rho.ncols(),
                grid.points
            )));
        }
        Ok(Self { grid, rho })
    }

    pub fn from_density<T: PositionDensity + ?Sized>(state: &T, grid: GridSpec) -> Result<Self> {
        grid.validate()?;
        Ok(Self {
            grid,
            rho: sample_density(state, &grid),
        })
    }

    /// Trapezoid trace `Σ wᵢ ρ(Qᵢ, Qᵢ)`.
    pub fn trace(&self) -> C64 {
        self.grid
            .weights()
            .iter()
            .enumerate()
            .map(|(i, &w)| self.rho[(i, i)] * w)
            .sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.grid.points;
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for i in 0..j {
                worst = worst.max((self.rho[(i, j)] - self.rho[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Largest `|ρ|` on the boundary relative to the largest anywhere.
    pub fn edge_ratio(&self) -> f64 {
        let n = self.grid.points;
        let peak = self.rho.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut edge: f64 = 0.0;
        for i in 0..n {
            for z in [self.rho[(i, 0)], self.rho[(i, n - 1)], self.rho[(0, i)], self.rho[(n - 1, i)]] {
                edge = edge.max(z.norm());
            }
        }
        if peak > 0.0 {
            edge / peak
        } else {
            0.0
        }
    }

    /// Weighted Hilbert-Schmidt distance `(Σ wᵢwⱼ |Δρᵢⱼ|²)^½`.
    pub fn hs_distance(&self, other: &Self) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::DegenerateGrid("grids differ".into()));
        }
        Ok(weighted_norm(&(&self.rho - &other.rho), &self.grid))
    }

    /// Distance to an analytic density sampled on the same grid.
    pub fn distance_to<T: PositionDensity + ?Sized>(&self, state: &T) -> f64 {
        weighted_norm(&(&self.rho - sample_density(state, &self.grid)), &self.grid)
    }

    /// `⟨f|ρ|g⟩` for real functions sampled on the grid.
    pub fn matrix_element(&self, f: &[f64], g: &[f64]) -> C64 {
        let w = self.grid.weights();
        let n = self.grid.points;
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..n {
            let mut col = C64::new(0.0, 0.0);
            for i in 0..n {
                col += self.rho[(i, j)] * (w[i] * f[i]);
            }
            acc += col * (w[j] * g[j]);
        }
        acc
    }

    /// `⟨Q⟩ = Σ wᵢ Qᵢ ρ(Qᵢ, Qᵢ)`.
    pub fn mean_position(&self) -> f64 {
        let w = self.grid.weights();
        self.grid
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, &q)| w[i] * q * self.rho[(i, i)].re)
            .sum()
    }
}

fn weighted_norm(m: &DMatrix<C64>, grid: &GridSpec) -> f64 {
    let w = grid.weights();
    let n = grid.points;
    let mut acc = 0.0;
    for j in 0..n {
        for i in 0..n {
            acc += w[i] * w[j] * m[(i, j)].norm_sqr();
        }
    }
    acc.sqrt()
}

/// Propagate by direct trapezoid quadrature over both input coordinates
/// for every output pair.
///
/// Where `sin Ωt` is small the evolution is split into `t - π/(2Ω)` and
/// `π/(2Ω)`; short times with small `sin Ωt` cannot be sampled and are
/// refused.
pub fn propagate_numeric(initial: &NumericDM, t: f64, params: &SimParams) -> Result<NumericDM> {
    params.validate()?;
    if !t.is_finite() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let edge = initial.edge_ratio();
    if edge > EDGE_TOLERANCE {
        return Err(Error::UnderResolved(format!(
            "initial state reaches the grid edge (relative magnitude {edge:.2e})"
        )));
    }
    let out = propagate_phase(initial, params.phase(t), params, t)?;
    let edge = out.edge_ratio();
    if edge > 1e3 * EDGE_TOLERANCE {
        return Err(Error::UnderResolved(format!(
            "evolved state reaches the grid edge (relative magnitude {edge:.2e}); widen the grid"
        )));
    }
    Ok(out)
}

fn propagate_phase(dm: &NumericDM, theta: f64, params: &SimParams, t: f64) -> Result<NumericDM> {
    if theta == 0.0 {
        return Ok(dm.clone());
    }
    if theta.sin().abs() >= MIN_LEG_SIN {
        return quadrature_leg(dm, theta, params);
    }
    if theta > FRAC_PI_2 {
        let first = propagate_phase(dm, theta - FRAC_PI_2, params, t)?;
        return quadrature_leg(&first, FRAC_PI_2, params);
    }
    Err(Error::SingularTime(t))
}

fn quadrature_leg(dm: &NumericDM, theta: f64, params: &SimParams) -> Result<NumericDM> {
    let grid = dm.grid;
    let n = grid.points;
    let k = params.k();
    let (s, c) = theta.sin_cos();
    let h = grid.spacing();
    let reach = grid.lo().abs().max(grid.hi().abs());
    // phase step of the output-input coupling at the far edge
    let nyquist = h * k * reach / s.abs();
    if nyquist > PI {
        return Err(Error::UnderResolved(format!(
            "grid spacing {h:.3e} cannot sample the propagator phase at Ωt = {theta:.4} \
             (phase step {nyquist:.2} > π); use more points"
        )));
    }

    let nodes = grid.nodes();
    let w = grid.weights();
    let phase = k * c / (2.0 * s);
    let damp = k * params.d * theta_minus_sc(theta) / (4.0 * s * s);
    let kappa = k * params.d * theta_c_minus_s(theta) / (2.0 * s * s);
    let pair = |x: f64, y: f64| C64::new(-damp * (x - y) * (x - y), phase * (x * x - y * y));

    // weighted input with its own half of the exponent
    let g = DMatrix::from_fn(n, n, |i, j| {
        dm.rho[(i, j)] * w[i] * w[j] * pair(nodes[i], nodes[j]).exp()
    });
    let log_pref = (k / (2.0 * PI * s.abs())).ln();

    let data: Vec<C64> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            // column-major: idx = i + n j
            let (a, ap) = (nodes[idx % n], nodes[idx / n]);
            let xi = C64::new(kappa * (a - ap), -k * a / s);
            let eta = C64::new(-kappa * (a - ap), k * ap / s);
            let mut acc = C64::new(0.0, 0.0);
            let right: Vec<C64> = nodes.iter().map(|&q| (eta * q).exp()).collect();
            for (i, &qi) in nodes.iter().enumerate() {
                let mut row = C64::new(0.0, 0.0);
                for (jj, r) in right.iter().enumerate() {
                    row += g[(i, jj)] * r;
                }
                acc += (xi * qi).exp() * row;
            }
            acc * (pair(a, ap) + log_pref).exp()
        })
        .collect();
    Ok(NumericDM {
        grid,
        rho: DMatrix::from_vec(n, n, data),
    })
}

/// Spectrum and entropy of a grid density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyReport {
    pub entropy: f64,
    /// Descending, after clipping.
    pub eigenvalues: Vec<f64>,
    pub min_eigenvalue: f64,
    /// Eigenvalues in `[-CLIP_FATAL, -CLIP_SILENT)` that were set to zero.
    pub clipped: usize,
}

/// Diagonalize `W^½ ρ W^½` and return the von Neumann entropy of the
/// clipped, renormalized spectrum.
pub fn grid_entropy(dm: &NumericDM) -> Result<EntropyReport> {
    let n = dm.grid.points;
    let sw: Vec<f64> = dm.grid.weights().iter().map(|w| w.sqrt()).collect();
    let m = DMatrix::from_fn(n, n, |i, j| {
        let herm = 0.5 * (dm.rho[(i, j)] + dm.rho[(j, i)].conj());
        herm * (sw[i] * sw[j])
    });
    let eig = SymmetricEigen::new(m);
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    let min = vals.last().copied().unwrap_or(0.0);
    if min < -CLIP_FATAL {
        return Err(Error::NegativeSpectrum { value: min });
    }
    let clipped = vals.iter().filter(|&&v| v < -CLIP_SILENT).count();
    for v in vals.iter_mut() {
        *v = v.max(0.0);
    }
    let total: f64 = vals.iter().sum();
    if !(total > 0.0) {
        return Err(Error::NonPhysical("grid density has zero trace".into()));
    }
    let entropy = -vals
        .iter()
        .map(|&v| v / total)
        .filter(|&p| p > 0.0)
        .map(|p| p * p.ln())
        .sum::<f64>();
    Ok(EntropyReport {
        entropy: entropy.max(0.0),
        eigenvalues: vals,
        min_eigenvalue: min,
        clipped,
    })
}

/// Oscillator eigenfunctions `φ₀` and `φ₁` sampled on `grid`.
pub fn low_eigenfunctions(grid: &GridSpec, params: &SimParams) -> (Vec<f64>, Vec<f64>) {
    let k = params.k();
    let norm = (k / PI).powf(0.25);
    let phi0: Vec<f64> = grid.nodes().iter().map(|&q| norm * (-0.5 * k * q * q).exp()).collect();
    let phi1 = grid
        .nodes()
        .iter()
        .zip(&phi0)
        .map(|(&q, &g)| (2.0 * k).sqrt() * q * g)
        .collect();
    (phi0, phi1)
}

/// `(|0⟩ + |1⟩)/√2` sampled on `grid`.
pub fn fock_superposition_dm(grid: GridSpec, params: &SimParams) -> Result<NumericDM> {
    params.validate()?;
    grid.validate()?;
    let (phi0, phi1) = low_eigenfunctions(&grid, params);
    let psi: Vec<f64> = phi0.iter().zip(&phi1).map(|(a, b)| (a + b) / 2f64.sqrt()).collect();
    let n = grid.points;
    Ok(NumericDM {
        grid,
        rho: DMatrix::from_fn(n, n, |i, j| C64::from(psi[i] * psi[j])),
    })
}

/// Auto-sized grid for propagating `dm` to time `t`: eight widths beyond
/// the widest of the initial and closed-form final states, with spacing
/// fine enough for both coherence lengths and the propagator phase.
pub fn oracle_grid(dm: &GaussianDM, t: f64, params: &SimParams) -> Result<GridSpec> {
    let end = crate::propagator::evolve_gaussian(dm, t, params)?;
    let k = params.k();
    let width = (1.0 / (k * dm.a())).sqrt().max((1.0 / (k * end.a())).sqrt());
    let coherence = (1.0 / (k * dm.b())).sqrt().min((1.0 / (k * end.b())).sqrt());
    let center = dm.center().x.abs().max(end.center().x.abs());
    let half_width = center + 8.0 * width;
    let theta = params.phase(t);
    let leg_sin = if theta.sin().abs() >= MIN_LEG_SIN { theta.sin().abs() } else { 1.0 };
    let by_phase = 0.8 * PI * leg_sin / (k * half_width);
    let by_state = 0.5 * coherence;
    let h = by_phase.min(by_state);
    let points = ((2.0 * half_width / h).ceil() as usize + 1).max(crate::grid::MIN_POINTS);
    GridSpec::new(0.0, half_width, points)
}

/// Lorentz-oscillator dielectric function, an analytic causal pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzOracle {
    /// Oscillator strength `ω_p²`.
    pub strength: f64,
    pub resonance: f64,
    pub width: f64,
}

impl LorentzOracle {
    pub fn new(strength: f64, resonance: f64, width: f64) -> Result<Self> {
        for (field, v) in [("strength", strength), ("resonance", resonance), ("width", width)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(crate::error::invalid(field, format!("must be > 0, got {v}")));
            }
        }
        Ok(Self {
            strength,
            resonance,
            width,
        })
    }

    fn denom(&self, w: f64) -> f64 {
        let d = self.resonance * self.resonance - w * w;
        d * d + self.width * self.width * w * w
    }

    pub fn im_k(&self, w: f64) -> f64 {
        self.strength * self.width * w / self.denom(w)
    }

    pub fn re_k(&self, w: f64) -> f64 {
        1.0 + self.strength * (self.resonance * self.resonance - w * w) / self.denom(w)
    }

    /// `(Im K, Re K)` sampled at `omegas`.
    pub fn tables(&self, omegas: &[f64]) -> (Vec<f64>, Vec<f64>) {
        (
            omegas.iter().map(|&w| self.im_k(w)).collect(),
            omegas.iter().map(|&w| self.re_k(w)).collect(),
        )
    }
}

/// Convenience for the standard grids: auto-sized ground-state grid of
/// `points` nodes over eight widths.
pub fn ground_grid(points: usize, params: &SimParams) -> Result<GridSpec> {
    GridSpec::new(0.0, 8.0 * params.length_scale(), points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{make_coherent, make_squeezed};
    use crate::params::SqueezeParam;
    use crate::propagator::evolve_squeezed;

    fn p(d: f64) -> SimParams {
        SimParams::natural(1.0, d).unwrap()
    }

    #[test]
    fn ground_state_returns_after_a_period() {
        let params = p(0.0);
        let g = ground_grid(96, &params).unwrap();
        let dm = NumericDM::from_density(&make_coherent(0.0, 0.0, params).unwrap(), g).unwrap();
        let out = propagate_numeric(&dm, 2.0 * PI, &params).unwrap();
        assert!(out.hs_distance(&dm).unwrap() < 1e-6);
    }

    #[test]
    fn squeezed_matches_closed_form() {
        let params = p(0.05);
        let c = SqueezeParam::from_parts(2.0, 0.5).unwrap();
        let g = ground_grid(128, &params).unwrap();
        let dm = NumericDM::from_density(&make_squeezed(c, params).unwrap(), g).unwrap();
        let out = propagate_numeric(&dm, 1.0, &params).unwrap();
        let closed = evolve_squeezed(c, 1.0, &params).unwrap();
        assert!(out.distance_to(&closed) < 1e-4, "{}", out.distance_to(&closed));
        assert!((out.trace() - 1.0).norm() < 1e-5);
        assert!(out.hermiticity_defect() < 1e-10);
    }

    #[test]
    fn coarse_and_narrow_grids_are_refused() {
        let params = p(0.0);
        let state = make_coherent(0.0, 0.0, params).unwrap();
        let narrow = NumericDM::from_density(&state, GridSpec::new(0.0, 3.0, 64).unwrap()).unwrap();
        assert!(matches!(propagate_numeric(&narrow, 1.0, &params), Err(Error::UnderResolved(_))));
        let coarse = NumericDM::from_density(&state, GridSpec::new(0.0, 8.0, 64).unwrap()).unwrap();
        assert!(matches!(propagate_numeric(&coarse, 0.5, &params), Err(Error::UnderResolved(_))));
        let fine = NumericDM::from_density(&state, ground_grid(96, &params).unwrap()).unwrap();
        assert!(matches!(propagate_numeric(&fine, 0.01, &params), Err(Error::SingularTime(_))));
        assert_eq!(propagate_numeric(&fine, 0.0, &params).unwrap(), fine);
    }

    #[test]
    fn pure_gaussian_has_zero_grid_entropy() {
        let params = p(0.0);
        let dm = NumericDM::from_density(&make_coherent(0.0, 0.0, params).unwrap(), ground_grid(128, &params).unwrap())
            .unwrap();
        let rep = grid_entropy(&dm).unwrap();
        assert!(rep.entropy < 1e-5);
        assert!((rep.eigenvalues[0] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn fock_superposition_moments() {
        let params = p(0.0);
        let dm = fock_superposition_dm(ground_grid(128, &params).unwrap(), &params).unwrap();
        assert!((dm.trace() - 1.0).norm() < 1e-8);
        // ⟨Q⟩ = √(ħ/2MΩ) for (|0⟩+|1⟩)/√2
        assert!((dm.mean_position() - 0.5f64.sqrt()).abs() < 1e-8);
        assert!(grid_entropy(&dm).unwrap().entropy < 1e-5);
    }

    #[test]
    fn unphysical_spectrum_is_an_error() {
        let params = p(0.0);
        let g = ground_grid(64, &params).unwrap();
        let (phi0, phi1) = low_eigenfunctions(&g, &params);
        let n = g.points;
        // 1.2|0⟩⟨0| - 0.2|1⟩⟨1|
        let rho = DMatrix::from_fn(n, n, |i, j| C64::from(1.2 * phi0[i] * phi0[j] - 0.2 * phi1[i] * phi1[j]));
        let dm = NumericDM::new(g, rho).unwrap();
        assert!(matches!(grid_entropy(&dm), Err(Error::NegativeSpectrum { .. })));
    }

    #[test]
    fn lorentz_pair_limits() {
        let l = LorentzOracle::new(0.1, 1.0, 0.1).unwrap();
        assert!((l.re_k(0.0) - 1.1).abs() < 1e-15);
        assert!((l.re_k(1e6) - 1.0).abs() < 1e-12);
        let ws: Vec<f64> = (1..2000).map(|i| i as f64 * 1e-3).collect();
        let (im, _) = l.tables(&ws);
        let peak = ws[im.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0];
        assert!((peak - 1.0).abs() < 0.01);
    }

    #[test]
    fn auto_grid_resolves_broad_states() {
        let params = p(0.1);
        let dm = make_squeezed(SqueezeParam::from_parts(0.2, 1.0).unwrap(), params).unwrap();
        let g = oracle_grid(&dm, 7.0, &params).unwrap();
        assert!(g.half_width >= 8.0 / 0.2f64.sqrt() - 1e-12);
        assert!(g.spacing() <= 0.5 / (params.k() * dm.b()).sqrt());
    }
}
