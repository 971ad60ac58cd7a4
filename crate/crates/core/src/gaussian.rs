//! Gaussian density matrices in canonical parameters.
//!
//! A state is stored as the zero-centred form
//!
//! ```text
//! ρ₀(Q, Q') = √(ka/π) exp(-(k/4) [a (Q+Q')² + b (Q-Q')² - 2ic (Q² - Q'²)]),   k = MΩ/ħ
//! ```
//!
//! displaced in phase space to `center`:
//! `ρ(Q, Q') = exp(ip(Q-Q')/ħ) ρ₀(Q-x, Q'-x)`. The coefficients `a`, `b`, `c`
//! are dimensionless. Physical states have `b ≥ a > 0`, with equality iff
//! the state is pure.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::kernel::{sample_density, GaussianKernel, PositionDensity};
use crate::params::{PhaseSpacePoint, SimParams, SqueezeParam};

/// Relative slack allowed on `b ≥ a` before a state is rejected.
const PHYSICALITY_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianDM {
    a: f64,
    b: f64,
    c: f64,
    /// `b - a`, carried separately so that nearly pure states keep full
    /// relative precision in their mixedness.
    excess: f64,
    center: PhaseSpacePoint,
    params: SimParams,
}

impl GaussianDM {
    pub fn new(a: f64, b: f64, c: f64, center: PhaseSpacePoint, params: SimParams) -> Result<Self> {
        Self::with_excess(a, b, c, b - a, center, params)
    }

    /// Constructor taking an independently computed `b - a`.
    pub(crate) fn with_excess(
        a: f64,
        b: f64,
        c: f64,
        excess: f64,
        center: PhaseSpacePoint,
        params: SimParams,
    ) -> Result<Self> {
        params.validate()?;
        if ![a, b, c, excess, center.x, center.p].iter().all(|v| v.is_finite()) {
            return Err(Error::NonPhysical("non-finite Gaussian parameter".into()));
        }
        if a <= 0.0 {
            return Err(Error::NonPhysical(format!("a = {a} must be > 0")));
        }
        let excess = if excess < 0.0 {
            if -excess > PHYSICALITY_SLACK * a {
                return Err(Error::NonPhysical(format!(
                    "b = {b} < a = {a} violates the uncertainty bound"
                )));
            }
            0.0
        } else {
            excess
        };
        Ok(Self {
            a,
            b: a + excess,
            c,
            excess,
            center,
            params,
        })
    }

    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }
    #[inline]
    pub fn b(&self) -> f64 {
        self.b
    }
    #[inline]
    pub fn c(&self) -> f64 {
        self.c
    }
    #[inline]
    pub fn center(&self) -> PhaseSpacePoint {
        self.center
    }
    #[inline]
    pub fn params(&self) -> &SimParams {
        &self.params
    }
    /// `b - a ≥ 0`.
    #[inline]
    pub fn excess(&self) -> f64 {
        self.excess
    }

    /// `Tr ρ² = √(a/b)`.
    pub fn purity(&self) -> f64 {
        (self.a / self.b).sqrt()
    }

    pub fn linear_entropy(&self) -> f64 {
        // 1 - √(a/b) = (b - a) / (√b (√a + √b))
        let (sa, sb) = (self.a.sqrt(), self.b.sqrt());
        self.excess / (sb * (sa + sb))
    }

    /// Mean occupation of the thermal ladder the state is unitarily
    /// equivalent to, `(√(b/a) - 1) / 2`.
    pub fn mean_occupation(&self) -> f64 {
        // √(b/a) - 1 = (b - a) / (√(ab) + a)
        self.excess / (2.0 * ((self.a * self.b).sqrt() + self.a))
    }

    pub fn von_neumann_entropy(&self) -> f64 {
        thermal_entropy(self.mean_occupation())
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        self.excess <= tol * self.a
    }

    /// Phase-space translation `ρ → V ρ V†`; shape is untouched.
    pub fn translate(&self, d: PhaseSpacePoint) -> Self {
        Self {
            center: self.center + d,
            ..*self
        }
    }

    pub fn with_center(&self, center: PhaseSpacePoint) -> Self {
        Self { center, ..*self }
    }

    /// Same state expressed as a [`GaussianKernel`].
    pub fn to_kernel(&self) -> GaussianKernel {
        let k = self.params.k();
        let hbar = self.params.hbar;
        let (x, p) = (self.center.x, self.center.p);
        let m11 = C64::new(0.25 * k * (self.a + self.b), -0.5 * k * self.c);
        let m22 = m11.conj();
        let m12 = C64::from(-0.25 * k * self.excess);
        let ip = C64::new(0.0, p / hbar);
        GaussianKernel {
            m11,
            m12,
            m22,
            l1: 2.0 * x * (m11 + m12) + ip,
            l2: 2.0 * x * (m22 + m12) - ip,
            log_norm: C64::from(0.5 * (k * self.a / PI).ln() - k * self.a * x * x),
        }
    }

    /// Recover canonical parameters from a Hermitian, unit-trace kernel.
    pub fn from_kernel(kernel: &GaussianKernel, params: SimParams) -> Result<Self> {
        let scale = kernel.m11.norm() + kernel.m12.norm() + kernel.l1.norm() + 1.0;
        let defect = kernel.hermiticity_defect();
        if defect > 1e-9 * scale {
            return Err(Error::NonPhysical(format!("kernel is not Hermitian (defect {defect:e})")));
        }
        let tr = kernel.trace();
        if (tr - 1.0).norm() > 1e-8 {
            return Err(Error::NonPhysical(format!("kernel trace {tr} is not 1")));
        }
        let k = params.k();
        let m11 = 0.5 * (kernel.m11 + kernel.m22.conj());
        let m12 = kernel.m12.re;
        let a = 2.0 * (m11.re + m12) / k;
        let excess = -4.0 * m12 / k;
        let c = -2.0 * m11.im / k;
        let l1 = 0.5 * (kernel.l1 + kernel.l2.conj());
        let x = l1.re / (k * a);
        let p = params.hbar * (l1.im + k * c * x);
        Self::with_excess(a, a + excess, c, excess, PhaseSpacePoint::new(x, p), params)
    }

    /// `ρ(Q, Q')` sampled on `grid × grid`.
    pub fn sample(&self, grid: &GridSpec) -> DMatrix<C64> {
        sample_density(&self.to_kernel(), grid)
    }

    /// Default position grid: `±8` widths of the broadest direction around
    /// the centre, 256 points or more if the coherence length needs it.
    pub fn auto_grid(&self) -> GridSpec {
        let k = self.params.k();
        let half = 8.0 / (k * self.a).sqrt();
        let coherence = (1.0 / (k * self.b)).sqrt();
        let needed = (2.0 * half / (0.5 * coherence)).ceil() as usize + 1;
        GridSpec {
            center: self.center.x,
            half_width: half,
            points: needed.max(256),
        }
    }

    /// Wigner function at a phase-space point.
    pub fn wigner_at(&self, x: f64, p: f64) -> f64 {
        let k = self.params.k();
        let hbar = self.params.hbar;
        let (x, p) = (x - self.center.x, p - self.center.p);
        let norm = (k * self.a / PI).sqrt() / (2.0 * PI * hbar) * (4.0 * PI / (k * self.b)).sqrt();
        let u = p / hbar - k * self.c * x;
        norm * (-k * self.a * x * x - u * u / (k * self.b)).exp()
    }
}

impl PositionDensity for GaussianDM {
    fn value(&self, q: f64, qp: f64) -> C64 {
        self.to_kernel().eval(q, qp)
    }
}

/// Entropy of a thermal ladder with mean occupation `n̄`,
/// `(n̄+1) ln(n̄+1) - n̄ ln n̄`, with `0 ln 0 = 0`.
pub fn thermal_entropy(nbar: f64) -> f64 {
    if nbar <= 0.0 {
        return 0.0;
    }
    (nbar + 1.0) * nbar.ln_1p() - nbar * nbar.ln()
}

/// Coherent state centred at `(x, p)`.
pub fn make_coherent(x: f64, p: f64, params: SimParams) -> Result<GaussianDM> {
    GaussianDM::new(1.0, 1.0, 0.0, PhaseSpacePoint::new(x, p), params)
}

/// Pure squeezed state `exp(-(MΩ/2ħ) C Q²)` at the origin.
pub fn make_squeezed(c: SqueezeParam, params: SimParams) -> Result<GaussianDM> {
    let c = c.value();
    GaussianDM::with_excess(c.re, c.re, -c.im, 0.0, PhaseSpacePoint::ORIGIN, params)
}

/// Entropy of a product of independent modes.
pub fn multimode_entropy(states: &[GaussianDM]) -> f64 {
    states.iter().map(GaussianDM::von_neumann_entropy).sum()
}

/// Wigner function sampled on a phase-space grid; rows follow `x`, columns `p`.
#[derive(Debug, Clone)]
pub struct WignerField {
    pub x: GridSpec,
    pub p: GridSpec,
    pub values: DMatrix<f64>,
}

impl WignerField {
    /// `∫∫ W dx dp` by the trapezoid rule.
    pub fn integral(&self) -> f64 {
        let (wx, wp) = (self.x.weights(), self.p.weights());
        let mut s = 0.0;
        for j in 0..self.p.points {
            for i in 0..self.x.points {
                s += wx[i] * wp[j] * self.values[(i, j)];
            }
        }
        s
    }

    /// Second central moments `(⟨δx²⟩, ⟨δp²⟩)` by quadrature.
    pub fn variances(&self) -> (f64, f64) {
        let (xs, ps) = (self.x.nodes(), self.p.nodes());
        let (wx, wp) = (self.x.weights(), self.p.weights());
        let mut m = [0.0; 5];
        for j in 0..ps.len() {
            for i in 0..xs.len() {
                let w = wx[i] * wp[j] * self.values[(i, j)];
                m[0] += w;
                m[1] += w * xs[i];
                m[2] += w * ps[j];
                m[3] += w * xs[i] * xs[i];
                m[4] += w * ps[j] * ps[j];
            }
        }
        let (mx, mp) = (m[1] / m[0], m[2] / m[0]);
        (m[3] / m[0] - mx * mx, m[4] / m[0] - mp * mp)
    }
}

pub fn wigner(dm: &GaussianDM, x: GridSpec, p: GridSpec) -> Result<WignerField> {
    x.validate()?;
    p.validate()?;
    let (xs, ps) = (x.nodes(), p.nodes());
    let values = DMatrix::from_fn(xs.len(), ps.len(), |i, j| dm.wigner_at(xs[i], ps[j]));
    Ok(WignerField { x, p, values })
}

/// Grid pair covering `±8` standard deviations of the Wigner function.
pub fn auto_wigner_grids(dm: &GaussianDM, points: usize) -> Result<(GridSpec, GridSpec)> {
    let k = dm.params.k();
    let hbar = dm.params.hbar;
    let sx = (1.0 / (2.0 * k * dm.a)).sqrt();
    // marginal momentum variance ħ² k (b + c²/a) / 2
    let sp = hbar * (0.5 * k * (dm.b + dm.c * dm.c / dm.a)).sqrt();
    Ok((
        GridSpec::new(dm.center.x, 8.0 * sx, points)?,
        GridSpec::new(dm.center.p, 8.0 * sp, points)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit() -> SimParams {
        SimParams::natural(1.0, 0.0).unwrap()
    }

    /// Grid quadrature of `Tr ρ²` and of the trace.
    fn grid_purity(dm: &GaussianDM, grid: &GridSpec) -> (f64, f64) {
        let rho = dm.sample(grid);
        let h = grid.spacing();
        let tr: f64 = (0..grid.points).map(|i| rho[(i, i)].re).sum::<f64>() * h;
        let p2: f64 = rho.iter().map(|z| z.norm_sqr()).sum::<f64>() * h * h;
        (tr, p2)
    }

    #[test]
    fn vacuum() {
        let dm = make_coherent(0.0, 0.0, unit()).unwrap();
        assert_eq!((dm.a(), dm.b(), dm.c()), (1.0, 1.0, 0.0));
        assert_eq!(dm.center(), PhaseSpacePoint::ORIGIN);
        assert_eq!(dm.von_neumann_entropy(), 0.0);
        assert_eq!(dm.purity(), 1.0);
    }

    #[test]
    fn displaced_coherent_only_moves_center() {
        let dm = make_coherent(1.0, 0.0, unit()).unwrap();
        assert_eq!((dm.a(), dm.b(), dm.c()), (1.0, 1.0, 0.0));
        assert_eq!(dm.center(), PhaseSpacePoint::new(1.0, 0.0));
        assert_eq!(make_coherent(3.0, -2.0, unit()).unwrap().von_neumann_entropy(), 0.0);
    }

    #[test]
    fn squeezed_mapping() {
        let one = make_squeezed(SqueezeParam::coherent(), unit()).unwrap();
        assert_eq!(one, make_coherent(0.0, 0.0, unit()).unwrap());
        let two = make_squeezed(SqueezeParam::from_parts(2.0, 0.0).unwrap(), unit()).unwrap();
        assert_eq!((two.a(), two.b()), (2.0, 2.0));
        assert_eq!(two.purity(), 1.0);
        let cplx = make_squeezed(SqueezeParam::from_parts(1.0, 1.0).unwrap(), unit()).unwrap();
        assert_eq!(cplx.c(), -1.0);
        assert_eq!(cplx.b() / cplx.a(), 1.0);
        assert_eq!(cplx.von_neumann_entropy(), 0.0);
        let g = GridSpec::new(0.0, 8.0, 400).unwrap();
        let (tr, p2) = grid_purity(&cplx, &g);
        assert!((tr - 1.0).abs() < 1e-10 && (p2 - 1.0).abs() < 1e-4);
    }

    #[test]
    fn purity_of_mixed_states_by_quadrature() {
        // a = Re σ / Λ, b = Re σ Λ
        for (re_sigma, lam) in [(1.0, 2.0), (0.77, 1.3), (1.2, 1.05)] {
            let dm = GaussianDM::new(re_sigma / lam, re_sigma * lam, 0.3, PhaseSpacePoint::ORIGIN, unit())
                .unwrap();
            assert_relative_eq!(dm.purity(), 1.0 / lam, max_relative = 1e-14);
            let half = 8.0 / dm.a().sqrt();
            let g = GridSpec::new(0.0, half, 400).unwrap();
            let (tr, p2) = grid_purity(&dm, &g);
            assert!((tr - 1.0).abs() < 1e-6, "trace {tr}");
            assert!((p2 - 1.0 / lam).abs() < 1e-4, "purity {p2} vs {}", 1.0 / lam);
        }
        let half = GaussianDM::new(0.5, 2.0, 0.0, PhaseSpacePoint::ORIGIN, unit()).unwrap();
        assert_relative_eq!(half.purity(), 0.5);
        assert_relative_eq!(half.linear_entropy(), 0.5);
    }

    #[test]
    fn entropy_closed_form() {
        let dm = GaussianDM::new(1.0, 9.0, 0.0, PhaseSpacePoint::ORIGIN, unit()).unwrap();
        assert_relative_eq!(dm.mean_occupation(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(dm.von_neumann_entropy(), 2.0 * 2f64.ln(), max_relative = 1e-14);
        let s = thermal_entropy(0.0125);
        assert!((s - 0.06735).abs() < 5e-6, "{s}");
        // linear entropy of the Λ = 1 + 0.1π state
        let lam = 1.0 + 0.1 * PI;
        let dm = GaussianDM::new(1.0 / lam, lam, 0.0, PhaseSpacePoint::ORIGIN, unit()).unwrap();
        assert!((dm.linear_entropy() - 0.2391).abs() < 1e-4);
        assert_relative_eq!(dm.linear_entropy(), 1.0 - 1.0 / lam, max_relative = 1e-13);
    }

    #[test]
    fn translation_group_and_invariance() {
        let dm = GaussianDM::new(0.8, 1.7, -0.4, PhaseSpacePoint::new(0.2, 0.1), unit()).unwrap();
        assert_eq!(dm.translate(PhaseSpacePoint::ORIGIN), dm);
        let (d1, d2) = (PhaseSpacePoint::new(1.0, -2.0), PhaseSpacePoint::new(-0.3, 0.5));
        let lhs = dm.translate(d1).translate(d2);
        let rhs = dm.translate(d1 + d2);
        assert!((lhs.center().x - rhs.center().x).abs() < 1e-15);
        assert!((lhs.center().p - rhs.center().p).abs() < 1e-15);
        assert_eq!(dm.translate(d1).von_neumann_entropy(), dm.von_neumann_entropy());
    }

    #[test]
    fn kernel_round_trip_and_moments() {
        let params = SimParams::new(1.7, 0.6, 0.9, 0.0).unwrap();
        let dm = GaussianDM::new(0.8, 1.7, -0.4, PhaseSpacePoint::new(0.3, -0.8), params).unwrap();
        let back = GaussianDM::from_kernel(&dm.to_kernel(), params).unwrap();
        for (u, v) in [
            (dm.a(), back.a()),
            (dm.b(), back.b()),
            (dm.c(), back.c()),
            (dm.center().x, back.center().x),
            (dm.center().p, back.center().p),
        ] {
            assert!((u - v).abs() < 1e-13, "{u} vs {v}");
        }
        // first moments of the sampled state reproduce the centre
        let g = dm.auto_grid();
        let rho = dm.sample(&g);
        let h = g.spacing();
        let xs = g.nodes();
        let mean_x: f64 = (0..g.points).map(|i| xs[i] * rho[(i, i)].re).sum::<f64>() * h;
        assert!((mean_x - 0.3).abs() < 1e-8);
        // ⟨P⟩ = -iħ ∂_Q ρ(Q,Q')|_{Q'=Q} integrated
        let kern = dm.to_kernel();
        let mut mean_p = 0.0;
        for &q in &xs {
            let dq = 1e-5;
            let der = (kern.eval(q + dq, q) - kern.eval(q - dq, q)) / (2.0 * dq);
            mean_p += (C64::new(0.0, -params.hbar) * der).re * h;
        }
        assert!((mean_p + 0.8).abs() < 1e-6, "{mean_p}");
    }

    #[test]
    fn sampled_matrix_is_hermitian() {
        let dm = GaussianDM::new(0.6, 2.2, 0.7, PhaseSpacePoint::new(-0.4, 1.1), unit()).unwrap();
        let g = GridSpec::new(-0.4, 6.0, 96).unwrap();
        let rho = dm.sample(&g);
        for i in 0..g.points {
            assert!(rho[(i, i)].im.abs() < 1e-15 && rho[(i, i)].re >= 0.0);
            for j in 0..g.points {
                let scale = rho[(i, j)].norm().max(1e-300);
                assert!((rho[(i, j)] - rho[(j, i)].conj()).norm() <= 1e-13 * scale);
            }
        }
    }

    #[test]
    fn wigner_normalization_and_squeezing() {
        let dm = make_coherent(0.0, 0.0, unit()).unwrap();
        let (gx, gp) = auto_wigner_grids(&dm, 201).unwrap();
        let w = wigner(&dm, gx, gp).unwrap();
        assert!((w.integral() - 1.0).abs() < 1e-6);
        let (mi, mj) = w.values.iter().enumerate().fold((0, f64::MIN), |acc, (i, &v)| {
            if v > acc.1 {
                (i, v)
            } else {
                acc
            }
        });
        assert_eq!(mi, 100 + 100 * 201);
        assert!((mj - 1.0 / PI).abs() < 1e-12);

        let sq = make_squeezed(SqueezeParam::from_parts(4.0, 0.0).unwrap(), unit()).unwrap();
        let (gx, gp) = auto_wigner_grids(&sq, 201).unwrap();
        let w = wigner(&sq, gx, gp).unwrap();
        let (vx, vp) = w.variances();
        assert!((vp / vx - 16.0).abs() < 1e-6, "{}", vp / vx);
    }

    #[test]
    fn multimode_additivity() {
        assert_eq!(multimode_entropy(&[]), 0.0);
        let pure = make_coherent(0.0, 0.0, unit()).unwrap();
        assert_eq!(multimode_entropy(&[pure, pure]), 0.0);
        let mixed = GaussianDM::new(1.0, 9.0, 0.0, PhaseSpacePoint::ORIGIN, unit()).unwrap();
        assert_relative_eq!(multimode_entropy(&[mixed, mixed]), 4.0 * 2f64.ln(), max_relative = 1e-14);
    }

    #[test]
    fn unphysical_rejected() {
        assert!(GaussianDM::new(1.0, 0.5, 0.0, PhaseSpacePoint::ORIGIN, unit()).is_err());
        assert!(GaussianDM::new(0.0, 1.0, 0.0, PhaseSpacePoint::ORIGIN, unit()).is_err());
    }
}
