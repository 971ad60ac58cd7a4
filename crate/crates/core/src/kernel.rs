//! General complex Gaussian two-point kernels
//! `K(Q, Q') = exp(-(m11 Q² + 2 m12 Q Q' + m22 Q'²) + l1 Q + l2 Q' + log_norm)`.
//!
//! One kernel represents a single term `ψᵢ(Q) ψⱼ*(Q')` of a superposition;
//! the family is closed under the single-mode propagator.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianKernel {
    pub m11: C64,
    pub m12: C64,
    pub m22: C64,
    pub l1: C64,
    pub l2: C64,
    pub log_norm: C64,
}

/// Anything that can be evaluated as a position-space density matrix
/// `ρ(Q, Q')`.
pub trait PositionDensity: Sync {
    fn value(&self, q: f64, qp: f64) -> C64;
}

impl GaussianKernel {
    /// Checked constructor; the real part of the quadratic form must be
    /// positive definite.
    pub fn new(m11: C64, m12: C64, m22: C64, l1: C64, l2: C64, log_norm: C64) -> Result<Self> {
        let k = Self {
            m11,
            m12,
            m22,
            l1,
            l2,
            log_norm,
        };
        k.check_integrable()?;
        Ok(k)
    }

    pub fn check_integrable(&self) -> Result<()> {
        let vals = [self.m11, self.m12, self.m22, self.l1, self.l2, self.log_norm];
        if vals.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonIntegrable("non-finite coefficient".into()));
        }
        let (a, b, d) = (self.m11.re, self.m12.re, self.m22.re);
        if !(a > 0.0 && a * d - b * b > 0.0) {
            return Err(Error::NonIntegrable(format!(
                "real part of quadratic form not positive definite: [[{a}, {b}], [{b}, {d}]]"
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn exponent(&self, q: f64, qp: f64) -> C64 {
        -(self.m11 * q * q + 2.0 * self.m12 * q * qp + self.m22 * qp * qp)
            + self.l1 * q
            + self.l2 * qp
            + self.log_norm
    }

    #[inline]
    pub fn eval(&self, q: f64, qp: f64) -> C64 {
        self.exponent(q, qp).exp()
    }

    /// Kernel of the adjoint operator, `K†(Q, Q') = conj(K(Q', Q))`.
    pub fn dagger(&self) -> Self {
        Self {
            m11: self.m22.conj(),
            m12: self.m12.conj(),
            m22: self.m11.conj(),
            l1: self.l2.conj(),
            l2: self.l1.conj(),
            log_norm: self.log_norm.conj(),
        }
    }

    /// Multiply the kernel by `exp(log_factor)`.
    pub fn scaled(mut self, log_factor: C64) -> Self {
        self.log_norm += log_factor;
        self
    }

    /// `∫ K(Q, Q) dQ`.
    pub fn trace(&self) -> C64 {
        let s = self.m11 + 2.0 * self.m12 + self.m22;
        let l = self.l1 + self.l2;
        (0.5 * (C64::from(PI) / s).ln() + l * l / (4.0 * s) + self.log_norm).exp()
    }

    /// Maximum of `|K(Q, Q')|` over the real plane.
    pub fn peak_magnitude(&self) -> f64 {
        let (a, b, d) = (self.m11.re, self.m12.re, self.m22.re);
        let (u, v) = (self.l1.re, self.l2.re);
        let det = a * d - b * b;
        // max of -xᵀAx + lᵀx is lᵀA⁻¹l / 4
        let quad = (d * u * u - 2.0 * b * u * v + a * v * v) / det;
        (self.log_norm.re + 0.25 * quad).exp()
    }

    /// Hermitian kernels satisfy `K = K†`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.distance(&self.dagger())
    }

    /// Largest coefficient difference, with the imaginary part of the
    /// log-normalization compared modulo 2π.
    pub fn distance(&self, other: &Self) -> f64 {
        let mut dn = self.log_norm - other.log_norm;
        dn.im = wrap_phase(dn.im);
        [
            (self.m11 - other.m11).norm(),
            (self.m12 - other.m12).norm(),
            (self.m22 - other.m22).norm(),
            (self.l1 - other.l1).norm(),
            (self.l2 - other.l2).norm(),
            dn.norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn sample(&self, grid: &GridSpec) -> DMatrix<C64> {
        sample_density(self, grid)
    }
}

impl PositionDensity for GaussianKernel {
    fn value(&self, q: f64, qp: f64) -> C64 {
        self.eval(q, qp)
    }
}

/// Wrap an angle into `(-π, π]`.
pub(crate) fn wrap_phase(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Sample `ρ(Qᵢ, Qⱼ)` on `grid × grid`.
pub fn sample_density<T: PositionDensity + ?Sized>(state: &T, grid: &GridSpec) -> DMatrix<C64> {
    let nodes = grid.nodes();
    let n = nodes.len();
    // column-major storage: column j holds ρ(·, Qⱼ)
    let data: Vec<C64> = (0..n)
        .into_par_iter()
        .flat_map_iter(|j| {
            let qp = nodes[j];
            let nodes = &nodes;
            (0..n).map(move |i| state.value(nodes[i], qp))
        })
        .collect();
    DMatrix::from_vec(n, n, data)
}
