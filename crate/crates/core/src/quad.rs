//! One-dimensional adaptive quadrature and interpolation.

use crate::error::{Error, Result};

// 15-point Kronrod nodes (non-negative half) and weights, with the
// embedded 7-point Gauss weights on the odd nodes.
const XK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XK[i];
        let s = f(c - dx) + f(c + dx);
        k += WK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Absolute/relative accuracy targets for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadTol {
    pub abs: f64,
    pub rel: f64,
    /// Subdivision budget; when exhausted the current estimate is returned
    /// with its (too large) error.
    pub max_intervals: usize,
}

impl Default for QuadTol {
    fn default() -> Self {
        Self {
            abs: 1e-12,
            rel: 1e-10,
            max_intervals: 500,
        }
    }
}

/// Integrate `f` over `[a, b]`, repeatedly bisecting the interval with the
/// largest error estimate; returns the value and the error estimate.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: QuadTol) -> (f64, f64) {
    if a == b {
        return (0.0, 0.0);
    }
    let (v, e) = gk15(&f, a, b);
    // (a, b, value, error)
    let mut parts = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    while parts.len() < tol.max_intervals.max(1) {
        if err <= tol.abs.max(tol.rel * total.abs()) {
            break;
        }
        let worst = (0..parts.len())
            .max_by(|&i, &j| parts[i].3.total_cmp(&parts[j].3))
            .unwrap_or(0);
        let (lo, hi, pv, pe) = parts[worst];
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        let (lv, le) = gk15(&f, lo, mid);
        let (rv, re) = gk15(&f, mid, hi);
        parts[worst] = (lo, mid, lv, le);
        parts.push((mid, hi, rv, re));
        total += lv + rv - pv;
        err += le + re - pe;
    }
    // re-sum in interval order for a reproducible result
    parts.sort_by(|x, y| x.0.total_cmp(&y.0));
    (parts.iter().map(|p| p.2).sum(), parts.iter().map(|p| p.3).sum())
}

/// Integrate over consecutive intervals of the sorted `breaks`, splitting
/// the tolerance in proportion to interval length.
pub fn integrate_breaks<F: Fn(f64) -> f64>(f: F, breaks: &[f64], tol: QuadTol) -> (f64, f64) {
    if breaks.len() < 2 {
        return (0.0, 0.0);
    }
    let span = breaks[breaks.len() - 1] - breaks[0];
    let mut total = 0.0;
    let mut err = 0.0;
    for w in breaks.windows(2) {
        let frac = if span > 0.0 { (w[1] - w[0]) / span } else { 1.0 };
        let (v, e) = integrate(
            &f,
            w[0],
            w[1],
            QuadTol {
                abs: tol.abs * frac,
                ..tol
            },
        );
        total += v;
        err += e;
    }
    (total, err)
}

/// Natural cubic spline through `(x, y)` with strictly increasing `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 3 || y.len() != n {
            return Err(Error::Spectrum(format!(
                "spline needs at least 3 matching points, got {} x and {} y",
                n,
                y.len()
            )));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) || x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::Spectrum("spline abscissae must be finite and strictly increasing".into()));
        }
        // tridiagonal solve for interior second derivatives
        let mut m = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            let rhs = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
            let diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
            c[i] = h1 / diag;
            d[i] = (rhs - h0 * d[i - 1]) / diag;
        }
        for i in (1..n - 1).rev() {
            m[i] = d[i] - c[i] * m[i + 1];
        }
        Ok(Self { x, y, m })
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    pub fn lo(&self) -> f64 {
        self.x[0]
    }

    pub fn hi(&self) -> f64 {
        self.x[self.x.len() - 1]
    }

    /// Evaluate; outside the knots the end cubic is extended.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        let i = match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }
}
