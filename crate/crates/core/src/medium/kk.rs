//! Dispersion relations between the real and imaginary parts of the
//! dielectric function, evaluated on tabulated data.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::quad::{integrate_breaks, CubicSpline, QuadTol};

/// Evaluation is refused beyond this fraction of the tabulated range:
/// the truncated tail of the integral is no longer negligible there.
pub const SUPPORT_FRACTION: f64 = 0.5;

const TOL: QuadTol = QuadTol {
    abs: 1e-13,
    rel: 1e-11,
    max_intervals: 200,
};

/// `PV ∫₀^W f(ω')/(ω'² - ω²) dω'` for a spline-interpolated `f` on
/// `[0, W]`, with the pole subtracted analytically.
fn pv_integral(f: &dyn Fn(f64) -> f64, knots: &[f64], omega: f64) -> f64 {
    let w = knots[knots.len() - 1];
    if omega == 0.0 {
        return integrate_breaks(|x| f(x) / (x * x), knots, TOL).0;
    }
    let fw = f(omega);
    let mut breaks: Vec<f64> = knots.to_vec();
    if let Err(pos) = breaks.binary_search_by(|v| v.total_cmp(&omega)) {
        breaks.insert(pos, omega);
    }
    let regular = integrate_breaks(
        |x| {
            let den = x * x - omega * omega;
            if den == 0.0 {
                0.0
            } else {
                (f(x) - fw) / den
            }
        },
        &breaks,
        TOL,
    )
    .0;
    regular + fw / (2.0 * omega) * ((w - omega) / (w + omega)).ln()
}

fn check_support(omega: f64, lo: f64, hi: f64) -> Result<()> {
    if !(omega >= lo && omega <= SUPPORT_FRACTION * hi) {
        return Err(Error::OutsideSupport {
            omega,
            lo,
            hi: SUPPORT_FRACTION * hi,
        });
    }
    Ok(())
}

fn table_spline(omega: &[f64], values: &[f64], what: &str) -> Result<CubicSpline> {
    if omega.first().copied() != Some(0.0) {
        return Err(Error::Spectrum(format!("{what} table must start at ω = 0")));
    }
    CubicSpline::new(omega.to_vec(), values.to_vec())
}

/// `Im K` tabulated on `[0, W]` together with the derived `Re K`.
#[derive(Debug, Clone, PartialEq)]
pub struct DielectricTable {
    im: CubicSpline,
}

impl DielectricTable {
    /// From samples `(ωᵢ, Im Kᵢ)`; `ω` must start at 0 and increase.
    /// A passive medium has `Im K >= 0`.
    pub fn from_samples(omega: &[f64], im_k: &[f64]) -> Result<Self> {
        if let Some(v) = im_k.iter().find(|v| **v < 0.0) {
            return Err(Error::NonPhysical(format!("Im K = {v} < 0 (active medium)")));
        }
        Ok(Self {
            im: table_spline(omega, im_k, "Im K")?,
        })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(omega: &[f64], im_k: F) -> Result<Self> {
        let vals: Vec<f64> = omega.iter().map(|&w| im_k(w)).collect();
        Self::from_samples(omega, &vals)
    }

    pub fn omegas(&self) -> &[f64] {
        self.im.knots()
    }

    /// Range on which [`re_k`](Self::re_k) may be evaluated.
    pub fn support(&self) -> (f64, f64) {
        (self.im.lo(), SUPPORT_FRACTION * self.im.hi())
    }

    pub fn im_k(&self, omega: f64) -> Result<f64> {
        check_support(omega, self.im.lo(), self.im.hi())?;
        Ok(self.im.eval(omega).max(0.0))
    }

    /// `Re K(ω) = 1 + (2/π) PV ∫ ω' Im K(ω') / (ω'² - ω²) dω'`.
    pub fn re_k(&self, omega: f64) -> Result<f64> {
        check_support(omega, self.im.lo(), self.im.hi())?;
        let f = |x: f64| x * self.im.eval(x);
        Ok(1.0 + 2.0 / std::f64::consts::PI * pv_integral(&f, self.im.knots(), omega))
    }

    pub fn k(&self, omega: f64) -> Result<C64> {
        Ok(C64::new(self.re_k(omega)?, self.im_k(omega)?))
    }

    pub fn refractive_index(&self, omega: f64) -> Result<C64> {
        Ok(refractive_index(self.k(omega)?))
    }

    /// `Re K` at every tabulated frequency inside the support.
    pub fn re_k_table(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let (_, hi) = self.support();
        let ws: Vec<f64> = self.omegas().iter().copied().filter(|&w| w <= hi).collect();
        let vals = ws.iter().map(|&w| self.re_k(w)).collect::<Result<Vec<_>>>()?;
        Ok((ws, vals))
    }
}

/// Inverse relation `Im K(ω) = -(2ω/π) PV ∫ (Re K(ω') - 1)/(ω'² - ω²) dω'`
/// from a tabulated `Re K` starting at `ω = 0`.
pub fn im_k_from_re_k(omega: &[f64], re_k: &[f64], at: f64) -> Result<f64> {
    let minus_one: Vec<f64> = re_k.iter().map(|v| v - 1.0).collect();
    let s = table_spline(omega, &minus_one, "Re K")?;
    check_support(at, s.lo(), s.hi())?;
    if at == 0.0 {
        return Ok(0.0);
    }
    let f = |x: f64| s.eval(x);
    Ok(-2.0 * at / std::f64::consts::PI * pv_integral(&f, s.knots(), at))
}

/// Principal square root, taken on the branch with `Im n >= 0`.
pub fn refractive_index(k: C64) -> C64 {
    let n = k.sqrt();
    if n.im < 0.0 {
        -n
    } else {
        n
    }
}

/// Frequencies on `[0, hi]`: zero, `points` log-spaced nodes from `lo`,
/// and a dense linear patch of `±12` widths, in tenth-width steps, around
/// each line.
pub fn frequency_grid(lo: f64, hi: f64, points: usize, lines: &[(f64, f64)]) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && points >= 2) {
        return Err(crate::error::invalid(
            "frequency_grid",
            format!("need 0 < lo < hi and >= 2 points, got ({lo}, {hi}, {points})"),
        ));
    }
    let mut w = vec![0.0];
    let ratio = (hi / lo).ln() / (points - 1) as f64;
    w.extend((0..points).map(|i| lo * (ratio * i as f64).exp()));
    for &(c, g) in lines {
        for j in -120..=120 {
            let x = c + g * 0.1 * j as f64;
            if x > 0.0 && x < hi {
                w.push(x);
            }
        }
    }
    w.sort_by(f64::total_cmp);
    // drop near-duplicates that would make the spline ill-conditioned
    let mut out: Vec<f64> = Vec::with_capacity(w.len());
    for x in w {
        if out.last().is_none_or(|&p| x - p > 1e-9 * x.max(1e-12)) {
            out.push(x);
        }
    }
    *out.last_mut().unwrap() = hi;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::LorentzOracle;

    fn lorentz_table() -> (LorentzOracle, DielectricTable) {
        let l = LorentzOracle::new(0.1, 1.0, 0.1).unwrap();
        let grid = frequency_grid(1e-3, 1000.0, 400, &[(1.0, 0.1)]).unwrap();
        let t = DielectricTable::from_fn(&grid, |w| l.im_k(w)).unwrap();
        (l, t)
    }

    #[test]
    fn vacuum() {
        let grid = frequency_grid(1e-2, 100.0, 50, &[]).unwrap();
        let t = DielectricTable::from_fn(&grid, |_| 0.0).unwrap();
        for &w in &[0.0, 0.5, 3.0, 40.0] {
            assert_eq!(t.re_k(w).unwrap(), 1.0);
        }
    }

    #[test]
    fn lorentz_real_part() {
        let (l, t) = lorentz_table();
        assert!((t.re_k(0.0).unwrap() - 1.1).abs() < 1e-3 * 1.1);
        for i in 0..=60 {
            let w = 0.01 * 10f64.powf(i as f64 / 20.0);
            let got = t.re_k(w).unwrap();
            let want = l.re_k(w);
            assert!(((got - want) / want).abs() < 1e-3, "ω = {w}: {got} vs {want}");
        }
    }

    #[test]
    fn outside_support_is_refused() {
        let (_, t) = lorentz_table();
        assert!(matches!(t.re_k(600.0), Err(Error::OutsideSupport { .. })));
        assert!(t.re_k(-1.0).is_err());
    }

    #[test]
    fn roots() {
        assert_eq!(refractive_index(C64::new(1.0, 0.0)), C64::new(1.0, 0.0));
        assert_eq!(refractive_index(C64::new(4.0, 0.0)), C64::new(2.0, 0.0));
        let k = C64::new(1.0, 0.1);
        let n = refractive_index(k);
        assert!(n.im > 0.0 && (n * n - k).norm() < 1e-12);
        let gain = refractive_index(C64::new(1.0, -0.1));
        assert!(gain.im >= 0.0 && (gain * gain - C64::new(1.0, -0.1)).norm() < 1e-12);
    }

    #[test]
    fn rejects_active_tables() {
        assert!(DielectricTable::from_samples(&[0.0, 1.0, 2.0], &[0.0, -0.1, 0.0]).is_err());
        assert!(DielectricTable::from_samples(&[0.1, 1.0, 2.0], &[0.0, 0.1, 0.0]).is_err());
    }
}

#[cfg(test)]
mod properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn passive_tables_have_physical_index(
            strength in 0.01..1.0f64, center in 0.5..5.0f64, width in 0.05..0.5f64, w in 0.0..50.0f64,
        ) {
            let grid = frequency_grid(1e-3, 200.0, 200, &[(center, width)]).unwrap();
            let t = DielectricTable::from_fn(&grid, |x| {
                strength * 2.0 * width * x / ((center * center - x * x).powi(2) + 4.0 * width * width * x * x)
            }).unwrap();
            let n = t.refractive_index(w).unwrap();
            prop_assert!(n.im >= 0.0);
            prop_assert!((n * n - t.k(w).unwrap()).norm() < 1e-10);
            // static limit is above vacuum for any passive medium
            prop_assert!(t.re_k(0.0).unwrap() > 1.0);
        }
    }
}
