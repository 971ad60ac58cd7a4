//! Derivative-free simplex minimization (Nelder-Mead).

/// Outcome of a simplex run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    /// Initial edge length along every coordinate.
    pub step: f64,
    /// Stop once the simplex diameter falls below `tol` and the spread of
    /// objective values below `tol²`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            step: 0.1,
            tol: 1e-8,
            max_iter: 5000,
        }
    }
}

fn diameter(pts: &[Vec<f64>]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let dist = pts[i]
                .iter()
                .zip(&pts[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            d = d.max(dist);
        }
    }
    d
}

fn combine(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    // a + t (b - a)
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

/// Minimize `f` from `x0`. Non-finite objective values are treated as
/// `+∞`, so infeasible regions repel the simplex.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], opts: SimplexOptions) -> SimplexResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut eval = |x: &[f64]| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let mut pts: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += opts.step;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p)).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        // sort ascending; ties keep insertion order for determinism
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        if diameter(&pts) < opts.tol && vals[n] - vals[0] < opts.tol * opts.tol {
            converged = true;
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..n)
            .map(|k| pts[..n].iter().map(|p| p[k]).sum::<f64>() / n as f64)
            .collect();
        let worst = pts[n].clone();
        let refl = combine(&centroid, &worst, -1.0);
        let fr = eval(&refl);
        if fr < vals[0] {
            let exp = combine(&centroid, &worst, -2.0);
            let fe = eval(&exp);
            if fe < fr {
                pts[n] = exp;
                vals[n] = fe;
            } else {
                pts[n] = refl;
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            pts[n] = refl;
            vals[n] = fr;
            continue;
        }
        let (cand, fc) = if fr < vals[n] {
            let c = combine(&centroid, &worst, -0.5);
            let v = eval(&c);
            (c, v)
        } else {
            let c = combine(&centroid, &worst, 0.5);
            let v = eval(&c);
            (c, v)
        };
        if fc < vals[n].min(fr) {
            pts[n] = cand;
            vals[n] = fc;
            continue;
        }
        // shrink toward the best vertex
        for i in 1..=n {
            pts[i] = combine(&pts[0], &pts[i], 0.5);
            vals[i] = eval(&pts[i]);
        }
    }
    let best = (0..=n).min_by(|&i, &j| vals[i].total_cmp(&vals[j])).unwrap_or(0);
    SimplexResult {
        x: pts[best].clone(),
        f: vals[best],
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_minimum() {
        let r = nelder_mead(
            |x| (x[0] - 1.5).powi(2) + 3.0 * (x[1] + 0.25).powi(2) + 0.5 * x[0] * x[1],
            &[0.0, 0.0],
            SimplexOptions::default(),
        );
        assert!(r.converged);
        // stationary point of the quadratic
        let (x, y) = (r.x[0], r.x[1]);
        assert!((2.0 * (x - 1.5) + 0.5 * y).abs() < 1e-6);
        assert!((6.0 * (y + 0.25) + 0.5 * x).abs() < 1e-6);
    }

    #[test]
    fn rosenbrock() {
        let r = nelder_mead(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
            SimplexOptions {
                step: 0.5,
                tol: 1e-9,
                max_iter: 10_000,
            },
        );
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn reports_iteration_cap() {
        let r = nelder_mead(
            |x| x[0].powi(2) + x[1].powi(2),
            &[5.0, 5.0],
            SimplexOptions {
                step: 0.1,
                tol: 1e-12,
                max_iter: 3,
            },
        );
        assert!(!r.converged);
        assert_eq!(r.iterations, 3);
    }

    #[test]
    fn infeasible_values_repel() {
        let r = nelder_mead(
            |x| if x[0] < 0.0 { f64::NAN } else { (x[0] - 0.01).powi(2) + x[1].powi(2) },
            &[0.5, 0.3],
            SimplexOptions::default(),
        );
        assert!(r.converged && (r.x[0] - 0.01).abs() < 1e-6);
    }
}
