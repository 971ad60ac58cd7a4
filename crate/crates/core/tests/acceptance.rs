//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, LN_2, PI};
use std::time::Instant;

use num_complex::Complex64 as C64;
use qbm_core::cat::fit_decay_rate;
use qbm_core::medium::{frequency_grid, im_k_from_re_k};
use qbm_core::oracle::{ground_grid, oracle_grid};
use qbm_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn natural(d: f64) -> SimParams {
    SimParams::natural(1.0, d).unwrap()
}

fn sieve_recovery() -> Result<Outcome> {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut where_ = String::new();
    for &theta in &[FRAC_PI_4, FRAC_PI_2, 1.0, PI, 2.0 * PI, 10.0 * PI] {
        for &d in &[0.01, 0.05, 0.1] {
            let params = natural(d);
            let r = sieve_minimize(theta, &params, 1e-7)?;
            let err = (r.c_star - sigma(theta, &params)?).norm();
            if err > worst {
                worst = err;
                where_ = format!("Ωt={theta:.4}, D={d}");
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(outcome(
        worst < 1e-6 && secs < 10.0,
        format!("max |C* - σ| = {worst:.2e} at {where_} (tol 1e-6); {secs:.2} s (limit 10 s)"),
    ))
}

fn entropy_ladder() -> Result<Outcome> {
    let mut worst_eig: f64 = 0.0;
    let mut worst_s: f64 = 0.0;
    for &lam in &[1.05, 1.5, 2.0, 5.0, 10.0] {
        // at Ωt = π the mixing factor is 1 + πD
        let params = natural((lam - 1.0) / PI);
        let sp = evolve_special(PI, &params)?;
        let grid = sp.dm.auto_grid();
        let rep = grid_entropy(&NumericDM::from_density(&sp.dm, grid)?)?;
        for n in 0..10 {
            worst_eig = worst_eig.max((rep.eigenvalues[n] - sp.eigenvalue(n as u32)).abs());
        }
        worst_s = worst_s.max((rep.entropy - thermal_entropy(0.5 * (sp.lambda - 1.0))).abs());
    }
    Ok(outcome(
        worst_eig < 1e-4 && worst_s < 1e-4,
        format!("max eigenvalue error {worst_eig:.2e}, max entropy error {worst_s:.2e} (tol 1e-4) over Λ ∈ {{1.05, 1.5, 2, 5, 10}}"),
    ))
}

fn four_state_anchor() -> Result<Outcome> {
    let closed = (1..=4)
        .map(|n| (coherent_entropy(n, 2.0 / (n as f64 * PI)) - 2.0 * LN_2).abs())
        .fold(0.0, f64::max);
    let params = natural(2.0 / PI);
    let start = make_coherent(0.0, 0.0, params)?;
    let grid = oracle_grid(&start, PI, &params)?;
    let evolved = propagate_numeric(&NumericDM::from_density(&start, grid)?, PI, &params)?;
    let numeric = grid_entropy(&evolved)?.entropy;
    let err = (numeric - 2.0 * LN_2).abs();
    Ok(outcome(
        closed < 1e-15 && err < 1e-4,
        format!(
            "closed form deviates by {closed:.1e}; oracle entropy {numeric:.8} vs 2 ln 2 = {:.8} (err {err:.2e}, tol 1e-4, {} points)",
            2.0 * LN_2,
            grid.points
        ),
    ))
}

fn oracle_matrix() -> Result<Outcome> {
    let start = Instant::now();
    let cs = [C64::new(1.0, 0.0), C64::new(2.0, 0.5), C64::new(0.5, -0.3)];
    let mut worst_norm: f64 = 0.0;
    let mut worst_trace: f64 = 0.0;
    let mut where_ = String::new();
    for &c in &cs {
        for &t in &[0.5, 1.0, 7.0] {
            for &d in &[0.0, 0.01, 0.1] {
                let params = natural(d);
                let sq = SqueezeParam::new(c)?;
                let init = make_squeezed(sq, params)?;
                let grid = oracle_grid(&init, t, &params)?;
                let out = propagate_numeric(&NumericDM::from_density(&init, grid)?, t, &params)?;
                let closed = evolve_squeezed(sq, t, &params)?;
                let dist = out.distance_to(&closed);
                if dist > worst_norm {
                    worst_norm = dist;
                    where_ = format!("C={c}, t={t}, D={d}");
                }
                worst_trace = worst_trace.max((out.trace() - 1.0).norm());
            }
        }
    }
    Ok(outcome(
        worst_norm < 1e-4 && worst_trace < 1e-5,
        format!(
            "27 cases: max grid-norm difference {worst_norm:.2e} at {where_} (tol 1e-4), max trace error {worst_trace:.2e} (tol 1e-5); {:.1} s",
            start.elapsed().as_secs_f64()
        ),
    ))
}

fn translation_covariance() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let params = natural(rng.random_range(0.0..0.1));
        let c = SqueezeParam::from_parts(rng.random_range(0.2..5.0), rng.random_range(-2.0..2.0))?;
        let t = rng.random_range(0.1..12.0);
        let d = PhaseSpacePoint::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        let dm = make_squeezed(c, params)?;
        let left = evolve_gaussian(&dm.translate(d), t, &params)?;
        let right = evolve_gaussian(&dm, t, &params)?.translate(d.evolve(t, &params));
        for (x, y) in [
            (left.a(), right.a()),
            (left.b(), right.b()),
            (left.c(), right.c()),
            (left.center().x, right.center().x),
            (left.center().p, right.center().p),
        ] {
            worst = worst.max((x - y).abs());
        }
    }
    Ok(outcome(worst < 1e-12, format!("max parameter difference {worst:.2e} over 20 random displacements (tol 1e-12)")))
}

fn cat_decay_rate() -> Result<Outcome> {
    let params = natural(0.005);
    let cat = CatSpec::with_separation(20.0, &params)?;
    let grid = GridSpec::new(0.0, 12.0, 1201)?;
    let fit = fit_decay_rate(&cat, &[1, 2, 3, 4, 5], &grid, &params)?;
    let ratio = fit.ratio();
    Ok(outcome(
        (ratio - 1.0).abs() < 0.2,
        format!(
            "fitted rate {:.5} vs 1/t_D = {:.5}; ratio {ratio:.3} (tol ±20%)",
            fit.rate, fit.expected
        ),
    ))
}

fn figure_one() -> Result<Outcome> {
    // 2nπD = 0.05 at n = 1
    let params = natural(0.05 / (2.0 * PI));
    let cat = CatSpec::even_pair(&params)?;
    let grid = ground_grid(128, &params)?;
    let before = cat_dm_stroboscopic(&cat, 0, &params)?;
    let after = cat_dm_stroboscopic(&cat, 1, &params)?;
    let vis = visibility(&after, &grid)?;
    let vis0 = visibility(&before, &grid)?;
    let diag = |dm: &CatDM, i: usize| {
        dm.kernels[i][i].sample(&grid).iter().map(|z| z.norm()).fold(0.0, f64::max)
    };
    let diag_kept = (0..2).map(|i| diag(&after, i) / diag(&before, i)).fold(f64::INFINITY, f64::min);
    let demo = halo_demo_fock(1, params.d, &params, grid)?;
    let herm = after.hermiticity_defect().max(demo.evolved.hermiticity_defect());
    let pass = demo.retention > 0.95 && vis < demo.retention && vis < vis0 && diag_kept > 0.95 && herm < 1e-10;
    Ok(outcome(
        pass,
        format!(
            "cat visibility {vis:.4} (initial {vis0:.4}), diagonal peaks kept {diag_kept:.4}; |0⟩+|1⟩ retention {:.4} (> 0.95); Hermiticity defect {herm:.1e}",
            demo.retention
        ),
    ))
}

fn kramers_kronig() -> Result<Outcome> {
    let l = LorentzOracle::new(0.1, 1.0, 0.1)?;
    let grid = frequency_grid(1e-3, 1000.0, 400, &[(1.0, 0.1)])?;
    let table = DielectricTable::from_fn(&grid, |w| l.im_k(w))?;
    let static_err = (table.re_k(0.0)? - (1.0 + 0.1)).abs() / 1.1;
    let probes: Vec<f64> = (0..=60).map(|i| 0.01 * 10f64.powf(i as f64 / 20.0)).collect();
    let mut worst_re: f64 = 0.0;
    for &w in &probes {
        worst_re = worst_re.max(((table.re_k(w)? - l.re_k(w)) / l.re_k(w)).abs());
    }
    let (ws, re) = table.re_k_table()?;
    let mut worst_im: f64 = 0.0;
    for &w in &probes {
        let back = im_k_from_re_k(&ws, &re, w)?;
        worst_im = worst_im.max(((back - l.im_k(w)) / l.im_k(w)).abs());
    }
    Ok(outcome(
        static_err < 1e-3 && worst_re < 1e-3 && worst_im < 5e-3,
        format!(
            "Re K(0) rel err {static_err:.1e}; max Re K rel err {worst_re:.2e} on [0.01, 10] (tol 1e-3); inverse round trip max rel err {worst_im:.2e} (tol 5e-3)"
        ),
    ))
}

fn unitarity() -> Result<Outcome> {
    let params = natural(0.0);
    let mut max_s: f64 = 0.0;
    for &(re, im) in &[(1.0, 0.0), (0.3, 1.5), (4.0, -2.0)] {
        let c = SqueezeParam::from_parts(re, im)?;
        for &t in &[0.3, FRAC_PI_2, PI, 5.0, 2.0 * PI, 40.0] {
            max_s = max_s.max(evolve_squeezed(c, t, &params)?.von_neumann_entropy());
            let kern = evolve_gaussian(&make_squeezed(c, params)?, t, &params)?;
            max_s = max_s.max(kern.von_neumann_entropy());
        }
    }
    let coh = make_coherent(1.2, -0.7, params)?;
    let back = evolve_gaussian(&coh, 2.0 * PI, &params)?;
    let kernel_return = back.to_kernel().distance(&coh.to_kernel());
    let closed = evolve_coherent(1.2, -0.7, 2.0 * PI, &params)?;
    let closed_return = closed.to_kernel().distance(&coh.to_kernel());
    let grid = ground_grid(96, &params)?;
    let g0 = make_coherent(0.0, 0.0, params)?;
    let num = NumericDM::from_density(&g0, grid)?;
    let numeric_return = propagate_numeric(&num, 2.0 * PI, &params)?.hs_distance(&num)?;
    let cat = CatSpec::even_pair(&params)?;
    let cat_vis = cat_dm_general(&cat, 6.0 * PI, &params)?.visibility_exact()?;
    let pass = max_s < 1e-10 && kernel_return < 1e-10 && closed_return < 1e-12 && numeric_return < 1e-6 && (cat_vis - 1.0).abs() < 1e-10;
    Ok(outcome(
        pass,
        format!(
            "max entropy {max_s:.1e} (tol 1e-10); coherent return after one period: closed {closed_return:.1e}, kernel {kernel_return:.1e}, oracle {numeric_return:.1e}; cat visibility after 3 periods {cat_vis:.12}"
        ),
    ))
}

type Criterion = fn() -> Result<Outcome>;

fn main() {
    let criteria: [(&str, Criterion); 9] = [
        ("sieve recovers the optimal squeezing", sieve_recovery),
        ("entropy ladder of the optimal evolved state", entropy_ladder),
        ("four-state mixture anchor", four_state_anchor),
        ("closed form vs quadrature propagation matrix", oracle_matrix),
        ("translation covariance", translation_covariance),
        ("cat decoherence rate vs 1/t_D", cat_decay_rate),
        ("figure-one cat vs |0⟩+|1⟩ comparison", figure_one),
        ("Kramers-Kronig Lorentz oracle", kramers_kronig),
        ("D = 0 unitarity", unitarity),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run().unwrap_or_else(|e| outcome(false, format!("error: {e}")));
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {} [{}] {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
