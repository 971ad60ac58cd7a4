use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qbm_core::medium::line_weights;
use qbm_core::*;
use serde_json::Value;

fn qbm(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbm"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .env_remove("QBM_OUT_DIR")
        .output()
        .expect("run qbm")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = qbm(dir, args);
    assert!(
        out.status.success(),
        "qbm {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

/// Header row and records of a delimited table, skipping `#` lines.
fn read_table(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let delim = if path.extension().is_some_and(|e| e == "tsv") { b'\t' } else { b',' };
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .delimiter(delim)
        .from_path(path)
        .unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let (header, rows) = read_table(path);
    let i = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

fn summary(dir: &Path, command: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(format!("{command}_summary.json"))).unwrap()).unwrap()
}

fn two_level(dir: &Path) -> PathBuf {
    let path = dir.join("two_level.txt");
    fs::write(&path, "level, 0, 0.0\nlevel, 1, 2.0\ndipole, 1, 0, 0.3, 0.05\n").unwrap();
    path
}

#[test]
fn evolve_without_noise_stays_pure() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["evolve", "--c-re", "2", "--c-im", "-0.5", "--t-max", "20", "--steps", "40"]);
    let s = column(&dir.path().join("evolve.csv"), "entropy");
    assert_eq!(s.len(), 41);
    assert!(s.iter().all(|v| *v == 0.0), "{s:?}");
}

#[test]
fn evolve_coherent_half_periods() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["-D", "0.05", "evolve", "--times", "0,pi,2pi,3pi,4pi"]);
    let s = column(&dir.path().join("evolve.csv"), "entropy");
    for (n, v) in s.iter().enumerate() {
        assert!((v - coherent_entropy(n as u32, 0.05)).abs() < 1e-12, "n={n}: {v}");
    }
}

#[test]
fn evolve_output_reads_back_exactly() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["-D", "0.02", "evolve", "--c-re", "1.5", "--c-im", "0.25", "--x", "1", "--p", "-2", "--times", "0.3,1.7,pi/2,9"]);
    let path = dir.path().join("evolve.csv");
    let params = SimParams::natural(1.0, 0.02).unwrap();
    let c = SqueezeParam::from_parts(1.5, 0.25).unwrap();
    let start = PhaseSpacePoint::new(1.0, -2.0);
    let (ts, a, x, s) = (column(&path, "t"), column(&path, "a"), column(&path, "x"), column(&path, "entropy"));
    for i in 0..ts.len() {
        let dm = evolve_squeezed(c, ts[i], &params).unwrap().translate(start.evolve(ts[i], &params));
        assert_eq!(a[i], dm.a());
        assert_eq!(x[i], dm.center().x);
        assert_eq!(s[i], dm.von_neumann_entropy());
    }
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# qbm "));
    assert!(text.contains("# params: omega=1 mass=1 hbar=1 D=0.02"));
}

#[test]
fn output_does_not_depend_on_job_count() {
    let one = tempfile::tempdir().unwrap();
    let four = tempfile::tempdir().unwrap();
    let args = ["-D", "0.05", "sieve", "--times", "pi/4,1,pi/2,2", "--scan", "--resolution", "9"];
    ok(one.path(), &[&["--jobs", "1"][..], &args].concat());
    ok(four.path(), &[&["--jobs", "4"][..], &args].concat());
    for f in ["sieve.csv", "sieve_surface_0.csv", "sieve_surface_3.csv", "sieve_summary.json"] {
        let a = fs::read_to_string(one.path().join(f)).unwrap();
        let b = fs::read_to_string(four.path().join(f)).unwrap();
        // the summary records the output paths, which differ
        let strip = |s: &str, d: &Path| s.replace(&d.display().to_string(), "");
        assert_eq!(strip(&a, one.path()), strip(&b, four.path()), "{f}");
    }
}

#[test]
fn sieve_recovers_sigma() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["-D", "0.1", "sieve"]);
    let path = dir.path().join("sieve.csv");
    let dev = column(&path, "deviation");
    assert_eq!(dev.len(), 6);
    assert!(dev.iter().all(|d| *d < 1e-6), "{dev:?}");
    let (t, re, im) = (column(&path, "t"), column(&path, "c_re"), column(&path, "c_im"));
    let half = t.iter().position(|v| (v - std::f64::consts::FRAC_PI_2).abs() < 1e-12).unwrap();
    // σ(π/2) = √(1 - 4/π²) + (2/π) i
    let want_re = (1.0 - std::f64::consts::FRAC_2_PI.powi(2)).sqrt();
    assert!((re[half] - want_re).abs() < 1e-6 && (im[half] - std::f64::consts::FRAC_2_PI).abs() < 1e-6);
}

#[test]
fn sieve_without_noise_is_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(dir.path(), &["sieve", "--times", "pi/2"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("D = 0"));
    let (header, rows) = read_table(&dir.path().join("sieve.csv"));
    let status = header.iter().position(|h| h == "status").unwrap();
    assert_eq!(rows[0][status], "degenerate");
    assert_eq!(summary(dir.path(), "sieve")["degenerate"], 1);
}

#[test]
fn cat_visibility_table() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["-D", "0.005", "cat", "--delta2", "20", "--periods", "5"]);
    let path = dir.path().join("cat.csv");
    let v = column(&path, "visibility");
    assert_eq!(v[0], 1.0);
    assert!(v.windows(2).all(|w| w[1] < w[0]));
    let exact = column(&path, "visibility_exact");
    for (n, e) in exact.iter().enumerate() {
        let nu = n as f64 * std::f64::consts::PI * 0.005;
        assert!((e - (-nu * 20.0 / (1.0 + 2.0 * nu)).exp()).abs() < 1e-12);
    }
    let s = summary(dir.path(), "cat");
    assert!((s["decoherence_time"].as_f64().unwrap() - 1.0 / 0.095).abs() < 1e-9);
    assert!(s["decay_fit"]["rate"].as_f64().unwrap() > 0.0);
    assert_eq!(s["halo_regime"], false);
}

#[test]
fn cat_inside_halo_is_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(dir.path(), &["-D", "0.01", "cat", "--delta2", "0.5", "--periods", "2"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("halo"));
    let s = summary(dir.path(), "cat");
    assert_eq!(s["halo_regime"], true);
    assert!(s["decoherence_time"].is_null());
}

#[test]
fn fig1_grids() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["fig1"]);
    let s = summary(dir.path(), "fig1");
    assert!(s["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true), "{s}");
    let vb = s["cat_visibility"]["fig1b"].as_f64().unwrap();
    let r = s["retention"]["fig1b_prime"].as_f64().unwrap();
    assert!(vb < r && r > 0.95);
    for stem in ["fig1a", "fig1b", "fig1a_prime", "fig1b_prime"] {
        let text = fs::read_to_string(dir.path().join(format!("{stem}.dat"))).unwrap();
        let rows: Vec<Vec<f64>> = text
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| l.split(' ').map(|v| v.parse().unwrap()).collect())
            .collect();
        assert_eq!(rows.len(), 128);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), 128);
            for (j, v) in row.iter().enumerate().take(i) {
                assert!((v - rows[j][i]).abs() < 1e-12);
            }
        }
        assert!(text.contains("units of sqrt(hbar/(M Omega))"));
        assert!(dir.path().join(format!("{stem}_re.dat")).exists());
    }
}

#[test]
fn medium_without_dipoles_is_vacuum() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("levels.txt");
    fs::write(&spec, "level 0 0\nlevel 1 1\n").unwrap();
    ok(dir.path(), &["medium", "--spectrum", spec.to_str().unwrap(), "--omega-max", "50"]);
    let path = dir.path().join("medium.csv");
    assert!(column(&path, "im_k").iter().all(|v| *v == 0.0));
    assert!(column(&path, "re_k").iter().all(|v| *v == 1.0));
}

#[test]
fn medium_single_line_matches_lorentz_model() {
    let dir = tempfile::tempdir().unwrap();
    let spec_path = two_level(dir.path());
    ok(
        dir.path(),
        &["medium", "--spectrum", spec_path.to_str().unwrap(), "--beta", "0.7", "--coupling", "0.4"],
    );
    let spec = MolecularSpectrum::from_file(&spec_path).unwrap();
    let (w0, weight, width) = line_weights(&spec, 0.7, 1.0).unwrap()[0];
    let model = LorentzOracle::new(0.16 * weight, w0, 2.0 * width).unwrap();
    let path = dir.path().join("medium.csv");
    let (w, re, im) = (column(&path, "omega"), column(&path, "re_k"), column(&path, "im_k"));
    let mut checked = 0;
    for i in 0..w.len() {
        if w[i] >= 0.01 * w0 && w[i] <= 10.0 * w0 {
            assert!(((re[i] - model.re_k(w[i])) / model.re_k(w[i])).abs() < 1e-3, "ω = {}", w[i]);
            assert!(((im[i] - model.im_k(w[i])) / model.im_k(w[i])).abs() < 1e-9);
            checked += 1;
        }
    }
    assert!(checked > 100);
}

#[test]
fn dilute_medium_warns() {
    let dir = tempfile::tempdir().unwrap();
    let spec = two_level(dir.path());
    let out = ok(dir.path(), &["medium", "--spectrum", spec.to_str().unwrap(), "--density", "10", "--cutoff", "3"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("below"));
    assert!(summary(dir.path(), "medium")["validity_warning"].is_string());
}

#[test]
fn malformed_spectrum_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bad.txt");
    fs::write(&spec, "level, 0, 0\n# comment\ndipole, 0, 1, 0.1\n").unwrap();
    let out = qbm(dir.path(), &["medium", "--spectrum", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn oracle_check_small_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(dir.path(), &["oracle-check", "--times", "0.5,1", "--d-values", "0,0.1"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).matches("PASS").count(), 12);
    let path = dir.path().join("oracle_check.csv");
    let (d, norm) = (column(&path, "D"), column(&path, "grid_norm"));
    for (d, n) in d.iter().zip(&norm) {
        assert!(*n < 1e-4);
        if *d == 0.0 {
            assert!(*n < 1e-10);
        }
    }
    assert_eq!(summary(dir.path(), "oracle_check")["passed"], 12);
}

#[test]
fn oracle_check_coarse_grid_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = qbm(dir.path(), &["oracle-check", "--times", "7", "--d-values", "0.1", "--points", "64"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stdout).contains("under-resolves"));
    let tight = qbm(dir.path(), &["oracle-check", "--times", "1", "--d-values", "0", "--tol", "1e-30"]);
    assert_eq!(tight.status.code(), Some(2));
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "[params]\nD = 0.05\n[output]\nformat = \"tsv\"\n[evolve]\nc_re = 2.0\ntimes = [0, \"pi\"]\n",
    )
    .unwrap();
    ok(dir.path(), &["--config", cfg.to_str().unwrap(), "-D", "0.1", "evolve"]);
    let path = dir.path().join("evolve.tsv");
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.contains("D=0.1"), "{text}");
    assert!(text.contains("C=2+0i"));
    assert_eq!(column(&path, "t").len(), 2);
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[cat]\ndelta = 3.0\n").unwrap();
    let out = qbm(dir.path(), &["--config", cfg.to_str().unwrap(), "cat"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("delta"));
    for args in [&["evolve", "--omega", "-1"][..], &["evolve", "--times", "pi/0"], &["evolve", "--no-such-flag"]] {
        assert_eq!(qbm(dir.path(), args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_qbm"))
        .args(["evolve", "--times", "1"])
        .env("QBM_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("evolve.csv").exists());
}

#[test]
fn bundled_example_config_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/example.toml");
    for cmd in ["evolve", "sieve", "cat", "medium"] {
        ok(dir.path(), &["--config", cfg.to_str().unwrap(), cmd]);
    }
}
