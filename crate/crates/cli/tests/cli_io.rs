//! End-to-end checks through the built binary: config handling, file
//! layouts, column conventions, and exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn hoversim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hoversim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

/// Parses one CSV column, `None` for empty fields.
fn column(text: &str, idx: usize) -> Vec<Option<f64>> {
    text.lines()
        .skip(1)
        .map(|l| {
            let field = l.split(',').nth(idx).unwrap();
            if field.is_empty() {
                None
            } else {
                Some(field.parse().unwrap())
            }
        })
        .collect()
}

#[test]
fn config_errors_surface_with_field_names() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "[model]\nkind = symmetric\nalpha = -1\nsigma = 1\n").unwrap();
    let out = hoversim(&["cdf", "--config", bad.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("alpha"), "{}", stderr(&out));

    let empty = dir.path().join("empty.cfg");
    std::fs::write(&empty, "").unwrap();
    let out = hoversim(&["cdf", "--config", empty.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("empty"), "{}", stderr(&out));

    let missing = dir.path().join("nope.cfg");
    let out = hoversim(&["cdf", "--config", missing.to_str().unwrap()]);
    assert!(!out.status.success());
}

#[test]
fn cdf_emits_the_analytic_table_by_default() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    std::fs::write(
        &cfg,
        "[model]\nkind = symmetric\nalpha = 1\nsigma = 1\n\
         [analysis]\ngrid_max = 4\ngrid_points = 41\n",
    )
    .unwrap();
    let out = hoversim(&[
        "cdf",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = read(&dir.path().join("hoversim_cdf_ou.csv"));
    assert!(text.starts_with("r,cdf_analytic\n"));
    assert_eq!(text.lines().count(), 42);
    let values: Vec<f64> = column(&text, 1).into_iter().map(Option::unwrap).collect();
    assert_eq!(values[0], 0.0);
    assert!(values.windows(2).all(|w| w[1] >= w[0]));
    assert!(values[40] > 0.99);
}

#[test]
fn pconn_sweep_leaves_inapplicable_closed_forms_empty() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    std::fs::write(
        &cfg,
        "[model]\nkind = asymmetric-ou\nalpha = 1\nsigma = 1.3, 1, 0.7\nbeta = 1\ns = 1\n\
         [analysis]\nsnr_ratios = 0.25, 1, 4\ngammas = 2, 3, 4\n",
    )
    .unwrap();
    let out = hoversim(&[
        "pconn",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--samples",
        "20000",
        "--seed",
        "5",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = read(&dir.path().join("hoversim_pconn_asym.csv"));
    assert!(text.starts_with("snr_ratio,gamma,pconn_analytic,pconn_numeric,pconn_mc\n"));
    assert_eq!(text.lines().count(), 10);

    let gammas: Vec<f64> = column(&text, 1).into_iter().map(Option::unwrap).collect();
    let analytic = column(&text, 2);
    let numeric: Vec<f64> = column(&text, 3).into_iter().map(Option::unwrap).collect();
    let mc: Vec<f64> = column(&text, 4).into_iter().map(Option::unwrap).collect();
    for (i, &gamma) in gammas.iter().enumerate() {
        if gamma == 3.0 {
            assert!(analytic[i].is_none(), "row {i} should have no closed form");
        } else {
            let a = analytic[i].expect("closed form exists for gamma 2 and 4");
            assert!(
                (a - numeric[i]).abs() < 1e-5,
                "row {i}: closed {a} vs numeric {}",
                numeric[i]
            );
        }
        assert!((0.0..=1.0).contains(&numeric[i]));
        // twenty thousand draws resolve the numeric value to a few
        // binomial standard errors
        assert!(
            (mc[i] - numeric[i]).abs() < 0.02,
            "row {i}: mc {} vs numeric {}",
            mc[i],
            numeric[i]
        );
    }
    // within each exponent the sweep must decrease in the threshold
    for rows in numeric.chunks(3) {
        assert!(rows[1] < rows[0] && rows[2] < rows[1]);
    }
}

#[test]
fn on_off_sweep_has_closed_forms_only_at_square_loss() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    std::fs::write(
        &cfg,
        "[model]\nkind = symmetric\ncontrol = on-off\nc = 1\nm = 1\nsigma = 1\n\
         [analysis]\nsnr_ratios = 0.5, 2\ngammas = 2, 3\n",
    )
    .unwrap();
    let out = hoversim(&[
        "pconn",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--samples",
        "5000",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = read(&dir.path().join("hoversim_pconn_oc.csv"));
    let gammas: Vec<f64> = column(&text, 1).into_iter().map(Option::unwrap).collect();
    let analytic = column(&text, 2);
    for (i, &gamma) in gammas.iter().enumerate() {
        assert_eq!(
            analytic[i].is_some(),
            gamma == 2.0,
            "row {i} gamma {gamma}"
        );
    }
}

#[test]
fn simulate_writes_a_deterministic_ensemble() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    std::fs::write(
        &cfg,
        "[model]\nkind = symmetric\nalpha = 1\nsigma = 1\n[sim]\nn_samples = 500\n",
    )
    .unwrap();
    let run = |out_dir: &Path| {
        let out = hoversim(&[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--seed",
            "11",
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        read(&out_dir.join("hoversim_ensemble_ou.csv"))
    };
    let a = run(&dir.path().join("a"));
    let b = run(&dir.path().join("b"));
    assert!(a.starts_with("t,x,y,z,e1,e2,e3\n"));
    assert_eq!(a.lines().count(), 501);
    assert_eq!(a, b);
}

#[test]
fn figure_five_emits_all_four_curves() {
    let dir = tempfile::tempdir().unwrap();
    let out = hoversim(&[
        "figure",
        "5",
        "--out",
        dir.path().to_str().unwrap(),
        "--samples",
        "1500",
        "--seed",
        "3",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    for name in [
        "hoversim_fig5_sigma3-0.5-beta-1.csv",
        "hoversim_fig5_sigma3-0.5-beta-10.csv",
        "hoversim_fig5_sigma3-0.1-beta-1.csv",
        "hoversim_fig5_sigma3-0.1-beta-10.csv",
    ] {
        let text = read(&dir.path().join(name));
        assert!(text.starts_with("r,cdf_analytic,cdf_empirical\n"), "{name}");
        let analytic: Vec<f64> = column(&text, 1).into_iter().map(Option::unwrap).collect();
        assert!(analytic.windows(2).all(|w| w[1] >= w[0]), "{name}");
    }
    assert_eq!(stdout(&out).lines().count(), 4);
}

#[test]
fn unknown_figure_id_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let out = hoversim(&["figure", "9", "--out", dir.path().to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("unknown figure"), "{}", stderr(&out));
}

#[test]
fn validate_exit_code_counts_failed_records() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    // a half-relaxation-time Euler step visibly biases the stationary
    // law, so exactly the ensemble record fails
    std::fs::write(
        &cfg,
        "[model]\nkind = symmetric\nalpha = 1\nsigma = 1\n[sim]\ndt = 0.5\nn_samples = 20000\n",
    )
    .unwrap();
    let out = hoversim(&[
        "validate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--samples",
        "50000",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
    let text = read(&dir.path().join("hoversim_report.txt"));
    assert!(text.contains("FAIL  ensemble-vs-analytic[ou]"), "{text}");
    assert!(text.contains("15 of 16 records passed"), "{text}");
    let csv = read(&dir.path().join("hoversim_report.csv"));
    assert_eq!(csv.lines().count(), 17);
    assert!(csv.contains("ensemble-vs-analytic[ou],ks,"));
}

#[test]
fn ingest_reports_statistics_and_writes_cdfs() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("hover.csv");
    let mut text = String::from("t,x,y,z\n");
    // deterministic low-discrepancy cloud around (1, 2, 3)
    for i in 0..200 {
        let u = i as f64 / 200.0;
        let x = 1.0 + 0.3 * f64::sin(39.0 * u);
        let y = 2.0 + 0.2 * f64::cos(57.0 * u);
        let z = 3.0 + 0.1 * f64::sin(83.0 * u + 1.0);
        text.push_str(&format!("{i},{x},{y},{z}\n"));
    }
    std::fs::write(&data, text).unwrap();
    let out = hoversim(&[
        "ingest",
        data.to_str().unwrap(),
        "--target",
        "1,2,3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let log = stdout(&out);
    assert!(log.contains("rows: 200"), "{log}");
    assert!(log.contains("planar-vs-vertical correlation"), "{log}");
    let cdf = read(&dir.path().join("hoversim_ingest_cdf.csv"));
    assert!(cdf.starts_with("value,cdf_x,cdf_y,cdf_z,cdf_r\n"));
    assert_eq!(cdf.lines().count(), 202);
    // each empirical column climbs from 0 toward 1 across the grid
    for idx in 1..=4 {
        let col: Vec<f64> = column(&cdf, idx).into_iter().map(Option::unwrap).collect();
        assert!(col.windows(2).all(|w| w[1] >= w[0]), "column {idx}");
        assert_eq!(col[200], 1.0, "column {idx}");
    }

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "x,y,z\n1,2,nope\n").unwrap();
    let out = hoversim(&["ingest", bad.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("row 2"), "{}", stderr(&out));
}
