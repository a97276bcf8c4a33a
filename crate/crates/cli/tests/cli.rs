use std::path::Path;
use std::process::{Command, Output};

use abpauli::bsolver::Shape;
use abpauli::Complex64;
use abpauli_cli::config::{Format, Numerics, SweepConfig};
use abpauli_cli::output::{read_csv, write_csv, CSV_HEADER};
use abpauli_cli::{parse_config, run_sweep, SweepRow};
use proptest::prelude::*;

const DISK: &str = "alpha = 0.5\n[potential]\nboth = disk(radius=1, amp=-1)\n";

fn abpauli(dir: &Path, config: &str, args: &[&str]) -> Output {
    let path = dir.join("run.ini");
    std::fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_abpauli"))
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn minimal_config_gets_defaults() {
    let cfg = parse_config("alpha = 0.3\n[potential]\nboth = gaussian(width=1, amp=-1)\n").unwrap();
    assert_eq!(cfg.alpha.value(), 0.3);
    assert_eq!(cfg.sweep, SweepConfig::default());
    assert_eq!(cfg.numerics, Numerics::default());
    assert_eq!(cfg.output.stem, "sweep");
    assert_eq!(cfg.output.formats, vec![Format::Csv, Format::Json]);
    assert_eq!(cfg.potential.v11, cfg.potential.v22);
    assert_eq!(cfg.potential.v11.terms[0].shape, Shape::Gaussian);
    assert!(cfg.moments.assumption_ok);
    // pi * w^2 for a unit Gaussian
    assert!((cfg.moments.l2_squared - std::f64::consts::PI / 2.0).abs() < 1e-10);
}

#[test]
fn alpha_out_of_range() {
    let e = parse_config("alpha = 1.5\n[potential]\nboth = disk(radius=1, amp=-1)\n").unwrap_err();
    assert_eq!(e.line, Some(1));
    assert!(e.message.contains("(0, 1)"), "{e}");
    let dir = tempfile::tempdir().unwrap();
    let out = abpauli(dir.path(), "alpha = 1.5\n", &["sweep"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("(0, 1)"));
}

#[test]
fn duplicate_key_cites_first_definition() {
    let e = parse_config("alpha = 0.3\n[sweep]\npoints = 3\n\npoints = 4\n").unwrap_err();
    assert_eq!(e.line, Some(5));
    assert!(e.message.contains("first defined on line 3"), "{e}");
}

#[test]
fn empty_potential_is_rejected() {
    let e = parse_config("alpha = 0.3\n").unwrap_err();
    assert!(e.message.contains("empty"), "{e}");
    let e = parse_config("alpha = 0.3\n[potential]\nv11 = \n").unwrap_err();
    assert_eq!(e.line, Some(3));
}

#[test]
fn empty_sweep_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = abpauli(dir.path(), &format!("{DISK}[sweep]\npoints = 0\n"), &["sweep"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out/sweep.csv")).unwrap();
    assert_eq!(csv.trim_end(), CSV_HEADER.join(","));
}

#[test]
fn repulsive_potential_has_no_eigenvalues() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "alpha = 0.4\n[potential]\nboth = disk(radius=1, amp=1)\n[sweep]\npoints = 2\n[output]\nformats = csv\n";
    let out = abpauli(dir.path(), cfg, &["sweep"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!dir.path().join("out/sweep.json").exists());
    let rows = read_csv(std::fs::File::open(dir.path().join("out/sweep.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert_eq!(r.z_bs, [None, None]);
        assert_eq!(r.rel_err, [None, None]);
        assert!(r.flags.contains(&"plus_no_eigenvalue".to_string()));
        assert!(r.flags.contains(&"minus_no_eigenvalue".to_string()));
        // a repulsive coupling has no admissible asymptotic root either
        assert!(r.flags.contains(&"minus_inadmissible".to_string()));
    }
}

#[test]
fn all_rows_failing_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "alpha = 0.5\n[potential]\nboth = disk(radius=1, amp=-4)\n\
               [sweep]\neps_start = 40\neps_stop = 50\npoints = 2\nw_correction = true\nbound_states = false\n";
    let out = abpauli(dir.path(), cfg, &["sweep"]);
    assert_eq!(out.status.code(), Some(3));
    let rows = read_csv(std::fs::File::open(dir.path().join("out/sweep.csv")).unwrap()).unwrap();
    assert!(rows.iter().all(|r| r.flags.contains(&"error".to_string())));
}

#[test]
fn disk_exponent_at_half_flux() {
    let cfg = parse_config(&format!("{DISK}[sweep]\neps_start = 1e-3\neps_stop = 1e-1\npoints = 10\n")).unwrap();
    let result = run_sweep(&cfg, Some(2));
    assert!(result.rows.iter().all(|r| !r.failed()));
    let fit = result.fit.minus.unwrap();
    assert_eq!(fit.source, "bs");
    assert_eq!(fit.points, 10);
    assert!((fit.slope - 2.0).abs() <= 0.04, "slope {}", fit.slope);
}

#[test]
fn rows_do_not_depend_on_thread_count() {
    let cfg = parse_config(&format!("{DISK}[sweep]\neps_start = 0.02\neps_stop = 0.1\npoints = 3\n")).unwrap();
    let strip =
        |rows: Vec<SweepRow>| -> Vec<SweepRow> { rows.into_iter().map(|r| SweepRow { seconds: 0.0, ..r }).collect() };
    let one = strip(run_sweep(&cfg, Some(1)).rows);
    let three = strip(run_sweep(&cfg, Some(3)).rows);
    assert_eq!(one, three);
    assert!(one.windows(2).all(|w| w[0].eps < w[1].eps));
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e300..1e300f64,
        -1.0..1.0f64,
        (-300i32..300, 1.0..10.0f64).prop_map(|(e, m)| m * 10f64.powi(e)),
        Just(0.0),
        Just(-0.0),
    ]
}

fn maybe_complex() -> impl Strategy<Value = Option<Complex64>> {
    proptest::option::of((finite(), finite()).prop_map(|(re, im)| Complex64::new(re, im)))
}

fn row() -> impl Strategy<Value = SweepRow> {
    let flag = prop_oneof![Just("plus_no_eigenvalue"), Just("minus_inadmissible"), Just("error"), Just("a,\"quoted\"")];
    (
        finite(),
        [maybe_complex(), maybe_complex()],
        [maybe_complex(), maybe_complex()],
        [maybe_complex(), maybe_complex()],
        [proptest::option::of(finite()), proptest::option::of(finite())],
        proptest::collection::vec(flag, 0..3),
    )
        .prop_map(|(eps, z_asym, z_impl, z_bs, rel_err, flags)| {
            let flags: Vec<String> = flags.into_iter().map(String::from).collect();
            let error = flags.iter().any(|f| f == "error").then(String::new);
            SweepRow { eps, z_asym, z_impl, z_bs, rel_err, flags, seconds: 0.0, error }
        })
}

proptest! {
    #[test]
    fn csv_round_trip(rows in proptest::collection::vec(row(), 0..6)) {
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back.len(), rows.len());
        for (a, b) in rows.iter().zip(&back) {
            // 17 significant digits reproduce every f64 exactly
            prop_assert_eq!(a.eps.to_bits(), b.eps.to_bits());
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn eps_grid_is_sorted_and_positive(start in 1e-6..1.0f64, factor in 1.0..1e3f64, points in 0usize..40, log in any::<bool>()) {
        let s = SweepConfig { eps_start: start, eps_stop: start * factor, points, log_scale: log, ..SweepConfig::default() };
        let e = s.eps_values();
        prop_assert_eq!(e.len(), points);
        prop_assert!(e.iter().all(|&x| x > 0.0));
        prop_assert!(e.windows(2).all(|w| w[0] <= w[1]));
        if points >= 2 {
            prop_assert_eq!(e[0], start);
            prop_assert_eq!(e[points - 1], start * factor);
        }
    }
}
