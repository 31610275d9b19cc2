use std::fs;
use std::path::Path;
use std::process::Command;

use otoc_torus::runner::{
    run_lyapunov, run_otoc, run_resonances, run_sweep, sha256_hex, MapKind, OperatorSpec, ResonanceMethod,
    RunConfig, SweepAxis,
};
use otoc_torus::runner::config::OUTPUT_ROOT_ENV;
use otoc_torus::Error;

fn small(dir: &Path) -> RunConfig {
    RunConfig {
        map: MapKind::Cat,
        n: 64,
        map_param: 0.02,
        epsilon: 0.05,
        t_max: 12,
        outputs: dir.to_path_buf(),
        ..RunConfig::default()
    }
}

fn manifest_value(dir: &Path, key: &str) -> Option<String> {
    let text = fs::read_to_string(dir.join("manifest.txt")).unwrap();
    text.lines()
        .filter_map(|l| l.split_once(" = "))
        .find(|(k, _)| *k == key)
        .map(|(_, v)| v.to_string())
}

fn check_checksum(dir: &Path, file: &str) {
    let bytes = fs::read(dir.join(file)).unwrap();
    let want = manifest_value(dir, &format!("file.{file}.sha256")).unwrap();
    assert_eq!(sha256_hex(&bytes), want);
}

#[test]
fn config_text_round_trip() {
    let text = "# comment\nmap = harper\nN = 96   # trailing\nmap_param = 0.94\nmap_param2 = 0.61\n\
                epsilon = 0.02\nt_max = 30\noperators = F(1,0;0,1)\nseed = 7\nkick_mode = as_printed\n\
                outputs = out/x\ngrowth_window = 1,5\ntail_window = 10,25\nkrylov_seed = random\n";
    let cfg = RunConfig::parse(text).unwrap();
    assert_eq!(cfg.map, MapKind::Harper);
    assert_eq!(cfg.n, 96);
    assert_eq!(cfg.map_param2, Some(0.61));
    assert_eq!(cfg.operators, OperatorSpec::F { xi: (1, 0), chi: (0, 1) });
    assert_eq!(cfg.tail_window, Some((10, 25)));
    assert_eq!(RunConfig::parse(&cfg.to_text()).unwrap(), cfg);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    fs::write(&path, text).unwrap();
    assert_eq!(RunConfig::from_file(&path).unwrap(), cfg);
    assert!(matches!(RunConfig::from_file(&dir.path().join("missing.cfg")), Err(Error::Io { .. })));
}

#[test]
fn config_errors_carry_line_numbers() {
    let err = RunConfig::parse("map = cat\n\nepsilom = 0.1\n").unwrap_err();
    assert!(matches!(err, Error::Config { line: Some(3), .. }), "{err:?}");
    assert!(err.to_string().contains("line 3"));
    let err = RunConfig::parse("map cat\n").unwrap_err();
    assert!(matches!(err, Error::Config { line: Some(1), .. }));
    let err = RunConfig::parse("epsilon = -1\n").unwrap_err();
    assert!(matches!(err, Error::Config { line: None, .. }));
    assert!(!err.to_string().contains("line"));
    assert_eq!(err.kind(), "config");
}

#[test]
fn otoc_run_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    let run = run_otoc(&cfg).unwrap();
    let csv = fs::read_to_string(dir.path().join("otoc.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&header[..7], ["t", "C", "O1_re", "O1_im", "O1_abs", "O2", "growth_ref"]);
    assert_eq!(lines.count(), cfg.t_max + 1);
    check_checksum(dir.path(), "otoc.csv");
    assert_eq!(manifest_value(dir.path(), "run").as_deref(), Some("otoc"));
    assert_eq!(manifest_value(dir.path(), "config.N").as_deref(), Some("64"));
    assert_eq!(manifest_value(dir.path(), "kernel_normalization").as_deref(), Some("unit_sum"));
    assert!(run.ehrenfest_time.is_some());
    assert_eq!(run.series.points.len(), cfg.t_max + 1);

    // the config recorded in the manifest reproduces the run exactly
    let again = run_otoc(&cfg).unwrap();
    assert_eq!(
        fs::read(dir.path().join("otoc.csv")).unwrap(),
        csv.as_bytes(),
        "rerun changed the output"
    );
    assert_eq!(again.series.points, run.series.points);
}

#[test]
fn exact_cat_run_carries_closed_form_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        map_param: 0.0,
        epsilon: 0.0,
        ..small(dir.path())
    };
    let run = run_otoc(&cfg).unwrap();
    let csv = fs::read_to_string(dir.path().join("otoc.csv")).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let ci = header.iter().position(|h| *h == "C").unwrap();
    let ei = header.iter().position(|h| *h == "C_exact").unwrap();
    for line in csv.lines().skip(1) {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert!((cells[ci] - cells[ei]).abs() < 1e-10);
    }
    assert_eq!(manifest_value(dir.path(), "lambda_source").as_deref(), Some("exact"));
    assert!(run.growth.is_some());
}

#[test]
fn explicit_windows_are_used_verbatim() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        growth_window: Some((1, 3)),
        tail_window: Some((8, 12)),
        ..small(dir.path())
    };
    let run = run_otoc(&cfg).unwrap();
    let g = run.growth.unwrap();
    let t = run.tail.unwrap();
    assert_eq!((g.start, g.end), (1, 3));
    assert_eq!((t.start, t.end), (8, 12));
    assert_eq!(manifest_value(dir.path(), "tail_window").as_deref(), Some("8,12"));
}

#[test]
fn sweep_writes_summary_and_subruns() {
    let dir = tempfile::tempdir().unwrap();
    let base = small(dir.path());
    let axis = SweepAxis::Epsilon(vec![0.02, 0.1]);
    let sweep = run_sweep(&base, &axis).unwrap();
    assert_eq!(sweep.entries.len(), 2);
    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(summary.starts_with("value,status,alpha1"));
    assert_eq!(summary.lines().count(), 3);
    check_checksum(dir.path(), "summary.csv");
    for (i, e) in sweep.entries.iter().enumerate() {
        assert!(e.result.is_ok());
        assert_eq!(e.dir, dir.path().join(format!("epsilon_{i:03}")));
        check_checksum(&e.dir, "otoc.csv");
    }
    assert_eq!(manifest_value(&sweep.entries[1].dir, "config.epsilon").as_deref(), Some("0.1"));
    assert_eq!(manifest_value(dir.path(), "sweep_failures").as_deref(), Some("0"));

    assert!(run_sweep(&base, &SweepAxis::Epsilon(vec![])).is_err());
    // a bad value fails its own sub-run only
    let mixed = run_sweep(&base, &SweepAxis::N(vec![1, 32])).unwrap();
    assert!(mixed.entries[0].result.is_err());
    assert!(mixed.entries[1].result.is_ok());
    assert_eq!(manifest_value(dir.path(), "sweep_failures").as_deref(), Some("1"));
}

#[test]
fn resonance_and_lyapunov_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        n: 12,
        epsilon: 0.5,
        ..small(dir.path())
    };
    let dense = run_resonances(&cfg, ResonanceMethod::Dense, 0, 5).unwrap();
    assert_eq!(dense.spectrum.alphas.len(), 5);
    assert!((dense.spectrum.alphas[0].norm() - 1.0).abs() < 1e-10);
    check_checksum(dir.path(), "resonances.csv");
    let krylov = run_resonances(&RunConfig { n: 64, ..cfg.clone() }, ResonanceMethod::Krylov, 30, 4).unwrap();
    assert!(krylov.spectrum.alphas.iter().all(|a| a.norm() < 1.0));
    assert_eq!(manifest_value(dir.path(), "depth").as_deref(), Some("30"));
    assert!(run_resonances(&RunConfig { n: 40, ..cfg.clone() }, ResonanceMethod::Dense, 0, 5).is_err());

    let lyap = run_lyapunov(&cfg, 200, 40).unwrap();
    assert!(lyap.estimate.lambda > 0.8, "{:?}", lyap.estimate);
    check_checksum(dir.path(), "lyapunov.csv");
}

fn cli() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_otoc-torus"));
    c.env_remove(OUTPUT_ROOT_ENV);
    c
}

#[test]
fn cli_runs_and_reports_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli()
        .args(["otoc", "--map", "standard", "--map-param", "3.0", "-N", "32", "--t-max", "6", "--outputs"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("otoc.csv").exists());
    assert_eq!(manifest_value(dir.path(), "config.map").as_deref(), Some("standard"));

    let env_dir = tempfile::tempdir().unwrap();
    let out = cli()
        .args(["lyapunov", "--n-traj", "50", "--t-horizon", "20"])
        .env(OUTPUT_ROOT_ENV, env_dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(env_dir.path().join("lyapunov.csv").exists());

    for args in [
        vec!["otoc", "--epsilon", "-0.5", "-N", "16"],
        vec!["otoc", "--map", "baker"],
        vec!["sweep", "--axis", "epsilon", "--values", "abc"],
        vec!["sweep", "--axis", "epsilon"],
        vec!["resonances", "--method", "lanczos", "-N", "8"],
    ] {
        let out = cli().args(&args).arg("--outputs").arg(dir.path()).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert!(stderr.starts_with("error: kind="), "{args:?}: {stderr}");
    }
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "N = 16\nwhat = 1\n").unwrap();
    let out = cli().arg("otoc").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}
