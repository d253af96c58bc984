use std::fs;
use std::path::Path;
use std::process::Command;

use grauert_lab::config::{Experiment, ExperimentConfig, KRange};
use grauert_lab::plot::plot;
use grauert_lab::report::PlotKind;
use grauert_lab::{Cache, Report};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_grauert-lab"))
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let p = dir.join("config.toml");
    fs::write(&p, body).unwrap();
    p
}

#[test]
fn zero_tau_is_rejected_before_any_output() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(
        tmp.path(),
        &format!(
            "experiment = \"torus-example\"\ngroup = \"torus2\"\nlambda = [3, 4]\ntau = 0.0\nk_range = \"1..8\"\noutput_dir = {:?}\nseed = 1\n",
            out
        ),
    );
    let status = bin().arg("torus-example").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(status.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&status.stderr).contains("tau"));
    assert!(!out.exists());
}

#[test]
fn unknown_keys_and_mismatched_subcommands_fail() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "experiment = \"orthogonality\"\ngroup = \"su2\"\nlambda = [1]\ntau = 1.0\nk_range = [0, 1, 2]\noutput_dir = \"x\"\nseed = 1\ncolour = \"red\"\n",
    );
    assert_eq!(bin().arg("orthogonality").arg("--config").arg(&cfg).output().unwrap().status.code(), Some(2));
    let cfg = write_config(
        tmp.path(),
        "experiment = \"orthogonality\"\ngroup = \"su2\"\nlambda = [1]\ntau = 1.0\nk_range = [0, 1, 2]\noutput_dir = \"x\"\nseed = 1\n",
    );
    assert_eq!(bin().arg("scaling").arg("--config").arg(&cfg).output().unwrap().status.code(), Some(2));
}

#[test]
fn successful_run_exits_zero_and_writes_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin().arg("torus-example").arg("--out").arg(tmp.path()).arg("--threads").arg("2").output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), 3);
    for f in ["torus-example.csv", "torus-example.json", "torus-example.svg", "torus-example-off-ray.csv"] {
        assert!(tmp.path().join(f).exists(), "{f} missing");
    }
    let csv = fs::read_to_string(tmp.path().join("torus-example.csv")).unwrap();
    assert!(csv.starts_with("k,exact_norm,paper_leading,ratio\n"));
    assert_eq!(csv.lines().count(), 65);
}

#[test]
fn csv_output_is_byte_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        let mut config = ExperimentConfig::default_for(Experiment::RapidDecay);
        config.k_range = KRange(vec![4, 6, 8, 10, 12]);
        config.samples = Some(3);
        let report = grauert_lab::run(&config, &Cache::disabled()).unwrap();
        report.write(dir.path()).unwrap();
    }
    let name = "rapid-decay.csv";
    assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap());

    let mut config = ExperimentConfig::default_for(Experiment::RapidDecay);
    config.k_range = KRange(vec![4, 6, 8, 10, 12]);
    config.samples = Some(3);
    config.seed += 1;
    let other = grauert_lab::run(&config, &Cache::disabled()).unwrap();
    let c = tempfile::tempdir().unwrap();
    other.write(c.path()).unwrap();
    assert_ne!(fs::read(a.path().join(name)).unwrap(), fs::read(c.path().join(name)).unwrap());
}

fn numbers(r: &Report) -> Vec<f64> {
    let mut v: Vec<f64> = r.tables.iter().flat_map(|t| t.rows.iter().flatten().copied()).collect();
    v.extend(r.criteria.iter().map(|c| c.measured));
    v.extend(r.fits.iter().flat_map(|f| f.values.values().copied()));
    v
}

#[test]
fn warm_cache_matches_cold_run() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = ExperimentConfig::default_for(Experiment::KernelDiagonal);
    config.k_range = KRange::inclusive(4, 8);
    let cold = grauert_lab::run(&config, &Cache::new(Some(dir.path().to_path_buf())).unwrap()).unwrap();
    let warm = grauert_lab::run(&config, &Cache::new(Some(dir.path().to_path_buf())).unwrap()).unwrap();
    assert_eq!(cold.cache_hits, 0);
    assert!(cold.cache_misses > 0);
    assert_eq!(warm.cache_misses, 0);
    assert_eq!(warm.cache_hits, cold.cache_misses);
    let uncached = grauert_lab::run(&config, &Cache::disabled()).unwrap();
    for other in [&warm, &uncached] {
        let (a, b) = (numbers(&cold), numbers(other));
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-14 * x.abs().max(1.0) || (x.is_nan() && y.is_nan()), "{x} vs {y}");
        }
    }

    let mut kir = ExperimentConfig::default_for(Experiment::KirillovCheck);
    kir.k_range = KRange::inclusive(0, 4);
    let cold = grauert_lab::run(&kir, &Cache::new(Some(dir.path().to_path_buf())).unwrap()).unwrap();
    let warm = grauert_lab::run(&kir, &Cache::new(Some(dir.path().to_path_buf())).unwrap()).unwrap();
    assert!(warm.cache_hits > 0 && warm.cache_misses == 0);
    assert_eq!(numbers(&cold), numbers(&warm));
}

#[test]
fn plots_render_or_report_missing_series() {
    let dir = tempfile::tempdir().unwrap();
    let empty = Report::new(&ExperimentConfig::default_for(Experiment::Scaling));
    assert!(plot(&empty, PlotKind::Ratio, &dir.path().join("empty.svg")).is_err());
    assert!(!dir.path().join("empty.svg").exists());

    let mut config = ExperimentConfig::default_for(Experiment::RapidDecay);
    config.k_range = KRange(vec![4, 6, 8, 10, 12]);
    config.samples = Some(2);
    let report = grauert_lab::run(&config, &Cache::disabled()).unwrap();
    assert_eq!(report.plot_kind, Some(PlotKind::Semilog));
    assert!(report.series.iter().all(|s| s.fit.is_some()));
    let p = dir.path().join("decay.svg");
    plot(&report, PlotKind::Semilog, &p).unwrap();
    let svg = fs::read_to_string(&p).unwrap();
    assert!(svg.contains("<svg") && svg.contains("<polyline"));

    let mut config = ExperimentConfig::default_for(Experiment::Scaling);
    config.k_range = KRange::inclusive(1, 24);
    let report = grauert_lab::run(&config, &Cache::disabled()).unwrap();
    let p = dir.path().join("ratio.svg");
    plot(&report, PlotKind::Ratio, &p).unwrap();
    assert!(fs::read_to_string(&p).unwrap().contains("<svg"));
    let last = report.series[0].y.last().copied().unwrap();
    assert!((last - 1.0).abs() < 2.0 / 24.0);
}
