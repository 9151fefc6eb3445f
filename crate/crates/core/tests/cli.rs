use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fct_advect::problems::{initial_condition, IcKind, ProblemSpec};
use fct_advect::velocity::VelocityKind;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fct-advect"))
}

fn run_cli(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn metadata(dir: &Path) -> Vec<(String, String)> {
    fs::read_to_string(dir.join("metadata.txt"))
        .unwrap()
        .lines()
        .filter_map(|l| {
            l.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

fn meta_value(dir: &Path, key: &str) -> String {
    metadata(dir).into_iter().find(|(k, _)| k == key).unwrap().1
}

fn csv_q(path: &Path) -> Vec<f64> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect()
}

#[test]
fn run_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("square");
    let o = run_cli(&[
        "run",
        "--ic",
        "square",
        "--velocity",
        "constant",
        "--scheme",
        "u9",
        "--n",
        "128",
        "--sigma",
        "0.8",
        "--t-final",
        "1.0",
        "--output",
        out.to_str().unwrap(),
        "--dump-every",
        "40",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in [
        "solution.csv",
        "metadata.txt",
        "centerline.csv",
        "eta.csv",
        "snapshot_000080.csv",
    ] {
        assert!(out.join(f).exists(), "missing {f}");
    }
    let sol = fs::read_to_string(out.join("solution.csv")).unwrap();
    assert!(sol.starts_with("i,x,q\n"));
    assert_eq!(sol.lines().count(), 129);
    assert_eq!(meta_value(&out, "steps"), "160");
    let min: f64 = meta_value(&out, "min").parse().unwrap();
    let max: f64 = meta_value(&out, "max").parse().unwrap();
    assert!(min >= -1e-10 && max <= 1.0 + 1e-10, "[{min}, {max}]");
    let drift: f64 = meta_value(&out, "conservation_drift").parse().unwrap();
    assert!(drift <= 1e-12);
    let eta = fs::read_to_string(out.join("eta.csv")).unwrap();
    assert!(eta.starts_with("step,time,eta_min,eta_mean,frac_below_one\n"));
    assert_eq!(eta.lines().count(), 161);
}

#[test]
fn two_dimensional_output_has_both_coordinates() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rot");
    let o = run_cli(&[
        "run",
        "--ic",
        "cosine8",
        "--velocity",
        "rotation",
        "--scheme",
        "u5",
        "--n",
        "16",
        "--t-final",
        "0.1",
        "--cosine-radius",
        "0.2",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let sol = fs::read_to_string(out.join("solution.csv")).unwrap();
    assert!(sol.starts_with("i,j,x,y,q\n"));
    assert_eq!(sol.lines().count(), 16 * 16 + 1);
    let centerline = fs::read_to_string(out.join("centerline.csv")).unwrap();
    assert!(centerline.starts_with("i,x,q,exact\n"));
    assert_eq!(centerline.lines().count(), 17);
    assert_eq!(meta_value(&out, "dim"), "2");
}

#[test]
fn zero_sigma_is_a_config_error() {
    let o = run_cli(&[
        "run",
        "--ic",
        "square",
        "--velocity",
        "constant",
        "--scheme",
        "u9",
        "--n",
        "128",
        "--sigma",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("sigma must be positive"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("out");
    fs::write(
        &cfg,
        format!(
            "# example\nic = square\nvelocity = constant\nscheme = u5\nn = 64\nt_final = 0.25\noutput = {}\n",
            out.display()
        ),
    )
    .unwrap();
    let o = run_cli(&["run", "--config", cfg.to_str().unwrap(), "--n", "128"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(meta_value(&out, "n"), "128");
    assert_eq!(csv_q(&out.join("solution.csv")).len(), 128);
}

#[test]
fn bad_config_entries_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "ic = square\nvelocty = constant\n").unwrap();
    let o = run_cli(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("'velocty'"), "{}", stderr(&o));

    let o = run_cli(&[
        "run",
        "--ic",
        "square",
        "--velocity",
        "constant",
        "--scheme",
        "u5",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("'n'"));

    let o = run_cli(&[
        "run",
        "--ic",
        "square",
        "--velocity",
        "constant",
        "--scheme",
        "u5",
        "--n",
        "8",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn zero_final_time_writes_the_initial_condition() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t0");
    let o = run_cli(&[
        "run",
        "--ic",
        "cosine8",
        "--velocity",
        "constant",
        "--scheme",
        "c4",
        "--n",
        "32",
        "--t-final",
        "0",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let spec = ProblemSpec::new(IcKind::Cosine8, VelocityKind::ConstantDiagonal, 1).unwrap();
    let q0 = initial_condition(&spec, &spec.grid(32).unwrap()).unwrap();
    let written = csv_q(&out.join("solution.csv"));
    // 17 significant digits round-trip exactly
    assert_eq!(written, q0.interior_values());
    assert_eq!(meta_value(&out, "steps"), "0");
}

#[test]
fn low_order_square_is_monotone_and_diffused() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("low");
    let o = run_cli(&[
        "run",
        "--ic",
        "square",
        "--velocity",
        "constant",
        "--scheme",
        "u5",
        "--n",
        "128",
        "--limiter",
        "off-low",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(!out.join("eta.csv").exists());
    let q = csv_q(&out.join("solution.csv"));
    let peak = q.iter().cloned().fold(f64::MIN, f64::max);
    assert!(peak < 1.0 && q.iter().all(|&v| v >= 0.0));
    // periodic profile with one maximum and one minimum: the cyclic
    // differences change sign exactly twice
    let n = q.len();
    let signs: Vec<bool> = (0..n)
        .map(|i| q[(i + 1) % n] - q[i])
        .filter(|d| *d != 0.0)
        .map(|d| d > 0.0)
        .collect();
    let changes = (0..signs.len())
        .filter(|&i| signs[i] != signs[(i + 1) % signs.len()])
        .count();
    assert_eq!(changes, 2);
}

#[test]
fn identical_runs_are_bitwise_identical() {
    let dir = tempfile::tempdir().unwrap();
    let outputs: Vec<_> = ["a", "b"]
        .iter()
        .map(|name| {
            let out = dir.path().join(name);
            let o = run_cli(&[
                "run",
                "--ic",
                "square",
                "--velocity",
                "rotation",
                "--scheme",
                "u7",
                "--n",
                "24",
                "--t-final",
                "0.2",
                "--output",
                out.to_str().unwrap(),
            ]);
            assert!(o.status.success(), "{}", stderr(&o));
            fs::read(out.join("solution.csv")).unwrap()
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn blow_up_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_cli(&[
        "run",
        "--ic",
        "square",
        "--velocity",
        "constant",
        "--scheme",
        "c4",
        "--n",
        "16",
        "--sigma",
        "40",
        "--limiter",
        "off",
        "--t-final",
        "1000",
        "--output",
        dir.path().join("x").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("warning: sigma = 40 exceeds"));
    assert!(err.contains("non-finite value in solution at step"));
}

#[test]
fn unwritable_output_exits_with_code_three() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain-file");
    fs::write(&file, "").unwrap();
    let o = run_cli(&[
        "run",
        "--ic",
        "square",
        "--velocity",
        "constant",
        "--scheme",
        "u5",
        "--n",
        "16",
        "--output",
        file.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("plain-file"));
}

#[test]
fn converge_emits_orders() {
    let o = run_cli(&[
        "converge",
        "--ic",
        "square",
        "--velocity",
        "constant",
        "--scheme",
        "u5",
        "--ns",
        "32,64,128",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "N,error,order");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("32,") && lines[1].ends_with(','));
    for l in &lines[2..] {
        let order: f64 = l.rsplit(',').next().unwrap().parse().unwrap();
        assert!(order < 1.5, "{l}");
    }
    let o = run_cli(&[
        "converge",
        "--ic",
        "square",
        "--velocity",
        "constant",
        "--scheme",
        "u5",
        "--ns",
        "8,16",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn analyze_curves_and_stability() {
    let o = run_cli(&[
        "analyze",
        "--scheme",
        "u5",
        "--sigma",
        "0.8",
        "--samples",
        "64",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("beta,dissipation,phase_error\n"));
    assert_eq!(text.lines().count(), 65);

    let o = run_cli(&["analyze", "--stability", "--scheme", "c4", "--dim", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "scheme,D,sigma_max");
    let s: f64 = lines[1].strip_prefix("c4,1,").unwrap().parse().unwrap();
    assert!((s - 2.06).abs() < 0.03);

    assert_eq!(run_cli(&["analyze"]).status.code(), Some(1));
    assert_eq!(
        run_cli(&["analyze", "--scheme", "q3"]).status.code(),
        Some(1)
    );
}

#[test]
fn usage_errors_exit_with_code_one() {
    assert_eq!(run_cli(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run_cli(&["--help"]).status.code(), Some(0));
}
