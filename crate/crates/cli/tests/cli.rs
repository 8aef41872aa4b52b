use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fso-secrecy"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fso-secrecy-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn sop_sweep_over_mu1_decreases() {
    let o = run(&["sop", "--preset", "weak", "--rho", "0.9", "--mu2-db", "5", "--mu1-db", "30:70:5", "--rs", "0.1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "mu1_db,mu2_db,rho,rs,value"));
    assert!(text.starts_with("# fso-secrecy "));
    let values: Vec<f64> = data_rows(&text).iter().map(|r| r[4].parse().unwrap()).collect();
    assert_eq!(values.len(), 9);
    assert!(values.windows(2).all(|w| w[1] < w[0]), "{values:?}");
}

#[test]
fn pnzsc_symmetric_point() {
    let o = run(&["pnzsc", "--preset", "strong", "--rho", "0", "--mu1-db", "10", "--mu2-db", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = data_rows(&stdout(&o));
    let v: f64 = rows[0][4].parse().unwrap();
    assert!((v - 0.5).abs() < 1e-3, "{v}");
}

#[test]
fn asymptotic_has_slope_column() {
    let o = run(&["asymptotic", "--preset", "strong", "--rho", "0.5", "--mu1-db", "60", "--mu2-db", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows[0].len(), 6);
    assert_eq!(rows[0][5], "0.5");
    let low = run(&["asymptotic", "--preset", "strong", "--rho", "0.5", "--mu1-db", "20", "--mu2-db", "5"]);
    assert!(String::from_utf8_lossy(&low.stderr).contains("warning"));
}

#[test]
fn sweep_rho_single_point_echoes_rho_star() {
    let o = run(&["sweep-rho", "--preset", "strong", "--rho", "0.4", "--mu1-db", "20", "--mu2-db", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "# rho_star=0.4"));
}

#[test]
fn output_is_byte_stable() {
    let args = ["sop", "--preset", "strong", "--rho", "0.2:0.4:0.1", "--mu1-db", "15", "--mu2-db", "5"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn flags_override_config_file() {
    let cfg = scratch("override.cfg");
    std::fs::write(&cfg, "# test\npreset = strong\nrho = 0.3\nmu1-db = 15\nmu2_db = 5\n").unwrap();
    let o = run(&["sop", "--config", cfg.to_str().unwrap(), "--rho", "0.6"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(data_rows(&stdout(&o))[0][2], "0.6");
}

#[test]
fn dumped_config_reproduces_the_run() {
    let args = ["pnzsc", "--preset", "weak", "--rho", "0.5", "--mu1-db", "12", "--mu2-db", "4"];
    let direct = run(&args);
    let mut dump_args = args.to_vec();
    dump_args.push("--dump-config");
    let dump = run(&dump_args);
    let cfg = scratch("dump.cfg");
    std::fs::write(&cfg, &dump.stdout).unwrap();
    let again = run(&["pnzsc", "--config", cfg.to_str().unwrap()]);
    assert_eq!(direct.stdout, again.stdout);
}

#[test]
fn sample_is_deterministic_per_seed() {
    let (a, b) = (scratch("a.csv"), scratch("b.csv"));
    for p in [&a, &b] {
        let o = run(&[
            "sample", "--preset", "strong", "--rho", "0.5", "--mu1-db", "10", "--mu2-db", "10", "--samples", "5000",
            "--seed", "42", "--out", p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let meta = std::fs::read_to_string(format!("{}.meta", a.display())).unwrap();
    assert!(meta.contains("seed=42"));
}

#[test]
fn exit_codes() {
    let zero = run(&["sample", "--preset", "strong", "--rho", "0.5", "--mu1-db", "10", "--mu2-db", "10", "--samples", "0", "--out", "/tmp/unused.csv"]);
    assert_eq!(zero.status.code(), Some(2));
    let bad = run(&["sop", "--preset", "strong", "--rho", "1.5", "--mu1-db", "10", "--mu2-db", "10"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("rho"));
    let both = run(&["sop", "--preset", "strong", "--rho", "0:0.5:0.25", "--mu1-db", "10:20:5", "--mu2-db", "10"]);
    assert_eq!(both.status.code(), Some(2));
    let io = run(&["pnzsc", "--preset", "strong", "--rho", "0", "--mu1-db", "10", "--mu2-db", "10", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(io.status.code(), Some(4));
    let unknown = run(&["sop", "--bogus"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn numerical_failure_exit_code() {
    // t_max = 1 cannot reach the stopping rule at rho = 0.9
    let o = run(&["sop", "--preset", "weak", "--rho", "0.9", "--mu1-db", "10", "--mu2-db", "5", "--t-max", "1"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn plot_script_next_to_csv() {
    let out = scratch("curve.csv");
    let o = run(&[
        "sop", "--preset", "strong", "--rho", "0.5", "--mu1-db", "10:20:10", "--mu2-db", "5", "--out",
        out.to_str().unwrap(), "--plot",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let gp = std::fs::read_to_string(format!("{}.gp", out.display())).unwrap();
    assert!(gp.contains("using 1:5"));
    assert_eq!(run(&["sop", "--preset", "strong", "--rho", "0.5", "--mu1-db", "10", "--mu2-db", "5", "--plot"]).status.code(), Some(2));
}

#[test]
fn pdf_marginal_and_joint() {
    let m = run(&["pdf", "--preset", "strong", "--mu1-db", "10", "--gamma1", "1:3:1"]);
    assert_eq!(m.status.code(), Some(0));
    assert_eq!(data_rows(&stdout(&m)).len(), 3);
    let j = run(&["pdf", "--preset", "strong", "--mu1-db", "10", "--mu2-db", "10", "--rho", "0.5", "--gamma1", "1:2:1", "--gamma2", "1:3:1"]);
    assert_eq!(j.status.code(), Some(0));
    assert_eq!(data_rows(&stdout(&j)).len(), 6);
    let zero = run(&["pdf", "--preset", "strong", "--mu1-db", "10", "--gamma1", "0"]);
    assert_eq!(zero.status.code(), Some(2));
}

#[test]
fn validate_small_grid_passes() {
    let o = run(&["validate", "--preset", "strong", "--rho", "0.5", "--mu1-db", "10", "--mu2-db", "5", "--samples", "20000"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert!(text.contains("0 failed"));
}

#[test]
fn validate_flags_gamma_t_convention() {
    let o = run(&[
        "validate", "--preset", "strong", "--rho", "0.5", "--mu1-db", "10", "--mu2-db", "5", "--samples", "20000",
        "--denominator", "gamma_t",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().any(|l| l.starts_with("normalization") && l.ends_with("FAIL")));
}
