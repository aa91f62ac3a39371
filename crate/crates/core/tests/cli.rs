use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_levymult"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn last_line(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).lines().last().unwrap_or("").to_string()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.toml");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn symbol_csv_is_bounded() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["symbol", "--config", config("stable.toml").to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", last_line(&o));
    let mut rd = csv::Reader::from_path(dir.path().join("symbol.csv")).unwrap();
    assert_eq!(rd.headers().unwrap(), vec!["xi_1", "re_m", "im_m"]);
    let mut max: f64 = 0.0;
    let mut rows = 0;
    for rec in rd.records() {
        let rec = rec.unwrap();
        let (re, im): (f64, f64) = (rec[1].parse().unwrap(), rec[2].parse().unwrap());
        max = max.max(re.hypot(im));
        rows += 1;
    }
    assert_eq!(rows, 256);
    assert!(max < 1.0 && max > 0.0);
    assert!(dir.path().join("symbol.lmgrid").exists());
}

#[test]
fn probe_at_two_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"
d = 1
n = 1
a = [[1.0]]
b = [[-1.0]]
[measure]
kind = "atoms"
atoms = [{ z = [1.0], w = 0.7 }, { z = [-2.0], w = 0.3 }]
[modulator.phi]
kind = "table"
values = [[0.5, 0.0], [0.0, -0.8]]
[probe]
p = [2.0]
trials = 50
"#,
    );
    let o = run(&["probe", "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert!(o.status.success());
    assert!(last_line(&o).starts_with("RESULT status=PASS command=probe"));
    let text = std::fs::read_to_string(dir.path().join("out/probe.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,bound,best_ratio,trials,seed,pass"));
    assert!(lines.next().unwrap().ends_with(",true"));
}

#[test]
fn mc_on_unit_atom_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["mc", "--config", config("unit-atom.toml").to_str().unwrap(), "--paths", "20000"],
        dir.path(),
    );
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "{stdout}");
    assert!(stdout.lines().any(|l| l.starts_with("PASS pairing ")));
    assert!(last_line(&o).starts_with("RESULT status=PASS command=mc"));
}

#[test]
fn outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("two-atoms.toml");
    let cfg = cfg.to_str().unwrap();
    for (cmd, file) in [("mc", "report.csv"), ("symbol", "symbol.csv")] {
        let a = dir.path().join(format!("{cmd}-a"));
        let b = dir.path().join(format!("{cmd}-b"));
        assert!(run(&[cmd, "--config", cfg, "--paths", "3000"], &a).status.success());
        assert!(run(&[cmd, "--config", cfg, "--paths", "3000"], &b).status.success());
        assert_eq!(std::fs::read(a.join(file)).unwrap(), std::fs::read(b.join(file)).unwrap());
    }
    let c = dir.path().join("mc-c");
    run(&["mc", "--config", cfg, "--paths", "3000", "--seed", "99"], &c);
    assert_ne!(
        std::fs::read(dir.path().join("mc-a/report.csv")).unwrap(),
        std::fs::read(c.join("report.csv")).unwrap()
    );
    let echoed = std::fs::read_to_string(c.join("config.toml")).unwrap();
    assert!(echoed.contains("seed = 99"));
}

#[test]
fn unknown_key_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "d = 1\nn = 1\na = [[1.0]]\nb = [[1.0]]\nfooo = 2\n");
    let o = run(&["symbol", "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    let last = last_line(&o);
    assert!(last.starts_with("RESULT status=ERROR code="), "{last}");
    assert!(last.contains("fooo"));
}

#[test]
fn oversized_modulator_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "d = 1\nn = 1\na = [[1.0]]\nb = [[1.0]]\n[measure]\nkind = \"atoms\"\natoms = [{ z = [1.0], w = 1.0 }]\n[modulator.phi]\nkind = \"table\"\nvalues = [[0.0, 1.5]]\n",
    );
    let o = run(&["symbol", "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert!(!o.status.success());
    assert!(last_line(&o).starts_with("RESULT status=ERROR"));
}

#[test]
fn missing_config_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["symbol", "--config", "/nonexistent/levymult.toml"], dir.path());
    assert!(!o.status.success());
    assert!(last_line(&o).starts_with("RESULT status=ERROR"));
}

#[test]
fn selftest_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["selftest", "--config", config("unit-atom.toml").to_str().unwrap()], dir.path());
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "{stdout}");
    assert!(!stdout.lines().any(|l| l.starts_with("FAIL")));
}

#[test]
fn apply_writes_a_field() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["apply", "--config", config("riesz.toml").to_str().unwrap()], dir.path());
    assert!(o.status.success());
    let field = levymult::io::read_field(&mut std::fs::File::open(dir.path().join("field.lmfield")).unwrap()).unwrap();
    assert_eq!(field.grid.points, vec![64, 64]);
}
