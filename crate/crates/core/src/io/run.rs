//! Command dispatch shared by the binary and the tests.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;

use super::config::{emit_config, RunConfig};
use super::files::{write_field, write_field_csv, write_grid, write_grid_csv, write_probe_csv};
use crate::error::{Error, Result};
use crate::mc::{
    brownian_pairing, burkholder_check, estimate_pairing_with, gaussian_qv_gap, lp_isometry, martingale_check,
    subordination_check, JumpEngine, McOptions, Report, ReportRow, Stat,
};
use crate::spectral::{apply_multiplier, norm_probe, pairing, PAIRING_TOL};
use crate::symbol::evaluate_grid;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Symbol,
    Apply,
    Pair,
    Probe,
    Mc,
    GaussianMc,
    Selftest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Symbol => "symbol",
            Command::Apply => "apply",
            Command::Pair => "pair",
            Command::Probe => "probe",
            Command::Mc => "mc",
            Command::GaussianMc => "gaussian-mc",
            Command::Selftest => "selftest",
        }
    }
}

/// Checks performed by a command, and the files it wrote.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub report: Report,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        self.report.all_pass()
    }
}

fn create(dir: &Path, name: &str, files: &mut Vec<PathBuf>) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let f = File::create(&path)?;
    files.push(path);
    Ok(BufWriter::new(f))
}

fn check(name: &str, pass: bool, value: C64, reference: Option<C64>, note: String) -> ReportRow {
    ReportRow {
        name: name.into(),
        estimate: value,
        se_re: 0.0,
        se_im: 0.0,
        reference,
        pass,
        note,
    }
}

fn within(stat: &Stat, target: C64) -> bool {
    stat.consistent_with(target, 3.0)
}

/// Runs `cmd` and writes its artifacts under `cfg.out`. Check failures are
/// reported in the outcome; errors abort.
pub fn run_command(cmd: Command, cfg: &RunConfig) -> Result<Outcome> {
    let dir = PathBuf::from(&cfg.out);
    fs::create_dir_all(&dir)?;
    let mut out = Outcome::default();
    fs::write(dir.join("config.toml"), emit_config(cfg))?;
    out.files.push(dir.join("config.toml"));
    match cmd {
        Command::Symbol => {
            let spec = cfg.symbol_spec()?;
            let m = evaluate_grid(&spec, &cfg.grid()?)?;
            write_grid_csv(create(&dir, "symbol.csv", &mut out.files)?, &m)?;
            write_grid(create(&dir, "symbol.lmgrid", &mut out.files)?, &m)?;
            out.report.push(check(
                "symbol-bound",
                m.max_abs <= 1.0 + crate::symbol::SYMBOL_BOUND_TOL,
                C64::new(m.max_abs, 0.0),
                None,
                format!("form={} argmax={:?}", spec.name(), m.argmax),
            ));
        }
        Command::Apply => {
            let m = evaluate_grid(&cfg.symbol_spec()?, &cfg.grid()?)?;
            let mf = apply_multiplier(&m, &cfg.field_f()?)?;
            write_field(create(&dir, "field.lmfield", &mut out.files)?, &mf)?;
            write_field_csv(create(&dir, "field.csv", &mut out.files)?, &mf)?;
            out.report.push(check("apply", true, C64::new(crate::spectral::lp_norm(&mf, 2.0), 0.0), None, "value is ‖Mf‖₂".into()));
        }
        Command::Pair => {
            let m = evaluate_grid(&cfg.symbol_spec()?, &cfg.grid()?)?;
            let (f, g) = (cfg.field_f()?, cfg.field_g()?);
            let (pass, p) = match pairing(&m, &f, &g) {
                Ok(p) => (true, p),
                Err(Error::PairingMismatch { spatial, spectral }) => (false, crate::spectral::Pairing { spatial, spectral }),
                Err(e) => return Err(e),
            };
            let mut w = csv::Writer::from_writer(create(&dir, "pair.csv", &mut out.files)?);
            w.write_record(["re_spatial", "im_spatial", "re_spectral", "im_spectral"])?;
            w.write_record([p.spatial.re, p.spatial.im, p.spectral.re, p.spectral.im].map(super::fmt17))?;
            w.flush()?;
            out.report.push(check("pairing", pass, p.spatial, Some(p.spectral), format!("tolerance {PAIRING_TOL:e}·‖f‖₂‖g‖₂")));
        }
        Command::Probe => {
            let m = evaluate_grid(&cfg.symbol_spec()?, &cfg.grid()?)?;
            let reports: Vec<_> = cfg.probe.p.iter().map(|&p| norm_probe(&m, p, cfg.probe.trials, cfg.seed)).collect();
            write_probe_csv(create(&dir, "probe.csv", &mut out.files)?, &reports)?;
            for r in &reports {
                out.report.push(check(
                    &format!("probe-p{}", r.p),
                    r.pass,
                    C64::new(r.best_ratio, 0.0),
                    Some(C64::new(r.bound, 0.0)),
                    r.descriptor.clone(),
                ));
            }
        }
        Command::Mc => mc_report(cfg, &mut out.report)?,
        Command::GaussianMc => gaussian_report(cfg, &mut out.report)?,
        Command::Selftest => out.report = crate::selftest::selftest(cfg.seed),
    }
    fs::write(dir.join("report.txt"), out.report.to_text())?;
    out.files.push(dir.join("report.txt"));
    out.report.write_csv(create(&dir, "report.csv", &mut out.files)?)?;
    Ok(out)
}

fn probe_points(d: usize) -> Vec<Vec<f64>> {
    [-1.0, 0.0, 1.0]
        .iter()
        .map(|&v| {
            let mut x = vec![0.0; d];
            x[0] = v;
            x
        })
        .collect()
}

fn mc_report(cfg: &RunConfig, report: &mut Report) -> Result<()> {
    let problem = cfg.jump_problem()?;
    let engine = JumpEngine::new(&problem)?;
    let reference = problem.spectral_pairing()?;
    let opts = McOptions {
        paths: cfg.mc.paths,
        seed: cfg.seed,
        x_rule: cfg.x_rule(),
        nodes: cfg.mc.nodes,
    };
    let est = estimate_pairing_with(&engine, &opts)?;
    report.push(
        ReportRow::from_stat("pairing", &est.product, Some(reference), within(&est.product, reference))
            .with_note(format!("nodes={}", est.nodes)),
    );
    report.push(ReportRow::from_stat("covariation-route", &est.covariation, Some(reference), within(&est.covariation, reference)));
    report.push(ReportRow::from_stat("route-difference", &est.difference, Some(C64::new(0.0, 0.0)), est.routes_agree));

    let checks = cfg.mc.check_paths;
    let xs = probe_points(problem.f.grid.d());
    for (x, (df, g)) in xs.iter().zip(martingale_check(&engine, &xs, checks, cfg.seed, est.nodes)) {
        let zero = C64::new(0.0, 0.0);
        report.push(ReportRow::from_stat(format!("martingale-F x={x:?}"), &df, Some(zero), within(&df, zero)));
        report.push(ReportRow::from_stat(format!("martingale-G x={x:?}"), &g, Some(zero), within(&g, zero)));
    }
    for c in lp_isometry(&engine, &[1.5, 2.0, 3.0], checks, cfg.seed) {
        report.push(ReportRow::from_stat(format!("isometry p={}", c.p), &c.estimate, Some(C64::new(c.exact, 0.0)), c.pass));
    }
    let sub = subordination_check(&engine, checks, cfg.seed, cfg.mc.stride)?;
    report.push(check(
        "subordination",
        sub.violations == 0,
        C64::new(sub.violations as f64, 0.0),
        Some(C64::new(0.0, 0.0)),
        format!("jumps={} comparisons={} max_excess={:e}", sub.jumps, sub.comparisons, sub.max_violation),
    ));
    for q in [2.0, 3.0] {
        for b in burkholder_check(&engine, q, &xs[1..2], checks, cfg.seed, est.nodes, cfg.mc.stride)? {
            let at = b.x.as_ref().map(|x| format!("{x:?}")).unwrap_or_else(|| "integrated".into());
            report.push(
                ReportRow::from_stat(format!("burkholder q={q} x={at}"), &b.gap, None, b.pass)
                    .with_note(format!("lhs={:.6e} rhs={:.6e}", b.lhs, b.rhs)),
            );
        }
    }
    Ok(())
}

/// Bounds on successive RMS ratios of the QV gap when the step halves;
/// the gap scales like √h, so the ideal ratio is 1/√2.
pub const QV_RATIO_RANGE: (f64, f64) = (0.5, 0.9);

fn gaussian_report(cfg: &RunConfig, report: &mut Report) -> Result<()> {
    let problem = cfg.gaussian_problem()?;
    let reference = problem.spectral_pairing()?;
    let est = brownian_pairing(&problem, cfg.brownian.paths, cfg.brownian.steps, cfg.seed)?;
    report.push(
        ReportRow::from_stat("brownian-pairing", &est.product, Some(reference), within(&est.product, reference))
            .with_note(format!("steps={} richardson={:.3e}", est.steps, est.richardson.mean.norm())),
    );
    let s = cfg.brownian.steps;
    let levels = [s / 4, s / 2, s];
    let gaps = gaussian_qv_gap(&problem, 200, &levels, cfg.seed)?;
    let mut pass = true;
    let mut note = String::new();
    for w in gaps.windows(2) {
        let r = w[1].1 / w[0].1;
        pass &= (QV_RATIO_RANGE.0..=QV_RATIO_RANGE.1).contains(&r) || w[0].1 == 0.0 && w[1].1 == 0.0;
        note.push_str(&format!("{}→{}: {r:.3} ", w[0].0, w[1].0));
    }
    report.push(check("qv-gap-ratio", pass, C64::new(gaps[2].1, 0.0), None, note.trim_end().to_string()));
    Ok(())
}
