//! Invariant suite behind `levymult selftest`, at desk scale.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::levy::{self, Atom, JumpModulator, LevyData, LevyMeasure, Modulator, SphereModulator};
use crate::mc::{
    self, estimate_pairing, pairing_matrix, subordination_check, Compensator, JumpEngine, JumpProblem, McOptions,
    Report, ReportRow, XRule,
};
use crate::spectral::{norm_probe, pairing, SampledField, PROBE_SLACK};
use crate::symbol::{
    self, evaluate_grid, symbol_gaussian_limit, symbol_integral, symbol_q, symbol_stable, GridSpec, Preset,
    SymbolSpec,
};

fn row(name: &str, outcome: Result<(bool, f64)>, what: &str) -> ReportRow {
    match outcome {
        Ok((pass, value)) => ReportRow {
            name: name.into(),
            estimate: C64::new(value, 0.0),
            se_re: 0.0,
            se_im: 0.0,
            reference: None,
            pass,
            note: what.into(),
        },
        Err(e) => ReportRow {
            name: name.into(),
            estimate: C64::new(f64::NAN, 0.0),
            se_re: 0.0,
            se_im: 0.0,
            reference: None,
            pass: false,
            note: format!("error {}: {e}", e.code()),
        },
    }
}

fn table(values: Vec<C64>) -> Modulator {
    Modulator {
        phi: JumpModulator::Table {
            values,
            elsewhere: None,
        },
        psi: SphereModulator::Table(Vec::new()),
    }
}

/// Atomic configurations shared by the symbol checks.
pub fn symbol_configs() -> Vec<(&'static str, LevyData, Modulator)> {
    let single = symbol::single_atom_data();
    let mut two = LevyData::with_measure(1, LevyMeasure::Atoms(vec![Atom::new(vec![1.0], 0.7), Atom::new(vec![-2.0], 0.3)]));
    two.b = DMatrix::from_element(1, 1, -1.0);
    let mut plane = LevyData::with_measure(
        2,
        LevyMeasure::Atoms(vec![
            Atom::new(vec![1.0, 0.0], 1.0),
            Atom::new(vec![0.0, -1.0], 0.6),
            Atom::new(vec![0.7, 0.7], 0.5),
        ]),
    );
    plane.b = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    plane.gamma = vec![0.2, -0.1];
    vec![
        ("single-atom", single, Modulator::identity()),
        ("two-atoms", two, table(vec![C64::new(0.5, 0.0), C64::new(0.0, -0.8)])),
        (
            "plane",
            plane,
            table(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.9), C64::new(-0.5, -0.5)]),
        ),
    ]
}

fn q_vs_integral(seed: u64, points: usize) -> Result<(bool, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for (_, data, m) in symbol_configs() {
        for _ in 0..points {
            let xi: Vec<f64> = (0..data.d).map(|_| rng.random_range(-6.0..6.0)).collect();
            let (a, b) = (symbol_q(&data, &m, &xi)?, symbol_integral(&data, &m, &xi)?);
            worst = worst.max((a - b).norm());
        }
    }
    Ok((worst <= 1e-10, worst))
}

fn bounds() -> Result<(bool, f64)> {
    let line = GridSpec::cube(1, 16.0, 128)?;
    let plane = GridSpec::cube(2, 12.0, 32)?;
    let mut specs: Vec<(SymbolSpec, &GridSpec)> = symbol_configs()
        .into_iter()
        .map(|(_, data, modulator)| {
            let g = if data.d == 1 { &line } else { &plane };
            (SymbolSpec::QForm { data, modulator, u: 1.0 }, g)
        })
        .collect();
    specs.push((SymbolSpec::StableClosedForm { alpha: 0.5 }, &line));
    specs.push((
        SymbolSpec::GaussianForm {
            a: DMatrix::identity(2, 2),
            b: DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]),
            k: DMatrix::from_row_slice(2, 2, &[C64::new(0.0, 1.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.0)]),
            scale: 1.0,
        },
        &plane,
    ));
    for preset in [Preset::Log, Preset::Riesz] {
        specs.push((SymbolSpec::NamedPreset { preset, d: 2, j: 1, k: 2 }, &plane));
    }
    let mut worst: f64 = 0.0;
    for (spec, grid) in &specs {
        worst = worst.max(evaluate_grid(spec, grid)?.max_abs);
    }
    Ok((worst <= 1.0 + symbol::SYMBOL_BOUND_TOL, worst))
}

fn alpha_one() -> Result<(bool, f64)> {
    let mut worst: f64 = 0.0;
    for alpha in [1.0 - 1e-3, 1.0 + 1e-3] {
        for xi in [0.5, 1.0, 2.0] {
            let lim = C64::new(0.0, 4.0 * std::f64::consts::LN_2 / std::f64::consts::PI * xi * (-2.0 * xi).exp());
            worst = worst.max((symbol_stable(alpha, xi)? - lim).norm() / lim.norm());
        }
    }
    Ok((worst < 5e-3, worst))
}

fn riesz_identity() -> Result<(bool, f64)> {
    let mut k = DMatrix::from_element(2, 2, C64::new(0.0, 0.0));
    k[(0, 1)] = C64::new(-1.0, 0.0);
    k[(1, 0)] = C64::new(-1.0, 0.0);
    let mut worst: f64 = 0.0;
    for xi in [[1.0, 2.0], [-0.3, 0.7], [5.0, -1.0]] {
        let m = symbol_gaussian_limit(&DMatrix::identity(2, 2), &k, &xi)?;
        let want = -2.0 * xi[0] * xi[1] / (xi[0] * xi[0] + xi[1] * xi[1]);
        worst = worst.max((m - C64::new(want, 0.0)).norm());
    }
    Ok((worst <= 1e-15, worst))
}

fn pairing_agreement() -> Result<(bool, f64)> {
    let grid = GridSpec::cube(1, 16.0, 128)?;
    let m = evaluate_grid(&SymbolSpec::StableClosedForm { alpha: 0.5 }, &grid)?;
    let f = SampledField::gaussian(grid.clone(), &[0.0], 1.0)?;
    let g = SampledField::gaussian(grid, &[0.5], 0.7)?;
    let p = pairing(&m, &f, &g)?;
    Ok((true, (p.spatial - p.spectral).norm()))
}

fn plancherel(seed: u64) -> Result<(bool, f64)> {
    let grid = GridSpec::cube(1, 16.0, 64)?;
    let (_, data, modulator) = symbol_configs().swap_remove(1);
    let m = evaluate_grid(&SymbolSpec::QForm { data, modulator, u: 1.0 }, &grid)?;
    let r = norm_probe(&m, 2.0, 40, seed);
    Ok((r.best_ratio <= 1.0 + PROBE_SLACK, r.best_ratio))
}

fn rejects_origin_atom() -> Result<(bool, f64)> {
    let data = LevyData::with_measure(1, LevyMeasure::Atoms(vec![Atom::new(vec![0.0], 1.0)]));
    Ok((matches!(data.validate(), Err(Error::AtomAtOrigin { index: 0 })), 0.0))
}

fn exponent_signs(seed: u64) -> Result<(bool, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let stable = LevyData::with_measure(1, LevyMeasure::ClosedFormStable { alpha: 0.5, dim: 1 });
    let mut all: Vec<LevyData> = symbol_configs().into_iter().map(|c| c.1).collect();
    all.push(stable);
    for data in &all {
        worst = worst.max(levy::psi(data, &vec![0.0; data.n])?.norm());
        for _ in 0..20 {
            let z: Vec<f64> = (0..data.n).map(|_| rng.random_range(-10.0..10.0)).collect();
            worst = worst.max(levy::psi(data, &z)?.re);
        }
    }
    Ok((worst <= 1e-14, worst))
}

fn jump_count(seed: u64) -> Result<(bool, f64)> {
    let cp = mc::CompoundPoisson::new(&[Atom::new(vec![1.0], 2.0)])?;
    let n = 20_000;
    let total: usize = (0..n).map(|p| cp.sample(&mut mc::path_rng(seed, p)).len()).sum();
    let mean = total as f64 / n as f64;
    Ok(((mean - 2.0).abs() <= 3.0 * (2.0f64 / n as f64).sqrt(), mean))
}

fn unit_engine() -> Result<JumpEngine> {
    let cfg = pairing_matrix().swap_remove(1);
    JumpEngine::new(&cfg.problem)
}

fn unit_modulator(seed: u64) -> Result<(bool, f64)> {
    let engine = unit_engine()?;
    let mut worst: f64 = 0.0;
    for p in 0..50 {
        let path = engine.sample_path(seed, p);
        let w = engine.walk(&path, &Compensator::nodes(mc::DEFAULT_NODES), true, |_| {});
        for k in 0..w.g1.len() {
            worst = worst.max((w.g1[k] - (w.fg1[k] - engine.pg.start[k])).norm());
        }
    }
    Ok((worst <= 1e-8, worst))
}

fn subordination(seed: u64) -> Result<(bool, f64)> {
    let s = subordination_check(&unit_engine()?, 2000, seed, 4)?;
    Ok((s.violations == 0, s.max_violation))
}

fn small_pairing(seed: u64) -> Result<(bool, f64)> {
    let cfg = pairing_matrix().swap_remove(0);
    let problem: JumpProblem = cfg.problem;
    let reference = problem.spectral_pairing()?;
    let est = estimate_pairing(
        &problem,
        &McOptions {
            paths: 20_000,
            seed,
            x_rule: XRule::default(),
            nodes: mc::DEFAULT_NODES,
        },
    )?;
    let z = (est.product.mean - reference).norm() / est.product.joint_se();
    Ok((z <= 3.0 && est.routes_agree, z))
}

fn file_round_trip() -> Result<(bool, f64)> {
    let grid = GridSpec::new(vec![4.0, 2.0], vec![8, 4])?;
    let f = SampledField::from_fn(grid, |x| C64::new(x[0].sin(), x[1]))?;
    let mut buf = Vec::new();
    crate::io::write_field(&mut buf, &f)?;
    Ok((crate::io::read_field(&buf[..])? == f, buf.len() as f64))
}

/// Runs every check; a check that errors counts as a failure.
pub fn selftest(seed: u64) -> Report {
    let mut r = Report::default();
    let checks: Vec<(&str, Result<(bool, f64)>, &str)> = vec![
        ("levy-origin-atom", rejects_origin_atom(), "atom at the origin is rejected"),
        ("levy-exponent-sign", exponent_signs(seed), "Ψ(0) = 0 and Re Ψ ≤ 0"),
        ("symbol-bound", bounds(), "max |m| over default grids"),
        ("symbol-q-vs-integral", q_vs_integral(seed, 50), "max gap over random ξ"),
        ("symbol-alpha-one", alpha_one(), "relative gap to the α = 1 limit"),
        ("symbol-riesz-limit", riesz_identity(), "Gaussian limit against −2ξ₁ξ₂/|ξ|²"),
        ("spectral-pairing", pairing_agreement(), "spatial minus spectral pairing"),
        ("spectral-plancherel", plancherel(seed), "best L² ratio"),
        ("mc-jump-count", jump_count(seed), "mean number of jumps, intensity 2"),
        ("mc-unit-modulator", unit_modulator(seed), "G(φ≡1) against F₁ − F₀"),
        ("mc-subordination", subordination(seed), "largest |ΔG|² − |ΔF|²"),
        ("mc-pairing", small_pairing(seed), "|MC − spectral| in joint standard errors"),
        ("io-field-round-trip", file_round_trip(), "bytes written"),
    ];
    for (name, outcome, what) in checks {
        r.push(row(name, outcome, what));
    }
    r
}
