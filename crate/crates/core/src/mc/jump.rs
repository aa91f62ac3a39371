//! Martingales driven by compound Poisson paths.

use num_complex::Complex64 as C64;
use rand::Rng;

use super::modes::{ModeSet, Propagator, SubGrid};
use super::path::{path_rng, CompoundPoisson, JumpPath};
use super::stats::{run_chunked, Accum, Stat};
use crate::error::{Error, Result};
use crate::levy::{self, Atom, JumpModulator, LevyData, LevyMeasure};
use crate::quad::GaussLegendre;
use crate::spectral::{lp_norm, SampledField};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Default Gauss–Legendre nodes per inter-jump interval.
pub const DEFAULT_NODES: usize = 8;
/// Node doubling stops once G₁ moves by less than this.
pub const NODE_TOL: f64 = 1e-8;
const MAX_NODES: usize = 64;
const CALIBRATION_PATHS: usize = 64;

/// How the x-integral in Λ = ∫ E F₁G₁ dx is discretized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XRule {
    /// Every `stride`-th grid point with weight (stride·Δx)^d.
    SubGrid { stride: usize },
    /// Exact integral of the band-limited product (Parseval).
    Spectral,
}

impl Default for XRule {
    fn default() -> Self {
        XRule::SubGrid { stride: 4 }
    }
}

/// Time integral of the compensator on each inter-jump interval.
#[derive(Clone, Debug)]
pub enum Compensator {
    GaussLegendre(GaussLegendre),
    /// Closed form ∫_0^Δ e^{−uλ} du = Δ q(−Δλ); the integrand is exponential
    /// in time between jumps.
    Exact,
}

impl Compensator {
    pub fn nodes(n: usize) -> Self {
        Compensator::GaussLegendre(GaussLegendre::new(n))
    }

    fn weight(&self, rate: C64, len: f64) -> C64 {
        match self {
            Compensator::GaussLegendre(rule) => rule
                .mapped(0.0, len)
                .map(|(u, w)| (-rate * u).exp() * w)
                .sum(),
            Compensator::Exact => crate::symbol::q_func(-rate * len) * len,
        }
    }
}

/// Inputs of the jump-branch verification.
#[derive(Clone, Debug)]
pub struct JumpProblem {
    pub data: LevyData,
    pub phi: JumpModulator,
    pub f: SampledField,
    pub g: SampledField,
}

/// Quantities at one jump of the path, as coefficient vectors.
pub struct JumpEvent<'a> {
    pub time: f64,
    pub atom: usize,
    /// F_{t−}
    pub f_left: &'a [C64],
    /// ΔF
    pub df: &'a [C64],
    /// ΔG = φ(z)·(jump of P^B g)
    pub dg: &'a [C64],
}

/// Coefficients at time 1.
pub struct Walk {
    pub f1: Vec<C64>,
    /// F₁(·; g, B)
    pub fg1: Vec<C64>,
    pub g1: Vec<C64>,
}

/// Precomputed transport of f through A and g through B.
pub struct JumpEngine {
    pub modes: ModeSet,
    pub pf: Propagator,
    pub pg: Propagator,
    pub sampler: CompoundPoisson,
    pub drift: Vec<f64>,
    pub phi: Vec<C64>,
    /// χ_k = Σ_a w_a φ_a (e^{−i(Bᵀξ_k, z_a)} − 1)
    chi: Vec<C64>,
    chi_one: Vec<C64>,
    f: SampledField,
    g: SampledField,
}

fn compensator_multiplier(atoms: &[Atom], pg: &Propagator, phi: &[C64]) -> Vec<C64> {
    (0..pg.len())
        .map(|k| {
            atoms
                .iter()
                .enumerate()
                .map(|(a, atom)| (pg.jump[a][k] - 1.0) * phi[a] * atom.w)
                .sum()
        })
        .collect()
}

impl JumpEngine {
    pub fn new(problem: &JumpProblem) -> Result<Self> {
        let data = &problem.data;
        data.validate()?;
        let atoms = match &data.nu {
            LevyMeasure::Atoms(a) => a.clone(),
            _ => return Err(Error::RequiresFiniteMeasure),
        };
        if !data.mu.is_empty() {
            return Err(Error::invalid(
                "jump simulation needs μ = 0; move the Gaussian part onto atoms with approximate()",
            ));
        }
        let modulator = levy::Modulator {
            phi: problem.phi.clone(),
            psi: levy::SphereModulator::Table(Vec::new()),
        };
        modulator.validate(data)?;
        let phi = atoms
            .iter()
            .enumerate()
            .map(|(i, a)| problem.phi.at_atom(i, &a.z))
            .collect::<Result<Vec<_>>>()?;
        let (_, drift) = levy::drift_reduce(data)?;
        let (modes, mut coeffs) = ModeSet::from_fields(&[&problem.f, &problem.g])?;
        let cg = coeffs.pop().expect("two fields");
        let cf = coeffs.pop().expect("two fields");
        let pf = Propagator::new(&modes, cf, &data.a, data, &atoms, &drift)?;
        let pg = Propagator::new(&modes, cg, &data.b, data, &atoms, &drift)?;
        let chi = compensator_multiplier(&atoms, &pg, &phi);
        let chi_one = compensator_multiplier(&atoms, &pg, &vec![ONE; atoms.len()]);
        Ok(Self {
            sampler: CompoundPoisson::new(&atoms)?,
            modes,
            pf,
            pg,
            drift,
            phi,
            chi,
            chi_one,
            f: problem.f.clone(),
            g: problem.g.clone(),
        })
    }

    pub fn atoms(&self) -> &[Atom] {
        self.sampler.atoms()
    }

    pub fn sample_path(&self, seed: u64, index: u64) -> JumpPath {
        self.sampler.sample(&mut path_rng(seed, index))
    }

    /// Carries F(·; f, A), F(·; g, B) and G(·; g, B, φ) through the path.
    /// With `unit_phi` the modulator is replaced by φ ≡ 1.
    pub fn walk<C>(&self, path: &JumpPath, comp: &Compensator, unit_phi: bool, mut on_jump: C) -> Walk
    where
        C: FnMut(&JumpEvent),
    {
        let k = self.modes.len();
        let chi = if unit_phi { &self.chi_one } else { &self.chi };
        let mut a = self.pf.start.clone();
        let mut b = self.pg.start.clone();
        let mut gh = vec![ZERO; k];
        let mut df = vec![ZERO; k];
        let mut dg = vec![ZERO; k];
        let mut t = 0.0;
        let stops = path.times.iter().map(|&s| (s, true)).chain(std::iter::once((1.0, false)));
        for (i, (s, is_jump)) in stops.enumerate() {
            let len = s - t;
            if len > 0.0 {
                for j in 0..k {
                    if chi[j] != ZERO {
                        gh[j] -= chi[j] * b[j] * comp.weight(self.pg.rate[j], len);
                    }
                    a[j] *= (-self.pf.rate[j] * len).exp();
                    b[j] *= (-self.pg.rate[j] * len).exp();
                }
            }
            t = s;
            if !is_jump {
                break;
            }
            let atom = path.marks[i];
            let p = if unit_phi { ONE } else { self.phi[atom] };
            for j in 0..k {
                df[j] = a[j] * (self.pf.jump[atom][j] - 1.0);
                dg[j] = b[j] * (self.pg.jump[atom][j] - 1.0) * p;
            }
            on_jump(&JumpEvent {
                time: s,
                atom,
                f_left: &a,
                df: &df,
                dg: &dg,
            });
            for j in 0..k {
                gh[j] += dg[j];
                a[j] += df[j];
                b[j] *= self.pg.jump[atom][j];
            }
        }
        Walk {
            f1: a,
            fg1: b,
            g1: gh,
        }
    }

    /// Doubles the compensator nodes, starting from `nodes`, until G₁ is
    /// stable to 1e-8 on the first calibration paths.
    pub fn calibrate_nodes(&self, nodes: usize, seed: u64) -> Result<usize> {
        let mut n = nodes.max(1);
        loop {
            let (lo, hi) = (Compensator::nodes(n), Compensator::nodes(2 * n));
            let mut change: f64 = 0.0;
            for p in 0..CALIBRATION_PATHS {
                let path = self.sample_path(seed, p as u64);
                let g1 = self.walk(&path, &lo, false, |_| {}).g1;
                let g2 = self.walk(&path, &hi, false, |_| {}).g1;
                // Σ|ΔĜ_k| bounds sup_x |ΔG₁(x)|
                change = change.max(g1.iter().zip(&g2).map(|(x, y)| (x - y).norm()).sum());
            }
            if change <= NODE_TOL {
                return Ok(n);
            }
            if 2 * n > MAX_NODES {
                return Err(Error::QuadratureNodesInsufficient { change });
            }
            log::warn!("compensator quadrature: {n} nodes moved G₁ by {change:.2e}; doubling");
            n *= 2;
        }
    }

    /// Value of a coefficient vector at x.
    pub fn at(&self, coeffs: &[C64], x: &[f64]) -> C64 {
        self.modes.eval(coeffs, x)
    }

    pub fn f(&self) -> &SampledField {
        &self.f
    }

    pub fn g(&self) -> &SampledField {
        &self.g
    }
}

/// Values of one martingale along a path at a fixed x.
#[derive(Clone, Debug, PartialEq)]
pub struct MartingaleTrace {
    pub x: Vec<f64>,
    pub start: C64,
    pub times: Vec<f64>,
    pub left: Vec<C64>,
    pub right: Vec<C64>,
    pub end: C64,
    /// [·,·] after the start and after each jump; F carries |F₀|² as head start.
    pub qv: Vec<f64>,
    pub covariation: Option<C64>,
}

impl MartingaleTrace {
    pub fn increments(&self) -> Vec<C64> {
        self.left.iter().zip(&self.right).map(|(l, r)| r - l).collect()
    }

    /// Σ ΔX ΔY over common jumps (bilinear, no conjugation).
    pub fn covariation_with(&mut self, other: &MartingaleTrace) -> Result<C64> {
        if self.times != other.times {
            return Err(Error::TraceMismatch("traces jump at different times".into()));
        }
        let c = self.increments().iter().zip(other.increments()).map(|(a, b)| a * b).sum();
        self.covariation = Some(c);
        Ok(c)
    }

    pub fn final_qv(&self) -> f64 {
        *self.qv.last().expect("trace has a start entry")
    }
}

fn build_trace(x: &[f64], start: C64, mut events: Vec<(f64, C64, C64)>, end: C64, head_start: bool) -> MartingaleTrace {
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut qv = vec![if head_start { start.norm_sqr() } else { 0.0 }];
    for (_, l, r) in &events {
        let last = *qv.last().expect("non-empty");
        qv.push(last + (r - l).norm_sqr());
    }
    MartingaleTrace {
        x: x.to_vec(),
        start,
        times: events.iter().map(|e| e.0).collect(),
        left: events.iter().map(|e| e.1).collect(),
        right: events.iter().map(|e| e.2).collect(),
        end,
        qv,
        covariation: None,
    }
}

impl JumpEngine {
    /// F_t(x; f, A) = P^A_{1−t} f(x + AY_t) along the path.
    pub fn parabolic_trace(&self, path: &JumpPath, x: &[f64]) -> MartingaleTrace {
        let mut ev = Vec::new();
        let w = self.walk(path, &Compensator::Exact, false, |e| {
            let l = self.at(e.f_left, x);
            ev.push((e.time, l, l + self.at(e.df, x)));
        });
        build_trace(x, self.at(&self.pf.start, x), ev, self.at(&w.f1, x), true)
    }

    /// F_t(x; g, B) along the path.
    pub fn parabolic_trace_g(&self, path: &JumpPath, x: &[f64]) -> MartingaleTrace {
        let pg = &self.pg;
        let mut b = pg.start.clone();
        let mut t = 0.0;
        let mut ev = Vec::with_capacity(path.len());
        for (&s, &atom) in path.times.iter().zip(&path.marks) {
            for (j, bj) in b.iter_mut().enumerate() {
                *bj *= (-pg.rate[j] * (s - t)).exp();
            }
            t = s;
            let l = self.at(&b, x);
            for (j, bj) in b.iter_mut().enumerate() {
                *bj *= pg.jump[atom][j];
            }
            ev.push((s, l, self.at(&b, x)));
        }
        for (j, bj) in b.iter_mut().enumerate() {
            *bj *= (-pg.rate[j] * (1.0 - t)).exp();
        }
        build_trace(x, self.at(&pg.start, x), ev, self.at(&b, x), true)
    }

    /// G_t(x; g, B, φ): modulated jumps minus the compensator.
    pub fn general_trace(&self, path: &JumpPath, x: &[f64], comp: &Compensator) -> MartingaleTrace {
        let mut ev = Vec::new();
        let k = self.modes.len();
        let chi = &self.chi;
        // G between jumps moves by the compensator only; track it in coefficients
        let mut gh = vec![ZERO; k];
        let mut b = self.pg.start.clone();
        let mut t = 0.0;
        for (i, &s) in path.times.iter().chain(std::iter::once(&1.0)).enumerate() {
            let len = s - t;
            for j in 0..k {
                if chi[j] != ZERO && len > 0.0 {
                    gh[j] -= chi[j] * b[j] * comp.weight(self.pg.rate[j], len);
                }
                b[j] *= (-self.pg.rate[j] * len).exp();
            }
            t = s;
            if i == path.len() {
                break;
            }
            let atom = path.marks[i];
            let l = self.at(&gh, x);
            for j in 0..k {
                gh[j] += b[j] * (self.pg.jump[atom][j] - 1.0) * self.phi[atom];
                b[j] *= self.pg.jump[atom][j];
            }
            ev.push((s, l, self.at(&gh, x)));
        }
        build_trace(x, ZERO, ev, self.at(&gh, x), false)
    }
}

/// F(x; f, A) along `path`, for callers without an engine.
pub fn parabolic_f(path: &JumpPath, f: &SampledField, a: &nalgebra::DMatrix<f64>, data: &LevyData, x: &[f64]) -> Result<MartingaleTrace> {
    let mut d = data.clone();
    d.a = a.clone();
    d.b = a.clone();
    let engine = JumpEngine::new(&JumpProblem {
        data: d,
        phi: JumpModulator::Constant(ONE),
        f: f.clone(),
        g: f.clone(),
    })?;
    Ok(engine.parabolic_trace(path, x))
}

/// G(x; g, B, φ) along `path` with 8-node compensator quadrature.
pub fn general_g(
    path: &JumpPath,
    g: &SampledField,
    b: &nalgebra::DMatrix<f64>,
    phi: &JumpModulator,
    data: &LevyData,
    x: &[f64],
) -> Result<MartingaleTrace> {
    let mut d = data.clone();
    d.a = b.clone();
    d.b = b.clone();
    let engine = JumpEngine::new(&JumpProblem {
        data: d,
        phi: phi.clone(),
        f: g.clone(),
        g: g.clone(),
    })?;
    Ok(engine.general_trace(path, x, &Compensator::nodes(DEFAULT_NODES)))
}

/// Outcome of the per-jump comparison of [G,G] against [F,F].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Subordination {
    pub holds: bool,
    pub violations: usize,
    /// max over jumps of |ΔG|² − |ΔF|², and of [G,G] − [F,F]
    pub max_violation: f64,
}

/// Relative rounding allowance in the per-jump comparison.
const SUBORDINATION_ROUNDING: f64 = 1e-12;

/// Checks that every jump of [G,G] is at most the matching jump of [F,F]
/// and that [F,F] − [G,G] ≥ 0 throughout, head start included.
pub fn check_subordination(f: &MartingaleTrace, g: &MartingaleTrace) -> Result<Subordination> {
    if f.times != g.times || f.x != g.x {
        return Err(Error::TraceMismatch("traces come from different paths or points".into()));
    }
    let mut out = Subordination {
        holds: true,
        violations: 0,
        max_violation: f64::NEG_INFINITY,
    };
    let note = |excess: f64, scale: f64, out: &mut Subordination| {
        out.max_violation = out.max_violation.max(excess);
        if excess > SUBORDINATION_ROUNDING * scale {
            out.violations += 1;
            out.holds = false;
        }
    };
    for (df, dg) in f.increments().iter().zip(g.increments()) {
        note(dg.norm_sqr() - df.norm_sqr(), df.norm_sqr(), &mut out);
    }
    for (qf, qg) in f.qv.iter().zip(&g.qv) {
        note(qg - qf, *qf, &mut out);
    }
    Ok(out)
}

/// Monte-Carlo estimate of Λ(f, g) by both routes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairingEstimate {
    /// E ∫ F₁ G₁ dx
    pub product: Stat,
    /// E ∫ Σ ΔF ΔG dx
    pub covariation: Stat,
    /// per-path difference of the two routes
    pub difference: Stat,
    pub nodes: usize,
    pub routes_agree: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct McOptions {
    pub paths: usize,
    pub seed: u64,
    pub x_rule: XRule,
    pub nodes: usize,
}

impl Default for McOptions {
    fn default() -> Self {
        Self {
            paths: 200_000,
            seed: 0,
            x_rule: XRule::default(),
            nodes: DEFAULT_NODES,
        }
    }
}

/// Integrates products of coefficient vectors over x by the chosen rule.
struct XIntegrator<'a> {
    modes: &'a ModeSet,
    sub: Option<SubGrid>,
}

impl<'a> XIntegrator<'a> {
    fn new(modes: &'a ModeSet, rule: XRule) -> Result<Self> {
        let sub = match rule {
            XRule::SubGrid { stride } => Some(SubGrid::new(modes, stride)?),
            XRule::Spectral => None,
        };
        Ok(Self { modes, sub })
    }

    fn product(&self, a: &[C64], b: &[C64], buf: &mut (Vec<C64>, Vec<C64>)) -> C64 {
        match &self.sub {
            None => self.modes.integral_of_product(a, b),
            Some(sg) => {
                sg.eval(a, &mut buf.0);
                sg.eval(b, &mut buf.1);
                buf.0.iter().zip(&buf.1).map(|(x, y)| x * y).sum::<C64>() * sg.weight
            }
        }
    }
}

/// Λ(f, g) = ∫ E F₁(x; f, A) G₁(x; g, B, φ) dx, with the covariation route
/// E ∫ Σ ΔF ΔG dx computed on the same paths.
pub fn estimate_pairing(problem: &JumpProblem, opts: &McOptions) -> Result<PairingEstimate> {
    let engine = JumpEngine::new(problem)?;
    estimate_pairing_with(&engine, opts)
}

pub fn estimate_pairing_with(engine: &JumpEngine, opts: &McOptions) -> Result<PairingEstimate> {
    let nodes = engine.calibrate_nodes(opts.nodes, opts.seed)?;
    let comp = Compensator::nodes(nodes);
    let xi = XIntegrator::new(&engine.modes, opts.x_rule)?;
    let acc = run_chunked(
        opts.paths,
        || [Accum::default(); 3],
        |acc, p| {
            let path = engine.sample_path(opts.seed, p as u64);
            let mut buf = (Vec::new(), Vec::new());
            let mut cov = ZERO;
            let w = engine.walk(&path, &comp, false, |e| cov += xi.product(e.df, e.dg, &mut buf));
            let prod = xi.product(&w.f1, &w.g1, &mut buf);
            acc[0].push(prod);
            acc[1].push(cov);
            acc[2].push(prod - cov);
        },
        |a, b| {
            for (x, y) in a.iter_mut().zip(&b) {
                x.merge(y);
            }
        },
    );
    let difference = acc[2].stat();
    Ok(PairingEstimate {
        product: acc[0].stat(),
        covariation: acc[1].stat(),
        routes_agree: difference.consistent_with(ZERO, 3.0),
        difference,
        nodes,
    })
}

/// Sample means of F₁(x) − F₀(x) and G₁(x) at the given points.
pub fn martingale_check(engine: &JumpEngine, xs: &[Vec<f64>], paths: usize, seed: u64, nodes: usize) -> Vec<(Stat, Stat)> {
    let comp = Compensator::nodes(nodes);
    let f0: Vec<C64> = xs.iter().map(|x| engine.at(&engine.pf.start, x)).collect();
    let acc = run_chunked(
        paths,
        || vec![(Accum::default(), Accum::default()); xs.len()],
        |acc, p| {
            let path = engine.sample_path(seed, p as u64);
            let w = engine.walk(&path, &comp, false, |_| {});
            for (i, x) in xs.iter().enumerate() {
                acc[i].0.push(engine.at(&w.f1, x) - f0[i]);
                acc[i].1.push(engine.at(&w.g1, x));
            }
        },
        |a, b| {
            for (x, y) in a.iter_mut().zip(&b) {
                x.0.merge(&y.0);
                x.1.merge(&y.1);
            }
        },
    );
    acc.iter().map(|(a, b)| (a.stat(), b.stat())).collect()
}

/// One L^p isometry comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IsometryCheck {
    pub p: f64,
    pub estimate: Stat,
    pub exact: f64,
    pub pass: bool,
}

/// Floor on the standard error, relative to the exact value, so that a
/// sample with no spread is judged by rounding-level agreement.
const SE_FLOOR: f64 = 1e-12;

/// x-grid average of E|F₁(x)|^p against ‖f‖_p^p: each path samples one grid
/// point uniformly, so the estimator is L^d |F₁(x)|^p.
pub fn lp_isometry(engine: &JumpEngine, ps: &[f64], paths: usize, seed: u64) -> Vec<IsometryCheck> {
    let grid = &engine.f().grid;
    let vol: f64 = grid.lengths.iter().product();
    let acc = run_chunked(
        paths,
        || vec![Accum::default(); ps.len()],
        |acc, p| {
            let mut rng = path_rng(seed, p as u64);
            let path = engine.sampler.sample(&mut rng);
            let x = grid.position(rng.random_range(0..grid.len()));
            let y = path.position(engine.atoms(), &engine.drift, 1.0);
            // F₁(x) = f(x + AY₁)
            let coeffs: Vec<C64> = engine
                .pf
                .base
                .iter()
                .zip(&engine.pf.proj)
                .map(|(c, pr)| c * C64::from_polar(1.0, -levy::dot(pr, &y)))
                .collect();
            let v = engine.at(&coeffs, &x).norm();
            for (i, &q) in ps.iter().enumerate() {
                acc[i].push(C64::new(vol * v.powf(q), 0.0));
            }
        },
        |a, b| {
            for (x, y) in a.iter_mut().zip(&b) {
                x.merge(y);
            }
        },
    );
    ps.iter()
        .zip(&acc)
        .map(|(&p, a)| {
            let exact = lp_norm(engine.f(), p).powf(p);
            let estimate = a.stat();
            let se = estimate.se_re.max(SE_FLOOR * exact);
            IsometryCheck {
                p,
                estimate,
                exact,
                pass: (estimate.mean.re - exact).abs() <= 3.0 * se,
            }
        })
        .collect()
}

/// Totals of the bulk subordination check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubordinationSummary {
    pub paths: usize,
    pub jumps: usize,
    pub comparisons: usize,
    pub violations: usize,
    pub max_violation: f64,
}

/// Compares G(x; g, B, φ) with F(x; g, B) at every sub-grid point of every
/// jump of every path.
pub fn subordination_check(engine: &JumpEngine, paths: usize, seed: u64, stride: usize) -> Result<SubordinationSummary> {
    let sg = SubGrid::new(&engine.modes, stride)?;
    let pg = &engine.pg;
    let mut start = Vec::new();
    sg.eval(&pg.start, &mut start);
    let head: Vec<f64> = start.iter().map(|v| v.norm_sqr()).collect();
    let total = run_chunked(
        paths,
        || SubordinationSummary {
            paths: 0,
            jumps: 0,
            comparisons: 0,
            violations: 0,
            max_violation: f64::NEG_INFINITY,
        },
        |acc, p| {
            let path = engine.sample_path(seed, p as u64);
            let mut qf = head.clone();
            let mut qg = vec![0.0; head.len()];
            let (mut vf, mut vg) = (Vec::new(), Vec::new());
            let mut b = pg.start.clone();
            let mut t = 0.0;
            let mut qfloor = 0.0;
            for (&s, &atom) in path.times.iter().zip(&path.marks) {
                for (j, bj) in b.iter_mut().enumerate() {
                    *bj *= (-pg.rate[j] * (s - t)).exp();
                }
                t = s;
                let jf: Vec<C64> = b.iter().enumerate().map(|(j, bj)| bj * (pg.jump[atom][j] - 1.0)).collect();
                let jg: Vec<C64> = jf.iter().map(|v| v * engine.phi[atom]).collect();
                sg.eval(&jf, &mut vf);
                sg.eval(&jg, &mut vg);
                // transform rounding is absolute, on the scale of the coefficient l1 norm
                let floor = jf.iter().map(|v| v.norm()).sum::<f64>().powi(2);
                qfloor += floor;
                for i in 0..vf.len() {
                    let (a, c) = (vf[i].norm_sqr(), vg[i].norm_sqr());
                    qf[i] += a;
                    qg[i] += c;
                    for (excess, scale) in [(c - a, a + floor), (qg[i] - qf[i], qf[i] + qfloor)] {
                        acc.comparisons += 1;
                        acc.max_violation = acc.max_violation.max(excess);
                        if excess > SUBORDINATION_ROUNDING * scale {
                            acc.violations += 1;
                        }
                    }
                }
                for (j, bj) in b.iter_mut().enumerate() {
                    *bj *= pg.jump[atom][j];
                }
                acc.jumps += 1;
            }
            acc.paths += 1;
        },
        |a, b| {
            a.paths += b.paths;
            a.jumps += b.jumps;
            a.comparisons += b.comparisons;
            a.violations += b.violations;
            a.max_violation = a.max_violation.max(b.max_violation);
        },
    );
    Ok(total)
}

/// Moment comparison (E|G₁|^q)^{1/q} ≤ (p*−1)(E|F₁(g,B)|^q)^{1/q}.
#[derive(Clone, Debug, PartialEq)]
pub struct BurkholderCheck {
    pub q: f64,
    /// x = None for the x-integrated comparison
    pub x: Option<Vec<f64>>,
    pub lhs: f64,
    pub rhs: f64,
    /// E[|G|^q − (p*−1)^q |F|^q] with its standard error
    pub gap: Stat,
    pub pass: bool,
}

pub fn burkholder_check(engine: &JumpEngine, q: f64, xs: &[Vec<f64>], paths: usize, seed: u64, nodes: usize, stride: usize) -> Result<Vec<BurkholderCheck>> {
    let comp = Compensator::nodes(nodes);
    let sg = SubGrid::new(&engine.modes, stride)?;
    let c = crate::spectral::p_star_minus_one(q).powf(q);
    let m = xs.len();
    // slots: per x (G, F, gap) then the x-integrated triple
    let acc = run_chunked(
        paths,
        || vec![Accum::default(); 3 * (m + 1)],
        |acc, p| {
            let path = engine.sample_path(seed, p as u64);
            let w = engine.walk(&path, &comp, false, |_| {});
            let mut push = |slot: usize, g: f64, f: f64| {
                acc[3 * slot].push(C64::new(g, 0.0));
                acc[3 * slot + 1].push(C64::new(f, 0.0));
                acc[3 * slot + 2].push(C64::new(g - c * f, 0.0));
            };
            for (i, x) in xs.iter().enumerate() {
                push(i, engine.at(&w.g1, x).norm().powf(q), engine.at(&w.fg1, x).norm().powf(q));
            }
            let (mut vg, mut vf) = (Vec::new(), Vec::new());
            sg.eval(&w.g1, &mut vg);
            sg.eval(&w.fg1, &mut vf);
            let ig: f64 = vg.iter().map(|v| v.norm().powf(q)).sum::<f64>() * sg.weight;
            let iff: f64 = vf.iter().map(|v| v.norm().powf(q)).sum::<f64>() * sg.weight;
            push(m, ig, iff);
        },
        |a, b| {
            for (x, y) in a.iter_mut().zip(&b) {
                x.merge(y);
            }
        },
    );
    let bound = crate::spectral::p_star_minus_one(q);
    Ok((0..=m)
        .map(|slot| {
            let (g, f, gap) = (acc[3 * slot].stat(), acc[3 * slot + 1].stat(), acc[3 * slot + 2].stat());
            BurkholderCheck {
                q,
                x: xs.get(slot).cloned(),
                lhs: g.mean.re.max(0.0).powf(1.0 / q),
                rhs: bound * f.mean.re.max(0.0).powf(1.0 / q),
                pass: gap.mean.re <= 3.0 * gap.se_re,
                gap,
            }
        })
        .collect())
}
