//! Gaussian branch: stochastic integrals against Brownian motion.
//!
//! With standard Brownian motion W the martingales are
//! F_t = P^A_{1−t} f(x + AW_t) and dG_t = K Bᵀ∇(P^B_{1−t} g)(x + BW_t)·dW_t,
//! carried as coefficient vectors in the same band-limited basis as the
//! jump branch. Both integrals use left-point (Euler) sums.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::modes::ModeSet;
use super::path::{path_rng, BrownianPath};
use super::stats::{run_chunked, Accum, Stat};
use crate::error::{Error, Result};
use crate::levy;
use crate::spectral::{pairing, SampledField};
use crate::symbol::{check_contraction, symbol_gaussian, SymbolGrid};

const ZERO: C64 = C64::new(0.0, 0.0);
/// Variance scale of e^{−s|ζ|²} generated by standard Brownian motion.
pub const BROWNIAN_SCALE: f64 = 0.5;
pub const MIN_STEPS: usize = 100;

#[derive(Clone, Debug)]
pub struct GaussianProblem {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub k: DMatrix<C64>,
    pub f: SampledField,
    pub g: SampledField,
}

impl GaussianProblem {
    pub fn validate(&self) -> Result<()> {
        let d = self.f.grid.d();
        if self.a.shape() != self.b.shape() || self.a.nrows() != d {
            return Err(Error::shape("A and B must both be d × n"));
        }
        let n = self.a.ncols();
        if self.k.shape() != (n, n) {
            return Err(Error::shape("K must be n × n"));
        }
        check_contraction(&self.k)?;
        self.f.grid.ensure_same(&self.g.grid)
    }

    /// Symbol of the pairing the Brownian martingales produce.
    pub fn symbol(&self) -> Result<SymbolGrid> {
        let grid = &self.f.grid;
        let values = (0..grid.len())
            .map(|i| symbol_gaussian(&self.a, &self.b, &self.k, &grid.frequency(i), BROWNIAN_SCALE))
            .collect::<Result<Vec<_>>>()?;
        SymbolGrid::from_values(grid.clone(), values)
    }

    /// Spectral side ∫ (Mf) g dx.
    pub fn spectral_pairing(&self) -> Result<C64> {
        Ok(pairing(&self.symbol()?, &self.f, &self.g)?.spectral)
    }
}

/// Coefficients and per-mode constants shared by all paths.
struct Engine {
    modes: ModeSet,
    c: Vec<C64>,
    dg: Vec<C64>,
    /// Aᵀξ_k
    av: Vec<Vec<f64>>,
    /// K Bᵀξ_k
    kb: Vec<Vec<C64>>,
    a2: Vec<f64>,
    b2: Vec<f64>,
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    vol: f64,
}

/// e^{−i(ξ_k, v)} for every retained mode, from one complex root per axis.
struct Phases {
    tables: Vec<Vec<C64>>,
}

impl Phases {
    fn new(grid_points: &[usize]) -> Self {
        Self {
            tables: grid_points.iter().map(|&n| vec![ZERO; n]).collect(),
        }
    }

    fn fill(&mut self, lengths: &[f64], v: &[f64]) {
        for (j, t) in self.tables.iter_mut().enumerate() {
            let n = t.len() as i64;
            let w = C64::from_polar(1.0, -2.0 * std::f64::consts::PI / lengths[j] * v[j]);
            let mut p = w.powi(-(n as i32) / 2);
            for e in t.iter_mut() {
                *e = p;
                p *= w;
            }
        }
    }

    fn get(&self, wave: &[i64]) -> C64 {
        wave.iter()
            .zip(&self.tables)
            .map(|(&k, t)| t[(k + t.len() as i64 / 2) as usize])
            .product()
    }
}

/// Per-path results at one step size.
#[derive(Clone, Copy, Debug, Default)]
struct PathValue {
    /// ∫ (F₁ − F₀) G₁ dx
    product: C64,
    /// ∫ [F, G]₁ dx by the Euler sum of the integrand product
    qv: C64,
    /// ∫ [G,G]₁ dx discretized, minus its left-point time quadrature
    qv_gap: f64,
}

impl Engine {
    fn new(p: &GaussianProblem) -> Result<Self> {
        p.validate()?;
        let (modes, mut coeffs) = ModeSet::from_fields(&[&p.f, &p.g])?;
        let dg = coeffs.pop().expect("two fields");
        let c = coeffs.pop().expect("two fields");
        let av: Vec<Vec<f64>> = modes.freqs.iter().map(|xi| levy::mat_t_vec(&p.a, xi)).collect();
        let bv: Vec<Vec<f64>> = modes.freqs.iter().map(|xi| levy::mat_t_vec(&p.b, xi)).collect();
        let n = p.a.ncols();
        let kb = bv
            .iter()
            .map(|b| (0..n).map(|i| (0..n).map(|j| p.k[(i, j)] * b[j]).sum()).collect())
            .collect();
        Ok(Self {
            a2: av.iter().map(|v| levy::dot(v, v)).collect(),
            b2: bv.iter().map(|v| levy::dot(v, v)).collect(),
            vol: p.f.grid.lengths.iter().product(),
            a: p.a.clone(),
            b: p.b.clone(),
            modes,
            c,
            dg,
            av,
            kb,
        })
    }

    /// decay[i][k] = e^{−(1−t_i)|Mᵀξ_k|²/2}
    fn decay(&self, sq: &[f64], steps: usize) -> Vec<Vec<f64>> {
        let h = 1.0 / steps as f64;
        (0..steps)
            .map(|i| {
                let rest = 1.0 - i as f64 * h;
                sq.iter().map(|s| (-rest * s * BROWNIAN_SCALE).exp()).collect()
            })
            .collect()
    }

    fn run(&self, path: &BrownianPath, da: &[Vec<f64>], db: &[Vec<f64>]) -> PathValue {
        let grid = &self.modes.grid;
        let n = self.a.ncols();
        let m = self.modes.len();
        let mut w = vec![0.0; n];
        let mut pa = Phases::new(&grid.points);
        let mut pb = Phases::new(&grid.points);
        let mut df = vec![ZERO; m];
        let mut g = vec![ZERO; m];
        // integrand coefficients of G per Brownian coordinate, reused per step
        let mut gam = vec![ZERO; m * n];
        let mut fint = vec![ZERO; m * n];
        let mut out = PathValue::default();
        for (i, dw) in path.increments.iter().enumerate() {
            let aw = self.a.clone() * nalgebra::DVector::from_column_slice(&w);
            let bw = self.b.clone() * nalgebra::DVector::from_column_slice(&w);
            pa.fill(&grid.lengths, aw.as_slice());
            pb.fill(&grid.lengths, bw.as_slice());
            let mut quad = 0.0;
            let mut disc = 0.0;
            for k in 0..m {
                let wave = &self.modes.waves[k];
                let alpha = self.c[k] * da[i][k] * pa.get(wave);
                let beta = self.dg[k] * db[i][k] * pb.get(wave);
                let mut sf = ZERO;
                let mut sg = ZERO;
                for c in 0..n {
                    // ∇ e^{−iξx} = −iξ e^{−iξx}
                    let fi = alpha * C64::new(0.0, -self.av[k][c]);
                    let gi = beta * C64::new(0.0, -1.0) * self.kb[k][c];
                    fint[k * n + c] = fi;
                    gam[k * n + c] = gi;
                    sf += fi * dw[c];
                    sg += gi * dw[c];
                    quad += gi.norm_sqr();
                }
                df[k] += sf;
                g[k] += sg;
                disc += sg.norm_sqr();
            }
            let mut cross = ZERO;
            for k in 0..m {
                let j = self.modes.neg[k];
                for c in 0..n {
                    cross += fint[k * n + c] * gam[j * n + c];
                }
            }
            out.qv += cross * path.h * self.vol;
            out.qv_gap += (disc - quad * path.h) * self.vol;
            for (x, y) in w.iter_mut().zip(dw) {
                *x += y;
            }
        }
        out.product = self.modes.integral_of_product(&df, &g);
        out
    }
}

/// Monte-Carlo estimate of the Gaussian pairing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BrownianEstimate {
    /// E ∫ (F₁ − F₀) G₁ dx at step h
    pub product: Stat,
    /// E ∫ [F, G]₁ dx
    pub covariation: Stat,
    /// the product route at step 2h on the same paths
    pub coarse: Stat,
    /// per-path change of the product route from 2h to h
    pub richardson: Stat,
    pub steps: usize,
}

impl BrownianEstimate {
    pub fn value(&self) -> C64 {
        self.product.mean
    }
}

/// Euler estimate of Λ = ∫ E F₁ G₁ dx on `paths` shared Brownian paths.
/// Fails with StepTooCoarse when halving the step moves the estimate by
/// more than its standard error.
pub fn brownian_pairing(problem: &GaussianProblem, paths: usize, steps: usize, seed: u64) -> Result<BrownianEstimate> {
    if steps < MIN_STEPS || steps % 2 != 0 {
        return Err(Error::invalid(format!("steps must be even and ≥ {MIN_STEPS}, got {steps}")));
    }
    let e = Engine::new(problem)?;
    let n = problem.a.ncols();
    let (da, db) = (e.decay(&e.a2, steps), e.decay(&e.b2, steps));
    let (ca, cb) = (e.decay(&e.a2, steps / 2), e.decay(&e.b2, steps / 2));
    let acc = run_chunked(
        paths,
        || [Accum::default(); 4],
        |acc, p| {
            let path = BrownianPath::sample(n, steps, &mut path_rng(seed, p as u64));
            let fine = e.run(&path, &da, &db);
            let coarse = e.run(&path.coarsen(), &ca, &cb);
            acc[0].push(fine.product);
            acc[1].push(fine.qv);
            acc[2].push(coarse.product);
            acc[3].push(fine.product - coarse.product);
        },
        |a, b| {
            for (x, y) in a.iter_mut().zip(&b) {
                x.merge(y);
            }
        },
    );
    let out = BrownianEstimate {
        product: acc[0].stat(),
        covariation: acc[1].stat(),
        coarse: acc[2].stat(),
        richardson: acc[3].stat(),
        steps,
    };
    let change = out.richardson.mean.norm();
    let std_err = out.product.joint_se();
    if change > std_err {
        return Err(Error::StepTooCoarse { change, std_err });
    }
    Ok(out)
}

/// RMS over paths of the discretized ∫[G,G]₁dx minus its time quadrature,
/// one entry per step count; the paths at coarser steps are the finest
/// paths coarsened.
pub fn gaussian_qv_gap(problem: &GaussianProblem, paths: usize, steps: &[usize], seed: u64) -> Result<Vec<(usize, f64)>> {
    let e = Engine::new(problem)?;
    let n = problem.a.ncols();
    let finest = *steps.iter().max().ok_or_else(|| Error::invalid("no step counts"))?;
    let mut levels = Vec::new();
    for &s in steps {
        if s == 0 || finest % s != 0 || !(finest / s).is_power_of_two() {
            return Err(Error::invalid(format!("step count {s} is not a power-of-two coarsening of {finest}")));
        }
        levels.push((s, e.decay(&e.a2, s), e.decay(&e.b2, s)));
    }
    let acc = run_chunked(
        paths,
        || vec![Accum::default(); levels.len()],
        |acc, p| {
            let path = BrownianPath::sample(n, finest, &mut path_rng(seed, p as u64));
            for (slot, (s, da, db)) in levels.iter().enumerate() {
                let mut q = path.clone();
                while q.steps() > *s {
                    q = q.coarsen();
                }
                let gap = e.run(&q, da, db).qv_gap;
                acc[slot].push(C64::new(gap * gap, 0.0));
            }
        },
        |a, b| {
            for (x, y) in a.iter_mut().zip(&b) {
                x.merge(y);
            }
        },
    );
    Ok(levels
        .iter()
        .zip(&acc)
        .map(|((s, _, _), a)| (*s, a.stat().mean.re.sqrt()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::GridSpec;

    fn problem(k: C64) -> GaussianProblem {
        let grid = GridSpec::cube(1, 16.0, 64).unwrap();
        let f = SampledField::gaussian(grid, &[0.0], 1.0).unwrap();
        GaussianProblem {
            a: DMatrix::from_element(1, 1, 1.0),
            b: DMatrix::from_element(1, 1, 1.0),
            k: DMatrix::from_element(1, 1, k),
            f: f.clone(),
            g: f,
        }
    }

    #[test]
    fn zero_k_gives_zero() {
        let est = brownian_pairing(&problem(ZERO), 64, 200, 1).unwrap();
        assert_eq!(est.product.mean, ZERO);
        assert_eq!(est.covariation.mean, ZERO);
    }

    #[test]
    fn k_above_one_is_rejected() {
        assert!(matches!(
            brownian_pairing(&problem(C64::new(1.5, 0.0)), 8, 200, 1),
            Err(Error::KNormExceedsOne { .. })
        ));
    }

    #[test]
    fn phase_tables_match_direct_evaluation() {
        let mut p = Phases::new(&[8, 4]);
        let (l, v) = ([3.0, 5.0], [0.7, -1.3]);
        p.fill(&l, &v);
        for k0 in -4..4i64 {
            for k1 in -2..2i64 {
                let arg = 2.0 * std::f64::consts::PI * (k0 as f64 / l[0] * v[0] + k1 as f64 / l[1] * v[1]);
                assert!((p.get(&[k0, k1]) - C64::from_polar(1.0, -arg)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn covariation_route_is_close_at_small_scale() {
        let pr = problem(C64::new(1.0, 0.0));
        let est = brownian_pairing(&pr, 400, 400, 5).unwrap();
        let exact = pr.spectral_pairing().unwrap();
        // the QV route has far smaller variance; it is within a few percent
        assert!((est.covariation.mean - exact).norm() < 0.05 * exact.norm(), "{:?} vs {exact}", est.covariation);
    }
}
