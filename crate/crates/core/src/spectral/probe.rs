//! Lower-bound search for ‖M‖_p over random test functions.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::{lp_norm, transform_forward, transform_inverse, SampledField, Spectrum};
use crate::symbol::SymbolGrid;

/// Relative slack on p* − 1 accepted by the probe.
pub const PROBE_SLACK: f64 = 5e-3;
/// Coordinate-ascent steps on the best candidate.
pub const REFINE_STEPS: usize = 200;

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeReport {
    pub p: f64,
    /// p* − 1 = max(p − 1, 1/(p − 1)).
    pub bound: f64,
    pub best_ratio: f64,
    pub descriptor: String,
    pub trials: usize,
    pub seed: u64,
    pub pass: bool,
}

pub fn p_star_minus_one(p: f64) -> f64 {
    (p - 1.0).max(1.0 / (p - 1.0))
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn complex_normal(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(normal(rng), normal(rng))
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Random trigonometric polynomial, built directly on the frequency side.
fn trig_poly(m: &SymbolGrid, rng: &mut ChaCha8Rng) -> (Spectrum, String) {
    let grid = &m.grid;
    let terms = rng.random_range(1..=12);
    let band = rng.random_range(1..=8usize);
    let mut values = vec![C64::new(0.0, 0.0); grid.len()];
    for _ in 0..terms {
        let idx: Vec<usize> = grid
            .points
            .iter()
            .map(|&n| {
                let kmax = (band * n / 64).clamp(1, n / 2 - 1) as i64;
                (rng.random_range(-kmax..=kmax) + (n / 2) as i64) as usize
            })
            .collect();
        values[grid.ravel(&idx)] += complex_normal(rng);
    }
    (
        Spectrum {
            grid: grid.clone(),
            values,
        },
        format!("trigonometric polynomial, {terms} terms, band {band}/64"),
    )
}

/// Sum of modulated Gaussian bumps with random centers, widths and phases;
/// each bump stays within a quarter of the box.
fn bumps(m: &SymbolGrid, rng: &mut ChaCha8Rng) -> (Spectrum, String) {
    let grid = m.grid.clone();
    let count = rng.random_range(1..=4);
    let d = grid.d();
    let mut parts = Vec::with_capacity(count);
    for _ in 0..count {
        let l_min = grid.lengths.iter().cloned().fold(f64::INFINITY, f64::min);
        let dx = (0..d).map(|a| grid.spacing(a)).fold(0.0, f64::max);
        let sigma = (2.0 * dx).max(l_min / 32.0 * rng.random::<f64>());
        let center: Vec<f64> = grid.lengths.iter().map(|l| (rng.random::<f64>() - 0.5) * 0.5 * l).collect();
        let omega: Vec<f64> = (0..d).map(|_| normal(rng) * 2.0 / sigma).collect();
        parts.push((sigma, center, omega, complex_normal(rng)));
    }
    let f = SampledField::from_fn(grid, |x| {
        parts
            .iter()
            .map(|(s, c, w, amp)| {
                let r2: f64 = x.iter().zip(c).map(|(a, b)| (a - b).powi(2)).sum();
                let ph: f64 = x.iter().zip(w).map(|(a, b)| a * b).sum();
                amp * C64::from_polar((-0.5 * r2 / (s * s)).exp(), ph)
            })
            .sum()
    })
    .expect("grid was validated by the symbol");
    (transform_forward(&f), format!("{count} modulated Gaussian bumps"))
}

/// ‖M f‖_p / ‖f‖_p for f given by its spectrum.
fn ratio(m: &SymbolGrid, fh: &Spectrum, p: f64) -> f64 {
    let f = transform_inverse(fh);
    let mut mh = fh.clone();
    for (v, mk) in mh.values.iter_mut().zip(&m.values) {
        *v *= mk;
    }
    let mf = transform_inverse(&mh);
    let den = lp_norm(&f, p);
    if den == 0.0 {
        return 0.0;
    }
    lp_norm(&mf, p) / den
}

/// Random search followed by coordinate ascent on the best candidate.
/// Trial t draws from stream t of the master seed, so the report does not
/// depend on scheduling.
pub fn norm_probe(m: &SymbolGrid, p: f64, trials: usize, seed: u64) -> ProbeReport {
    assert!(p > 1.0 && p.is_finite(), "p must lie in (1, ∞)");
    let trials = trials.max(1);
    let results: Vec<(f64, usize, Spectrum, String)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_for(seed, t as u64);
            let (fh, what) = if t % 2 == 0 { trig_poly(m, &mut rng) } else { bumps(m, &mut rng) };
            (ratio(m, &fh, p), t, fh, what)
        })
        .collect();
    let (mut best, trial, mut fh, what) = results
        .into_iter()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .expect("at least one trial");

    let mut rng = rng_for(seed, trials as u64);
    let support: Vec<usize> = (0..fh.values.len()).filter(|&k| fh.values[k].norm() > 0.0).collect();
    let typical = fh.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut accepted = 0;
    for _ in 0..REFINE_STEPS {
        // mostly nudge existing modes, sometimes switch on a neighbour
        let k = if !support.is_empty() && rng.random::<f64>() < 0.8 {
            support[rng.random_range(0..support.len())]
        } else {
            rng.random_range(0..fh.values.len())
        };
        let old = fh.values[k];
        let step = 0.3 * old.norm().max(0.05 * typical);
        fh.values[k] = old + complex_normal(&mut rng) * step;
        let r = ratio(m, &fh, p);
        if r > best {
            best = r;
            accepted += 1;
        } else {
            fh.values[k] = old;
        }
    }
    let bound = p_star_minus_one(p);
    ProbeReport {
        p,
        bound,
        best_ratio: best,
        descriptor: format!("trial {trial}: {what}; {accepted}/{REFINE_STEPS} refinement steps accepted"),
        trials,
        seed,
        pass: best <= bound * (1.0 + PROBE_SLACK),
    }
}
