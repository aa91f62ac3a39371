//! Periodic-grid realization of multipliers, with the transform convention
//! f̂(ξ) = ∫ f(x) e^{i(ξ,x)} dx.

mod probe;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::levy::{self, LevyData};
use crate::symbol::{GridSpec, SymbolGrid};

pub use probe::{norm_probe, p_star_minus_one, ProbeReport, PROBE_SLACK, REFINE_STEPS};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Samples f(x_j) on the grid x_j = −L/2 + jΔx, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledField {
    pub grid: GridSpec,
    pub values: Vec<C64>,
}

/// Transform samples f̂(ξ_k) on centered wave numbers, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub grid: GridSpec,
    pub values: Vec<C64>,
}

impl SampledField {
    pub fn new(grid: GridSpec, values: Vec<C64>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} samples for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("field samples must be finite"));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: Fn(&[f64]) -> C64>(grid: GridSpec, f: F) -> Result<Self> {
        grid.validate()?;
        let values = (0..grid.len()).map(|i| f(&grid.position(i))).collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: GridSpec) -> Result<Self> {
        let n = grid.len();
        Self::new(grid, vec![ZERO; n])
    }

    /// Isotropic Gaussian bump e^{−|x−c|²/(2σ²)}.
    pub fn gaussian(grid: GridSpec, center: &[f64], sigma: f64) -> Result<Self> {
        let center = center.to_vec();
        Self::from_fn(grid, move |x| {
            let r2: f64 = x.iter().zip(&center).map(|(a, b)| (a - b).powi(2)).sum();
            C64::new((-0.5 * r2 / (sigma * sigma)).exp(), 0.0)
        })
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }
}

fn parity(i: usize) -> f64 {
    if i % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// One-dimensional FFTs along `axis` of a row-major array.
fn fft_axis(data: &mut [C64], points: &[usize], axis: usize, dir: FftDirection, planner: &mut FftPlanner<f64>) {
    let n = points[axis];
    let stride: usize = points[axis + 1..].iter().product();
    let outer: usize = points[..axis].iter().product();
    let fft = planner.plan_fft(n, dir);
    let mut line = vec![ZERO; n];
    let mut scratch = vec![ZERO; fft.get_inplace_scratch_len()];
    for o in 0..outer {
        for s in 0..stride {
            let base = o * n * stride + s;
            for (j, l) in line.iter_mut().enumerate() {
                *l = data[base + j * stride];
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            for (j, l) in line.iter().enumerate() {
                data[base + j * stride] = *l;
            }
        }
    }
}

/// Multiplies each entry by Π_axis sign(idx_axis), where `sign` sees the
/// position index along that axis.
fn apply_signs<F: Fn(usize, usize) -> f64>(data: &mut [C64], grid: &GridSpec, sign: F) {
    for (flat, v) in data.iter_mut().enumerate() {
        let s: f64 = grid.unravel(flat).iter().enumerate().map(|(a, &i)| sign(a, i)).product();
        *v *= s;
    }
}

/// f̂(ξ_k) ≈ Δx^d Σ_j f(x_j) e^{i(ξ_k, x_j)}.
pub fn transform_forward(f: &SampledField) -> Spectrum {
    let grid = &f.grid;
    let mut data = f.values.clone();
    let mut planner = FftPlanner::new();
    // e^{iξ_k x_j} = (−1)^{k + j} e^{2πi·idx·j/N} with k = idx − N/2
    apply_signs(&mut data, grid, |_, j| parity(j));
    for axis in 0..grid.d() {
        fft_axis(&mut data, &grid.points, axis, FftDirection::Inverse, &mut planner);
    }
    let dv = grid.cell_volume();
    apply_signs(&mut data, grid, |a, i| parity(i + grid.points[a] / 2));
    data.iter_mut().for_each(|v| *v *= dv);
    Spectrum {
        grid: grid.clone(),
        values: data,
    }
}

/// f(x_j) = L^{−d} Σ_k f̂(ξ_k) e^{−i(ξ_k, x_j)}.
pub fn transform_inverse(s: &Spectrum) -> SampledField {
    let grid = &s.grid;
    let mut data = s.values.clone();
    let mut planner = FftPlanner::new();
    apply_signs(&mut data, grid, |a, i| parity(i + grid.points[a] / 2));
    for axis in 0..grid.d() {
        fft_axis(&mut data, &grid.points, axis, FftDirection::Forward, &mut planner);
    }
    let vol: f64 = grid.lengths.iter().product();
    apply_signs(&mut data, grid, |_, j| parity(j));
    data.iter_mut().for_each(|v| *v /= vol);
    SampledField {
        grid: grid.clone(),
        values: data,
    }
}

/// M f with (Mf)^ = m f̂.
pub fn apply_multiplier(m: &SymbolGrid, f: &SampledField) -> Result<SampledField> {
    m.grid.ensure_same(&f.grid)?;
    let mut s = transform_forward(f);
    for (v, mk) in s.values.iter_mut().zip(&m.values) {
        *v *= mk;
    }
    Ok(transform_inverse(&s))
}

/// Both evaluations of Λ(f, g) = ∫ Mf·g dx.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pairing {
    /// Σ (Mf)(x_j) g(x_j) Δx^d
    pub spatial: C64,
    /// L^{−d} Σ_k m(ξ_k) f̂(ξ_k) ĝ(−ξ_k)
    pub spectral: C64,
}

/// Relative tolerance for the agreement of the two pairing evaluations,
/// measured against ‖f‖₂‖g‖₂.
pub const PAIRING_TOL: f64 = 1e-10;

pub fn pairing(m: &SymbolGrid, f: &SampledField, g: &SampledField) -> Result<Pairing> {
    m.grid.ensure_same(&f.grid)?;
    f.grid.ensure_same(&g.grid)?;
    let grid = &f.grid;
    let mf = apply_multiplier(m, f)?;
    let dv = grid.cell_volume();
    let spatial: C64 = mf.values.iter().zip(&g.values).map(|(a, b)| a * b).sum::<C64>() * dv;
    let spectral = spectral_pairing(m, &transform_forward(f), &transform_forward(g));
    let scale = (lp_norm(f, 2.0) * lp_norm(g, 2.0)).max(f64::MIN_POSITIVE);
    if (spatial - spectral).norm() > PAIRING_TOL * scale {
        return Err(Error::PairingMismatch { spatial, spectral });
    }
    Ok(Pairing { spatial, spectral })
}

/// L^{−d} Σ_k m_k f̂_k ĝ_{−k}.
pub fn spectral_pairing(m: &SymbolGrid, fh: &Spectrum, gh: &Spectrum) -> C64 {
    let grid = &fh.grid;
    let vol: f64 = grid.lengths.iter().product();
    let mut acc = ZERO;
    for k in 0..grid.len() {
        acc += m.values[k] * fh.values[k] * gh.values[grid.negated(k)];
    }
    acc / vol
}

/// (Σ |f(x_j)|^p Δx^d)^{1/p}.
pub fn lp_norm(f: &SampledField, p: f64) -> f64 {
    let s: f64 = f.values.iter().map(|v| v.norm().powf(p)).sum();
    (s * f.grid.cell_volume()).powf(1.0 / p)
}

/// P_s^A f as a band-limited trigonometric sum that can be evaluated
/// anywhere: L^{−d} Σ_k f̂(ξ_k) e^{sΨ(−Aᵀξ_k)} e^{−i(ξ_k, x)}.
#[derive(Clone, Debug)]
pub struct Semigroup {
    pub grid: GridSpec,
    /// Retained wave-vectors ξ_k.
    pub freqs: Vec<Vec<f64>>,
    /// f̂(ξ_k) e^{sΨ(−Aᵀξ_k)} / L^d.
    pub coeffs: Vec<C64>,
}

impl Semigroup {
    pub fn new(f: &SampledField, a: &DMatrix<f64>, data: &LevyData, s: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::invalid(format!("semigroup time {s} outside [0, 1]")));
        }
        if a.nrows() != f.grid.d() || a.ncols() != data.n {
            return Err(Error::shape("A must be d × n"));
        }
        let fh = transform_forward(f);
        let vol: f64 = f.grid.lengths.iter().product();
        let mut freqs = Vec::new();
        let mut coeffs = Vec::new();
        for (k, &c) in fh.values.iter().enumerate() {
            if c == ZERO {
                continue;
            }
            let xi = f.grid.frequency(k);
            let z: Vec<f64> = levy::mat_t_vec(a, &xi).iter().map(|v| -v).collect();
            let e = if s == 0.0 { C64::new(1.0, 0.0) } else { (levy::psi(data, &z)? * s).exp() };
            freqs.push(xi);
            coeffs.push(c * e / vol);
        }
        Ok(Self {
            grid: f.grid.clone(),
            freqs,
            coeffs,
        })
    }

    pub fn eval(&self, x: &[f64]) -> C64 {
        self.freqs
            .iter()
            .zip(&self.coeffs)
            .map(|(xi, c)| c * C64::from_polar(1.0, -levy::dot(xi, x)))
            .sum()
    }

    /// Σ |coefficients|, a bound for sup_x |P_s f(x)|.
    pub fn sup_bound(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }
}

/// P_s^A f(x) at an arbitrary point x.
pub fn semigroup_eval(f: &SampledField, a: &DMatrix<f64>, data: &LevyData, s: f64, x: &[f64]) -> Result<C64> {
    if x.len() != f.grid.d() {
        return Err(Error::shape("evaluation point has the wrong dimension"));
    }
    Ok(Semigroup::new(f, a, data, s)?.eval(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::{Atom, LevyMeasure};
    use std::f64::consts::PI;

    fn line(l: f64, n: usize) -> GridSpec {
        GridSpec::cube(1, l, n).unwrap()
    }

    #[test]
    fn gaussian_transform() {
        let g = line(40.0, 1024);
        let f = SampledField::gaussian(g.clone(), &[0.0], 1.0).unwrap();
        let fh = transform_forward(&f);
        let mut err: f64 = 0.0;
        for k in 0..g.len() {
            let xi = g.frequency(k)[0];
            let want = (2.0 * PI).sqrt() * (-0.5 * xi * xi).exp();
            err = err.max((fh.values[k] - want).norm());
        }
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn shifted_bump_picks_up_phase() {
        let g = line(40.0, 512);
        let f = SampledField::gaussian(g.clone(), &[1.5], 1.0).unwrap();
        let fh = transform_forward(&f);
        for k in [200, 256, 300] {
            let xi = g.frequency(k)[0];
            let want = C64::from_polar((2.0 * PI).sqrt() * (-0.5 * xi * xi).exp(), 1.5 * xi);
            assert!((fh.values[k] - want).norm() < 1e-8);
        }
    }

    #[test]
    fn round_trip_2d() {
        let g = GridSpec::new(vec![10.0, 6.0], vec![32, 16]).unwrap();
        let f = SampledField::from_fn(g, |x| C64::new(x[0].sin() * x[1], x[0] * x[0] - x[1])).unwrap();
        let back = transform_inverse(&transform_forward(&f));
        let scale = lp_norm(&f, 2.0);
        for (a, b) in f.values.iter().zip(&back.values) {
            assert!((a - b).norm() < 1e-12 * scale);
        }
    }

    #[test]
    fn lp_norm_of_gaussian() {
        let f = SampledField::gaussian(line(40.0, 1024), &[0.0], 1.0).unwrap();
        assert!((lp_norm(&f, 2.0) - PI.powf(0.25)).abs() < 1e-12);
        let c = C64::new(0.0, -3.0);
        assert!((lp_norm(&f.scale(c), 3.0) - 3.0 * lp_norm(&f, 3.0)).abs() < 1e-12);
    }

    #[test]
    fn semigroup_is_poisson_average_of_shifts() {
        let g = line(40.0, 1024);
        let f = SampledField::gaussian(g.clone(), &[-4.0], 1.0).unwrap();
        let mut data = LevyData::with_measure(1, LevyMeasure::Atoms(vec![Atom::new(vec![1.0], 1.0)]));
        data.gamma = vec![1.0];
        let a = DMatrix::from_element(1, 1, 1.0);
        let s = 0.7;
        let sg = Semigroup::new(&f, &a, &data, s).unwrap();
        for x in [-4.3, -2.05, 0.77] {
            let mut want = 0.0;
            let mut term = (-s as f64).exp();
            for k in 0..=30 {
                if k > 0 {
                    term *= s / k as f64;
                }
                let y: f64 = x + k as f64 + 4.0;
                want += term * (-0.5 * y * y).exp();
            }
            assert!((sg.eval(&[x]) - want).norm() < 1e-8);
        }
        let s0 = Semigroup::new(&f, &a, &data, 0.0).unwrap();
        let y: f64 = 0.123 + 4.0;
        assert!((s0.eval(&[0.123]) - (-0.5 * y * y).exp()).norm() < 1e-8);
    }
}
