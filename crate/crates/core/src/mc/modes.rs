//! Band-limited coefficient representation of P_{1−t} f(x + M Y_t).
//!
//! For a field with spectrum f̂ and a process Y the map
//! x ↦ P^M_{1−t} f(x + M Y_t) is Σ_k a_k(t) e^{−i(ξ_k, x)} with
//! a_k(t) = L^{−d} f̂_k e^{(1−t)Ψ(−Mᵀξ_k)} e^{−i(Mᵀξ_k, Y_t)}, so whole
//! x-grids are carried through a path by updating the coefficients.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::levy::{self, Atom, LevyData};
use crate::spectral::{transform_forward, SampledField};
use crate::symbol::GridSpec;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Coefficients below this fraction of the largest are dropped.
pub const MODE_CUTOFF: f64 = 1e-15;

/// Retained wave-vectors, closed under k ↦ −k.
#[derive(Clone, Debug)]
pub struct ModeSet {
    pub grid: GridSpec,
    /// flat index into the full centered grid
    pub flat: Vec<usize>,
    pub freqs: Vec<Vec<f64>>,
    pub waves: Vec<Vec<i64>>,
    /// position of −k in this set
    pub neg: Vec<usize>,
}

impl ModeSet {
    pub fn from_fields(fields: &[&SampledField]) -> Result<(Self, Vec<Vec<C64>>)> {
        let grid = fields[0].grid.clone();
        for f in fields {
            grid.ensure_same(&f.grid)?;
        }
        let spectra: Vec<Vec<C64>> = fields.iter().map(|f| transform_forward(f).values).collect();
        let mut keep = vec![false; grid.len()];
        for s in &spectra {
            let top = s.iter().map(|v| v.norm()).fold(0.0, f64::max);
            for (k, v) in s.iter().enumerate() {
                if v.norm() > MODE_CUTOFF * top {
                    keep[k] = true;
                    keep[grid.negated(k)] = true;
                }
            }
        }
        let flat: Vec<usize> = (0..grid.len()).filter(|&k| keep[k]).collect();
        let mut pos = vec![usize::MAX; grid.len()];
        for (i, &k) in flat.iter().enumerate() {
            pos[k] = i;
        }
        let neg = flat.iter().map(|&k| pos[grid.negated(k)]).collect();
        let set = Self {
            freqs: flat.iter().map(|&k| grid.frequency(k)).collect(),
            waves: flat.iter().map(|&k| grid.wave_numbers(k)).collect(),
            grid,
            flat,
            neg,
        };
        let vol: f64 = set.grid.lengths.iter().product();
        let coeffs = spectra
            .iter()
            .map(|s| set.flat.iter().map(|&k| s[k] / vol).collect())
            .collect();
        Ok((set, coeffs))
    }

    pub fn len(&self) -> usize {
        self.flat.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flat.is_empty()
    }

    /// Σ_k c_k e^{−i(ξ_k, x)}.
    pub fn eval(&self, coeffs: &[C64], x: &[f64]) -> C64 {
        self.freqs
            .iter()
            .zip(coeffs)
            .map(|(xi, c)| c * C64::from_polar(1.0, -levy::dot(xi, x)))
            .sum()
    }

    /// ∫ (Σ α_k e^{−iξ_k x})(Σ β_k e^{−iξ_k x}) dx over the box = L^d Σ α_k β_{−k}.
    pub fn integral_of_product(&self, a: &[C64], b: &[C64]) -> C64 {
        let vol: f64 = self.grid.lengths.iter().product();
        let s: C64 = a.iter().zip(&self.neg).map(|(x, &j)| x * b[j]).sum();
        s * vol
    }
}

/// A field transported through matrix M by the Lévy process.
#[derive(Clone, Debug)]
pub struct Propagator {
    /// a_k(0) = c_k e^{Ψ_k}: coefficients of P_1 f.
    pub start: Vec<C64>,
    /// c_k = f̂_k / L^d: coefficients of f itself.
    pub base: Vec<C64>,
    /// Ψ_k = Ψ(−Mᵀξ_k).
    pub psi: Vec<C64>,
    /// λ_k = Ψ_k + i(Mᵀξ_k, h); between jumps a_k(t+u) = a_k(t) e^{−uλ_k}.
    pub rate: Vec<C64>,
    /// Mᵀξ_k
    pub proj: Vec<Vec<f64>>,
    /// jump[a][k] = e^{−i(Mᵀξ_k, z_a)}
    pub jump: Vec<Vec<C64>>,
}

impl Propagator {
    pub fn new(modes: &ModeSet, base: Vec<C64>, m: &DMatrix<f64>, data: &LevyData, atoms: &[Atom], drift: &[f64]) -> Result<Self> {
        if m.nrows() != modes.grid.d() || m.ncols() != data.n {
            return Err(Error::shape("transport matrix must be d × n"));
        }
        let proj: Vec<Vec<f64>> = modes.freqs.iter().map(|xi| levy::mat_t_vec(m, xi)).collect();
        let mut psi = Vec::with_capacity(proj.len());
        for p in &proj {
            let z: Vec<f64> = p.iter().map(|v| -v).collect();
            psi.push(levy::psi(data, &z)?);
        }
        let rate = psi.iter().zip(&proj).map(|(s, p)| s + C64::new(0.0, levy::dot(p, drift))).collect();
        let start = base.iter().zip(&psi).map(|(c, s)| c * s.exp()).collect();
        let jump = atoms
            .iter()
            .map(|a| proj.iter().map(|p| C64::from_polar(1.0, -levy::dot(p, &a.z))).collect())
            .collect();
        Ok(Self {
            start,
            base,
            psi,
            rate,
            proj,
            jump,
        })
    }

    /// Gaussian transport: Ψ(ζ) = −|ζ|²/2, no drift, no jumps.
    pub fn brownian(modes: &ModeSet, base: Vec<C64>, m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != modes.grid.d() {
            return Err(Error::shape("transport matrix must have d rows"));
        }
        let proj: Vec<Vec<f64>> = modes.freqs.iter().map(|xi| levy::mat_t_vec(m, xi)).collect();
        let psi: Vec<C64> = proj.iter().map(|p| C64::new(-0.5 * levy::dot(p, p), 0.0)).collect();
        let start = base.iter().zip(&psi).map(|(c, s)| c * s.exp()).collect();
        Ok(Self {
            start,
            base,
            rate: psi.clone(),
            psi,
            proj,
            jump: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }
}

/// Exact evaluation of a coefficient vector on the sub-grid made of every
/// `stride`-th grid point: modes are folded modulo the sub-grid size and
/// summed with one FFT per axis.
pub struct SubGrid {
    points: Vec<usize>,
    bin: Vec<usize>,
    sign: Vec<f64>,
    ffts: Vec<Arc<dyn Fft<f64>>>,
    /// quadrature weight (stride·Δx)^d
    pub weight: f64,
}

impl SubGrid {
    pub fn new(modes: &ModeSet, stride: usize) -> Result<Self> {
        let grid = &modes.grid;
        let mut points = Vec::new();
        for &n in &grid.points {
            if stride == 0 || n % stride != 0 || n / stride < 2 {
                return Err(Error::invalid(format!("stride {stride} does not divide N = {n} into ≥ 2 points")));
            }
            points.push(n / stride);
        }
        let weight = (0..grid.d()).map(|a| grid.spacing(a) * stride as f64).product();
        let mut bin = Vec::with_capacity(modes.len());
        let mut sign = Vec::with_capacity(modes.len());
        for w in &modes.waves {
            let mut b = 0;
            let mut s = 1.0;
            for (a, &k) in w.iter().enumerate() {
                let m = points[a] as i64;
                b = b * points[a] + k.rem_euclid(m) as usize;
                // x_0 = −L/2 contributes e^{iπk}
                if k.rem_euclid(2) == 1 {
                    s = -s;
                }
            }
            bin.push(b);
            sign.push(s);
        }
        let mut planner = FftPlanner::new();
        let ffts = points.iter().map(|&m| planner.plan_fft_forward(m)).collect();
        Ok(Self {
            points,
            bin,
            sign,
            ffts,
            weight,
        })
    }

    pub fn len(&self) -> usize {
        self.points.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Values Σ_k c_k e^{−i(ξ_k, x_j)} at all sub-grid points, row-major.
    pub fn eval(&self, coeffs: &[C64], out: &mut Vec<C64>) {
        out.clear();
        out.resize(self.len(), ZERO);
        for ((c, &b), &s) in coeffs.iter().zip(&self.bin).zip(&self.sign) {
            out[b] += c * s;
        }
        let d = self.points.len();
        let mut line = Vec::new();
        for axis in 0..d {
            let n = self.points[axis];
            let stride: usize = self.points[axis + 1..].iter().product();
            let outer: usize = self.points[..axis].iter().product();
            line.resize(n, ZERO);
            for o in 0..outer {
                for s in 0..stride {
                    let base = o * n * stride + s;
                    for (j, l) in line.iter_mut().enumerate() {
                        *l = out[base + j * stride];
                    }
                    self.ffts[axis].process(&mut line);
                    for (j, l) in line.iter().enumerate() {
                        out[base + j * stride] = *l;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subgrid_matches_direct_sum() {
        let grid = GridSpec::new(vec![8.0, 6.0], vec![16, 8]).unwrap();
        let f = SampledField::from_fn(grid.clone(), |x| C64::new((-(x[0] * x[0] + x[1] * x[1])).exp(), x[1].sin() * 0.1)).unwrap();
        let (modes, c) = ModeSet::from_fields(&[&f]).unwrap();
        let sg = SubGrid::new(&modes, 2).unwrap();
        let mut out = Vec::new();
        sg.eval(&c[0], &mut out);
        for (i, v) in out.iter().enumerate() {
            let (r, s) = (i / 4, i % 4);
            let x = [-4.0 + 2.0 * r as f64 * 0.5, -3.0 + 2.0 * s as f64 * 0.75];
            assert!((v - modes.eval(&c[0], &x)).norm() < 1e-12);
        }
        // stride 1 reproduces the samples
        let sg1 = SubGrid::new(&modes, 1).unwrap();
        sg1.eval(&c[0], &mut out);
        for (a, b) in out.iter().zip(&f.values) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
