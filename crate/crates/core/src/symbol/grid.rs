use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::SymbolSpec;
use crate::error::{Error, Result};

/// Slack allowed above |m| = 1 when tabulating.
pub const SYMBOL_BOUND_TOL: f64 = 1e-9;

/// Periodic box [−L/2, L/2)^d with N points per axis, and its dual
/// frequencies ξ_k = 2πk/L, k ∈ [−N/2, N/2).
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub lengths: Vec<f64>,
    pub points: Vec<usize>,
}

impl GridSpec {
    pub fn new(lengths: Vec<f64>, points: Vec<usize>) -> Result<Self> {
        let g = Self { lengths, points };
        g.validate()?;
        Ok(g)
    }

    /// Same L and N on each of `d` axes.
    pub fn cube(d: usize, length: f64, points: usize) -> Result<Self> {
        Self::new(vec![length; d], vec![points; d])
    }

    pub fn validate(&self) -> Result<()> {
        if self.lengths.is_empty() || self.lengths.len() != self.points.len() {
            return Err(Error::GridMismatch("need one L and one N per axis".into()));
        }
        if self.lengths.len() > 3 {
            return Err(Error::UnsupportedDimension(format!("grids support d ≤ 3, got {}", self.lengths.len())));
        }
        for (&l, &n) in self.lengths.iter().zip(&self.points) {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::GridMismatch(format!("box length {l} must be positive")));
            }
            if n < 2 || !n.is_power_of_two() {
                return Err(Error::GridMismatch(format!("N = {n} must be a power of two ≥ 2")));
            }
        }
        Ok(())
    }

    pub fn d(&self) -> usize {
        self.lengths.len()
    }

    pub fn len(&self) -> usize {
        self.points.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.lengths[axis] / self.points[axis] as f64
    }

    /// Δx^d.
    pub fn cell_volume(&self) -> f64 {
        (0..self.d()).map(|a| self.spacing(a)).product()
    }

    /// Multi-index of a row-major flat index (last axis fastest).
    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.d()];
        for axis in (0..self.d()).rev() {
            idx[axis] = flat % self.points[axis];
            flat /= self.points[axis];
        }
        idx
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.points).fold(0, |acc, (&i, &n)| acc * n + i)
    }

    /// Centered wave numbers k ∈ [−N/2, N/2) at a flat index.
    pub fn wave_numbers(&self, flat: usize) -> Vec<i64> {
        self.unravel(flat)
            .iter()
            .zip(&self.points)
            .map(|(&i, &n)| i as i64 - (n / 2) as i64)
            .collect()
    }

    pub fn frequency(&self, flat: usize) -> Vec<f64> {
        self.wave_numbers(flat)
            .iter()
            .zip(&self.lengths)
            .map(|(&k, &l)| 2.0 * std::f64::consts::PI * k as f64 / l)
            .collect()
    }

    /// x_j = −L/2 + jΔx.
    pub fn position(&self, flat: usize) -> Vec<f64> {
        self.unravel(flat)
            .iter()
            .enumerate()
            .map(|(a, &j)| -0.5 * self.lengths[a] + j as f64 * self.spacing(a))
            .collect()
    }

    /// Flat index of the frequency −ξ_k (wrapping −(−N/2) onto itself).
    pub fn negated(&self, flat: usize) -> usize {
        let idx: Vec<usize> = self
            .unravel(flat)
            .iter()
            .zip(&self.points)
            .map(|(&i, &n)| (n - i) % n)
            .collect();
        self.ravel(&idx)
    }

    pub fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!(
                "grid L = {:?}, N = {:?} does not match L = {:?}, N = {:?}",
                self.lengths, self.points, other.lengths, other.points
            )));
        }
        Ok(())
    }
}

/// Symbol values on the frequency grid, row-major in centered wave numbers.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolGrid {
    pub grid: GridSpec,
    pub values: Vec<C64>,
    pub max_abs: f64,
    pub argmax: Vec<f64>,
}

impl SymbolGrid {
    pub fn from_values(grid: GridSpec, values: Vec<C64>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        let (mut max_abs, mut at) = (0.0, 0);
        for (i, v) in values.iter().enumerate() {
            if v.norm() > max_abs {
                max_abs = v.norm();
                at = i;
            }
        }
        let argmax = grid.frequency(at);
        Ok(Self {
            grid,
            values,
            max_abs,
            argmax,
        })
    }

    pub fn constant(grid: GridSpec, value: C64) -> Result<Self> {
        let n = grid.len();
        Self::from_values(grid, vec![value; n])
    }
}

/// Tabulates m on the grid and checks |m| ≤ 1 + 1e-9.
pub fn evaluate_grid(spec: &SymbolSpec, grid: &GridSpec) -> Result<SymbolGrid> {
    spec.validate()?;
    grid.validate()?;
    if spec.dim() != grid.d() {
        return Err(Error::GridMismatch(format!(
            "symbol has dimension {}, grid has {}",
            spec.dim(),
            grid.d()
        )));
    }
    let values = (0..grid.len())
        .into_par_iter()
        .map(|i| spec.eval_on_grid(&grid.frequency(i)))
        .collect::<Result<Vec<_>>>()?;
    let out = SymbolGrid::from_values(grid.clone(), values)?;
    if !(out.max_abs <= 1.0 + SYMBOL_BOUND_TOL) {
        return Err(Error::invalid(format!(
            "{} symbol reaches |m| = {} at ξ = {:?}",
            spec.name(),
            out.max_abs,
            out.argmax
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip_and_negation() {
        let g = GridSpec::new(vec![2.0, 4.0], vec![4, 8]).unwrap();
        for i in 0..g.len() {
            assert_eq!(g.ravel(&g.unravel(i)), i);
            let k = g.wave_numbers(i);
            let nk = g.wave_numbers(g.negated(i));
            for a in 0..2 {
                let n = g.points[a] as i64;
                assert_eq!((k[a] + nk[a]).rem_euclid(n), 0);
            }
        }
        assert_eq!(g.wave_numbers(0), vec![-2, -4]);
        assert_eq!(g.position(0), vec![-1.0, -2.0]);
    }

    #[test]
    fn non_power_of_two_rejected() {
        assert!(GridSpec::cube(1, 1.0, 12).is_err());
    }

    #[test]
    fn stable_grid_is_bounded() {
        let g = GridSpec::cube(1, 20.0, 256).unwrap();
        let s = evaluate_grid(&SymbolSpec::StableClosedForm { alpha: 0.5 }, &g).unwrap();
        assert!(s.max_abs < 1.0 && s.max_abs > 0.0);
    }
}
