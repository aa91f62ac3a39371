//! Bounded modulating functions: `phi` acts on jumps, `psi` on the
//! directions of the Gaussian part.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Modulator acting on jump vectors z ∈ Rⁿ.
#[derive(Clone, Debug, PartialEq)]
pub enum JumpModulator {
    Constant(C64),
    /// sgn(z_axis), with sgn(0) = 0.
    Sign { axis: usize },
    /// Indicator of the open half-space (z, normal) > 0.
    HalfSpace { normal: Vec<f64> },
    /// Indicator of the closed ball |z| ≤ radius.
    Ball { radius: f64 },
    /// e^{ik·arg z}; arg is 0 or π in one dimension and atan2(z₂, z₁) in two.
    Phase { k: i32 },
    /// Per-atom values for atomic measures. `elsewhere` covers any
    /// non-atomic component of the measure.
    Table {
        values: Vec<C64>,
        elsewhere: Option<Box<JumpModulator>>,
    },
}

/// Modulator acting on unit directions θ of the spherical measure.
#[derive(Clone, Debug, PartialEq)]
pub enum SphereModulator {
    Constant(C64),
    Sign { axis: usize },
    Phase { k: i32 },
    /// Per-atom values, aligned with the atoms of the spherical measure.
    Table(Vec<C64>),
}

/// The pair (phi, psi) tilting the Lévy–Khinchine integrands.
#[derive(Clone, Debug, PartialEq)]
pub struct Modulator {
    pub phi: JumpModulator,
    pub psi: SphereModulator,
}

impl Default for Modulator {
    fn default() -> Self {
        Self::identity()
    }
}

impl Modulator {
    pub fn identity() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    pub fn zero() -> Self {
        Self::constant(C64::new(0.0, 0.0))
    }

    pub fn constant(c: C64) -> Self {
        Self {
            phi: JumpModulator::Constant(c),
            psi: SphereModulator::Constant(c),
        }
    }

    pub fn is_identity(&self) -> bool {
        let one = C64::new(1.0, 0.0);
        self.phi == JumpModulator::Constant(one) && self.psi == SphereModulator::Constant(one)
    }

    /// Largest modulus found by inspecting tables and sampling presets.
    pub fn sup_norm(&self, n: usize) -> f64 {
        self.phi.sup_norm(n).max(self.psi.sup_norm(n))
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn arg(z: &[f64]) -> Result<f64> {
    match z.len() {
        1 => {
            if z[0] > 0.0 {
                Ok(0.0)
            } else if z[0] < 0.0 {
                Ok(std::f64::consts::PI)
            } else {
                Err(Error::ModulatorUndefinedOnSupport("arg(0)".into()))
            }
        }
        2 => {
            if z[0] == 0.0 && z[1] == 0.0 {
                Err(Error::ModulatorUndefinedOnSupport("arg(0)".into()))
            } else {
                Ok(z[1].atan2(z[0]))
            }
        }
        n => Err(Error::ModulatorUndefinedOnSupport(format!(
            "phase preset needs n ≤ 2, got n = {n}"
        ))),
    }
}

fn axis_value(z: &[f64], axis: usize) -> Result<f64> {
    z.get(axis).copied().ok_or_else(|| {
        Error::ModulatorUndefinedOnSupport(format!("axis {axis} outside dimension {}", z.len()))
    })
}

/// Deterministic validation directions/points used to sample presets.
fn validation_points(n: usize) -> Vec<Vec<f64>> {
    let mut pts = Vec::new();
    let mut state = 0x9e37_79b9_7f4a_7c15_u64;
    for i in 0..256 {
        let mut p = Vec::with_capacity(n);
        for _ in 0..n {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let u = (state >> 11) as f64 / (1u64 << 53) as f64;
            p.push((2.0 * u - 1.0) * (1.0 + i as f64 / 16.0));
        }
        pts.push(p);
    }
    pts
}

impl JumpModulator {
    /// Value at a point of a non-atomic component.
    pub fn at(&self, z: &[f64]) -> Result<C64> {
        Ok(match self {
            JumpModulator::Constant(c) => *c,
            JumpModulator::Sign { axis } => C64::new(sign(axis_value(z, *axis)?), 0.0),
            JumpModulator::HalfSpace { normal } => {
                if normal.len() != z.len() {
                    return Err(Error::shape("half-space normal dimension"));
                }
                let s: f64 = normal.iter().zip(z).map(|(a, b)| a * b).sum();
                C64::new(if s > 0.0 { 1.0 } else { 0.0 }, 0.0)
            }
            JumpModulator::Ball { radius } => {
                let r = z.iter().map(|x| x * x).sum::<f64>().sqrt();
                C64::new(if r <= *radius { 1.0 } else { 0.0 }, 0.0)
            }
            JumpModulator::Phase { k } => C64::from_polar(1.0, *k as f64 * arg(z)?),
            JumpModulator::Table { elsewhere, .. } => match elsewhere {
                Some(m) => m.at(z)?,
                None => {
                    return Err(Error::ModulatorUndefinedOnSupport(
                        "value table used off the atoms".into(),
                    ))
                }
            },
        })
    }

    /// Value at atom number `index` located at `z`.
    pub fn at_atom(&self, index: usize, z: &[f64]) -> Result<C64> {
        match self {
            JumpModulator::Table { values, .. } => values.get(index).copied().ok_or_else(|| {
                Error::ModulatorUndefinedOnSupport(format!("no table entry for atom #{index}"))
            }),
            other => other.at(z),
        }
    }

    /// Constant value of r ↦ phi(rθ) for r > r_from, if it is constant there.
    pub fn ray_limit(&self, theta: &[f64], r_from: f64) -> Result<C64> {
        match self {
            JumpModulator::Ball { radius } => {
                if r_from >= *radius {
                    Ok(C64::new(0.0, 0.0))
                } else {
                    Err(Error::ModulatorUndefinedOnSupport(format!(
                        "ball radius {radius} lies beyond the quadrature radius {r_from}"
                    )))
                }
            }
            JumpModulator::Table { elsewhere, .. } => match elsewhere {
                Some(m) => m.ray_limit(theta, r_from),
                None => Err(Error::ModulatorUndefinedOnSupport(
                    "value table used off the atoms".into(),
                )),
            },
            other => other.at(theta),
        }
    }

    /// Radii where r ↦ phi(rθ) may jump.
    pub fn radial_breakpoints(&self) -> Vec<f64> {
        match self {
            JumpModulator::Ball { radius } => vec![*radius],
            JumpModulator::Table {
                elsewhere: Some(m), ..
            } => m.radial_breakpoints(),
            _ => Vec::new(),
        }
    }

    pub fn is_table(&self) -> bool {
        matches!(self, JumpModulator::Table { .. })
    }

    pub fn sup_norm(&self, n: usize) -> f64 {
        match self {
            JumpModulator::Constant(c) => c.norm(),
            JumpModulator::Table { values, elsewhere } => {
                let t = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
                t.max(elsewhere.as_ref().map_or(0.0, |m| m.sup_norm(n)))
            }
            preset => validation_points(n)
                .iter()
                .filter_map(|p| preset.at(p).ok())
                .map(|v| v.norm())
                .fold(0.0, f64::max),
        }
    }
}

impl SphereModulator {
    pub fn at(&self, index: usize, theta: &[f64]) -> Result<C64> {
        Ok(match self {
            SphereModulator::Constant(c) => *c,
            SphereModulator::Sign { axis } => C64::new(sign(axis_value(theta, *axis)?), 0.0),
            SphereModulator::Phase { k } => C64::from_polar(1.0, *k as f64 * arg(theta)?),
            SphereModulator::Table(values) => values.get(index).copied().ok_or_else(|| {
                Error::ModulatorUndefinedOnSupport(format!(
                    "no table entry for spherical atom #{index}"
                ))
            })?,
        })
    }

    pub fn sup_norm(&self, n: usize) -> f64 {
        match self {
            SphereModulator::Constant(c) => c.norm(),
            SphereModulator::Table(values) => values.iter().map(|v| v.norm()).fold(0.0, f64::max),
            preset => validation_points(n)
                .iter()
                .filter_map(|p| preset.at(0, p).ok())
                .map(|v| v.norm())
                .fold(0.0, f64::max),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_bounded() {
        let m = Modulator {
            phi: JumpModulator::Phase { k: 3 },
            psi: SphereModulator::Sign { axis: 0 },
        };
        assert!((m.sup_norm(2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn table_sup_norm_sees_large_entries() {
        let phi = JumpModulator::Table {
            values: vec![C64::new(0.5, 0.0), C64::new(0.0, -1.2)],
            elsewhere: None,
        };
        assert!((phi.sup_norm(1) - 1.2).abs() < 1e-15);
    }

    #[test]
    fn ray_limits() {
        let s = JumpModulator::Sign { axis: 0 };
        assert_eq!(s.ray_limit(&[-1.0], 10.0).unwrap(), C64::new(-1.0, 0.0));
        let b = JumpModulator::Ball { radius: 2.0 };
        assert_eq!(b.ray_limit(&[1.0], 3.0).unwrap(), C64::new(0.0, 0.0));
        assert!(b.ray_limit(&[1.0], 1.0).is_err());
        let p = JumpModulator::Phase { k: 1 };
        let v = p.at(&[0.0, 2.0]).unwrap();
        assert!((v - C64::new(0.0, 1.0)).norm() < 1e-15);
    }
}
