//! Lévy triplets, modulators and the exponents Ψ and Ψ̃.

mod approx;
mod exponent;
mod modulator;
mod radial;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub use approx::{
    approximate, approximate_with, drift_reduce, ApproxOptions, Approximation, PureJump,
    DEFAULT_NODES_PER_PANEL, STABLE_R_MAX,
};
pub use exponent::{cross_form, cross_form_via_difference, psi, psi_tilde};
pub use modulator::{JumpModulator, Modulator, SphereModulator};
pub use radial::stable_tail;

/// Tolerance for |θ| = 1 on spherical atoms and angular directions.
pub const UNIT_TOL: f64 = 1e-12;

/// Point mass `w` at the jump `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub z: Vec<f64>,
    pub w: f64,
}

impl Atom {
    pub fn new(z: Vec<f64>, w: f64) -> Self {
        Self { z, w }
    }

    pub fn norm(&self) -> f64 {
        norm(&self.z)
    }
}

/// Weighted unit direction; used for angular parts and for μ.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionAtom {
    pub theta: Vec<f64>,
    pub weight: f64,
}

impl DirectionAtom {
    pub fn new(theta: Vec<f64>, weight: f64) -> Self {
        Self { theta, weight }
    }
}

/// Radial density ρ(r) on (0, ∞).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RadialProfile {
    /// scale · r^{-exponent}; the α-stable profile has exponent 1 + α.
    Power { scale: f64, exponent: f64 },
    /// scale · r^{-1-alpha} · e^{-rate·r}.
    Tempered { scale: f64, alpha: f64, rate: f64 },
}

impl RadialProfile {
    pub fn density(&self, r: f64) -> f64 {
        match *self {
            RadialProfile::Power { scale, exponent } => scale * r.powf(-exponent),
            RadialProfile::Tempered { scale, alpha, rate } => {
                scale * r.powf(-1.0 - alpha) * (-rate * r).exp()
            }
        }
    }

    /// ∫_0^r0 s² ρ(s) ds, exact for the power profile and to first order in
    /// rate·r0 for the tempered one.
    pub(crate) fn second_moment_below(&self, r0: f64) -> f64 {
        match *self {
            RadialProfile::Power { scale, exponent } => {
                scale * r0.powf(3.0 - exponent) / (3.0 - exponent)
            }
            RadialProfile::Tempered { scale, alpha, rate } => {
                let e = 2.0 - alpha;
                scale * r0.powf(e) / e * (1.0 - rate * r0 * e / (e + 1.0))
            }
        }
    }

    /// ∫_0^r0 s³ ρ(s) ds bound, used for the next-order remainder.
    pub(crate) fn third_moment_below(&self, r0: f64) -> f64 {
        match *self {
            RadialProfile::Power { scale, exponent } => {
                scale * r0.powf(4.0 - exponent) / (4.0 - exponent)
            }
            RadialProfile::Tempered { scale, alpha, .. } => {
                scale * r0.powf(3.0 - alpha) / (3.0 - alpha)
            }
        }
    }

    fn exponent_near_zero(&self) -> f64 {
        match *self {
            RadialProfile::Power { exponent, .. } => exponent,
            RadialProfile::Tempered { alpha, .. } => 1.0 + alpha,
        }
    }
}

/// Product measure ρ(r)dr ⊗ Σ a_j δ_{θ_j} restricted to inner < r.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProduct {
    pub profile: RadialProfile,
    pub directions: Vec<DirectionAtom>,
    /// Lower cut; 0 means the density extends to the origin.
    pub inner: f64,
    /// Radius where numerical quadrature stops and the tail treatment begins.
    pub r_max: f64,
    /// Gauss–Legendre order of the adaptive panels.
    pub order: usize,
}

impl RadialProduct {
    /// One-dimensional α-stable measure c_α|z|^{-1-α}dz.
    pub fn stable(alpha: f64, r_max: f64, order: usize) -> Self {
        let c = crate::symbol::stable_constant(alpha, 1);
        Self {
            profile: RadialProfile::Power {
                scale: 1.0,
                exponent: 1.0 + alpha,
            },
            directions: vec![
                DirectionAtom::new(vec![1.0], c),
                DirectionAtom::new(vec![-1.0], c),
            ],
            inner: 0.0,
            r_max,
            order,
        }
    }

    fn dim(&self) -> Option<usize> {
        self.directions.first().map(|d| d.theta.len())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LevyMeasure {
    Atoms(Vec<Atom>),
    RadialProduct(RadialProduct),
    /// Isotropic α-stable measure c_α|z|^{-n-α}dz with Ψ(ζ) = −|ζ|^α.
    ClosedFormStable { alpha: f64, dim: usize },
    /// Finitely many atoms plus a radial tail living beyond `tail.inner`.
    /// This is the form taken by ε-approximations of heavy-tailed measures.
    Hybrid { atoms: Vec<Atom>, tail: RadialProduct },
}

impl LevyMeasure {
    pub fn zero() -> Self {
        LevyMeasure::Atoms(Vec::new())
    }

    /// Atoms of a finite measure, or `RequiresFiniteMeasure`.
    pub fn atoms(&self) -> Result<&[Atom]> {
        match self {
            LevyMeasure::Atoms(a) => Ok(a),
            _ => Err(Error::RequiresFiniteMeasure),
        }
    }

    /// Total mass Σ w_i of an atomic measure.
    pub fn total_mass(&self) -> Result<f64> {
        Ok(self.atoms()?.iter().map(|a| a.w).sum())
    }
}

/// Finite measure on the unit sphere, Σ b_j δ_{θ_j}.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SphericalMeasure {
    pub atoms: Vec<DirectionAtom>,
}

impl SphericalMeasure {
    pub fn new(atoms: Vec<DirectionAtom>) -> Self {
        Self { atoms }
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// The triple (ν, μ, γ) in dimension n together with A, B ∈ R^{d×n}.
#[derive(Clone, Debug, PartialEq)]
pub struct LevyData {
    pub d: usize,
    pub n: usize,
    pub nu: LevyMeasure,
    pub mu: SphericalMeasure,
    pub gamma: Vec<f64>,
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
}

impl LevyData {
    /// Data with A = B = I, no Gaussian part and no drift.
    pub fn with_measure(n: usize, nu: LevyMeasure) -> Self {
        Self {
            d: n,
            n,
            nu,
            mu: SphericalMeasure::default(),
            gamma: vec![0.0; n],
            a: DMatrix::identity(n, n),
            b: DMatrix::identity(n, n),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (d, n) = (self.d, self.n);
        if d == 0 || n == 0 {
            return Err(Error::shape("d and n must be positive"));
        }
        if self.a.shape() != (d, n) || self.b.shape() != (d, n) {
            return Err(Error::shape(format!(
                "A is {:?} and B is {:?}, expected ({d}, {n})",
                self.a.shape(),
                self.b.shape()
            )));
        }
        if self.gamma.len() != n {
            return Err(Error::shape(format!("γ has length {}, expected {n}", self.gamma.len())));
        }
        if self.a.iter().chain(self.b.iter()).chain(&self.gamma).any(|v| !v.is_finite()) {
            return Err(Error::invalid("A, B and γ must be finite"));
        }
        validate_measure(&self.nu, n)?;
        for (j, m) in self.mu.atoms.iter().enumerate() {
            check_direction(m, n, &format!("spherical atom #{j}"))?;
        }
        Ok(())
    }

    /// Aᵀξ.
    pub fn a_t(&self, xi: &[f64]) -> Vec<f64> {
        mat_t_vec(&self.a, xi)
    }

    /// Bᵀξ.
    pub fn b_t(&self, xi: &[f64]) -> Vec<f64> {
        mat_t_vec(&self.b, xi)
    }
}

/// Checked copy of the data.
pub fn validate(data: LevyData) -> Result<LevyData> {
    data.validate()?;
    Ok(data)
}

impl Modulator {
    /// Table lengths and the ‖·‖∞ ≤ 1 bound for this data.
    pub fn validate(&self, data: &LevyData) -> Result<()> {
        if let JumpModulator::Table { values, .. } = &self.phi {
            let expected = match &data.nu {
                LevyMeasure::Atoms(a) | LevyMeasure::Hybrid { atoms: a, .. } => a.len(),
                _ => {
                    return Err(Error::ModulatorUndefinedOnSupport(
                        "value table needs an atomic measure".into(),
                    ))
                }
            };
            if values.len() != expected {
                return Err(Error::shape(format!(
                    "phi table has {} values for {expected} atoms",
                    values.len()
                )));
            }
        }
        if let SphereModulator::Table(values) = &self.psi {
            if values.len() != data.mu.atoms.len() {
                return Err(Error::shape(format!(
                    "psi table has {} values for {} spherical atoms",
                    values.len(),
                    data.mu.atoms.len()
                )));
            }
        }
        let sup = self.sup_norm(data.n);
        if !(sup <= 1.0 + 1e-12) {
            return Err(Error::ModulatorExceedsOne { value: sup });
        }
        Ok(())
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn mat_t_vec(m: &DMatrix<f64>, xi: &[f64]) -> Vec<f64> {
    (0..m.ncols())
        .map(|j| (0..m.nrows()).map(|i| m[(i, j)] * xi[i]).sum())
        .collect()
}

fn check_direction(dir: &DirectionAtom, n: usize, what: &str) -> Result<()> {
    if dir.theta.len() != n {
        return Err(Error::shape(format!("{what} has dimension {}, expected {n}", dir.theta.len())));
    }
    if (norm(&dir.theta) - 1.0).abs() > UNIT_TOL {
        return Err(Error::invalid(format!("{what} is not a unit vector")));
    }
    if !(dir.weight >= 0.0 && dir.weight.is_finite()) {
        return Err(Error::invalid(format!("{what} has weight {}", dir.weight)));
    }
    Ok(())
}

fn check_atoms(atoms: &[Atom], n: usize) -> Result<()> {
    for (i, a) in atoms.iter().enumerate() {
        if a.z.len() != n {
            return Err(Error::shape(format!("atom #{i} has dimension {}, expected {n}", a.z.len())));
        }
        if a.z.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("atom #{i} is not finite")));
        }
        if a.norm() == 0.0 {
            return Err(Error::AtomAtOrigin { index: i });
        }
        if !(a.w >= 0.0 && a.w.is_finite()) {
            return Err(Error::invalid(format!("atom #{i} has mass {}", a.w)));
        }
    }
    Ok(())
}

fn check_radial(rp: &RadialProduct, n: usize) -> Result<()> {
    if rp.directions.is_empty() {
        return Err(Error::invalid("radial measure needs at least one direction"));
    }
    for (j, dir) in rp.directions.iter().enumerate() {
        check_direction(dir, n, &format!("direction #{j}"))?;
    }
    if rp.order < 2 {
        return Err(Error::invalid("quadrature order must be at least 2"));
    }
    if !(rp.inner >= 0.0) || !(rp.r_max >= 1.0) || rp.inner > rp.r_max || !rp.r_max.is_finite() {
        return Err(Error::invalid(format!(
            "need 0 ≤ inner ≤ r_max and r_max ≥ 1, got inner = {}, r_max = {}",
            rp.inner, rp.r_max
        )));
    }
    let e0 = rp.profile.exponent_near_zero();
    match rp.profile {
        RadialProfile::Power { scale, exponent } => {
            if !(scale >= 0.0) || !exponent.is_finite() {
                return Err(Error::invalid("power profile needs scale ≥ 0"));
            }
            if exponent <= 1.0 {
                return Err(Error::NonIntegrableMeasure(format!(
                    "∫_1^∞ r^-{exponent} dr diverges"
                )));
            }
        }
        RadialProfile::Tempered { scale, alpha, rate } => {
            if !(scale >= 0.0) || !(rate >= 0.0) || !alpha.is_finite() {
                return Err(Error::invalid("tempered profile needs scale, rate ≥ 0"));
            }
            if rate == 0.0 && alpha <= 0.0 {
                return Err(Error::NonIntegrableMeasure(
                    "untempered tail with alpha ≤ 0 is not integrable at infinity".into(),
                ));
            }
        }
    }
    if rp.inner == 0.0 && e0 >= 3.0 {
        return Err(Error::NonIntegrableMeasure(format!(
            "∫_0^1 r² ρ(r) dr diverges for a density of order r^-{e0} at the origin"
        )));
    }
    Ok(())
}

fn validate_measure(nu: &LevyMeasure, n: usize) -> Result<()> {
    match nu {
        LevyMeasure::Atoms(atoms) => check_atoms(atoms, n),
        LevyMeasure::RadialProduct(rp) => check_radial(rp, n),
        LevyMeasure::ClosedFormStable { alpha, dim } => {
            if !(*alpha > 0.0 && *alpha < 2.0) {
                return Err(Error::AlphaOutOfRange { alpha: *alpha });
            }
            if *dim != n {
                return Err(Error::shape(format!("stable measure has dimension {dim}, expected {n}")));
            }
            Ok(())
        }
        LevyMeasure::Hybrid { atoms, tail } => {
            check_atoms(atoms, n)?;
            check_radial(tail, n)?;
            if tail.inner < 1.0 {
                return Err(Error::invalid("hybrid tail must start at radius ≥ 1"));
            }
            Ok(())
        }
    }
    .and_then(|_| match nu {
        LevyMeasure::RadialProduct(rp) if rp.dim() != Some(n) => {
            Err(Error::shape("radial directions have the wrong dimension"))
        }
        _ => Ok(()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_atom_is_accepted() {
        let data = LevyData::with_measure(1, LevyMeasure::Atoms(vec![Atom::new(vec![1.0], 1.0)]));
        assert!(validate(data).is_ok());
    }

    #[test]
    fn origin_atom_is_rejected() {
        let data = LevyData::with_measure(1, LevyMeasure::Atoms(vec![Atom::new(vec![0.0], 1.0)]));
        assert!(matches!(data.validate(), Err(Error::AtomAtOrigin { index: 0 })));
    }

    #[test]
    fn alpha_two_profile_is_not_integrable() {
        let mut rp = RadialProduct::stable(0.5, 64.0, 16);
        rp.profile = RadialProfile::Power {
            scale: 1.0,
            exponent: 3.0,
        };
        let data = LevyData::with_measure(1, LevyMeasure::RadialProduct(rp));
        assert!(matches!(data.validate(), Err(Error::NonIntegrableMeasure(_))));
    }

    #[test]
    fn shapes_are_checked() {
        let mut data = LevyData::with_measure(2, LevyMeasure::zero());
        data.a = DMatrix::identity(1, 2);
        assert!(matches!(data.validate(), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn oversized_table_is_rejected() {
        let data = LevyData::with_measure(1, LevyMeasure::Atoms(vec![Atom::new(vec![1.0], 1.0)]));
        let m = Modulator {
            phi: JumpModulator::Table {
                values: vec![crate::C64::new(1.5, 0.0)],
                elsewhere: None,
            },
            psi: SphereModulator::Constant(crate::C64::new(1.0, 0.0)),
        };
        assert!(matches!(m.validate(&data), Err(Error::ModulatorExceedsOne { .. })));
    }
}
