//! Ψ, Ψ̃ and the cross form.

use num_complex::Complex64 as C64;

use super::radial::{ray_integral, RayKernel};
use super::{dot, Atom, JumpModulator, LevyData, LevyMeasure, Modulator, RadialProduct};
use crate::error::{Error, Result};
use crate::quad::Estimate;

/// Absolute error accepted from radial quadrature (relative above one).
pub(crate) const QUAD_TOL: f64 = 1e-6;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Clone, Copy)]
enum Kernel<'a> {
    Exponent(&'a [f64]),
    Cross(&'a [f64], &'a [f64]),
}

impl Kernel<'_> {
    fn at(&self, z: &[f64]) -> C64 {
        match *self {
            Kernel::Exponent(zeta) => {
                let s = dot(zeta, z);
                let comp = if super::norm(z) <= 1.0 { s } else { 0.0 };
                C64::new(s.cos() - 1.0, s.sin() - comp)
            }
            Kernel::Cross(z1, z2) => {
                let (s1, s2) = (dot(z1, z), dot(z2, z));
                C64::new(s1.cos() - 1.0, s1.sin()) * C64::new(s2.cos() - 1.0, s2.sin())
            }
        }
    }

    fn on_ray(&self, theta: &[f64]) -> RayKernel {
        match *self {
            Kernel::Exponent(zeta) => RayKernel::Exponent(dot(zeta, theta)),
            Kernel::Cross(z1, z2) => RayKernel::Cross(dot(z1, theta), dot(z2, theta)),
        }
    }

    /// −½(ζ,θ)² or −(ζ₁,θ)(ζ₂,θ).
    fn gaussian(&self, theta: &[f64]) -> f64 {
        match *self {
            Kernel::Exponent(zeta) => -0.5 * dot(zeta, theta).powi(2),
            Kernel::Cross(z1, z2) => -dot(z1, theta) * dot(z2, theta),
        }
    }
}

fn check_len(zeta: &[f64], n: usize) -> Result<()> {
    if zeta.len() != n {
        return Err(Error::shape(format!("frequency has length {}, expected {n}", zeta.len())));
    }
    Ok(())
}

fn checked(est: Estimate) -> Result<C64> {
    let tol = QUAD_TOL * est.value.norm().max(1.0);
    if !(est.error <= tol) || !est.value.is_finite() {
        return Err(Error::QuadratureNotConverged {
            estimate: est.error,
            tolerance: tol,
        });
    }
    Ok(est.value)
}

fn atom_sum(atoms: &[Atom], kernel: Kernel, phi: Option<&JumpModulator>) -> Result<C64> {
    let mut acc = ZERO;
    for (i, a) in atoms.iter().enumerate() {
        let p = match phi {
            Some(m) => m.at_atom(i, &a.z)?,
            None => ONE,
        };
        if p != ZERO {
            acc += kernel.at(&a.z) * (a.w * p);
        }
    }
    Ok(acc)
}

fn radial_sum(rp: &RadialProduct, kernel: Kernel, phi: &JumpModulator) -> Result<Estimate> {
    let mut est = Estimate {
        value: ZERO,
        error: 0.0,
    };
    for dir in &rp.directions {
        if dir.weight == 0.0 {
            continue;
        }
        let e = ray_integral(rp, &dir.theta, kernel.on_ray(&dir.theta), phi)?;
        est.value += e.value * dir.weight;
        est.error += e.error * dir.weight;
    }
    Ok(est)
}

/// Modulated exponent of the one-dimensional stable measure with φ = sgn.
fn stable_sign_exponent(alpha: f64, zeta: f64) -> C64 {
    if zeta == 0.0 {
        return ZERO;
    }
    if alpha == 1.0 {
        let v = 2.0 / std::f64::consts::PI * zeta * (1.0 - EULER_GAMMA - zeta.abs().ln());
        return C64::new(0.0, v);
    }
    let c = crate::symbol::stable_constant(alpha, 1);
    let t = (std::f64::consts::FRAC_PI_2 * alpha).tan();
    C64::new(0.0, t * zeta.signum() * zeta.abs().powf(alpha) - 2.0 * c * zeta / (1.0 - alpha))
}

fn stable_exponent(alpha: f64, zeta: &[f64]) -> C64 {
    C64::new(-super::norm(zeta).powf(alpha), 0.0)
}

fn jump_part(data: &LevyData, kernel: Kernel, phi: Option<&JumpModulator>) -> Result<C64> {
    let identity = JumpModulator::Constant(ONE);
    match &data.nu {
        LevyMeasure::Atoms(atoms) => atom_sum(atoms, kernel, phi),
        LevyMeasure::RadialProduct(rp) => checked(radial_sum(rp, kernel, phi.unwrap_or(&identity))?),
        LevyMeasure::Hybrid { atoms, tail } => {
            let a = atom_sum(atoms, kernel, phi)?;
            let t = checked(radial_sum(tail, kernel, phi.unwrap_or(&identity))?)?;
            Ok(a + t)
        }
        LevyMeasure::ClosedFormStable { alpha, dim } => {
            let alpha = *alpha;
            let scalar = match phi {
                None => Some(ONE),
                Some(JumpModulator::Constant(c)) => Some(*c),
                _ => None,
            };
            let base = |z: &[f64]| stable_exponent(alpha, z);
            if let Some(c) = scalar {
                return Ok(c * match kernel {
                    Kernel::Exponent(z) => base(z),
                    Kernel::Cross(z1, z2) => {
                        let s: Vec<f64> = z1.iter().zip(z2).map(|(a, b)| a + b).collect();
                        base(&s) - base(z1) - base(z2)
                    }
                });
            }
            if *dim != 1 {
                return Err(Error::UnsupportedDimension(format!(
                    "modulated stable exponent needs n = 1, got n = {dim}"
                )));
            }
            let phi = phi.expect("scalar case handled above");
            if let JumpModulator::Sign { axis: 0 } = phi {
                let f = |z: f64| stable_sign_exponent(alpha, z);
                return Ok(match kernel {
                    Kernel::Exponent(z) => f(z[0]),
                    Kernel::Cross(z1, z2) => f(z1[0] + z2[0]) - f(z1[0]) - f(z2[0]),
                });
            }
            let rp = RadialProduct::stable(alpha, 64.0, 16);
            checked(radial_sum(&rp, kernel, phi)?)
        }
    }
}

fn gaussian_part(data: &LevyData, kernel: Kernel, modulator: Option<&Modulator>) -> Result<C64> {
    let mut acc = ZERO;
    for (j, a) in data.mu.atoms.iter().enumerate() {
        let p = match modulator {
            Some(m) => m.psi.at(j, &a.theta)?,
            None => ONE,
        };
        acc += p * (a.weight * kernel.gaussian(&a.theta));
    }
    Ok(acc)
}

/// Lévy–Khinchine exponent Ψ(ζ).
pub fn psi(data: &LevyData, zeta: &[f64]) -> Result<C64> {
    check_len(zeta, data.n)?;
    if zeta.iter().all(|&z| z == 0.0) {
        return Ok(ZERO);
    }
    let k = Kernel::Exponent(zeta);
    let drift = C64::new(0.0, dot(zeta, &data.gamma));
    Ok(jump_part(data, k, None)? + gaussian_part(data, k, None)? + drift)
}

/// Modulated exponent Ψ̃(ζ); it carries no drift term.
pub fn psi_tilde(data: &LevyData, modulator: &Modulator, zeta: &[f64]) -> Result<C64> {
    check_len(zeta, data.n)?;
    if zeta.iter().all(|&z| z == 0.0) {
        return Ok(ZERO);
    }
    let k = Kernel::Exponent(zeta);
    Ok(jump_part(data, k, Some(&modulator.phi))? + gaussian_part(data, k, Some(modulator))?)
}

/// ∫(e^{i(ζ₁,z)}−1)(e^{i(ζ₂,z)}−1)φ(z)ν(dz) − ∫(ζ₁,θ)(ζ₂,θ)ψ(θ)μ(dθ), by direct
/// integration.
pub fn cross_form(data: &LevyData, modulator: &Modulator, zeta1: &[f64], zeta2: &[f64]) -> Result<C64> {
    check_len(zeta1, data.n)?;
    check_len(zeta2, data.n)?;
    if zeta1.iter().all(|&z| z == 0.0) || zeta2.iter().all(|&z| z == 0.0) {
        return Ok(ZERO);
    }
    let k = Kernel::Cross(zeta1, zeta2);
    Ok(jump_part(data, k, Some(&modulator.phi))? + gaussian_part(data, k, Some(modulator))?)
}

/// Ψ̃(ζ₁+ζ₂) − Ψ̃(ζ₁) − Ψ̃(ζ₂).
pub fn cross_form_via_difference(
    data: &LevyData,
    modulator: &Modulator,
    zeta1: &[f64],
    zeta2: &[f64],
) -> Result<C64> {
    check_len(zeta1, data.n)?;
    check_len(zeta2, data.n)?;
    let s: Vec<f64> = zeta1.iter().zip(zeta2).map(|(a, b)| a + b).collect();
    Ok(psi_tilde(data, modulator, &s)?
        - psi_tilde(data, modulator, zeta1)?
        - psi_tilde(data, modulator, zeta2)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::{DirectionAtom, SphereModulator, SphericalMeasure};
    use std::f64::consts::PI;

    fn single_atom() -> LevyData {
        LevyData::with_measure(1, LevyMeasure::Atoms(vec![Atom::new(vec![1.0], 1.0)]))
    }

    #[test]
    fn unit_atom_is_compensated() {
        let v = psi(&single_atom(), &[PI]).unwrap();
        assert!((v - C64::new(-2.0, -PI)).norm() < 1e-12);
    }

    #[test]
    fn cauchy_exponent() {
        let data = LevyData::with_measure(1, LevyMeasure::ClosedFormStable { alpha: 1.0, dim: 1 });
        assert_eq!(psi(&data, &[2.0]).unwrap(), C64::new(-2.0, 0.0));
    }

    #[test]
    fn cross_of_unit_atom() {
        let v = cross_form(&single_atom(), &Modulator::identity(), &[PI], &[PI]).unwrap();
        assert!((v - C64::new(4.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn identity_modulator_reproduces_psi() {
        let mut data = single_atom();
        data.mu = SphericalMeasure::new(vec![DirectionAtom::new(vec![-1.0], 0.3)]);
        for z in [-2.0, 0.3, 1.7] {
            let a = psi(&data, &[z]).unwrap();
            let b = psi_tilde(&data, &Modulator::identity(), &[z]).unwrap();
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn radial_stable_matches_closed_form() {
        for alpha in [0.5, 1.0, 1.5] {
            let rp = RadialProduct::stable(alpha, 64.0, 16);
            let data = LevyData::with_measure(1, LevyMeasure::RadialProduct(rp));
            for z in [0.25, 1.0, -3.0] {
                let v = psi(&data, &[z]).unwrap();
                let want = -(z as f64).abs().powf(alpha);
                assert!((v - want).norm() < 1e-7, "alpha={alpha} z={z}: {v} vs {want}");
            }
        }
    }

    #[test]
    fn sign_modulated_stable_matches_quadrature() {
        let sgn = Modulator {
            phi: JumpModulator::Sign { axis: 0 },
            psi: SphereModulator::Constant(ONE),
        };
        for alpha in [0.5, 1.0, 1.5] {
            let closed = LevyData::with_measure(1, LevyMeasure::ClosedFormStable { alpha, dim: 1 });
            let rp = RadialProduct::stable(alpha, 64.0, 16);
            let radial = LevyData::with_measure(1, LevyMeasure::RadialProduct(rp));
            for z in [0.5, 1.0, -2.0] {
                let a = psi_tilde(&closed, &sgn, &[z]).unwrap();
                let b = psi_tilde(&radial, &sgn, &[z]).unwrap();
                assert!(a.re.abs() < 1e-15);
                assert!((a - b).norm() < 1e-7, "alpha={alpha} z={z}: {a} vs {b}");
            }
        }
    }
}
