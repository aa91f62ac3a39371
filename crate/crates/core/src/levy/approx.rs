//! ε-approximation by finite measures and removal of the compensator drift.

use num_complex::Complex64 as C64;

use super::{
    dot, Atom, JumpModulator, LevyData, LevyMeasure, Modulator, RadialProduct, RadialProfile,
    SphereModulator, SphericalMeasure,
};
use crate::error::{Error, Result};
use crate::quad::GaussLegendre;

pub const DEFAULT_NODES_PER_PANEL: usize = 64;

/// Outer radius used when a closed-form stable measure is discretized.
pub const STABLE_R_MAX: f64 = 64.0;

/// Longest panel on [1, r_max].
const MAX_OUTER_PANEL: f64 = 4.0;

#[derive(Clone, Debug)]
pub struct Approximation {
    pub data: LevyData,
    pub modulator: Modulator,
    /// Bound on the mass-weighted error of whatever was dropped beyond the
    /// outer radius (zero when the tail is kept analytically).
    pub tail_bound: f64,
}

#[derive(Clone, Debug)]
pub struct ApproxOptions {
    pub nodes_per_panel: usize,
    /// Keep power-law tails beyond r_max as an analytic component. Without
    /// it the result is purely atomic and the dropped mass is reported.
    pub keep_tail: bool,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        Self {
            nodes_per_panel: DEFAULT_NODES_PER_PANEL,
            keep_tail: true,
        }
    }
}

/// ν_ε = 1_{|z|>ε}ν plus the Gaussian part moved onto the sphere of radius ε,
/// with the modulator extended by ψ on the new atoms.
pub fn approximate(data: &LevyData, modulator: &Modulator, eps: f64) -> Result<Approximation> {
    approximate_with(data, modulator, eps, &ApproxOptions::default())
}

pub fn approximate_with(
    data: &LevyData,
    modulator: &Modulator,
    eps: f64,
    opts: &ApproxOptions,
) -> Result<Approximation> {
    if !(eps > 0.0) {
        return Err(Error::invalid(format!("eps must be positive, got {eps}")));
    }
    let mut atoms = Vec::new();
    let mut values = Vec::new();
    let mut tail = None;
    let mut tail_bound = 0.0;
    let phi = &modulator.phi;

    let push_filtered = |list: &[Atom], atoms: &mut Vec<Atom>, values: &mut Vec<C64>| -> Result<()> {
        for (i, a) in list.iter().enumerate() {
            if a.norm() > eps {
                values.push(phi.at_atom(i, &a.z)?);
                atoms.push(a.clone());
            }
        }
        Ok(())
    };

    match &data.nu {
        LevyMeasure::Atoms(list) => push_filtered(list, &mut atoms, &mut values)?,
        LevyMeasure::Hybrid { atoms: list, tail: t } => {
            push_filtered(list, &mut atoms, &mut values)?;
            if eps >= t.inner {
                return Err(Error::EpsTooLarge {
                    eps,
                    r_max: t.inner,
                });
            }
            tail = Some(t.clone());
        }
        LevyMeasure::RadialProduct(rp) => {
            let (t, b) = discretize(rp, phi, eps, opts, &mut atoms, &mut values)?;
            tail = t;
            tail_bound = b;
        }
        LevyMeasure::ClosedFormStable { alpha, dim } => {
            if *dim != 1 {
                return Err(Error::UnsupportedDimension(format!(
                    "stable measure can only be discretized for n = 1, got n = {dim}"
                )));
            }
            let rp = RadialProduct::stable(*alpha, STABLE_R_MAX, 16);
            let (t, b) = discretize(&rp, phi, eps, opts, &mut atoms, &mut values)?;
            tail = t;
            tail_bound = b;
        }
    }

    let scale = eps.powi(-2);
    for (j, m) in data.mu.atoms.iter().enumerate() {
        if m.weight == 0.0 {
            continue;
        }
        let z: Vec<f64> = m.theta.iter().map(|t| t * eps).collect();
        atoms.push(Atom::new(z, m.weight * scale));
        values.push(modulator.psi.at(j, &m.theta)?);
    }

    let elsewhere = tail.as_ref().map(|_| Box::new(tail_modulator(phi)));
    let nu = match tail {
        Some(t) => LevyMeasure::Hybrid { atoms, tail: t },
        None => LevyMeasure::Atoms(atoms),
    };
    Ok(Approximation {
        data: LevyData {
            nu,
            mu: SphericalMeasure::default(),
            ..data.clone()
        },
        modulator: Modulator {
            phi: JumpModulator::Table { values, elsewhere },
            psi: SphereModulator::Table(Vec::new()),
        },
        tail_bound,
    })
}

fn tail_modulator(phi: &JumpModulator) -> JumpModulator {
    match phi {
        JumpModulator::Table { elsewhere, .. } => elsewhere
            .as_deref()
            .cloned()
            .unwrap_or(JumpModulator::Constant(C64::new(0.0, 0.0))),
        other => other.clone(),
    }
}

/// Gauss–Legendre atoms on (max(ε, inner), r_max]: geometric panels up to
/// r = 1, panels of length ≤ 4 beyond, cut at modulator breakpoints.
fn discretize(
    rp: &RadialProduct,
    phi: &JumpModulator,
    eps: f64,
    opts: &ApproxOptions,
    atoms: &mut Vec<Atom>,
    values: &mut Vec<C64>,
) -> Result<(Option<RadialProduct>, f64)> {
    if eps >= rp.r_max {
        return Err(Error::EpsTooLarge {
            eps,
            r_max: rp.r_max,
        });
    }
    let lo = eps.max(rp.inner);
    let mut cuts = vec![lo];
    let mut r = lo;
    while 2.0 * r < 1.0 {
        r *= 2.0;
        cuts.push(r);
    }
    r = 1.0_f64.max(lo);
    cuts.push(r);
    while r + MAX_OUTER_PANEL < rp.r_max {
        r += MAX_OUTER_PANEL;
        cuts.push(r);
    }
    cuts.push(rp.r_max);
    for b in phi.radial_breakpoints() {
        if b > lo && b < rp.r_max {
            cuts.push(b);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let rule = GaussLegendre::new(opts.nodes_per_panel);
    for dir in &rp.directions {
        if dir.weight == 0.0 {
            continue;
        }
        for w in cuts.windows(2) {
            if w[1] <= w[0] {
                continue;
            }
            for (r, wt) in rule.mapped(w[0], w[1]) {
                let z: Vec<f64> = dir.theta.iter().map(|t| t * r).collect();
                values.push(phi.at(&z)?);
                atoms.push(Atom::new(z, dir.weight * wt * rp.profile.density(r)));
            }
        }
    }

    match rp.profile {
        RadialProfile::Power { .. } if opts.keep_tail => Ok((
            Some(RadialProduct {
                inner: rp.r_max,
                ..rp.clone()
            }),
            0.0,
        )),
        profile => {
            let weight: f64 = rp.directions.iter().map(|d| d.weight).sum();
            let mass = tail_mass(&profile, rp.r_max);
            Ok((None, 2.0 * weight * mass))
        }
    }
}

fn tail_mass(profile: &RadialProfile, r: f64) -> f64 {
    match *profile {
        RadialProfile::Power { scale, exponent } => scale * r.powf(1.0 - exponent) / (exponent - 1.0),
        RadialProfile::Tempered { scale, alpha, rate } => {
            if rate > 0.0 {
                scale * r.powf(-1.0 - alpha) * (-rate * r).exp() / rate
            } else {
                scale * r.powf(-alpha) / alpha
            }
        }
    }
}

/// Finite jump measure without compensator:
/// Ψ(ζ) = Σ w(e^{i(ζ,z)} − 1) − ½Σ b(ζ,θ)² + i(ζ,h).
#[derive(Clone, Debug, PartialEq)]
pub struct PureJump {
    pub atoms: Vec<Atom>,
    pub mu: SphericalMeasure,
}

impl PureJump {
    /// Exponent without the drift term.
    pub fn exponent(&self, zeta: &[f64]) -> C64 {
        let jumps: C64 = self
            .atoms
            .iter()
            .map(|a| {
                let s = dot(zeta, &a.z);
                C64::new(s.cos() - 1.0, s.sin()) * a.w
            })
            .sum();
        let gauss: f64 = self
            .mu
            .atoms
            .iter()
            .map(|m| -0.5 * m.weight * dot(zeta, &m.theta).powi(2))
            .sum();
        jumps + gauss
    }
}

/// Splits Ψ into an uncompensated jump part and the net drift
/// h = γ − Σ_{|z|≤1} z w.
pub fn drift_reduce(data: &LevyData) -> Result<(PureJump, Vec<f64>)> {
    let atoms = data.nu.atoms()?;
    let mut h = data.gamma.clone();
    for a in atoms.iter().filter(|a| a.norm() <= 1.0) {
        for (hk, zk) in h.iter_mut().zip(&a.z) {
            *hk -= zk * a.w;
        }
    }
    Ok((
        PureJump {
            atoms: atoms.to_vec(),
            mu: data.mu.clone(),
        },
        h,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::{psi, DirectionAtom};

    #[test]
    fn gaussian_atoms_move_to_eps_sphere() {
        let mut data = LevyData::with_measure(1, LevyMeasure::zero());
        data.mu = SphericalMeasure::new(vec![DirectionAtom::new(vec![1.0], 1.0)]);
        let ap = approximate(&data, &Modulator::identity(), 0.1).unwrap();
        let atoms = ap.data.nu.atoms().unwrap();
        assert_eq!(atoms.len(), 1);
        assert!((atoms[0].z[0] - 0.1).abs() < 1e-15);
        assert!((atoms[0].w - 100.0).abs() < 1e-12);
    }

    #[test]
    fn atoms_are_filtered() {
        let data = LevyData::with_measure(
            1,
            LevyMeasure::Atoms(vec![Atom::new(vec![0.05], 1.0), Atom::new(vec![2.0], 0.5)]),
        );
        let ap = approximate(&data, &Modulator::identity(), 0.1).unwrap();
        assert_eq!(ap.data.nu.atoms().unwrap(), &[Atom::new(vec![2.0], 0.5)]);
    }

    #[test]
    fn eps_beyond_outer_radius() {
        let data = LevyData::with_measure(1, LevyMeasure::ClosedFormStable { alpha: 0.5, dim: 1 });
        assert!(matches!(
            approximate(&data, &Modulator::identity(), 100.0),
            Err(Error::EpsTooLarge { .. })
        ));
    }

    #[test]
    fn stable_truncation_converges() {
        let data = LevyData::with_measure(1, LevyMeasure::ClosedFormStable { alpha: 0.5, dim: 1 });
        let mut last = f64::INFINITY;
        for eps in [0.1, 0.01, 0.001] {
            let ap = approximate(&data, &Modulator::identity(), eps).unwrap();
            let err = (psi(&ap.data, &[1.0]).unwrap() + 1.0).norm();
            assert!(err < last, "eps={eps}: {err} ≥ {last}");
            last = err;
        }
        assert!(last < 1e-3);
    }

    #[test]
    fn drift_examples() {
        let mk = |z: f64, g: f64| {
            let mut d = LevyData::with_measure(1, LevyMeasure::Atoms(vec![Atom::new(vec![z], 1.0)]));
            d.gamma = vec![g];
            drift_reduce(&d).unwrap().1[0]
        };
        assert_eq!(mk(2.0, 0.0), 0.0);
        assert_eq!(mk(0.5, 0.0), -0.5);
        assert_eq!(mk(0.5, 1.0), 0.5);
    }

    #[test]
    fn drift_reduction_reconstructs_psi() {
        let mut d = LevyData::with_measure(
            1,
            LevyMeasure::Atoms(vec![Atom::new(vec![0.3], 1.2), Atom::new(vec![-1.0], 0.4), Atom::new(vec![2.5], 0.7)]),
        );
        d.gamma = vec![0.8];
        let (pj, h) = drift_reduce(&d).unwrap();
        for z in [-3.1, 0.2, 1.0, 7.5] {
            let want = psi(&d, &[z]).unwrap();
            let got = pj.exponent(&[z]) + C64::new(0.0, z * h[0]);
            assert!((want - got).norm() < 1e-12);
        }
    }
}
