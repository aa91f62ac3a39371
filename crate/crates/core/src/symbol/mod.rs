//! Multiplier symbols m(ξ) in their various closed and integral forms.

mod grid;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::levy::{self, LevyData, LevyMeasure, Modulator};

pub use grid::{evaluate_grid, GridSpec, SymbolGrid, SYMBOL_BOUND_TOL};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Window around α = 1 where the stable symbol switches to its limit form.
pub const ALPHA_ONE_WINDOW: f64 = 1e-6;
/// Wider window where the tan-form is cross-checked against the limit form.
pub const ALPHA_ONE_CHECK_WINDOW: f64 = 1e-3;

/// q(z) = (e^z − 1)/z with q(0) = 1.
pub fn q_func(z: C64) -> C64 {
    if z.norm() < 1e-3 {
        ONE + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z / 120.0)))
    } else {
        (z.exp() - 1.0) / z
    }
}

fn neg(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| -x).collect()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn check_xi(xi: &[f64], d: usize) -> Result<()> {
    if xi.len() != d {
        return Err(Error::shape(format!("ξ has length {}, expected {d}", xi.len())));
    }
    Ok(())
}

/// The canonical q-form
/// m(ξ) = e^{Ψ(Bᵀξ)+Ψ(−Aᵀξ)} [Ψ̃(Bᵀξ−Aᵀξ) − Ψ̃(Bᵀξ) − Ψ̃(−Aᵀξ)] q(Ψ(Bᵀξ−Aᵀξ) − Ψ(Bᵀξ) − Ψ(−Aᵀξ)).
pub fn symbol_q(data: &LevyData, modulator: &Modulator, xi: &[f64]) -> Result<C64> {
    symbol_q_scaled(data, modulator, xi, 1.0)
}

/// q-form with both exponents multiplied by `u`.
pub fn symbol_q_scaled(data: &LevyData, modulator: &Modulator, xi: &[f64], u: f64) -> Result<C64> {
    check_xi(xi, data.d)?;
    let b = data.b_t(xi);
    let ma = neg(&data.a_t(xi));
    let bma: Vec<f64> = b.iter().zip(&ma).map(|(x, y)| x + y).collect();
    let (pb, pa, pba) = (
        levy::psi(data, &b)? * u,
        levy::psi(data, &ma)? * u,
        levy::psi(data, &bma)? * u,
    );
    let bracket = (levy::psi_tilde(data, modulator, &bma)?
        - levy::psi_tilde(data, modulator, &b)?
        - levy::psi_tilde(data, modulator, &ma)?)
        * u;
    if bracket == ZERO {
        return Ok(ZERO);
    }
    Ok((pb + pa).exp() * bracket * q_func(pba - pb - pa))
}

/// Ratio form with directly integrated cross forms, switching to the
/// product convention when the denominator is negligible.
pub fn symbol_integral(data: &LevyData, modulator: &Modulator, xi: &[f64]) -> Result<C64> {
    check_xi(xi, data.d)?;
    let b = data.b_t(xi);
    let ma = neg(&data.a_t(xi));
    let bma: Vec<f64> = b.iter().zip(&ma).map(|(x, y)| x + y).collect();
    let num = levy::cross_form(data, modulator, &b, &ma)?;
    let den = levy::cross_form(data, &Modulator::identity(), &b, &ma)?;
    let (pb, pa) = (levy::psi(data, &b)?, levy::psi(data, &ma)?);
    if num == ZERO {
        return Ok(ZERO);
    }
    if den.norm() < 1e-12 * (1.0 + num.norm()) {
        return Ok((pb + pa).exp() * num);
    }
    let pba = levy::psi(data, &bma)?;
    Ok((pba.exp() - (pb + pa).exp()) * num / den)
}

/// The u → ∞ limit (Ψ̃(Aᵀξ) + Ψ̃(−Aᵀξ)) / (Ψ(Aᵀξ) + Ψ(−Aᵀξ)) for A = B.
pub fn symbol_limit(data: &LevyData, modulator: &Modulator, xi: &[f64]) -> Result<C64> {
    check_xi(xi, data.d)?;
    if data.a != data.b {
        return Err(Error::RequiresEqualMatrices);
    }
    let a = data.a_t(xi);
    let p = levy::psi(data, &a)?;
    if !(p.re < 0.0) {
        return Err(Error::DegenerateDenominator { re_psi: p.re });
    }
    let ma = neg(&a);
    let num = levy::psi_tilde(data, modulator, &a)? + levy::psi_tilde(data, modulator, &ma)?;
    let den = p + levy::psi(data, &ma)?;
    Ok(num / den)
}

/// Largest singular value of K; must not exceed 1 + 1e-12.
pub fn check_contraction(k: &DMatrix<C64>) -> Result<f64> {
    if k.nrows() != k.ncols() {
        return Err(Error::shape("K must be square"));
    }
    if k.is_empty() {
        return Ok(0.0);
    }
    let norm = k.clone().svd(false, false).singular_values.max();
    if norm > 1.0 + 1e-12 {
        return Err(Error::KNormExceedsOne { norm });
    }
    Ok(norm)
}

/// (a, Kb) without conjugation.
fn bilinear(a: &[f64], k: &DMatrix<C64>, b: &[f64]) -> C64 {
    let mut acc = ZERO;
    for i in 0..a.len() {
        if a[i] == 0.0 {
            continue;
        }
        let kb: C64 = (0..b.len()).map(|j| k[(i, j)] * b[j]).sum();
        acc += kb * a[i];
    }
    acc
}

fn gaussian_shapes(a: &DMatrix<f64>, b: &DMatrix<f64>, k: &DMatrix<C64>) -> Result<()> {
    if a.shape() != b.shape() || k.nrows() != a.ncols() || k.ncols() != a.ncols() {
        return Err(Error::shape(format!(
            "A {:?}, B {:?}, K {:?} are not compatible",
            a.shape(),
            b.shape(),
            k.shape()
        )));
    }
    Ok(())
}

/// Gaussian symbol with variance scale s:
/// [e^{−s|a−b|²} − e^{−s(|a|²+|b|²)}](a, Kb)/(a, b), a = Aᵀξ, b = Bᵀξ,
/// and e^{−s(|a|²+|b|²)}(a, Kb) when (a, b) vanishes. s = 1 is the form of
/// the theorem; s = 1/2 is the one produced by standard Brownian motion.
pub fn symbol_gaussian(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    k: &DMatrix<C64>,
    xi: &[f64],
    scale: f64,
) -> Result<C64> {
    gaussian_shapes(a, b, k)?;
    check_contraction(k)?;
    gaussian_unchecked(a, b, k, xi, scale)
}

fn gaussian_unchecked(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    k: &DMatrix<C64>,
    xi: &[f64],
    scale: f64,
) -> Result<C64> {
    check_xi(xi, a.nrows())?;
    let av = levy::mat_t_vec(a, xi);
    let bv = levy::mat_t_vec(b, xi);
    let (na, nb) = (levy::norm(&av), levy::norm(&bv));
    let akb = bilinear(&av, k, &bv);
    let both = (-scale * (na * na + nb * nb)).exp();
    let ab = levy::dot(&av, &bv);
    if na == 0.0 || nb == 0.0 || ab.abs() < 1e-14 * na * nb {
        return Ok(akb * both);
    }
    let diff = levy::norm(&sub(&av, &bv));
    Ok(akb * (((-scale * diff * diff).exp() - both) / ab))
}

/// (Aᵀξ, KAᵀξ)/(Aᵀξ, Aᵀξ).
pub fn symbol_gaussian_limit(a: &DMatrix<f64>, k: &DMatrix<C64>, xi: &[f64]) -> Result<C64> {
    gaussian_shapes(a, a, k)?;
    check_xi(xi, a.nrows())?;
    let av = levy::mat_t_vec(a, xi);
    let n2 = levy::dot(&av, &av);
    if n2 == 0.0 {
        return Err(Error::ZeroFrequencyVector);
    }
    Ok(bilinear(&av, k, &av) / n2)
}

fn stable_limit_form(xi: f64) -> C64 {
    C64::new(0.0, 4.0 * std::f64::consts::LN_2 / std::f64::consts::PI * xi * (-2.0 * xi.abs()).exp())
}

fn stable_tan_form(alpha: f64, xi: f64) -> C64 {
    let t = (std::f64::consts::FRAC_PI_2 * alpha).tan();
    let a = xi.abs();
    let v = t * xi.signum() * ((-(2.0 * a).powf(alpha)).exp() - (-2.0 * a.powf(alpha)).exp());
    C64::new(0.0, v)
}

/// i tan(πα/2) sgn(ξ)(e^{−|2ξ|^α} − e^{−2|ξ|^α}), with the α → 1 limit
/// (4i ln 2/π) ξ e^{−2|ξ|} inside the dispatch window.
pub fn symbol_stable(alpha: f64, xi: f64) -> Result<C64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::AlphaOutOfRange { alpha });
    }
    if xi == 0.0 {
        return Ok(ZERO);
    }
    let gap = (alpha - 1.0).abs();
    if gap < ALPHA_ONE_WINDOW {
        return Ok(stable_limit_form(xi));
    }
    let m = stable_tan_form(alpha, xi);
    if gap < ALPHA_ONE_CHECK_WINDOW {
        let lim = stable_limit_form(xi);
        let rel = (m - lim).norm() / lim.norm().max(f64::MIN_POSITIVE);
        if rel > 1e-4 {
            log::warn!("stable symbol at alpha = {alpha}, xi = {xi}: tan-form and limit form differ by {rel:.2e}");
        }
    }
    Ok(m)
}

/// ln(1 + ξ_j^{-2}) / Σ_k ln(1 + ξ_k^{-2}); `j` counts axes from 1.
pub fn preset_log_symbol(j: usize, d: usize, xi: &[f64]) -> Result<f64> {
    check_xi(xi, d)?;
    check_axis(j, d)?;
    if let Some(axis) = xi.iter().position(|&x| x == 0.0) {
        return Err(Error::ZeroCoordinate { axis: axis + 1 });
    }
    let term = |x: f64| {
        let a = x.abs();
        if a < 1.0 {
            (a * a).ln_1p() - 2.0 * a.ln()
        } else {
            (1.0 / (a * a)).ln_1p()
        }
    };
    let total: f64 = xi.iter().map(|&x| term(x)).sum();
    Ok(term(xi[j - 1]) / total)
}

/// −2ξ_jξ_k/|ξ|²; axes count from 1.
pub fn preset_riesz_symbol(j: usize, k: usize, d: usize, xi: &[f64]) -> Result<f64> {
    check_xi(xi, d)?;
    check_axis(j, d)?;
    check_axis(k, d)?;
    let n2: f64 = xi.iter().map(|x| x * x).sum();
    if n2 == 0.0 {
        return Err(Error::ZeroFrequencyVector);
    }
    Ok(-2.0 * xi[j - 1] * xi[k - 1] / n2)
}

fn check_axis(j: usize, d: usize) -> Result<()> {
    if j == 0 || j > d {
        return Err(Error::invalid(format!("axis {j} outside 1..={d}")));
    }
    Ok(())
}

/// c_α = Γ((d+α)/2) 2^α π^{−d/2} / |Γ(−α/2)|, the density constant of the
/// isotropic α-stable Lévy measure with Ψ(ξ) = −|ξ|^α.
pub fn stable_constant(alpha: f64, d: usize) -> f64 {
    use statrs::function::gamma::gamma;
    let df = d as f64;
    gamma(0.5 * (df + alpha)) * 2f64.powf(alpha) * std::f64::consts::PI.powf(-0.5 * df)
        / gamma(-0.5 * alpha).abs()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    Log,
    Riesz,
}

/// A symbol evaluator tagged with the formula it uses.
#[derive(Clone, Debug, PartialEq)]
pub enum SymbolSpec {
    QForm {
        data: LevyData,
        modulator: Modulator,
        u: f64,
    },
    IntegralForm {
        data: LevyData,
        modulator: Modulator,
    },
    LimitForm {
        data: LevyData,
        modulator: Modulator,
    },
    GaussianForm {
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        k: DMatrix<C64>,
        scale: f64,
    },
    GaussianLimitForm {
        a: DMatrix<f64>,
        k: DMatrix<C64>,
    },
    StableClosedForm {
        alpha: f64,
    },
    NamedPreset {
        preset: Preset,
        d: usize,
        j: usize,
        k: usize,
    },
}

impl SymbolSpec {
    pub fn name(&self) -> &'static str {
        match self {
            SymbolSpec::QForm { .. } => "q-form",
            SymbolSpec::IntegralForm { .. } => "integral-form",
            SymbolSpec::LimitForm { .. } => "limit-form",
            SymbolSpec::GaussianForm { .. } => "gaussian",
            SymbolSpec::GaussianLimitForm { .. } => "gaussian-limit",
            SymbolSpec::StableClosedForm { .. } => "stable",
            SymbolSpec::NamedPreset {
                preset: Preset::Log, ..
            } => "log-preset",
            SymbolSpec::NamedPreset {
                preset: Preset::Riesz,
                ..
            } => "riesz-preset",
        }
    }

    /// Frequency dimension d.
    pub fn dim(&self) -> usize {
        match self {
            SymbolSpec::QForm { data, .. }
            | SymbolSpec::IntegralForm { data, .. }
            | SymbolSpec::LimitForm { data, .. } => data.d,
            SymbolSpec::GaussianForm { a, .. } | SymbolSpec::GaussianLimitForm { a, .. } => a.nrows(),
            SymbolSpec::StableClosedForm { .. } => 1,
            SymbolSpec::NamedPreset { d, .. } => *d,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SymbolSpec::QForm { data, modulator, u } => {
                data.validate()?;
                modulator.validate(data)?;
                if !(*u > 0.0 && u.is_finite()) {
                    return Err(Error::invalid(format!("u must be positive, got {u}")));
                }
                Ok(())
            }
            SymbolSpec::IntegralForm { data, modulator } => {
                data.validate()?;
                modulator.validate(data)
            }
            SymbolSpec::LimitForm { data, modulator } => {
                data.validate()?;
                modulator.validate(data)?;
                if data.a != data.b {
                    return Err(Error::RequiresEqualMatrices);
                }
                Ok(())
            }
            SymbolSpec::GaussianForm { a, b, k, scale } => {
                gaussian_shapes(a, b, k)?;
                check_contraction(k)?;
                if !(*scale > 0.0) {
                    return Err(Error::invalid("Gaussian scale must be positive"));
                }
                Ok(())
            }
            SymbolSpec::GaussianLimitForm { a, k } => {
                gaussian_shapes(a, a, k)?;
                check_contraction(k).map(|_| ())
            }
            SymbolSpec::StableClosedForm { alpha } => {
                if !(*alpha > 0.0 && *alpha < 2.0) {
                    return Err(Error::AlphaOutOfRange { alpha: *alpha });
                }
                Ok(())
            }
            SymbolSpec::NamedPreset { preset, d, j, k } => {
                check_axis(*j, *d)?;
                if *preset == Preset::Riesz {
                    check_axis(*k, *d)?;
                }
                Ok(())
            }
        }
    }

    /// m(ξ); errors at points where the formula is undefined.
    pub fn eval(&self, xi: &[f64]) -> Result<C64> {
        match self {
            SymbolSpec::QForm { data, modulator, u } => symbol_q_scaled(data, modulator, xi, *u),
            SymbolSpec::IntegralForm { data, modulator } => symbol_integral(data, modulator, xi),
            SymbolSpec::LimitForm { data, modulator } => symbol_limit(data, modulator, xi),
            SymbolSpec::GaussianForm { a, b, k, scale } => gaussian_unchecked(a, b, k, xi, *scale),
            SymbolSpec::GaussianLimitForm { a, k } => symbol_gaussian_limit(a, k, xi),
            SymbolSpec::StableClosedForm { alpha } => {
                check_xi(xi, 1)?;
                symbol_stable(*alpha, xi[0])
            }
            SymbolSpec::NamedPreset {
                preset: Preset::Log,
                d,
                j,
                ..
            } => preset_log_symbol(*j, *d, xi).map(|v| C64::new(v, 0.0)),
            SymbolSpec::NamedPreset {
                preset: Preset::Riesz,
                d,
                j,
                k,
            } => preset_riesz_symbol(*j, *k, *d, xi).map(|v| C64::new(v, 0.0)),
        }
    }

    /// m(ξ) with the grid conventions at singular frequencies: degree-0
    /// symbols are 0 at the origin (limit forms, Riesz); the log preset uses
    /// its limit along coordinate axes, 1/#{zero coordinates} when ξ_j = 0.
    pub fn eval_on_grid(&self, xi: &[f64]) -> Result<C64> {
        let origin = xi.iter().all(|&x| x == 0.0);
        match self {
            SymbolSpec::LimitForm { .. } | SymbolSpec::GaussianLimitForm { .. } if origin => Ok(ZERO),
            SymbolSpec::GaussianLimitForm { a, .. } if levy::norm(&levy::mat_t_vec(a, xi)) == 0.0 => Ok(ZERO),
            SymbolSpec::LimitForm { data, .. } if levy::norm(&data.a_t(xi)) == 0.0 => Ok(ZERO),
            SymbolSpec::NamedPreset {
                preset: Preset::Riesz,
                ..
            } if origin => Ok(ZERO),
            SymbolSpec::NamedPreset {
                preset: Preset::Log,
                j,
                ..
            } if xi.contains(&0.0) => {
                let zeros = xi.iter().filter(|&&x| x == 0.0).count();
                Ok(C64::new(if xi[*j - 1] == 0.0 { 1.0 / zeros as f64 } else { 0.0 }, 0.0))
            }
            _ => self.eval(xi),
        }
    }
}

/// Atoms-only data used by several presets: the single unit atom with A = B = I.
pub fn single_atom_data() -> LevyData {
    LevyData::with_measure(1, LevyMeasure::Atoms(vec![levy::Atom::new(vec![1.0], 1.0)]))
}
