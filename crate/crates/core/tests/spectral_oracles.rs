use levymult::spectral::{
    apply_multiplier, lp_norm, norm_probe, p_star_minus_one, pairing, transform_forward, Semigroup,
};
use levymult::symbol::{evaluate_grid, symbol_stable, Preset};
use levymult::{GridSpec, LevyData, LevyMeasure, Modulator, SampledField, SymbolGrid, SymbolSpec, C64};
use nalgebra::DMatrix;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

// Whole-plane second-order Riesz transform R₁R₂ of e^{−|x|²/2}, symbol −2ξ₁ξ₂/|ξ|².
fn riesz_gaussian(x: &[f64]) -> f64 {
    let r2 = x[0] * x[0] + x[1] * x[1];
    if r2 < 1e-12 {
        return 0.0;
    }
    let e = (-0.5 * r2).exp();
    let radial = if r2 < 1e-4 {
        r2 / 8.0
    } else {
        2.0 / r2 * (1.0 - e) - e
    };
    2.0 * x[0] * x[1] / r2 * radial
}

#[test]
fn riesz_closed_form_against_radial_quadrature() {
    // sin 2θ ∫_0^∞ e^{−ρ²/2} J₂(ρr) ρ dρ with J₂ from its integral representation
    let j2 = |z: f64| {
        let n = 400;
        let h = PI / n as f64;
        (0..n)
            .map(|i| {
                let t = (i as f64 + 0.5) * h;
                (2.0 * t - z * t.sin()).cos()
            })
            .sum::<f64>()
            * h
            / PI
    };
    for x in [[1.0f64, 1.0], [0.5, -1.2], [2.0, 0.3]] {
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        let n = 4000;
        let h = 12.0 / n as f64;
        let radial: f64 = (0..n)
            .map(|i| {
                let p = (i as f64 + 0.5) * h;
                (-0.5 * p * p).exp() * j2(p * r) * p
            })
            .sum::<f64>()
            * h;
        let want = 2.0 * x[0] * x[1] / (r * r) * radial;
        assert!((riesz_gaussian(&x) - want).abs() < 1e-6, "{x:?}");
    }
}

#[test]
fn riesz_of_gaussian_bump() {
    let grid = GridSpec::cube(2, 160.0, 512).unwrap();
    let f = SampledField::gaussian(grid.clone(), &[0.0, 0.0], 1.0).unwrap();
    let spec = SymbolSpec::NamedPreset {
        preset: Preset::Riesz,
        d: 2,
        j: 1,
        k: 2,
    };
    let m = evaluate_grid(&spec, &grid).unwrap();
    let out = apply_multiplier(&m, &f).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..grid.len() {
        let x = grid.position(i);
        if x[0].abs() > 2.0 || x[1].abs() > 2.0 {
            continue;
        }
        worst = worst.max((out.values[i] - c(riesz_gaussian(&x), 0.0)).norm());
    }
    assert!(worst < 1e-6, "{worst}");
}

#[test]
fn constant_multipliers() {
    let grid = GridSpec::new(vec![12.0, 8.0], vec![64, 32]).unwrap();
    let f = SampledField::from_fn(grid.clone(), |x| c((-x[0] * x[0]).exp(), x[1] * (-x[1] * x[1]).exp())).unwrap();
    let one = apply_multiplier(&SymbolGrid::constant(grid.clone(), c(1.0, 0.0)).unwrap(), &f).unwrap();
    for (a, b) in one.values.iter().zip(&f.values) {
        assert!((a - b).norm() < 1e-12);
    }
    let zero = apply_multiplier(&SymbolGrid::constant(grid, c(0.0, 0.0)).unwrap(), &f).unwrap();
    assert!(zero.values.iter().all(|v| v.norm() == 0.0));
}

#[test]
fn zero_field_transforms_to_zero() {
    let f = SampledField::zeros(GridSpec::cube(1, 10.0, 64).unwrap()).unwrap();
    assert!(transform_forward(&f).values.iter().all(|v| v.norm() == 0.0));
}

#[test]
fn identity_pairing_is_the_integral() {
    let grid = GridSpec::cube(1, 40.0, 1024).unwrap();
    let f = SampledField::gaussian(grid.clone(), &[0.0], 1.0).unwrap();
    let g = SampledField::gaussian(grid.clone(), &[1.0], 1.0).unwrap();
    let p = pairing(&SymbolGrid::constant(grid, c(1.0, 0.0)).unwrap(), &f, &g).unwrap();
    let want = PI.sqrt() * (-0.25f64).exp();
    assert!((p.spatial - c(want, 0.0)).norm() < 1e-12);
    assert!((p.spectral - c(want, 0.0)).norm() < 1e-12);
}

#[test]
fn riesz_pairing_evaluations_agree() {
    let grid = GridSpec::cube(2, 16.0, 64).unwrap();
    let f = SampledField::gaussian(grid.clone(), &[0.0, 0.0], 1.0).unwrap();
    let spec = SymbolSpec::NamedPreset {
        preset: Preset::Riesz,
        d: 2,
        j: 1,
        k: 2,
    };
    let m = evaluate_grid(&spec, &grid).unwrap();
    let p = pairing(&m, &f, &f).unwrap();
    assert!((p.spatial - p.spectral).norm() < 1e-10);
}

#[test]
fn antisymmetric_symbol_gives_imaginary_pairing() {
    let grid = GridSpec::cube(1, 32.0, 256).unwrap();
    let m = evaluate_grid(&SymbolSpec::StableClosedForm { alpha: 0.5 }, &grid).unwrap();
    let f = SampledField::gaussian(grid.clone(), &[0.0], 1.0).unwrap();
    let p = pairing(&m, &f, &f).unwrap();
    assert!(p.spectral.re.abs() < 1e-13);
    // f real and even, g imaginary and shifted: a nonzero, purely imaginary value
    let g = SampledField::gaussian(grid, &[0.8], 1.0).unwrap().scale(c(0.0, 1.0));
    let p = pairing(&m, &f, &g).unwrap();
    assert!(p.spectral.im.abs() > 1e-3);
    assert!(p.spectral.re.abs() < 1e-13 * p.spectral.im.abs().max(1.0));
}

#[test]
fn lp_norm_of_unit_indicator() {
    let grid = GridSpec::cube(1, 4.0, 64).unwrap();
    let f = SampledField::from_fn(grid, |x| c(if (-0.5..0.5).contains(&x[0]) { 1.0 } else { 0.0 }, 0.0)).unwrap();
    for p in [1.0, 1.5, 2.0, 3.0, 4.0] {
        assert!((lp_norm(&f, p) - 1.0).abs() < 1e-12, "p = {p}");
    }
    assert!((lp_norm(&f.scale(c(3.0, 4.0)), 2.5) - 5.0).abs() < 1e-12);
}

#[test]
fn probe_stays_below_bound() {
    let grid = GridSpec::cube(1, 20.0, 256).unwrap();
    let m = evaluate_grid(&SymbolSpec::StableClosedForm { alpha: 0.5 }, &grid).unwrap();
    let r = norm_probe(&m, 4.0, 500, 11);
    assert_eq!(r.bound, 3.0);
    assert!(r.best_ratio < 3.0 && r.pass);
    let r2 = norm_probe(&m, 2.0, 200, 11);
    assert!(r2.best_ratio <= m.max_abs * (1.0 + 1e-12));
    let one = SymbolGrid::constant(grid, c(1.0, 0.0)).unwrap();
    for p in [1.25, 3.0] {
        let r = norm_probe(&one, p, 20, 2);
        assert!((r.best_ratio - 1.0).abs() < 1e-12 && r.best_ratio <= p_star_minus_one(p));
    }
}

fn unit_atom() -> LevyData {
    LevyData::with_measure(1, LevyMeasure::Atoms(vec![levymult::Atom::new(vec![1.0], 1.0)]))
}

#[test]
fn semigroup_at_zero_interpolates() {
    let grid = GridSpec::cube(1, 40.0, 1024).unwrap();
    let f = SampledField::gaussian(grid, &[0.3], 1.0).unwrap();
    let sg = Semigroup::new(&f, &DMatrix::from_element(1, 1, 1.0), &unit_atom(), 0.0).unwrap();
    for x in [-1.234, 0.0101, 0.3, 2.71828] {
        let want = (-0.5 * (x - 0.3f64).powi(2)).exp();
        assert!((sg.eval(&[x]) - c(want, 0.0)).norm() < 1e-8, "{x}");
    }
}

#[test]
fn semigroup_sup_bound() {
    let grid = GridSpec::cube(1, 40.0, 512).unwrap();
    let f = SampledField::gaussian(grid.clone(), &[0.0], 1.0).unwrap();
    let fh = transform_forward(&f);
    let dxi = 2.0 * PI / 40.0;
    let cap: f64 = fh.values.iter().map(|v| v.norm()).sum::<f64>() * dxi / (2.0 * PI);
    let sg = Semigroup::new(&f, &DMatrix::from_element(1, 1, 1.0), &unit_atom(), 0.6).unwrap();
    assert!(sg.sup_bound() <= cap * (1.0 + 1e-12));
    for i in (0..grid.len()).step_by(7) {
        assert!(sg.eval(&grid.position(i)).norm() <= sg.sup_bound());
    }
}

#[test]
fn grid_tabulation_examples() {
    let grid = GridSpec::cube(1, 20.0, 256).unwrap();
    let s = evaluate_grid(&SymbolSpec::StableClosedForm { alpha: 0.5 }, &grid).unwrap();
    assert!(s.max_abs < 1.0);
    let zero = SymbolSpec::QForm {
        data: unit_atom(),
        modulator: Modulator::zero(),
        u: 1.0,
    };
    assert!(evaluate_grid(&zero, &grid).unwrap().values.iter().all(|v| v.norm() == 0.0));
    let plane = GridSpec::cube(2, 8.0, 16).unwrap();
    let k = DMatrix::from_element(2, 2, c(0.0, 0.0)) + DMatrix::identity(2, 2).map(|v: f64| c(v, 0.0));
    let lim = evaluate_grid(&SymbolSpec::GaussianLimitForm { a: DMatrix::identity(2, 2), k }, &plane).unwrap();
    for i in 0..plane.len() {
        let origin = plane.frequency(i).iter().all(|&x| x == 0.0);
        let want = if origin { 0.0 } else { 1.0 };
        assert!((lim.values[i] - c(want, 0.0)).norm() < 1e-15);
    }
}

#[test]
fn stable_symbol_values() {
    let m = symbol_stable(0.5, 1.0).unwrap();
    let want = (-(2f64.sqrt())).exp() - (-2f64).exp();
    assert!((m - c(0.0, want)).norm() < 1e-15);
    assert!((m.im - 0.107782).abs() < 1e-6);
    let m1 = symbol_stable(1.0, 1.0).unwrap();
    assert!((m1.im - 0.119440).abs() < 1e-6 && m1.re == 0.0);
    for alpha in [0.3, 0.9, 1.4, 1.9] {
        for xi in [0.2, 1.0, 3.5] {
            let (p, n) = (symbol_stable(alpha, xi).unwrap(), symbol_stable(alpha, -xi).unwrap());
            assert_eq!(p, -n);
            assert_ne!(p, n);
        }
    }
}
