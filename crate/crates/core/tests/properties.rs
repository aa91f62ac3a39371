use levymult::io::{emit_config, parse_config, read_field, write_field};
use levymult::levy::{cross_form, cross_form_via_difference, psi};
use levymult::symbol::{q_func, symbol_integral, symbol_q};
use levymult::{Atom, GridSpec, JumpModulator, LevyData, LevyMeasure, Modulator, SampledField, SphereModulator, C64};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn atom() -> impl Strategy<Value = Atom> {
    (prop_oneof![-3.0..-0.05f64, 0.05..3.0f64], 0.05..2.0f64).prop_map(|(z, w)| Atom::new(vec![z], w))
}

fn unit_disc() -> impl Strategy<Value = C64> {
    (0.0..=1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| C64::from_polar(r, t))
}

prop_compose! {
    fn setup()(atoms in prop::collection::vec(atom(), 1..4), a in -2.0..2.0f64, b in -2.0..2.0f64, gamma in -1.0..1.0f64)
        (phi in prop::collection::vec(unit_disc(), atoms.len()), atoms in Just(atoms), a in Just(a), b in Just(b), gamma in Just(gamma))
        -> (LevyData, Modulator) {
        let mut data = LevyData::with_measure(1, LevyMeasure::Atoms(atoms));
        data.a = DMatrix::from_element(1, 1, a);
        data.b = DMatrix::from_element(1, 1, b);
        data.gamma = vec![gamma];
        let m = Modulator {
            phi: JumpModulator::Table { values: phi, elsewhere: None },
            psi: SphereModulator::Table(Vec::new()),
        };
        (data, m)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn exponent_has_nonpositive_real_part((data, _) in setup(), z in -20.0..20.0f64) {
        prop_assert!(psi(&data, &[z]).unwrap().re <= 1e-14);
    }

    #[test]
    fn symbol_is_bounded((data, m) in setup(), xi in -15.0..15.0f64) {
        prop_assert!(symbol_q(&data, &m, &[xi]).unwrap().norm() <= 1.0 + 1e-9);
    }

    #[test]
    fn forms_agree((data, m) in setup(), xi in -8.0..8.0f64) {
        let (q, i) = (symbol_q(&data, &m, &[xi]).unwrap(), symbol_integral(&data, &m, &[xi]).unwrap());
        prop_assert!((q - i).norm() <= 1e-10, "{q} vs {i}");
    }

    #[test]
    fn cross_form_is_a_difference((data, m) in setup(), z1 in -6.0..6.0f64, z2 in -6.0..6.0f64) {
        let d = cross_form(&data, &m, &[z1], &[z2]).unwrap() - cross_form_via_difference(&data, &m, &[z1], &[z2]).unwrap();
        prop_assert!(d.norm() <= 1e-10);
    }

    #[test]
    fn q_is_continuous(re in -1e-3..1e-3f64, im in -1e-3..1e-3f64) {
        let z = C64::new(re, im);
        let direct = if z.norm() > 1e-6 { (z.exp() - 1.0) / z } else { C64::new(1.0, 0.0) + z / 2.0 };
        prop_assert!((q_func(z) - direct).norm() <= 1e-9);
    }

    #[test]
    fn config_round_trip(seed in any::<u64>(), w in 0.01..5.0f64, z in 0.1..3.0f64, paths in 1usize..1_000_000, re in -1.0..1.0f64) {
        let text = format!(
            "d = 1\nn = 1\na = [[1.0]]\nb = [[-1.0]]\nseed = {seed}\n[measure]\nkind = \"atoms\"\natoms = [{{ z = [{z:?}], w = {w:?} }}]\n[modulator.phi]\nkind = \"constant\"\nvalue = [{re:?}, 0.0]\n[mc]\npaths = {paths}\n"
        );
        let cfg = parse_config(&text).unwrap();
        prop_assert_eq!(parse_config(&emit_config(&cfg)).unwrap(), cfg);
    }

    #[test]
    fn field_binary_round_trip(vals in prop::collection::vec((-1e3..1e3f64, -1e3..1e3f64), 32)) {
        let grid = GridSpec::new(vec![3.5, 1.25], vec![8, 4]).unwrap();
        let f = SampledField::new(grid, vals.iter().map(|&(a, b)| C64::new(a, b)).collect()).unwrap();
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        let back = read_field(buf.as_slice()).unwrap();
        prop_assert_eq!(back.values, f.values);
        prop_assert_eq!(back.grid, f.grid);
    }
}
