//! The fixed set of atomic configurations used by the MC checks.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::jump::{JumpProblem, XRule};
use crate::error::Result;
use crate::levy::{Atom, JumpModulator, LevyData, LevyMeasure, Modulator, SphereModulator};
use crate::spectral::{pairing, SampledField};
use crate::symbol::{evaluate_grid, GridSpec, SymbolSpec};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn table(values: Vec<C64>) -> JumpModulator {
    JumpModulator::Table {
        values,
        elsewhere: None,
    }
}

fn scalar(v: f64) -> DMatrix<f64> {
    DMatrix::from_element(1, 1, v)
}

/// Named configuration with its preferred x-rule.
#[derive(Clone, Debug)]
pub struct Config {
    pub name: &'static str,
    pub problem: JumpProblem,
    pub x_rule: XRule,
}

fn line_grid() -> GridSpec {
    GridSpec::cube(1, 16.0, 128).expect("valid grid")
}

fn one_dim(name: &'static str, atoms: Vec<Atom>, a: f64, b: f64, gamma: f64, phi: JumpModulator, g_center: f64) -> Config {
    let mut data = LevyData::with_measure(1, LevyMeasure::Atoms(atoms));
    data.a = scalar(a);
    data.b = scalar(b);
    data.gamma = vec![gamma];
    let f = SampledField::gaussian(line_grid(), &[0.0], 1.0).expect("valid field");
    let g = SampledField::gaussian(line_grid(), &[g_center], 1.0).expect("valid field");
    Config {
        name,
        problem: JumpProblem { data, phi, f, g },
        x_rule: XRule::default(),
    }
}

/// Six configurations: single and multi-atom ν, A ≠ B, drift, complex φ,
/// and one two-dimensional case.
pub fn pairing_matrix() -> Vec<Config> {
    let mut out = vec![
        one_dim("unit-atom", vec![Atom::new(vec![1.0], 1.0)], 1.0, 1.0, 0.0, JumpModulator::Constant(c(1.0, 0.0)), 0.0),
        one_dim(
            "two-atoms-reflected",
            vec![Atom::new(vec![1.0], 0.7), Atom::new(vec![-2.0], 0.3)],
            1.0,
            -1.0,
            0.0,
            table(vec![c(0.5, 0.0), c(0.0, -0.8)]),
            0.0,
        ),
        one_dim(
            "symmetric-pair",
            vec![Atom::new(vec![0.5], 2.0), Atom::new(vec![-0.5], 2.0)],
            1.0,
            1.0,
            0.0,
            table(vec![c(0.0, 1.0), c(0.3, 0.0)]),
            0.5,
        ),
        one_dim(
            "drift-scaled",
            vec![Atom::new(vec![1.5], 0.8)],
            0.8,
            1.2,
            0.3,
            JumpModulator::Constant(C64::from_polar(0.9, std::f64::consts::FRAC_PI_3)),
            -0.5,
        ),
        one_dim(
            "three-atoms",
            vec![Atom::new(vec![0.3], 3.0), Atom::new(vec![-1.2], 0.5), Atom::new(vec![2.5], 0.4)],
            1.0,
            0.5,
            0.0,
            table(vec![c(0.2, 0.6), c(-1.0, 0.0), c(0.0, 0.7)]),
            0.0,
        ),
    ];
    let grid = GridSpec::cube(2, 12.0, 32).expect("valid grid");
    let mut data = LevyData::with_measure(
        2,
        LevyMeasure::Atoms(vec![
            Atom::new(vec![1.0, 0.0], 1.0),
            Atom::new(vec![0.0, -1.0], 0.6),
            Atom::new(vec![0.7, 0.7], 0.5),
        ]),
    );
    data.b = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    out.push(Config {
        name: "plane-swap",
        problem: JumpProblem {
            data,
            phi: table(vec![c(0.6, 0.0), c(0.0, 0.9), c(-0.5, -0.5)]),
            f: SampledField::gaussian(grid.clone(), &[0.0, 0.0], 1.5).expect("valid field"),
            g: SampledField::gaussian(grid, &[0.5, -0.5], 1.5).expect("valid field"),
        },
        x_rule: XRule::Spectral,
    });
    out
}

impl JumpProblem {
    /// Symbol of the pairing in q-form.
    pub fn symbol_spec(&self) -> SymbolSpec {
        SymbolSpec::QForm {
            data: self.data.clone(),
            modulator: Modulator {
                phi: self.phi.clone(),
                psi: SphereModulator::Table(Vec::new()),
            },
            u: 1.0,
        }
    }

    /// Spectral side ∫ (Mf) g dx.
    pub fn spectral_pairing(&self) -> Result<C64> {
        let m = evaluate_grid(&self.symbol_spec(), &self.f.grid)?;
        Ok(pairing(&m, &self.f, &self.g)?.spectral)
    }
}
