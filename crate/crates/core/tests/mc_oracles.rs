use levymult::mc::{
    brownian_pairing, check_subordination, estimate_pairing, gaussian_qv_gap, lp_isometry, martingale_check, pairing_matrix,
    path_rng, simulate_cpp, subordination_check, CompoundPoisson, Compensator, GaussianProblem, JumpEngine, JumpPath,
    JumpProblem, McOptions, XRule,
};
use levymult::spectral::semigroup_eval;
use levymult::{Atom, GridSpec, JumpModulator, LevyData, LevyMeasure, SampledField, C64};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn scalar(v: f64) -> DMatrix<f64> {
    DMatrix::from_element(1, 1, v)
}

fn bump(center: f64) -> SampledField {
    SampledField::gaussian(GridSpec::cube(1, 16.0, 128).unwrap(), &[center], 1.0).unwrap()
}

fn problem(atoms: Vec<Atom>, a: f64, b: f64, gamma: f64, phi: JumpModulator) -> JumpProblem {
    let mut data = LevyData::with_measure(1, LevyMeasure::Atoms(atoms));
    data.a = scalar(a);
    data.b = scalar(b);
    data.gamma = vec![gamma];
    JumpProblem {
        data,
        phi,
        f: bump(0.0),
        g: bump(0.4),
    }
}

fn unit(phi: C64) -> JumpProblem {
    problem(vec![Atom::new(vec![1.0], 1.0)], 1.0, 1.0, 0.0, JumpModulator::Constant(phi))
}

fn config(name: &str) -> JumpProblem {
    pairing_matrix().into_iter().find(|c| c.name == name).unwrap().problem
}

#[test]
fn jump_count_has_poisson_mean() {
    let sampler = CompoundPoisson::new(&[Atom::new(vec![1.0], 2.0)]).unwrap();
    let n = 100_000;
    let total: usize = (0..n).map(|i| sampler.sample(&mut path_rng(5, i as u64)).len()).sum();
    let mean = total as f64 / n as f64;
    assert!((mean - 2.0).abs() < 3.0 * (2.0f64 / n as f64).sqrt(), "{mean}");
}

#[test]
fn cpp_path_is_reproducible() {
    let atoms = [Atom::new(vec![1.0], 0.7), Atom::new(vec![-2.0], 0.3)];
    let p = simulate_cpp(&atoms, 17).unwrap();
    assert_eq!(p, simulate_cpp(&atoms, 17).unwrap());
    assert!(p.times.windows(2).all(|w| w[0] <= w[1]));
    assert!(p.times.iter().all(|&t| t > 0.0 && t <= 1.0));
}

#[test]
fn zero_mass_is_rejected() {
    assert!(CompoundPoisson::new(&[]).is_err());
}

#[test]
fn no_jump_path() {
    let path = JumpPath {
        times: vec![],
        marks: vec![],
        intensity: 1.0,
    };
    for atom in [0.5, 2.0] {
        let pr = problem(vec![Atom::new(vec![atom], 1.0)], 1.0, 1.0, 0.0, JumpModulator::Constant(c(1.0, 0.0)));
        let e = JumpEngine::new(&pr).unwrap();
        let x = 0.3;
        let tr = e.parabolic_trace(&path, &[x]);
        // F_t = P_{1−t} f(x + ht): no jumps, but the semigroup and the drift still act
        let h = e.drift[0];
        assert_eq!(h, if atom <= 1.0 { -atom } else { 0.0 });
        let f0 = semigroup_eval(&pr.f, &pr.data.a, &pr.data, 1.0, &[x]).unwrap();
        let f1 = (-0.5 * (x + h) * (x + h)).exp();
        assert!((tr.start - f0).norm() < 1e-10);
        assert!((tr.end - c(f1, 0.0)).norm() < 1e-10);
        assert!(tr.times.is_empty());
        assert!((tr.final_qv() - tr.start.norm_sqr()).abs() < 1e-15);
        let fg = e.parabolic_trace_g(&path, &[x]);
        let g = e.general_trace(&path, &[x], &Compensator::Exact);
        assert!((g.end - (fg.end - fg.start)).norm() < 1e-10);
    }
}

#[test]
fn parabolic_trace_follows_the_semigroup() {
    let pr = problem(
        vec![Atom::new(vec![0.8], 1.5), Atom::new(vec![-1.5], 0.5)],
        1.3,
        1.0,
        0.2,
        JumpModulator::Constant(c(1.0, 0.0)),
    );
    let e = JumpEngine::new(&pr).unwrap();
    let x = [0.25];
    for i in 0..20 {
        let path = e.sample_path(3, i);
        let tr = e.parabolic_trace(&path, &x);
        for (k, &t) in tr.times.iter().enumerate() {
            let y = path.position(e.atoms(), &e.drift, t);
            let pos = [x[0] + 1.3 * y[0]];
            let before = [pos[0] - 1.3 * e.atoms()[path.marks[k]].z[0]];
            let right = semigroup_eval(&pr.f, &pr.data.a, &pr.data, 1.0 - t, &pos).unwrap();
            let left = semigroup_eval(&pr.f, &pr.data.a, &pr.data, 1.0 - t, &before).unwrap();
            assert!((tr.right[k] - right).norm() < 1e-9);
            assert!((tr.left[k] - left).norm() < 1e-9);
        }
        let y1 = path.position(e.atoms(), &e.drift, 1.0);
        let end = semigroup_eval(&pr.f, &pr.data.a, &pr.data, 0.0, &[x[0] + 1.3 * y1[0]]).unwrap();
        assert!((tr.end - end).norm() < 1e-9);
    }
}

#[test]
fn martingale_property() {
    let e = JumpEngine::new(&config("two-atoms-reflected")).unwrap();
    let xs = vec![vec![-1.0], vec![0.0], vec![0.7]];
    for (f, g) in martingale_check(&e, &xs, 100_000, 21, 8) {
        assert!(f.consistent_with(c(0.0, 0.0), 3.0), "{f:?}");
        assert!(g.consistent_with(c(0.0, 0.0), 3.0), "{g:?}");
    }
}

#[test]
fn unit_modulator_gives_increment_of_f() {
    let pr = problem(
        vec![Atom::new(vec![1.0], 0.9), Atom::new(vec![-0.4], 1.1)],
        1.0,
        0.7,
        0.1,
        JumpModulator::Constant(c(1.0, 0.0)),
    );
    let e = JumpEngine::new(&pr).unwrap();
    for i in 0..50 {
        let path = e.sample_path(8, i);
        for x in [-0.6, 0.0, 1.1] {
            let fg = e.parabolic_trace_g(&path, &[x]);
            let g = e.general_trace(&path, &[x], &Compensator::Exact);
            assert!((g.end - (fg.end - fg.start)).norm() < 1e-10);
            let g8 = e.general_trace(&path, &[x], &Compensator::nodes(8));
            assert!((g8.end - g.end).norm() < 1e-6);
        }
    }
}

#[test]
fn zero_modulator_gives_zero() {
    let pr = unit(c(0.0, 0.0));
    let e = JumpEngine::new(&pr).unwrap();
    for i in 0..20 {
        let tr = e.general_trace(&e.sample_path(1, i), &[0.2], &Compensator::nodes(8));
        assert_eq!(tr.end, c(0.0, 0.0));
        assert!(tr.increments().iter().all(|v| v.norm() == 0.0));
    }
    let est = estimate_pairing(
        &pr,
        &McOptions {
            paths: 5_000,
            seed: 4,
            ..McOptions::default()
        },
    )
    .unwrap();
    assert!(est.product.consistent_with(c(0.0, 0.0), 3.0));
}

#[test]
fn modulus_of_phi_scales_increments() {
    for (phi, ratio) in [(C64::from_polar(1.0, 0.9), 1.0), (c(0.0, 0.5), 0.25)] {
        let mut pr = unit(phi);
        pr.g = pr.f.clone();
        let e = JumpEngine::new(&pr).unwrap();
        for i in 0..30 {
            let path = e.sample_path(2, i);
            let f = e.parabolic_trace_g(&path, &[0.1]);
            let g = e.general_trace(&path, &[0.1], &Compensator::nodes(8));
            for (a, b) in f.increments().iter().zip(g.increments()) {
                assert!((b.norm_sqr() - ratio * a.norm_sqr()).abs() < 1e-12);
            }
            let s = check_subordination(&f, &g).unwrap();
            assert!(s.holds && s.violations == 0);
        }
    }
}

#[test]
fn random_complex_modulator_is_subordinate() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let values: Vec<C64> = (0..3)
        .map(|_| C64::from_polar(rng.random_range(0.0..=1.0), rng.random_range(0.0..std::f64::consts::TAU)))
        .collect();
    let pr = problem(
        vec![Atom::new(vec![0.6], 1.2), Atom::new(vec![-1.1], 0.8), Atom::new(vec![2.2], 0.3)],
        1.0,
        1.0,
        0.0,
        JumpModulator::Table {
            values,
            elsewhere: None,
        },
    );
    let e = JumpEngine::new(&pr).unwrap();
    let s = subordination_check(&e, 10_000, 5, 4).unwrap();
    assert_eq!(s.paths, 10_000);
    assert!(s.jumps > 0 && s.comparisons > 0);
    assert_eq!(s.violations, 0, "{s:?}");
}

#[test]
fn pairing_examples_match_spectral() {
    for name in ["unit-atom", "two-atoms-reflected"] {
        let pr = config(name);
        let exact = pr.spectral_pairing().unwrap();
        let est = estimate_pairing(
            &pr,
            &McOptions {
                paths: 200_000,
                seed: 7,
                ..McOptions::default()
            },
        )
        .unwrap();
        assert!(est.product.consistent_with(exact, 3.0), "{name}: {exact} vs {:?}", est.product);
        assert!(est.routes_agree, "{name}");
    }
}

#[test]
fn unit_atom_symbol_reduction() {
    // φ ≡ 1, A = B: m(ξ) = 1 − e^{2(cos ξ − 1)}
    let pr = config("unit-atom");
    let spec = pr.symbol_spec();
    for xi in [0.3, 1.0, std::f64::consts::PI] {
        let m = spec.eval(&[xi]).unwrap();
        assert!((m - c(1.0 - (2.0 * (xi.cos() - 1.0)).exp(), 0.0)).norm() < 1e-13);
    }
}

#[test]
fn lp_isometry_holds() {
    let e = JumpEngine::new(&config("two-atoms-reflected")).unwrap();
    for chk in lp_isometry(&e, &[1.5, 2.0, 3.0], 20_000, 3) {
        assert!(chk.pass, "{chk:?}");
    }
}

#[test]
fn estimates_do_not_depend_on_thread_count() {
    let pr = config("three-atoms");
    let opts = McOptions {
        paths: 3_000,
        seed: 12,
        x_rule: XRule::SubGrid { stride: 4 },
        ..McOptions::default()
    };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| estimate_pairing(&pr, &opts).unwrap())
    };
    let (a, b) = (run(1), run(4));
    assert_eq!(a.product, b.product);
    assert_eq!(a.covariation, b.covariation);
}

fn gaussian(k: C64) -> GaussianProblem {
    let f = SampledField::gaussian(GridSpec::cube(1, 16.0, 64).unwrap(), &[0.0], 1.0).unwrap();
    GaussianProblem {
        a: scalar(1.0),
        b: scalar(1.0),
        k: DMatrix::from_element(1, 1, k),
        f: f.clone(),
        g: f,
    }
}

#[test]
fn brownian_zero_k_is_zero() {
    let est = brownian_pairing(&gaussian(c(0.0, 0.0)), 200, 200, 1).unwrap();
    assert_eq!(est.value(), c(0.0, 0.0));
}

#[test]
fn brownian_pairing_matches_spectral() {
    let p = gaussian(c(1.0, 0.0));
    let exact = p.spectral_pairing().unwrap();
    let est = brownian_pairing(&p, 2_000, 2000, 9).unwrap();
    assert!(est.product.consistent_with(exact, 3.0), "{exact} vs {:?}", est.product);
}

#[test]
fn brownian_qv_gap_shrinks() {
    let gaps = gaussian_qv_gap(&gaussian(c(0.0, 0.7)), 100, &[500, 1000, 2000], 2).unwrap();
    assert!(gaps[1].1 < gaps[0].1 && gaps[2].1 < gaps[1].1, "{gaps:?}");
}
