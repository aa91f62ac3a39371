//! Gauss–Legendre rules and a panel-bisecting adaptive integrator for
//! complex-valued integrands.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Gauss–Legendre rule on the reference interval [-1, 1].
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on the Legendre
    /// polynomial, starting from the Tricomi approximation of each root.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss–Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..(n + 1) / 2 {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped affinely onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F>(&self, a: f64, b: f64, mut f: F) -> C64
    where
        F: FnMut(f64) -> C64,
    {
        self.mapped(a, b).map(|(x, w)| f(x) * w).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Result of an adaptive integration: value and error estimate.
#[derive(Clone, Copy, Debug)]
pub struct Estimate {
    pub value: C64,
    pub error: f64,
}

/// Adaptive integration by panel bisection: a panel is accepted when the
/// one-panel and two-half-panel rules agree to `rel_tol` (or `abs_tol`).
#[derive(Clone, Debug)]
pub struct Adaptive {
    rule: GaussLegendre,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Adaptive {
    pub fn new(order: usize, rel_tol: f64) -> Self {
        Self {
            rule: GaussLegendre::new(order),
            rel_tol,
            abs_tol: 1e-15,
            max_depth: 64,
        }
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn rule(&self) -> &GaussLegendre {
        &self.rule
    }

    pub fn integrate<F>(&self, a: f64, b: f64, f: &F) -> Result<Estimate>
    where
        F: Fn(f64) -> C64,
    {
        if a == b {
            return Ok(Estimate {
                value: C64::new(0.0, 0.0),
                error: 0.0,
            });
        }
        let whole = self.rule.integrate(a, b, f);
        // panels are judged against the size of the whole integral, measured
        // as ∫|f| so that cancellation in oscillatory integrands is harmless
        let l1: f64 = self.rule.mapped(a, b).map(|(x, w)| f(x).norm() * w.abs()).sum();
        let scale = whole.norm().max(l1);
        self.refine(a, b, whole, scale, f, 0)
    }

    fn refine<F>(
        &self,
        a: f64,
        b: f64,
        whole: C64,
        scale: f64,
        f: &F,
        depth: u32,
    ) -> Result<Estimate>
    where
        F: Fn(f64) -> C64,
    {
        let mid = 0.5 * (a + b);
        let left = self.rule.integrate(a, mid, f);
        let right = self.rule.integrate(mid, b, f);
        let halves = left + right;
        let diff = (halves - whole).norm();
        let tol = (self.rel_tol * scale.max(halves.norm())).max(self.abs_tol);
        if diff <= tol {
            return Ok(Estimate {
                value: halves,
                error: diff,
            });
        }
        if depth >= self.max_depth {
            return Err(Error::QuadratureNotConverged {
                estimate: diff,
                tolerance: tol,
            });
        }
        let l = self.refine(a, mid, left, scale, f, depth + 1)?;
        let r = self.refine(mid, b, right, scale, f, depth + 1)?;
        Ok(Estimate {
            value: l.value + r.value,
            error: l.error + r.error,
        })
    }
}
