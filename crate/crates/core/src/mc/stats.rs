use num_complex::Complex64 as C64;
use rayon::prelude::*;

/// Running sums for a complex sample.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Accum {
    pub n: u64,
    sum: C64,
    sq_re: f64,
    sq_im: f64,
}

impl Accum {
    pub fn push(&mut self, v: C64) {
        self.n += 1;
        self.sum += v;
        self.sq_re += v.re * v.re;
        self.sq_im += v.im * v.im;
    }

    pub fn merge(&mut self, o: &Accum) {
        self.n += o.n;
        self.sum += o.sum;
        self.sq_re += o.sq_re;
        self.sq_im += o.sq_im;
    }

    pub fn stat(&self) -> Stat {
        let n = self.n.max(1) as f64;
        let mean = self.sum / n;
        let var = |sq: f64, m: f64| ((sq / n - m * m) * n / (n - 1.0).max(1.0)).max(0.0);
        Stat {
            mean,
            se_re: (var(self.sq_re, mean.re) / n).sqrt(),
            se_im: (var(self.sq_im, mean.im) / n).sqrt(),
            n: self.n,
        }
    }
}

/// Sample mean with componentwise standard errors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stat {
    pub mean: C64,
    pub se_re: f64,
    pub se_im: f64,
    pub n: u64,
}

impl Stat {
    /// √(SE_re² + SE_im²).
    pub fn joint_se(&self) -> f64 {
        self.se_re.hypot(self.se_im)
    }

    /// |mean − target| ≤ k·joint SE.
    pub fn consistent_with(&self, target: C64, k: f64) -> bool {
        (self.mean - target).norm() <= k * self.joint_se()
    }
}

/// Paths per work unit; chunks are reduced in index order, so results do
/// not depend on the thread count.
pub const CHUNK: usize = 512;

/// Runs `body(acc, path_index)` over all paths in fixed-size chunks and
/// merges the chunk accumulators in order.
pub fn run_chunked<A, I, F, M>(paths: usize, init: I, body: F, merge: M) -> A
where
    A: Send,
    I: Fn() -> A + Sync,
    F: Fn(&mut A, usize) + Sync,
    M: Fn(&mut A, A),
{
    let chunks = paths.div_ceil(CHUNK);
    let parts: Vec<A> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = init();
            for p in c * CHUNK..((c + 1) * CHUNK).min(paths) {
                body(&mut acc, p);
            }
            acc
        })
        .collect();
    let mut total = init();
    for p in parts {
        merge(&mut total, p);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_error_of_known_sample() {
        let mut a = Accum::default();
        for v in [1.0, 2.0, 3.0, 4.0] {
            a.push(C64::new(v, -v));
        }
        let s = a.stat();
        assert!((s.mean - C64::new(2.5, -2.5)).norm() < 1e-15);
        let se = (5.0f64 / 3.0 / 4.0).sqrt();
        assert!((s.se_re - se).abs() < 1e-15 && (s.se_im - se).abs() < 1e-15);
    }

    #[test]
    fn chunked_sum_is_ordered() {
        let total = run_chunked(
            3000,
            Vec::new,
            |acc: &mut Vec<usize>, p| acc.push(p),
            |a, b| a.extend(b),
        );
        assert_eq!(total, (0..3000).collect::<Vec<_>>());
    }
}
