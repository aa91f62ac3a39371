use rand::distr::weighted::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::error::{Error, Result};
use crate::levy::Atom;

/// Per-path generator: stream `index` of the master seed.
pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Sampler for compound Poisson paths on the horizon [0, 1].
#[derive(Clone, Debug)]
pub struct CompoundPoisson {
    atoms: Vec<Atom>,
    intensity: f64,
    count: Poisson<f64>,
    marks: WeightedIndex<f64>,
}

impl CompoundPoisson {
    pub fn new(atoms: &[Atom]) -> Result<Self> {
        let intensity: f64 = atoms.iter().map(|a| a.w).sum();
        if !(intensity > 0.0 && intensity.is_finite()) {
            return Err(Error::invalid(format!(
                "compound Poisson simulation needs 0 < |ν| < ∞, got {intensity}"
            )));
        }
        let count = Poisson::new(intensity).map_err(|e| Error::invalid(e.to_string()))?;
        let marks = WeightedIndex::new(atoms.iter().map(|a| a.w)).map_err(|e| Error::invalid(e.to_string()))?;
        Ok(Self {
            atoms: atoms.to_vec(),
            intensity,
            count,
            marks,
        })
    }

    pub fn intensity(&self) -> f64 {
        self.intensity
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> JumpPath {
        let j = self.count.sample(rng) as usize;
        let mut times: Vec<f64> = (0..j).map(|_| 1.0 - rng.random::<f64>()).collect();
        times.sort_by(f64::total_cmp);
        let marks: Vec<usize> = (0..j).map(|_| self.marks.sample(rng)).collect();
        JumpPath {
            times,
            marks,
            intensity: self.intensity,
        }
    }
}

/// One trajectory on [0, 1]: jump times in (0, 1] and the atom index of
/// each jump.
#[derive(Clone, Debug, PartialEq)]
pub struct JumpPath {
    pub times: Vec<f64>,
    pub marks: Vec<usize>,
    pub intensity: f64,
}

impl JumpPath {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Y_t = Σ_{t_i ≤ t} z_i + h t.
    pub fn position(&self, atoms: &[Atom], drift: &[f64], t: f64) -> Vec<f64> {
        let mut y: Vec<f64> = drift.iter().map(|h| h * t).collect();
        for (&s, &m) in self.times.iter().zip(&self.marks) {
            if s <= t {
                for (yk, zk) in y.iter_mut().zip(&atoms[m].z) {
                    *yk += zk;
                }
            }
        }
        y
    }
}

/// Samples a path of the compound Poisson process with Lévy measure ν.
pub fn simulate_cpp(atoms: &[Atom], seed: u64) -> Result<JumpPath> {
    Ok(CompoundPoisson::new(atoms)?.sample(&mut path_rng(seed, 0)))
}

/// Brownian increments on a uniform grid of `steps` steps over [0, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct BrownianPath {
    pub h: f64,
    /// increments[step][coordinate] ~ N(0, h)
    pub increments: Vec<Vec<f64>>,
}

impl BrownianPath {
    pub fn sample<R: Rng>(n: usize, steps: usize, rng: &mut R) -> Self {
        let h = 1.0 / steps as f64;
        let sd = h.sqrt();
        let increments = (0..steps)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        let z: f64 = StandardNormal.sample(rng);
                        z * sd
                    })
                    .collect()
            })
            .collect();
        Self { h, increments }
    }

    pub fn steps(&self) -> usize {
        self.increments.len()
    }

    /// The same path on a grid with half as many steps.
    pub fn coarsen(&self) -> Self {
        let increments = self
            .increments
            .chunks(2)
            .map(|c| {
                let mut s = c[0].clone();
                if let Some(b) = c.get(1) {
                    for (x, y) in s.iter_mut().zip(b) {
                        *x += y;
                    }
                }
                s
            })
            .collect::<Vec<_>>();
        Self {
            h: 1.0 / increments.len() as f64,
            increments,
        }
    }
}
