//! Seeded random workloads.
//!
//! Every trial draws from its own ChaCha8 stream (`seed`, stream = trial
//! index), so results do not depend on how trials are scheduled.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Sampler {
    #[default]
    ContinuousUniform,
    /// Values `k / (2^bits − 1)`, `k` uniform.
    GridQuantized(u32),
}

impl Sampler {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Sampler::GridQuantized(b) if !(1..=30).contains(&b) => {
                Err(Error::config(format!("grid sampler needs 1..=30 bits, got {b}")))
            }
            _ => Ok(()),
        }
    }

    /// One value in `[0, 1]`.
    pub fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            Sampler::ContinuousUniform => rng.gen_range(0.0..=1.0),
            Sampler::GridQuantized(bits) => {
                let top = (1u64 << bits) - 1;
                rng.gen_range(0..=top) as f64 / top as f64
            }
        }
    }

    pub fn fill<R: Rng>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.draw(rng)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialBatch {
    pub seed: u64,
    pub n_trials: usize,
    pub sampler: Sampler,
}

impl Default for TrialBatch {
    fn default() -> Self {
        Self {
            seed: 0,
            n_trials: 200,
            sampler: Sampler::ContinuousUniform,
        }
    }
}

impl TrialBatch {
    pub fn validate(&self) -> Result<()> {
        if self.n_trials == 0 {
            return Err(Error::config("n_trials must be >= 1"));
        }
        self.sampler.validate()
    }

    pub fn rng(&self, trial: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial as u64);
        rng
    }
}

/// Everything random about one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialDraw {
    pub x: Vec<f64>,
    /// Per signed output: positive and negative sub-weights.
    pub w_pos: Vec<Vec<f64>>,
    pub w_neg: Vec<Vec<f64>>,
    /// Threshold offsets per physical column (`2j` positive, `2j + 1`
    /// negative); empty when mismatch is off.
    pub vt_offsets: Vec<Vec<f64>>,
    /// Programming-error draws per physical column; empty when off.
    pub programming: Vec<Vec<f64>>,
}

/// Shape of the random workload of one design point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkloadShape {
    pub m_rows: usize,
    pub n_cols: usize,
    /// Sub-weights are drawn on `[0, weight_scale]`.
    pub weight_scale: f64,
    pub mismatch_sigma_vt: f64,
    pub programming_error: bool,
}

impl TrialBatch {
    pub fn draw(&self, trial: usize, shape: &WorkloadShape) -> Result<TrialDraw> {
        let mut rng = self.rng(trial);
        let s = &self.sampler;
        let x = s.fill(&mut rng, shape.m_rows);
        let mut w_pos = Vec::with_capacity(shape.n_cols);
        let mut w_neg = Vec::with_capacity(shape.n_cols);
        for _ in 0..shape.n_cols {
            w_pos.push(scaled(s.fill(&mut rng, shape.m_rows), shape.weight_scale));
            w_neg.push(scaled(s.fill(&mut rng, shape.m_rows), shape.weight_scale));
        }
        let physical = 2 * shape.n_cols;
        let vt_offsets = if shape.mismatch_sigma_vt > 0.0 {
            let normal = Normal::new(0.0, shape.mismatch_sigma_vt)
                .map_err(|e| Error::config(format!("mismatch sigma: {e}")))?;
            (0..physical)
                .map(|_| (0..shape.m_rows).map(|_| normal.sample(&mut rng)).collect())
                .collect()
        } else {
            Vec::new()
        };
        let programming = if shape.programming_error {
            (0..physical)
                .map(|_| (0..shape.m_rows).map(|_| rng.gen_range(-0.5..=0.5)).collect())
                .collect()
        } else {
            Vec::new()
        };
        Ok(TrialDraw {
            x,
            w_pos,
            w_neg,
            vt_offsets,
            programming,
        })
    }
}

fn scaled(mut v: Vec<f64>, k: f64) -> Vec<f64> {
    if k != 1.0 {
        v.iter_mut().for_each(|w| *w *= k);
    }
    v
}
