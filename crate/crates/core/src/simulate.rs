//! Monte Carlo walks, used as an independent check on the exact solver.
//!
//! Walks are grouped in fixed-size blocks; block `b` draws from its own
//! ChaCha stream `b` under the user seed, so results do not depend on the
//! number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hitting::TrustPolicy;
use crate::network::{shortest_paths, shortest_paths_to, Network, NodeId};
use crate::pointer::PointerSampler;
use crate::scalar::Scalar;

const BLOCK: usize = 1024;

/// Censoring horizon, as a multiple of the start-to-target distance, when no
/// explicit `max_time` is given.
pub const DEFAULT_HORIZON_FACTOR: f64 = 1e4;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig<T> {
    pub n_walks: usize,
    pub max_time: Option<T>,
    pub seed: u64,
    /// Absorbing node; defaults to home.
    pub target: Option<NodeId>,
}

impl<T> SimulationConfig<T> {
    pub fn new(n_walks: usize, seed: u64) -> Self {
        Self {
            n_walks,
            max_time: None,
            seed,
            target: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSummary<T> {
    /// Mean over walks that reached the target.
    pub mean: T,
    pub std_error: T,
    pub completed: usize,
    pub censored: usize,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
    censored: usize,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return Moments {
                censored: self.censored + other.censored,
                ..other
            };
        }
        if other.n == 0 {
            return Moments {
                censored: self.censored + other.censored,
                ..self
            };
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        Moments {
            n,
            mean: self.mean + delta * other.n as f64 / n as f64,
            m2: self.m2 + other.m2 + delta * delta * (self.n * other.n) as f64 / n as f64,
            censored: self.censored + other.censored,
        }
    }
}

/// Independent rng stream for block `index` under `seed`.
pub fn block_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Simulates `config.n_walks` journeys from `start`. Each journey draws one
/// direction vector and keeps it until the target is reached or the elapsed
/// time exceeds `max_time` (censored, excluded from the mean).
pub fn simulate<T: Scalar>(
    net: &Network<T>,
    p: T,
    policy: &TrustPolicy<T>,
    start: NodeId,
    config: &SimulationConfig<T>,
) -> Result<SimulationSummary<T>> {
    if config.n_walks == 0 {
        return Err(Error::OutOfRange("n_walks must be at least 1".into()));
    }
    policy.validate_for(net)?;
    let target = config.target.unwrap_or(net.home());
    let spd = shortest_paths(net);
    let sampler = PointerSampler::new(net, &spd, p)?;
    let max_time = match config.max_time {
        Some(t) if t > T::zero() => t.as_f64(),
        Some(t) => return Err(Error::OutOfRange(format!("max_time {t} must be positive"))),
        None => DEFAULT_HORIZON_FACTOR * shortest_paths_to(net, target).distance[start].as_f64(),
    };

    // Trust per node (meaningful at branch nodes only).
    let trust: Vec<f64> = net
        .nodes()
        .map(|v| {
            if net.is_branch(v) {
                policy.trust_at_degree(net.degree(v)).map(Scalar::as_f64)
            } else {
                Ok(0.0)
            }
        })
        .collect::<Result<_>>()?;
    let lengths: Vec<f64> = net.arcs().iter().map(|a| a.length.as_f64()).collect();

    let walk = |rng: &mut ChaCha8Rng| -> Option<f64> {
        let d = sampler.sample(rng);
        let mut at = start;
        let mut elapsed = 0.0;
        while at != target {
            let arcs = net.incident(at);
            let arc = match d.pointer(at) {
                Some(pointer) => {
                    if rng.gen::<f64>() < trust[at] {
                        pointer
                    } else {
                        // Uniform over the other arcs.
                        let pos = arcs.iter().position(|&a| a == pointer).unwrap();
                        let k = rng.gen_range(0..arcs.len() - 1);
                        arcs[if k >= pos { k + 1 } else { k }]
                    }
                }
                None => arcs[rng.gen_range(0..arcs.len())],
            };
            elapsed += lengths[arc];
            if elapsed > max_time {
                return None;
            }
            at = net.arc(arc).other(at);
        }
        Some(elapsed)
    };

    let blocks = config.n_walks.div_ceil(BLOCK);
    let per_block: Vec<Moments> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(config.seed, b);
            let count = BLOCK.min(config.n_walks - b * BLOCK);
            let mut m = Moments::default();
            for _ in 0..count {
                match walk(&mut rng) {
                    Some(t) => m.push(t),
                    None => m.censored += 1,
                }
            }
            m
        })
        .collect();
    let total = per_block
        .into_iter()
        .fold(Moments::default(), Moments::merge);

    let (mean, std_error) = match total.n {
        0 => (f64::NAN, f64::NAN),
        1 => (total.mean, f64::INFINITY),
        n => (total.mean, (total.m2 / (n - 1) as f64 / n as f64).sqrt()),
    };
    Ok(SimulationSummary {
        mean: T::lit(mean),
        std_error: T::lit(std_error),
        completed: total.n,
        censored: total.censored,
    })
}
