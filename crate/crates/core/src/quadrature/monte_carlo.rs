use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::IntegralResult;
use crate::error::{Error, Result};

/// Samples per independent random stream. Stream `k` covers samples
/// `[k * MC_CHUNK, (k + 1) * MC_CHUNK)`, whichever thread runs it.
pub const MC_CHUNK: u64 = 1 << 14;

/// One coordinate of a product distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Marginal {
    Normal { mean: f64, sigma: f64 },
    Uniform { low: f64, high: f64 },
    /// `±1` with equal probability.
    Sign,
    Constant(f64),
}

impl Marginal {
    pub fn standard_normal() -> Self {
        Marginal::Normal { mean: 0.0, sigma: 1.0 }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            Marginal::Normal { mean, sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + sigma * z
            }
            Marginal::Uniform { low, high } => low + (high - low) * rng.random::<f64>(),
            Marginal::Sign => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            Marginal::Constant(c) => c,
        }
    }
}

/// Independent coordinates; a draw is a vector of length `dim()`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProductDistribution {
    marginals: Vec<Marginal>,
}

impl ProductDistribution {
    pub fn new(marginals: Vec<Marginal>) -> Self {
        Self { marginals }
    }

    pub fn standard_normals(k: usize) -> Self {
        Self::new(vec![Marginal::standard_normal(); k])
    }

    pub fn push(&mut self, m: Marginal) -> usize {
        self.marginals.push(m);
        self.marginals.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.marginals.len()
    }

    fn fill<R: Rng>(&self, rng: &mut R, out: &mut [f64]) {
        for (slot, m) in out.iter_mut().zip(&self.marginals) {
            *slot = m.draw(rng);
        }
    }
}

/// Sample mean and spread of a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSummary {
    pub samples: u64,
    pub mean: f64,
    pub std_dev: f64,
}

impl McSummary {
    pub fn standard_error(&self) -> f64 {
        self.std_dev / (self.samples as f64).sqrt()
    }

    /// Standard error of `std_dev` itself, assuming near-normal data.
    pub fn std_dev_standard_error(&self) -> f64 {
        self.std_dev / (2.0 * (self.samples as f64 - 1.0)).sqrt()
    }

    pub fn to_integral(&self) -> IntegralResult {
        IntegralResult {
            value: self.mean,
            error_estimate: self.standard_error(),
            evaluations: self.samples,
        }
    }
}

#[derive(Clone, Copy)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.n as f64 / n as f64;
        let m2 = self.m2 + other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64;
        Moments { n, mean, m2 }
    }
}

/// SplitMix64 step; derives decorrelated seeds from `(seed, index)`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs `f` over `samples` draws of `dist` and returns mean and spread.
///
/// Results are bit-identical for a given `(seed, samples)` whatever the size
/// of the rayon pool: each chunk owns its own stream and the per-chunk
/// moments are merged in chunk order.
pub fn mc_summary<F>(f: F, dist: &ProductDistribution, samples: u64, seed: u64) -> Result<McSummary>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if samples < 100 {
        return Err(Error::Usage(format!("Monte Carlo needs at least 100 samples, got {samples}")));
    }
    let chunks = samples.div_ceil(MC_CHUNK);
    let partials: Vec<Result<Moments>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let n = MC_CHUNK.min(samples - chunk * MC_CHUNK);
            let mut draw = vec![0.0; dist.dim()];
            let mut m = Moments { n: 0, mean: 0.0, m2: 0.0 };
            for _ in 0..n {
                dist.fill(&mut rng, &mut draw);
                let v = f(&draw);
                if !v.is_finite() {
                    return Err(Error::numeric("Monte Carlo integrand is not finite", v, f64::NAN));
                }
                m.n += 1;
                let delta = v - m.mean;
                m.mean += delta / m.n as f64;
                m.m2 += delta * (v - m.mean);
            }
            Ok(m)
        })
        .collect();
    let mut total = Moments { n: 0, mean: 0.0, m2: 0.0 };
    for p in partials {
        total = total.merge(p?);
    }
    let var = if total.n > 1 { total.m2 / (total.n - 1) as f64 } else { 0.0 };
    Ok(McSummary {
        samples: total.n,
        mean: total.mean,
        std_dev: var.max(0.0).sqrt(),
    })
}

/// Maps every draw through `f` and returns the values in sample order, using
/// the same chunked streams as [`mc_summary`].
pub fn mc_sample_map<T, F>(f: F, dist: &ProductDistribution, samples: u64, seed: u64) -> Vec<T>
where
    T: Send,
    F: Fn(&[f64]) -> T + Sync,
{
    let chunks = samples.div_ceil(MC_CHUNK);
    let parts: Vec<Vec<T>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let n = MC_CHUNK.min(samples - chunk * MC_CHUNK);
            let mut draw = vec![0.0; dist.dim()];
            (0..n)
                .map(|_| {
                    dist.fill(&mut rng, &mut draw);
                    f(&draw)
                })
                .collect()
        })
        .collect();
    parts.into_iter().flatten().collect()
}

/// Sample mean of `f` with `error_estimate` = sample std / √samples.
pub fn mc_expectation<F>(f: F, dist: &ProductDistribution, samples: u64, seed: u64) -> Result<IntegralResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    Ok(mc_summary(f, dist, samples, seed)?.to_integral())
}
