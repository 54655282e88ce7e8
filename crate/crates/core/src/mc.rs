//! Deterministic chunked Monte Carlo.
//!
//! Draws are split into fixed-size chunks; chunk `k` owns ChaCha stream `k`
//! of the master seed. Chunk partial sums are reduced in chunk order, so the
//! result depends only on `(seed, samples, chunk)` and not on the thread pool.

use crate::numeric::{Estimate, NumericConfig};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Random stream for chunk `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone)]
struct Moments {
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
}

/// Estimate `dim` expectations at once. `draw` fills one sample of all
/// components per call.
pub fn estimate_many<F>(cfg: &NumericConfig, dim: usize, draw: F) -> Vec<Estimate>
where
    F: Fn(&mut ChaCha8Rng, &mut [f64]) + Sync,
{
    let samples = cfg.mc_samples.max(2);
    let chunk = cfg.mc_chunk.max(1);
    let n_chunks = samples.div_ceil(chunk);
    let parts: Vec<Moments> = (0..n_chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(cfg.seed, k);
            let count = chunk.min(samples - k * chunk);
            let mut m = Moments {
                sum: vec![0.0; dim],
                sum_sq: vec![0.0; dim],
            };
            let mut buf = vec![0.0; dim];
            for _ in 0..count {
                draw(&mut rng, &mut buf);
                for (j, &v) in buf.iter().enumerate() {
                    m.sum[j] += v;
                    m.sum_sq[j] += v * v;
                }
            }
            m
        })
        .collect();

    let n = samples as f64;
    (0..dim)
        .map(|j| {
            let s: f64 = parts.iter().map(|p| p.sum[j]).sum();
            let s2: f64 = parts.iter().map(|p| p.sum_sq[j]).sum();
            let mean = s / n;
            let var = ((s2 / n - mean * mean) * n / (n - 1.0)).max(0.0);
            Estimate::new(mean, (var / n).sqrt())
        })
        .collect()
}

/// Scalar convenience form of [`estimate_many`].
pub fn estimate<F>(cfg: &NumericConfig, draw: F) -> Estimate
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    estimate_many(cfg, 1, |rng, out| out[0] = draw(rng))[0]
}
