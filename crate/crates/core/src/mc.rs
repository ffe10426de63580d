//! Deterministic Monte Carlo plumbing.
//!
//! Samples are drawn in fixed-size chunks; chunk `c` of stream `s` is driven
//! by its own ChaCha generator seeded from `(root, s, c)`. Chunks may run on
//! any number of rayon workers but are always reduced in chunk order, so every
//! estimate is a pure function of the root seed and the sample budget.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Samples per chunk. Part of the reproducibility contract: changing it
/// changes every estimate.
pub const CHUNK: usize = 256;

/// A root seed from which independent streams are derived.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Seed(pub u64);

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Seed {
    /// Child seed for a named sub-computation.
    pub fn derive(self, stream: u64) -> Seed {
        Seed(splitmix(self.0 ^ splitmix(stream.wrapping_add(0x5851_F42D_4C95_7F2D))))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    fn chunk_rng(self, chunk: usize) -> ChaCha8Rng {
        self.derive(chunk as u64 ^ 0xC4C4_0000_0000_0000).rng()
    }
}

/// Evaluates `f(rng, global_index)` for `n` samples, in parallel, returning
/// the results in sample order.
pub fn sample_map<T, F>(seed: Seed, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> T + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let per_chunk: Vec<Vec<T>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = seed.chunk_rng(c);
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(n);
            (lo..hi).map(|i| f(&mut rng, i)).collect()
        })
        .collect();
    per_chunk.into_iter().flatten().collect()
}

/// Parallel map over a slice, results in input order.
pub fn ordered_map<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    items.par_iter().map(f).collect()
}

/// Mean and standard error of the mean, summed in order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
}

impl MeanEstimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return MeanEstimate { mean: 0.0, std_error: 0.0, n };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        if n == 1 {
            return MeanEstimate { mean, std_error: 0.0, n };
        }
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        MeanEstimate { mean, std_error: (var / n as f64).sqrt(), n }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn independent_of_worker_count() {
        let run = |threads| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| sample_map(Seed(11), 3000, |rng, i| rng.gen::<f64>() + i as f64))
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a.len(), 3000);
        assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn derived_streams_differ() {
        let s = Seed(1);
        assert_ne!(s.derive(0), s.derive(1));
        assert_eq!(s.derive(7), s.derive(7));
    }

    #[test]
    fn mean_estimate_basics() {
        let e = MeanEstimate::from_samples(&[1.0, 2.0, 3.0]);
        assert_eq!(e.mean, 2.0);
        assert!((e.std_error - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(MeanEstimate::from_samples(&[]).n, 0);
    }
}
