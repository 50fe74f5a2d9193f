//! Seeded randomness and the row-selection law `p_i = ‖a_i‖² / ‖A‖_F²`.
//!
//! [`Rng`] is ChaCha8 (from `rand_chacha`) seeded through
//! `SeedableRng::seed_from_u64`. Uniforms take the top 53 bits of one
//! `u64` draw, and normals use the Box–Muller transform on pairs of uniforms
//! with the sine branch cached for the next call. The stream is portable, so
//! a seed reproduces the same numbers on every platform.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

const TWO_POW_NEG_53: f64 = 1.0 / (1u64 << 53) as f64;

#[derive(Debug, Clone)]
pub struct Rng {
    inner: ChaCha8Rng,
    spare_normal: Option<f64>,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng {
            inner: ChaCha8Rng::seed_from_u64(seed),
            spare_normal: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 bits of resolution.
    pub fn next_uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * TWO_POW_NEG_53
    }

    /// Standard normal variate (Box–Muller).
    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        // 1 - u lies in (0, 1], keeping ln finite.
        let u1 = 1.0 - self.next_uniform();
        let u2 = self.next_uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare_normal = Some(radius * theta.sin());
        radius * theta.cos()
    }

    pub fn normal_vec(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.next_normal()).collect()
    }
}

/// Seed for Monte-Carlo run `run_index`: `base ^ run_index` pushed through
/// one generator round.
pub fn derive_seed(base: u64, run_index: u64) -> u64 {
    Rng::new(base ^ run_index).next_u64()
}

/// Inverse-CDF sampler over rows weighted by squared norm.
#[derive(Debug, Clone)]
pub struct RowSampler {
    /// Normalized cumulative weights; the last entry is exactly 1.
    cdf: Vec<f64>,
    weights: Vec<f64>,
    total: f64,
}

impl RowSampler {
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        Self::from_weights((0..a.n_rows()).map(|i| a.row_norm_sq(i)).collect())
    }

    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidProblem(
                "row weights must be finite and non-negative".into(),
            ));
        }
        let mut running = 0.0;
        let mut cumulative = Vec::with_capacity(weights.len());
        for w in &weights {
            running += w;
            cumulative.push(running);
        }
        let total = running;
        if total <= 0.0 {
            return Err(Error::InvalidProblem(
                "all rows are zero; nothing to sample".into(),
            ));
        }
        let cdf = cumulative.iter().map(|c| c / total).collect();
        Ok(RowSampler {
            cdf,
            weights,
            total,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `‖A‖_F²` when built from a matrix.
    pub fn total_weight(&self) -> f64 {
        self.total
    }

    pub fn probability(&self, i: usize) -> f64 {
        self.weights[i] / self.total
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w / self.total).collect()
    }

    /// Smallest `i` with `u < cdf[i]`. Zero-weight rows have an empty
    /// interval and are never returned.
    pub fn index_for(&self, u: f64) -> usize {
        let idx = self.cdf.partition_point(|&c| c <= u);
        idx.min(self.cdf.len() - 1)
    }

    /// Draws one row index, consuming exactly one uniform.
    pub fn sample(&self, rng: &mut Rng) -> usize {
        self.index_for(rng.next_uniform())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = Rng::new(1);
        let mut b = Rng::new(1);
        for _ in 0..100 {
            assert_eq!(a.next_uniform().to_bits(), b.next_uniform().to_bits());
        }
    }

    #[test]
    fn different_seeds_differ() {
        let mut a = Rng::new(1);
        let mut b = Rng::new(2);
        let xs: Vec<f64> = (0..100).map(|_| a.next_uniform()).collect();
        let ys: Vec<f64> = (0..100).map(|_| b.next_uniform()).collect();
        assert!(xs.iter().zip(&ys).any(|(x, y)| x != y));
    }

    #[test]
    fn uniform_mean() {
        let mut rng = Rng::new(7);
        let n = 1_000_000;
        let mean = (0..n).map(|_| rng.next_uniform()).sum::<f64>() / n as f64;
        assert!((0.498..=0.502).contains(&mean), "mean {mean}");
    }

    #[test]
    fn normal_moments() {
        let mut rng = Rng::new(99);
        let n = 200_000;
        let xs = rng.normal_vec(n);
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }

    #[test]
    fn derived_seeds_are_distinct_and_replayable() {
        let seeds: Vec<u64> = (0..50).map(|j| derive_seed(42, j)).collect();
        let mut sorted = seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), seeds.len());
        assert_eq!(derive_seed(42, 3), seeds[3]);
    }

    #[test]
    fn uniform_weights_for_normalized_rows() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.6, 0.8]]).unwrap();
        let s = RowSampler::new(&a).unwrap();
        for p in s.probabilities() {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn two_row_inverse_cdf() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let s = RowSampler::new(&a).unwrap();
        assert!((s.probability(0) - 0.2).abs() < 1e-15);
        assert!((s.probability(1) - 0.8).abs() < 1e-15);
        assert_eq!(s.index_for(0.0), 0);
        assert_eq!(s.index_for(0.1999), 0);
        assert_eq!(s.index_for(0.2), 1);
        assert_eq!(s.index_for(0.9999999), 1);
    }

    #[test]
    fn single_row_always_zero() {
        let a = DenseMatrix::from_rows(&[vec![3.0, 4.0]]).unwrap();
        let s = RowSampler::new(&a).unwrap();
        let mut rng = Rng::new(5);
        assert!((0..1000).all(|_| s.sample(&mut rng) == 0));
    }

    #[test]
    fn zero_rows_never_sampled() {
        let a = DenseMatrix::from_rows(&[
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 0.0],
            vec![2.0, 0.0],
            vec![0.0, 0.0],
        ])
        .unwrap();
        let s = RowSampler::new(&a).unwrap();
        let mut rng = Rng::new(13);
        for _ in 0..100_000 {
            let i = s.sample(&mut rng);
            assert!(i == 1 || i == 3);
        }
        assert_eq!(s.index_for(0.0), 1);
    }

    #[test]
    fn all_zero_matrix_rejected() {
        let a = DenseMatrix::new(2, 2, vec![0.0; 4]).unwrap();
        assert!(matches!(RowSampler::new(&a), Err(Error::InvalidProblem(_))));
    }

    #[test]
    fn sample_consumes_exactly_one_uniform() {
        let a = DenseMatrix::from_rows(&[vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        let s = RowSampler::new(&a).unwrap();
        let mut r1 = Rng::new(21);
        let mut r2 = Rng::new(21);
        s.sample(&mut r1);
        r2.next_uniform();
        assert_eq!(r1.next_u64(), r2.next_u64());
    }

    #[test]
    fn empirical_frequencies_match_weights() {
        let mut g = Rng::new(2024);
        let a = DenseMatrix::from_fn(10, 10, |_, _| g.next_normal()).unwrap();
        let s = RowSampler::new(&a).unwrap();
        let mut counts = [0usize; 10];
        let mut rng = Rng::new(77);
        let draws = 1_000_000;
        for _ in 0..draws {
            counts[s.sample(&mut rng)] += 1;
        }
        for (i, c) in counts.iter().enumerate() {
            let freq = *c as f64 / draws as f64;
            assert!((freq - s.probability(i)).abs() <= 0.005, "row {i}: {freq}");
        }
    }
}
