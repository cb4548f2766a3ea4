//! Partitioned leave-m-out supersample combinatorics: configuration
//! validation, uniform membership sampling, training indicators, and the
//! cross-validation error functional.
//!
//! A supersample of size n+m is split into k equal blocks of size (n+m)/k.
//! Within each block a uniformly random subset of n/k indices is selected
//! for training; the remaining m/k indices are held out. Indices are
//! 0-based; block j maps to global position (n+m)/k * i + j.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SupersampleError {
    #[error("n, m and k must all be positive (got n={n}, m={m}, k={k})")]
    NonPositive { n: u32, m: u32, k: u32 },
    #[error("k={k} must divide both n={n} and m={m}")]
    Indivisible { n: u32, m: u32, k: u32 },
    #[error("loss table shape {rows}x{cols} does not match k={k} blocks of length {block_len}")]
    ShapeMismatch { rows: usize, cols: usize, k: usize, block_len: usize },
    #[error("loss table entry {0} is not finite")]
    NonFiniteLoss(f64),
}

/// The (n, m, k) geometry of a partitioned leave-m-out supersample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionConfig {
    n: u32,
    m: u32,
    k: u32,
}

impl PartitionConfig {
    pub fn new(n: u32, m: u32, k: u32) -> Result<Self, SupersampleError> {
        if n == 0 || m == 0 || k == 0 {
            return Err(SupersampleError::NonPositive { n, m, k });
        }
        if n % k != 0 || m % k != 0 {
            return Err(SupersampleError::Indivisible { n, m, k });
        }
        debug_assert!((n + m) / k >= 2);
        Ok(PartitionConfig { n, m, k })
    }

    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn m(&self) -> u32 {
        self.m
    }
    pub fn k(&self) -> u32 {
        self.k
    }
    /// Block size (n+m)/k.
    pub fn block_len(&self) -> u32 {
        (self.n + self.m) / self.k
    }
    /// Training indices per block, n/k.
    pub fn train_per_block(&self) -> u32 {
        self.n / self.k
    }
    /// Held-out indices per block, m/k.
    pub fn test_per_block(&self) -> u32 {
        self.m / self.k
    }

    /// (P(T = 1), P(T = 0)) = (n/(n+m), m/(n+m)) for any position.
    pub fn training_prob(&self) -> (f64, f64) {
        let t = (self.n + self.m) as f64;
        (self.n as f64 / t, self.m as f64 / t)
    }
}

/// All k that divide both n and m, ascending.
pub fn divisor_set(n: u32, m: u32) -> Vec<u32> {
    let g = gcd(n, m);
    (1..=g).filter(|k| g % k == 0).collect()
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Deterministic per-task RNG: a 64-bit base seed selects the key, the task
/// index selects an independent stream.
pub fn derive_rng(base_seed: u64, task: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(task);
    rng
}

/// Per-block sorted training subsets U^(i), each of size n/k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipDraw {
    subsets: Vec<Vec<u16>>,
}

impl MembershipDraw {
    /// Build a draw from explicit per-block training subsets, e.g. when
    /// enumerating all memberships.
    pub fn from_subsets(mut subsets: Vec<Vec<u16>>) -> Self {
        for s in subsets.iter_mut() {
            s.sort_unstable();
        }
        MembershipDraw { subsets }
    }

    pub fn subsets(&self) -> &[Vec<u16>] {
        &self.subsets
    }

    /// Training indicator T^(i)_j = 1{j in U^(i)}.
    pub fn is_training(&self, block: usize, j: u16) -> bool {
        self.subsets[block].binary_search(&j).is_ok()
    }
}

/// Draw the per-block training subsets uniformly at random, independently
/// across blocks. Partial Fisher-Yates selection keeps each subset exactly
/// uniform over all C((n+m)/k, n/k) possibilities.
pub fn sample_membership(cfg: &PartitionConfig, rng: &mut impl Rng) -> MembershipDraw {
    let block_len = cfg.block_len() as usize;
    let take = cfg.train_per_block() as usize;
    let mut subsets = Vec::with_capacity(cfg.k() as usize);
    let mut pool: Vec<u16> = (0..block_len as u16).collect();
    for _ in 0..cfg.k() {
        for j in 0..block_len {
            pool[j] = j as u16;
        }
        for j in 0..take {
            let pick = rng.gen_range(j..block_len);
            pool.swap(j, pick);
        }
        let mut chosen: Vec<u16> = pool[..take].to_vec();
        chosen.sort_unstable();
        subsets.push(chosen);
    }
    MembershipDraw { subsets }
}

/// Per-block losses, shape k x (n+m)/k.
#[derive(Debug, Clone)]
pub struct LossTable {
    values: Vec<f64>,
    k: usize,
    block_len: usize,
}

impl LossTable {
    pub fn new(cfg: &PartitionConfig, values: Vec<f64>) -> Result<Self, SupersampleError> {
        let k = cfg.k() as usize;
        let block_len = cfg.block_len() as usize;
        if values.len() != k * block_len {
            return Err(SupersampleError::ShapeMismatch {
                rows: values.len() / block_len.max(1),
                cols: block_len,
                k,
                block_len,
            });
        }
        if let Some(&bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(SupersampleError::NonFiniteLoss(bad));
        }
        Ok(LossTable { values, k, block_len })
    }

    pub fn get(&self, block: usize, j: usize) -> f64 {
        self.values[block * self.block_len + j]
    }
}

/// Leave-m-out cross-validation error and its per-block components.
#[derive(Debug, Clone)]
pub struct CvError {
    /// (1/m) * sum of test losses - (1/n) * sum of training losses.
    pub overall: f64,
    /// Block errors eps^(i) = (k/m) * sum_test - (k/n) * sum_train; the
    /// overall error is their mean.
    pub per_block: Vec<f64>,
}

pub fn cv_error(
    losses: &LossTable,
    draw: &MembershipDraw,
    cfg: &PartitionConfig,
) -> Result<CvError, SupersampleError> {
    let k = cfg.k() as usize;
    let block_len = cfg.block_len() as usize;
    if losses.k != k || losses.block_len != block_len || draw.subsets.len() != k {
        return Err(SupersampleError::ShapeMismatch {
            rows: losses.k,
            cols: losses.block_len,
            k,
            block_len,
        });
    }
    let kf = cfg.k() as f64;
    let (nf, mf) = (cfg.n() as f64, cfg.m() as f64);
    let mut per_block = Vec::with_capacity(k);
    for i in 0..k {
        let mut train = 0.0;
        let mut total = 0.0;
        for j in 0..block_len {
            let v = losses.get(i, j);
            total += v;
            if draw.is_training(i, j as u16) {
                train += v;
            }
        }
        per_block.push(kf / mf * (total - train) - kf / nf * train);
    }
    let overall = per_block.iter().sum::<f64>() / kf;
    Ok(CvError { overall, per_block })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn config_validation() {
        assert!(PartitionConfig::new(6, 4, 2).is_ok());
        assert_eq!(
            PartitionConfig::new(6, 4, 3),
            Err(SupersampleError::Indivisible { n: 6, m: 4, k: 3 })
        );
        assert!(PartitionConfig::new(0, 4, 1).is_err());
    }

    #[test]
    fn divisors() {
        assert_eq!(divisor_set(6, 4), vec![1, 2]);
        assert_eq!(divisor_set(12, 12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisor_set(5, 1), vec![1]);
    }

    #[test]
    fn training_prob_values() {
        let cfg = PartitionConfig::new(6, 4, 2).unwrap();
        assert_abs_diff_eq!(cfg.training_prob().0, 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(cfg.training_prob().1, 0.4, epsilon = 1e-15);
        let cfg = PartitionConfig::new(1, 9, 1).unwrap();
        assert_abs_diff_eq!(cfg.training_prob().0, 0.1, epsilon = 1e-15);
        let cfg = PartitionConfig::new(7, 7, 7).unwrap();
        assert_abs_diff_eq!(cfg.training_prob().0, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn membership_uniform_two_outcomes() {
        let cfg = PartitionConfig::new(1, 1, 1).unwrap();
        let mut rng = derive_rng(7, 0);
        let draws = 100_000;
        let mut first = 0usize;
        for _ in 0..draws {
            let d = sample_membership(&cfg, &mut rng);
            if d.subsets()[0][0] == 0 {
                first += 1;
            }
        }
        let freq = first as f64 / draws as f64;
        assert!((freq - 0.5).abs() < 0.01, "freq = {freq}");
    }

    #[test]
    fn membership_uniform_over_three_subsets() {
        let cfg = PartitionConfig::new(2, 1, 1).unwrap();
        let mut rng = derive_rng(11, 0);
        let draws = 100_000;
        let mut counts = [0usize; 3];
        for _ in 0..draws {
            let d = sample_membership(&cfg, &mut rng);
            let s = &d.subsets()[0];
            let idx = match (s[0], s[1]) {
                (0, 1) => 0,
                (0, 2) => 1,
                (1, 2) => 2,
                other => panic!("unexpected subset {other:?}"),
            };
            counts[idx] += 1;
        }
        for c in counts {
            let freq = c as f64 / draws as f64;
            assert!((freq - 1.0 / 3.0).abs() < 0.01, "freq = {freq}");
        }
    }

    #[test]
    fn marginal_inclusion_matches_training_prob() {
        // P(j in U^(i)) = n/(n+m) for every position
        let cfg = PartitionConfig::new(4, 2, 2).unwrap();
        let mut rng = derive_rng(3, 0);
        let draws = 50_000;
        let mut hits = vec![0usize; (cfg.k() * cfg.block_len()) as usize];
        for _ in 0..draws {
            let d = sample_membership(&cfg, &mut rng);
            for i in 0..cfg.k() as usize {
                for j in 0..cfg.block_len() as u16 {
                    if d.is_training(i, j) {
                        hits[i * cfg.block_len() as usize + j as usize] += 1;
                    }
                }
            }
        }
        let expect = cfg.training_prob().0;
        for h in hits {
            let freq = h as f64 / draws as f64;
            assert!((freq - expect).abs() < 0.01, "freq = {freq}");
        }
    }

    #[test]
    fn cv_error_constant_losses_cancel() {
        let cfg = PartitionConfig::new(4, 2, 2).unwrap();
        let losses = LossTable::new(&cfg, vec![0.7; 6]).unwrap();
        let mut rng = derive_rng(5, 0);
        let draw = sample_membership(&cfg, &mut rng);
        let cv = cv_error(&losses, &draw, &cfg).unwrap();
        assert_abs_diff_eq!(cv.overall, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn cv_error_two_point_case() {
        let cfg = PartitionConfig::new(1, 1, 1).unwrap();
        let losses = LossTable::new(&cfg, vec![0.25, 0.75]).unwrap();
        let draw = MembershipDraw { subsets: vec![vec![0]] };
        let cv = cv_error(&losses, &draw, &cfg).unwrap();
        assert_abs_diff_eq!(cv.overall, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn block_symmetry_exact_average_is_zero() {
        // averaging eps^(i) over all memberships of a block gives exactly 0
        let cfg = PartitionConfig::new(2, 2, 1).unwrap();
        let losses = LossTable::new(&cfg, vec![0.1, 0.9, 0.4, 0.3]).unwrap();
        let mut sum = 0.0;
        let mut count = 0.0;
        for a in 0..4u16 {
            for b in (a + 1)..4u16 {
                let draw = MembershipDraw { subsets: vec![vec![a, b]] };
                sum += cv_error(&losses, &draw, &cfg).unwrap().per_block[0];
                count += 1.0;
            }
        }
        assert_abs_diff_eq!(sum / count, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn averaged_training_loss_identity() {
        // E_U[(k/n) sum_train loss] = (k/(n+m)) sum_block loss, exactly
        let losses = [0.2, 0.5, 0.9];
        let subsets: [[u16; 2]; 3] = [[0, 1], [0, 2], [1, 2]];
        let mut avg = 0.0;
        for s in subsets {
            avg += (losses[s[0] as usize] + losses[s[1] as usize]) / 2.0 / 3.0;
        }
        let expect = losses.iter().sum::<f64>() / 3.0;
        assert_abs_diff_eq!(avg, expect, epsilon = 1e-12);
    }

    #[test]
    fn loss_table_shape_is_checked() {
        let cfg = PartitionConfig::new(4, 2, 2).unwrap();
        assert!(LossTable::new(&cfg, vec![0.0; 5]).is_err());
        assert!(LossTable::new(&cfg, vec![f64::NAN; 6]).is_err());
    }

    #[test]
    fn derived_streams_differ() {
        use rand::RngCore;
        let mut a = derive_rng(42, 0);
        let mut b = derive_rng(42, 1);
        let mut c = derive_rng(42, 0);
        let (x, y, z) = (a.next_u64(), b.next_u64(), c.next_u64());
        assert_ne!(x, y);
        assert_eq!(x, z);
    }
}
