//! Seeded random instances and groupings for experiment sweeps.
//!
//! Every draw goes through a ChaCha8 stream addressed by `(seed,
//! trial)`, so trials are reproducible independently of execution
//! order and the same configuration always yields the same bytes.

use groupfair_core::{Grouping, Instance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Generator name advertised in report headers.
pub const PRNG_NAME: &str = "chacha8";

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error("need at least one agent and two alternatives (n = {n}, m = {m})")]
    BadCounts { n: usize, m: usize },
    #[error("k = {k} groups cannot partition n = {n} agents")]
    BadGroupCount { n: usize, k: usize },
    #[error("symmetric grouping needs k | n (n = {n}, k = {k})")]
    NotDivisible { n: usize, k: usize },
    #[error("dimension must be at least 1")]
    BadDimension,
}

/// The PRNG stream for one trial of a seeded run.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Draws an instance with unit-cube coordinates and a uniform random
/// grouping with exactly `k` groups (equal-size when `symmetric`).
pub fn gen_random_euclidean(
    n: usize,
    m: usize,
    k: usize,
    dim: usize,
    seed: u64,
    trial: u64,
    symmetric: bool,
) -> Result<(Instance, Grouping), EnsembleError> {
    let mut rng = trial_rng(seed, trial);
    gen_random_euclidean_with(n, m, k, dim, &mut rng, symmetric)
}

/// Same as [`gen_random_euclidean`], drawing from a caller-owned stream.
pub fn gen_random_euclidean_with(
    n: usize,
    m: usize,
    k: usize,
    dim: usize,
    rng: &mut ChaCha8Rng,
    symmetric: bool,
) -> Result<(Instance, Grouping), EnsembleError> {
    if n < 1 || m < 2 {
        return Err(EnsembleError::BadCounts { n, m });
    }
    if dim < 1 {
        return Err(EnsembleError::BadDimension);
    }
    if k < 1 || k > n {
        return Err(EnsembleError::BadGroupCount { n, k });
    }
    if symmetric && !n.is_multiple_of(k) {
        return Err(EnsembleError::NotDivisible { n, k });
    }
    let point = |rng: &mut ChaCha8Rng| (0..dim).map(|_| rng.gen::<f64>()).collect::<Vec<_>>();
    let agents: Vec<Vec<f64>> = (0..n).map(|_| point(rng)).collect();
    let alts: Vec<Vec<f64>> = (0..m).map(|_| point(rng)).collect();
    let instance = Instance::from_points(&agents, &alts).unwrap();
    let grouping = if symmetric {
        sample_symmetric_partition(n, k, rng)
    } else {
        sample_uniform_partition(n, k, rng)
    };
    Ok((instance, grouping))
}

/// `w[r][j]`: completions when `r` elements remain and `j` blocks are
/// open, targeting exactly `k` blocks overall.
fn partition_weights(n: usize, k: usize) -> Vec<Vec<u128>> {
    let mut w = vec![vec![0u128; k + 2]; n + 1];
    w[0][k] = 1;
    for r in 1..=n {
        for j in 0..=k {
            w[r][j] = j as u128 * w[r - 1][j] + w[r - 1][j + 1];
        }
    }
    w
}

/// Uniform sample over set partitions of `0..n` into exactly `k`
/// non-empty blocks, via the completion-count weights.
fn sample_uniform_partition(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Grouping {
    let w = partition_weights(n, k);
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for e in 0..n {
        let r = n - e;
        let j = blocks.len();
        let pick = rng.gen_range(0..w[r][j]);
        let per_block = w[r - 1][j];
        if pick < j as u128 * per_block {
            blocks[(pick / per_block) as usize].push(e);
        } else {
            blocks.push(vec![e]);
        }
    }
    Grouping::new(blocks, n).unwrap()
}

/// Uniform sample over partitions into `k` blocks of size `n/k`:
/// shuffle, chop, then canonicalize block order.
fn sample_symmetric_partition(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Grouping {
    let size = n / k;
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let mut blocks: Vec<Vec<usize>> = perm
        .chunks(size)
        .map(|c| {
            let mut b = c.to_vec();
            b.sort_unstable();
            b
        })
        .collect();
    blocks.sort_by_key(|b| b[0]);
    Grouping::new(blocks, n).unwrap()
}

/// FNV-1a over the instance's shape and distance bits; stable across
/// runs and platforms, used to fingerprint ensembles in reports.
pub fn instance_digest(inst: &Instance) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    let eat = |h: &mut u64, v: u64| {
        for b in v.to_le_bytes() {
            *h ^= b as u64;
            *h = h.wrapping_mul(0x100000001b3);
        }
    };
    eat(&mut h, inst.n() as u64);
    eat(&mut h, inst.m() as u64);
    let p = inst.num_points();
    for a in 0..p {
        for b in 0..p {
            eat(&mut h, inst.point_dist(a, b).to_bits());
        }
    }
    h
}
