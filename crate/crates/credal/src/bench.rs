//! Random coherent lower-probability generation and the benchmark harness.
//!
//! Instances are lower envelopes of a handful of uniformly drawn mass
//! vectors over all non-trivial events, which makes them coherent by
//! construction: every bound is attained at one of the generating points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamble::{Assessment, Gamble};
use crate::maxdist::MaxDistOptions;

/// Aggregated counters for one sample-space size.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BenchStats {
    pub space_size: usize,
    pub trials: usize,
    pub avg_vertices: f64,
    pub avg_qp_calls: f64,
    pub avg_distances_needed: f64,
    /// Total QP calls over total distances needed; 1.0 when nothing was
    /// needed at all.
    pub ratio: f64,
}

/// A coherent lower probability on all `2^s − 2` non-trivial events:
/// lower values are coordinatewise minima over `m` mass vectors drawn
/// uniformly from the simplex, with `m` itself drawn from `[s+1, 3s]`.
/// Deterministic in `(s, seed)`.
pub fn random_lower_probability(s: usize, seed: u64) -> Result<Assessment> {
    if !(2..=8).contains(&s) {
        return Err(Error::InvalidInput(format!(
            "sample-space size {s} outside supported range 2..=8"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.gen_range(s + 1..=3 * s);
    let points: Vec<Vec<f64>> = (0..m).map(|_| uniform_simplex_point(s, &mut rng)).collect();
    let mut items = Vec::with_capacity((1usize << s) - 2);
    for event in 1..((1usize << s) - 1) {
        let subset: Vec<usize> = (0..s).filter(|x| event >> x & 1 == 1).collect();
        let gamble = Gamble::indicator(&subset, s)?;
        let lower = points
            .iter()
            .map(|p| subset.iter().map(|&x| p[x]).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        items.push((gamble, lower));
    }
    Assessment::new(s, items)
}

fn uniform_simplex_point(s: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    // normalized exponentials give the flat Dirichlet
    let raw: Vec<f64> = (0..s).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

/// Runs `trials` random instances per size and aggregates vertex and QP
/// counters. Per-trial seeds derive deterministically from the master seed,
/// so results do not depend on scheduling or worker counts.
pub fn run_benchmark(sizes: &[usize], trials: usize, seed: u64) -> Result<Vec<BenchStats>> {
    run_benchmark_with(sizes, trials, seed, &MaxDistOptions::default())
}

pub fn run_benchmark_with(
    sizes: &[usize],
    trials: usize,
    seed: u64,
    opts: &MaxDistOptions,
) -> Result<Vec<BenchStats>> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be >= 1".into()));
    }
    let mut out = Vec::with_capacity(sizes.len());
    for &s in sizes {
        let mut vertices = 0u64;
        let mut qp_calls = 0u64;
        let mut needed = 0u64;
        for trial in 0..trials {
            let a = random_lower_probability(s, trial_seed(seed, s, trial))?;
            let prepared = crate::maxdist::prepare(&a, &opts.tol)?;
            let report = crate::maxdist::maximal_distance_on(&prepared, opts)?;
            vertices += prepared.credal.vertices().len() as u64;
            qp_calls += report.counters.qp_calls;
            needed += report.counters.distances_needed;
        }
        let t = trials as f64;
        out.push(BenchStats {
            space_size: s,
            trials,
            avg_vertices: vertices as f64 / t,
            avg_qp_calls: qp_calls as f64 / t,
            avg_distances_needed: needed as f64 / t,
            ratio: if needed == 0 {
                1.0
            } else {
                qp_calls as f64 / needed as f64
            },
        });
    }
    Ok(out)
}

fn trial_seed(master: u64, size: usize, trial: usize) -> u64 {
    // splitmix-style mix; only determinism matters here
    let mut z = master
        .wrapping_add((size as u64) << 32)
        .wrapping_add(trial as u64)
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// `s!`, the vertex-count ceiling for lower-probability credal sets.
pub fn vertex_count_bound(s: usize) -> f64 {
    factorial(s)
}
