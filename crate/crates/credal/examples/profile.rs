//! Profiling helper for larger sample spaces: prints enumeration time,
//! the normal-cone basis-size histogram and the sweep time for one random
//! lower-probability instance.
//!
//! ```sh
//! cargo run --release -p credal --example profile -- 6 [seed]
//! ```

use std::time::Instant;

use credal::bench::random_lower_probability;
use credal::cone::normal_cone_basis;
use credal::maxdist::{maximal_distance_on, prepare, MaxDistOptions};
use credal::Tolerances;

fn main() {
    let s: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(6);
    let seed: u64 = std::env::args()
        .nth(2)
        .and_then(|a| a.parse().ok())
        .unwrap_or(1);
    let a = random_lower_probability(s, seed).unwrap();
    let t0 = Instant::now();
    let prepared = prepare(&a, &Tolerances::DEFAULT).unwrap();
    let t_enum = t0.elapsed();
    let v = prepared.credal.vertices().len();
    let mut hist = std::collections::BTreeMap::new();
    for i in 0..v {
        let b = normal_cone_basis(&prepared.credal, i).unwrap();
        *hist.entry(b.len()).or_insert(0usize) += 1;
    }
    println!("s={s}: {v} vertices, enumeration {t_enum:?}, basis sizes {hist:?}");
    let t1 = Instant::now();
    let rep = maximal_distance_on(&prepared, &MaxDistOptions::default()).unwrap();
    println!(
        "sweep {:?}: max {}, qp_calls {}, needed {}",
        t1.elapsed(),
        rep.max_distance,
        rep.counters.qp_calls,
        rep.counters.distances_needed
    );
}
