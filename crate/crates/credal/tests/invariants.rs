//! Structural invariants on randomized inputs: the lower-prevision axioms,
//! constant additivity, envelope dominance, distance monotonicity under
//! cone dominance, and neutrality of the dominance filter.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use credal::bench::random_lower_probability;
use credal::cone::{dominated_points, normal_cone_basis};
use credal::distance::normed_distance;
use credal::extension::{natural_extension, tight_upper_envelope};
use credal::maxdist::{
    extension_gap_on, maximal_distance_with, prepare, sample_extension, MaxDistOptions,
};
use credal::polytope::CredalSet;
use credal::{Gamble, LinearPrevision, Tolerances};

proptest! {
    #[test]
    fn norm_triangle_and_cauchy_schwarz(
        a in proptest::collection::vec(-100.0f64..100.0, 1..6),
        bseed in 0u64..1000,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(bseed);
        let b: Vec<f64> = (0..a.len()).map(|_| rng.gen_range(-100.0..100.0)).collect();
        let f = Gamble::new(a).unwrap();
        let g = Gamble::new(b).unwrap();
        let sum = f.axpy(1.0, &g);
        prop_assert!(sum.norm() <= f.norm() + g.norm() + 1e-9);
        prop_assert!(f.dot(&g).unwrap().abs() <= f.norm() * g.norm() + 1e-9);
    }

    #[test]
    fn centering_is_idempotent_and_orthogonal(
        a in proptest::collection::vec(-50.0f64..50.0, 1..7),
    ) {
        let f = Gamble::new(a).unwrap();
        let c = f.centered();
        prop_assert!(c.approx_eq(&c.centered(), 1e-12));
        let maxabs = c.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let ip = c.dot(&Gamble::ones(c.len())).unwrap().abs();
        prop_assert!(ip <= 1e-12 * c.len() as f64 * maxabs.max(1.0));
    }
}

fn random_gamble(s: usize, rng: &mut ChaCha8Rng) -> Gamble {
    Gamble::new((0..s).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap()
}

#[test]
fn lower_prevision_axioms_on_random_credal_sets() {
    let tol = Tolerances::DEFAULT;
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for seed in 0..10u64 {
        let s = 3 + (seed % 2) as usize;
        let a = random_lower_probability(s, seed).unwrap();
        let cs = CredalSet::from_assessment(&a, &tol);
        for _ in 0..40 {
            let f = random_gamble(s, &mut rng);
            let g = random_gamble(s, &mut rng);
            let ne_f = natural_extension(&cs, &f).unwrap();
            let ne_g = natural_extension(&cs, &g).unwrap();
            // P1: accepting sure gains
            let min_f = f.values().iter().fold(f64::INFINITY, |m, &v| m.min(v));
            assert!(ne_f >= min_f - 1e-9);
            // P2: positive homogeneity
            let lam = rng.gen_range(0.0..3.0);
            let scaled = Gamble::new(f.values().iter().map(|v| lam * v).collect()).unwrap();
            assert!((natural_extension(&cs, &scaled).unwrap() - lam * ne_f).abs() <= 1e-9 * (1.0 + lam));
            // P3: superlinearity
            let fg = f.axpy(1.0, &g);
            assert!(natural_extension(&cs, &fg).unwrap() >= ne_f + ne_g - 1e-9);
            // constant additivity
            let c = rng.gen_range(-1.5..1.5);
            let shifted = f.axpy(c, &Gamble::ones(s));
            assert!((natural_extension(&cs, &shifted).unwrap() - (ne_f + c)).abs() <= 1e-9);
            // minimal extension is dominated by the tight upper envelope
            assert!(ne_f <= tight_upper_envelope(&cs, &f).unwrap() + 1e-9);
        }
        // on assessed gambles of a coherent assessment both extensions agree
        for (g, l) in a.items() {
            let ne = natural_extension(&cs, g).unwrap();
            let tue = tight_upper_envelope(&cs, g).unwrap();
            assert!((ne - l).abs() <= 1e-7, "natural extension attains the bound");
            assert!((tue - l).abs() <= 1e-7, "envelope is tight on assessed gambles");
        }
    }
}

#[test]
fn dominance_implies_larger_distance() {
    let tol = Tolerances::DEFAULT;
    for seed in 0..8u64 {
        let a = random_lower_probability(3, seed).unwrap();
        let prepared = prepare(&a, &tol).unwrap();
        let cs = &prepared.credal;
        let pool: Vec<LinearPrevision> = cs.vertices().to_vec();
        for ei in 0..cs.vertices().len() {
            let basis = normal_cone_basis(cs, ei).unwrap();
            let e = &cs.vertices()[ei];
            for (ci, cand) in pool.iter().enumerate() {
                if ci == ei {
                    continue;
                }
                let d_cand = normed_distance(&basis, e, cand).distance;
                for j in dominated_points(&basis, cand, &pool, &tol) {
                    if j == ei {
                        continue;
                    }
                    let d_j = normed_distance(&basis, e, &pool[j]).distance;
                    assert!(d_j <= d_cand + 1e-9, "seed {seed} E={ei} {ci}>{j}");
                }
            }
        }
    }
}

#[test]
fn dominance_filter_is_neutral() {
    for seed in 0..10u64 {
        let s = 3 + (seed % 2) as usize;
        let a = random_lower_probability(s, seed).unwrap();
        let on = maximal_distance_with(&a, &MaxDistOptions::default()).unwrap();
        let off = maximal_distance_with(
            &a,
            &MaxDistOptions {
                filter_dominance: false,
                ..MaxDistOptions::default()
            },
        )
        .unwrap();
        assert_eq!(
            on.max_distance.to_bits(),
            off.max_distance.to_bits(),
            "seed {seed}: pruning changed the result"
        );
        assert!(on.counters.qp_calls <= off.counters.qp_calls);
    }
}

#[test]
fn sampled_extension_pairs_stay_within_the_bound() {
    // lower envelopes of one maximizer per face are coherent extensions of
    // the assessment; any two of them differ by at most the reported value
    // on every unit gamble
    let tol = Tolerances::DEFAULT;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for seed in 0..6u64 {
        let a = random_lower_probability(3, seed).unwrap();
        let prepared = prepare(&a, &tol).unwrap();
        let report = maximal_distance_with(&a, &MaxDistOptions::default()).unwrap();
        let cs = &prepared.credal;
        let mut extensions = Vec::new();
        for _ in 0..6 {
            let dir = random_gamble(3, &mut rng);
            let extras: Vec<usize> = (0..cs.vertices().len())
                .filter(|_| rng.gen_bool(0.3))
                .collect();
            extensions.push(sample_extension(cs, &dir, &extras));
        }
        let lower = |points: &[LinearPrevision], h: &Gamble| {
            points
                .iter()
                .map(|p| p.expectation(h))
                .fold(f64::INFINITY, f64::min)
        };
        for _ in 0..200 {
            let h = random_gamble(3, &mut rng).centered();
            let n = h.norm();
            if n < 1e-9 {
                continue;
            }
            let h = Gamble::new(h.values().iter().map(|v| v / n).collect()).unwrap();
            for i in 0..extensions.len() {
                for j in i + 1..extensions.len() {
                    let d = (lower(&extensions[i], &h) - lower(&extensions[j], &h)).abs();
                    assert!(
                        d <= report.max_distance + 1e-6,
                        "seed {seed}: sampled pair differs by {d} > {}",
                        report.max_distance
                    );
                }
            }
        }
    }
}

#[test]
fn per_gamble_gap_is_dominated_by_max_distance() {
    let tol = Tolerances::DEFAULT;
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for seed in 0..6u64 {
        let a = random_lower_probability(3, seed).unwrap();
        let prepared = prepare(&a, &tol).unwrap();
        let report = maximal_distance_with(&a, &MaxDistOptions::default()).unwrap();
        for _ in 0..300 {
            let h = random_gamble(3, &mut rng);
            let c = h.centered();
            if c.norm() < 1e-9 {
                continue;
            }
            let gap = extension_gap_on(&prepared.credal, &h).unwrap();
            assert!(
                gap / c.norm() <= report.max_distance + 1e-6,
                "seed {seed}: {} > {}",
                gap / c.norm(),
                report.max_distance
            );
        }
    }
}
