//! Normal cones at credal-set vertices.
//!
//! At a vertex `E`, the gambles whose minimum over the credal set is attained
//! at `E` form a cone: the positive hull of the constraint rows tight at `E`
//! (plus constants). This module builds that positive basis (raw and
//! centered), decides membership, and decides vertex dominance on a cone.

use crate::error::{Error, Result};
use crate::gamble::{Gamble, LinearPrevision};
use crate::polytope::CredalSet;
use crate::tol::Tolerances;

/// The positive basis of the normal cone at one vertex.
#[derive(Clone, Debug)]
pub struct NormalConeBasis {
    /// Index of the apex vertex in the credal set.
    pub vertex_index: usize,
    /// Constraint rows tight at the vertex (original and coordinate rows).
    pub row_indices: Vec<usize>,
    /// The tight rows' gambles as stored (assessment already shifted).
    pub raw: Vec<Gamble>,
    /// Zero-sum versions of the raw gambles; these span the cone modulo
    /// constants and are what the distance QP consumes.
    pub centered: Vec<Gamble>,
}

impl NormalConeBasis {
    pub fn len(&self) -> usize {
        self.row_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.row_indices.is_empty()
    }
}

/// Collects the rows tight at `vertex_index` into a cone basis.
pub fn normal_cone_basis(cs: &CredalSet, vertex_index: usize) -> Result<NormalConeBasis> {
    if vertex_index >= cs.vertices().len() {
        return Err(Error::IndexOutOfRange {
            index: vertex_index,
            len: cs.vertices().len(),
        });
    }
    let inc = &cs.incidence()[vertex_index];
    let mut row_indices = Vec::new();
    let mut raw = Vec::new();
    let mut centered = Vec::new();
    for (i, row) in cs.constraints().rows().iter().enumerate() {
        if inc[i] {
            row_indices.push(i);
            raw.push(row.gamble.clone());
            centered.push(row.gamble.centered());
        }
    }
    Ok(NormalConeBasis {
        vertex_index,
        row_indices,
        raw,
        centered,
    })
}

/// Indices `j` of `pool` dominated by `candidate` on the basis: for every
/// basis gamble `f_i`, `candidate·f_i ≥ pool[j]·f_i − tol.tight`.
///
/// Dominated points have a normed distance from the cone's apex no larger
/// than the candidate's, so their QP evaluation can be skipped.
pub fn dominated_points(
    basis: &NormalConeBasis,
    candidate: &LinearPrevision,
    pool: &[LinearPrevision],
    tol: &Tolerances,
) -> Vec<usize> {
    let cand_vals: Vec<f64> = basis.raw.iter().map(|f| candidate.expectation(f)).collect();
    pool.iter()
        .enumerate()
        .filter(|(_, p)| {
            basis
                .raw
                .iter()
                .zip(&cand_vals)
                .all(|(f, &cv)| cv >= p.expectation(f) - tol.tight)
        })
        .map(|(j, _)| j)
        .collect()
}

/// Whether `h` lies in the cone spanned by the basis plus constants: true
/// iff the centered version of `h` is a non-negative combination of the
/// centered basis gambles (within `tol.tight`, relative to the gamble's
/// scale).
pub fn cone_membership(basis: &NormalConeBasis, h: &Gamble, tol: &Tolerances) -> bool {
    let target = h.centered();
    let scale = target.norm().max(1.0);
    let residual = nonneg_ls_residual(&basis.centered, &target);
    residual <= tol.tight * scale
}

/// Minimum of `‖target − Σ α_i g_i‖` over `α ≥ 0`, found by enumerating
/// supports: on the optimal support the unconstrained least-squares solution
/// is the constrained optimum. Exponential in the basis size, which stays
/// small here (tight rows at a vertex).
pub(crate) fn nonneg_ls_residual(generators: &[Gamble], target: &Gamble) -> f64 {
    let k = generators.len();
    if k == 0 {
        return target.norm();
    }
    let mut best = target.norm(); // alpha = 0
    for mask in 1u64..(1u64 << k) {
        let support: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
        let m = support.len();
        let mut gram = nalgebra::DMatrix::<f64>::zeros(m, m);
        let mut rhs = nalgebra::DVector::<f64>::zeros(m);
        for (a, &i) in support.iter().enumerate() {
            for (b, &j) in support.iter().enumerate() {
                gram[(a, b)] = generators[i].dot(&generators[j]).expect("equal lengths");
            }
            rhs[a] = generators[i].dot(target).expect("equal lengths");
        }
        let svd = gram.svd(true, true);
        let alpha = match svd.solve(&rhs, 1e-12) {
            Ok(a) => a,
            Err(_) => continue,
        };
        if alpha.iter().any(|&v| v < -1e-9) {
            continue;
        }
        let mut resid = target.clone();
        for (a, &i) in support.iter().enumerate() {
            resid = resid.axpy(-alpha[a].max(0.0), &generators[i]);
        }
        best = best.min(resid.norm());
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::CredalSet;
    use crate::testutil::pentagon;
    use crate::gamble::Assessment;

    fn g(v: &[f64]) -> Gamble {
        Gamble::new(v.to_vec()).unwrap()
    }

    fn find_vertex(cs: &CredalSet, target: &[f64]) -> usize {
        (0..cs.vertices().len())
            .find(|&j| {
                cs.vertices()[j]
                    .mass()
                    .iter()
                    .zip(target)
                    .all(|(a, b)| (a - b).abs() < 5e-3)
            })
            .expect("vertex present")
    }

    #[test]
    fn basis_at_pentagon_vertex() {
        let cs = CredalSet::from_assessment(&pentagon(), &Tolerances::DEFAULT);
        let e1 = find_vertex(&cs, &[0.4, 0.32, 0.28]);
        let basis = normal_cone_basis(&cs, e1).unwrap();
        assert_eq!(basis.row_indices, vec![0, 4], "rows f1 and f5 are tight at E1");
        assert!(basis.centered[0].approx_eq(&g(&[-0.5, 0.5, 0.0]), 1e-9));
        assert!(basis.centered[1].approx_eq(&g(&[-0.2, 0.6, -0.4]), 1e-9));
    }

    #[test]
    fn basis_on_segment_endpoint() {
        let a = Assessment::new(2, vec![(g(&[1.0, 0.0]), 0.3)]).unwrap();
        let cs = CredalSet::from_assessment(&a, &Tolerances::DEFAULT)
            .remove_loose_constraints()
            .unwrap();
        let at_one = find_vertex(&cs, &[1.0, 0.0]);
        let basis = normal_cone_basis(&cs, at_one).unwrap();
        assert_eq!(basis.len(), 1);
        assert_eq!(basis.raw[0].values(), &[0.0, 1.0], "only p2 = 0 is tight there");
    }

    #[test]
    fn basis_on_simplex_corner() {
        let a = Assessment::new(3, vec![]).unwrap();
        let cs = CredalSet::from_assessment(&a, &Tolerances::DEFAULT);
        let corner = find_vertex(&cs, &[1.0, 0.0, 0.0]);
        let basis = normal_cone_basis(&cs, corner).unwrap();
        assert_eq!(basis.len(), 2);
        assert_eq!(basis.raw[0].values(), &[0.0, 1.0, 0.0]);
        assert_eq!(basis.raw[1].values(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn out_of_range_vertex() {
        let cs = CredalSet::from_assessment(&pentagon(), &Tolerances::DEFAULT);
        assert!(normal_cone_basis(&cs, 99).is_err());
    }

    #[test]
    fn dominance_is_reflexive_and_transitive() {
        let cs = CredalSet::from_assessment(&pentagon(), &Tolerances::DEFAULT);
        let tol = Tolerances::DEFAULT;
        let pool = cs.vertices().to_vec();
        for vi in 0..pool.len() {
            let basis = normal_cone_basis(&cs, vi).unwrap();
            let dominated: Vec<Vec<usize>> = pool
                .iter()
                .map(|p| dominated_points(&basis, p, &pool, &tol))
                .collect();
            for (j, dom) in dominated.iter().enumerate() {
                assert!(dom.contains(&j), "every point dominates itself");
                // transitivity; the fixture has no near-ties at the
                // tolerance scale, so no slack stacking to worry about
                for &b in dom {
                    for &c in &dominated[b] {
                        assert!(
                            dom.contains(&c),
                            "cone {vi}: {j} dominates {b} dominates {c} but not {j} -> {c}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn dominance_on_segment() {
        let a = Assessment::new(2, vec![(g(&[1.0, 0.0]), 0.3)]).unwrap();
        let cs = CredalSet::from_assessment(&a, &Tolerances::DEFAULT)
            .remove_loose_constraints()
            .unwrap();
        let at_one = find_vertex(&cs, &[1.0, 0.0]);
        let basis = normal_cone_basis(&cs, at_one).unwrap();
        let tol = Tolerances::DEFAULT;
        let candidate = LinearPrevision::new(vec![0.3, 0.7], &tol).unwrap();
        let pool = vec![LinearPrevision::new(vec![0.65, 0.35], &tol).unwrap()];
        let dom = dominated_points(&basis, &candidate, &pool, &tol);
        assert_eq!(dom, vec![0], "0.7 >= 0.35 on the single basis gamble");
        // and not the other way around
        let dom_rev = dominated_points(&basis, &pool[0], &[candidate], &tol);
        assert!(dom_rev.is_empty());
    }

    #[test]
    fn membership_basics() {
        let cs = CredalSet::from_assessment(&pentagon(), &Tolerances::DEFAULT);
        let e1 = (0..cs.vertices().len())
            .find(|&j| (cs.vertices()[j].mass()[0] - 0.4).abs() < 5e-3)
            .unwrap();
        let basis = normal_cone_basis(&cs, e1).unwrap();
        let tol = Tolerances::DEFAULT;
        let f1c = basis.centered[0].clone();
        let f5c = basis.centered[1].clone();
        assert!(cone_membership(&basis, &f1c, &tol), "basis element");
        let combo = f1c.axpy(2.0, &f5c).axpy(3.0, &Gamble::ones(3));
        assert!(cone_membership(&basis, &combo, &tol), "positive combination plus constant");
        let single = NormalConeBasis {
            vertex_index: e1,
            row_indices: vec![0],
            raw: vec![basis.raw[0].clone()],
            centered: vec![f1c.clone()],
        };
        assert!(!cone_membership(&single, &f1c.scaled(-1.0), &tol), "negative ray");
    }

    #[test]
    fn membership_matches_natural_extension_at_vertex() {
        // defining property: h in N(E) iff the minimum over the credal set
        // is attained at E
        let cs = CredalSet::from_assessment(&pentagon(), &Tolerances::DEFAULT);
        let tol = Tolerances::DEFAULT;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let vi = rng.gen_range(0..cs.vertices().len());
            let basis = normal_cone_basis(&cs, vi).unwrap();
            // random positive combination stays in the cone
            let mut h = Gamble::from_vec(vec![0.0; 3]);
            for c in &basis.centered {
                h = h.axpy(rng.gen_range(0.0..2.0), c);
            }
            assert!(cone_membership(&basis, &h, &tol));
            let ne = crate::extension::natural_extension(&cs, &h).unwrap();
            let at_vertex = cs.vertices()[vi].expectation(&h);
            assert!((ne - at_vertex).abs() <= 1e-7 * (1.0 + at_vertex.abs()));
        }
    }
}
