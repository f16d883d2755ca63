//! Worst-case distance between coherent extensions of an assessment.
//!
//! For every vertex `E` of the credal set, over the faces of the assessed
//! constraints, take the farthest face vertex by normed distance, then the
//! nearest such face, then the worst vertex:
//!
//! ```text
//!   max over E  ·  min over assessed rows f  ·  max over F in face(f)  ·  d_E(E, F)
//! ```
//!
//! This value bounds how far any two coherent extensions of the assessment
//! can drift apart on a unit gamble. Two prunings keep the QP count down
//! without changing the result: within a face, vertices dominated on the
//! cone basis are skipped (their distance cannot exceed an already-computed
//! one), and faces all of whose processed competitors are dominated by one
//! of their vertices cannot lower the minimum and are filtered out.

use serde::Serialize;

use crate::cone::{self, NormalConeBasis};
use crate::distance::normed_distance;
use crate::error::{Error, Result};
use crate::extension::{check_on, natural_extension, tight_upper_envelope, CoherenceReport};
use crate::gamble::{Assessment, Gamble, LinearPrevision};
use crate::polytope::{CredalSet, Face};
use crate::tol::Tolerances;

/// Knobs for [`maximal_distance_with`].
#[derive(Clone, Copy, Debug)]
pub struct MaxDistOptions {
    pub tol: Tolerances,
    /// Disable to evaluate every (vertex, face, vertex) triple; the result
    /// must be identical, only the counters change.
    pub filter_dominance: bool,
    /// Worker count for the outer vertex loop; 0 and 1 both mean
    /// sequential. The result is identical for any value.
    pub threads: usize,
}

impl Default for MaxDistOptions {
    fn default() -> Self {
        MaxDistOptions {
            tol: Tolerances::DEFAULT,
            filter_dominance: true,
            threads: 1,
        }
    }
}

/// Instrumentation counters over one whole computation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct QpCounters {
    /// Actual invocations of the distance QP.
    pub qp_calls: u64,
    /// Vertex pairs that had to be considered across processed faces.
    pub distances_needed: u64,
    /// Pairs skipped because the far vertex was dominated on the cone.
    pub dominance_skips: u64,
}

/// Location of the worst-case value.
#[derive(Clone, Debug, Serialize)]
pub struct DistanceWitness {
    /// Vertex `E` realizing the outer maximum.
    pub vertex: usize,
    /// Assessed row whose face realizes the minimum at that vertex.
    pub face_row: usize,
    /// Face vertex `F` realizing the inner maximum.
    pub far_vertex: usize,
    /// Unit-norm maximizing gamble of the `(E, F)` distance QP.
    pub gamble: Gamble,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PerVertexDistance {
    pub vertex: usize,
    pub min_over_faces: f64,
}

/// Result of [`maximal_distance`].
#[derive(Clone, Debug, Serialize)]
pub struct DistanceReport {
    pub max_distance: f64,
    /// Absent when the value is zero (singleton credal set or degenerate
    /// geometry): no gamble separates any pair of vertices.
    pub witness: Option<DistanceWitness>,
    pub per_vertex: Vec<PerVertexDistance>,
    pub counters: QpCounters,
    /// True when the input was incoherent and its lower values were
    /// replaced by their natural extension before the computation.
    pub corrected: bool,
    pub coherence: CoherenceReport,
}

/// An enumerated, loose-row-free credal set ready for distance work, plus
/// what had to be done to the assessment to get there.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub credal: CredalSet,
    pub coherence: CoherenceReport,
    pub corrected: bool,
}

/// Enumerates the credal set of `a`, auto-corrects an incoherent (but sure
/// loss avoiding) assessment to its natural extension, and strips loose
/// rows. Errors on sure loss or an empty assessment.
pub fn prepare(a: &Assessment, tol: &Tolerances) -> Result<Prepared> {
    if a.is_empty() {
        return Err(Error::DegenerateAssessment);
    }
    let cs = CredalSet::from_assessment(a, tol);
    if cs.is_empty() {
        return Err(Error::SureLoss);
    }
    let coherence = check_on(a, &cs, tol);
    let corrected = !coherence.coherent;
    let cs = if corrected { cs.retighten_original_rows() } else { cs };
    let credal = cs.remove_loose_constraints()?;
    Ok(Prepared {
        credal,
        coherence,
        corrected,
    })
}

/// The worst-case normed distance between coherent extensions of `a`, with
/// default options.
pub fn maximal_distance(a: &Assessment) -> Result<DistanceReport> {
    maximal_distance_with(a, &MaxDistOptions::default())
}

pub fn maximal_distance_with(a: &Assessment, opts: &MaxDistOptions) -> Result<DistanceReport> {
    let prepared = prepare(a, &opts.tol)?;
    maximal_distance_on(&prepared, opts)
}

/// Runs the vertex/face sweep on an already-prepared credal set.
pub fn maximal_distance_on(prepared: &Prepared, opts: &MaxDistOptions) -> Result<DistanceReport> {
    let cs = &prepared.credal;
    let originals = cs.original_rows();
    if originals.is_empty() {
        return Err(Error::DegenerateAssessment);
    }
    let n = cs.vertices().len();
    let outcomes = run_vertices(cs, &originals, opts, n);

    let mut counters = QpCounters::default();
    let mut per_vertex = Vec::with_capacity(n);
    let mut max_distance = 0.0f64;
    let mut witness: Option<DistanceWitness> = None;
    for o in outcomes {
        counters.qp_calls += o.counters.qp_calls;
        counters.distances_needed += o.counters.distances_needed;
        counters.dominance_skips += o.counters.dominance_skips;
        per_vertex.push(PerVertexDistance {
            vertex: o.vertex,
            min_over_faces: o.min_over_faces,
        });
        if o.min_over_faces > max_distance {
            max_distance = o.min_over_faces;
            witness = o.best.map(|b| DistanceWitness {
                vertex: o.vertex,
                face_row: b.face_row,
                far_vertex: b.far_vertex,
                gamble: b.unit_gamble,
            });
        }
    }
    Ok(DistanceReport {
        max_distance,
        witness,
        per_vertex,
        counters,
        corrected: prepared.corrected,
        coherence: prepared.coherence.clone(),
    })
}

struct BestOnVertex {
    face_row: usize,
    far_vertex: usize,
    unit_gamble: Gamble,
}

struct VertexOutcome {
    vertex: usize,
    min_over_faces: f64,
    best: Option<BestOnVertex>,
    counters: QpCounters,
}

fn run_vertices(
    cs: &CredalSet,
    originals: &[usize],
    opts: &MaxDistOptions,
    n: usize,
) -> Vec<VertexOutcome> {
    let workers = opts.threads.max(1).min(n.max(1));
    if workers <= 1 {
        return (0..n).map(|v| vertex_sweep(cs, v, originals, opts)).collect();
    }
    let mut merged: Vec<Option<VertexOutcome>> = (0..n).map(|_| None).collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    let mut out = Vec::new();
                    let mut v = w;
                    while v < n {
                        out.push(vertex_sweep(cs, v, originals, opts));
                        v += workers;
                    }
                    out
                })
            })
            .collect();
        for h in handles {
            for o in h.join().expect("worker panicked") {
                let slot = o.vertex;
                merged[slot] = Some(o);
            }
        }
    });
    merged.into_iter().map(|o| o.expect("all vertices covered")).collect()
}

/// The min-over-faces sweep at one vertex: adjacent assessed faces first,
/// then every surviving non-adjacent assessed face.
fn vertex_sweep(
    cs: &CredalSet,
    vertex: usize,
    originals: &[usize],
    opts: &MaxDistOptions,
) -> VertexOutcome {
    let basis = cone::normal_cone_basis(cs, vertex).expect("vertex in range");
    let e = &cs.vertices()[vertex];
    // Expectation of every vertex on every basis row, for dominance tests.
    let basis_vals: Vec<Vec<f64>> = cs
        .vertices()
        .iter()
        .map(|p| basis.raw.iter().map(|f| p.expectation(f)).collect())
        .collect();
    let dominates = |a: usize, b: usize| -> bool {
        basis_vals[a]
            .iter()
            .zip(&basis_vals[b])
            .all(|(x, y)| *x >= *y - opts.tol.tight)
    };

    let adjacent: Vec<usize> = originals
        .iter()
        .copied()
        .filter(|r| basis.row_indices.contains(r))
        .collect();
    let rest: Vec<usize> = originals
        .iter()
        .copied()
        .filter(|r| !adjacent.contains(r))
        .collect();

    let mut counters = QpCounters::default();
    let mut min_over_faces = f64::INFINITY;
    let mut best: Option<BestOnVertex> = None;
    let mut processed: Vec<Vec<usize>> = Vec::new(); // vertex sets of processed faces

    let handle_face = |row: usize,
                           counters: &mut QpCounters,
                           min_over_faces: &mut f64,
                           best: &mut Option<BestOnVertex>,
                           processed: &mut Vec<Vec<usize>>| {
        let face = cs.face(row).expect("row in range");
        let mut members: Vec<usize> = face
            .vertex_indices
            .iter()
            .copied()
            .filter(|&j| j != vertex)
            .collect();
        // Farthest first maximizes early dominance skips.
        members.sort_by(|&a, &b| {
            let da = e.euclidean_distance(&cs.vertices()[a]);
            let db = e.euclidean_distance(&cs.vertices()[b]);
            db.partial_cmp(&da).unwrap().then(a.cmp(&b))
        });
        counters.distances_needed += members.len() as u64;
        let mut max_face_dist = 0.0f64;
        let mut face_best: Option<(usize, Gamble)> = None;
        let mut dominated: Vec<bool> = vec![false; members.len()];
        for (mi, &fj) in members.iter().enumerate() {
            if opts.filter_dominance && dominated[mi] {
                counters.dominance_skips += 1;
            } else {
                counters.qp_calls += 1;
                let res = normed_distance(&basis, e, &cs.vertices()[fj]);
                if res.distance > max_face_dist {
                    max_face_dist = res.distance;
                    let norm = res.witness.norm();
                    if norm > 0.0 {
                        face_best = Some((fj, res.witness.scaled(1.0 / norm)));
                    }
                }
            }
            if opts.filter_dominance {
                for (mj, &other) in members.iter().enumerate() {
                    if mj != mi && !dominated[mj] && dominates(fj, other) {
                        dominated[mj] = true;
                    }
                }
            }
        }
        if max_face_dist < *min_over_faces {
            *min_over_faces = max_face_dist;
            *best = face_best.map(|(far_vertex, unit_gamble)| BestOnVertex {
                face_row: row,
                far_vertex,
                unit_gamble,
            });
        }
        processed.push(face.vertex_indices.clone());
    };

    for &row in &adjacent {
        handle_face(row, &mut counters, &mut min_over_faces, &mut best, &mut processed);
    }
    for &row in &rest {
        if opts.filter_dominance {
            let face = cs.face(row).expect("row in range");
            let excluded = face.vertex_indices.iter().any(|&v| {
                processed
                    .iter()
                    .any(|pf| pf.iter().all(|&w| dominates(v, w)))
            });
            if excluded {
                continue;
            }
        }
        handle_face(row, &mut counters, &mut min_over_faces, &mut best, &mut processed);
    }

    if !min_over_faces.is_finite() {
        min_over_faces = 0.0;
    }
    VertexOutcome {
        vertex,
        min_over_faces,
        best,
        counters,
    }
}

/// Among assessed rows not yet processed at the cone of `basis`, keeps the
/// faces that could still lower the running minimum: a face is dropped when
/// one of its vertices dominates every vertex of some already-processed
/// face (its maximum then cannot fall below that face's maximum).
pub fn filter_dominating_faces(
    cs: &CredalSet,
    basis: &NormalConeBasis,
    processed_faces: &[Face],
    tol: &Tolerances,
) -> Vec<usize> {
    let processed_rows: Vec<usize> = processed_faces.iter().map(|f| f.constraint_index).collect();
    let vals: Vec<Vec<f64>> = cs
        .vertices()
        .iter()
        .map(|p| basis.raw.iter().map(|f| p.expectation(f)).collect())
        .collect();
    let dominates = |a: usize, b: usize| -> bool {
        vals[a].iter().zip(&vals[b]).all(|(x, y)| *x >= *y - tol.tight)
    };
    cs.original_rows()
        .into_iter()
        .filter(|r| !processed_rows.contains(r))
        .filter(|&r| {
            let face = cs.face(r).expect("row in range");
            !face.vertex_indices.iter().any(|&v| {
                processed_faces
                    .iter()
                    .any(|pf| pf.vertex_indices.iter().all(|&w| dominates(v, w)))
            })
        })
        .collect()
}

/// Oracle twin of [`maximal_distance`]: evaluates every (vertex, assessed
/// face, face vertex) triple with no pruning at all. Guarded to small
/// instances.
pub fn maximal_distance_bruteforce(a: &Assessment) -> Result<f64> {
    maximal_distance_bruteforce_with(a, &Tolerances::DEFAULT)
}

pub fn maximal_distance_bruteforce_with(a: &Assessment, tol: &Tolerances) -> Result<f64> {
    let prepared = prepare(a, tol)?;
    let cs = &prepared.credal;
    let originals = cs.original_rows();
    if originals.is_empty() {
        return Err(Error::DegenerateAssessment);
    }
    let v = cs.vertices().len();
    if v > 200 {
        return Err(Error::SizeGuard {
            what: "brute-force maximal distance vertex count",
            limit: 200,
            actual: v,
        });
    }
    let mut overall = 0.0f64;
    for ei in 0..v {
        let basis = cone::normal_cone_basis(cs, ei)?;
        let e = &cs.vertices()[ei];
        let mut min_over_faces = f64::INFINITY;
        for &row in &originals {
            let face = cs.face(row)?;
            let mut max_face = 0.0f64;
            for &fj in &face.vertex_indices {
                if fj == ei {
                    continue;
                }
                let res = normed_distance(&basis, e, &cs.vertices()[fj]);
                max_face = max_face.max(res.distance);
            }
            min_over_faces = min_over_faces.min(max_face);
        }
        if min_over_faces.is_finite() {
            overall = overall.max(min_over_faces);
        }
    }
    Ok(overall)
}

/// How much two coherent extensions of `a` can differ on the gamble `h`:
/// the tight upper envelope minus the natural extension. Constant gambles
/// return 0. Dividing by `‖h.centered()‖` gives the normed per-gamble gap.
pub fn extension_gap(a: &Assessment, h: &Gamble) -> Result<f64> {
    let prepared = prepare(a, &Tolerances::DEFAULT)?;
    extension_gap_on(&prepared.credal, h)
}

/// Same as [`extension_gap`] on a prepared credal set.
pub fn extension_gap_on(cs: &CredalSet, h: &Gamble) -> Result<f64> {
    if h.centered().norm() <= 1e-12 * (h.norm() + 1.0) {
        return Ok(0.0);
    }
    let tue = tight_upper_envelope(cs, h)?;
    let ne = natural_extension(cs, h)?;
    Ok(tue - ne)
}

/// Sampled coherent extensions of the assessment behind `cs`, built as
/// lower envelopes of one maximizing point per assessed face plus optional
/// extra vertices. Used by tests to confirm sampled extension pairs never
/// exceed the reported maximum.
pub fn sample_extension(
    cs: &CredalSet,
    direction: &Gamble,
    extra_vertices: &[usize],
) -> Vec<LinearPrevision> {
    let mut points = Vec::new();
    for row in cs.original_rows() {
        let face = cs.face(row).expect("row in range");
        if let Some(&far) = face.vertex_indices.iter().max_by(|&&a, &&b| {
            let va = cs.vertices()[a].expectation(direction);
            let vb = cs.vertices()[b].expectation(direction);
            va.partial_cmp(&vb).unwrap().then(a.cmp(&b))
        }) {
            points.push(cs.vertices()[far].clone());
        }
    }
    for &j in extra_vertices {
        points.push(cs.vertices()[j].clone());
    }
    points
}
