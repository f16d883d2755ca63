//! Credal sets as convex polytopes: H-representation, vertex enumeration,
//! vertex/constraint incidence, faces and loose-constraint removal.
//!
//! The credal set of a (shifted) assessment is
//! `{ p : p·f_i ≥ 0 for all rows, p ≥ 0 coordinatewise, p·1 = 1 }`.
//! Vertices are enumerated incrementally: start from the full probability
//! simplex and clip with one half-space at a time, splitting the edges the
//! hyperplane cuts (double description restricted to a bounded polytope).
//! A brute-force oracle that solves every (s−1)-subset of constraints cross
//! checks the enumeration in the test suite.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::gamble::{Gamble, LinearPrevision};
use crate::tol::Tolerances;

/// One half-space `p·gamble ≥ 0` of the constraint system.
///
/// `original` marks rows that came from the assessment itself; rows added
/// mechanically (coordinate non-negativity `p·1_x ≥ 0`) are non-original.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintRow {
    pub gamble: Gamble,
    pub original: bool,
}

/// The H-representation of a credal set, minus the implicit mass equality
/// `p·1 = 1`, which is always present and never stored as a row.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintSystem {
    space_size: usize,
    rows: Vec<ConstraintRow>,
}

impl ConstraintSystem {
    /// Builds the homogeneous system of an assessment: each judgement
    /// `(f, l)` becomes the row `f − l·1` (so the constraint reads
    /// `p·row ≥ 0`), flagged as original.
    pub fn from_assessment(a: &crate::gamble::Assessment) -> ConstraintSystem {
        let shifted = a.shift_to_zero();
        ConstraintSystem {
            space_size: a.space_size(),
            rows: shifted
                .items()
                .iter()
                .map(|(g, _)| ConstraintRow {
                    gamble: g.clone(),
                    original: true,
                })
                .collect(),
        }
    }

    pub fn new(space_size: usize, rows: Vec<ConstraintRow>) -> Result<ConstraintSystem> {
        for r in &rows {
            if r.gamble.len() != space_size {
                return Err(Error::DimensionMismatch {
                    expected: space_size,
                    got: r.gamble.len(),
                });
            }
        }
        Ok(ConstraintSystem { space_size, rows })
    }

    pub fn space_size(&self) -> usize {
        self.space_size
    }

    pub fn rows(&self) -> &[ConstraintRow] {
        &self.rows
    }

    /// Appends the `s` coordinate non-negativity rows `1_x`, flagged as
    /// non-original, after any existing rows.
    fn with_coordinate_rows(&self) -> ConstraintSystem {
        let mut rows = self.rows.clone();
        for x in 0..self.space_size {
            rows.push(ConstraintRow {
                gamble: Gamble::indicator(&[x], self.space_size).expect("valid index"),
                original: false,
            });
        }
        ConstraintSystem {
            space_size: self.space_size,
            rows,
        }
    }
}

/// A face of the credal set: the vertices on which one constraint row is
/// tight.
#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    pub constraint_index: usize,
    pub vertex_indices: Vec<usize>,
}

/// An enumerated credal set: the full constraint system (original rows plus
/// the appended coordinate rows), its vertices, and the tightness incidence
/// between them. An empty vertex list means the assessment incurs sure loss.
#[derive(Clone, Debug)]
pub struct CredalSet {
    constraints: ConstraintSystem,
    vertices: Vec<LinearPrevision>,
    /// `incidence[j][i]` is true iff row `i` is tight at vertex `j`.
    incidence: Vec<Vec<bool>>,
    tol: Tolerances,
    /// Original rows dropped by [`CredalSet::remove_loose_constraints`]
    /// (their indices in the pre-removal system). Non-empty means the
    /// assessment was not coherent.
    loose_original_rows: Vec<usize>,
}

impl CredalSet {
    /// Enumerates the extreme points of the polytope described by `system`
    /// (with the coordinate rows appended automatically). Never fails: an
    /// empty credal set is a valid result.
    pub fn enumerate(system: &ConstraintSystem, tol: &Tolerances) -> CredalSet {
        let full = system.with_coordinate_rows();
        let vertices = double_description(&full, tol);
        CredalSet::assemble(full, vertices, *tol)
    }

    /// Convenience constructor from an assessment.
    pub fn from_assessment(a: &crate::gamble::Assessment, tol: &Tolerances) -> CredalSet {
        CredalSet::enumerate(&ConstraintSystem::from_assessment(a), tol)
    }

    /// Brute-force oracle: solves every (s−1)-subset of rows together with
    /// the mass equality and keeps the feasible solutions. Exponential in
    /// the row count; guarded by `rows + s ≤ 32`.
    pub fn brute_force(system: &ConstraintSystem, tol: &Tolerances) -> Result<CredalSet> {
        let full = system.with_coordinate_rows();
        let s = full.space_size;
        let n = full.rows.len();
        if n + s > 32 {
            return Err(Error::SizeGuard {
                what: "brute-force vertex enumeration rows + s",
                limit: 32,
                actual: n + s,
            });
        }
        let mut vertices: Vec<Vec<f64>> = Vec::new();
        let mut subset = vec![0usize; s.saturating_sub(1)];
        enumerate_subsets(n, s - 1, 0, 0, &mut subset, &mut |sub| {
            if let Some(p) = solve_vertex_candidate(&full, sub) {
                if is_feasible(&full, &p, tol) && !contains_point(&vertices, &p, tol.vertex) {
                    vertices.push(p);
                }
            }
        });
        if s == 1 {
            // no subsets to choose; the single mass vector (1) is the only candidate
            let p = vec![1.0];
            if is_feasible(&full, &p, tol) {
                vertices.push(p);
            }
        }
        Ok(CredalSet::assemble(
            full,
            sort_dedup(vertices, tol.vertex),
            *tol,
        ))
    }

    fn assemble(
        constraints: ConstraintSystem,
        vertices: Vec<Vec<f64>>,
        tol: Tolerances,
    ) -> CredalSet {
        let incidence = vertices
            .iter()
            .map(|p| {
                constraints
                    .rows
                    .iter()
                    .map(|r| crate::gamble::dot(p, r.gamble.values()).abs() <= tol.tight)
                    .collect()
            })
            .collect();
        CredalSet {
            constraints,
            vertices: vertices.into_iter().map(LinearPrevision::from_vec).collect(),
            incidence,
            tol,
            loose_original_rows: Vec::new(),
        }
    }

    pub fn constraints(&self) -> &ConstraintSystem {
        &self.constraints
    }

    pub fn vertices(&self) -> &[LinearPrevision] {
        &self.vertices
    }

    pub fn vertex(&self, index: usize) -> Result<&LinearPrevision> {
        self.vertices.get(index).ok_or(Error::IndexOutOfRange {
            index,
            len: self.vertices.len(),
        })
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn incidence(&self) -> &[Vec<bool>] {
        &self.incidence
    }

    /// Indices of the original (assessment) rows.
    pub fn original_rows(&self) -> Vec<usize> {
        self.constraints
            .rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.original)
            .map(|(i, _)| i)
            .collect()
    }

    /// Original rows dropped as loose by `remove_loose_constraints`; a
    /// non-empty list flags the source assessment as incoherent.
    pub fn loose_original_rows(&self) -> &[usize] {
        &self.loose_original_rows
    }

    /// The face of constraint `row_index`: all vertices where it is tight.
    pub fn face(&self, row_index: usize) -> Result<Face> {
        if row_index >= self.constraints.rows.len() {
            return Err(Error::IndexOutOfRange {
                index: row_index,
                len: self.constraints.rows.len(),
            });
        }
        Ok(Face {
            constraint_index: row_index,
            vertex_indices: (0..self.vertices.len())
                .filter(|&j| self.incidence[j][row_index])
                .collect(),
        })
    }

    /// Drops every row that is tight at no vertex. Such rows do not touch
    /// the credal set and cannot affect faces or normal cones. Loose
    /// *original* rows indicate an incoherent assessment; their indices are
    /// recorded in [`CredalSet::loose_original_rows`] of the result.
    pub fn remove_loose_constraints(&self) -> Result<CredalSet> {
        if self.vertices.is_empty() {
            return Err(Error::SureLoss);
        }
        let n = self.constraints.rows.len();
        let mut keep = Vec::new();
        let mut dropped_original = Vec::new();
        for i in 0..n {
            let tight_somewhere = self.incidence.iter().any(|row| row[i]);
            if tight_somewhere {
                keep.push(i);
            } else if self.constraints.rows[i].original {
                dropped_original.push(i);
            }
        }
        let rows = keep
            .iter()
            .map(|&i| self.constraints.rows[i].clone())
            .collect();
        let incidence = self
            .incidence
            .iter()
            .map(|row| keep.iter().map(|&i| row[i]).collect())
            .collect();
        Ok(CredalSet {
            constraints: ConstraintSystem {
                space_size: self.constraints.space_size,
                rows,
            },
            vertices: self.vertices.clone(),
            incidence,
            tol: self.tol,
            loose_original_rows: dropped_original,
        })
    }

    /// Replaces each original row by `row − slack·1` where slack is the
    /// minimum of the row over the vertices. Used to auto-correct an
    /// incoherent assessment to its natural extension: the polytope is
    /// unchanged, but every original row becomes tight somewhere.
    pub(crate) fn retighten_original_rows(&self) -> CredalSet {
        let ones = Gamble::ones(self.constraints.space_size);
        let rows: Vec<ConstraintRow> = self
            .constraints
            .rows
            .iter()
            .map(|r| {
                if !r.original {
                    return r.clone();
                }
                let slack = self
                    .vertices
                    .iter()
                    .map(|p| p.expectation(&r.gamble))
                    .fold(f64::INFINITY, f64::min);
                ConstraintRow {
                    gamble: r.gamble.axpy(-slack, &ones),
                    original: true,
                }
            })
            .collect();
        let system = ConstraintSystem {
            space_size: self.constraints.space_size,
            rows,
        };
        let coords: Vec<Vec<f64>> = self.vertices.iter().map(|p| p.mass().to_vec()).collect();
        CredalSet::assemble(system, coords, self.tol)
    }

    /// Sorts vertices lexicographically by coordinates. Reports and CLI
    /// output use this for deterministic ordering.
    pub fn sorted_vertex_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.vertices.len()).collect();
        order.sort_by(|&a, &b| {
            lex_cmp(self.vertices[a].mass(), self.vertices[b].mass())
        });
        order
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(std::cmp::Ordering::Equal) | None => continue,
            Some(ord) => return ord,
        }
    }
    std::cmp::Ordering::Equal
}

// ---------------------------------------------------------------------------
// Incremental double description
// ---------------------------------------------------------------------------

/// Tight-row bitset per vertex; rows beyond 64 spill into further words.
#[derive(Clone, Debug, PartialEq)]
struct TightSet {
    words: Vec<u64>,
}

impl TightSet {
    fn new(nbits: usize) -> TightSet {
        TightSet {
            words: vec![0; nbits.div_ceil(64)],
        }
    }

    fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    fn intersection(&self, other: &TightSet) -> TightSet {
        TightSet {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    fn is_subset_of(&self, other: &TightSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

struct DdVertex {
    point: Vec<f64>,
    tight: TightSet,
}

/// Clips the probability simplex with each row of `system` in turn.
///
/// `system` must already contain the coordinate rows; they are not clipped
/// (the initial simplex realizes them) but they do participate in the tight
/// sets, which the combinatorial adjacency test relies on.
fn double_description(system: &ConstraintSystem, tol: &Tolerances) -> Vec<Vec<f64>> {
    let s = system.space_size;
    let n = system.rows.len();
    let coord_base = n - s; // coordinate rows occupy the tail
    let mut verts: Vec<DdVertex> = (0..s)
        .map(|i| {
            let mut point = vec![0.0; s];
            point[i] = 1.0;
            let mut tight = TightSet::new(n);
            for x in 0..s {
                if x != i {
                    tight.insert(coord_base + x);
                }
            }
            DdVertex { point, tight }
        })
        .collect();

    // Rows processed so far (indices into system.rows); coordinate rows are
    // realized by the initial simplex.
    let mut processed: Vec<usize> = (coord_base..n).collect();

    for r in 0..coord_base {
        let row = &system.rows[r];
        let vals: Vec<f64> = verts
            .iter()
            .map(|v| crate::gamble::dot(&v.point, row.gamble.values()))
            .collect();
        let any_cut = vals.iter().any(|&v| v < -tol.tight);
        processed.push(r);
        if !any_cut {
            // Row is loose or merely touching: only update tight sets.
            for (v, &val) in verts.iter_mut().zip(&vals) {
                if val.abs() <= tol.tight {
                    v.tight.insert(r);
                }
            }
            continue;
        }

        let keep_idx: Vec<usize> = (0..verts.len()).filter(|&j| vals[j] > tol.tight).collect();
        let on_idx: Vec<usize> = (0..verts.len())
            .filter(|&j| vals[j].abs() <= tol.tight)
            .collect();
        let cut_idx: Vec<usize> = (0..verts.len()).filter(|&j| vals[j] < -tol.tight).collect();

        // New vertices: one per edge between a kept and a cut vertex.
        let mut new_points: Vec<Vec<f64>> = Vec::new();
        let min_common = s.saturating_sub(2);
        for &u in &keep_idx {
            for &w in &cut_idx {
                let common = verts[u].tight.intersection(&verts[w].tight);
                if common.count() < min_common {
                    continue;
                }
                let adjacent = verts
                    .iter()
                    .enumerate()
                    .all(|(k, v)| k == u || k == w || !common.is_subset_of(&v.tight));
                if !adjacent {
                    continue;
                }
                let t = vals[u] / (vals[u] - vals[w]);
                let point: Vec<f64> = verts[u]
                    .point
                    .iter()
                    .zip(&verts[w].point)
                    .map(|(a, b)| a + t * (b - a))
                    .collect();
                if !contains_point(&new_points, &point, tol.vertex)
                    && !on_idx
                        .iter()
                        .any(|&j| max_abs_diff(&verts[j].point, &point) <= tol.vertex)
                {
                    new_points.push(point);
                }
            }
        }

        let mut next: Vec<DdVertex> = Vec::with_capacity(keep_idx.len() + on_idx.len() + new_points.len());
        for &j in keep_idx.iter().chain(&on_idx) {
            let mut v = DdVertex {
                point: verts[j].point.clone(),
                tight: verts[j].tight.clone(),
            };
            if vals[j].abs() <= tol.tight {
                v.tight.insert(r);
            }
            next.push(v);
        }
        for point in new_points {
            // Tight set recomputed numerically over all processed rows.
            let mut tight = TightSet::new(n);
            for &i in &processed {
                if crate::gamble::dot(&point, system.rows[i].gamble.values()).abs() <= tol.tight {
                    tight.insert(i);
                }
            }
            next.push(DdVertex { point, tight });
        }
        verts = next;
        if verts.is_empty() {
            return Vec::new();
        }
    }

    sort_dedup(verts.into_iter().map(|v| v.point).collect(), tol.vertex)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn contains_point(points: &[Vec<f64>], p: &[f64], tol: f64) -> bool {
    points.iter().any(|q| max_abs_diff(q, p) <= tol)
}

fn sort_dedup(mut points: Vec<Vec<f64>>, tol: f64) -> Vec<Vec<f64>> {
    points.sort_by(|a, b| lex_cmp(a, b));
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(points.len());
    for p in points {
        if !contains_point(&out, &p, tol) {
            out.push(p);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Brute-force oracle helpers
// ---------------------------------------------------------------------------

fn enumerate_subsets(
    n: usize,
    k: usize,
    start: usize,
    depth: usize,
    subset: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if depth == k {
        visit(subset);
        return;
    }
    for i in start..n {
        subset[depth] = i;
        enumerate_subsets(n, k, i + 1, depth + 1, subset, visit);
    }
}

/// Solves the square system {rows in `sub` are tight} ∪ {mass = 1}.
fn solve_vertex_candidate(system: &ConstraintSystem, sub: &[usize]) -> Option<Vec<f64>> {
    let s = system.space_size;
    let mut m = DMatrix::<f64>::zeros(s, s);
    for (r, &i) in sub.iter().enumerate() {
        for c in 0..s {
            m[(r, c)] = system.rows[i].gamble.values()[c];
        }
    }
    for c in 0..s {
        m[(s - 1, c)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(s);
    rhs[s - 1] = 1.0;
    let lu = m.full_piv_lu();
    // Reject (nearly) singular systems: the subset does not pin a point.
    if lu.determinant().abs() < 1e-12 {
        return None;
    }
    let sol = lu.solve(&rhs)?;
    Some(sol.iter().copied().collect())
}

fn is_feasible(system: &ConstraintSystem, p: &[f64], tol: &Tolerances) -> bool {
    if p.iter().any(|v| !v.is_finite()) {
        return false;
    }
    system
        .rows
        .iter()
        .all(|r| crate::gamble::dot(p, r.gamble.values()) >= -tol.tight)
}
