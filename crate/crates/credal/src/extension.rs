//! Natural extension, coherence checking and the tight upper envelope.
//!
//! With the vertices of the credal set in hand, the natural extension of a
//! gamble is the minimum of its expectation over the vertices, and the
//! largest value any coherent extension can assign to it is the minimum over
//! assessed rows of the maximum over that row's face.

use crate::error::{Error, Result};
use crate::gamble::{Assessment, Gamble};
use crate::polytope::CredalSet;
use crate::tol::Tolerances;

/// Outcome of checking an assessment for avoiding sure loss and coherence.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct CoherenceReport {
    /// The credal set is non-empty.
    pub avoids_sure_loss: bool,
    /// Every assessed lower bound is attained on the credal set.
    pub coherent: bool,
    /// `natural_extension(f_i) − lower_i` per assessment item; empty when
    /// the assessment incurs sure loss (there is no natural extension).
    pub slack_per_item: Vec<f64>,
}

/// The natural extension of the assessment behind `cs`, evaluated at `h`:
/// the minimum of `E·h` over the vertices. Errors when the credal set is
/// empty (sure loss).
pub fn natural_extension(cs: &CredalSet, h: &Gamble) -> Result<f64> {
    if cs.is_empty() {
        return Err(Error::SureLoss);
    }
    if h.len() != cs.constraints().space_size() {
        return Err(Error::DimensionMismatch {
            expected: cs.constraints().space_size(),
            got: h.len(),
        });
    }
    Ok(cs
        .vertices()
        .iter()
        .map(|p| p.expectation(h))
        .fold(f64::INFINITY, f64::min))
}

/// Builds the credal set of `a` and reports sure loss / coherence together
/// with the per-item slacks. Neither failure mode is an error: both are
/// report outcomes.
pub fn check(a: &Assessment, tol: &Tolerances) -> CoherenceReport {
    let cs = CredalSet::from_assessment(a, tol);
    check_on(a, &cs, tol)
}

/// Same as [`check`] but against an already-enumerated credal set.
pub fn check_on(a: &Assessment, cs: &CredalSet, tol: &Tolerances) -> CoherenceReport {
    if cs.is_empty() {
        return CoherenceReport {
            avoids_sure_loss: false,
            coherent: false,
            slack_per_item: Vec::new(),
        };
    }
    let slack_per_item: Vec<f64> = a
        .items()
        .iter()
        .map(|(g, l)| {
            let ne = natural_extension(cs, g).expect("non-empty credal set");
            ne - l
        })
        .collect();
    let coherent = slack_per_item.iter().all(|&s| s <= tol.tight);
    CoherenceReport {
        avoids_sure_loss: true,
        coherent,
        slack_per_item,
    }
}

/// Whether `h` is desirable under the credal set: its lower prevision is
/// non-negative (within the tightness tolerance, one-sidedly).
pub fn is_desirable(cs: &CredalSet, h: &Gamble) -> Result<bool> {
    let ne = natural_extension(cs, h)?;
    Ok(ne >= -cs.tolerances().tight)
}

/// The largest value a coherent extension of the assessment can assign to
/// `h`: over original rows only, the maximum of `E·h` over the row's face
/// vertices, minimized across rows.
///
/// Rows whose face is empty (possible only for incoherent input) are
/// skipped; errors when there is no original row at all.
pub fn tight_upper_envelope(cs: &CredalSet, h: &Gamble) -> Result<f64> {
    if cs.is_empty() {
        return Err(Error::SureLoss);
    }
    if h.len() != cs.constraints().space_size() {
        return Err(Error::DimensionMismatch {
            expected: cs.constraints().space_size(),
            got: h.len(),
        });
    }
    let originals = cs.original_rows();
    if originals.is_empty() {
        return Err(Error::DegenerateAssessment);
    }
    let mut best = f64::INFINITY;
    for row in originals {
        let face = cs.face(row)?;
        let face_max = face
            .vertex_indices
            .iter()
            .map(|&j| cs.vertices()[j].expectation(h))
            .fold(f64::NEG_INFINITY, f64::max);
        if face_max.is_finite() {
            best = best.min(face_max);
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::DegenerateAssessment)
    }
}
