//! Gambles, linear previsions and assessments: the shared numeric substrate.
//!
//! A *gamble* is a real payoff vector indexed by the states of a finite
//! sample space. A *linear prevision* is the expectation functional of a
//! probability mass vector over the same space. An *assessment* assigns
//! lower bounds to finitely many gambles and is the input everything else
//! in this crate is built from.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol::Tolerances;

/// A real-valued payoff vector over the sample space.
///
/// Equality is exact (bitwise on the entries); use [`Gamble::approx_eq`] for
/// tolerance-based comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Gamble(Vec<f64>);

impl Gamble {
    /// Builds a gamble, rejecting empty vectors and non-finite entries.
    pub fn new(values: Vec<f64>) -> Result<Gamble> {
        if values.is_empty() {
            return Err(Error::InvalidInput("gamble must have length >= 1".into()));
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    position: i,
                    value: v,
                });
            }
        }
        Ok(Gamble(values))
    }

    /// Internal constructor for values produced by our own arithmetic.
    pub(crate) fn from_vec(values: Vec<f64>) -> Gamble {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Gamble(values)
    }

    /// The indicator gamble of a set of state indices: 1 on the set, 0 off it.
    pub fn indicator(subset: &[usize], space_size: usize) -> Result<Gamble> {
        let mut values = vec![0.0; space_size];
        for &x in subset {
            if x >= space_size {
                return Err(Error::IndexOutOfRange {
                    index: x,
                    len: space_size,
                });
            }
            values[x] = 1.0;
        }
        if space_size == 0 {
            return Err(Error::InvalidInput("sample space must be non-empty".into()));
        }
        Ok(Gamble(values))
    }

    /// The constant-one gamble over the whole sample space.
    pub fn ones(space_size: usize) -> Gamble {
        Gamble(vec![1.0; space_size])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Standard inner product `Σ_x f(x)g(x)`.
    pub fn dot(&self, other: &Gamble) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(dot(&self.0, &other.0))
    }

    /// Euclidean (`l²`) norm.
    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    /// Euclidean distance `‖f − g‖`.
    pub fn distance(&self, other: &Gamble) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        let sq: f64 = self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        Ok(sq.sqrt())
    }

    /// The zero-sum representative of this gamble modulo constants:
    /// `f − (f·1/s)·1`, the unique shift with zero inner product against the
    /// constant gamble. It is the minimum-norm element of `{f + β1 : β ∈ ℝ}`.
    pub fn centered(&self) -> Gamble {
        let mean = self.0.iter().sum::<f64>() / self.0.len() as f64;
        Gamble(self.0.iter().map(|v| v - mean).collect())
    }

    /// True when every coordinate differs by at most `tol`.
    pub fn approx_eq(&self, other: &Gamble, tol: f64) -> bool {
        self.len() == other.len()
            && self
                .0
                .iter()
                .zip(&other.0)
                .all(|(a, b)| (a - b).abs() <= tol)
    }

    /// `self + c·other`.
    pub fn axpy(&self, c: f64, other: &Gamble) -> Gamble {
        debug_assert_eq!(self.len(), other.len());
        Gamble(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + c * b)
                .collect(),
        )
    }

    /// `c·self`.
    pub fn scaled(&self, c: f64) -> Gamble {
        Gamble(self.0.iter().map(|v| c * v).collect())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// The expectation functional of a probability mass vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LinearPrevision(Vec<f64>);

impl LinearPrevision {
    /// Validates non-negativity (within `tol.feas`) and unit total mass.
    pub fn new(mass: Vec<f64>, tol: &Tolerances) -> Result<LinearPrevision> {
        if mass.is_empty() {
            return Err(Error::InvalidMass {
                reason: "empty mass vector".into(),
            });
        }
        for (i, &v) in mass.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    position: i,
                    value: v,
                });
            }
            if v < -tol.feas {
                return Err(Error::InvalidMass {
                    reason: format!("negative mass {v} at state {i}"),
                });
            }
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > tol.feas {
            return Err(Error::InvalidMass {
                reason: format!("total mass {total} differs from 1"),
            });
        }
        Ok(LinearPrevision(mass))
    }

    pub(crate) fn from_vec(mass: Vec<f64>) -> LinearPrevision {
        LinearPrevision(mass)
    }

    pub fn mass(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `P(f) = p·f`.
    pub fn expectation(&self, f: &Gamble) -> f64 {
        debug_assert_eq!(self.len(), f.len());
        dot(&self.0, f.values())
    }

    /// The difference vector `self − other`, viewed as a gamble. It always
    /// sums to zero, so it is its own centered representative.
    pub fn diff(&self, other: &LinearPrevision) -> Gamble {
        debug_assert_eq!(self.len(), other.len());
        Gamble::from_vec(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// Euclidean distance between the two mass vectors.
    pub fn euclidean_distance(&self, other: &LinearPrevision) -> f64 {
        self.diff(other).norm()
    }

    pub fn approx_eq(&self, other: &LinearPrevision, tol: f64) -> bool {
        self.len() == other.len()
            && self
                .0
                .iter()
                .zip(&other.0)
                .all(|(a, b)| (a - b).abs() <= tol)
    }
}

/// A finite set of (gamble, lower bound) judgements over a common sample
/// space. An empty item list is allowed (it describes the full simplex) but
/// distance computations require at least one item.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assessment {
    space_size: usize,
    items: Vec<(Gamble, f64)>,
}

impl Assessment {
    pub fn new(space_size: usize, items: Vec<(Gamble, f64)>) -> Result<Assessment> {
        if space_size == 0 {
            return Err(Error::InvalidInput("sample space must be non-empty".into()));
        }
        for (g, l) in &items {
            if g.len() != space_size {
                return Err(Error::DimensionMismatch {
                    expected: space_size,
                    got: g.len(),
                });
            }
            if !l.is_finite() {
                return Err(Error::NonFinite {
                    position: 0,
                    value: *l,
                });
            }
        }
        Ok(Assessment { space_size, items })
    }

    pub fn space_size(&self) -> usize {
        self.space_size
    }

    pub fn items(&self) -> &[(Gamble, f64)] {
        &self.items
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Rewrites every judgement `(f, l)` as `(f − l·1, 0)`. The induced
    /// credal set is unchanged (constant additivity), which makes all
    /// constraints homogeneous: `p·f ≥ 0`.
    pub fn shift_to_zero(&self) -> Assessment {
        let ones = Gamble::ones(self.space_size);
        Assessment {
            space_size: self.space_size,
            items: self
                .items
                .iter()
                .map(|(g, l)| (g.axpy(-l, &ones), 0.0))
                .collect(),
        }
    }
}
