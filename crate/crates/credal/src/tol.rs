//! Centralized numeric tolerances.
//!
//! Every comparison against "zero" in this crate goes through one of these
//! three thresholds. All inputs live on (or near) the probability simplex,
//! so fixed absolute tolerances are adequate; nothing is scale-adaptive.

/// Feasibility tolerance for probability masses: entries of a mass vector may
/// undershoot zero by this much, and the total mass may deviate from one by
/// this much.
pub const EPS_FEAS: f64 = 1e-9;

/// Tightness tolerance: a constraint `p·f ≥ 0` counts as active (tight) at a
/// point when `|p·f| ≤ EPS_TIGHT`.
pub const EPS_TIGHT: f64 = 1e-7;

/// Vertex deduplication tolerance: two candidate vertices are considered the
/// same point when every coordinate differs by at most `EPS_VERTEX`.
pub const EPS_VERTEX: f64 = 1e-8;

/// Bundle of the three tolerances, threaded through polytope construction so
/// callers (notably the CLI `--tolerance` flag) can override the defaults.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Mass feasibility (see [`EPS_FEAS`]).
    pub feas: f64,
    /// Constraint tightness (see [`EPS_TIGHT`]).
    pub tight: f64,
    /// Vertex dedup (see [`EPS_VERTEX`]).
    pub vertex: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        feas: EPS_FEAS,
        tight: EPS_TIGHT,
        vertex: EPS_VERTEX,
    };

    /// Default tolerances with the tightness threshold replaced.
    pub fn with_tight(tight: f64) -> Tolerances {
        Tolerances {
            tight,
            ..Tolerances::DEFAULT
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances::DEFAULT
    }
}
