//! Shared fixtures for the unit tests.

use crate::gamble::{Assessment, Gamble};

/// The five-gamble assessment whose credal set is a pentagon inside the
/// three-state simplex; used as the standing worked example across the
/// test suite.
pub fn pentagon() -> Assessment {
    let g = |v: &[f64]| Gamble::new(v.to_vec()).unwrap();
    Assessment::new(
        3,
        vec![
            (g(&[0.0, 1.0, 0.5]), 0.46),
            (g(&[0.0, 0.5, 1.0]), 0.40),
            (g(&[0.15, 0.0, 1.0]), 0.25),
            (g(&[1.0, 0.0, 0.6]), 0.44),
            (g(&[0.2, 1.0, 0.0]), 0.40),
        ],
    )
    .unwrap()
}
