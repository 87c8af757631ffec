//! Shared fixtures for the criterion benches.

use hypmass::{schwarzschild_ads, Metric};

/// Schwarzschild-AdS with `m = 0.5` in three dimensions.
pub fn sads3() -> impl Metric {
    schwarzschild_ads(3, 0.5).expect("valid parameters")
}
