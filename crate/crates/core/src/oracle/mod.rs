//! Independent checks on the double-double pipeline: the closed forms in
//! decimal arbitrary precision, finite-difference series coefficients, and a
//! numerically integrated Schwarzschild radial photon.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};

mod exact;
mod geodesic;
mod series;

pub use exact::{eval_delta_exact, eval_exact, Expr};
pub use geodesic::{integrate_schwarzschild_radial, GeodesicResult, GeodesicSample, GeodesicTrace};
pub use series::{extract_series_coefficient, SeriesCoefficient, SeriesParam, SERIES_MIN_DIGITS};

/// Cooperative cancellation flag, cheap to clone and share across threads.
#[derive(Debug, Clone, Default)]
pub struct CancelToken(Arc<AtomicBool>);

impl CancelToken {
    pub fn new() -> CancelToken {
        CancelToken::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, Ordering::Relaxed);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(Ordering::Relaxed)
    }

    pub(crate) fn check(&self) -> Result<()> {
        if self.is_cancelled() {
            Err(Error::Cancelled)
        } else {
            Ok(())
        }
    }
}
