//! Number representations shared by the fast path and the oracle.

mod bigreal;
mod dd;
pub mod quadrature;

pub use bigreal::{BigReal, ParseBigRealError, MIN_DIGITS};
pub use dd::{quick_two_sum, two_prod, two_sum, Dd};
