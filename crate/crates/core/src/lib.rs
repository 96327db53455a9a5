//! Frequency shifts of photons exchanged between observers in the equatorial
//! plane of a slowly rotating (Kerr) planet, their perturbative decomposition,
//! wavepacket overlap, and quantum-metrology bounds on planetary parameters.

pub mod error;
pub mod geometry;
pub mod metrology;
pub mod numeric;
pub mod oracle;
pub mod perturb;
pub mod shift;
pub mod units;
pub mod wavepacket;

pub use error::{Error, Result};
