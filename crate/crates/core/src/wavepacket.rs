//! Gaussian frequency distributions of single photons and the overlap between
//! a sent and a received packet.
//!
//! `F(Omega) = (2 pi sigma^2)^(-1/4) exp(-(Omega - Omega_0)^2 / (4 sigma^2))`,
//! so `|F|^2` is a unit-mass Gaussian of standard deviation `sigma`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numeric::{quadrature, Dd};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianWavepacket {
    peak: Dd,
    width: Dd,
}

impl GaussianWavepacket {
    pub fn new(peak: f64, width: f64) -> Result<GaussianWavepacket> {
        GaussianWavepacket::from_dd(Dd::from_f64(peak), Dd::from_f64(width))
    }

    pub fn from_dd(peak: Dd, width: Dd) -> Result<GaussianWavepacket> {
        if !(peak.is_finite() && peak.to_f64() > 0.0) {
            return Err(Error::domain("peak", format!("must be positive, got {peak}")));
        }
        if !(width.is_finite() && width.to_f64() > 0.0) {
            return Err(Error::domain("width", format!("must be positive, got {width}")));
        }
        Ok(GaussianWavepacket { peak, width })
    }

    pub fn peak(&self) -> Dd {
        self.peak
    }

    pub fn width(&self) -> Dd {
        self.width
    }

    /// Amplitude at `peak + offset`.
    pub fn amplitude_at_offset(&self, offset: f64) -> f64 {
        let w = self.width.to_f64();
        (2.0 * PI * w * w).powf(-0.25) * (-(offset * offset) / (4.0 * w * w)).exp()
    }

    /// `int |F|^2 dOmega` over `[0, inf)` by quadrature.
    pub fn norm_numeric(&self) -> Result<f64> {
        let w = self.width.to_f64();
        let lo = (-12.0f64).max(-self.peak.to_f64() / w);
        let r = quadrature::integrate(
            |u| {
                let a = self.amplitude_at_offset(u * w);
                a * a * w
            },
            lo,
            12.0,
            1e-14,
            1e-14,
        )
        .map_err(|e| Error::Numerical {
            what: "wavepacket norm quadrature",
            achieved: e.achieved,
        })?;
        Ok(r.value)
    }
}

/// Apply the frequency shift `f`: both peak and width scale by `f`.
pub fn propagate(packet: &GaussianWavepacket, f: Dd) -> Result<GaussianWavepacket> {
    if !(f.is_finite() && f.to_f64() > 0.0) {
        return Err(Error::domain("f", format!("must be positive, got {f}")));
    }
    GaussianWavepacket::from_dd(packet.peak * f, packet.width * f)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapResult {
    pub theta: f64,
    pub fidelity: f64,
    /// `1 - theta^2`, evaluated without cancellation.
    pub infidelity: f64,
}

impl OverlapResult {
    fn from_log_fidelity(log_fidelity: f64) -> OverlapResult {
        let fidelity = log_fidelity.exp();
        OverlapResult {
            theta: (0.5 * log_fidelity).exp(),
            fidelity,
            infidelity: -log_fidelity.exp_m1(),
        }
    }
}

/// Overlap of `sent` with itself propagated by `f = 1 + delta`.
pub fn overlap_analytic(sent: &GaussianWavepacket, delta: Dd) -> Result<OverlapResult> {
    let f = Dd::ONE + delta;
    if !(f.to_f64() > 0.0) {
        return Err(Error::domain("delta", format!("need 1 + delta > 0, got delta = {delta}")));
    }
    let received = propagate(sent, f)?;
    let one_plus_f2 = Dd::ONE + f.sqr();
    // 2f / (1 + f^2) = 1 - delta^2 / (1 + f^2)
    let prefactor_small = -(delta.sqr() / one_plus_f2);
    let ratio = received.peak / received.width;
    let exponent = -((delta * ratio).sqr() / (one_plus_f2 * 4.0));
    let log_fidelity = prefactor_small.to_f64().ln_1p() + 2.0 * exponent.to_f64();
    Ok(OverlapResult::from_log_fidelity(log_fidelity))
}

/// Closed-form overlap of two arbitrary Gaussian packets.
pub fn overlap_closed_form(a: &GaussianWavepacket, b: &GaussianWavepacket) -> OverlapResult {
    let sum_sq = a.width.sqr() + b.width.sqr();
    let prefactor_small = -((a.width - b.width).sqr() / sum_sq);
    let exponent = -((a.peak - b.peak).sqr() / (sum_sq * 4.0));
    OverlapResult::from_log_fidelity(prefactor_small.to_f64().ln_1p() + 2.0 * exponent.to_f64())
}

/// `Theta = int F_received F_reference dOmega` by adaptive quadrature over
/// `[max(0, mu - 12 sigma), mu + 12 sigma]`, `mu` the mid-point of the peaks
/// and `sigma` the larger width.
pub fn overlap_numeric(received: &GaussianWavepacket, reference: &GaussianWavepacket) -> Result<OverlapResult> {
    let center = (received.peak + reference.peak) * 0.5;
    let d_recv = (received.peak - center).to_f64();
    let d_ref = (reference.peak - center).to_f64();
    let scale = received.width.to_f64().max(reference.width.to_f64());
    let lo = (-12.0f64).max(-center.to_f64() / scale);
    let integrand = |u: f64| {
        let x = u * scale;
        received.amplitude_at_offset(x - d_recv) * reference.amplitude_at_offset(x - d_ref) * scale
    };
    let r = quadrature::integrate(integrand, lo, 12.0, 1e-15, 1e-13).map_err(|e| Error::Numerical {
        what: "overlap quadrature",
        achieved: e.achieved,
    })?;
    let theta = r.value;
    Ok(OverlapResult {
        theta,
        fidelity: theta * theta,
        infidelity: 1.0 - theta * theta,
    })
}
