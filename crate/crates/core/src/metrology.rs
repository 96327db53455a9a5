//! Quantum Fisher information of a two-mode squeezed probe, Cramer-Rao bounds
//! on `delta` and on the spacetime parameters, and the QBER of a key sent over
//! a shifted channel.
//!
//! Frequencies are in Hz throughout; only the ratios `Omega / sigma` enter.

use crate::error::{Error, Result};
use crate::perturb::{self, ShiftDecomposition, Target};

/// Relative precision of the Earth's angular velocity from current geodesy.
pub const STATE_OF_ART_OMEGA_RELATIVE: f64 = 1e-8;

/// Default separation factor between the tiers `|delta| << m << 1`.
pub const DEFAULT_REGIME_MARGIN: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetrologyConfig {
    /// Number of probes.
    pub n: f64,
    /// Squeezing parameter.
    pub s: f64,
    /// Bandwidth in Hz.
    pub sigma: f64,
    pub omega1: f64,
    pub omega2: f64,
}

impl Default for MetrologyConfig {
    fn default() -> Self {
        MetrologyConfig {
            n: 1e10,
            s: 2.0,
            sigma: 1e6,
            omega1: 7e14,
            omega2: 7e14,
        }
    }
}

impl MetrologyConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::domain(name, format!("must be positive, got {v}")))
            }
        };
        if !(self.n.is_finite() && self.n >= 1.0) {
            return Err(Error::domain("N", format!("must be at least 1, got {}", self.n)));
        }
        if !(self.s.is_finite() && self.s >= 0.0) {
            return Err(Error::domain("s", format!("must be non-negative, got {}", self.s)));
        }
        positive("sigma", self.sigma)?;
        positive("omega1", self.omega1)?;
        positive("omega2", self.omega2)
    }

    /// `Omega^2 = (Omega_1^2 + Omega_2^2) / 2`.
    pub fn omega_sq(&self) -> f64 {
        0.5 * (self.omega1 * self.omega1 + self.omega2 * self.omega2)
    }

    /// `m = Omega^2 delta^2 / (8 sigma^2)`, the middle tier of the regime.
    pub fn middle_term(&self, delta: f64) -> f64 {
        let x = delta * self.omega_sq().sqrt() / self.sigma;
        x * x / 8.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Regime {
    Valid,
    Invalid(String),
}

impl Regime {
    pub fn is_valid(&self) -> bool {
        matches!(self, Regime::Valid)
    }
}

/// `|delta| << m << 1` with the default margin.
pub fn regime_check(delta: f64, cfg: &MetrologyConfig) -> Regime {
    regime_check_with(delta, cfg, DEFAULT_REGIME_MARGIN)
}

/// Valid iff `margin |delta| < m` and `margin m < 1`.
pub fn regime_check_with(delta: f64, cfg: &MetrologyConfig, margin: f64) -> Regime {
    if !delta.is_finite() {
        return Regime::Invalid(format!("delta = {delta} is not finite"));
    }
    let m = cfg.middle_term(delta);
    if delta == 0.0 {
        return Regime::Invalid("delta = 0: no shift to estimate".into());
    }
    if !(margin * delta.abs() < m) {
        return Regime::Invalid(format!(
            "|delta| = {:.3e} is not {margin}x below Omega^2 delta^2 / 8 sigma^2 = {m:.3e}",
            delta.abs()
        ));
    }
    if !(margin * m < 1.0) {
        return Regime::Invalid(format!("Omega^2 delta^2 / 8 sigma^2 = {m:.3e} is not {margin}x below 1"));
    }
    Regime::Valid
}

fn require_valid(delta: f64, cfg: &MetrologyConfig) -> Result<()> {
    match regime_check(delta, cfg) {
        Regime::Valid => Ok(()),
        Regime::Invalid(reason) => Err(Error::InvalidRegime(reason)),
    }
}

/// `1 - ((Omega_1^2 + Omega_2^2) / 4 sigma^2) sinh^2(s) d_delta^2`.
pub fn fidelity_two_mode(d_delta: f64, cfg: &MetrologyConfig) -> Result<f64> {
    cfg.validate()?;
    let sh = cfg.s.sinh();
    let loss = cfg.omega_sq() * 2.0 / (4.0 * cfg.sigma * cfg.sigma) * sh * sh * d_delta * d_delta;
    let fid = 1.0 - loss;
    if fid.is_finite() && fid >= 0.0 {
        Ok(fid)
    } else {
        Err(Error::domain(
            "d_delta",
            format!("{d_delta:e} is outside the expansion range (fidelity {fid:e})"),
        ))
    }
}

/// `H = ((Omega_1^2 + Omega_2^2) / sigma^2) sinh^2(s)`.
pub fn qfi(cfg: &MetrologyConfig) -> f64 {
    let sh = cfg.s.sinh();
    let r = cfg.omega1 / cfg.sigma;
    let q = cfg.omega2 / cfg.sigma;
    (r * r + q * q) * sh * sh
}

/// `H = lim 8 (1 - sqrt(F(d))) / d^2` from the fidelity, by Richardson
/// extrapolation over three step sizes.
pub fn qfi_numeric(cfg: &MetrologyConfig) -> Result<f64> {
    cfg.validate()?;
    let h_closed = qfi(cfg);
    if h_closed == 0.0 {
        return Ok(0.0);
    }
    // first step puts the fidelity loss near 1e-2
    let h0 = (4e-2 / h_closed).sqrt();
    let estimate = |h: f64| -> Result<f64> {
        let fid = fidelity_two_mode(h, cfg)?;
        Ok(8.0 * (1.0 - fid.sqrt()) / (h * h))
    };
    let e0 = estimate(h0)?;
    let e1 = estimate(h0 / 2.0)?;
    let e2 = estimate(h0 / 4.0)?;
    // error series in h^2
    let r01 = (4.0 * e1 - e0) / 3.0;
    let r12 = (4.0 * e2 - e1) / 3.0;
    Ok((16.0 * r12 - r01) / 15.0)
}

/// `|Delta delta| >= 1 / sqrt(N H)`.
pub fn cramer_rao(h: f64, n: f64) -> Result<f64> {
    if !(n.is_finite() && n >= 1.0) {
        return Err(Error::domain("N", format!("must be at least 1, got {n}")));
    }
    if h == 0.0 {
        return Err(Error::InfiniteBound);
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::domain("H", format!("must be positive, got {h}")));
    }
    Ok(1.0 / (n * h).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionBound {
    pub delta_delta_min: f64,
    pub relative_bound: f64,
    pub target: Target,
}

fn delta_bound(cfg: &MetrologyConfig, dec: &ShiftDecomposition) -> Result<f64> {
    cfg.validate()?;
    require_valid(dec.delta_exact.to_f64(), cfg)?;
    cramer_rao(qfi(cfg), cfg.n)
}

/// `|Delta r_S| / r_S` from the Cramer-Rao bound on `delta`.
pub fn bound_schwarzschild_radius(cfg: &MetrologyConfig, dec: &ShiftDecomposition) -> Result<PrecisionBound> {
    let dd = delta_bound(cfg, dec)?;
    let e = perturb::error_schwarzschild_radius(dec, dd)?;
    Ok(PrecisionBound {
        delta_delta_min: dd,
        relative_bound: e.relative_error,
        target: e.target,
    })
}

/// `sigma / (sqrt(N (Omega_1^2 + Omega_2^2)) sinh s) / |delta_S|`, the
/// explicit form of [`bound_schwarzschild_radius`].
pub fn bound_schwarzschild_radius_closed(cfg: &MetrologyConfig, dec: &ShiftDecomposition) -> Result<f64> {
    bound_schwarzschild_radius(cfg, dec)?;
    let sum_sq = cfg.omega1 * cfg.omega1 + cfg.omega2 * cfg.omega2;
    Ok(cfg.sigma / ((cfg.n * sum_sq).sqrt() * cfg.s.sinh()) / dec.delta_s.abs().to_f64())
}

/// `|Delta omega_A| / omega_A = |Delta delta| / (2 |delta_rot|)`.
pub fn bound_angular_velocity(cfg: &MetrologyConfig, dec: &ShiftDecomposition) -> Result<PrecisionBound> {
    let dd = delta_bound(cfg, dec)?;
    let e = perturb::error_angular_velocity(dec, dd)?;
    Ok(PrecisionBound {
        delta_delta_min: dd,
        relative_bound: e.relative_error,
        target: e.target,
    })
}

/// Whole orders of magnitude by which `relative_bound` is above
/// [`STATE_OF_ART_OMEGA_RELATIVE`].
pub fn orders_below_state_of_art(relative_bound: f64) -> i32 {
    (relative_bound / STATE_OF_ART_OMEGA_RELATIVE).log10().floor() as i32
}

/// `QBER = Omega^2 delta^2 / (8 sigma^2)`; refused outside the regime.
pub fn qber(delta: f64, cfg: &MetrologyConfig) -> Result<f64> {
    cfg.validate()?;
    require_valid(delta, cfg)?;
    Ok(cfg.middle_term(delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Direction;
    use crate::units::{EarthModel, PhysicalConstants};
    use proptest::prelude::*;

    const K: PhysicalConstants = PhysicalConstants::DEFAULT;
    const E: EarthModel = EarthModel::EARTH;

    fn rel(x: f64, y: f64) -> f64 {
        (x - y).abs() / y.abs()
    }

    fn ground(r_b: f64) -> ShiftDecomposition {
        perturb::decompose_ground(&E, r_b, Direction::Prograde, &K).unwrap()
    }

    #[test]
    fn regime_classification() {
        let c = MetrologyConfig::default();
        assert!(regime_check(1e-10, &c).is_valid());
        assert!((c.middle_term(1e-10) - 6.125e-4).abs() < 1e-15);
        assert!(!regime_check(0.0, &c).is_valid());
        assert!(!regime_check(0.5, &c).is_valid());
        assert!(!regime_check(1e-17, &c).is_valid());
        assert!(!regime_check(f64::NAN, &c).is_valid());
        assert!(regime_check_with(4e-9, &c, 1.0).is_valid());
        assert!(!regime_check_with(4e-9, &c, 10.0).is_valid());
    }

    #[test]
    fn fidelity_values() {
        let c = MetrologyConfig::default();
        assert_eq!(fidelity_two_mode(0.0, &c).unwrap(), 1.0);
        let f = fidelity_two_mode(1e-12, &c).unwrap();
        assert!(rel(1.0 - f, 3.2228e-6) < 1e-4, "{}", 1.0 - f);
        assert!(fidelity_two_mode(1e-3, &c).is_err());
    }

    #[test]
    fn qfi_values() {
        let c = MetrologyConfig::default();
        assert!(rel(qfi(&c), 1.289_103_408_964_807_8e19) < 1e-14);
        assert_eq!(qfi(&MetrologyConfig { s: 0.0, ..c }), 0.0);
        assert!(rel(qfi_numeric(&c).unwrap(), qfi(&c)) < 1e-6);
        assert_eq!(qfi_numeric(&MetrologyConfig { s: 0.0, ..c }).unwrap(), 0.0);
    }

    #[test]
    fn cramer_rao_values() {
        let c = MetrologyConfig::default();
        let b = cramer_rao(qfi(&c), c.n).unwrap();
        assert!(rel(b, 2.785_198_300_895_894_5e-15) < 1e-14);
        let b100 = cramer_rao(qfi(&c), c.n * 100.0).unwrap();
        assert!(rel(b / b100, 10.0) < 1e-15);
        let squeezed = MetrologyConfig { s: c.s + 10f64.ln(), ..c };
        let r = b / cramer_rao(qfi(&squeezed), c.n).unwrap();
        assert!(rel(r, 10.0) < 0.02);
        assert_eq!(cramer_rao(0.0, 1e10), Err(Error::InfiniteBound));
        assert!(cramer_rao(1.0, 0.5).is_err());
        assert!(cramer_rao(-1.0, 10.0).is_err());
    }

    #[test]
    fn cramer_rao_scaling_in_n() {
        let h = qfi(&MetrologyConfig::default());
        let base = cramer_rao(h, 1e4).unwrap();
        for k in 5..=12 {
            let n = 10f64.powi(k);
            let b = cramer_rao(h, n).unwrap();
            assert!(rel(b * (n / 1e4).sqrt(), base) < 1e-14);
        }
    }

    #[test]
    fn schwarzschild_bounds() {
        let c = MetrologyConfig::default();
        let leo = bound_schwarzschild_radius(&c, &ground(E.leo_radius())).unwrap();
        let geo = bound_schwarzschild_radius(&c, &ground(E.geo_radius())).unwrap();
        assert!(rel(leo.relative_bound, 2.823_449_408_330_246e-5) < 1e-12);
        assert!(rel(geo.relative_bound, 5.183_125_533_429_986e-6) < 1e-12);
        for d in [ground(E.leo_radius()), ground(E.geo_radius())] {
            let two_paths = bound_schwarzschild_radius_closed(&c, &d).unwrap();
            assert!(rel(two_paths, bound_schwarzschild_radius(&c, &d).unwrap().relative_bound) < 1e-12);
        }
        let p = E.spacetime(&K).unwrap();
        let sats =
            perturb::decompose_sats(&p, E.leo_radius(), E.geo_radius(), Direction::Prograde, Direction::Prograde)
                .unwrap();
        let s = bound_schwarzschild_radius(&c, &sats).unwrap();
        assert!(rel(s.relative_bound, 4.379_214_584_553_11e-6) < 1e-12);
        let w = bound_angular_velocity(&c, &sats).unwrap();
        assert!(w.relative_bound > 1e7);
    }

    #[test]
    fn angular_velocity_bound() {
        let c = MetrologyConfig::default();
        let w = bound_angular_velocity(&c, &ground(E.leo_radius())).unwrap();
        assert!(rel(w.relative_bound, 1.157_906_364_251_981e-3) < 1e-12);
        assert_eq!(orders_below_state_of_art(w.relative_bound), 5);
    }

    #[test]
    fn bounds_refused_at_zero_delta_s() {
        let c = MetrologyConfig::default();
        let d = ground(1.5 * E.r_a);
        assert!(matches!(
            bound_schwarzschild_radius(&c, &d),
            Err(Error::HigherOrderRegime { .. })
        ));
        assert!(bound_angular_velocity(&c, &d).is_ok());
    }

    #[test]
    fn qber_values() {
        let c = MetrologyConfig::default();
        let leo = ground(E.leo_radius());
        assert!(rel(qber(leo.delta_s.to_f64(), &c).unwrap(), 5.960_165_449_689_579e-4) < 1e-12);
        let geo = ground(E.geo_radius());
        assert!(rel(qber(geo.delta_exact.to_f64(), &c).unwrap(), 1.776_547_148_622_488e-2) < 1e-12);
        let zero = ground(1.5 * E.r_a);
        assert!(rel(qber(zero.delta_exact.to_f64(), &c).unwrap(), 8.86e-8) < 1e-3);
        assert!(matches!(qber(0.5, &c), Err(Error::InvalidRegime(_))));
        assert!(qber(0.0, &c).is_err());
    }

    #[test]
    fn config_validation() {
        let c = MetrologyConfig::default();
        assert!(c.validate().is_ok());
        assert!(MetrologyConfig { sigma: 0.0, ..c }.validate().is_err());
        assert!(MetrologyConfig { n: 0.0, ..c }.validate().is_err());
        assert!(MetrologyConfig { s: -1.0, ..c }.validate().is_err());
        assert!(MetrologyConfig { omega2: f64::INFINITY, ..c }.validate().is_err());
    }

    proptest! {
        #[test]
        fn qfi_monotone(s in 0.1f64..5.0, ds in 0.01f64..1.0, sigma in 1e5f64..1e7, k in 1.01f64..3.0) {
            let c = MetrologyConfig { s, sigma, ..MetrologyConfig::default() };
            let h = qfi(&c);
            prop_assert!(h > 0.0);
            let more_squeezed = MetrologyConfig { s: s + ds, ..c };
            let wider = MetrologyConfig { sigma: sigma * k, ..c };
            let bluer = MetrologyConfig { omega1: c.omega1 * k, ..c };
            prop_assert!(qfi(&more_squeezed) > h);
            prop_assert!(qfi(&wider) < h);
            prop_assert!(qfi(&bluer) > h);
        }
    }
}
