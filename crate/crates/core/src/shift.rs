//! Frequency shift `f = Omega_receiver / Omega_emitter` for radial photons,
//! and `delta = f - 1` without cancellation.
//!
//! Every factor of the closed form is carried as `1 + small` with the small
//! part in double-double, and factors are combined with the `*1pm1` kernels
//! of [`Dd`], so `delta` is assembled from small terms and never as
//! `(nearly 1) - 1`.

use crate::error::{Error, Result};
use crate::geometry::{self, Direction, Worldline};
use crate::numeric::Dd;
use crate::units::SpacetimeParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    GroundToSat,
    SatToSat,
}

/// Emitter and receiver on one spacetime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkScenario {
    scheme: Scheme,
    emitter: Worldline,
    receiver: Worldline,
    params: SpacetimeParams,
}

impl LinkScenario {
    /// Ground station (Alice) to a circular orbit (Bob) above it.
    pub fn ground_to_sat(
        params: SpacetimeParams,
        station: Worldline,
        orbit: Worldline,
    ) -> Result<LinkScenario> {
        if !matches!(station, Worldline::GroundStation { .. }) {
            return Err(Error::domain("emitter", "ground-to-satellite link needs a ground station"));
        }
        if !orbit.is_orbit() {
            return Err(Error::domain("receiver", "must be a circular orbit"));
        }
        if !(orbit.r() > station.r()) {
            return Err(Error::domain(
                "r_B",
                format!("must exceed the station radius {} m, got {}", station.r(), orbit.r()),
            ));
        }
        Ok(LinkScenario {
            scheme: Scheme::GroundToSat,
            emitter: station,
            receiver: orbit,
            params,
        })
    }

    /// Lower orbit (Charlie) to a higher or equal orbit (Bob).
    pub fn sat_to_sat(
        params: SpacetimeParams,
        lower: Worldline,
        upper: Worldline,
    ) -> Result<LinkScenario> {
        if !lower.is_orbit() || !upper.is_orbit() {
            return Err(Error::domain("worldline", "satellite link needs two circular orbits"));
        }
        if upper.r() < lower.r() {
            return Err(Error::domain(
                "r_B",
                format!("receiver orbit {} m is below emitter orbit {} m", upper.r(), lower.r()),
            ));
        }
        Ok(LinkScenario {
            scheme: Scheme::SatToSat,
            emitter: lower,
            receiver: upper,
            params,
        })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn emitter(&self) -> &Worldline {
        &self.emitter
    }

    pub fn receiver(&self) -> &Worldline {
        &self.receiver
    }

    pub fn params(&self) -> &SpacetimeParams {
        &self.params
    }

    pub fn with_params(&self, params: SpacetimeParams) -> LinkScenario {
        LinkScenario { params, ..*self }
    }

    /// Same link with the receiver moved to radius `r`.
    pub fn with_receiver_radius(&self, r: f64) -> Result<LinkScenario> {
        let Worldline::CircularOrbit { direction, .. } = self.receiver else {
            unreachable!("receiver is always an orbit");
        };
        let receiver = Worldline::circular_orbit(r, direction);
        match self.scheme {
            Scheme::GroundToSat => LinkScenario::ground_to_sat(self.params, self.emitter, receiver),
            Scheme::SatToSat => LinkScenario::sat_to_sat(self.params, self.emitter, receiver),
        }
    }

    /// Same link with the emitter moved to radius `r` (orbit or station).
    pub fn with_emitter_radius(&self, r: f64) -> Result<LinkScenario> {
        let emitter = match self.emitter {
            Worldline::GroundStation { omega, .. } => Worldline::ground_station(r, omega),
            Worldline::CircularOrbit { direction, .. } => Worldline::circular_orbit(r, direction),
        };
        match self.scheme {
            Scheme::GroundToSat => LinkScenario::ground_to_sat(self.params, emitter, self.receiver),
            Scheme::SatToSat => LinkScenario::sat_to_sat(self.params, emitter, self.receiver),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ClosedForm,
    Contraction,
    SchwarzschildLimit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftResult {
    pub f: Dd,
    pub delta: Dd,
    pub method: Method,
}

impl ShiftResult {
    fn from_delta(delta: Dd, method: Method) -> ShiftResult {
        ShiftResult {
            f: Dd::ONE + delta,
            delta,
            method,
        }
    }
}

/// `f = (1 + num) / (1 + den) * sqrt((1 + x) / (1 + y))`, returned as `f - 1`.
fn combine(num: Dd, den: Dd, x: Dd, y: Dd) -> Dd {
    let prefactor = Dd::ratio1pm1(num, den);
    let root = Dd::sqrt1pm1(Dd::ratio1pm1(x, y));
    Dd::product1pm1(prefactor, root)
}

fn positive_factor(factor: &'static str, small: Dd) -> Result<()> {
    let full = Dd::ONE + small;
    if full.is_sign_positive() && full.is_finite() {
        Ok(())
    } else {
        Err(Error::NegativeRoot {
            factor,
            value: full.to_f64(),
        })
    }
}

/// Small parts `(eps a omega / (1 - 2M/r), -3M/r + 2 eps a omega)` of an orbit.
fn orbit_terms(p: &SpacetimeParams, r: f64, direction: Direction) -> (Dd, Dd) {
    let a_omega = p.a() * geometry::orbital_frequency(p, r) * direction.sign();
    let two_m_over_r = p.m() * 2.0 / r;
    let doppler = a_omega / (Dd::ONE - two_m_over_r);
    let root = a_omega * 2.0 - p.m() * 3.0 / r;
    (doppler, root)
}

fn check_radius(p: &SpacetimeParams, r: f64, what: &'static str) -> Result<()> {
    if r.is_finite() && Dd::from_f64(r) > p.m() * 2.0 {
        Ok(())
    } else {
        Err(Error::domain(what, format!("must exceed 2M, got {r}")))
    }
}

/// Closed-form shift for a ground station to a circular orbit.
pub fn shift_ground_to_sat(s: &LinkScenario) -> Result<ShiftResult> {
    let (Worldline::GroundStation { r: r_a, omega: omega_a }, Worldline::CircularOrbit { r: r_b, direction }) =
        (s.emitter, s.receiver)
    else {
        return Err(Error::domain("scenario", "expected a ground-to-satellite link"));
    };
    let p = &s.params;
    check_radius(p, r_a, "r_A")?;
    check_radius(p, r_b, "r_B")?;
    let a = p.a();
    let two_m_over_ra = p.m() * 2.0 / r_a;

    let (num, y) = orbit_terms(p, r_b, direction);
    let den = two_m_over_ra * a * omega_a / (Dd::ONE - two_m_over_ra);
    let x = -(two_m_over_ra * (Dd::ONE - a * omega_a).sqr())
        - (a.sqr() + Dd::from_f64(r_a).sqr()) * omega_a.sqr();

    positive_factor("station normalisation 1 - 2M/r_A (1 - a w_A)^2 - (a^2 + r_A^2) w_A^2", x)?;
    positive_factor("orbit normalisation 1 - 3M/r_B + 2 eps a w_B", y)?;
    positive_factor("receiver factor 1 + eps a w_B / (1 - 2M/r_B)", num)?;
    positive_factor("emitter factor 1 + (2M/r_A) a w_A / (1 - 2M/r_A)", den)?;
    Ok(ShiftResult::from_delta(combine(num, den, x, y), Method::ClosedForm))
}

/// Closed-form shift between two circular orbits, emitter direction `eta`,
/// receiver direction `eps`.
pub fn shift_sat_to_sat(s: &LinkScenario) -> Result<ShiftResult> {
    let (
        Worldline::CircularOrbit { r: r_c, direction: eta },
        Worldline::CircularOrbit { r: r_b, direction: eps },
    ) = (s.emitter, s.receiver)
    else {
        return Err(Error::domain("scenario", "expected a satellite-to-satellite link"));
    };
    let p = &s.params;
    check_radius(p, r_c, "r_C")?;
    check_radius(p, r_b, "r_B")?;
    let (num, y) = orbit_terms(p, r_b, eps);
    let (den, x) = orbit_terms(p, r_c, eta);
    positive_factor("emitter orbit normalisation 1 - 3M/r_C + 2 eta a w_C", x)?;
    positive_factor("receiver orbit normalisation 1 - 3M/r_B + 2 eps a w_B", y)?;
    positive_factor("receiver factor 1 + eps a w_B / (1 - 2M/r_B)", num)?;
    positive_factor("emitter factor 1 + eta a w_C / (1 - 2M/r_C)", den)?;
    Ok(ShiftResult::from_delta(combine(num, den, x, y), Method::ClosedForm))
}

/// `f_S = sqrt((1 - 2M/r_A) / (1 - 3M/r_B))`.
pub fn shift_schwarzschild(m_geom: Dd, r_a: f64, r_b: f64) -> Result<ShiftResult> {
    let p = SpacetimeParams::schwarzschild(m_geom)?;
    check_radius(&p, r_a, "r_A")?;
    if !(r_b.is_finite() && Dd::from_f64(r_b) > m_geom * 3.0) {
        return Err(Error::domain("r_B", format!("must exceed 3M, got {r_b}")));
    }
    let two_m_over_ra = m_geom * 2.0 / r_a;
    let x = -(two_m_over_ra * Dd::ONE.sqr());
    let y = Dd::ZERO - m_geom * 3.0 / r_b;
    Ok(ShiftResult::from_delta(
        combine(Dd::ZERO * 0.0, Dd::ZERO, x, y),
        Method::SchwarzschildLimit,
    ))
}

/// Closed form for whichever scheme the scenario describes.
pub fn shift(s: &LinkScenario) -> Result<ShiftResult> {
    match s.scheme {
        Scheme::GroundToSat => shift_ground_to_sat(s),
        Scheme::SatToSat => shift_sat_to_sat(s),
    }
}

/// Ratio of the photon-observer contractions `[k.u_receiver] / [k.u_emitter]`
/// built from the metric, four-velocities and photon tangent independently of
/// the closed form.
pub fn shift_via_contraction(s: &LinkScenario) -> Result<ShiftResult> {
    let p = &s.params;
    let at = |w: &Worldline| -> Result<Dd> {
        let g = geometry::metric_at(p, w.r())?;
        let (k, _) = geometry::photon_tangent(p, w.r(), Dd::ONE)?;
        let u = geometry::observer_velocity(p, w)?;
        Ok(geometry::contract(&g, &k, &u))
    };
    let received = at(&s.receiver)?;
    let emitted = at(&s.emitter)?;
    let f = received / emitted;
    Ok(ShiftResult {
        f,
        delta: f - 1.0,
        method: Method::Contraction,
    })
}

/// Bisection on the sign of `delta` over receiver radii in `[r_lo, r_hi]`.
///
/// Runs until the bracket can no longer be split in `f64`, then returns the
/// endpoint with the smaller `|delta|`, which must be below `1e-18`.
pub fn find_zero_shift_orbit(template: &LinkScenario, r_lo: f64, r_hi: f64) -> Result<f64> {
    const TARGET: f64 = 1e-18;
    if !(r_lo < r_hi) {
        return Err(Error::domain("bracket", format!("need r_lo < r_hi, got [{r_lo}, {r_hi}]")));
    }
    let delta_at = |r: f64| -> Result<Dd> { Ok(shift(&template.with_receiver_radius(r)?)?.delta) };
    let (mut lo, mut hi) = (r_lo, r_hi);
    let mut d_lo = delta_at(lo)?;
    let d_hi = delta_at(hi)?;
    if d_lo.is_zero() {
        return Ok(lo);
    }
    if d_hi.is_zero() {
        return Ok(hi);
    }
    if d_lo.is_sign_negative() == d_hi.is_sign_negative() {
        return Err(Error::NotFound { lo: r_lo, hi: r_hi });
    }
    let mut d_hi = d_hi;
    loop {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let d_mid = delta_at(mid)?;
        if d_mid.is_zero() {
            return Ok(mid);
        }
        if d_mid.is_sign_negative() == d_lo.is_sign_negative() {
            lo = mid;
            d_lo = d_mid;
        } else {
            hi = mid;
            d_hi = d_mid;
        }
    }
    let (best, d_best) = if d_lo.abs() <= d_hi.abs() { (lo, d_lo) } else { (hi, d_hi) };
    if d_best.abs().to_f64() < TARGET {
        Ok(best)
    } else {
        Err(Error::Numerical {
            what: "zero-shift bisection",
            achieved: d_best.abs().to_f64(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{EarthModel, PhysicalConstants};

    const K: PhysicalConstants = PhysicalConstants::DEFAULT;

    fn earth_link(r_b: f64, dir: Direction) -> LinkScenario {
        let e = EarthModel::EARTH;
        let p = e.spacetime(&K).unwrap();
        LinkScenario::ground_to_sat(
            p,
            Worldline::ground_station(e.r_a, e.omega_geom(&K)),
            Worldline::circular_orbit(r_b, dir),
        )
        .unwrap()
    }

    fn schwarzschild_link(r_b: f64, dir: Direction) -> LinkScenario {
        let e = EarthModel::EARTH;
        let p = SpacetimeParams::schwarzschild(e.spacetime(&K).unwrap().m()).unwrap();
        LinkScenario::ground_to_sat(
            p,
            Worldline::ground_station(e.r_a, Dd::ZERO),
            Worldline::circular_orbit(r_b, dir),
        )
        .unwrap()
    }

    fn sat_link(r_c: f64, r_b: f64, eta: Direction, eps: Direction) -> LinkScenario {
        let p = EarthModel::EARTH.spacetime(&K).unwrap();
        LinkScenario::sat_to_sat(
            p,
            Worldline::circular_orbit(r_c, eta),
            Worldline::circular_orbit(r_b, eps),
        )
        .unwrap()
    }

    // 60-digit mpmath evaluations of the closed forms with the Earth preset.
    const DELTA_LEO: f64 = 9.744_254_784_786_161e-11;
    const DELTA_GEO: f64 = -5.385_615_230_043_958e-10;
    const DELTA_LEO_GEO: f64 = -6.360_040_707_902_836e-10;

    #[test]
    fn earth_presets_against_reference() {
        let e = EarthModel::EARTH;
        let leo = shift_ground_to_sat(&earth_link(e.leo_radius(), Direction::Prograde)).unwrap();
        let geo = shift_ground_to_sat(&earth_link(e.geo_radius(), Direction::Prograde)).unwrap();
        assert!(((leo.delta.to_f64() - DELTA_LEO) / DELTA_LEO).abs() < 1e-14);
        assert!(((geo.delta.to_f64() - DELTA_GEO) / DELTA_GEO).abs() < 1e-14);
        // order-of-magnitude anchors
        assert!(((leo.delta.to_f64() - 9.9e-11) / 9.9e-11).abs() < 0.02);
        assert!(((geo.delta.to_f64() + 5.4e-10) / 5.4e-10).abs() < 0.02);
        let sats = shift_sat_to_sat(&sat_link(
            e.leo_radius(),
            e.geo_radius(),
            Direction::Prograde,
            Direction::Prograde,
        ))
        .unwrap();
        assert!(((sats.delta.to_f64() - DELTA_LEO_GEO) / DELTA_LEO_GEO).abs() < 1e-14);
    }

    #[test]
    fn delta_and_f_agree() {
        let e = EarthModel::EARTH;
        let r = shift_ground_to_sat(&earth_link(e.geo_radius(), Direction::Prograde)).unwrap();
        assert!((r.delta - (r.f - 1.0)).to_f64().abs() <= 1e-30);
        assert!(r.f.is_sign_positive());
    }

    #[test]
    fn kerr_reduces_to_schwarzschild_bitwise() {
        let e = EarthModel::EARTH;
        let m = e.spacetime(&K).unwrap().m();
        for i in 0..100 {
            let r_b = e.r_a * (1.01 + 0.09 * i as f64);
            let kerr = shift_ground_to_sat(&schwarzschild_link(r_b, Direction::Prograde)).unwrap();
            let schw = shift_schwarzschild(m, e.r_a, r_b).unwrap();
            assert_eq!(kerr.delta.to_bits(), schw.delta.to_bits(), "r_B = {r_b}");
        }
    }

    #[test]
    fn schwarzschild_direction_independent() {
        let e = EarthModel::EARTH;
        for r_b in [e.leo_radius(), 1.5 * e.r_a, e.geo_radius()] {
            let pro = shift_ground_to_sat(&schwarzschild_link(r_b, Direction::Prograde)).unwrap();
            let retro = shift_ground_to_sat(&schwarzschild_link(r_b, Direction::Retrograde)).unwrap();
            assert_eq!(pro.f.to_bits(), retro.f.to_bits());
            assert_eq!(pro.delta.to_bits(), retro.delta.to_bits());
        }
    }

    #[test]
    fn schwarzschild_zero_shift_and_sign_structure() {
        let e = EarthModel::EARTH;
        let m = e.spacetime(&K).unwrap().m();
        let at_zero = shift_schwarzschild(m, e.r_a, 1.5 * e.r_a).unwrap();
        assert!(at_zero.delta.to_f64().abs() < 1e-30);
        for i in 1..200 {
            let r_b = e.r_a * (1.0 + 9.0 * i as f64 / 200.0);
            let d = shift_schwarzschild(m, e.r_a, r_b).unwrap().delta;
            let expected = (1.5 * e.r_a - r_b).signum();
            if r_b != 1.5 * e.r_a {
                assert_eq!(d.to_f64().signum(), expected, "r_B = {r_b}");
            }
        }
        assert_eq!(shift_schwarzschild(Dd::ZERO, e.r_a, e.leo_radius()).unwrap().f, Dd::ONE);
        assert!(shift_schwarzschild(Dd::ONE, 3.0, 3.0).is_err());
    }

    #[test]
    fn identical_orbits_do_not_shift() {
        let e = EarthModel::EARTH;
        for dir in [Direction::Prograde, Direction::Retrograde] {
            let s = sat_link(e.leo_radius(), e.leo_radius(), dir, dir);
            assert_eq!(shift_sat_to_sat(&s).unwrap().f, Dd::ONE);
        }
    }

    #[test]
    fn sat_shift_without_rotation_ignores_directions() {
        let e = EarthModel::EARTH;
        let m = EarthModel::EARTH.spacetime(&K).unwrap().m();
        let p = SpacetimeParams::schwarzschild(m).unwrap();
        let run = |eta, eps| {
            let s = LinkScenario::sat_to_sat(
                p,
                Worldline::circular_orbit(e.leo_radius(), eta),
                Worldline::circular_orbit(e.geo_radius(), eps),
            )
            .unwrap();
            shift_sat_to_sat(&s).unwrap().delta.to_bits()
        };
        let base = run(Direction::Prograde, Direction::Prograde);
        assert_eq!(base, run(Direction::Retrograde, Direction::Prograde));
        assert_eq!(base, run(Direction::Prograde, Direction::Retrograde));
    }

    #[test]
    fn contraction_matches_closed_form() {
        let e = EarthModel::EARTH;
        for dir in [Direction::Prograde, Direction::Retrograde] {
            for r_b in [e.leo_radius(), 1.5 * e.r_a, e.geo_radius()] {
                let s = earth_link(r_b, dir);
                let closed = shift(&s).unwrap();
                let via = shift_via_contraction(&s).unwrap();
                assert!(((via.f - closed.f) / closed.f).to_f64().abs() < 1e-24);
            }
            let s = sat_link(e.leo_radius(), e.geo_radius(), dir, Direction::Prograde);
            let closed = shift(&s).unwrap();
            let via = shift_via_contraction(&s).unwrap();
            assert!(((via.f - closed.f) / closed.f).to_f64().abs() < 1e-24);
        }
        let s = schwarzschild_link(e.leo_radius(), Direction::Prograde);
        let via = shift_via_contraction(&s).unwrap();
        let m = s.params().m();
        let schw = shift_schwarzschild(m, e.r_a, e.leo_radius()).unwrap();
        assert!(((via.f - schw.f) / schw.f).to_f64().abs() < 1e-24);
    }

    #[test]
    fn flat_contraction_is_exactly_one() {
        let s = LinkScenario::ground_to_sat(
            SpacetimeParams::minkowski(),
            Worldline::ground_station(6e6, Dd::ZERO),
            Worldline::circular_orbit(8e6, Direction::Prograde),
        )
        .unwrap();
        assert_eq!(shift_via_contraction(&s).unwrap().f, Dd::ONE);
        assert_eq!(shift(&s).unwrap().f, Dd::ONE);
    }

    #[test]
    fn linear_omega_reading_is_not_physical() {
        // Reading the station factor with (a^2 + r_A^2) w_A (first degree) as printed:
        // the argument goes negative for Earth, while the quadratic form matches
        // the four-velocity normalisation used by the contraction path.
        let e = EarthModel::EARTH;
        let p = e.spacetime(&K).unwrap();
        let w = e.omega_geom(&K);
        let a = p.a();
        let two_m = p.m() * 2.0 / e.r_a;
        let linear = Dd::ONE
            - two_m * (Dd::ONE - a * w).sqr()
            - (a.sqr() + Dd::from_f64(e.r_a).sqr()) * w;
        assert!(linear.to_f64() < -8.0);
        let s = earth_link(e.leo_radius(), Direction::Prograde);
        let closed = shift(&s).unwrap();
        let via = shift_via_contraction(&s).unwrap();
        assert!((closed.f - via.f).to_f64().abs() < 1e-24);
    }

    #[test]
    fn negative_root_is_named() {
        let e = EarthModel::EARTH;
        let p = e.spacetime(&K).unwrap();
        let fast = Worldline::ground_station(e.r_a, Dd::from_f64(2.0 / e.r_a));
        let s = LinkScenario::ground_to_sat(p, fast, Worldline::circular_orbit(e.leo_radius(), Direction::Prograde))
            .unwrap();
        match shift(&s) {
            Err(Error::NegativeRoot { factor, .. }) => assert!(factor.contains("station")),
            other => panic!("expected negative root, got {other:?}"),
        }
    }

    #[test]
    fn scenario_validation() {
        let e = EarthModel::EARTH;
        let p = e.spacetime(&K).unwrap();
        let st = Worldline::ground_station(e.r_a, Dd::ZERO);
        let orbit = Worldline::circular_orbit(e.leo_radius(), Direction::Prograde);
        assert!(LinkScenario::ground_to_sat(p, orbit, orbit).is_err());
        assert!(LinkScenario::ground_to_sat(p, st, st).is_err());
        assert!(LinkScenario::ground_to_sat(p, st, Worldline::circular_orbit(e.r_a - 1.0, Direction::Prograde)).is_err());
        assert!(LinkScenario::sat_to_sat(p, st, orbit).is_err());
        let high = Worldline::circular_orbit(e.geo_radius(), Direction::Prograde);
        assert!(LinkScenario::sat_to_sat(p, high, orbit).is_err());
    }

    #[test]
    fn zero_shift_orbit_schwarzschild() {
        let e = EarthModel::EARTH;
        let s = schwarzschild_link(e.leo_radius(), Direction::Prograde);
        let r = find_zero_shift_orbit(&s, e.r_a * 1.2, e.r_a * 2.0).unwrap();
        assert!((r / (1.5 * e.r_a) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_shift_orbit_kerr() {
        // mpmath root of the closed form at 60 digits.
        const R_STAR: f64 = 9_550_474.940_083_49;
        let e = EarthModel::EARTH;
        let s = earth_link(e.leo_radius(), Direction::Prograde);
        let r = find_zero_shift_orbit(&s, e.r_a * 1.2, e.r_a * 2.0).unwrap();
        assert!(((r - R_STAR) / R_STAR).abs() < 1e-9, "{r}");
        let rel = r / (1.5 * e.r_a) - 1.0;
        assert!(rel < -1e-3 && rel > -2e-3, "{rel:e}");
        let d = shift(&s.with_receiver_radius(r).unwrap()).unwrap().delta;
        assert!(d.to_f64().abs() < 1e-18);
    }

    #[test]
    fn zero_shift_orbit_not_bracketed() {
        let e = EarthModel::EARTH;
        let s = earth_link(e.leo_radius(), Direction::Prograde);
        assert!(matches!(
            find_zero_shift_orbit(&s, e.r_a + 1000.0, 1.2 * e.r_a),
            Err(Error::NotFound { .. })
        ));
    }
}
