//! Equatorial Kerr geometry in Boyer–Lindquist coordinates `(t, r, phi)`.
//!
//! Everything here is in geometric units. The `theta` direction is absent:
//! observers, orbits and photons all stay in the equatorial plane.

use crate::error::{Error, Result};
use crate::numeric::Dd;
use crate::units::SpacetimeParams;

/// Metric components at one radius on the equator.
///
/// `g_tt` is kept as `-1 + g_tt_dev` so the `2M/r` deviation, about 1e-9 for
/// Earth, is never rounded into the unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricAt {
    pub r: f64,
    /// `2M/r`.
    pub g_tt_dev: Dd,
    pub g_rr: Dd,
    pub g_phiphi: Dd,
    pub g_tphi: Dd,
    /// `Delta = 1 - 2M/r + a^2/r^2`.
    pub delta: Dd,
}

impl MetricAt {
    pub fn g_tt(&self) -> Dd {
        self.g_tt_dev - 1.0
    }
}

pub fn metric_at(p: &SpacetimeParams, r: f64) -> Result<MetricAt> {
    let two_m = p.m() * 2.0;
    if !(r.is_finite() && Dd::from_f64(r) > two_m) || r <= 0.0 {
        return Err(Error::domain("r", format!("must exceed 2M = {two_m:.6} m, got {r}")));
    }
    let a = p.a();
    let two_m_over_r = two_m / r;
    let a2 = a.sqr();
    let r2 = Dd::from_f64(r).sqr();
    let delta = Dd::ONE - two_m_over_r + a2 / r2;
    Ok(MetricAt {
        r,
        g_tt_dev: two_m_over_r,
        g_rr: delta.recip(),
        g_phiphi: r2 + a2 + two_m_over_r * a2,
        g_tphi: -(two_m_over_r * a),
        delta,
    })
}

/// A contravariant vector `X^t d_t + X^r d_r + X^phi d_phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourVector {
    pub t: Dd,
    pub r: Dd,
    pub phi: Dd,
}

impl FourVector {
    pub fn new(t: Dd, r: Dd, phi: Dd) -> FourVector {
        FourVector { t, r, phi }
    }

    pub fn scale(&self, s: Dd) -> FourVector {
        FourVector {
            t: self.t * s,
            r: self.r * s,
            phi: self.phi * s,
        }
    }
}

/// `g_{mu nu} x^mu y^nu`.
pub fn contract(g: &MetricAt, x: &FourVector, y: &FourVector) -> Dd {
    g.g_tt() * x.t * y.t
        + g.g_rr * x.r * y.r
        + g.g_phiphi * x.phi * y.phi
        + g.g_tphi * (x.t * y.phi + x.phi * y.t)
}

/// Orbital sense relative to the planet's rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Direction {
    /// Co-rotating, sign `+1`.
    #[default]
    Prograde,
    /// Counter-rotating, sign `-1`.
    Retrograde,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Prograde => 1.0,
            Direction::Retrograde => -1.0,
        }
    }

    pub fn from_sign(s: i32) -> Option<Direction> {
        match s {
            1 => Some(Direction::Prograde),
            -1 => Some(Direction::Retrograde),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Worldline {
    /// Observer fixed on the rotating surface, carried at the given
    /// angular velocity (geometric units, 1/m).
    GroundStation { r: f64, omega: Dd },
    /// Geodesic circular orbit; its angular velocity `sqrt(M/r^3)` is always
    /// derived from the spacetime, never stored.
    CircularOrbit { r: f64, direction: Direction },
}

impl Worldline {
    pub fn ground_station(r: f64, omega: Dd) -> Worldline {
        Worldline::GroundStation { r, omega }
    }

    pub fn circular_orbit(r: f64, direction: Direction) -> Worldline {
        Worldline::CircularOrbit { r, direction }
    }

    pub fn r(&self) -> f64 {
        match *self {
            Worldline::GroundStation { r, .. } | Worldline::CircularOrbit { r, .. } => r,
        }
    }

    /// Unsigned coordinate angular velocity `d phi / d t` magnitude.
    pub fn omega(&self, p: &SpacetimeParams) -> Dd {
        match *self {
            Worldline::GroundStation { omega, .. } => omega,
            Worldline::CircularOrbit { r, .. } => orbital_frequency(p, r),
        }
    }

    pub fn is_orbit(&self) -> bool {
        matches!(self, Worldline::CircularOrbit { .. })
    }
}

/// `omega = sqrt(M / r^3)` for a circular equatorial orbit.
pub fn orbital_frequency(p: &SpacetimeParams, r: f64) -> Dd {
    (p.m() / Dd::from_f64(r).powi(3)).sqrt()
}

/// Normalisation of a surface observer:
/// `gamma_A = (1 - omega^2 (r^2 + a^2) - (2M/r)(1 - a omega)^2)^(-1/2)`.
pub fn gamma_ground(p: &SpacetimeParams, r: f64, omega: Dd) -> Result<Dd> {
    let a = p.a();
    let arg = Dd::ONE
        - omega.sqr() * (Dd::from_f64(r).sqr() + a.sqr())
        - p.m() * 2.0 / r * (Dd::ONE - a * omega).sqr();
    if !arg.is_sign_positive() {
        return Err(Error::NegativeRoot {
            factor: "gamma_A (superluminal station)",
            value: arg.to_f64(),
        });
    }
    Ok(arg.sqrt().recip())
}

/// Normalisation of a circular orbit:
/// `gamma_B = (1 - 3M/r + 2 eps a omega)^(-1/2)`.
pub fn gamma_orbit(p: &SpacetimeParams, r: f64, direction: Direction) -> Result<Dd> {
    let omega = orbital_frequency(p, r);
    let arg = Dd::ONE - p.m() * 3.0 / r + p.a() * omega * (2.0 * direction.sign());
    if !arg.is_sign_positive() {
        return Err(Error::NegativeRoot {
            factor: "gamma_B (orbit inside photon-orbit region)",
            value: arg.to_f64(),
        });
    }
    Ok(arg.sqrt().recip())
}

/// Four-velocity `gamma_A (1, 0, omega_A)` of a surface observer.
pub fn ground_station_velocity(p: &SpacetimeParams, w: &Worldline) -> Result<FourVector> {
    let Worldline::GroundStation { r, omega } = *w else {
        return Err(Error::domain("worldline", "expected a ground station"));
    };
    let gamma = gamma_ground(p, r, omega)?;
    Ok(FourVector::new(gamma, Dd::ZERO, gamma * omega))
}

/// Four-velocity `gamma_B (1 + eps a omega_B, 0, eps omega_B)` of a circular orbit.
pub fn orbit_velocity(p: &SpacetimeParams, w: &Worldline) -> Result<FourVector> {
    let Worldline::CircularOrbit { r, direction } = *w else {
        return Err(Error::domain("worldline", "expected a circular orbit"));
    };
    metric_at(p, r)?;
    let gamma = gamma_orbit(p, r, direction)?;
    let signed_omega = orbital_frequency(p, r) * direction.sign();
    Ok(FourVector::new(
        gamma * (Dd::ONE + p.a() * signed_omega),
        Dd::ZERO,
        gamma * signed_omega,
    ))
}

pub fn observer_velocity(p: &SpacetimeParams, w: &Worldline) -> Result<FourVector> {
    match w {
        Worldline::GroundStation { .. } => ground_station_velocity(p, w),
        Worldline::CircularOrbit { .. } => orbit_velocity(p, w),
    }
}

/// Conserved energy, `kappa(r)` and the angular-momentum expression of a
/// geometrically radial photon at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonState {
    pub e_gamma: Dd,
    pub kappa: Dd,
    /// `L = -a E (2M/r) / (1 - 2M/r)`, evaluated at this radius.
    pub l_gamma_at_r: Dd,
}

/// `kappa = 1 + (a^2/r^2)(1 + 2M/r) + 4 M^2 a^2 / (r^4 (1 - 2M/r))`.
pub fn kappa(p: &SpacetimeParams, r: f64) -> Result<Dd> {
    let g = metric_at(p, r)?;
    let a2_over_r2 = p.a().sqr() / Dd::from_f64(r).sqr();
    let lapse = Dd::ONE - g.g_tt_dev;
    Ok(Dd::ONE + a2_over_r2 * (Dd::ONE + g.g_tt_dev) + a2_over_r2 * g.g_tt_dev.sqr() / lapse)
}

/// Outgoing radial photon tangent `k = E (1/(1 - 2M/r), sqrt(kappa), 0)`.
pub fn photon_tangent(p: &SpacetimeParams, r: f64, e_gamma: Dd) -> Result<(FourVector, PhotonState)> {
    let g = metric_at(p, r)?;
    let lapse = Dd::ONE - g.g_tt_dev;
    let kappa = kappa(p, r)?;
    let k = FourVector::new(e_gamma / lapse, e_gamma * kappa.sqrt(), Dd::ZERO);
    let l = -(p.a() * e_gamma * g.g_tt_dev / lapse);
    Ok((
        k,
        PhotonState {
            e_gamma,
            kappa,
            l_gamma_at_r: l,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{EarthModel, PhysicalConstants};

    const K: PhysicalConstants = PhysicalConstants::DEFAULT;

    fn earth() -> (SpacetimeParams, EarthModel) {
        let e = EarthModel::EARTH;
        (e.spacetime(&K).unwrap(), e)
    }

    #[test]
    fn schwarzschild_and_minkowski_limits() {
        let (p, _) = earth();
        let s = SpacetimeParams::schwarzschild(p.m()).unwrap();
        let g = metric_at(&s, 7e6).unwrap();
        assert!(g.g_tphi.is_zero());
        assert_eq!(g.g_phiphi, Dd::from_f64(7e6).sqr());

        let flat = metric_at(&SpacetimeParams::minkowski(), 5.0).unwrap();
        assert_eq!(flat.g_tt(), -Dd::ONE);
        assert_eq!(flat.g_rr, Dd::ONE);
        assert_eq!(flat.g_phiphi, Dd::from_f64(25.0));
        assert!(flat.g_tphi.is_zero());
    }

    #[test]
    fn earth_surface_lapse_deviation() {
        let (p, e) = earth();
        let g = metric_at(&p, e.r_a).unwrap();
        let dev = (g.g_tt() + 1.0).to_f64();
        assert!((dev - 1.39e-9).abs() < 0.005e-9, "{dev:e}");
        assert!(((g.g_rr * g.delta) - 1.0).to_f64().abs() < 1e-31);
    }

    #[test]
    fn metric_rejects_horizon_scale_radius() {
        let p = SpacetimeParams::schwarzschild(Dd::from_f64(1.0)).unwrap();
        assert!(metric_at(&p, 2.0).is_err());
        assert!(metric_at(&p, 1.0).is_err());
        assert!(metric_at(&p, 2.0001).is_ok());
    }

    #[test]
    fn static_flat_observer() {
        let w = Worldline::ground_station(1.0, Dd::ZERO);
        let u = ground_station_velocity(&SpacetimeParams::minkowski(), &w).unwrap();
        assert_eq!(u, FourVector::new(Dd::ONE, Dd::ZERO, Dd::ZERO));
    }

    #[test]
    fn earth_station_gamma() {
        // Value from a 60-digit evaluation of the normalisation factor.
        let (p, e) = earth();
        let g = gamma_ground(&p, e.r_a, e.omega_geom(&K)).unwrap();
        let dev = (g - 1.0).to_f64();
        assert!((dev - 6.962824002e-10).abs() < 1e-18, "{dev:e}");
    }

    #[test]
    fn superluminal_station_rejected() {
        let (p, e) = earth();
        let w = Worldline::ground_station(e.r_a, Dd::from_f64(1.0 / e.r_a));
        assert!(matches!(
            ground_station_velocity(&p, &w),
            Err(Error::NegativeRoot { .. })
        ));
    }

    #[test]
    fn observer_norms_are_minus_one() {
        let (p, e) = earth();
        let station = Worldline::ground_station(e.r_a, e.omega_geom(&K));
        let u = ground_station_velocity(&p, &station).unwrap();
        let g = metric_at(&p, e.r_a).unwrap();
        assert!((contract(&g, &u, &u) + 1.0).to_f64().abs() < 1e-28);
        for dir in [Direction::Prograde, Direction::Retrograde] {
            for r in [e.leo_radius(), e.geo_radius()] {
                let w = Worldline::circular_orbit(r, dir);
                let u = orbit_velocity(&p, &w).unwrap();
                let g = metric_at(&p, r).unwrap();
                assert!((contract(&g, &u, &u) + 1.0).to_f64().abs() < 1e-28);
            }
        }
    }

    #[test]
    fn flat_orbit_is_static() {
        let w = Worldline::circular_orbit(7e6, Direction::Prograde);
        let u = orbit_velocity(&SpacetimeParams::minkowski(), &w).unwrap();
        assert_eq!(u, FourVector::new(Dd::ONE, Dd::ZERO, Dd::ZERO));
    }

    #[test]
    fn geo_orbit_direction_splitting() {
        // 60-digit reference: gamma_B(+1) - gamma_B(-1) at GEO.
        let (p, e) = earth();
        let plus = gamma_orbit(&p, e.geo_radius(), Direction::Prograde).unwrap();
        let minus = gamma_orbit(&p, e.geo_radius(), Direction::Retrograde).unwrap();
        let diff = (plus - minus).to_f64();
        assert!((diff - GEO_GAMMA_SPLIT).abs() < 1e-24, "{diff:e}");
    }

    // Evaluated with mpmath at 60 digits.
    const GEO_GAMMA_SPLIT: f64 = -1.5857158012720665e-12;

    #[test]
    fn photon_orbit_region_rejected() {
        let p = SpacetimeParams::schwarzschild(Dd::from_f64(1.0)).unwrap();
        let w = Worldline::circular_orbit(2.9, Direction::Prograde);
        assert!(matches!(orbit_velocity(&p, &w), Err(Error::NegativeRoot { .. })));
    }

    #[test]
    fn wrong_worldline_kind() {
        let (p, e) = earth();
        let orbit = Worldline::circular_orbit(e.leo_radius(), Direction::Prograde);
        assert!(ground_station_velocity(&p, &orbit).is_err());
        let station = Worldline::ground_station(e.r_a, Dd::ZERO);
        assert!(orbit_velocity(&p, &station).is_err());
    }

    #[test]
    fn radial_photon_schwarzschild() {
        let (p, _) = earth();
        let s = SpacetimeParams::schwarzschild(p.m()).unwrap();
        let (_, st) = photon_tangent(&s, 7e6, Dd::ONE).unwrap();
        assert_eq!(st.kappa, Dd::ONE);
        assert!(st.l_gamma_at_r.is_zero());
    }

    #[test]
    fn photon_is_null_and_scales() {
        let (p, e) = earth();
        for r in [e.r_a, e.leo_radius(), e.geo_radius()] {
            let g = metric_at(&p, r).unwrap();
            let (k, _) = photon_tangent(&p, r, Dd::ONE).unwrap();
            assert!(contract(&g, &k, &k).to_f64().abs() < 1e-26);
            let (k2, _) = photon_tangent(&p, r, Dd::from_f64(2.0)).unwrap();
            assert_eq!(k2, k.scale(Dd::from_f64(2.0)));
        }
    }

    #[test]
    fn contraction_orthogonal_flat_basis() {
        let g = metric_at(&SpacetimeParams::minkowski(), 3.0).unwrap();
        let x = FourVector::new(Dd::ONE, Dd::ZERO, Dd::ZERO);
        let y = FourVector::new(Dd::ZERO, Dd::ZERO, Dd::ONE);
        assert!(contract(&g, &x, &y).is_zero());
    }

    #[test]
    fn closed_form_numerator_matches_contraction() {
        let (p, e) = earth();
        for dir in [Direction::Prograde, Direction::Retrograde] {
            let r = e.leo_radius();
            let g = metric_at(&p, r).unwrap();
            let u = orbit_velocity(&p, &Worldline::circular_orbit(r, dir)).unwrap();
            let (k, _) = photon_tangent(&p, r, Dd::ONE).unwrap();
            let gamma = gamma_orbit(&p, r, dir).unwrap();
            let w = orbital_frequency(&p, r) * dir.sign();
            let closed = -(gamma * (Dd::ONE + p.a() * w / (Dd::ONE - g.g_tt_dev)));
            let rel = ((contract(&g, &k, &u) - closed) / closed).to_f64().abs();
            assert!(rel < 1e-26, "{rel:e}");
        }
        let g = metric_at(&p, e.r_a).unwrap();
        let w = e.omega_geom(&K);
        let u = ground_station_velocity(&p, &Worldline::ground_station(e.r_a, w)).unwrap();
        let (k, _) = photon_tangent(&p, e.r_a, Dd::ONE).unwrap();
        let gamma = gamma_ground(&p, e.r_a, w).unwrap();
        let closed = -(gamma * (Dd::ONE + g.g_tt_dev * p.a() * w / (Dd::ONE - g.g_tt_dev)));
        let rel = ((contract(&g, &k, &u) - closed) / closed).to_f64().abs();
        assert!(rel < 1e-26, "{rel:e}");
    }
}
