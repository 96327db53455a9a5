//! Physical constants, SI to geometric-unit conversion, and the planet model.
//!
//! Geometric units set `G = c = 1`; masses and the Kerr parameter become
//! lengths in metres and angular velocities become inverse metres.

use crate::error::{Error, Result};
use crate::numeric::Dd;

/// Altitude of the low-Earth-orbit preset above the equatorial radius.
pub const LEO_ALTITUDE_M: f64 = 2.0e6;
/// Altitude of the geostationary preset above the equatorial radius.
pub const GEO_ALTITUDE_M: f64 = 35_784.0e3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    g: f64,
    c: f64,
}

impl PhysicalConstants {
    pub const DEFAULT: PhysicalConstants = PhysicalConstants {
        g: 6.674e-11,
        c: 2.997_924_58e8,
    };

    pub fn new(g: f64, c: f64) -> Result<PhysicalConstants> {
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::domain("G", format!("must be positive, got {g}")));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::domain("c", format!("must be positive, got {c}")));
        }
        Ok(PhysicalConstants { g, c })
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        PhysicalConstants::DEFAULT
    }
}

/// Mass and Kerr parameter in geometric length units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacetimeParams {
    m_geom: Dd,
    a: Dd,
}

impl SpacetimeParams {
    /// `m_geom = 0` is accepted so that the flat-space limit can be evaluated.
    /// No horizon condition `a < M` is imposed.
    pub fn new(m_geom: Dd, a: Dd) -> Result<SpacetimeParams> {
        if !m_geom.is_finite() || m_geom.is_sign_negative() {
            return Err(Error::domain("M_geom", format!("must be >= 0, got {m_geom:.6}")));
        }
        if !a.is_finite() || a.is_sign_negative() {
            return Err(Error::domain("a", format!("must be >= 0, got {a:.6}")));
        }
        Ok(SpacetimeParams { m_geom, a })
    }

    pub fn schwarzschild(m_geom: Dd) -> Result<SpacetimeParams> {
        SpacetimeParams::new(m_geom, Dd::ZERO)
    }

    pub fn minkowski() -> SpacetimeParams {
        SpacetimeParams {
            m_geom: Dd::ZERO,
            a: Dd::ZERO,
        }
    }

    pub fn m(&self) -> Dd {
        self.m_geom
    }

    pub fn a(&self) -> Dd {
        self.a
    }

    /// Schwarzschild radius `r_S = 2 M`.
    pub fn r_s(&self) -> Dd {
        self.m_geom * 2.0
    }

    /// Angular momentum `J = a M` (geometric units, m^2).
    pub fn j(&self) -> Dd {
        self.a * self.m_geom
    }

    pub fn with_m(&self, m_geom: Dd) -> Result<SpacetimeParams> {
        SpacetimeParams::new(m_geom, self.a)
    }

    pub fn with_a(&self, a: Dd) -> Result<SpacetimeParams> {
        SpacetimeParams::new(self.m_geom, a)
    }
}

/// `G M / c^2`.
pub fn geometric_mass(mass_kg: f64, k: &PhysicalConstants) -> Result<Dd> {
    if !(mass_kg > 0.0 && mass_kg.is_finite()) {
        return Err(Error::domain("mass", format!("must be positive, got {mass_kg}")));
    }
    let c = Dd::from_f64(k.c);
    Ok(Dd::from_f64(k.g) * mass_kg / c.sqr())
}

/// Kerr parameter `a = I omega / (M c)` in metres.
pub fn kerr_parameter_from_inertia(
    inertia: f64,
    omega: f64,
    mass_kg: f64,
    k: &PhysicalConstants,
) -> Result<Dd> {
    if !(mass_kg > 0.0 && mass_kg.is_finite()) {
        return Err(Error::domain("mass", format!("must be positive, got {mass_kg}")));
    }
    if !(inertia >= 0.0 && inertia.is_finite()) {
        return Err(Error::domain("moment of inertia", format!("must be >= 0, got {inertia}")));
    }
    if !(omega >= 0.0 && omega.is_finite()) {
        return Err(Error::domain("omega", format!("must be >= 0, got {omega}")));
    }
    Ok(Dd::from_f64(inertia) * omega / (Dd::from_f64(mass_kg) * k.c))
}

/// The geometric-unit form `a = 2 I omega / r_S`, with `I` in m^3 and `omega` in 1/m.
pub fn kerr_parameter_geometric(inertia_geom: Dd, omega_geom: Dd, r_s: Dd) -> Dd {
    inertia_geom * omega_geom * 2.0 / r_s
}

/// A rigidly rotating planet in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EarthModel {
    pub mass_kg: f64,
    /// Equatorial radius (m).
    pub r_a: f64,
    /// Equatorial angular velocity (rad/s).
    pub omega_a: f64,
    /// Kerr parameter (m).
    pub a_m: f64,
    /// Moment of inertia (kg m^2).
    pub inertia: f64,
}

impl EarthModel {
    /// Earth values used throughout: `M = 5.97e24 kg`, `r_A = 6378 km`,
    /// `omega_A = 7.29e-5 rad/s`, `a = 3.26 m`. The moment of inertia is
    /// chosen so that `I omega / (M c)` reproduces `a` within 1%.
    pub const EARTH: EarthModel = EarthModel {
        mass_kg: 5.97e24,
        r_a: 6.378e6,
        omega_a: 7.29e-5,
        a_m: 3.26,
        inertia: 8.03e37,
    };

    pub fn new(
        mass_kg: f64,
        r_a: f64,
        omega_a: f64,
        a_m: f64,
        inertia: f64,
        k: &PhysicalConstants,
    ) -> Result<EarthModel> {
        let model = EarthModel {
            mass_kg,
            r_a,
            omega_a,
            a_m,
            inertia,
        };
        model.validate(k)?;
        Ok(model)
    }

    pub fn validate(&self, k: &PhysicalConstants) -> Result<()> {
        for (name, v) in [("mass", self.mass_kg), ("r_A", self.r_a)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(name, format!("must be positive, got {v}")));
            }
        }
        for (name, v) in [
            ("omega_A", self.omega_a),
            ("a", self.a_m),
            ("moment of inertia", self.inertia),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::domain(name, format!("must be >= 0, got {v}")));
            }
        }
        let implied = kerr_parameter_from_inertia(self.inertia, self.omega_a, self.mass_kg, k)?
            .to_f64();
        let consistent = if self.a_m == 0.0 {
            implied == 0.0
        } else {
            ((implied - self.a_m) / self.a_m).abs() <= 0.01
        };
        if !consistent {
            return Err(Error::domain(
                "a",
                format!(
                    "{} m is inconsistent with I*omega/(M c) = {implied:.4} m (1% tolerance)",
                    self.a_m
                ),
            ));
        }
        Ok(())
    }

    pub fn spacetime(&self, k: &PhysicalConstants) -> Result<SpacetimeParams> {
        SpacetimeParams::new(geometric_mass(self.mass_kg, k)?, Dd::from_f64(self.a_m))
    }

    /// Equatorial angular velocity in geometric units (1/m).
    pub fn omega_geom(&self, k: &PhysicalConstants) -> Dd {
        Dd::from_f64(self.omega_a) / k.c
    }

    pub fn leo_radius(&self) -> f64 {
        self.r_a + LEO_ALTITUDE_M
    }

    pub fn geo_radius(&self) -> f64 {
        self.r_a + GEO_ALTITUDE_M
    }
}

impl Default for EarthModel {
    fn default() -> Self {
        EarthModel::EARTH
    }
}

/// The perturbative ratios that control the size of every shift term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionlessParams {
    pub m_over_ra: f64,
    pub m_over_rb: f64,
    pub a_over_ra: f64,
    pub a_over_rb: f64,
    /// `r_A omega_A / c`.
    pub ra_omega_a: f64,
}

pub fn dimensionless_params(
    earth: &EarthModel,
    r_b: f64,
    k: &PhysicalConstants,
) -> Result<DimensionlessParams> {
    if !(r_b > earth.r_a) {
        return Err(Error::domain(
            "r_B",
            format!("must exceed r_A = {} m, got {r_b}", earth.r_a),
        ));
    }
    let m = geometric_mass(earth.mass_kg, k)?.to_f64();
    Ok(DimensionlessParams {
        m_over_ra: m / earth.r_a,
        m_over_rb: m / r_b,
        a_over_ra: earth.a_m / earth.r_a,
        a_over_rb: earth.a_m / r_b,
        ra_omega_a: earth.r_a * earth.omega_a / k.c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const K: PhysicalConstants = PhysicalConstants::DEFAULT;

    fn sig3(x: f64) -> f64 {
        let e = x.abs().log10().floor();
        (x / 10f64.powf(e - 2.0)).round() * 10f64.powf(e - 2.0)
    }

    fn close3(x: f64, expected: f64) -> bool {
        (sig3(x) / expected - 1.0).abs() < 1e-12
    }

    #[test]
    fn geometric_mass_of_earth() {
        let m = geometric_mass(5.97e24, &K).unwrap().to_f64();
        assert!(close3(m, 4.43e-3), "{m}");
    }

    #[test]
    fn geometric_mass_rejects_zero() {
        assert!(matches!(geometric_mass(0.0, &K), Err(Error::Domain { .. })));
        assert!(geometric_mass(-1.0, &K).is_err());
    }

    #[test]
    fn geometric_mass_is_linear() {
        let one = geometric_mass(3.0e24, &K).unwrap();
        let two = geometric_mass(6.0e24, &K).unwrap();
        assert!(((two - one * 2.0) / two).to_f64().abs() < 1e-30);
    }

    #[test]
    fn kerr_parameter_from_earth_inertia() {
        let a = kerr_parameter_from_inertia(8.03e37, 7.29e-5, 5.97e24, &K)
            .unwrap()
            .to_f64();
        assert!((a - 3.27).abs() < 0.005, "{a}");
        assert!(((a - 3.26) / 3.26).abs() < 0.01);
        assert_eq!(
            kerr_parameter_from_inertia(8.03e37, 0.0, 5.97e24, &K)
                .unwrap()
                .to_f64(),
            0.0
        );
        assert!(kerr_parameter_from_inertia(8.03e37, 7.29e-5, 0.0, &K).is_err());
    }

    #[test]
    fn kerr_parameter_geometric_identity() {
        let (i, w, m) = (8.03e37, 7.29e-5, 5.97e24);
        let si = kerr_parameter_from_inertia(i, w, m, &K).unwrap();
        let c = Dd::from_f64(K.c());
        let inertia_geom = Dd::from_f64(K.g()) * i / c.sqr();
        let r_s = geometric_mass(m, &K).unwrap() * 2.0;
        let geo = kerr_parameter_geometric(inertia_geom, Dd::from_f64(w) / c, r_s);
        assert!(((geo - si) / si).to_f64().abs() < 1e-12);
    }

    #[test]
    fn table_values_leo_geo() {
        let e = EarthModel::EARTH;
        let leo = dimensionless_params(&e, e.leo_radius(), &K).unwrap();
        let geo = dimensionless_params(&e, e.geo_radius(), &K).unwrap();
        assert!(close3(leo.m_over_ra, 6.95e-10), "{}", leo.m_over_ra);
        assert!(close3(leo.a_over_ra, 5.11e-7), "{}", leo.a_over_ra);
        assert!(close3(leo.ra_omega_a, 1.55e-6), "{}", leo.ra_omega_a);
        assert!(close3(leo.m_over_rb, 5.29e-10), "{}", leo.m_over_rb);
        assert!(close3(leo.a_over_rb, 3.89e-7), "{}", leo.a_over_rb);
        assert!(close3(geo.m_over_rb, 1.05e-10), "{}", geo.m_over_rb);
        assert!(close3(geo.a_over_rb, 7.73e-8), "{}", geo.a_over_rb);
        assert_eq!(leo.m_over_ra, geo.m_over_ra);
    }

    #[test]
    fn dimensionless_params_rejects_inner_radius() {
        let e = EarthModel::EARTH;
        assert!(dimensionless_params(&e, e.r_a, &K).is_err());
        assert!(dimensionless_params(&e, e.r_a - 1.0, &K).is_err());
    }

    #[test]
    fn ratios_scale_invariant() {
        let e = EarthModel::EARTH;
        let base = dimensionless_params(&e, e.leo_radius(), &K).unwrap();
        let scaled = EarthModel {
            mass_kg: e.mass_kg * 4.0,
            r_a: e.r_a * 4.0,
            omega_a: e.omega_a / 4.0,
            a_m: e.a_m * 4.0,
            inertia: e.inertia * 64.0,
        };
        let s = dimensionless_params(&scaled, e.leo_radius() * 4.0, &K).unwrap();
        for (x, y) in [
            (base.m_over_ra, s.m_over_ra),
            (base.m_over_rb, s.m_over_rb),
            (base.a_over_ra, s.a_over_ra),
            (base.a_over_rb, s.a_over_rb),
            (base.ra_omega_a, s.ra_omega_a),
        ] {
            assert!(((x - y) / x).abs() < 1e-14);
        }
    }

    #[test]
    fn earth_model_consistency_check() {
        assert!(EarthModel::EARTH.validate(&K).is_ok());
        assert!(EarthModel::new(5.97e24, 6.378e6, 7.29e-5, 4.0, 8.03e37, &K).is_err());
        assert!(EarthModel::new(5.97e24, 6.378e6, 0.0, 0.0, 8.03e37, &K).is_ok());
    }

    #[test]
    fn spacetime_params_invariants() {
        let p = EarthModel::EARTH.spacetime(&K).unwrap();
        assert_eq!(p.r_s(), p.m() * 2.0);
        assert!((p.j() - p.a() * p.m()).is_zero());
        assert!(SpacetimeParams::new(Dd::from_f64(-1.0), Dd::ZERO).is_err());
        assert!(SpacetimeParams::new(Dd::from_f64(1.0), Dd::from_f64(-1.0)).is_err());
        // a > M (Earth-like) is allowed.
        assert!(SpacetimeParams::new(Dd::from_f64(1.0), Dd::from_f64(1000.0)).is_ok());
    }

    #[test]
    fn constants_validation() {
        assert!(PhysicalConstants::new(0.0, 1.0).is_err());
        assert!(PhysicalConstants::new(1.0, -1.0).is_err());
        assert_eq!(PhysicalConstants::default(), K);
    }
}
