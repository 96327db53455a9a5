//! Splitting `delta` into its leading Schwarzschild and rotation terms plus
//! the exact residual, and turning a precision on `delta` into a precision on
//! `r_S` or `omega_A`.

use crate::error::{Error, Result};
use crate::geometry::{Direction, Worldline};
use crate::numeric::Dd;
use crate::shift::{self, LinkScenario, Scheme};
use crate::units::{EarthModel, PhysicalConstants, SpacetimeParams};

/// `delta = delta_s + delta_rot + delta_c`, with `delta_c` the exact residual.
///
/// In the satellite scheme `delta_s` and `delta_rot` hold the satellite
/// analogues of the two leading terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftDecomposition {
    pub delta_s: Dd,
    pub delta_rot: Dd,
    pub delta_c: Dd,
    pub delta_exact: Dd,
    /// `L = r_B - r_A` (ground) or `r_B - r_C` (satellites).
    pub separation: f64,
    pub scheme: Scheme,
}

impl ShiftDecomposition {
    fn from_terms(delta_exact: Dd, delta_s: Dd, delta_rot: Dd, separation: f64, scheme: Scheme) -> Self {
        ShiftDecomposition {
            delta_s,
            delta_rot,
            delta_c: delta_exact - delta_s - delta_rot,
            delta_exact,
            separation,
            scheme,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    SchwarzschildRadius,
    EquatorialAngularVelocity,
    KerrParameter,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterError {
    pub target: Target,
    pub relative_error: f64,
}

/// `delta_S = (r_S / 4 r_A) (1 - 2L/r_A) / (1 + L/r_A)`.
pub fn delta_schwarzschild_ground(r_s: Dd, r_a: f64, r_b: f64) -> Dd {
    let l = Dd::from_f64(r_b) - r_a;
    let x = l / r_a;
    r_s / (4.0 * r_a) * (Dd::ONE - x * 2.0) / (Dd::ONE + x)
}

/// `delta_rot = -(r_A omega_A)^2 / 2`, `omega_A` in 1/m.
pub fn delta_rotation_ground(r_a: f64, omega_a: Dd) -> Dd {
    -(omega_a * r_a).sqr() * 0.5
}

/// `delta_s,S = -(3/4) (L r_S / r_C^2) / (1 + L/r_C)`.
pub fn delta_schwarzschild_sats(r_s: Dd, r_c: f64, r_b: f64) -> Dd {
    let l = Dd::from_f64(r_b) - r_c;
    let x = l / r_c;
    -(l * r_s / (Dd::from_f64(r_c).sqr()) * 0.75) / (Dd::ONE + x)
}

/// `delta_s,rot = (1/4) (r_S a^2 / r_C^3) ((1 + L/r_C)^-3 - 1)`.
pub fn delta_rotation_sats(r_s: Dd, a: Dd, r_c: f64, r_b: f64) -> Dd {
    let x = (Dd::from_f64(r_b) - r_c) / r_c;
    // (1+x)^-3 - 1 without cancellation for small x
    let bracket = -(x * (x * (x + 3.0) + 3.0)) / (Dd::ONE + x).powi(3);
    r_s * a.sqr() / Dd::from_f64(r_c).powi(3) * 0.25 * bracket
}

/// Decomposition for a ground station on `earth` sending to an orbit at `r_b`.
pub fn decompose_ground(
    earth: &EarthModel,
    r_b: f64,
    direction: Direction,
    k: &PhysicalConstants,
) -> Result<ShiftDecomposition> {
    if !(r_b > earth.r_a) {
        return Err(Error::domain("r_B", format!("must exceed r_A = {} m, got {r_b}", earth.r_a)));
    }
    let p = earth.spacetime(k)?;
    let omega = earth.omega_geom(k);
    let s = LinkScenario::ground_to_sat(
        p,
        Worldline::ground_station(earth.r_a, omega),
        Worldline::circular_orbit(r_b, direction),
    )?;
    let exact = shift::shift_ground_to_sat(&s)?.delta;
    Ok(ShiftDecomposition::from_terms(
        exact,
        delta_schwarzschild_ground(p.r_s(), earth.r_a, r_b),
        delta_rotation_ground(earth.r_a, omega),
        r_b - earth.r_a,
        Scheme::GroundToSat,
    ))
}

/// Decomposition for an orbit at `r_c` (direction `eta`) sending to a higher
/// orbit at `r_b` (direction `eps`).
pub fn decompose_sats(
    p: &SpacetimeParams,
    r_c: f64,
    r_b: f64,
    eta: Direction,
    eps: Direction,
) -> Result<ShiftDecomposition> {
    if !(r_b > r_c) {
        return Err(Error::domain("r_B", format!("must exceed r_C = {r_c} m, got {r_b}")));
    }
    let s = LinkScenario::sat_to_sat(
        *p,
        Worldline::circular_orbit(r_c, eta),
        Worldline::circular_orbit(r_b, eps),
    )?;
    let exact = shift::shift_sat_to_sat(&s)?.delta;
    Ok(ShiftDecomposition::from_terms(
        exact,
        delta_schwarzschild_sats(p.r_s(), r_c, r_b),
        delta_rotation_sats(p.r_s(), p.a(), r_c, r_b),
        r_b - r_c,
        Scheme::SatToSat,
    ))
}

fn check_delta_delta(delta_delta: f64) -> Result<()> {
    if delta_delta.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("delta_delta", format!("must be finite, got {delta_delta}")))
    }
}

/// `|Delta r_S / r_S| = |Delta delta / delta_S|`.
///
/// Refused when `|delta_S| < 10 |delta_c|`: there the residual is no longer
/// negligible against the leading term.
pub fn error_schwarzschild_radius(dec: &ShiftDecomposition, delta_delta: f64) -> Result<ParameterError> {
    check_delta_delta(delta_delta)?;
    let leading = dec.delta_s.abs();
    let residual = dec.delta_c.abs();
    if leading.is_zero() || leading < residual * 10.0 {
        return Err(Error::HigherOrderRegime {
            term: "delta_S",
            leading: leading.to_f64(),
            residual: residual.to_f64(),
        });
    }
    Ok(ParameterError {
        target: Target::SchwarzschildRadius,
        relative_error: (Dd::from_f64(delta_delta) / leading).abs().to_f64(),
    })
}

fn rotation_error(dec: &ShiftDecomposition, delta_delta: f64, target: Target) -> Result<ParameterError> {
    check_delta_delta(delta_delta)?;
    if dec.delta_rot.is_zero() {
        return Err(Error::domain("delta_rot", "rotation term vanishes"));
    }
    Ok(ParameterError {
        target,
        relative_error: (Dd::from_f64(delta_delta) / (dec.delta_rot * 2.0)).abs().to_f64(),
    })
}

/// `|Delta omega_A / omega_A| = |Delta delta / (2 delta_rot)|`.
pub fn error_angular_velocity(dec: &ShiftDecomposition, delta_delta: f64) -> Result<ParameterError> {
    rotation_error(dec, delta_delta, Target::EquatorialAngularVelocity)
}

/// `|Delta a / a| = |Delta delta_s / (2 delta_s,rot)|`; only the satellite
/// rotation term depends on `a` at leading order.
pub fn error_kerr_parameter(dec: &ShiftDecomposition, delta_delta: f64) -> Result<ParameterError> {
    if dec.scheme != Scheme::SatToSat {
        return Err(Error::domain("scheme", "the ground rotation term does not depend on a"));
    }
    rotation_error(dec, delta_delta, Target::KerrParameter)
}
