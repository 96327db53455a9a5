//! Taylor coefficients `(1/n!) d^n delta / dp^n` of the exact shift, by
//! central differences in `BigReal` and Richardson extrapolation in `h^2`.

use crate::error::{Error, Result};
use crate::numeric::BigReal;

use super::exact::{shift_from_inputs, BigInputs, ShiftKind};
use super::{CancelToken, Expr};

pub const SERIES_MIN_DIGITS: u32 = 80;

const LEVELS: usize = 8;
const CONVERGED: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesParam {
    SchwarzschildRadius,
    AngularVelocity,
    KerrParameter,
}

#[derive(Debug, Clone)]
pub struct SeriesCoefficient {
    pub value: BigReal,
    /// Relative change between the last two diagonal Richardson entries.
    pub spread: f64,
    pub levels: usize,
}

impl SeriesCoefficient {
    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }
}

fn get(x: &BigInputs, param: SeriesParam) -> BigReal {
    match param {
        SeriesParam::SchwarzschildRadius => &x.m * &BigReal::from_int(2, x.m.digits()),
        SeriesParam::AngularVelocity => x.omega_a.clone(),
        SeriesParam::KerrParameter => x.a.clone(),
    }
}

fn set(x: &BigInputs, param: SeriesParam, v: BigReal) -> BigInputs {
    let mut y = x.clone();
    match param {
        SeriesParam::SchwarzschildRadius => y.m = &v / &BigReal::from_int(2, v.digits()),
        SeriesParam::AngularVelocity => y.omega_a = v,
        SeriesParam::KerrParameter => y.a = v,
    }
    y
}

/// Coefficient of `(p - p0)^order` in the expansion of `delta` about the
/// base point of a shift expression.
pub fn extract_series_coefficient(
    param: SeriesParam,
    order: u32,
    base: &Expr,
    digits: u32,
    cancel: &CancelToken,
) -> Result<SeriesCoefficient> {
    if digits < SERIES_MIN_DIGITS {
        return Err(Error::domain(
            "digits",
            format!("series extraction needs at least {SERIES_MIN_DIGITS}, got {digits}"),
        ));
    }
    if !(order == 1 || order == 2) {
        return Err(Error::domain("order", format!("must be 1 or 2, got {order}")));
    }
    let inputs = BigInputs::from_expr(base, digits)
        .ok_or_else(|| Error::domain("base", "series extraction needs a shift expression"))?;
    if param == SeriesParam::AngularVelocity && inputs.kind != ShiftKind::Ground {
        return Err(Error::domain("param", "omega_A enters the ground-station link only"));
    }
    let p0 = get(&inputs, param);
    if p0.is_zero() {
        return Err(Error::domain("base", "expansion point of the parameter must be non-zero"));
    }

    let d = |v: i64| BigReal::from_int(v, digits);
    let delta_at = |p: BigReal| -> Result<BigReal> {
        cancel.check()?;
        Ok(&shift_from_inputs(&set(&inputs, param, p), digits)? - &d(1))
    };
    let center = if order == 2 { Some(delta_at(p0.clone())?) } else { None };

    let mut h = &p0 / &d(100);
    let mut table: Vec<Vec<BigReal>> = Vec::with_capacity(LEVELS);
    for level in 0..LEVELS {
        let plus = delta_at(&p0 + &h)?;
        let minus = delta_at(&p0 - &h)?;
        let estimate = match &center {
            None => &(&plus - &minus) / &(&d(2) * &h),
            Some(c) => &(&(&plus - &(&d(2) * c)) + &minus) / &(&d(2) * &h.sqr()),
        };
        let mut row = vec![estimate];
        let mut factor = d(1);
        for j in 1..=level {
            factor = &factor * &d(4);
            let prev = &table[level - 1][j - 1];
            let next = &(&(&factor * &row[j - 1]) - prev) / &(&factor - &d(1));
            row.push(next);
        }
        if level > 0 {
            let last = &row[level];
            let before = &table[level - 1][level - 1];
            let scale = last.abs();
            let spread = if scale.is_zero() {
                (last - before).abs().to_f64()
            } else {
                (&(last - before) / &scale).abs().to_f64()
            };
            if spread < CONVERGED {
                return Ok(SeriesCoefficient {
                    value: last.clone(),
                    spread,
                    levels: level + 1,
                });
            }
        }
        table.push(row);
        h = &h / &d(2);
    }
    let last = &table[LEVELS - 1][LEVELS - 1];
    let before = &table[LEVELS - 2][LEVELS - 2];
    Err(Error::Numerical {
        what: "Richardson ladder",
        achieved: (&(last - before) / &last.abs()).abs().to_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Direction;
    use crate::numeric::Dd;
    use crate::perturb;
    use crate::units::{EarthModel, PhysicalConstants};

    const K: PhysicalConstants = PhysicalConstants::DEFAULT;
    const E: EarthModel = EarthModel::EARTH;

    fn ground(r_b: f64, omega: Dd) -> Expr {
        Expr::GroundShift {
            params: E.spacetime(&K).unwrap(),
            r_a: E.r_a,
            omega_a: omega,
            r_b,
            eps: Direction::Prograde,
        }
    }

    #[test]
    fn schwarzschild_radius_coefficient() {
        let t = CancelToken::new();
        let p = E.spacetime(&K).unwrap();
        for r_b in [E.leo_radius(), E.geo_radius()] {
            let c = extract_series_coefficient(SeriesParam::SchwarzschildRadius, 1, &ground(r_b, E.omega_geom(&K)), 80, &t)
                .unwrap();
            let expected = perturb::delta_schwarzschild_ground(p.r_s(), E.r_a, r_b) / p.r_s();
            assert!((c.to_f64() / expected.to_f64() - 1.0).abs() < 1e-4);
        }
    }

    #[test]
    fn angular_velocity_coefficient() {
        let t = CancelToken::new();
        let c = extract_series_coefficient(SeriesParam::AngularVelocity, 2, &ground(E.leo_radius(), E.omega_geom(&K)), 80, &t)
            .unwrap();
        let expected = -E.r_a * E.r_a / 2.0;
        assert!((c.to_f64() / expected - 1.0).abs() < 1e-4);
    }

    #[test]
    fn kerr_coefficient_for_static_station() {
        let t = CancelToken::new();
        let a = E.spacetime(&K).unwrap().a().to_f64();
        for r_b in [E.leo_radius(), E.geo_radius()] {
            let c = extract_series_coefficient(SeriesParam::KerrParameter, 1, &ground(r_b, Dd::ZERO), 80, &t).unwrap();
            assert!((c.to_f64() * a).abs() <= 1e-20);
        }
    }

    #[test]
    fn satellite_coefficients() {
        let t = CancelToken::new();
        let p = E.spacetime(&K).unwrap();
        let base = Expr::SatShift {
            params: p,
            r_c: E.leo_radius(),
            eta: Direction::Prograde,
            r_b: E.geo_radius(),
            eps: Direction::Prograde,
        };
        let c = extract_series_coefficient(SeriesParam::SchwarzschildRadius, 1, &base, 80, &t).unwrap();
        let expected = perturb::delta_schwarzschild_sats(p.r_s(), E.leo_radius(), E.geo_radius()) / p.r_s();
        assert!((c.to_f64() / expected.to_f64() - 1.0).abs() < 1e-4);
        let c2 = extract_series_coefficient(SeriesParam::KerrParameter, 2, &base, 80, &t).unwrap();
        let expected = perturb::delta_rotation_sats(p.r_s(), p.a(), E.leo_radius(), E.geo_radius()) / p.a().sqr();
        assert!((c2.to_f64() / expected.to_f64() - 1.0).abs() < 1e-4);
        assert!(extract_series_coefficient(SeriesParam::AngularVelocity, 2, &base, 80, &t).is_err());
    }

    #[test]
    fn wrong_sign_is_detected() {
        let t = CancelToken::new();
        let p = E.spacetime(&K).unwrap();
        let c = extract_series_coefficient(SeriesParam::SchwarzschildRadius, 1, &ground(E.leo_radius(), E.omega_geom(&K)), 80, &t)
            .unwrap();
        let flipped = -perturb::delta_schwarzschild_ground(p.r_s(), E.r_a, E.leo_radius()) / p.r_s();
        assert!((c.to_f64() / flipped.to_f64() - 1.0).abs() > 1.0);
    }

    #[test]
    fn rejects_bad_requests() {
        let t = CancelToken::new();
        let g = ground(E.leo_radius(), E.omega_geom(&K));
        assert!(extract_series_coefficient(SeriesParam::SchwarzschildRadius, 1, &g, 50, &t).is_err());
        assert!(extract_series_coefficient(SeriesParam::SchwarzschildRadius, 3, &g, 80, &t).is_err());
        assert!(extract_series_coefficient(SeriesParam::AngularVelocity, 1, &ground(E.leo_radius(), Dd::ZERO), 80, &t).is_err());
        t.cancel();
        assert!(matches!(
            extract_series_coefficient(SeriesParam::SchwarzschildRadius, 1, &g, 80, &t),
            Err(Error::Cancelled)
        ));
    }
}
