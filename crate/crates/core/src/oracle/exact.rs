//! Direct evaluation of the closed forms in `BigReal`, with no cancellation
//! tricks: precision alone carries the small terms.

use crate::error::{Error, Result};
use crate::geometry::{Direction, Worldline};
use crate::numeric::{BigReal, Dd, MIN_DIGITS};
use crate::shift::LinkScenario;
use crate::units::SpacetimeParams;

use super::CancelToken;

const GUARD: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Expr {
    /// `f` for a ground station at `r_a` rotating at `omega_a` to an orbit at `r_b`.
    GroundShift {
        params: SpacetimeParams,
        r_a: f64,
        omega_a: Dd,
        r_b: f64,
        eps: Direction,
    },
    /// `f` for an orbit at `r_c` to an orbit at `r_b`.
    SatShift {
        params: SpacetimeParams,
        r_c: f64,
        eta: Direction,
        r_b: f64,
        eps: Direction,
    },
    SchwShift { m: Dd, r_a: f64, r_b: f64 },
    GammaA { params: SpacetimeParams, r: f64, omega: Dd },
    GammaB { params: SpacetimeParams, r: f64, direction: Direction },
    Kappa { params: SpacetimeParams, r: f64 },
}

impl Expr {
    pub fn from_scenario(s: &LinkScenario) -> Expr {
        let params = *s.params();
        match (*s.emitter(), *s.receiver()) {
            (Worldline::GroundStation { r, omega }, Worldline::CircularOrbit { r: r_b, direction }) => {
                Expr::GroundShift {
                    params,
                    r_a: r,
                    omega_a: omega,
                    r_b,
                    eps: direction,
                }
            }
            (
                Worldline::CircularOrbit { r: r_c, direction: eta },
                Worldline::CircularOrbit { r: r_b, direction: eps },
            ) => Expr::SatShift {
                params,
                r_c,
                eta,
                r_b,
                eps,
            },
            _ => unreachable!("scenarios always end on an orbit"),
        }
    }

    pub fn is_shift(&self) -> bool {
        matches!(self, Expr::GroundShift { .. } | Expr::SatShift { .. } | Expr::SchwShift { .. })
    }
}

/// Inputs of a shift expression converted exactly to `BigReal`.
#[derive(Debug, Clone)]
pub(crate) struct BigInputs {
    pub m: BigReal,
    pub a: BigReal,
    pub omega_a: BigReal,
    pub r_emit: BigReal,
    pub r_recv: BigReal,
    pub eta: i64,
    pub eps: i64,
    pub kind: ShiftKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ShiftKind {
    Ground,
    Sats,
    Schwarzschild,
}

fn sign(d: Direction) -> i64 {
    match d {
        Direction::Prograde => 1,
        Direction::Retrograde => -1,
    }
}

impl BigInputs {
    pub fn from_expr(expr: &Expr, digits: u32) -> Option<BigInputs> {
        let dd = |x: Dd| BigReal::from_dd(x, digits);
        let fl = |x: f64| BigReal::from_f64(x, digits);
        Some(match *expr {
            Expr::GroundShift { params, r_a, omega_a, r_b, eps } => BigInputs {
                m: dd(params.m()),
                a: dd(params.a()),
                omega_a: dd(omega_a),
                r_emit: fl(r_a),
                r_recv: fl(r_b),
                eta: 1,
                eps: sign(eps),
                kind: ShiftKind::Ground,
            },
            Expr::SatShift { params, r_c, eta, r_b, eps } => BigInputs {
                m: dd(params.m()),
                a: dd(params.a()),
                omega_a: BigReal::zero(digits),
                r_emit: fl(r_c),
                r_recv: fl(r_b),
                eta: sign(eta),
                eps: sign(eps),
                kind: ShiftKind::Sats,
            },
            Expr::SchwShift { m, r_a, r_b } => BigInputs {
                m: dd(m),
                a: BigReal::zero(digits),
                omega_a: BigReal::zero(digits),
                r_emit: fl(r_a),
                r_recv: fl(r_b),
                eta: 1,
                eps: 1,
                kind: ShiftKind::Schwarzschild,
            },
            _ => return None,
        })
    }
}

struct Ctx {
    d: u32,
}

impl Ctx {
    fn n(&self, v: i64) -> BigReal {
        BigReal::from_int(v, self.d)
    }

    fn sqrt(&self, x: &BigReal, factor: &'static str) -> Result<BigReal> {
        if x.is_negative() || x.is_zero() {
            return Err(Error::NegativeRoot {
                factor,
                value: x.to_f64(),
            });
        }
        Ok(x.sqrt().expect("positive argument"))
    }

    fn horizon(&self, m: &BigReal, r: &BigReal, what: &'static str) -> Result<BigReal> {
        let lapse = &self.n(1) - &(&(&self.n(2) * m) / r);
        if lapse.is_negative() || lapse.is_zero() {
            return Err(Error::domain(what, format!("must exceed 2M, got {}", r.to_f64())));
        }
        Ok(lapse)
    }

    /// `sqrt(M / r^3)`.
    fn omega_orbit(&self, m: &BigReal, r: &BigReal) -> BigReal {
        (m / &r.powi(3)).sqrt().expect("non-negative mass")
    }

    /// `1 - 3M/r + 2 s a omega`.
    fn orbit_norm(&self, m: &BigReal, a: &BigReal, r: &BigReal, s: i64) -> BigReal {
        let w = self.omega_orbit(m, r);
        &(&self.n(1) - &(&(&self.n(3) * m) / r)) + &(&(&self.n(2 * s) * a) * &w)
    }

    /// `1 + s a omega / (1 - 2M/r)`.
    fn doppler(&self, m: &BigReal, a: &BigReal, r: &BigReal, s: i64) -> Result<BigReal> {
        let lapse = self.horizon(m, r, "r")?;
        let w = self.omega_orbit(m, r);
        Ok(&self.n(1) + &(&(&(&self.n(s) * a) * &w) / &lapse))
    }

    /// `1 - (2M/r)(1 - a omega)^2 - (a^2 + r^2) omega^2`.
    fn station_norm(&self, m: &BigReal, a: &BigReal, r: &BigReal, w: &BigReal) -> BigReal {
        let two_m_r = &(&self.n(2) * m) / r;
        let drag = (&self.n(1) - &(a * w)).sqr();
        let spin = &(&a.sqr() + &r.sqr()) * &w.sqr();
        &(&self.n(1) - &(&two_m_r * &drag)) - &spin
    }

    fn shift(&self, x: &BigInputs) -> Result<BigReal> {
        let one = self.n(1);
        match x.kind {
            ShiftKind::Schwarzschild => {
                let num = self.horizon(&x.m, &x.r_emit, "r_A")?;
                let den = &one - &(&(&self.n(3) * &x.m) / &x.r_recv);
                self.sqrt(&(&num / &self.positive(den, "1 - 3M/r_B")?), "Schwarzschild ratio")
            }
            ShiftKind::Ground => {
                let lapse_a = self.horizon(&x.m, &x.r_emit, "r_A")?;
                let recv = self.doppler(&x.m, &x.a, &x.r_recv, x.eps)?;
                let two_m_r = &(&self.n(2) * &x.m) / &x.r_emit;
                let emit = &one + &(&(&(&two_m_r * &x.a) * &x.omega_a) / &lapse_a);
                let top = self.positive(self.station_norm(&x.m, &x.a, &x.r_emit, &x.omega_a), "station normalisation")?;
                let bottom = self.positive(self.orbit_norm(&x.m, &x.a, &x.r_recv, x.eps), "orbit normalisation")?;
                let root = self.sqrt(&(&top / &bottom), "normalisation ratio")?;
                Ok(&(&recv / &emit) * &root)
            }
            ShiftKind::Sats => {
                let recv = self.doppler(&x.m, &x.a, &x.r_recv, x.eps)?;
                let emit = self.doppler(&x.m, &x.a, &x.r_emit, x.eta)?;
                let top = self.positive(self.orbit_norm(&x.m, &x.a, &x.r_emit, x.eta), "emitter orbit normalisation")?;
                let bottom = self.positive(self.orbit_norm(&x.m, &x.a, &x.r_recv, x.eps), "receiver orbit normalisation")?;
                let root = self.sqrt(&(&top / &bottom), "normalisation ratio")?;
                Ok(&(&recv / &emit) * &root)
            }
        }
    }

    fn positive(&self, x: BigReal, factor: &'static str) -> Result<BigReal> {
        if x.is_negative() || x.is_zero() {
            Err(Error::NegativeRoot {
                factor,
                value: x.to_f64(),
            })
        } else {
            Ok(x)
        }
    }
}

/// Shift `f` from `BigReal` inputs at `digits + GUARD` working digits.
pub(crate) fn shift_from_inputs(x: &BigInputs, digits: u32) -> Result<BigReal> {
    let ctx = Ctx { d: digits + GUARD };
    let widened = BigInputs {
        m: x.m.with_digits(ctx.d),
        a: x.a.with_digits(ctx.d),
        omega_a: x.omega_a.with_digits(ctx.d),
        r_emit: x.r_emit.with_digits(ctx.d),
        r_recv: x.r_recv.with_digits(ctx.d),
        ..x.clone()
    };
    Ok(ctx.shift(&widened)?.with_digits(digits))
}

fn check_digits(digits: u32) -> Result<()> {
    if digits < MIN_DIGITS {
        Err(Error::domain("digits", format!("need at least {MIN_DIGITS}, got {digits}")))
    } else {
        Ok(())
    }
}

/// Value of `expr` to `digits` significant digits.
pub fn eval_exact(expr: &Expr, digits: u32, cancel: &CancelToken) -> Result<BigReal> {
    check_digits(digits)?;
    cancel.check()?;
    let ctx = Ctx { d: digits + GUARD };
    let dd = |x: Dd| BigReal::from_dd(x, ctx.d);
    let fl = |x: f64| BigReal::from_f64(x, ctx.d);
    let value = match *expr {
        Expr::GroundShift { .. } | Expr::SatShift { .. } | Expr::SchwShift { .. } => {
            let inputs = BigInputs::from_expr(expr, ctx.d).expect("shift expression");
            ctx.shift(&inputs)?
        }
        Expr::GammaA { params, r, omega } => {
            let arg = ctx.positive(
                ctx.station_norm(&dd(params.m()), &dd(params.a()), &fl(r), &dd(omega)),
                "station normalisation",
            )?;
            &ctx.n(1) / &ctx.sqrt(&arg, "station normalisation")?
        }
        Expr::GammaB { params, r, direction } => {
            let m = dd(params.m());
            ctx.horizon(&m, &fl(r), "r")?;
            let arg = ctx.positive(
                ctx.orbit_norm(&m, &dd(params.a()), &fl(r), sign(direction)),
                "orbit normalisation",
            )?;
            &ctx.n(1) / &ctx.sqrt(&arg, "orbit normalisation")?
        }
        Expr::Kappa { params, r } => {
            let (m, a, r) = (dd(params.m()), dd(params.a()), fl(r));
            let lapse = ctx.horizon(&m, &r, "r")?;
            let a2 = a.sqr();
            let r2 = r.sqr();
            let first = &(&a2 / &r2) * &(&ctx.n(1) + &(&(&ctx.n(2) * &m) / &r));
            let second = &(&(&ctx.n(4) * &m.sqr()) * &a2) / &(&r2.sqr() * &lapse);
            &(&ctx.n(1) + &first) + &second
        }
    };
    Ok(value.with_digits(digits))
}

/// `f - 1` for a shift expression.
pub fn eval_delta_exact(expr: &Expr, digits: u32, cancel: &CancelToken) -> Result<BigReal> {
    if !expr.is_shift() {
        return Err(Error::domain("expr", "delta is defined for shift expressions only"));
    }
    let f = eval_exact(expr, digits, cancel)?;
    Ok((&f - &BigReal::from_int(1, digits)).with_digits(digits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry;
    use crate::shift::{self, LinkScenario};
    use crate::units::{EarthModel, PhysicalConstants};

    const K: PhysicalConstants = PhysicalConstants::DEFAULT;
    const E: EarthModel = EarthModel::EARTH;

    fn leo_expr() -> Expr {
        Expr::GroundShift {
            params: E.spacetime(&K).unwrap(),
            r_a: E.r_a,
            omega_a: E.omega_geom(&K),
            r_b: E.leo_radius(),
            eps: Direction::Prograde,
        }
    }

    fn diff(a: &BigReal, b: &BigReal) -> f64 {
        (a - b).abs().to_f64()
    }

    #[test]
    fn leo_delta_matches_pipeline() {
        let t = CancelToken::new();
        let oracle = eval_delta_exact(&leo_expr(), 50, &t).unwrap();
        let p = E.spacetime(&K).unwrap();
        let s = LinkScenario::ground_to_sat(
            p,
            Worldline::ground_station(E.r_a, E.omega_geom(&K)),
            Worldline::circular_orbit(E.leo_radius(), Direction::Prograde),
        )
        .unwrap();
        let fast = shift::shift(&s).unwrap().delta;
        assert!(diff(&BigReal::from_dd(fast, 50), &oracle) <= 1e-28);
        assert_eq!(Expr::from_scenario(&s), leo_expr());
    }

    #[test]
    fn self_consistent_across_precisions() {
        let t = CancelToken::new();
        for expr in [
            leo_expr(),
            Expr::SchwShift { m: Dd::from_f64(4.4e-3), r_a: E.r_a, r_b: 2.0 * E.r_a },
        ] {
            let lo = eval_exact(&expr, 50, &t).unwrap();
            let hi = eval_exact(&expr, 80, &t).unwrap();
            // 40 significant digits of f ~ 1
            assert!(diff(&lo, &hi) < 1e-45);
        }
    }

    #[test]
    fn kappa_null_identity() {
        let t = CancelToken::new();
        let p = SpacetimeParams::new(Dd::from_f64(0.3), Dd::from_f64(0.2)).unwrap();
        for r in [1.0, 2.5, 17.0, 1e4] {
            let kappa = eval_exact(&Expr::Kappa { params: p, r }, 60, &t).unwrap();
            let m = BigReal::from_f64(0.3, 80);
            let a = BigReal::from_f64(0.2, 80);
            let rr = BigReal::from_f64(r, 80);
            let one = BigReal::from_int(1, 80);
            let two = BigReal::from_int(2, 80);
            let lapse = &one - &(&(&two * &m) / &rr);
            let delta = &(&one - &(&(&two * &m) / &rr)) + &(&a.sqr() / &rr.sqr());
            let residual = &(&kappa.with_digits(80) * &lapse) - &delta;
            assert!(residual.abs().to_f64() < 1e-55, "r = {r}");
        }
    }

    #[test]
    fn flat_space_is_unit() {
        let t = CancelToken::new();
        let expr = Expr::GroundShift {
            params: SpacetimeParams::minkowski(),
            r_a: 6e6,
            omega_a: Dd::ZERO,
            r_b: 8e6,
            eps: Direction::Prograde,
        };
        assert!(eval_delta_exact(&expr, 50, &t).unwrap().is_zero());
    }

    #[test]
    fn gammas_match_geometry() {
        let t = CancelToken::new();
        let p = E.spacetime(&K).unwrap();
        let ga = eval_exact(&Expr::GammaA { params: p, r: E.r_a, omega: E.omega_geom(&K) }, 50, &t).unwrap();
        let fast = geometry::gamma_ground(&p, E.r_a, E.omega_geom(&K)).unwrap();
        assert!(diff(&ga, &BigReal::from_dd(fast, 50)) < 1e-30);
        for d in [Direction::Prograde, Direction::Retrograde] {
            let gb = eval_exact(&Expr::GammaB { params: p, r: E.geo_radius(), direction: d }, 50, &t).unwrap();
            let fast = geometry::gamma_orbit(&p, E.geo_radius(), d).unwrap();
            assert!(diff(&gb, &BigReal::from_dd(fast, 50)) < 1e-30);
        }
    }

    #[test]
    fn rejects_bad_requests() {
        let t = CancelToken::new();
        assert!(eval_exact(&leo_expr(), 40, &t).is_err());
        let p = SpacetimeParams::schwarzschild(Dd::ONE).unwrap();
        assert!(eval_exact(&Expr::Kappa { params: p, r: 1.5 }, 50, &t).is_err());
        assert!(eval_delta_exact(&Expr::Kappa { params: p, r: 5.0 }, 50, &t).is_err());
        t.cancel();
        assert_eq!(eval_exact(&leo_expr(), 50, &t), Err(Error::Cancelled));
    }
}
