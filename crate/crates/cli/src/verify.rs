//! Self-checks against frozen values, invariants and the independent oracles.

use std::time::Instant;

use kerr_qlink::geometry::{self, Direction, Worldline};
use kerr_qlink::metrology::{self, MetrologyConfig};
use kerr_qlink::numeric::{BigReal, Dd};
use kerr_qlink::oracle::{self, CancelToken, Expr, SeriesParam};
use kerr_qlink::perturb;
use kerr_qlink::shift::{self, LinkScenario};
use kerr_qlink::units::{self, EarthModel, PhysicalConstants, SpacetimeParams};
use kerr_qlink::wavepacket::{self, GaussianWavepacket};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const K: PhysicalConstants = PhysicalConstants::DEFAULT;
const E: EarthModel = EarthModel::EARTH;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Fast,
    Full,
}

/// Deliberate defects for exercising the checks themselves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    FlipDeltaSSign,
}

impl std::str::FromStr for Fault {
    type Err = String;

    fn from_str(s: &str) -> Result<Fault, String> {
        match s {
            "flip-delta-s-sign" => Ok(Fault::FlipDeltaSSign),
            _ => Err(format!("unknown fault `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

struct Run {
    faults: Vec<Fault>,
    checks: Vec<Check>,
}

impl Run {
    fn push(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail,
        });
    }

    fn at_most(&mut self, name: &str, value: f64, limit: f64) {
        self.push(name, value.abs() <= limit, format!("{value:.3e} <= {limit:.0e}"));
    }

    fn near(&mut self, name: &str, value: f64, target: f64, rel: f64) {
        let dev = (value - target) / target.abs();
        self.push(
            name,
            dev.abs() <= rel,
            format!("{value:.6e} vs {target:.6e} (relative deviation {dev:+.2e}, allowed {rel:e})"),
        );
    }

    fn failed(&mut self, name: &str, e: kerr_qlink::Error) {
        self.push(name, false, format!("error: {e}"));
    }

    /// The leading ground-link term as the checks see it.
    fn delta_s_ground(&self, r_s: Dd, r_a: f64, r_b: f64) -> Dd {
        let d = perturb::delta_schwarzschild_ground(r_s, r_a, r_b);
        if self.faults.contains(&Fault::FlipDeltaSSign) {
            -d
        } else {
            d
        }
    }
}

fn earth() -> SpacetimeParams {
    E.spacetime(&K).expect("Earth model")
}

fn ground_link(p: SpacetimeParams, r_a: f64, omega: Dd, r_b: f64, dir: Direction) -> kerr_qlink::Result<LinkScenario> {
    LinkScenario::ground_to_sat(p, Worldline::ground_station(r_a, omega), Worldline::circular_orbit(r_b, dir))
}

fn earth_link(r_b: f64) -> kerr_qlink::Result<LinkScenario> {
    ground_link(earth(), E.r_a, E.omega_geom(&K), r_b, Direction::Prograde)
}

fn sat_link(p: SpacetimeParams, r_c: f64, eta: Direction, r_b: f64, eps: Direction) -> kerr_qlink::Result<LinkScenario> {
    LinkScenario::sat_to_sat(p, Worldline::circular_orbit(r_c, eta), Worldline::circular_orbit(r_b, eps))
}

fn presets() -> kerr_qlink::Result<Vec<LinkScenario>> {
    Ok(vec![
        earth_link(E.leo_radius())?,
        earth_link(E.geo_radius())?,
        sat_link(earth(), E.leo_radius(), Direction::Prograde, E.geo_radius(), Direction::Prograde)?,
    ])
}

fn sig3(x: f64) -> f64 {
    let e = x.abs().log10().floor();
    (x / 10f64.powf(e - 2.0)).round() * 10f64.powf(e - 2.0)
}

/// Runs the checks for `level`; `digits` sets the oracle precision (at least 50).
pub fn run_verify(level: Level, digits: u32, faults: &[Fault]) -> Vec<Check> {
    let mut run = Run {
        faults: faults.to_vec(),
        checks: Vec::new(),
    };
    fast_checks(&mut run, digits.max(50));
    if level == Level::Full {
        full_checks(&mut run, digits.max(50));
    }
    run.checks
}

fn fast_checks(run: &mut Run, digits: u32) {
    let t = CancelToken::new();
    let p = earth();

    match (
        units::dimensionless_params(&E, E.leo_radius(), &K),
        units::dimensionless_params(&E, E.geo_radius(), &K),
    ) {
        (Ok(leo), Ok(geo)) => {
            let rows = [
                (leo.m_over_ra, 6.95e-10),
                (leo.m_over_rb, 5.29e-10),
                (geo.m_over_rb, 1.05e-10),
                (leo.a_over_ra, 5.11e-7),
                (leo.a_over_rb, 3.89e-7),
                (geo.a_over_rb, 7.73e-8),
                (leo.ra_omega_a, 1.55e-6),
            ];
            let bad: Vec<String> = rows
                .iter()
                .filter(|(v, target)| (sig3(*v) / target - 1.0).abs() > 1e-9)
                .map(|(v, target)| format!("{v:.3e} != {target:.2e}"))
                .collect();
            run.push("parameter table to 3 figures", bad.is_empty(), format!("{} rows, mismatches {bad:?}", rows.len()));
        }
        (Err(e), _) | (_, Err(e)) => {
            run.failed("parameter table to 3 figures", e);
        }
    }

    let strong = SpacetimeParams::new(Dd::ONE, Dd::from_f64(0.5)).expect("strong field");
    let mut worst: f64 = 0.0;
    for i in 0..500 {
        let x = i as f64 / 499.0;
        for (q, r) in [(p, E.r_a * (1.0 + 9.0 * x)), (strong, 3.0 + 97.0 * x)] {
            if let (Ok(m), Ok(kappa)) = (geometry::metric_at(&q, r), geometry::kappa(&q, r)) {
                worst = worst.max((kappa * (Dd::ONE - m.g_tt_dev) - m.delta).to_f64().abs());
            } else {
                worst = f64::INFINITY;
            }
        }
    }
    run.at_most("null identity", worst, 1e-30);

    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let r = E.r_a * (1.0 + 9.0 * i as f64 / 49.0);
        let Ok(metric) = geometry::metric_at(&p, r) else {
            worst = f64::INFINITY;
            continue;
        };
        for w in [
            Worldline::ground_station(r, E.omega_geom(&K)),
            Worldline::circular_orbit(r, Direction::Prograde),
            Worldline::circular_orbit(r, Direction::Retrograde),
        ] {
            match geometry::observer_velocity(&p, &w) {
                Ok(u) => worst = worst.max((geometry::contract(&metric, &u, &u) + 1.0).to_f64().abs()),
                Err(_) => worst = f64::INFINITY,
            }
        }
    }
    run.at_most("observer normalisation", worst, 1e-28);

    let name = "direction independence without rotation";
    match SpacetimeParams::schwarzschild(p.m()) {
        Ok(schw) => {
            let mut identical = true;
            for i in 0..50 {
                let r_b = E.r_a * (1.01 + 0.18 * i as f64);
                let pro = ground_link(schw, E.r_a, Dd::ZERO, r_b, Direction::Prograde).and_then(|s| shift::shift(&s));
                let retro = ground_link(schw, E.r_a, Dd::ZERO, r_b, Direction::Retrograde).and_then(|s| shift::shift(&s));
                let closed = shift::shift_schwarzschild(p.m(), E.r_a, r_b);
                identical &= match (pro, retro, closed) {
                    (Ok(a), Ok(b), Ok(c)) => a.delta.to_bits() == b.delta.to_bits() && a.delta.to_bits() == c.delta.to_bits(),
                    _ => false,
                };
            }
            run.push(name, identical, format!("bit-identical = {identical}"));
        }
        Err(e) => {
            run.failed(name, e);
        }
    }

    match shift::shift_schwarzschild(p.m(), E.r_a, 1.5 * E.r_a) {
        Ok(r) => run.at_most("zero shift at 1.5 r_A without rotation", r.delta.to_f64(), 1e-18),
        Err(e) => {
            run.failed("zero shift at 1.5 r_A without rotation", e);
        }
    }

    let name = "closed form vs contraction";
    match presets() {
        Ok(links) => {
            let mut worst: f64 = 0.0;
            for s in &links {
                match (shift::shift(s), shift::shift_via_contraction(s)) {
                    (Ok(a), Ok(b)) => worst = worst.max(((b.f - a.f) / a.f).to_f64().abs()),
                    _ => worst = f64::INFINITY,
                }
            }
            run.at_most(name, worst, 1e-24);
        }
        Err(e) => {
            run.failed(name, e);
        }
    }

    let name = "flat space gives f = 1";
    let flat = ground_link(SpacetimeParams::minkowski(), E.r_a, Dd::ZERO, E.geo_radius(), Direction::Prograde)
        .and_then(|s| shift::shift(&s));
    match flat {
        Ok(r) => run.at_most(name, r.delta.to_f64(), 1e-32),
        Err(e) => {
            run.failed(name, e);
        }
    }

    let name = "identical orbits give f = 1";
    let same = sat_link(p, E.leo_radius(), Direction::Prograde, E.leo_radius(), Direction::Prograde)
        .and_then(|s| shift::shift(&s));
    match same {
        Ok(r) => run.at_most(name, r.delta.to_f64(), 1e-32),
        Err(e) => {
            run.failed(name, e);
        }
    }

    let name = "decomposition sums to the exact shift";
    let decs = [
        perturb::decompose_ground(&E, E.leo_radius(), Direction::Prograde, &K),
        perturb::decompose_ground(&E, E.geo_radius(), Direction::Prograde, &K),
        perturb::decompose_sats(&p, E.leo_radius(), E.geo_radius(), Direction::Prograde, Direction::Prograde),
    ];
    let mut worst: f64 = 0.0;
    for d in &decs {
        match d {
            Ok(d) => worst = worst.max((d.delta_s + d.delta_rot + d.delta_c - d.delta_exact).to_f64().abs()),
            Err(_) => worst = f64::INFINITY,
        }
    }
    run.at_most(name, worst, 1e-28);

    // delta_S is positive below 1.5 r_A and negative above
    let leo = run.delta_s_ground(p.r_s(), E.r_a, E.leo_radius()).to_f64();
    let geo = run.delta_s_ground(p.r_s(), E.r_a, E.geo_radius()).to_f64();
    let at = run.delta_s_ground(p.r_s(), E.r_a, 1.5 * E.r_a).to_f64();
    run.push(
        "leading Schwarzschild term signs",
        leo > 0.0 && geo < 0.0 && at.abs() < 1e-25,
        format!("LEO {leo:.3e}, GEO {geo:.3e}, 1.5 r_A {at:.1e}"),
    );

    let cfg = MetrologyConfig::default();
    match metrology::qfi_numeric(&cfg) {
        Ok(h) => run.near("QFI closed form vs fidelity curvature", h, metrology::qfi(&cfg), 1e-6),
        Err(e) => {
            run.failed("QFI closed form vs fidelity curvature", e);
        }
    }

    let name = "Cramer-Rao scales as N^-1/2";
    let h = metrology::qfi(&cfg);
    match (metrology::cramer_rao(h, 1e4), metrology::cramer_rao(h, 1e10)) {
        (Ok(a), Ok(b)) => run.near(name, a / b, 1e3, 1e-12),
        (Err(e), _) | (_, Err(e)) => {
            run.failed(name, e);
        }
    }

    let name = "overlap closed forms agree";
    let sent = GaussianWavepacket::new(7e14, 1e6).expect("packet");
    let mut worst: f64 = 0.0;
    let mut unit = false;
    for delta in [0.0, 1e-12, -1e-10, 1e-8] {
        let a = wavepacket::overlap_analytic(&sent, Dd::from_f64(delta));
        let b = wavepacket::propagate(&sent, Dd::ONE + Dd::from_f64(delta))
            .map(|recv| wavepacket::overlap_closed_form(&recv, &sent));
        match (a, b) {
            (Ok(a), Ok(b)) => {
                if delta == 0.0 {
                    unit = a.theta == 1.0;
                }
                worst = worst.max((a.theta - b.theta).abs());
            }
            _ => worst = f64::INFINITY,
        }
    }
    run.push(name, unit && worst <= 1e-12, format!("Theta(0) = 1: {unit}, worst {worst:.1e} <= 1e-12"));

    match sent.norm_numeric() {
        Ok(n) => run.at_most("wavepacket normalisation", n - 1.0, 1e-12),
        Err(e) => {
            run.failed("wavepacket normalisation", e);
        }
    }

    let name = "pipeline vs oracle on presets";
    match presets() {
        Ok(links) => {
            let worst = oracle_worst(&links, digits, &t);
            run.at_most(name, worst, 1e-28);
        }
        Err(e) => {
            run.failed(name, e);
        }
    }

    let name = "zero-shift orbit between LEO and 1.5 r_A";
    match earth_link(E.leo_radius()).and_then(|s| shift::find_zero_shift_orbit(&s, E.leo_radius(), E.geo_radius())) {
        Ok(r) => run.push(
            name,
            r > E.leo_radius() && r < 1.5 * E.r_a,
            format!("r* = {r:.6e} m = {:.12} r_A", r / E.r_a),
        ),
        Err(e) => {
            run.failed(name, e);
        }
    }

    qber_overlap(run);
}

fn oracle_worst(links: &[LinkScenario], digits: u32, t: &CancelToken) -> f64 {
    let mut worst: f64 = 0.0;
    for s in links {
        let exact = oracle::eval_delta_exact(&Expr::from_scenario(s), digits, t);
        match (shift::shift(s), exact) {
            (Ok(r), Ok(x)) => worst = worst.max((BigReal::from_dd(r.delta, digits) - x).abs().to_f64()),
            _ => worst = f64::INFINITY,
        }
    }
    worst
}

fn qber_overlap(run: &mut Run) {
    let name = "QBER/overlap consistency";
    let cfg = MetrologyConfig::default();
    let sent = GaussianWavepacket::new(cfg.omega1, cfg.sigma).expect("packet");
    let delta = 1e-10;
    match (
        wavepacket::overlap_analytic(&sent, Dd::from_f64(delta)),
        metrology::qber(delta, &cfg),
    ) {
        (Ok(o), Ok(q)) => run.near(name, o.infidelity, 2.0 * q, 0.01),
        (Err(e), _) | (_, Err(e)) => {
            run.failed(name, e);
        }
    }
}

fn full_checks(run: &mut Run, digits: u32) {
    let t = CancelToken::new();
    let p = earth();

    let name = "pipeline vs oracle on 100 random links";
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_2024);
    let mut links = Vec::new();
    let mut build_error = None;
    for _ in 0..100 {
        let mut jitter = || rng.gen_range(0.9..1.1);
        let mass = E.mass_kg * jitter();
        let r_a = E.r_a * jitter();
        let omega = E.omega_a * jitter();
        let a = E.a_m * jitter();
        let r_low = (r_a + units::LEO_ALTITUDE_M) * jitter();
        let r_high = (r_a + units::GEO_ALTITUDE_M) * jitter();
        let dir = |b: bool| if b { Direction::Prograde } else { Direction::Retrograde };
        let (d1, d2, which) = (dir(rng.gen()), dir(rng.gen()), rng.gen_range(0..3));
        let link = units::geometric_mass(mass, &K)
            .and_then(|m| SpacetimeParams::new(m, Dd::from_f64(a)))
            .and_then(|q| match which {
                0 => ground_link(q, r_a, Dd::from_f64(omega) / K.c(), r_low, d1),
                1 => ground_link(q, r_a, Dd::from_f64(omega) / K.c(), r_high, d1),
                _ => sat_link(q, r_low, d1, r_high, d2),
            });
        match link {
            Ok(s) => links.push(s),
            Err(e) => build_error = Some(e),
        }
    }
    match build_error {
        Some(e) => {
            run.failed(name, e);
        }
        None => run.at_most(name, oracle_worst(&links, digits, &t), 1e-28),
    }

    let name = "oracle self-consistency";
    let hi_digits = digits + 30;
    match earth_link(E.leo_radius()) {
        Ok(s) => {
            let e = Expr::from_scenario(&s);
            match (
                oracle::eval_delta_exact(&e, digits, &t),
                oracle::eval_delta_exact(&e, hi_digits, &t),
            ) {
                (Ok(a), Ok(b)) => {
                    // absolute on delta: f carries `digits` digits, delta = f - 1 fewer
                    let dev = (a.with_digits(hi_digits) - b).abs().to_f64();
                    let limit = 10f64.powi(-(digits as i32) + 2);
                    run.push(name, dev <= limit, format!("{digits} vs {hi_digits} digits: {dev:.1e} <= {limit:.0e}"));
                }
                (Err(e), _) | (_, Err(e)) => {
                    run.failed(name, e);
                }
            }
        }
        Err(e) => {
            run.failed(name, e);
        }
    }

    let series_digits = digits.max(oracle::SERIES_MIN_DIGITS);
    for (label, r_b) in [("LEO", E.leo_radius()), ("GEO", E.geo_radius())] {
        let name = format!("series d delta / d r_S {label}");
        let base = match earth_link(r_b) {
            Ok(s) => Expr::from_scenario(&s),
            Err(e) => {
                run.failed(&name, e);
                continue;
            }
        };
        let analytic = (run.delta_s_ground(p.r_s(), E.r_a, r_b) / p.r_s()).to_f64();
        match oracle::extract_series_coefficient(SeriesParam::SchwarzschildRadius, 1, &base, series_digits, &t) {
            Ok(c) => run.near(&name, c.to_f64(), analytic, 1e-4),
            Err(e) => {
                run.failed(&name, e);
            }
        }
        let name = format!("series (1/2) d2 delta / d omega_A2 {label}");
        match oracle::extract_series_coefficient(SeriesParam::AngularVelocity, 2, &base, series_digits, &t) {
            Ok(c) => run.near(&name, c.to_f64(), -E.r_a * E.r_a / 2.0, 1e-4),
            Err(e) => {
                run.failed(&name, e);
            }
        }
    }

    for (label, r_b) in [("LEO", E.leo_radius()), ("GEO", E.geo_radius())] {
        let name = format!("geodesic vs closed form {label}");
        let m = p.m();
        match (
            oracle::integrate_schwarzschild_radial(m.to_f64(), E.r_a, r_b, 1e-13, &t),
            shift::shift_schwarzschild(m, E.r_a, r_b),
        ) {
            (Ok(g), Ok(c)) => {
                let err = ((g.f_numeric - c.f) / c.delta).to_f64().abs();
                let drift = g.trace.energy_drift();
                run.push(
                    &name,
                    err <= 1e-3 && drift <= 1e-13,
                    format!("|f_num - f_S| / |f_S - 1| = {err:.2e} <= 1e-3, E drift {drift:.1e} <= 1e-13"),
                );
            }
            (Err(e), _) | (_, Err(e)) => {
                run.failed(&name, e);
            }
        }
    }

    // delta minus the modelled leading terms, from the oracle
    let dec_links = [
        (
            "LEO",
            earth_link(E.leo_radius()),
            run.delta_s_ground(p.r_s(), E.r_a, E.leo_radius()),
            perturb::delta_rotation_ground(E.r_a, E.omega_geom(&K)),
        ),
        (
            "GEO",
            earth_link(E.geo_radius()),
            run.delta_s_ground(p.r_s(), E.r_a, E.geo_radius()),
            perturb::delta_rotation_ground(E.r_a, E.omega_geom(&K)),
        ),
        (
            "LEO->GEO",
            sat_link(p, E.leo_radius(), Direction::Prograde, E.geo_radius(), Direction::Prograde),
            perturb::delta_schwarzschild_sats(p.r_s(), E.leo_radius(), E.geo_radius()),
            perturb::delta_rotation_sats(p.r_s(), p.a(), E.leo_radius(), E.geo_radius()),
        ),
    ];
    let m = p.m();
    for (label, link, lead, rot) in dec_links {
        let name = format!("delta residual <= 1e-20 {label}");
        let exact = link.and_then(|s| oracle::eval_delta_exact(&Expr::from_scenario(&s), digits, &t));
        let exact = match exact {
            Ok(x) => x,
            Err(e) => {
                run.failed(&name, e);
                continue;
            }
        };
        let residual = exact - BigReal::from_dd(lead, digits) - BigReal::from_dd(rot, digits);
        let value = residual.to_f64();
        run.at_most(&name, value, 1e-20);

        // second-order Schwarzschild terms of sqrt((1 - 2u)/(1 - 3v))
        let pred = if label == "LEO->GEO" {
            let vb = m / E.geo_radius();
            let vc = m / E.leo_radius();
            (vb.sqr() - vc.sqr()) * 2.25 + (vb - vc).sqr() * 1.125
        } else {
            let u = m / E.r_a;
            let v = m / if label == "LEO" { E.leo_radius() } else { E.geo_radius() };
            -(u.sqr()) * 0.5 + v.sqr() * (27.0 / 8.0) - u * v * 1.5
        };
        run.at_most(
            &format!("delta residual matches second order {label}"),
            value - pred.to_f64(),
            1e-20,
        );
    }
}

pub struct Summary {
    pub total: usize,
    pub failed: Vec<String>,
    pub seconds: f64,
}

/// Runs and prints the checks, one line each.
pub fn run_and_print<W: std::io::Write>(level: Level, digits: u32, faults: &[Fault], out: &mut W) -> std::io::Result<Summary> {
    let start = Instant::now();
    let checks = run_verify(level, digits, faults);
    for c in &checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        writeln!(out, "[{tag}] {}: {}", c.name, c.detail)?;
    }
    let failed: Vec<String> = checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
    let seconds = start.elapsed().as_secs_f64();
    writeln!(out, "{} checks, {} failed, {seconds:.2} s", checks.len(), failed.len())?;
    Ok(Summary {
        total: checks.len(),
        failed,
        seconds,
    })
}
