//! Single-scenario report: shift, decomposition, overlap and bounds.

use std::fmt::Write as _;

use kerr_qlink::metrology::{self, Regime};
use kerr_qlink::numeric::{BigReal, Dd};
use kerr_qlink::oracle::{self, CancelToken, Expr};
use kerr_qlink::perturb::{self, ShiftDecomposition};
use kerr_qlink::shift::{self, Method, Scheme};
use kerr_qlink::units;
use kerr_qlink::wavepacket;
use serde::Serialize;

use crate::config::{direction_name, ScenarioConfig};

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct DdValue {
    pub hi: f64,
    pub lo: f64,
    /// 32 significant digits.
    pub decimal: String,
}

impl From<Dd> for DdValue {
    fn from(x: Dd) -> DdValue {
        DdValue {
            hi: x.hi,
            lo: x.lo,
            decimal: format!("{x}"),
        }
    }
}

/// A derived number, or the reason it was refused.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Outcome {
    pub value: Option<f64>,
    pub note: Option<String>,
}

impl Outcome {
    fn from_result(r: kerr_qlink::Result<f64>) -> Outcome {
        match r {
            Ok(v) => Outcome { value: Some(v), note: None },
            Err(e) => Outcome {
                value: None,
                note: Some(e.to_string()),
            },
        }
    }

    fn refused(note: impl Into<String>) -> Outcome {
        Outcome {
            value: None,
            note: Some(note.into()),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Param {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Decomposition {
    pub labels: [String; 3],
    pub leading: DdValue,
    pub rotation: DdValue,
    pub residual: DdValue,
    pub separation_m: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct OracleCheck {
    pub digits: u32,
    pub delta: String,
    pub abs_deviation: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Report {
    pub scheme: String,
    pub emitter: String,
    pub emitter_radius_m: f64,
    pub receiver: String,
    pub receiver_radius_m: f64,
    pub parameters: Vec<Param>,
    pub method: String,
    pub f: DdValue,
    pub delta: DdValue,
    pub oracle: Option<OracleCheck>,
    pub decomposition: Option<Decomposition>,
    pub decomposition_note: Option<String>,
    pub regime_valid: bool,
    pub regime_note: Option<String>,
    pub middle_term: f64,
    pub theta: f64,
    pub fidelity: f64,
    pub infidelity: f64,
    pub qfi: f64,
    pub delta_delta_min: Outcome,
    pub rel_bound_r_s: Outcome,
    pub rel_bound_omega_a: Outcome,
    pub rel_bound_kerr_parameter: Outcome,
    pub orders_below_state_of_art: Option<i32>,
    pub qber: Outcome,
    pub qber_leading: Outcome,
}

/// Builds the report. `oracle_digits` adds an extended-precision check of
/// `delta`; sweeps leave it off.
pub fn run_report(cfg: &ScenarioConfig, oracle_digits: Option<u32>) -> kerr_qlink::Result<Report> {
    let k = cfg.constants();
    let scenario = cfg.scenario()?;
    let result = shift::shift(&scenario)?;
    let met = cfg.metrology();
    met.validate()?;

    let oracle = match oracle_digits {
        Some(digits) => {
            let exact = oracle::eval_delta_exact(&Expr::from_scenario(&scenario), digits, &CancelToken::new())?;
            let dev = (BigReal::from_dd(result.delta, digits) - exact.clone()).abs().to_f64();
            Some(OracleCheck {
                digits,
                delta: exact.to_sci_string(digits.min(40)),
                abs_deviation: dev,
            })
        }
        None => None,
    };

    let dec: kerr_qlink::Result<ShiftDecomposition> = match cfg.scheme {
        Scheme::GroundToSat => {
            perturb::decompose_ground(&cfg.planet, cfg.receiver_radius, cfg.receiver_direction, &k)
        }
        Scheme::SatToSat => perturb::decompose_sats(
            scenario.params(),
            cfg.r_emit(),
            cfg.receiver_radius,
            cfg.emitter_direction,
            cfg.receiver_direction,
        ),
    };
    let labels = match cfg.scheme {
        Scheme::GroundToSat => ["delta_S", "delta_rot", "delta_c"],
        Scheme::SatToSat => ["delta_s,S", "delta_s,rot", "delta_s,c"],
    };

    let delta = result.delta.to_f64();
    let regime = metrology::regime_check(delta, &met);
    let packet = cfg.wavepacket()?;
    let overlap = wavepacket::overlap_analytic(&packet, result.delta)?;
    let h = metrology::qfi(&met);
    let delta_delta_min = Outcome::from_result(metrology::cramer_rao(h, met.n));

    let (decomposition, decomposition_note, bounds) = match &dec {
        Ok(d) => {
            let r_s = metrology::bound_schwarzschild_radius(&met, d).map(|b| b.relative_bound);
            let w = match cfg.scheme {
                Scheme::GroundToSat => metrology::bound_angular_velocity(&met, d).map(|b| b.relative_bound),
                Scheme::SatToSat => Err(kerr_qlink::Error::domain(
                    "omega_A",
                    "enters the ground-station link only",
                )),
            };
            let a = match metrology::cramer_rao(h, met.n) {
                Ok(dd) if regime.is_valid() => perturb::error_kerr_parameter(d, dd).map(|e| e.relative_error),
                Ok(_) => Err(kerr_qlink::Error::InvalidRegime("outside the small-shift regime".into())),
                Err(e) => Err(e),
            };
            let qber_leading = Outcome::from_result(metrology::qber(d.delta_s.to_f64(), &met));
            (
                Some(Decomposition {
                    labels: labels.map(str::to_string),
                    leading: d.delta_s.into(),
                    rotation: d.delta_rot.into(),
                    residual: d.delta_c.into(),
                    separation_m: d.separation,
                }),
                None,
                (
                    Outcome::from_result(r_s),
                    Outcome::from_result(w),
                    Outcome::from_result(a),
                    qber_leading,
                ),
            )
        }
        Err(e) => {
            let note = format!("decomposition unavailable: {e}");
            (
                None,
                Some(note.clone()),
                (
                    Outcome::refused(note.clone()),
                    Outcome::refused(note.clone()),
                    Outcome::refused(note.clone()),
                    Outcome::refused(note),
                ),
            )
        }
    };
    let (rel_bound_r_s, rel_bound_omega_a, rel_bound_kerr_parameter, qber_leading) = bounds;
    let orders = rel_bound_omega_a.value.map(metrology::orders_below_state_of_art);

    let parameters = dimensionless(cfg)?;
    let describe = |w: &kerr_qlink::geometry::Worldline, dir| {
        if w.is_orbit() {
            format!("circular orbit ({})", direction_name(dir))
        } else {
            "ground station".to_string()
        }
    };
    let (regime_valid, regime_note) = match regime {
        Regime::Valid => (true, None),
        Regime::Invalid(why) => (false, Some(why)),
    };
    Ok(Report {
        scheme: match cfg.scheme {
            Scheme::GroundToSat => "ground-to-sat",
            Scheme::SatToSat => "sat-to-sat",
        }
        .to_string(),
        emitter: describe(scenario.emitter(), cfg.emitter_direction),
        emitter_radius_m: cfg.r_emit(),
        receiver: describe(scenario.receiver(), cfg.receiver_direction),
        receiver_radius_m: cfg.receiver_radius,
        parameters,
        method: match result.method {
            Method::ClosedForm => "closed form",
            Method::Contraction => "contraction",
            Method::SchwarzschildLimit => "Schwarzschild limit",
        }
        .to_string(),
        f: result.f.into(),
        delta: result.delta.into(),
        oracle,
        decomposition,
        decomposition_note,
        regime_valid,
        regime_note,
        middle_term: met.middle_term(delta),
        theta: overlap.theta,
        fidelity: overlap.fidelity,
        infidelity: overlap.infidelity,
        qfi: h,
        delta_delta_min,
        rel_bound_r_s,
        rel_bound_omega_a,
        rel_bound_kerr_parameter,
        orders_below_state_of_art: orders,
        qber: Outcome::from_result(metrology::qber(delta, &met)),
        qber_leading,
    })
}

fn dimensionless(cfg: &ScenarioConfig) -> kerr_qlink::Result<Vec<Param>> {
    let k = cfg.constants();
    let d = units::dimensionless_params(&cfg.planet, cfg.receiver_radius, &k)?;
    let mut out = vec![
        ("M/r_A", d.m_over_ra),
        ("M/r_B", d.m_over_rb),
        ("a/r_A", d.a_over_ra),
        ("a/r_B", d.a_over_rb),
        ("r_A omega_A", d.ra_omega_a),
    ];
    if cfg.scheme == Scheme::SatToSat {
        let c = units::dimensionless_params(&cfg.planet, cfg.r_emit(), &k)?;
        out.push(("M/r_C", c.m_over_rb));
        out.push(("a/r_C", c.a_over_rb));
    }
    Ok(out
        .into_iter()
        .map(|(name, value)| Param {
            name: name.to_string(),
            value,
        })
        .collect())
}

fn outcome_text(o: &Outcome) -> String {
    match (&o.value, &o.note) {
        (Some(v), _) => format!("{v:.4e}"),
        (None, Some(n)) => format!("refused ({n})"),
        (None, None) => "n/a".to_string(),
    }
}

pub fn render_text(r: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "scheme      {}", r.scheme);
    let _ = writeln!(s, "emitter     {} at r = {:.6e} m", r.emitter, r.emitter_radius_m);
    let _ = writeln!(s, "receiver    {} at r = {:.6e} m", r.receiver, r.receiver_radius_m);
    let _ = writeln!(s);
    let _ = writeln!(s, "parameters (3 significant figures)");
    for p in &r.parameters {
        let _ = writeln!(s, "  {:<12} {:.2e}", p.name, p.value);
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "shift ({})", r.method);
    let _ = writeln!(s, "  f           {}", r.f.decimal);
    let _ = writeln!(s, "  delta       {:.6e}   [{}]", r.delta.hi, r.delta.decimal);
    if let Some(o) = &r.oracle {
        let _ = writeln!(
            s,
            "  oracle      {} ({} digits, |pipeline - oracle| = {:.1e})",
            o.delta, o.digits, o.abs_deviation
        );
    }
    let _ = writeln!(s);
    match &r.decomposition {
        Some(d) => {
            let _ = writeln!(s, "decomposition (L = {:.6e} m)", d.separation_m);
            for (label, v) in d.labels.iter().zip([&d.leading, &d.rotation, &d.residual]) {
                let _ = writeln!(s, "  {:<12}{:>14.6e}   [{}]", label, v.hi, v.decimal);
            }
            let _ = writeln!(
                s,
                "  terms carried in double-double; bracketed values give 32 significant digits"
            );
        }
        None => {
            let _ = writeln!(s, "decomposition: {}", r.decomposition_note.as_deref().unwrap_or("n/a"));
        }
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "wavepacket overlap");
    let _ = writeln!(s, "  Theta       {:.15}", r.theta);
    let _ = writeln!(s, "  1 - Theta^2 {:.6e}", r.infidelity);
    let _ = writeln!(s);
    let regime = if r.regime_valid {
        "valid".to_string()
    } else {
        format!("invalid ({})", r.regime_note.as_deref().unwrap_or(""))
    };
    let _ = writeln!(s, "metrology (regime {regime}, middle term {:.3e})", r.middle_term);
    let _ = writeln!(s, "  H                 {:.6e}", r.qfi);
    let _ = writeln!(s, "  |Delta delta|     {}", outcome_text(&r.delta_delta_min));
    let _ = writeln!(s, "  Delta r_S / r_S   {}", outcome_text(&r.rel_bound_r_s));
    let _ = writeln!(s, "  Delta w_A / w_A   {}", outcome_text(&r.rel_bound_omega_a));
    if let Some(k) = r.orders_below_state_of_art {
        let _ = writeln!(s, "                    ({k} orders above the 1e-8 state of the art)");
    }
    let _ = writeln!(s, "  Delta a / a       {}", outcome_text(&r.rel_bound_kerr_parameter));
    let _ = writeln!(s, "  QBER              {}", outcome_text(&r.qber));
    let _ = writeln!(s, "  QBER (leading)    {}", outcome_text(&r.qber_leading));
    s
}
