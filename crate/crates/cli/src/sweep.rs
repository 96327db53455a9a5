//! Parameter sweeps written as CSV, one row per point, computed in parallel.

use std::io::Write;
use std::str::FromStr;

use kerr_qlink::shift::Scheme;
use rayon::prelude::*;

use crate::config::ScenarioConfig;
use crate::error::CliError;
use crate::report::{run_report, Outcome, Report};

pub const THREADS_ENV: &str = "KERR_QLINK_THREADS";

pub const HEADER: [&str; 25] = [
    "index",
    "variable",
    "value",
    "r_emit_m",
    "r_recv_m",
    "f_hi",
    "f_lo",
    "delta_hi",
    "delta_lo",
    "delta_s_hi",
    "delta_s_lo",
    "delta_rot_hi",
    "delta_rot_lo",
    "delta_c_hi",
    "delta_c_lo",
    "theta",
    "infidelity",
    "qfi",
    "delta_delta_min",
    "rel_bound_r_s",
    "rel_bound_omega_a",
    "qber",
    "qber_leading",
    "regime_valid",
    "error",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    ReceiverRadius,
    EmitterRadius,
    Squeezing,
    Probes,
    Bandwidth,
}

impl SweepVar {
    pub fn name(self) -> &'static str {
        match self {
            SweepVar::ReceiverRadius => "r_B",
            SweepVar::EmitterRadius => "r_C",
            SweepVar::Squeezing => "s",
            SweepVar::Probes => "N",
            SweepVar::Bandwidth => "sigma",
        }
    }

    fn apply(self, cfg: &mut ScenarioConfig, v: f64) {
        match self {
            SweepVar::ReceiverRadius => cfg.receiver_radius = v,
            SweepVar::EmitterRadius => cfg.emitter_radius = Some(v),
            SweepVar::Squeezing => cfg.squeezing = v,
            SweepVar::Probes => cfg.probes = v,
            SweepVar::Bandwidth => cfg.bandwidth = v,
        }
    }
}

impl FromStr for SweepVar {
    type Err = String;

    fn from_str(s: &str) -> Result<SweepVar, String> {
        match s {
            "r_B" | "r_b" => Ok(SweepVar::ReceiverRadius),
            "r_C" | "r_c" => Ok(SweepVar::EmitterRadius),
            "s" => Ok(SweepVar::Squeezing),
            "N" | "n" => Ok(SweepVar::Probes),
            "sigma" => Ok(SweepVar::Bandwidth),
            _ => Err(format!("unknown sweep variable `{s}` (r_B, r_C, s, N, sigma)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

impl FromStr for Scale {
    type Err = String;

    fn from_str(s: &str) -> Result<Scale, String> {
        match s {
            "linear" | "lin" => Ok(Scale::Linear),
            "log" => Ok(Scale::Log),
            _ => Err(format!("unknown scale `{s}` (linear, log)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVar,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    pub scale: Scale,
}

impl SweepSpec {
    /// A single point needs `from == to`; otherwise `from < to` and at least
    /// two points.
    pub fn validate(&self, cfg: &ScenarioConfig) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Usage(m));
        if !(self.from.is_finite() && self.to.is_finite()) {
            return bad("sweep bounds must be finite".into());
        }
        match self.points {
            0 => return bad("points must be at least 1".into()),
            1 if self.from != self.to => return bad("a single-point sweep needs from == to".into()),
            1 => {}
            _ if !(self.from < self.to) => return bad(format!("need from < to, got {} and {}", self.from, self.to)),
            _ => {}
        }
        if self.scale == Scale::Log && !(self.from > 0.0) {
            return bad("log scale needs positive bounds".into());
        }
        if self.variable == SweepVar::EmitterRadius && cfg.scheme != Scheme::SatToSat {
            return bad("r_C is swept only in the sat-to-sat scheme".into());
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        if n == 1 {
            return vec![self.from];
        }
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    return self.to;
                }
                let t = i as f64 / (n - 1) as f64;
                match self.scale {
                    Scale::Linear => self.from + (self.to - self.from) * t,
                    Scale::Log => (self.from.ln() + (self.to.ln() - self.from.ln()) * t).exp(),
                }
            })
            .collect()
    }
}

/// Worker count: available parallelism, capped by `KERR_QLINK_THREADS`.
pub fn thread_count() -> usize {
    let avail = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    match std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        Some(cap) if cap > 0 => avail.min(cap),
        _ => avail,
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn outcome(o: &Outcome, errors: &mut Vec<String>, what: &str) -> String {
    match (o.value, &o.note) {
        (Some(v), _) => num(v),
        (None, Some(n)) => {
            errors.push(format!("{what}: {n}"));
            String::new()
        }
        (None, None) => String::new(),
    }
}

fn row(index: usize, spec: &SweepSpec, value: f64, cfg: &ScenarioConfig, r: Result<Report, String>) -> Vec<String> {
    let mut cells = vec![index.to_string(), spec.variable.name().to_string(), num(value)];
    let report = match r {
        Ok(rep) => rep,
        Err(e) => {
            cells.push(num(cfg.r_emit()));
            cells.push(num(cfg.receiver_radius));
            cells.resize(HEADER.len() - 1, String::new());
            cells.push(e);
            return cells;
        }
    };
    let mut errors = Vec::new();
    cells.push(num(report.emitter_radius_m));
    cells.push(num(report.receiver_radius_m));
    for v in [&report.f, &report.delta] {
        cells.push(num(v.hi));
        cells.push(num(v.lo));
    }
    match &report.decomposition {
        Some(d) => {
            for v in [&d.leading, &d.rotation, &d.residual] {
                cells.push(num(v.hi));
                cells.push(num(v.lo));
            }
        }
        None => {
            cells.extend(std::iter::repeat(String::new()).take(6));
            if let Some(n) = &report.decomposition_note {
                errors.push(n.clone());
            }
        }
    }
    cells.push(num(report.theta));
    cells.push(num(report.infidelity));
    cells.push(num(report.qfi));
    cells.push(outcome(&report.delta_delta_min, &mut errors, "delta_delta_min"));
    let mut derived = Vec::new();
    cells.push(outcome(&report.rel_bound_r_s, &mut derived, "rel_bound_r_s"));
    if report.scheme == "ground-to-sat" {
        cells.push(outcome(&report.rel_bound_omega_a, &mut derived, "rel_bound_omega_a"));
    } else {
        cells.push(String::new());
    }
    cells.push(outcome(&report.qber, &mut errors, "qber"));
    cells.push(outcome(&report.qber_leading, &mut derived, "qber_leading"));
    cells.push(report.regime_valid.to_string());
    // a missing decomposition is reported once, not per derived column
    if report.decomposition.is_some() {
        errors.extend(derived);
    }
    errors.dedup();
    cells.push(errors.join("; "));
    cells
}

/// Runs the sweep and writes CSV to `out`. `timestamp` (seconds since the
/// Unix epoch) adds a leading comment line.
pub fn run_sweep<W: Write>(
    cfg: &ScenarioConfig,
    spec: &SweepSpec,
    out: W,
    timestamp: Option<u64>,
    threads: usize,
) -> Result<(), CliError> {
    spec.validate(cfg)?;
    let values = spec.values();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let rows: Vec<Vec<String>> = pool.install(|| {
        values
            .par_iter()
            .enumerate()
            .map(|(i, &v)| {
                let mut point = *cfg;
                spec.variable.apply(&mut point, v);
                let r = point
                    .validate()
                    .map_err(|e| e.to_string())
                    .and_then(|_| run_report(&point, None).map_err(|e| e.to_string()));
                row(i, spec, v, &point, r)
            })
            .collect()
    });

    let mut out = out;
    if let Some(t) = timestamp {
        writeln!(out, "# kerr-qlink sweep of {} generated at unix time {t}", spec.variable.name())?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}
