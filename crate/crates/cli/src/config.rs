//! Scenario files: flat `key = value` lines, `#` comments, and an optional
//! `[planet]` section overriding the Earth model.
//!
//! ```text
//! scheme = ground-to-sat
//! receiver_radius = 8.378e6
//! receiver_direction = prograde
//!
//! [planet]
//! mass = 5.97e24
//! ```

use std::collections::BTreeSet;
use std::fmt;

use kerr_qlink::geometry::{Direction, Worldline};
use kerr_qlink::metrology::MetrologyConfig;
use kerr_qlink::shift::{LinkScenario, Scheme};
use kerr_qlink::units::{EarthModel, PhysicalConstants};
use kerr_qlink::wavepacket::GaussianWavepacket;

pub const PRESETS: [&str; 3] = ["earth-leo", "earth-geo", "leo-geo-sat"];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.line, &self.key) {
            (Some(l), Some(k)) => write!(f, "line {l}, key `{k}`: {}", self.message),
            (Some(l), None) => write!(f, "line {l}: {}", self.message),
            (None, Some(k)) => write!(f, "key `{k}`: {}", self.message),
            (None, None) => write!(f, "{}", self.message),
        }
    }
}

fn err(line: Option<usize>, key: Option<&str>, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        key: key.map(str::to_string),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    pub scheme: Scheme,
    pub planet: EarthModel,
    /// Lower orbit for the satellite scheme; the station sits at the planet radius.
    pub emitter_radius: Option<f64>,
    pub receiver_radius: f64,
    pub emitter_direction: Direction,
    pub receiver_direction: Direction,
    pub peak_frequency: f64,
    pub peak_frequency_2: Option<f64>,
    pub bandwidth: f64,
    pub probes: f64,
    pub squeezing: f64,
}

impl ScenarioConfig {
    pub fn preset(name: &str) -> Option<ScenarioConfig> {
        let e = EarthModel::EARTH;
        let base = ScenarioConfig {
            scheme: Scheme::GroundToSat,
            planet: e,
            emitter_radius: None,
            receiver_radius: e.leo_radius(),
            emitter_direction: Direction::Prograde,
            receiver_direction: Direction::Prograde,
            peak_frequency: 7e14,
            peak_frequency_2: None,
            bandwidth: 1e6,
            probes: 1e10,
            squeezing: 2.0,
        };
        match name {
            "earth-leo" => Some(base),
            "earth-geo" => Some(ScenarioConfig {
                receiver_radius: e.geo_radius(),
                ..base
            }),
            "leo-geo-sat" => Some(ScenarioConfig {
                scheme: Scheme::SatToSat,
                emitter_radius: Some(e.leo_radius()),
                receiver_radius: e.geo_radius(),
                ..base
            }),
            _ => None,
        }
    }

    /// Parses a scenario file on top of the `earth-leo` defaults.
    pub fn parse(text: &str) -> Result<ScenarioConfig, ConfigError> {
        ScenarioConfig::parse_over(ScenarioConfig::preset("earth-leo").expect("preset"), text)
    }

    /// Parses a scenario file, overriding fields of `base`.
    pub fn parse_over(base: ScenarioConfig, text: &str) -> Result<ScenarioConfig, ConfigError> {
        let mut cfg = base;
        let mut section = Section::Top;
        let mut seen = BTreeSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| err(Some(line_no), None, "unterminated section header"))?;
                section = match name.trim() {
                    "planet" => Section::Planet,
                    other => return Err(err(Some(line_no), None, format!("unknown section `[{other}]`"))),
                };
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(Some(line_no), None, "expected `key = value`"))?;
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() {
                return Err(err(Some(line_no), None, "empty key"));
            }
            if value.is_empty() {
                return Err(err(Some(line_no), Some(key), "empty value"));
            }
            let qualified = match section {
                Section::Top => key.to_string(),
                Section::Planet => format!("planet.{key}"),
            };
            if !seen.insert(qualified.clone()) {
                return Err(err(Some(line_no), Some(key), "duplicate key"));
            }
            cfg.set(section, key, value)
                .map_err(|m| err(Some(line_no), Some(key), m))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, section: Section, key: &str, value: &str) -> Result<(), String> {
        let num = || -> Result<f64, String> {
            let v: f64 = value.parse().map_err(|_| format!("`{value}` is not a number"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("`{value}` is not finite"))
            }
        };
        match (section, key) {
            (Section::Top, "scheme") => {
                self.scheme = match value {
                    "ground-to-sat" => Scheme::GroundToSat,
                    "sat-to-sat" => Scheme::SatToSat,
                    _ => return Err(format!("`{value}` is not one of ground-to-sat, sat-to-sat")),
                }
            }
            (Section::Top, "emitter_radius") => self.emitter_radius = Some(num()?),
            (Section::Top, "receiver_radius") => self.receiver_radius = num()?,
            (Section::Top, "emitter_direction") => self.emitter_direction = parse_direction(value)?,
            (Section::Top, "receiver_direction") => self.receiver_direction = parse_direction(value)?,
            (Section::Top, "peak_frequency") => self.peak_frequency = num()?,
            (Section::Top, "peak_frequency_2") => self.peak_frequency_2 = Some(num()?),
            (Section::Top, "bandwidth") => self.bandwidth = num()?,
            (Section::Top, "probes") => self.probes = num()?,
            (Section::Top, "squeezing") => self.squeezing = num()?,
            (Section::Planet, "mass") => self.planet.mass_kg = num()?,
            (Section::Planet, "radius") => self.planet.r_a = num()?,
            (Section::Planet, "angular_velocity") => self.planet.omega_a = num()?,
            (Section::Planet, "kerr_parameter") => self.planet.a_m = num()?,
            (Section::Planet, "moment_of_inertia") => self.planet.inertia = num()?,
            _ => return Err("unknown key".to_string()),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let k = PhysicalConstants::DEFAULT;
        self.planet
            .validate(&k)
            .map_err(|e| err(None, Some("planet"), e.to_string()))?;
        match self.scheme {
            Scheme::GroundToSat => {
                if self.emitter_radius.is_some() {
                    return Err(err(
                        None,
                        Some("emitter_radius"),
                        "the ground station sits at the planet radius; set [planet] radius instead",
                    ));
                }
                if !(self.receiver_radius > self.planet.r_a) {
                    return Err(err(None, Some("receiver_radius"), "must exceed the planet radius"));
                }
            }
            Scheme::SatToSat => {
                let Some(r_c) = self.emitter_radius else {
                    return Err(err(None, Some("emitter_radius"), "required for sat-to-sat"));
                };
                if !(r_c > self.planet.r_a) {
                    return Err(err(None, Some("emitter_radius"), "must exceed the planet radius"));
                }
                if !(self.receiver_radius >= r_c) {
                    return Err(err(None, Some("receiver_radius"), "must not be below emitter_radius"));
                }
            }
        }
        for (key, v) in [
            ("peak_frequency", self.peak_frequency),
            ("peak_frequency_2", self.peak_frequency_2.unwrap_or(self.peak_frequency)),
            ("bandwidth", self.bandwidth),
        ] {
            if !(v > 0.0) {
                return Err(err(None, Some(key), "must be positive"));
            }
        }
        if !(self.probes >= 1.0) {
            return Err(err(None, Some("probes"), "must be at least 1"));
        }
        if !(self.squeezing >= 0.0) {
            return Err(err(None, Some("squeezing"), "must be non-negative"));
        }
        Ok(())
    }

    pub fn constants(&self) -> PhysicalConstants {
        PhysicalConstants::DEFAULT
    }

    /// Emitter radius: station radius or lower orbit.
    pub fn r_emit(&self) -> f64 {
        self.emitter_radius.unwrap_or(self.planet.r_a)
    }

    pub fn scenario(&self) -> kerr_qlink::Result<LinkScenario> {
        let k = self.constants();
        let p = self.planet.spacetime(&k)?;
        let receiver = Worldline::circular_orbit(self.receiver_radius, self.receiver_direction);
        match self.scheme {
            Scheme::GroundToSat => LinkScenario::ground_to_sat(
                p,
                Worldline::ground_station(self.planet.r_a, self.planet.omega_geom(&k)),
                receiver,
            ),
            Scheme::SatToSat => LinkScenario::sat_to_sat(
                p,
                Worldline::circular_orbit(self.r_emit(), self.emitter_direction),
                receiver,
            ),
        }
    }

    pub fn metrology(&self) -> MetrologyConfig {
        MetrologyConfig {
            n: self.probes,
            s: self.squeezing,
            sigma: self.bandwidth,
            omega1: self.peak_frequency,
            omega2: self.peak_frequency_2.unwrap_or(self.peak_frequency),
        }
    }

    pub fn wavepacket(&self) -> kerr_qlink::Result<GaussianWavepacket> {
        GaussianWavepacket::new(self.peak_frequency, self.bandwidth)
    }

    /// The configuration as scenario-file text.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let scheme = match self.scheme {
            Scheme::GroundToSat => "ground-to-sat",
            Scheme::SatToSat => "sat-to-sat",
        };
        s.push_str(&format!("scheme = {scheme}\n"));
        if let Some(r) = self.emitter_radius {
            s.push_str(&format!("emitter_radius = {r:e}\n"));
            s.push_str(&format!("emitter_direction = {}\n", direction_name(self.emitter_direction)));
        }
        s.push_str(&format!("receiver_radius = {:e}\n", self.receiver_radius));
        s.push_str(&format!("receiver_direction = {}\n", direction_name(self.receiver_direction)));
        s.push_str(&format!("peak_frequency = {:e}\n", self.peak_frequency));
        if let Some(w) = self.peak_frequency_2 {
            s.push_str(&format!("peak_frequency_2 = {w:e}\n"));
        }
        s.push_str(&format!("bandwidth = {:e}\n", self.bandwidth));
        s.push_str(&format!("probes = {:e}\n", self.probes));
        s.push_str(&format!("squeezing = {}\n", self.squeezing));
        s.push_str("\n[planet]\n");
        s.push_str(&format!("mass = {:e}\n", self.planet.mass_kg));
        s.push_str(&format!("radius = {:e}\n", self.planet.r_a));
        s.push_str(&format!("angular_velocity = {:e}\n", self.planet.omega_a));
        s.push_str(&format!("kerr_parameter = {}\n", self.planet.a_m));
        s.push_str(&format!("moment_of_inertia = {:e}\n", self.planet.inertia));
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Top,
    Planet,
}

fn parse_direction(value: &str) -> Result<Direction, String> {
    match value {
        "prograde" | "+1" | "1" => Ok(Direction::Prograde),
        "retrograde" | "-1" => Ok(Direction::Retrograde),
        _ => Err(format!("`{value}` is not prograde/retrograde (+1/-1)")),
    }
}

pub fn direction_name(d: Direction) -> &'static str {
    match d {
        Direction::Prograde => "prograde",
        Direction::Retrograde => "retrograde",
    }
}
