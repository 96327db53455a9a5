use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kerr_qlink_cli::config::{ConfigError, ScenarioConfig, PRESETS};
use kerr_qlink_cli::error::CliError;
use kerr_qlink_cli::report;
use kerr_qlink_cli::sweep::{self, Scale, SweepSpec, SweepVar};
use kerr_qlink_cli::verify::{self, Fault, Level};
use kerr_qlink::shift::{self, Scheme};

#[derive(Parser)]
#[command(name = "kerr-qlink", version, about = "Gravitational frequency shifts of quantum links around a rotating planet")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// Built-in scenario (see `presets`).
    #[arg(long)]
    preset: Option<String>,
    /// Scenario file; applied on top of --preset when both are given.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Shift, decomposition, overlap and precision bounds for one scenario.
    Report {
        #[command(flatten)]
        source: Source,
        /// Precision of the oracle cross-check.
        #[arg(long, default_value_t = 50)]
        digits: u32,
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the report over a range of one variable and write CSV.
    Sweep {
        #[command(flatten)]
        source: Source,
        /// r_B, r_C, s, N or sigma.
        #[arg(long = "var")]
        variable: SweepVar,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long)]
        points: usize,
        #[arg(long, default_value = "linear")]
        scale: Scale,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Omit the leading timestamp comment.
        #[arg(long)]
        no_timestamp: bool,
    },
    /// Run the self-checks.
    Verify {
        #[arg(value_enum, default_value_t = VerifyLevel::Fast)]
        level: VerifyLevel,
        #[arg(long, default_value_t = 50)]
        digits: u32,
        #[arg(long, hide = true)]
        inject_fault: Vec<Fault>,
    },
    /// Orbit radius where the ground-to-satellite shift vanishes.
    ZeroOrbit {
        #[command(flatten)]
        source: Source,
        /// Bracket in metres; defaults to 1.2 and 2 planet radii.
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
    },
    /// List the built-in scenarios, or print one as a scenario file.
    Presets { name: Option<String> },
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyLevel {
    Fast,
    Full,
}

fn load(source: &Source) -> Result<ScenarioConfig, CliError> {
    let base = match &source.preset {
        Some(name) => ScenarioConfig::preset(name).ok_or_else(|| {
            CliError::Usage(format!("unknown preset `{name}` (known: {})", PRESETS.join(", ")))
        })?,
        None if source.config.is_none() => {
            return Err(CliError::Usage(format!(
                "give --preset ({}) or --config FILE",
                PRESETS.join(", ")
            )))
        }
        None => ScenarioConfig::preset("earth-leo").expect("preset"),
    };
    match &source.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
                line: None,
                key: None,
                message: format!("cannot read {}: {e}", path.display()),
            })?;
            Ok(ScenarioConfig::parse_over(base, &text)?)
        }
        None => Ok(base),
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn check_digits(digits: u32) -> Result<(), CliError> {
    if digits < 50 {
        return Err(CliError::Usage(format!("--digits must be at least 50, got {digits}")));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Report {
            source,
            digits,
            json,
            out,
        } => {
            check_digits(digits)?;
            let cfg = load(&source)?;
            let r = report::run_report(&cfg, Some(digits))?;
            let mut w = output(&out)?;
            if json {
                serde_json::to_writer_pretty(&mut w, &r)?;
                writeln!(w)?;
            } else {
                w.write_all(report::render_text(&r).as_bytes())?;
            }
            w.flush()?;
        }
        Command::Sweep {
            source,
            variable,
            from,
            to,
            points,
            scale,
            out,
            no_timestamp,
        } => {
            let cfg = load(&source)?;
            let spec = SweepSpec {
                variable,
                from,
                to,
                points,
                scale,
            };
            spec.validate(&cfg)?;
            let stamp = if no_timestamp {
                None
            } else {
                std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .ok()
                    .map(|d| d.as_secs())
            };
            let w = output(&out)?;
            sweep::run_sweep(&cfg, &spec, w, stamp, sweep::thread_count())?;
        }
        Command::Verify {
            level,
            digits,
            inject_fault,
        } => {
            check_digits(digits)?;
            let level = match level {
                VerifyLevel::Fast => Level::Fast,
                VerifyLevel::Full => Level::Full,
            };
            let summary = verify::run_and_print(level, digits, &inject_fault, &mut io::stdout().lock())?;
            if !summary.failed.is_empty() {
                return Err(CliError::Verify(summary.failed.join(", ")));
            }
        }
        Command::ZeroOrbit { source, from, to } => {
            let cfg = load(&source)?;
            if cfg.scheme != Scheme::GroundToSat {
                return Err(CliError::Usage("zero-orbit needs a ground-to-sat scenario".into()));
            }
            let r_a = cfg.planet.r_a;
            let template = cfg.scenario()?;
            let r = shift::find_zero_shift_orbit(&template, from.unwrap_or(1.2 * r_a), to.unwrap_or(2.0 * r_a))?;
            let delta = shift::shift(&template.with_receiver_radius(r)?)?.delta;
            let mut w = io::stdout().lock();
            writeln!(w, "r*          {r:.12e} m")?;
            writeln!(w, "r* / r_A    {:.15}", r / r_a)?;
            writeln!(w, "r* - 1.5r_A {:.6e} m", r - 1.5 * r_a)?;
            writeln!(w, "delta(r*)   {:.3e}", delta.to_f64())?;
        }
        Command::Presets { name } => {
            let mut w = io::stdout().lock();
            match name {
                Some(n) => {
                    let cfg = ScenarioConfig::preset(&n).ok_or_else(|| {
                        CliError::Usage(format!("unknown preset `{n}` (known: {})", PRESETS.join(", ")))
                    })?;
                    w.write_all(cfg.to_text().as_bytes())?;
                }
                None => {
                    for n in PRESETS {
                        writeln!(w, "{n}")?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kerr-qlink: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
