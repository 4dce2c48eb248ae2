use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use qring::model::{Convention, ModelParams, QuantumNumbers, UnitScale, UnitSystem};
use qring::observables::EnsembleSpec;
use qring::oracle::{OracleGrid, Spacing};
use qring::spectrum::{BoundPolicy, Enumeration, MWindow};
use qring::wavefunction::Coordinate;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CommandKind {
    Spectrum,
    Potential,
    Wavefunction,
    Magnetization,
    Current,
    Sweep,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    B,
    Flux,
    A,
}

impl SweepParam {
    pub fn column(self) -> &'static str {
        match self {
            SweepParam::B => "b",
            SweepParam::Flux => "flux",
            SweepParam::A => "a",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "qring", version, about = "Quantum ring on a sphere: spectra, moments, currents and an FD oracle")]
#[command(args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Sub,

    #[command(flatten)]
    opts: Opts,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Sorted state table with moments and currents
    Spectrum,
    /// Confinement potential sampled along ρ
    Potential,
    /// Probability density of one state
    Wavefunction,
    /// Ensemble magnetization
    Magnetization,
    /// Ensemble persistent current
    Current,
    /// Repeat a command over a parameter grid
    Sweep,
    /// Compare closed-form energies with the finite-difference oracle
    Validate,
}

#[derive(Debug, Default, clap::Args)]
struct Opts {
    /// Read `key = value` defaults from a file; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Sphere radius
    #[arg(long, global = true, allow_negative_numbers = true)]
    a: Option<f64>,
    /// Use the flat plane instead of a sphere
    #[arg(long, global = true)]
    flat: bool,
    /// Harmonic confinement strength λ₁
    #[arg(long, global = true, allow_negative_numbers = true)]
    lambda1: Option<f64>,
    /// Centrifugal confinement strength λ₂
    #[arg(long, global = true, allow_negative_numbers = true)]
    lambda2: Option<f64>,
    /// Field strength (cyclotron frequency in natural units)
    #[arg(long, global = true, allow_negative_numbers = true)]
    b: Option<f64>,
    /// Aharonov–Bohm flux in flux quanta
    #[arg(long, global = true, allow_negative_numbers = true)]
    flux_ratio: Option<f64>,
    /// Coefficient of the ω_c(m+ν) energy term
    #[arg(long, global = true, value_enum)]
    convention: Option<ConventionArg>,
    /// Unit system of the output columns
    #[arg(long, global = true, value_enum)]
    units: Option<UnitsArg>,

    /// Lowest angular momentum (with --m-max; automatic window otherwise)
    #[arg(long, global = true, allow_negative_numbers = true)]
    m_min: Option<i32>,
    /// Highest angular momentum
    #[arg(long, global = true, allow_negative_numbers = true)]
    m_max: Option<i32>,
    /// Largest radial index considered
    #[arg(long, global = true)]
    n_cap: Option<u32>,
    /// Rows kept after sorting by energy
    #[arg(long, global = true)]
    max_states: Option<usize>,
    /// Which radial indices are admitted
    #[arg(long, global = true, value_enum)]
    bound_policy: Option<PolicyArg>,

    /// Electron count of the ensemble
    #[arg(long, global = true)]
    electrons: Option<usize>,
    /// k_B T in natural energy units
    #[arg(long, global = true, allow_negative_numbers = true)]
    temperature: Option<f64>,
    /// Emit per-state rows for ensemble commands
    #[arg(long, global = true)]
    per_state: bool,

    /// Radial index for wavefunction/validate
    #[arg(long, global = true)]
    n: Option<u32>,
    /// Angular momentum for wavefunction/validate
    #[arg(long, global = true, allow_negative_numbers = true)]
    m: Option<i32>,
    /// Coordinate of the wavefunction density
    #[arg(long, global = true, value_enum)]
    coordinate: Option<CoordinateArg>,
    /// Number of sample points for curves
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Upper end of the sampled coordinate range
    #[arg(long, global = true)]
    range_max: Option<f64>,

    /// Swept parameter
    #[arg(long, global = true, value_enum)]
    param: Option<SweepParam>,
    /// First sweep value
    #[arg(long, global = true, allow_negative_numbers = true)]
    from: Option<f64>,
    /// Last sweep value
    #[arg(long, global = true, allow_negative_numbers = true)]
    to: Option<f64>,
    /// Number of sweep points (at least 2)
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Command repeated by `sweep`
    #[arg(long, global = true, value_enum)]
    of: Option<CommandKind>,
    /// Worker threads for sweeps (0 = all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Coarse oracle grid points (odd, ≥ 101)
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Number of grid refinements combined by Richardson extrapolation
    #[arg(long, global = true)]
    richardson: Option<u8>,
    /// Node placement of the oracle grid
    #[arg(long, global = true, value_enum)]
    spacing: Option<SpacingArg>,

    /// Output format
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConventionArg {
    Half,
    Full,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum UnitsArg {
    Natural,
    Gaas,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    Paper,
    Relaxed,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CoordinateArg {
    Rho,
    Theta,
    X,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SpacingArg {
    Angle,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub of: CommandKind,
}

impl SweepSpec {
    pub fn points(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.to
                } else {
                    self.from + (self.to - self.from) * i as f64 / last
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSpec {
    pub coordinate: Coordinate,
    pub samples: usize,
    pub range_max: Option<f64>,
}

/// Everything one invocation needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub params: ModelParams,
    pub enumeration: Enumeration,
    pub ensemble: Option<EnsembleSpec>,
    pub sweep: Option<SweepSpec>,
    pub output: OutputSpec,
    pub grid: OracleGrid,
    pub state: Option<QuantumNumbers>,
    pub sampling: SampleSpec,
    pub per_state: bool,
    pub jobs: usize,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

const FLAG_KEYS: [&str; 2] = ["flat", "per-state"];

/// Turns `key = value` lines into flag tokens.
pub fn config_tokens(text: &str, origin: &Path) -> Result<Vec<OsString>, CliError> {
    let mut out = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("{}:{}: expected `key = value`", origin.display(), no + 1)))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key == "config" {
            return Err(usage(format!("{}:{}: nested config files are not supported", origin.display(), no + 1)));
        }
        if FLAG_KEYS.contains(&key.as_str()) {
            match value {
                "true" => out.push(format!("--{key}").into()),
                "false" => {}
                other => {
                    return Err(usage(format!(
                        "{}:{}: `{key}` expects true or false, got `{other}`",
                        origin.display(),
                        no + 1
                    )))
                }
            }
        } else {
            out.push(format!("--{key}").into());
            out.push(value.into());
        }
    }
    Ok(out)
}

fn parse_cli<I, T>(argv: I) -> Result<Cli, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    Cli::try_parse_from(argv).map_err(CliError::from)
}

/// Parses the command line (program name first) into a validated configuration.
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let mut cli = parse_cli(argv.clone())?;
    if let Some(path) = cli.opts.config.clone() {
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::Io {
            path: path.clone(),
            source: e,
        })?;
        // file values first so that later command-line occurrences win
        let mut merged = vec![argv[0].clone()];
        merged.extend(config_tokens(&text, &path)?);
        merged.extend(argv[1..].iter().cloned());
        cli = parse_cli(merged)?;
    }
    build(cli)
}

fn build(cli: Cli) -> Result<RunConfig, CliError> {
    let o = cli.opts;
    let command = match cli.command {
        Sub::Spectrum => CommandKind::Spectrum,
        Sub::Potential => CommandKind::Potential,
        Sub::Wavefunction => CommandKind::Wavefunction,
        Sub::Magnetization => CommandKind::Magnetization,
        Sub::Current => CommandKind::Current,
        Sub::Sweep => CommandKind::Sweep,
        Sub::Validate => CommandKind::Validate,
    };

    let units = match o.units.unwrap_or(UnitsArg::Natural) {
        UnitsArg::Natural => UnitScale::for_system(UnitSystem::Natural),
        UnitsArg::Gaas => UnitScale::for_system(UnitSystem::Gaas),
    };
    let mut builder = ModelParams::builder()
        .confinement(o.lambda1.unwrap_or(0.0), o.lambda2.unwrap_or(0.0))
        .field(o.b.unwrap_or(0.0))
        .flux(o.flux_ratio.unwrap_or(0.0))
        .convention(match o.convention.unwrap_or(ConventionArg::Half) {
            ConventionArg::Half => Convention::Half,
            ConventionArg::Full => Convention::Full,
        })
        .units(units);
    builder = match (o.flat, o.a) {
        (true, Some(_)) => return Err(usage("--flat and --a are mutually exclusive")),
        (true, None) => builder.flat(),
        (false, a) => builder.radius(a.unwrap_or(1.0)),
    };
    let params = builder.build().map_err(|e| usage(e.to_string()))?;

    let window = match (o.m_min, o.m_max) {
        (None, None) => MWindow::Auto,
        (Some(min), Some(max)) if min <= max => MWindow::Range { min, max },
        (Some(min), Some(max)) => return Err(usage(format!("--m-min {min} exceeds --m-max {max}"))),
        _ => return Err(usage("--m-min and --m-max must be given together")),
    };
    let defaults = Enumeration::default();
    let default_states = if command == CommandKind::Validate { 20 } else { defaults.max_states };
    let enumeration = Enumeration {
        window,
        policy: match o.bound_policy.unwrap_or(PolicyArg::Paper) {
            PolicyArg::Paper => BoundPolicy::Paper,
            PolicyArg::Relaxed => BoundPolicy::Relaxed,
        },
        n_cap: o.n_cap.unwrap_or(defaults.n_cap),
        max_states: o.max_states.unwrap_or(default_states),
    };
    if enumeration.max_states == 0 {
        return Err(usage("--max-states must be positive"));
    }

    let sweep = if command == CommandKind::Sweep {
        let param = o.param.ok_or_else(|| usage("sweep needs --param b|flux|a"))?;
        let from = o.from.ok_or_else(|| usage("sweep needs --from"))?;
        let to = o.to.ok_or_else(|| usage("sweep needs --to"))?;
        let steps = o.steps.ok_or_else(|| usage("sweep needs --steps"))?;
        if steps < 2 {
            return Err(usage(format!("--steps must be at least 2, got {steps}")));
        }
        if from == to {
            return Err(usage("--from and --to must differ"));
        }
        let of = o.of.unwrap_or(CommandKind::Magnetization);
        if matches!(of, CommandKind::Sweep | CommandKind::Potential | CommandKind::Wavefunction) {
            return Err(usage("sweep repeats spectrum, magnetization, current or validate"));
        }
        if param == SweepParam::A && params.geometry().is_flat() {
            return Err(usage("cannot sweep the radius of the flat plane"));
        }
        Some(SweepSpec {
            param,
            from,
            to,
            steps,
            of,
        })
    } else {
        None
    };

    let needs_ensemble = matches!(command, CommandKind::Magnetization | CommandKind::Current)
        || sweep.is_some_and(|s| matches!(s.of, CommandKind::Magnetization | CommandKind::Current));
    let ensemble = if needs_ensemble {
        Some(
            EnsembleSpec::new(o.electrons.unwrap_or(1), o.temperature.unwrap_or(0.0))
                .map_err(|e| usage(e.to_string()))?,
        )
    } else {
        None
    };

    let grid = OracleGrid {
        points: o.grid.unwrap_or(OracleGrid::default().points),
        boundary_at_1: None,
        richardson_levels: o.richardson.unwrap_or(1),
        spacing: match o.spacing.unwrap_or(SpacingArg::Angle) {
            SpacingArg::Angle => Spacing::Angle,
            SpacingArg::Linear => Spacing::Linear,
        },
    };
    grid.check().map_err(|e| usage(e.to_string()))?;

    let state = match (o.n, o.m) {
        (Some(n), Some(m)) => Some(QuantumNumbers::new(n, m)),
        (None, None) => None,
        (n, m) => Some(QuantumNumbers::new(n.unwrap_or(0), m.unwrap_or(0))),
    };
    let samples = o.samples.unwrap_or(201);
    if samples < 2 {
        return Err(usage("--samples must be at least 2"));
    }
    if let Some(r) = o.range_max {
        if !(r.is_finite() && r > 0.0) {
            return Err(usage("--range-max must be positive"));
        }
    }
    let jobs = o.jobs.unwrap_or(0);

    Ok(RunConfig {
        command,
        params,
        enumeration,
        ensemble,
        sweep,
        output: OutputSpec {
            path: o.output,
            format: o.format.unwrap_or_default(),
        },
        grid,
        state,
        sampling: SampleSpec {
            coordinate: match o.coordinate.unwrap_or(CoordinateArg::Rho) {
                CoordinateArg::Rho => Coordinate::Rho,
                CoordinateArg::Theta => Coordinate::Theta,
                CoordinateArg::X => Coordinate::X,
            },
            samples,
            range_max: o.range_max,
        },
        per_state: o.per_state,
        jobs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &str) -> Result<RunConfig, CliError> {
        parse_args(std::iter::once("qring").chain(args.split_whitespace()))
    }

    #[test]
    fn happy_path() {
        let c = parse("spectrum --a 10 --lambda1 1 --lambda2 1 --b 1 --flux-ratio 0.3 --m-min -5 --m-max 5").unwrap();
        assert_eq!(c.command, CommandKind::Spectrum);
        assert_eq!(c.params.geometry().radius(), Some(10.0));
        assert_eq!(c.params.fields().nu, 0.3);
        assert_eq!(c.enumeration.window, MWindow::Range { min: -5, max: 5 });
    }

    #[test]
    fn sweep_needs_two_steps() {
        let e = parse("sweep --param b --from 0 --to 2 --steps 1").unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(parse("sweep --param b --from 0 --to 2 --steps 3").is_ok());
        assert!(parse("sweep --param b --from 1 --to 1 --steps 3").is_err());
    }

    #[test]
    fn usage_errors() {
        for bad in [
            "spectrum --bogus 1",
            "spectrum --a x",
            "spectrum --m-min 3 --m-max 1",
            "spectrum --m-min 3",
            "spectrum --flat --lambda1 0 --lambda2 1",
            "validate --grid 100",
            "spectrum --a -1",
        ] {
            assert_eq!(parse(bad).unwrap_err().exit_code(), 2, "{bad}");
        }
    }

    #[test]
    fn config_tokens_skip_comments() {
        let t = config_tokens("# header\nlambda1 = 1  # inline\n\nper_state = true\nflat = false\n", Path::new("c")).unwrap();
        let t: Vec<String> = t.into_iter().map(|s| s.into_string().unwrap()).collect();
        assert_eq!(t, vec!["--lambda1", "1", "--per-state"]);
        assert!(config_tokens("lambda1 1", Path::new("c")).is_err());
    }

    #[test]
    fn sweep_points_end_exactly() {
        let s = SweepSpec {
            param: SweepParam::B,
            from: 0.0,
            to: 0.3,
            steps: 4,
            of: CommandKind::Magnetization,
        };
        let p = s.points();
        assert_eq!(p.len(), 4);
        assert_eq!(p[0], 0.0);
        assert_eq!(p[3], 0.3);
    }
}
