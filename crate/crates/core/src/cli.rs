//! `qwave` command-line front end.
//!
//! Arguments are parsed into a fully resolved [`RunConfig`]: flag values win
//! over config-file values, which win over defaults. Every emitted document
//! carries that resolved config, the constant-set identifier and the tool
//! version, so a run can be reproduced from its own output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::bounds::{black_hole_floor, check_localization, compton_wavelength, hydrogen_report};
use crate::boxstates::{box_count, min_momentum_uncertainty, BoxSpec, MomentumRegion};
use crate::constants::{Particle, ParticleRegistry, UnitSystem};
use crate::interferometer::{phase_sweep, run_experiment, sample_clicks, ExperimentConfig};
use crate::wavepacket::{dispersion_series, ray_positions, GaussianPacket, GridSpec, Routes};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Largest grid the CLI will grow to when satisfying `dx <= width0 / 16`.
const MAX_GRID_POINTS: usize = 1 << 20;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad invocation; exit status 2.
    #[error("{0}")]
    Usage(String),
    /// Help or version request, or a clap parse failure; clap picks the status.
    #[error("{0}")]
    Clap(#[from] clap::Error),
    /// The computation itself failed; exit status 1.
    #[error(transparent)]
    Compute(#[from] crate::Error),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Clap(e) => e.exit_code(),
            CliError::Compute(_) | CliError::Io { .. } => 1,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum UnitsArg {
    Si,
    Natural,
}

#[derive(Debug, Parser)]
#[command(name = "qwave", version, about = "Delayed-choice interferometry, packet dispersion and localization bounds")]
struct Cli {
    /// Flat TOML file whose keys mirror the long flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    units: Option<UnitsArg>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Write the main document here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Run the interferometer with or without the output splitter.
    Interfere(InterfereArgs),
    /// Width of a spreading Gaussian packet over time.
    Disperse(DisperseArgs),
    /// Compton localization floor and the hydrogen comparison.
    Bounds(BoundsArgs),
    /// Count box microstates in a momentum region.
    Boxcount(BoxcountArgs),
}

#[derive(Debug, Args)]
struct InterfereArgs {
    /// Output half-silvered mirror in place.
    #[arg(long)]
    h2: bool,
    /// Relative arm phase in radians.
    #[arg(long, allow_negative_numbers = true)]
    phase: Option<f64>,
    /// H2 insertion time as a fraction of the photon arrival time.
    #[arg(long)]
    insertion_frac: Option<f64>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of phase points in the CSV sweep.
    #[arg(long)]
    sweep: Option<usize>,
}

#[derive(Debug, Args)]
struct DisperseArgs {
    #[arg(long, conflicts_with = "mass")]
    particle: Option<String>,
    #[arg(long)]
    mass: Option<f64>,
    #[arg(long)]
    width0: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    t_steps: Option<usize>,
    /// Comma-separated subset of analytic,spectral,kernel.
    #[arg(long)]
    routes: Option<String>,
    #[arg(long)]
    grid_points: Option<usize>,
    /// Rays on each side of the center for the path-fan table.
    #[arg(long)]
    rays: Option<usize>,
    #[arg(long)]
    rays_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[arg(long)]
    particle: Option<String>,
    #[arg(long)]
    width: Option<f64>,
    #[arg(long)]
    hydrogen: Option<u32>,
}

#[derive(Debug, Args)]
struct BoxcountArgs {
    #[arg(long)]
    side: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    p_lo: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    p_hi: Option<String>,
    /// Read --p-lo/--p-hi in units of the level spacing h/L.
    #[arg(long)]
    in_cells: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterfereParams {
    pub h2: bool,
    pub phase: f64,
    pub insertion_frac: f64,
    pub samples: u64,
    pub sweep: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisperseParams {
    pub particle: Particle,
    pub width0: f64,
    pub t_max: f64,
    pub t_steps: usize,
    pub routes: Vec<String>,
    pub grid_points: usize,
    pub rays: usize,
    pub rays_out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsParams {
    /// `None` means every registry entry.
    pub particle: Option<Particle>,
    pub width: Option<f64>,
    pub hydrogen: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxcountParams {
    pub side: f64,
    pub p_lo: [f64; 3],
    pub p_hi: [f64; 3],
    pub in_cells: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "subcommand", rename_all = "lowercase")]
pub enum Command {
    Interfere(InterfereParams),
    Disperse(DisperseParams),
    Bounds(BoundsParams),
    Boxcount(BoxcountParams),
}

/// Fully resolved run description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub command: Command,
    pub unit_mode: UnitSystem,
    pub output_format: OutputFormat,
    pub seed: Option<u64>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Registry additions from the config file.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub extra_particles: BTreeMap<String, f64>,
}

const GLOBAL_KEYS: &[&str] = &["units", "format", "out"];
const INTERFERE_KEYS: &[&str] = &["h2", "phase", "insertion-frac", "samples", "seed", "sweep"];
const DISPERSE_KEYS: &[&str] =
    &["particle", "mass", "width0", "t-max", "t-steps", "routes", "grid-points", "rays", "rays-out"];
const BOUNDS_KEYS: &[&str] = &["particle", "width", "hydrogen"];
const BOXCOUNT_KEYS: &[&str] = &["side", "p-lo", "p-hi", "in-cells"];

/// Flat key-value settings read from a config file. Keys use the long-flag
/// spelling; underscores are accepted in place of hyphens.
#[derive(Debug, Default)]
struct FileConfig {
    values: BTreeMap<String, toml::Value>,
    particles: BTreeMap<String, f64>,
}

impl FileConfig {
    fn load(path: &Path, subcommand_keys: &[&str], subcommand: &str) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config file {}: {e}", path.display())))?;
        Self::parse(&text, subcommand_keys, subcommand)
    }

    fn parse(text: &str, subcommand_keys: &[&str], subcommand: &str) -> Result<Self, CliError> {
        let table: toml::Table =
            text.parse().map_err(|e| usage(format!("config file is not valid TOML: {e}")))?;
        let mut cfg = FileConfig::default();
        for (raw_key, value) in table {
            let key = raw_key.replace('_', "-");
            if key == "particles" {
                let entries = value
                    .as_table()
                    .ok_or_else(|| usage("config key `particles` must be a table of name = mass"))?;
                for (name, mass) in entries {
                    let mass = as_f64(mass).ok_or_else(|| {
                        usage(format!("config particle `{name}`: mass must be a number"))
                    })?;
                    cfg.particles.insert(name.clone(), mass);
                }
                continue;
            }
            if !GLOBAL_KEYS.contains(&key.as_str()) && !subcommand_keys.contains(&key.as_str()) {
                return Err(usage(format!(
                    "unknown config key `{raw_key}` for `{subcommand}` (allowed: {})",
                    GLOBAL_KEYS.iter().chain(subcommand_keys).copied().collect::<Vec<_>>().join(", ")
                )));
            }
            cfg.values.insert(key, value);
        }
        Ok(cfg)
    }

    fn f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.values
            .get(key)
            .map(|v| as_f64(v).ok_or_else(|| usage(format!("config key `{key}` must be a number"))))
            .transpose()
    }

    fn u64(&self, key: &str) -> Result<Option<u64>, CliError> {
        self.values
            .get(key)
            .map(|v| {
                v.as_integer()
                    .and_then(|i| u64::try_from(i).ok())
                    .ok_or_else(|| usage(format!("config key `{key}` must be a non-negative integer")))
            })
            .transpose()
    }

    fn usize(&self, key: &str) -> Result<Option<usize>, CliError> {
        Ok(self.u64(key)?.map(|v| v as usize))
    }

    fn bool(&self, key: &str) -> Result<Option<bool>, CliError> {
        self.values
            .get(key)
            .map(|v| v.as_bool().ok_or_else(|| usage(format!("config key `{key}` must be true or false"))))
            .transpose()
    }

    fn string(&self, key: &str) -> Result<Option<String>, CliError> {
        self.values
            .get(key)
            .map(|v| match v {
                toml::Value::String(s) => Ok(s.clone()),
                // triples may be written as arrays
                toml::Value::Array(items) => items
                    .iter()
                    .map(|x| as_f64(x).map(|f| f.to_string()))
                    .collect::<Option<Vec<_>>>()
                    .map(|parts| parts.join(","))
                    .ok_or_else(|| usage(format!("config key `{key}` must hold numbers"))),
                _ => Err(usage(format!("config key `{key}` must be a string"))),
            })
            .transpose()
    }
}

fn as_f64(v: &toml::Value) -> Option<f64> {
    match v {
        toml::Value::Float(f) => Some(*f),
        toml::Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn parse_triple(name: &str, s: &str) -> Result<[f64; 3], CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(usage(format!("--{name} expects X,Y,Z, got `{s}`")));
    }
    let mut out = [0.0; 3];
    for (slot, p) in out.iter_mut().zip(&parts) {
        *slot = p.parse().map_err(|_| usage(format!("--{name}: `{p}` is not a number")))?;
    }
    Ok(out)
}

fn parse_routes(s: &str) -> Result<Vec<String>, CliError> {
    let mut routes: Vec<String> = Vec::new();
    for r in s.split(',').map(str::trim).filter(|r| !r.is_empty()) {
        if !["analytic", "spectral", "kernel"].contains(&r) {
            return Err(usage(format!("unknown route `{r}` (expected analytic, spectral, kernel)")));
        }
        if !routes.iter().any(|x| x == r) {
            routes.push(r.to_string());
        }
    }
    if routes.is_empty() {
        return Err(usage("--routes must name at least one route"));
    }
    Ok(routes)
}

fn require<T>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| usage(format!("missing required parameter --{flag}")))
}

/// Parse an argument vector (including the program name) into a run config.
pub fn parse_args<I, S>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let (sub_name, sub_keys) = match &cli.command {
        CliCommand::Interfere(_) => ("interfere", INTERFERE_KEYS),
        CliCommand::Disperse(_) => ("disperse", DISPERSE_KEYS),
        CliCommand::Bounds(_) => ("bounds", BOUNDS_KEYS),
        CliCommand::Boxcount(_) => ("boxcount", BOXCOUNT_KEYS),
    };
    let file = match &cli.config {
        Some(path) => FileConfig::load(path, sub_keys, sub_name)?,
        None => FileConfig::default(),
    };

    let unit_mode = match cli.units {
        Some(UnitsArg::Si) => UnitSystem::Si,
        Some(UnitsArg::Natural) => UnitSystem::Natural,
        None => match file.string("units")? {
            Some(s) => s.parse().map_err(usage)?,
            None => UnitSystem::Si,
        },
    };
    let output_format = match cli.format {
        Some(f) => f,
        None => match file.string("format")?.as_deref() {
            None | Some("json") => OutputFormat::Json,
            Some("csv") => OutputFormat::Csv,
            Some(other) => return Err(usage(format!("unknown format `{other}` (expected json|csv)"))),
        },
    };
    let out = cli.out.or(file.string("out")?.map(PathBuf::from));
    let registry = ParticleRegistry::with_extra(file.particles.clone())?;

    let mut seed = None;
    let command = match cli.command {
        CliCommand::Interfere(a) => {
            seed = Some(a.seed.or(file.u64("seed")?).unwrap_or(0));
            let p = InterfereParams {
                h2: a.h2 || file.bool("h2")?.unwrap_or(false),
                phase: a.phase.or(file.f64("phase")?).unwrap_or(0.0),
                insertion_frac: a.insertion_frac.or(file.f64("insertion-frac")?).unwrap_or(0.0),
                samples: a.samples.or(file.u64("samples")?).unwrap_or(10_000),
                sweep: a.sweep.or(file.usize("sweep")?).unwrap_or(64),
            };
            if !(p.insertion_frac >= 0.0) {
                return Err(usage("--insertion-frac must be >= 0"));
            }
            if p.samples == 0 {
                return Err(usage("--samples must be at least 1"));
            }
            if p.sweep == 0 {
                return Err(usage("--sweep must be at least 1"));
            }
            Command::Interfere(p)
        }
        CliCommand::Disperse(a) => {
            let particle = match (a.particle, a.mass) {
                (Some(name), None) => ParticleChoice::Name(name),
                (None, Some(m)) => ParticleChoice::Mass(m),
                (None, None) => match (file.string("particle")?, file.f64("mass")?) {
                    (Some(_), Some(_)) => {
                        return Err(usage("config sets both `particle` and `mass`; choose one"))
                    }
                    (Some(name), None) => ParticleChoice::Name(name),
                    (None, Some(m)) => ParticleChoice::Mass(m),
                    (None, None) => return Err(usage("missing required parameter --particle or --mass")),
                },
                (Some(_), Some(_)) => unreachable!("clap enforces the conflict"),
            };
            let particle = match particle {
                ParticleChoice::Name(name) => {
                    if unit_mode == UnitSystem::Natural {
                        return Err(usage("registry particles carry SI masses; use --mass with --units natural"));
                    }
                    registry.lookup(&name).map_err(|e| usage(e.to_string()))?
                }
                ParticleChoice::Mass(m) => Particle::new("custom", m).map_err(|e| usage(e.to_string()))?,
            };
            let routes = match a.routes.or(file.string("routes")?) {
                Some(r) => parse_routes(&r)?,
                None => vec!["analytic".into(), "spectral".into()],
            };
            let p = DisperseParams {
                particle,
                width0: require(a.width0.or(file.f64("width0")?), "width0")?,
                t_max: require(a.t_max.or(file.f64("t-max")?), "t-max")?,
                t_steps: a.t_steps.or(file.usize("t-steps")?).unwrap_or(10),
                routes,
                grid_points: a.grid_points.or(file.usize("grid-points")?).unwrap_or(4096),
                rays: a.rays.or(file.usize("rays")?).unwrap_or(0),
                rays_out: a.rays_out.or(file.string("rays-out")?.map(PathBuf::from)),
            };
            if !(p.width0 > 0.0) {
                return Err(usage("--width0 must be positive"));
            }
            if !(p.t_max >= 0.0) {
                return Err(usage("--t-max must be >= 0"));
            }
            if p.t_steps == 0 {
                return Err(usage("--t-steps must be at least 1"));
            }
            if p.rays > 0 && output_format == OutputFormat::Csv && p.rays_out.is_none() {
                return Err(usage("--rays with --format csv needs --rays-out"));
            }
            Command::Disperse(p)
        }
        CliCommand::Bounds(a) => {
            if unit_mode == UnitSystem::Natural {
                return Err(usage("`bounds` works on SI registry masses; drop --units natural"));
            }
            let particle = match a.particle.or(file.string("particle")?) {
                Some(name) => Some(registry.lookup(&name).map_err(|e| usage(e.to_string()))?),
                None => None,
            };
            let width = a.width.or(file.f64("width")?);
            if width.is_some() && particle.is_none() {
                return Err(usage("--width needs --particle"));
            }
            let hydrogen = match a.hydrogen {
                Some(n) => Some(n),
                None => file.u64("hydrogen")?.map(|n| n as u32),
            };
            if hydrogen == Some(0) {
                return Err(usage("--hydrogen must be >= 1"));
            }
            Command::Bounds(BoundsParams { particle, width, hydrogen })
        }
        CliCommand::Boxcount(a) => {
            let p_lo = require(a.p_lo.or(file.string("p-lo")?), "p-lo")?;
            let p_hi = require(a.p_hi.or(file.string("p-hi")?), "p-hi")?;
            Command::Boxcount(BoxcountParams {
                side: require(a.side.or(file.f64("side")?), "side")?,
                p_lo: parse_triple("p-lo", &p_lo)?,
                p_hi: parse_triple("p-hi", &p_hi)?,
                in_cells: a.in_cells || file.bool("in-cells")?.unwrap_or(false),
            })
        }
    };

    Ok(RunConfig { command, unit_mode, output_format, seed, out, extra_particles: file.particles })
}

enum ParticleChoice {
    Name(String),
    Mass(f64),
}

/// Documents produced by one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub main: String,
    /// Extra files (path, contents), e.g. the ray table.
    pub side_files: Vec<(PathBuf, String)>,
}

fn envelope(config: &RunConfig, result: serde_json::Value) -> String {
    let k = config.unit_mode.constants();
    let doc = json!({
        "tool": "qwave",
        "version": VERSION,
        "constants": k,
        "config": config,
        "result": result,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json values always serialize");
    s.push('\n');
    s
}

fn csv_preamble(config: &RunConfig) -> String {
    let k = config.unit_mode.constants();
    let cfg = serde_json::to_string(config).expect("config serializes");
    format!("# qwave {VERSION}\n# constants: {}\n# config: {cfg}\n", k.id)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

/// Run the computation described by `config`.
pub fn execute(config: &RunConfig) -> Result<Output, CliError> {
    let k = config.unit_mode.constants();
    let mut side_files = Vec::new();
    let main = match &config.command {
        Command::Interfere(p) => {
            let exp = ExperimentConfig {
                h2_present: p.h2,
                h2_insertion_time: p.insertion_frac,
                photon_arrival_time: 1.0,
                phase_upper: p.phase,
                phase_lower: 0.0,
                arms_isolated: true,
            };
            match config.output_format {
                OutputFormat::Csv => {
                    let mut s = csv_preamble(config);
                    s.push_str("phase_rad,p_d1,p_d2\n");
                    for row in phase_sweep(&exp, p.sweep)? {
                        let _ = writeln!(s, "{:e},{:e},{:e}", row.phase_rad, row.p_d1, row.p_d2);
                    }
                    s
                }
                OutputFormat::Json => {
                    let probs = run_experiment(&exp)?;
                    let stats = sample_clicks(probs, p.samples, config.seed.unwrap_or(0))?;
                    envelope(
                        config,
                        json!({
                            "h2_in_place_at_arrival": exp.h2_in_place_at_arrival(),
                            "p_d1": probs.p_d1,
                            "p_d2": probs.p_d2,
                            "clicks": stats,
                        }),
                    )
                }
            }
        }
        Command::Disperse(p) => {
            let packet = GaussianPacket::at_rest(p.particle.clone(), p.width0, config.unit_mode)?;
            let grid = disperse_grid(&packet, p)?;
            let routes = Routes {
                spectral: p.routes.iter().any(|r| r == "spectral"),
                kernel: p.routes.iter().any(|r| r == "kernel"),
            };
            let times: Vec<f64> =
                (0..=p.t_steps).map(|j| p.t_max * j as f64 / p.t_steps as f64).collect();
            let rows = dispersion_series(&packet, &times, &grid, routes)?;
            let rays = if p.rays > 0 {
                times
                    .iter()
                    .map(|&t| Ok((t, ray_positions(&packet, t, p.rays)?)))
                    .collect::<crate::Result<Vec<_>>>()?
            } else {
                Vec::new()
            };
            let natural = config.unit_mode == UnitSystem::Natural;
            let col = |si: &str, nat: &str| if natural { nat.to_string() } else { si.to_string() };
            if let Some(path) = &p.rays_out {
                let mut s = csv_preamble(config);
                let _ = writeln!(s, "{},ray_index,{}", col("t_s", "t_nat"), col("x_m", "x_nat"));
                for (t, pts) in &rays {
                    for r in pts {
                        let _ = writeln!(s, "{t:e},{},{:e}", r.ray_index, r.x);
                    }
                }
                side_files.push((path.clone(), s));
            }
            match config.output_format {
                OutputFormat::Csv => {
                    let mut s = csv_preamble(config);
                    let mut header = vec![col("t_s", "t_nat"), col("width_analytic_m", "width_analytic_nat")];
                    if routes.spectral {
                        header.push(col("width_spectral_m", "width_spectral_nat"));
                    }
                    if routes.kernel {
                        header.push(col("width_kernel_m", "width_kernel_nat"));
                    }
                    header.push(col("v_disp_mps", "v_disp_nat"));
                    s.push_str(&header.join(","));
                    s.push('\n');
                    for r in &rows {
                        let mut fields = vec![format!("{:e}", r.t), format!("{:e}", r.width_analytic)];
                        if routes.spectral {
                            fields.push(fmt_opt(r.width_spectral));
                        }
                        if routes.kernel {
                            fields.push(fmt_opt(r.width_kernel));
                        }
                        fields.push(format!("{:e}", r.v_disp));
                        s.push_str(&fields.join(","));
                        s.push('\n');
                    }
                    s
                }
                OutputFormat::Json => {
                    let ray_json: Vec<_> =
                        rays.iter().map(|(t, pts)| json!({ "t": t, "rays": pts })).collect();
                    envelope(
                        config,
                        json!({ "packet": packet, "grid": grid, "rows": rows, "rays": ray_json }),
                    )
                }
            }
        }
        Command::Bounds(p) => {
            let registry = ParticleRegistry::with_extra(config.extra_particles.clone())?;
            let particles: Vec<Particle> = match &p.particle {
                Some(one) => vec![one.clone()],
                None => registry.iter().cloned().collect(),
            };
            let mut table = Vec::new();
            for part in &particles {
                let lc = compton_wavelength(part, &k);
                table.push(json!({
                    "name": part.name,
                    "mass_kg": part.mass,
                    "compton_m": lc,
                    "compton_exponent": lc.log10().floor() as i32,
                    "black_hole_floor_m": black_hole_floor(part.mass, &k)?,
                }));
            }
            let localization = match (&p.particle, p.width) {
                (Some(part), Some(w)) => Some(check_localization(part, w, &k)?),
                _ => None,
            };
            let electron = registry.lookup("electron")?;
            let hydrogen = p.hydrogen.map(|n| hydrogen_report(n, &electron, &k)).transpose()?;
            match config.output_format {
                OutputFormat::Csv => {
                    let mut s = csv_preamble(config);
                    s.push_str("name,mass_kg,compton_m,black_hole_floor_m\n");
                    for part in &particles {
                        let lc = compton_wavelength(part, &k);
                        let _ = writeln!(s, "{},{:e},{:e},{:e}", part.name, part.mass, lc, lc);
                    }
                    s
                }
                OutputFormat::Json => envelope(
                    config,
                    json!({ "particles": table, "localization": localization, "hydrogen": hydrogen }),
                ),
            }
        }
        Command::Boxcount(p) => {
            let b = BoxSpec::new(p.side)?;
            let region = if p.in_cells {
                MomentumRegion::in_cells(p.p_lo, p.p_hi, &b, &k)?
            } else {
                MomentumRegion::new(p.p_lo, p.p_hi)?
            };
            let c = box_count(&b, &region, &k)?;
            let dp = min_momentum_uncertainty(&b, &k);
            match config.output_format {
                OutputFormat::Csv => {
                    let mut s = csv_preamble(config);
                    s.push_str("continuum,lattice,ratio,min_dp\n");
                    let _ = writeln!(s, "{:e},{},{:e},{:e}", c.continuum, c.lattice, c.ratio, dp);
                    s
                }
                OutputFormat::Json => envelope(
                    config,
                    json!({
                        "continuum": c.continuum,
                        "lattice": c.lattice,
                        "ratio": c.ratio,
                        "min_momentum_uncertainty": dp,
                    }),
                ),
            }
        }
    };
    Ok(Output { main, side_files })
}

fn disperse_grid(packet: &GaussianPacket, p: &DisperseParams) -> Result<GridSpec, CliError> {
    let mut grid = GridSpec::for_packet(packet, p.t_max, p.grid_points)?;
    while grid.dx() > packet.width0 / 16.0 {
        if grid.n_points >= MAX_GRID_POINTS {
            return Err(crate::Error::GridTooCoarse {
                reason: format!(
                    "width grows from {:e} to {:e}; more than {MAX_GRID_POINTS} points needed",
                    packet.width0,
                    grid.half_extent() / 8.0
                ),
            }
            .into());
        }
        grid = GridSpec::centered(grid.center(), grid.half_extent(), grid.n_points * 2)?;
    }
    Ok(grid)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Parse, execute and write outputs. Returns the process exit status.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let result = parse_args(argv).and_then(|cfg| {
        let out = execute(&cfg)?;
        for (path, contents) in &out.side_files {
            write_file(path, contents)?;
        }
        match &cfg.out {
            Some(path) => write_file(path, &out.main),
            None => {
                print!("{}", out.main);
                Ok(())
            }
        }
    });
    match result {
        Ok(()) => 0,
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            e.exit_code()
        }
        Err(e) => {
            eprintln!("qwave: {e}");
            if let CliError::Usage(_) = e {
                eprintln!("run `qwave --help` for usage");
            }
            e.exit_code()
        }
    }
}
