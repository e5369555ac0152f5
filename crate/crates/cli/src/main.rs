//! `moebius-flux`: spectra, flux sweeps, holonomies and a self-check for
//! tight-binding strips with annulus or Möbius topology.
//!
//! Exit codes: 0 success, 1 computational failure, 2 configuration error.

mod config;
mod csv;
mod svg;
mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use moebius_flux::eigensolver::solve_lowest;
use moebius_flux::experiments::{
    detect_minima, flux_sweep, sector_hamiltonian, QuantizationMode, Sector, SweepRecord,
};
use moebius_flux::gauge::{uniform_flux_field, wilson_loop};
use moebius_flux::lattice::{center_loop, homology_class, offset_loop, StripTopology};

use config::{ConfigError, RunConfig};

#[derive(Parser)]
#[command(name = "moebius-flux", version, about = "Flux quantization on annulus and Möbius strip lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lowest eigenpairs at a single flux value, as CSV.
    Spectrum(RunArgs),
    /// Ground energies over a flux grid, as CSV (plus an optional SVG chart).
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Exit with status 1 if any grid point failed.
        #[arg(long)]
        strict: bool,
    },
    /// Wilson loop of the center curve or of an offset row.
    Holonomy {
        #[command(flatten)]
        run: RunArgs,
        /// `center` or `offset=<row>`.
        #[arg(long = "loop", default_value = "center")]
        loop_sel: String,
    },
    /// Runs the invariant suite on small fixed lattices.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, hide = true)]
        break_seam: bool,
    },
}

/// Flags mirror config keys and take precedence over `--config`.
#[derive(Args)]
struct RunArgs {
    /// `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `annulus` or `moebius`.
    #[arg(long)]
    topology: Option<String>,
    #[arg(long)]
    nx: Option<String>,
    #[arg(long)]
    ny: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    tx: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    ty: Option<String>,
    /// Flux through the ring in flux quanta (spectrum, holonomy).
    #[arg(long, allow_hyphen_values = true)]
    f: Option<String>,
    #[arg(long = "f-min", allow_hyphen_values = true)]
    f_min: Option<String>,
    #[arg(long = "f-max", allow_hyphen_values = true)]
    f_max: Option<String>,
    #[arg(long = "f-steps")]
    f_steps: Option<String>,
    #[arg(long)]
    k: Option<String>,
    /// `dense`, `lanczos` or `auto`.
    #[arg(long)]
    solver: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    tol: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Comma-separated subset of `full,even,odd`.
    #[arg(long)]
    sectors: Option<String>,
    /// Output path (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG chart path (sweep only).
    #[arg(long)]
    plot: Option<PathBuf>,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let out = self.out.as_ref().map(|p| p.display().to_string());
        let plot = self.plot.as_ref().map(|p| p.display().to_string());
        let flags = [
            ("topology", &self.topology),
            ("nx", &self.nx),
            ("ny", &self.ny),
            ("tx", &self.tx),
            ("ty", &self.ty),
            ("f", &self.f),
            ("f_min", &self.f_min),
            ("f_max", &self.f_max),
            ("f_steps", &self.f_steps),
            ("k", &self.k),
            ("solver", &self.solver),
            ("tol", &self.tol),
            ("seed", &self.seed),
            ("sectors", &self.sectors),
            ("out", &out),
            ("plot", &plot),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        Ok(cfg)
    }
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Failure(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Failure(format!("i/o error: {e}"))
    }
}

impl From<moebius_flux::Error> for CliError {
    fn from(e: moebius_flux::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

fn open_output(path: Option<&str>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_spectrum(cfg: &RunConfig) -> Result<(), CliError> {
    let lat = cfg.lattice()?;
    let hop = cfg.hop()?;
    let f = cfg.flux()?;
    let solver = cfg.solver()?;
    let sectors = cfg.sectors(&[Sector::Full])?;
    let [sector] = sectors[..] else {
        return Err(ConfigError::Inconsistent("spectrum takes exactly one sector".into()).into());
    };
    let h = sector_hamiltonian(&lat, hop, f, sector)
        .map_err(|e| ConfigError::Inconsistent(e.to_string()))?;
    if solver.k > h.dim() {
        return Err(ConfigError::Inconsistent(format!(
            "k = {} exceeds the {sector} sector dimension {}",
            solver.k,
            h.dim()
        ))
        .into());
    }
    let res = solve_lowest(&h, &solver)?;
    let mut out = open_output(cfg.raw("out"))?;
    csv::write_spectrum(&mut out, &res.values, &res.residuals)?;
    out.flush()?;
    Ok(())
}

fn quantization_summary(records: &[SweepRecord], topology: StripTopology) -> Vec<String> {
    let mut lines = Vec::new();
    for sector in [Sector::Full, Sector::Even, Sector::Odd] {
        let mode = match (topology, sector) {
            (StripTopology::Moebius, Sector::Odd) => QuantizationMode::HalfInteger,
            _ => QuantizationMode::Integer,
        };
        let Ok(rep) = detect_minima(records, sector, mode) else {
            continue;
        };
        for m in &rep.minima {
            lines.push(format!(
                "{sector} minimum at f = {:.6} (nearest allowed {}, distance {:.2e})",
                m.f, m.nearest_allowed, m.distance
            ));
        }
    }
    lines
}

fn cmd_sweep(cfg: &RunConfig, strict: bool) -> Result<(), CliError> {
    let sweep = cfg.sweep()?;
    let records = flux_sweep(&sweep)?;
    let mut out = open_output(cfg.raw("out"))?;
    csv::write_sweep(&mut out, &records)?;
    out.flush()?;
    drop(out);

    if let Some(path) = cfg.raw("plot") {
        let title = format!("{} {}x{}", sweep.topology, sweep.nx, sweep.ny);
        std::fs::write(Path::new(path), svg::sweep_chart(&records, &title))?;
    }
    for line in quantization_summary(&records, sweep.topology) {
        eprintln!("{line}");
    }
    let failed = records.iter().filter(|r| !r.status.is_ok()).count();
    if failed > 0 {
        eprintln!("{failed} of {} grid points failed", records.len());
        if strict {
            return Err(CliError::Failure("sweep had failed grid points".into()));
        }
    }
    Ok(())
}

fn cmd_holonomy(cfg: &RunConfig, selector: &str) -> Result<(), CliError> {
    let lat = cfg.lattice()?;
    let f = cfg.flux()?;
    let path = match selector.trim() {
        "center" => center_loop(&lat),
        s => match s.strip_prefix("offset=").map(str::parse::<usize>) {
            Some(Ok(row)) => offset_loop(&lat, row),
            _ => {
                return Err(CliError::Config(format!(
                    "bad loop selector `{s}` (expected center or offset=<row>)"
                )))
            }
        },
    }
    .map_err(|e| CliError::Config(e.to_string()))?;
    let h = wilson_loop(&uniform_flux_field(&lat, f), &path)?;
    let mut out = io::stdout().lock();
    writeln!(out, "loop {}", selector.trim())?;
    writeln!(out, "class {}", homology_class(&lat, &path)?)?;
    writeln!(out, "angle {}", h.angle)?;
    writeln!(out, "holonomy_re {}", h.value.re)?;
    writeln!(out, "holonomy_im {}", h.value.im)?;
    Ok(())
}

fn cmd_verify(cfg: &RunConfig, break_seam: bool) -> Result<(), CliError> {
    let ok = verify::run(io::stdout().lock(), cfg.seed()?, break_seam)?;
    if ok {
        Ok(())
    } else {
        Err(CliError::Failure("verification failed".into()))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Spectrum(run) => cmd_spectrum(&run.resolve()?),
        Command::Sweep { run, strict } => cmd_sweep(&run.resolve()?, strict),
        Command::Holonomy { run, loop_sel } => cmd_holonomy(&run.resolve()?, &loop_sel),
        Command::Verify { run, break_seam } => cmd_verify(&run.resolve()?, break_seam),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
