//! Subcommand implementations behind the `polariton` binary.

pub mod config;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use polariton_core::dynamics::{propagate_reduced, steady_state, PropagationOptions, Trajectory};
use polariton_core::verify::{
    compare_generators, kossakowski_all_sectors, kossakowski_check, quasimomentum_identity,
    table1_report, TABLE1_TOLERANCE,
};
use polariton_core::{
    assemble_generator, assemble_redfield, Liouvillian, ModelBasis, ModelParams, Variant,
};
use serde_json::json;

use config::{ConfigError, OutputFormat, ResolvedRates, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "polariton",
    version,
    about = "Secular master equations for vibrational polaritons"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract equation-of-motion rows and compare them with the closed-form rate table.
    Table1 {
        #[arg(long)]
        config: PathBuf,
        /// Print the report as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Propagate the initial state and write the tracked elements.
    Evolve {
        #[arg(long)]
        config: PathBuf,
    },
    /// List entrywise differences between the corrected generator and a reference.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        against: Against,
    },
    /// Check the dark-state site-sum identity for all pairs.
    Identity {
        #[arg(long)]
        n: usize,
    },
    /// Kernel of the full Liouvillian.
    Steady {
        #[arg(long)]
        config: PathBuf,
    },
    /// Eigenvalues of the dissipator's coefficient matrix.
    Kossakowski {
        #[arg(long)]
        config: PathBuf,
        /// Report every frequency sector, not only the dephasing one.
        #[arg(long)]
        all_sectors: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Against {
    Oracle,
    Dp,
}

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Numerical(polariton_core::Error),
    Io(io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Numerical(e) => write!(f, "numerical failure: {e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<polariton_core::Error> for CliError {
    fn from(e: polariton_core::Error) -> Self {
        use polariton_core::Error::*;
        match e {
            InvalidModel(_)
            | DarkIndexOutOfRange { .. }
            | NegativeRate { .. }
            | NonFiniteRate { .. }
            | InvalidSpectrum(_)
            | InvalidState(_)
            | InvalidGrid(_) => CliError::Config(ConfigError::new("", e.to_string())),
            other => CliError::Numerical(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }
}

/// Process-level options read from the environment.
#[derive(Debug, Clone, Copy, Default)]
pub struct Environment {
    pub seed_override: Option<u64>,
}

impl Environment {
    pub fn from_env() -> Result<Self, ConfigError> {
        match std::env::var("POLARITON_SEED") {
            Ok(s) => s
                .trim()
                .parse()
                .map(|seed| Self {
                    seed_override: Some(seed),
                })
                .map_err(|_| {
                    ConfigError::new("POLARITON_SEED", format!("not an unsigned integer: `{s}`"))
                }),
            Err(_) => Ok(Self::default()),
        }
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = fs::read_to_string(path)
        .map_err(|e| ConfigError::new("", format!("cannot read {}: {e}", path.display())))?;
    config::parse(&text)
}

struct Setup {
    config: RunConfig,
    basis: ModelBasis,
    rates: ResolvedRates,
}

fn setup(path: &Path, env: Environment) -> Result<Setup, CliError> {
    let config = load_config(path)?;
    let basis = config.basis()?;
    let rates = config.rates(&basis, env.seed_override)?;
    Ok(Setup {
        config,
        basis,
        rates,
    })
}

impl Setup {
    fn generator(&self, variant: Variant) -> Result<Liouvillian, CliError> {
        Ok(assemble_generator(
            variant,
            self.config.bath.topology,
            &self.basis,
            &self.rates.rates,
        )?)
    }

    fn header(&self) -> String {
        match self.rates.seed {
            Some(seed) => format!("# seed {seed}\n"),
            None => String::new(),
        }
    }
}

/// Writes to `path` when given, otherwise to `out`.
fn emit(out: &mut dyn Write, path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, bytes)?,
        None => out.write_all(bytes)?,
    }
    Ok(())
}

/// Runs one subcommand and returns the process exit code.
pub fn run(cli: Cli, env: Environment, out: &mut dyn Write) -> Result<i32, CliError> {
    match cli.command {
        Command::Table1 { config, json } => table1(&config, json, env, out),
        Command::Evolve { config } => evolve(&config, env, out),
        Command::Compare { config, against } => compare(&config, against, env, out),
        Command::Identity { n } => identity(n, out),
        Command::Steady { config } => steady(&config, env, out),
        Command::Kossakowski {
            config,
            all_sectors,
        } => kossakowski(&config, all_sectors, env, out),
    }
}

fn table1(
    path: &Path,
    as_json: bool,
    env: Environment,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let s = setup(path, env)?;
    let report = table1_report(&s.basis, &s.rates.rates)?;
    let doc = json!({ "seed": s.rates.seed, "report": report });
    let text = serde_json::to_string_pretty(&doc).expect("report serialises") + "\n";
    let output = s.config.output();
    if output.format == OutputFormat::Json {
        if let Some(p) = &output.path {
            fs::write(p, &text)?;
        }
    }
    if as_json {
        out.write_all(text.as_bytes())?;
    } else {
        write!(out, "{}{}", s.header(), report.render())?;
        for cell in report.failures(TABLE1_TOLERANCE) {
            writeln!(
                out,
                "FAIL {} <{}> {}/{}: |diff| {:.3e} at source {}",
                cell.row,
                cell.target,
                cell.bath.as_str(),
                cell.variant.as_str(),
                cell.abs_diff,
                cell.worst_source.as_deref().unwrap_or("-")
            )?;
        }
    }
    Ok(if report.passes(TABLE1_TOLERANCE) {
        0
    } else {
        1
    })
}

fn trajectory_json(
    traj: &Trajectory,
    tracked: &[(polariton_core::StateLabel, polariton_core::StateLabel)],
    seed: Option<u64>,
) -> serde_json::Value {
    let series: Vec<_> = tracked
        .iter()
        .map(|&(a, b)| {
            let values = traj.element(a, b).unwrap_or_default();
            json!({
                "element": format!("<{a}|rho|{b}>"),
                "re": values.iter().map(|v| v.1.re).collect::<Vec<_>>(),
                "im": values.iter().map(|v| v.1.im).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({ "seed": seed, "picture": traj.picture, "t": traj.times, "series": series })
}

fn evolve(path: &Path, env: Environment, out: &mut dyn Write) -> Result<i32, CliError> {
    let s = setup(path, env)?;
    let dynamics = s.config.dynamics()?;
    dynamics.check_tracked(&s.basis)?;
    let grid = dynamics.grid()?;
    let rho0 = dynamics.initial_state(&s.basis)?;
    let tracked = dynamics.tracked_or_default();
    let l = s.generator(s.config.variant)?;
    let options = PropagationOptions {
        integrator: dynamics.integrator,
        max_step: dynamics.max_step,
    };
    let traj = propagate_reduced(&l, &rho0, grid, dynamics.picture, &tracked, options)?;
    let output = s.config.output();
    let bytes = match output.format {
        OutputFormat::Csv => {
            let mut buf = s.header().into_bytes();
            traj.write_csv(&tracked, &mut buf)?;
            buf
        }
        OutputFormat::Json => {
            let doc = trajectory_json(&traj, &tracked, s.rates.seed);
            (serde_json::to_string_pretty(&doc).expect("trajectory serialises") + "\n").into_bytes()
        }
    };
    emit(out, output.path.as_deref(), &bytes)?;
    Ok(0)
}

pub const ORACLE_TOLERANCE: f64 = 1e-10;

fn compare(
    path: &Path,
    against: Against,
    env: Environment,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let s = setup(path, env)?;
    let corrected = s.generator(Variant::Corrected)?;
    let (name, reference) = match against {
        Against::Oracle => (
            "secular Redfield",
            assemble_redfield(&s.basis, &s.rates.rates, s.config.bath.topology)?,
        ),
        Against::Dp => ("dp", s.generator(Variant::Dp)?),
    };
    let diff = compare_generators(&corrected, &reference)?;
    write!(
        out,
        "{}corrected vs {name} ({} bath, N = {})\n{}",
        s.header(),
        s.config.bath.topology.as_str(),
        s.basis.n_molecules(),
        diff.render()
    )?;
    Ok(match against {
        Against::Oracle if diff.max_abs > ORACLE_TOLERANCE => 1,
        _ => 0,
    })
}

fn identity(n: usize, out: &mut dyn Write) -> Result<i32, CliError> {
    let basis = ModelParams::new(n, 1.0, 0.1).and_then(polariton_core::build_basis)?;
    let report = quasimomentum_identity(&basis);
    writeln!(out, "max deviation {:.1e}", report.max_deviation)?;
    writeln!(
        out,
        "N = {}, {} dark pairs, worst at {:?}",
        report.n, report.pairs_checked, report.worst_pair
    )?;
    Ok(if report.passes() { 0 } else { 1 })
}

fn steady(path: &Path, env: Environment, out: &mut dyn Write) -> Result<i32, CliError> {
    let s = setup(path, env)?;
    let l = s.generator(s.config.variant)?;
    let ss = steady_state(&l)?;
    let mut smallest = ss.singular_values.clone();
    smallest.sort_by(f64::total_cmp);
    smallest.truncate(ss.dimension() + 3);
    let states: Vec<Vec<(String, f64)>> = ss
        .states
        .iter()
        .map(|rho| {
            let pop = |p| rho[(s.basis.index(p), s.basis.index(p))].re;
            s.basis
                .states()
                .iter()
                .map(|&p| (p.to_string(), pop(p)))
                .collect()
        })
        .collect();
    if s.config.output().format == OutputFormat::Json {
        let doc = json!({
            "seed": s.rates.seed,
            "kernel_dimension": ss.dimension(),
            "smallest_singular_values": smallest,
            "warning": ss.warning,
            "state_populations": states.iter().map(|d| d.iter().map(|(l, v)| (l.clone(), json!(v))).collect::<serde_json::Map<_, _>>()).collect::<Vec<_>>(),
        });
        let text = serde_json::to_string_pretty(&doc).expect("steady state serialises") + "\n";
        emit(out, s.config.output().path.as_deref(), text.as_bytes())?;
        return Ok(0);
    }
    write!(out, "{}", s.header())?;
    writeln!(out, "kernel dimension {}", ss.dimension())?;
    let sv: Vec<_> = smallest.iter().map(|x| format!("{x:.3e}")).collect();
    writeln!(out, "smallest singular values {}", sv.join(" "))?;
    if let Some(w) = &ss.warning {
        writeln!(out, "warning: {w}")?;
    }
    for (k, d) in states.iter().enumerate() {
        let pops: Vec<_> = d.iter().map(|(l, v)| format!("{l}={v:.6}")).collect();
        writeln!(out, "state {k}: {}", pops.join(" "))?;
    }
    Ok(0)
}

pub const KOSSAKOWSKI_TOLERANCE: f64 = -1e-12;

fn kossakowski(
    path: &Path,
    all: bool,
    env: Environment,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let s = setup(path, env)?;
    let l = s.generator(s.config.variant)?;
    let sectors = if all {
        kossakowski_all_sectors(&l)?
    } else {
        vec![kossakowski_check(&l)?]
    };
    write!(out, "{}", s.header())?;
    let mut ok = true;
    for k in &sectors {
        let largest = k.eigenvalues.last().copied().unwrap_or(0.0);
        writeln!(
            out,
            "sector {:+}: {} operators, min eigenvalue {:.3e}, largest {:.6e}, second largest {:.3e}",
            k.ticks,
            k.operators.len(),
            k.min_eigenvalue,
            largest,
            k.second_largest()
        )?;
        ok &= k.min_eigenvalue >= KOSSAKOWSKI_TOLERANCE;
    }
    Ok(if ok { 0 } else { 1 })
}
