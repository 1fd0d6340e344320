//! Command-line front end for the qsense library: figure-data sweeps and scans,
//! exceptional-point location and the verification suite.

pub mod config;
pub mod output;
pub mod suite;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use qsense::pseudo_hermitian::{self, SweepRow, SweepSpec};
use qsense::pt_ep::{self, EpScanRow, PtEpParams, ScanSpec};

use config::{Auto, ConfigError, Entry, Format, Origin, Scenario, ScenarioConfig};
use output::{Cell, Table};
use suite::Suite;

#[derive(Debug, Parser)]
#[command(name = "qsense", version, about = "Quantum Fisher information bounds for Hermitian and non-Hermitian sensors")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Configuration file of key=value lines; flags override its values
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output file [default: standard output]
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Output format [default: csv]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Worker threads [default: one per core]
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    /// Seed of the random streams used by `verify` [default: 0]
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,

    /// Integrator tolerance, within [1e-13, 1e-6] [default: 1e-10]
    #[arg(long, global = true, value_name = "FLOAT")]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// First grid point (grid.start)
    #[arg(long)]
    pub start: Option<f64>,

    /// Last grid point (grid.stop)
    #[arg(long)]
    pub stop: Option<f64>,

    /// Number of grid points, at least 2 (grid.count)
    #[arg(long)]
    pub count: Option<usize>,

    /// Measurement repetitions (nu) [default: 1]
    #[arg(long)]
    pub nu: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep lambda for the pseudo-Hermitian sensor at t = tau [grid default: -0.5..0.5, 201 points]
    SweepPh {
        #[command(flatten)]
        grid: GridArgs,

        /// Non-Hermiticity, 0 < epsilon < 1 [default: 0.1]
        #[arg(long)]
        epsilon: Option<f64>,

        /// Qubit frequency [default: 1]
        #[arg(long)]
        omega: Option<f64>,
    },

    /// Scan the perturbation frequency near an exceptional point of the PT dimer [grid default: 1.5..3.5, 201 points]
    ScanEp {
        #[command(flatten)]
        grid: GridArgs,

        #[command(flatten)]
        ep: EpArgs,

        /// Gain/loss rate, or `auto` for the first exceptional point [default: auto]
        #[arg(long)]
        gamma: Option<String>,

        /// Perturbation amplitude [default: 0.05]
        #[arg(long)]
        delta: Option<f64>,

        /// Susceptibility step relative to omega_delta, or `auto` for 1e-5 [default: auto]
        #[arg(long)]
        step: Option<String>,
    },

    /// Locate the first exceptional point of the driven PT dimer in Gamma
    FindEp {
        #[command(flatten)]
        ep: EpArgs,
    },

    /// Run the inequality and agreement suite and write a report
    Verify {
        /// Random 4-dimensional families for the channel bound [default: 100]
        #[arg(long)]
        families: Option<usize>,

        /// Random instances per operator inequality [default: 1000]
        #[arg(long)]
        instances: Option<usize>,

        /// Monte Carlo trials of the response-energy variance [default: 100000]
        #[arg(long)]
        trials: Option<usize>,

        /// Repetitions per projection-noise lattice point [default: 100000]
        #[arg(long)]
        repeats: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct EpArgs {
    /// Coupling J [default: 1]
    #[arg(long = "J", alias = "j")]
    pub j: Option<f64>,

    /// Drive frequency [default: 3]
    #[arg(long)]
    pub omega: Option<f64>,

    /// Lower end of the Gamma bracket in units of J [default: 0.01]
    #[arg(long)]
    pub ep_lo: Option<f64>,

    /// Upper end of the Gamma bracket in units of J [default: 3]
    #[arg(long)]
    pub ep_hi: Option<f64>,

    /// Bisection tolerance on Gamma [default: 1e-13]
    #[arg(long)]
    pub gamma_tol: Option<f64>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("numerical failure: {0}")]
    Numerical(#[from] qsense::Error),

    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },

    #[error("cannot start the worker pool: {0}")]
    Threads(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Threads(_) | CliError::Write { .. } => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

/// Result of a completed run.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub text: String,
    /// False when a verification check failed.
    pub pass: bool,
}

fn flag<T: ToString>(entries: &mut Vec<Entry>, name: &str, key: &str, value: &Option<T>) {
    if let Some(v) = value {
        entries.push(Entry { key: key.into(), value: v.to_string(), origin: Origin::Flag(name.into()) });
    }
}

fn float_flag(entries: &mut Vec<Entry>, name: &str, key: &str, value: Option<f64>) {
    flag(entries, name, key, &value.map(|v| format!("{v:?}")));
}

impl Cli {
    pub fn scenario(&self) -> Scenario {
        match self.command {
            Command::SweepPh { .. } => Scenario::PseudoHermitian,
            Command::ScanEp { .. } | Command::FindEp { .. } => Scenario::PtEp,
            Command::Verify { .. } => Scenario::Verify,
        }
    }

    /// Entries given on the command line, applied after the file.
    fn flag_entries(&self) -> Vec<Entry> {
        let mut e = Vec::new();
        let c = &self.common;
        flag(&mut e, "out", "out", &c.out.as_ref().map(|p| p.display().to_string()));
        flag(&mut e, "format", "format", &c.format.map(Format::as_str));
        flag(&mut e, "seed", "seed", &c.seed);
        float_flag(&mut e, "tol", "tol", c.tol);
        let grid = |e: &mut Vec<Entry>, g: &GridArgs| {
            float_flag(e, "start", "grid.start", g.start);
            float_flag(e, "stop", "grid.stop", g.stop);
            flag(e, "count", "grid.count", &g.count);
            flag(e, "nu", "nu", &g.nu);
        };
        let ep_args = |e: &mut Vec<Entry>, a: &EpArgs| {
            float_flag(e, "J", "scenario.pt-ep.J", a.j);
            float_flag(e, "omega", "scenario.pt-ep.omega", a.omega);
            float_flag(e, "ep-lo", "scenario.pt-ep.ep_lo", a.ep_lo);
            float_flag(e, "ep-hi", "scenario.pt-ep.ep_hi", a.ep_hi);
            float_flag(e, "gamma-tol", "scenario.pt-ep.gamma_tol", a.gamma_tol);
        };
        match &self.command {
            Command::SweepPh { grid: g, epsilon, omega } => {
                grid(&mut e, g);
                float_flag(&mut e, "epsilon", "scenario.pseudo-hermitian.epsilon", *epsilon);
                float_flag(&mut e, "omega", "scenario.pseudo-hermitian.omega", *omega);
            }
            Command::ScanEp { grid: g, ep, gamma, delta, step } => {
                grid(&mut e, g);
                ep_args(&mut e, ep);
                flag(&mut e, "gamma", "scenario.pt-ep.Gamma", gamma);
                float_flag(&mut e, "delta", "scenario.pt-ep.delta", *delta);
                flag(&mut e, "step", "scenario.pt-ep.step", step);
            }
            Command::FindEp { ep } => ep_args(&mut e, ep),
            Command::Verify { families, instances, trials, repeats } => {
                flag(&mut e, "families", "scenario.verify.families", families);
                flag(&mut e, "instances", "scenario.verify.instances", instances);
                flag(&mut e, "trials", "scenario.verify.trials", trials);
                flag(&mut e, "repeats", "scenario.verify.repeats", repeats);
            }
        }
        e
    }

    /// The configuration file, if any, overridden by the flags.
    pub fn config(&self) -> Result<ScenarioConfig, ConfigError> {
        let mut entries = match &self.common.config {
            Some(path) => config::read_entries(path)?,
            None => Vec::new(),
        };
        entries.extend(self.flag_entries());
        ScenarioConfig::build(self.scenario(), &entries)
    }
}

fn sweep_table(config: &ScenarioConfig) -> Result<Table, CliError> {
    let spec = SweepSpec {
        epsilon: config.pseudo_hermitian.epsilon,
        omega: config.pseudo_hermitian.omega,
        nu: config.nu,
        lam_start: config.grid.start,
        lam_stop: config.grid.stop,
        count: config.grid.count,
        tol: config.tol,
    };
    let rows = pseudo_hermitian::sweep(&spec)?;
    let mut columns: Vec<String> = SweepRow::COLUMNS.iter().map(|c| c.to_string()).collect();
    let json = config.format == Format::Json;
    if json {
        columns.push("flag".into());
    }
    let rows = rows
        .iter()
        .map(|r| {
            let mut cells: Vec<Cell> = r.values().iter().map(|&v| Cell::Number(v)).collect();
            if json {
                cells.push(Cell::Text(r.flag.clone()));
            }
            cells
        })
        .collect();
    Ok(Table { metadata: config.metadata(), resolved: Vec::new(), columns, rows })
}

/// Model parameters with `Gamma = auto` resolved; the second value is set when it was located.
fn ep_params(config: &ScenarioConfig) -> Result<(PtEpParams, Option<f64>), CliError> {
    let ep = config.pt_ep;
    let (gamma, located) = match ep.gamma {
        Auto::Value(g) => (g, None),
        Auto::Auto => {
            let g = pt_ep::find_ep(ep.j, ep.omega, ep.ep_lo * ep.j, ep.ep_hi * ep.j, ep.gamma_tol, config.tol)?;
            (g, Some(g))
        }
    };
    let params = PtEpParams::new(ep.j, gamma, ep.omega, ep.delta, config.grid.start, config.nu)?;
    Ok((params, located))
}

fn scan_table(config: &ScenarioConfig) -> Result<Table, CliError> {
    let (params, located) = ep_params(config)?;
    let relative_step = match config.pt_ep.step {
        Auto::Auto => None,
        Auto::Value(s) => Some(s),
    };
    let spec = ScanSpec {
        params,
        start: config.grid.start,
        stop: config.grid.stop,
        count: config.grid.count,
        tol: config.tol,
        relative_step,
    };
    let rows = pt_ep::scan(&spec)?;
    let columns = EpScanRow::COLUMNS.iter().map(|c| c.to_string()).collect();
    let rows = rows
        .iter()
        .map(|r| {
            let mut cells: Vec<Cell> = r.values().iter().map(|&v| Cell::Number(v)).collect();
            cells.push(Cell::Text(r.excluded_reason.clone()));
            cells
        })
        .collect();
    let resolved = located.map(|g| vec![("Gamma".to_string(), g)]).unwrap_or_default();
    Ok(Table { metadata: config.metadata(), resolved, columns, rows })
}

fn find_ep_table(config: &ScenarioConfig) -> Result<Table, CliError> {
    let ep = config.pt_ep;
    let gamma = pt_ep::find_ep(ep.j, ep.omega, ep.ep_lo * ep.j, ep.ep_hi * ep.j, ep.gamma_tol, config.tol)?;
    let c0 = PtEpParams::new(ep.j, gamma, ep.omega, ep.delta, config.grid.start, config.nu)?.c0();
    let columns = ["J", "omega", "Gamma_EP", "C0"].map(String::from).to_vec();
    let rows = vec![[ep.j, ep.omega, gamma, c0].map(Cell::Number).to_vec()];
    Ok(Table { metadata: config.metadata(), resolved: Vec::new(), columns, rows })
}

/// Runs `command` under `config` and renders the artifact.
pub fn run(command: &Command, config: &ScenarioConfig) -> Result<Artifact, CliError> {
    let (table, pass) = match command {
        Command::SweepPh { .. } => (sweep_table(config)?, true),
        Command::ScanEp { .. } => (scan_table(config)?, true),
        Command::FindEp { .. } => (find_ep_table(config)?, true),
        Command::Verify { .. } => {
            let suite = Suite { seed: config.seed, tol: config.tol, sizes: config.verify };
            let report = suite::run_all(&suite)?;
            (output::report_table(&report, config.metadata()), report.pass())
        }
    };
    let text = match config.format {
        Format::Csv => output::render_csv(&table),
        Format::Json => output::render_json(&table),
    };
    Ok(Artifact { text, pass })
}

fn execute(cli: &Cli) -> Result<bool, CliError> {
    let config = cli.config()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.common.threads {
        pool = pool.num_threads(n);
    }
    let artifact = pool.build()?.install(|| run(&cli.command, &config))?;
    match &config.out {
        Some(path) => std::fs::write(path, &artifact.text).map_err(|source| CliError::Write { path: path.clone(), source })?,
        None => print!("{}", artifact.text),
    }
    Ok(artifact.pass)
}

/// Exit codes: 0 success, 1 configuration error, 2 numerical failure, 3 failed verification.
pub fn main_with(cli: &Cli) -> ExitCode {
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("qsense: verification failed");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("qsense: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
