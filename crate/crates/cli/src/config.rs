//! Scenario configuration: flat `key=value` files with section prefixes,
//! overridden by command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

/// Version tag written into every artifact header.
pub const ARTIFACT: &str = concat!("qsense ", env!("CARGO_PKG_VERSION"));

const PH: &str = "scenario.pseudo-hermitian.";
const EP: &str = "scenario.pt-ep.";
const VERIFY: &str = "scenario.verify.";

/// Where a configuration entry came from, for error messages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    File { path: PathBuf, line: usize },
    Flag(String),
    Metadata { line: usize },
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::File { path, line } => write!(f, "{}:{line}", path.display()),
            Origin::Flag(name) => write!(f, "--{name}"),
            Origin::Metadata { line } => write!(f, "metadata line {line}"),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("{origin}: {message}")]
    Entry { origin: Origin, message: String },

    #[error("invalid configuration: {0}")]
    Invalid(String),
}

fn entry_error(origin: &Origin, message: impl Into<String>) -> ConfigError {
    ConfigError::Entry { origin: origin.clone(), message: message.into() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    PseudoHermitian,
    PtEp,
    Verify,
}

impl Scenario {
    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::PseudoHermitian => "pseudo-hermitian",
            Scenario::PtEp => "pt-ep",
            Scenario::Verify => "verify",
        }
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pseudo-hermitian" => Ok(Scenario::PseudoHermitian),
            "pt-ep" => Ok(Scenario::PtEp),
            "verify" => Ok(Scenario::Verify),
            _ => Err(format!("unknown scenario '{s}' (expected pseudo-hermitian, pt-ep or verify)")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format '{s}' (expected csv or json)")),
        }
    }
}

/// A number, or `auto` to let the program choose.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum Auto {
    #[default]
    Auto,
    Value(f64),
}

impl fmt::Display for Auto {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Auto::Auto => f.write_str("auto"),
            Auto::Value(v) => write!(f, "{v:?}"),
        }
    }
}

impl FromStr for Auto {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Auto::Auto);
        }
        parse_f64(s).map(Auto::Value)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PseudoHermitianConfig {
    pub epsilon: f64,
    pub omega: f64,
}

impl Default for PseudoHermitianConfig {
    fn default() -> Self {
        Self { epsilon: 0.1, omega: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PtEpConfig {
    pub j: f64,
    /// Gain/loss rate; `auto` places it at the first exceptional point.
    pub gamma: Auto,
    pub omega: f64,
    pub delta: f64,
    /// Susceptibility step relative to `omega_delta`; `auto` uses the library default.
    pub step: Auto,
    /// Exceptional-point search bracket in units of `J`.
    pub ep_lo: f64,
    pub ep_hi: f64,
    pub gamma_tol: f64,
}

impl Default for PtEpConfig {
    fn default() -> Self {
        let (lo, hi) = qsense::pt_ep::DEFAULT_EP_BRACKET;
        Self { j: 1.0, gamma: Auto::Auto, omega: 3.0, delta: 0.05, step: Auto::Auto, ep_lo: lo, ep_hi: hi, gamma_tol: 1e-13 }
    }
}

/// Sample sizes of the verification suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    /// Random 4-dimensional Hamiltonian families for the channel bound.
    pub families: usize,
    /// Random instances per operator inequality.
    pub instances: usize,
    /// Monte Carlo trials for the response-energy variance.
    pub trials: usize,
    /// Repetitions per projection-noise lattice point.
    pub repeats: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { families: 100, instances: 1000, trials: 100_000, repeats: 100_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    fn default_for(scenario: Scenario) -> Self {
        match scenario {
            Scenario::PseudoHermitian => Grid { start: -0.5, stop: 0.5, count: 201 },
            Scenario::PtEp => Grid { start: 1.5, stop: 3.5, count: 201 },
            Scenario::Verify => Grid { start: 0.0, stop: 1.0, count: 2 },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub format: Format,
    pub seed: u64,
    pub tol: f64,
    pub nu: u64,
    pub grid: Grid,
    /// Output path; standard output when absent. Not part of the metadata.
    pub out: Option<PathBuf>,
    pub pseudo_hermitian: PseudoHermitianConfig,
    pub pt_ep: PtEpConfig,
    pub verify: VerifyConfig,
}

/// One `key=value` assignment with its origin.
#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub origin: Origin,
}

fn parse_f64(s: &str) -> Result<f64, String> {
    s.parse::<f64>().map_err(|_| format!("'{s}' is not a number"))
}

fn parse_value<T: FromStr>(s: &str, what: &str) -> Result<T, String> {
    s.parse::<T>().map_err(|_| format!("'{s}' is not a valid {what}"))
}

impl ScenarioConfig {
    /// Defaults for `scenario`.
    pub fn new(scenario: Scenario) -> Self {
        Self {
            scenario,
            format: Format::Csv,
            seed: 0,
            tol: qsense::evolution::DEFAULT_TOL,
            nu: 1,
            grid: Grid::default_for(scenario),
            out: None,
            pseudo_hermitian: PseudoHermitianConfig::default(),
            pt_ep: PtEpConfig::default(),
            verify: VerifyConfig::default(),
        }
    }

    /// Starts from the defaults of `scenario` and applies `entries` in order,
    /// so later entries (flags) override earlier ones (file).
    pub fn build(scenario: Scenario, entries: &[Entry]) -> Result<Self, ConfigError> {
        let mut config = Self::new(scenario);
        for e in entries {
            config.set(&e.key, &e.value).map_err(|m| entry_error(&e.origin, m))?;
        }
        config.validate()?;
        Ok(config)
    }

    /// Applies a single assignment. Unknown keys are an error.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let value = value.trim();
        match key {
            "scenario" => {
                let s: Scenario = value.parse()?;
                if s != self.scenario {
                    return Err(format!("file is for scenario '{}' but '{}' was requested", s.as_str(), self.scenario.as_str()));
                }
            }
            "format" => self.format = value.parse()?,
            "seed" => self.seed = parse_value(value, "unsigned 64-bit seed")?,
            "tol" => self.tol = parse_f64(value)?,
            "nu" => self.nu = parse_value(value, "trial count")?,
            "out" => self.out = Some(PathBuf::from(value)),
            "grid.start" => self.grid.start = parse_f64(value)?,
            "grid.stop" => self.grid.stop = parse_f64(value)?,
            "grid.count" => self.grid.count = parse_value(value, "point count")?,
            _ => {
                if let Some(k) = key.strip_prefix(PH) {
                    let ph = &mut self.pseudo_hermitian;
                    match k {
                        "epsilon" => ph.epsilon = parse_f64(value)?,
                        "omega" => ph.omega = parse_f64(value)?,
                        _ => return Err(format!("unknown key '{key}'")),
                    }
                } else if let Some(k) = key.strip_prefix(EP) {
                    let ep = &mut self.pt_ep;
                    match k {
                        "J" => ep.j = parse_f64(value)?,
                        "Gamma" => ep.gamma = value.parse()?,
                        "omega" => ep.omega = parse_f64(value)?,
                        "delta" => ep.delta = parse_f64(value)?,
                        "step" => ep.step = value.parse()?,
                        "ep_lo" => ep.ep_lo = parse_f64(value)?,
                        "ep_hi" => ep.ep_hi = parse_f64(value)?,
                        "gamma_tol" => ep.gamma_tol = parse_f64(value)?,
                        _ => return Err(format!("unknown key '{key}'")),
                    }
                } else if let Some(k) = key.strip_prefix(VERIFY) {
                    let v = &mut self.verify;
                    match k {
                        "families" => v.families = parse_value(value, "count")?,
                        "instances" => v.instances = parse_value(value, "count")?,
                        "trials" => v.trials = parse_value(value, "count")?,
                        "repeats" => v.repeats = parse_value(value, "count")?,
                        _ => return Err(format!("unknown key '{key}'")),
                    }
                } else {
                    return Err(format!("unknown key '{key}'"));
                }
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |m: String| Err(ConfigError::Invalid(m));
        if !(self.tol >= qsense::MIN_TOL && self.tol <= qsense::MAX_TOL) {
            return fail(format!("tol = {:e} outside [{:e}, {:e}]", self.tol, qsense::MIN_TOL, qsense::MAX_TOL));
        }
        if self.nu == 0 {
            return fail("nu must be at least 1".into());
        }
        let g = self.grid;
        if g.count < 2 {
            return fail(format!("grid.count = {} must be at least 2", g.count));
        }
        if !(g.start.is_finite() && g.stop.is_finite() && g.start < g.stop) {
            return fail(format!("grid.start = {} must be below grid.stop = {}", g.start, g.stop));
        }
        let ph = self.pseudo_hermitian;
        if !(ph.epsilon > 0.0 && ph.epsilon < 1.0) || !(ph.omega > 0.0 && ph.omega.is_finite()) {
            return fail(format!("pseudo-hermitian needs 0 < epsilon < 1 and omega > 0, got {} and {}", ph.epsilon, ph.omega));
        }
        let ep = self.pt_ep;
        for (name, v) in [("J", ep.j), ("omega", ep.omega), ("gamma_tol", ep.gamma_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return fail(format!("scenario.pt-ep.{name} = {v} must be positive"));
            }
        }
        if !(ep.delta >= 0.0 && ep.delta.is_finite()) {
            return fail(format!("scenario.pt-ep.delta = {} must be non-negative", ep.delta));
        }
        if let Auto::Value(g) = ep.gamma {
            if !(g >= 0.0 && g.is_finite()) {
                return fail(format!("scenario.pt-ep.Gamma = {g} must be non-negative"));
            }
        }
        if let Auto::Value(s) = ep.step {
            if !(s > 0.0 && s.is_finite()) {
                return fail(format!("scenario.pt-ep.step = {s} must be positive"));
            }
        }
        if !(ep.ep_lo > 0.0 && ep.ep_lo < ep.ep_hi && ep.ep_hi.is_finite()) {
            return fail(format!("EP bracket [{}, {}] is empty", ep.ep_lo, ep.ep_hi));
        }
        let v = self.verify;
        if v.families == 0 || v.instances == 0 || v.trials < 2 || v.repeats < 2 {
            return fail("verification sample sizes must be positive (trials and repeats at least 2)".into());
        }
        Ok(())
    }

    /// Canonical `key=value` pairs describing everything that affects the output.
    pub fn metadata(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = vec![
            ("scenario".into(), self.scenario.as_str().into()),
            ("format".into(), self.format.as_str().into()),
            ("seed".into(), self.seed.to_string()),
            ("tol".into(), format!("{:?}", self.tol)),
        ];
        let mut push = |k: String, v: String| out.push((k, v));
        match self.scenario {
            Scenario::PseudoHermitian => {
                push("nu".into(), self.nu.to_string());
                self.push_grid(&mut push);
                push(format!("{PH}epsilon"), format!("{:?}", self.pseudo_hermitian.epsilon));
                push(format!("{PH}omega"), format!("{:?}", self.pseudo_hermitian.omega));
            }
            Scenario::PtEp => {
                let ep = self.pt_ep;
                push("nu".into(), self.nu.to_string());
                self.push_grid(&mut push);
                push(format!("{EP}J"), format!("{:?}", ep.j));
                push(format!("{EP}Gamma"), ep.gamma.to_string());
                push(format!("{EP}omega"), format!("{:?}", ep.omega));
                push(format!("{EP}delta"), format!("{:?}", ep.delta));
                push(format!("{EP}step"), ep.step.to_string());
                push(format!("{EP}ep_lo"), format!("{:?}", ep.ep_lo));
                push(format!("{EP}ep_hi"), format!("{:?}", ep.ep_hi));
                push(format!("{EP}gamma_tol"), format!("{:?}", ep.gamma_tol));
            }
            Scenario::Verify => {
                let v = self.verify;
                push(format!("{VERIFY}families"), v.families.to_string());
                push(format!("{VERIFY}instances"), v.instances.to_string());
                push(format!("{VERIFY}trials"), v.trials.to_string());
                push(format!("{VERIFY}repeats"), v.repeats.to_string());
            }
        }
        out
    }

    fn push_grid(&self, push: &mut impl FnMut(String, String)) {
        push("grid.start".into(), format!("{:?}", self.grid.start));
        push("grid.stop".into(), format!("{:?}", self.grid.stop));
        push("grid.count".into(), self.grid.count.to_string());
    }

    /// Rebuilds a configuration from the `# key=value` header of an artifact.
    pub fn from_metadata(text: &str) -> Result<Self, ConfigError> {
        let mut entries = Vec::new();
        let mut scenario = None;
        for (k, raw) in text.lines().enumerate() {
            let Some(body) = raw.strip_prefix("# ") else { break };
            let Some((key, value)) = body.split_once('=') else { continue };
            let (key, value) = (key.trim(), value.trim());
            if key == "artifact" || key.starts_with("resolved.") {
                continue;
            }
            let origin = Origin::Metadata { line: k + 1 };
            if key == "scenario" {
                scenario = Some(value.parse::<Scenario>().map_err(|m| entry_error(&origin, m))?);
            }
            entries.push(Entry { key: key.into(), value: value.into(), origin });
        }
        let scenario = scenario.ok_or_else(|| ConfigError::Invalid("metadata has no scenario line".into()))?;
        Self::build(scenario, &entries)
    }
}

/// Reads `key=value` lines. Blank lines and lines starting with `#` are skipped.
pub fn read_entries(path: &Path) -> Result<Vec<Entry>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
    parse_entries(&text, path)
}

pub fn parse_entries(text: &str, path: &Path) -> Result<Vec<Entry>, ConfigError> {
    let mut entries = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let origin = Origin::File { path: path.to_path_buf(), line: k + 1 };
        let Some((key, value)) = line.split_once('=') else {
            return Err(entry_error(&origin, format!("expected key=value, found '{line}'")));
        };
        let key = key.trim();
        if key.is_empty() {
            return Err(entry_error(&origin, "empty key"));
        }
        // Reject unknown keys here so the message carries the file line.
        if !KEYS.contains(&key) {
            return Err(entry_error(&origin, format!("unknown key '{key}'")));
        }
        entries.push(Entry { key: key.into(), value: value.trim().into(), origin });
    }
    Ok(entries)
}

/// Every key accepted in a configuration file.
pub const KEYS: &[&str] = &[
    "scenario",
    "format",
    "seed",
    "tol",
    "nu",
    "out",
    "grid.start",
    "grid.stop",
    "grid.count",
    "scenario.pseudo-hermitian.epsilon",
    "scenario.pseudo-hermitian.omega",
    "scenario.pt-ep.J",
    "scenario.pt-ep.Gamma",
    "scenario.pt-ep.omega",
    "scenario.pt-ep.delta",
    "scenario.pt-ep.step",
    "scenario.pt-ep.ep_lo",
    "scenario.pt-ep.ep_hi",
    "scenario.pt-ep.gamma_tol",
    "scenario.verify.families",
    "scenario.verify.instances",
    "scenario.verify.trials",
    "scenario.verify.repeats",
];
