//! Command-line front end: argument parsing, parameter resolution and
//! dispatch to the subcommands.

pub mod args;
mod commands;
pub mod output;
mod selfcheck;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Parser;
use hookeon::{validate, SystemParams, Tolerances, UnitSystem, ValidatedParams};

use args::{Cli, Command, Common, Format};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Malformed argument that clap itself cannot detect.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub(crate) fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Everything a subcommand needs besides its own flags.
pub(crate) struct Settings {
    pub units: UnitSystem,
    pub params: ValidatedParams,
    pub tolerances: Tolerances,
    pub format: Format,
    pub output: Option<PathBuf>,
    /// Whether `Omega` came from a flag or the config file.
    pub omega_explicit: bool,
}

fn resolve(common: &Common) -> Result<Settings> {
    let units: UnitSystem = common.units.into();
    let mut params: SystemParams = units.base_params();
    let mut omega_explicit = false;
    if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        params.apply_config(&text, units)?;
        omega_explicit |= text.lines().any(|line| {
            line.split('#').next().unwrap_or("").split('=').next().map(str::trim) == Some("Omega")
        });
    }
    for (key, value) in common.param_flags() {
        params.set(key, value, units)?;
        omega_explicit |= key == "Omega";
    }
    let mut tolerances = Tolerances::default();
    for (name, value) in common.tolerance_flags() {
        tolerances.set(name, value)?;
    }
    // the resonance band is given in atomic units of frequency squared
    let (_, time, _) = commands::atomic_scales(units);
    tolerances.resonance /= time * time;
    Ok(Settings {
        units,
        params: validate(params)?,
        tolerances,
        format: common.format,
        output: common.output.clone(),
        omega_explicit,
    })
}

fn dispatch(cli: &Cli) -> Result<()> {
    let settings = resolve(&cli.common)?;
    match &cli.command {
        Command::CmEval(a) => commands::cm_eval(&settings, a),
        Command::CmCheck(a) => commands::cm_check(&settings, a),
        Command::CmPropagate(a) => commands::cm_propagate(&settings, a),
        Command::CmCompare(a) => commands::cm_compare(&settings, a),
        Command::Taut(a) => commands::taut(&settings, a),
        Command::RadialShoot(a) => commands::radial_shoot(&settings, a),
        Command::Assemble(a) => commands::assemble(&settings, a),
        Command::Selfcheck(a) => selfcheck::run(&settings, a),
    }
}

/// Failure of a check that ran to completion.
#[derive(Debug)]
pub(crate) struct CheckFailed(pub String);

impl fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CheckFailed {}

/// Parses `argv`, runs the subcommand and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(&cli) {
        Ok(()) => EXIT_OK,
        Err(err) => report_error(&err),
    }
}

fn report_error(err: &anyhow::Error) -> i32 {
    if let Some(u) = err.downcast_ref::<UsageError>() {
        eprintln!("error: {u}");
        eprintln!("run `hookeon --help` for usage");
        return EXIT_USAGE;
    }
    if let Some(domain) = err.downcast_ref::<hookeon::Error>() {
        eprintln!("error [{}]: {domain}", domain.module());
    } else {
        eprintln!("error: {err:#}");
    }
    EXIT_DOMAIN
}
