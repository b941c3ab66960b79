//! Command-line runs of the preset parameter sets.
//!
//! ```text
//! sim <command> [--preset NAME] [--g-over-kappa X] [--gamma-over-kappa X]
//!     [--eps-over-kappa X] [--delta-over-g X] [--n-max N] [--tau-max X]
//!     [--out PATH] [--format csv|json] [--config PATH] ...
//! ```
//!
//! Exit status: 0 on success, 2 for invalid configuration, 3 for solver
//! failures, 4 for convergence or window failures.

pub mod config;
pub mod output;
pub mod tasks;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{Detuning, Format, Overrides, RunConfig, Task, DEFAULT_DYNAMICS_N_MAX, PRESETS};
pub use output::{render, write_report, Cell, Report, Table};
pub use tasks::*;

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "sim", about = "Photon-blockade simulations of the driven Jaynes-Cummings oscillator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Steady-state occupations, inversion and fidelities against detuning.
    SweepDetuning(Flags),
    /// Side-scattered g²(τ): closed form, closed form without beat, full model.
    G2(Flags),
    /// Incoherent fluorescence spectrum with predicted line positions.
    Spectrum(Flags),
    /// Steady-state Wigner function of the cavity field.
    Wigner(Flags),
    /// Zero-delay g_F²(0), g_F³(0) against drive strength.
    BlockadeWindow(Flags),
}

#[derive(Debug, Args, Default)]
struct Flags {
    /// Built-in parameter set: fig2, fig3a, fig3b, fig4a, fig4b, fig5a, fig5b.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    g_over_kappa: Option<f64>,
    #[arg(long)]
    gamma_over_kappa: Option<f64>,
    #[arg(long)]
    eps_over_kappa: Option<f64>,
    /// Number, or one of resonant, caption, bare2, bare3.
    #[arg(long, allow_hyphen_values = true)]
    delta_over_g: Option<String>,
    /// Steady-state truncation.
    #[arg(long)]
    n_max: Option<usize>,
    /// Truncation for correlation functions and spectra.
    #[arg(long)]
    dynamics_n_max: Option<usize>,
    #[arg(long)]
    tau_max: Option<f64>,
    #[arg(long)]
    tau_step: Option<f64>,
    /// Spectrum window lower edge, (ω − ω_d)/g.
    #[arg(long, allow_hyphen_values = true)]
    omega_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    omega_max: Option<f64>,
    #[arg(long)]
    omega_points: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    sweep_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    sweep_max: Option<f64>,
    #[arg(long)]
    sweep_steps: Option<usize>,
    /// Comma-separated ε_d/κ values.
    #[arg(long)]
    eps_list: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Analytic self-test (Lorentzian spectrum, vacuum Wigner function).
    #[arg(long)]
    selftest: bool,
}

impl Flags {
    fn overrides(&self) -> Result<Overrides> {
        Ok(Overrides {
            g_over_kappa: self.g_over_kappa,
            gamma_over_kappa: self.gamma_over_kappa,
            eps_over_kappa: self.eps_over_kappa,
            delta_over_g: self.delta_over_g.as_deref().map(str::parse).transpose()?,
            n_max: self.n_max,
            dynamics_n_max: self.dynamics_n_max,
            tau_max: self.tau_max,
            tau_step: self.tau_step,
            omega_min: self.omega_min,
            omega_max: self.omega_max,
            omega_points: self.omega_points,
            sweep_min: self.sweep_min,
            sweep_max: self.sweep_max,
            sweep_steps: self.sweep_steps,
            eps_list: self.eps_list.as_deref().map(config::parse_list).transpose()?,
            out: self.out.clone(),
            format: self.format.as_deref().map(str::parse).transpose()?,
            selftest: self.selftest.then_some(true),
        })
    }
}

/// Parses arguments (including the program name) into a resolved config.
pub fn parse_config<I, T>(args: I) -> std::result::Result<RunConfig, ParseOutcome>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(ParseOutcome::Clap)?;
    let (task, flags) = match cli.command {
        Command::SweepDetuning(f) => (Task::SweepDetuning, f),
        Command::G2(f) => (Task::G2, f),
        Command::Spectrum(f) => (Task::Spectrum, f),
        Command::Wigner(f) => (Task::Wigner, f),
        Command::BlockadeWindow(f) => (Task::BlockadeWindow, f),
    };
    let resolve = || -> Result<RunConfig> {
        let cli_over = flags.overrides()?;
        let (file_preset, file_over) = match &flags.config {
            Some(path) => Overrides::from_file(path)?,
            None => (None, Overrides::default()),
        };
        let preset = flags.preset.clone().or(file_preset);
        RunConfig::resolve(task, preset.as_deref(), &file_over, &cli_over)
    };
    resolve().map_err(ParseOutcome::Invalid)
}

#[derive(Debug)]
pub enum ParseOutcome {
    /// Help, version or a malformed command line.
    Clap(clap::Error),
    Invalid(Error),
}

/// Entry point of the `sim` binary; returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match parse_config(args) {
        Ok(cfg) => cfg,
        Err(ParseOutcome::Clap(e)) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
        Err(ParseOutcome::Invalid(e)) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    match execute(&cfg).and_then(|r| write_report(&r, &cfg).map(|w| (r, w))) {
        Ok((report, written)) => {
            for p in &written {
                eprintln!("wrote {}", p.display());
            }
            for (k, v) in &report.notes {
                log::info!("{k}: {v}");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
