//! Run configuration: built-in presets, flat key-value config files and
//! command-line flags, merged in that order of increasing precedence.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::effective::{caption_detuning, derive_params, resonant_detuning};
use crate::error::{Error, Result};
use crate::hilbert::{ModelParams, DEFAULT_N_MAX};

/// Truncation used for time-dependent work. Steady-state photon
/// distributions in the weak-drive regime fall below 1e-15 well before
/// twelve photons, and propagation cost grows with the largest Liouvillian
/// frequency, which scales with the truncation.
pub const DEFAULT_DYNAMICS_N_MAX: usize = 12;

pub const PRESETS: [&str; 7] = ["fig2", "fig3a", "fig3b", "fig4a", "fig4b", "fig5a", "fig5b"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    SweepDetuning,
    G2,
    Spectrum,
    Wigner,
    BlockadeWindow,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::SweepDetuning => "sweep-detuning",
            Task::G2 => "g2",
            Task::Spectrum => "spectrum",
            Task::Wigner => "wigner",
            Task::BlockadeWindow => "blockade-window",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format '{other}' (csv|json)"))),
        }
    }
}

/// Drive detuning, either explicit (`Δω/g`) or tied to a named resonance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Detuning {
    Value(f64),
    /// Two-photon resonance including the drive-induced level shifts.
    Resonant,
    /// Alternative shifted value with twice the level-shift correction.
    Caption,
    /// Bare two-photon resonance `−1/√2`.
    Bare2,
    /// Bare three-photon resonance `−1/√3`.
    Bare3,
}

impl Detuning {
    pub fn over_g(self, g: f64, eps_d: f64) -> f64 {
        match self {
            Detuning::Value(v) => v,
            Detuning::Resonant => resonant_detuning(g, eps_d) / g,
            Detuning::Caption => caption_detuning(g, eps_d) / g,
            Detuning::Bare2 => -FRAC_1_SQRT_2,
            Detuning::Bare3 => -1.0 / 3f64.sqrt(),
        }
    }
}

impl FromStr for Detuning {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "resonant" => Ok(Detuning::Resonant),
            "caption" => Ok(Detuning::Caption),
            "bare2" => Ok(Detuning::Bare2),
            "bare3" => Ok(Detuning::Bare3),
            other => other
                .parse::<f64>()
                .map(Detuning::Value)
                .map_err(|_| Error::Config(format!("bad detuning '{other}' (number or resonant|caption|bare2|bare3)"))),
        }
    }
}

impl fmt::Display for Detuning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Detuning::Value(v) => write!(f, "{v}"),
            Detuning::Resonant => f.write_str("resonant"),
            Detuning::Caption => f.write_str("caption"),
            Detuning::Bare2 => f.write_str("bare2"),
            Detuning::Bare3 => f.write_str("bare3"),
        }
    }
}

/// Partially specified settings from one source.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub g_over_kappa: Option<f64>,
    pub gamma_over_kappa: Option<f64>,
    pub eps_over_kappa: Option<f64>,
    pub delta_over_g: Option<Detuning>,
    pub n_max: Option<usize>,
    pub dynamics_n_max: Option<usize>,
    pub tau_max: Option<f64>,
    pub tau_step: Option<f64>,
    pub omega_min: Option<f64>,
    pub omega_max: Option<f64>,
    pub omega_points: Option<usize>,
    pub sweep_min: Option<f64>,
    pub sweep_max: Option<f64>,
    pub sweep_steps: Option<usize>,
    pub eps_list: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub selftest: Option<bool>,
}

macro_rules! merge_fields {
    ($dst:ident, $src:ident; $($f:ident),*) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f.clone(); } )*
    };
}

impl Overrides {
    /// Fields set in `other` win.
    pub fn merged(mut self, other: &Overrides) -> Self {
        merge_fields!(self, other; g_over_kappa, gamma_over_kappa, eps_over_kappa, delta_over_g, n_max,
            dynamics_n_max, tau_max, tau_step, omega_min, omega_max, omega_points, sweep_min, sweep_max,
            sweep_steps, eps_list, out, format, selftest);
        self
    }

    pub fn preset(name: &str) -> Result<Self> {
        let base = Overrides {
            g_over_kappa: Some(1000.0),
            gamma_over_kappa: Some(2.0),
            delta_over_g: Some(Detuning::Resonant),
            ..Default::default()
        };
        let eps = |e: f64| Overrides { eps_over_kappa: Some(e), ..Default::default() };
        let extra = match name {
            "fig2" => Overrides { sweep_min: Some(-1.05), sweep_max: Some(-0.5), sweep_steps: Some(111), ..eps(40.0) },
            "fig3a" | "fig4a" => eps(20.0),
            "fig3b" | "fig4b" | "fig5a" => eps(60.0),
            "fig5b" => Overrides { delta_over_g: Some(Detuning::Bare3), ..eps(60.0) },
            other => return Err(Error::Config(format!("unknown preset '{other}' (one of {})", PRESETS.join(", ")))),
        };
        Ok(base.merged(&extra))
    }

    /// Flat `key = value` (or `key value`) lines; keys are the long flag
    /// names; `#` starts a comment. A `preset` key is returned separately.
    pub fn parse_file_text(text: &str) -> Result<(Option<String>, Self)> {
        let mut o = Overrides::default();
        let mut preset = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .or_else(|| line.split_once(char::is_whitespace))
                .map(|(k, v)| (k.trim().trim_start_matches("--"), v.trim()))
                .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value'", lineno + 1)))?;
            if key == "preset" {
                preset = Some(value.to_string());
            } else {
                o.set(key, value).map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
            }
        }
        Ok((preset, o))
    }

    pub fn from_file(path: &Path) -> Result<(Option<String>, Self)> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse_file_text(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::Config(format!("{key}: cannot parse '{v}'")))
        }
        match key {
            "g-over-kappa" => self.g_over_kappa = Some(num(key, value)?),
            "gamma-over-kappa" => self.gamma_over_kappa = Some(num(key, value)?),
            "eps-over-kappa" => self.eps_over_kappa = Some(num(key, value)?),
            "delta-over-g" => self.delta_over_g = Some(value.parse()?),
            "n-max" => self.n_max = Some(num(key, value)?),
            "dynamics-n-max" => self.dynamics_n_max = Some(num(key, value)?),
            "tau-max" => self.tau_max = Some(num(key, value)?),
            "tau-step" => self.tau_step = Some(num(key, value)?),
            "omega-min" => self.omega_min = Some(num(key, value)?),
            "omega-max" => self.omega_max = Some(num(key, value)?),
            "omega-points" => self.omega_points = Some(num(key, value)?),
            "sweep-min" => self.sweep_min = Some(num(key, value)?),
            "sweep-max" => self.sweep_max = Some(num(key, value)?),
            "sweep-steps" => self.sweep_steps = Some(num(key, value)?),
            "eps-list" => self.eps_list = Some(parse_list(value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = Some(value.parse()?),
            "selftest" => self.selftest = Some(num(key, value)?),
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }
}

pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad number '{x}' in list"))))
        .collect()
}

/// Fully resolved settings of one command invocation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub task: Task,
    pub preset: Option<String>,
    /// Steady-state model; `n_max` is the steady-state truncation.
    pub params: ModelParams,
    pub detuning: Detuning,
    pub dynamics_n_max: usize,
    pub tau_max: f64,
    pub tau_step: f64,
    /// Spectrum window, `(ω − ω_d)/g`.
    pub omega_min: f64,
    pub omega_max: f64,
    pub omega_points: usize,
    pub sweep_min: f64,
    pub sweep_max: f64,
    pub sweep_steps: usize,
    pub eps_list: Vec<f64>,
    pub wigner_detunings: Vec<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub selftest: bool,
}

impl RunConfig {
    pub fn resolve(task: Task, preset: Option<&str>, file: &Overrides, cli: &Overrides) -> Result<Self> {
        // without a preset the fig2 operating point is the default
        let base = Overrides::preset(preset.unwrap_or("fig2"))?;
        let o = base.merged(file).merged(cli);
        let g = o.g_over_kappa.unwrap_or(1000.0);
        let gamma = o.gamma_over_kappa.unwrap_or(2.0);
        let eps = o.eps_over_kappa.unwrap_or(40.0);
        let explicit = cli.delta_over_g.or(file.delta_over_g);
        let detuning = match (task, explicit) {
            // the blockade window is scanned at the bare two-photon resonance
            (Task::BlockadeWindow, None) => Detuning::Bare2,
            _ => o.delta_over_g.unwrap_or(Detuning::Resonant),
        };
        let n_max = o.n_max.unwrap_or(DEFAULT_N_MAX);
        let params = ModelParams::new(g, gamma, eps, detuning.over_g(g, eps)).with_n_max(n_max);
        params.validate()?;

        let decay = if gamma > 0.0 { gamma } else { 1.0 };
        let nu = derive_params(&params).nu;
        let (tau_max, tau_step) = match task {
            // beat resolved with 20 samples per period, window 10/γ
            Task::G2 => (o.tau_max.unwrap_or(10.0 / decay), o.tau_step.unwrap_or(2.0 * PI / nu / 20.0)),
            // lines out to ~2g from the drive, 16 samples per period at 2g
            _ => (o.tau_max.unwrap_or(20.0 / decay), o.tau_step.unwrap_or(2.0 * PI / (2.0 * g) / 16.0)),
        };
        let omega_min = o.omega_min.unwrap_or(-2.2);
        let omega_max = o.omega_max.unwrap_or(2.2);
        // about four points per κ
        let omega_points = o.omega_points.unwrap_or(((omega_max - omega_min) * g * 4.0).round() as usize + 1);

        let cfg = RunConfig {
            task,
            preset: preset.map(str::to_string),
            params,
            detuning,
            dynamics_n_max: o.dynamics_n_max.unwrap_or(DEFAULT_DYNAMICS_N_MAX.min(n_max)),
            tau_max,
            tau_step,
            omega_min,
            omega_max,
            omega_points,
            sweep_min: o.sweep_min.unwrap_or(-1.05),
            sweep_max: o.sweep_max.unwrap_or(-0.5),
            sweep_steps: o.sweep_steps.unwrap_or(111),
            eps_list: o.eps_list.unwrap_or_else(|| vec![3.0, 10.0, 12.0, 15.0, 20.0, 26.0, 30.0, 40.0]),
            wigner_detunings: match explicit {
                Some(d) => vec![d.over_g(g, eps)],
                None => vec![-1.0 / 1.40, -FRAC_1_SQRT_2, -1.0 / 1.42],
            },
            out: o.out,
            format: o.format.unwrap_or_default(),
            selftest: o.selftest.unwrap_or(false),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.dynamics_n_max < 3 {
            return bad(format!("dynamics-n-max must be at least 3, got {}", self.dynamics_n_max));
        }
        if !(self.tau_max > 0.0 && self.tau_step > 0.0 && self.tau_step < self.tau_max) {
            return bad(format!("need 0 < tau-step < tau-max (got {} and {})", self.tau_step, self.tau_max));
        }
        if !(self.omega_max > self.omega_min) || self.omega_points < 2 {
            return bad("spectrum window needs omega-max > omega-min and at least two points".into());
        }
        if self.sweep_steps == 0 || (self.sweep_steps > 1 && !(self.sweep_max > self.sweep_min)) {
            return bad("sweep needs sweep-steps >= 1 and sweep-max > sweep-min".into());
        }
        if self.eps_list.iter().any(|e| !(*e >= 0.0)) {
            return bad("eps-list entries must be non-negative".into());
        }
        Ok(())
    }

    pub fn with_params(&self, params: ModelParams) -> Self {
        Self { params, ..self.clone() }
    }

    pub fn dynamics_params(&self) -> ModelParams {
        self.params.with_n_max(self.dynamics_n_max)
    }
}
