//! The computations behind each command, plus the pipeline helpers they
//! share with the examples and tests.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::config::{RunConfig, Task};
use super::output::{Cell, Report, Table};
use crate::effective::{derive_params, g2_analytic, FourLevelParams};
use crate::error::{Error, Result};
use crate::hilbert::ModelParams;
use crate::liouvillian::{build_liouvillian, DensityMatrix};
use crate::observables::{atomic_inversion, default_wigner_grid, fidelity_m, fock_occupations, partial_trace_atom, wigner, WignerMap};
use crate::regression::{
    first_order_atomic, fourier_grid, fourier_magnitude, g2_atomic, gn_zero_delay, linspace, spectrum, CorrelationKind,
    CorrelationTrace, SpectrumTrace, TauGrid,
};
use crate::steadystate::{expectation, steady_state};

/// Steady state of the full model with the field diagnostics used in the
/// detuning sweep.
#[derive(Clone, Debug)]
pub struct SteadyPoint {
    pub rho: DensityMatrix,
    pub field: DensityMatrix,
    pub occupations: Vec<f64>,
    pub inversion: f64,
    pub photon_number: f64,
}

pub fn steady_point(p: &ModelParams) -> Result<SteadyPoint> {
    let l = build_liouvillian(p)?;
    let rho = steady_state(&l)?;
    let field = partial_trace_atom(&rho)?;
    let occupations = fock_occupations(&field);
    let inversion = atomic_inversion(&rho)?;
    let photon_number = occupations.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
    Ok(SteadyPoint { rho, field, occupations, inversion, photon_number })
}

/// Full-model atomic `g²(τ)`.
pub fn numeric_g2(p: &ModelParams, tau: &TauGrid) -> Result<CorrelationTrace> {
    let l = build_liouvillian(p)?;
    let rho = steady_state(&l)?;
    g2_atomic(&l, &rho, tau)
}

/// Incoherent fluorescence spectrum of the full model against `ω − ω_d`
/// (in units of κ).
pub fn fluorescence_spectrum(p: &ModelParams, tau: &TauGrid, omega: &[f64]) -> Result<SpectrumTrace> {
    let l = build_liouvillian(p)?;
    let rho = steady_state(&l)?;
    let corr = first_order_atomic(&l, &rho, tau)?;
    spectrum(&corr, omega)
}

/// Forwards-scattered zero-delay correlations `(g_F²(0), g_F³(0))`.
pub fn zero_delay_pair(p: &ModelParams) -> Result<(f64, f64)> {
    let s = steady_point(p)?;
    Ok((gn_zero_delay(&s.rho, 2)?, gn_zero_delay(&s.rho, 3)?))
}

pub fn blockade_label(g2: f64, g3: f64) -> &'static str {
    if g3 < 1.0 && 1.0 < g2 {
        "two-photon-blockade"
    } else if g3 < g2 && g2 < 1.0 {
        "antibunched"
    } else if g2 < 1.0 {
        "sub-poissonian"
    } else {
        "bunched"
    }
}

/// Largest value of a transform within `[lo, hi]`: `(ω, magnitude)`.
pub fn peak_in(trace: &SpectrumTrace, lo: f64, hi: f64) -> Option<(f64, f64)> {
    trace.argmax_in(lo, hi).map(|i| (trace.omega[i], trace.values[i]))
}

/// Local maxima of a sampled curve, highest first: `(ω, value)`.
pub fn dominant_maxima(trace: &SpectrumTrace, count: usize) -> Vec<(f64, f64)> {
    let mut m: Vec<(f64, f64)> = trace.local_maxima().into_iter().map(|i| (trace.omega[i], trace.values[i])).collect();
    m.sort_by(|a, b| b.1.total_cmp(&a.1));
    m.truncate(count);
    m
}

pub fn execute(cfg: &RunConfig) -> Result<Report> {
    match cfg.task {
        Task::SweepDetuning => sweep_detuning(cfg),
        Task::G2 => g2_report(cfg),
        Task::Spectrum => spectrum_report(cfg),
        Task::Wigner => wigner_report(cfg),
        Task::BlockadeWindow => blockade_window(cfg),
    }
}

pub fn sweep_detuning(cfg: &RunConfig) -> Result<Report> {
    let points = if cfg.sweep_steps == 1 {
        vec![cfg.params.delta_over_g()]
    } else {
        linspace(cfg.sweep_min, cfg.sweep_max, cfg.sweep_steps)
    };
    let rows: Vec<Vec<Cell>> = points
        .par_iter()
        .map(|&d| {
            let p = cfg.params.with_delta_over_g(d);
            match steady_point(&p) {
                Ok(s) => {
                    let occ = |n: usize| s.occupations.get(n).copied().unwrap_or(0.0);
                    let fid = |m: usize| fidelity_m(&s.field, m).unwrap_or(f64::NAN);
                    vec![
                        d.into(),
                        s.inversion.into(),
                        occ(0).into(),
                        occ(1).into(),
                        occ(2).into(),
                        (1.0 - occ(3)).into(),
                        fid(1).into(),
                        fid(2).into(),
                        s.photon_number.into(),
                        "ok".into(),
                    ]
                }
                Err(e) => {
                    log::warn!("Δω/g = {d}: {e}");
                    let mut row: Vec<Cell> = vec![d.into()];
                    row.extend(std::iter::repeat(Cell::Num(f64::NAN)).take(8));
                    row.push(Cell::Text(format!("failed: {e}").replace(',', ";")));
                    row
                }
            }
        })
        .collect();
    let mut t = Table::new(
        "sweep",
        &["delta_over_g[1]", "sigma_z[1]", "P0[1]", "P1[1]", "P2[1]", "one_minus_P3[1]", "F1[1]", "F2[1]", "n_mean[photons]", "status"],
    );
    let failures = rows.iter().filter(|r| matches!(r.last(), Some(Cell::Text(s)) if s != "ok")).count();
    t.rows = rows;
    let mut r = Report::new(t);
    r.note("failed_points", failures);
    Ok(r)
}

fn fft_table(name: &str, g: f64, traces: &[(&str, &SpectrumTrace)]) -> Table {
    let mut cols = vec!["omega_over_g[1]", "omega[kappa]"];
    cols.extend(traces.iter().map(|(c, _)| *c));
    let mut t = Table::new(name, &cols);
    for i in 0..traces[0].1.omega.len() {
        let w = traces[0].1.omega[i];
        let mut row: Vec<Cell> = vec![(w / g).into(), w.into()];
        row.extend(traces.iter().map(|(_, s)| Cell::Num(s.values[i])));
        t.push(row);
    }
    t
}

pub fn g2_report(cfg: &RunConfig) -> Result<Report> {
    let fp: FourLevelParams = derive_params(&cfg.params);
    let tau = TauGrid::uniform(cfg.tau_step, cfg.tau_max)?;
    let analytic = g2_analytic(&fp, tau.times(), true)?;
    let no_beat = g2_analytic(&fp, tau.times(), false)?;
    let numeric = numeric_g2(&cfg.dynamics_params(), &tau)?;
    let mut t = Table::new(
        "g2",
        &["tau[1/kappa]", "tau[2pi/nu]", "g2_analytic[1]", "g2_analytic_no_beat[1]", "g2_numeric[1]"],
    );
    for (k, &s) in tau.times().iter().enumerate() {
        t.push(vec![
            s.into(),
            (s * fp.nu / (2.0 * PI)).into(),
            analytic.values[k].re.into(),
            no_beat.values[k].re.into(),
            numeric.values[k].re.into(),
        ]);
    }
    let grid = fourier_grid(3.5 * fp.g, tau.last());
    let ft_num = fourier_magnitude(&numeric, &grid)?;
    let ft_ana = fourier_magnitude(&analytic, &grid)?;
    let mut r = Report::new(t);
    r.sidecars.push(fft_table("fft", fp.g, &[("fft_numeric[1/kappa]", &ft_num), ("fft_analytic[1/kappa]", &ft_ana)]));
    r.note("Omega[kappa]", fp.omega);
    r.note("nu[kappa]", fp.nu);
    r.note("dynamics_n_max", cfg.dynamics_n_max);
    r.note("g2_numeric_at_zero", numeric.values[0].re);
    if let Some((w, m)) = peak_in(&ft_num, fp.g, 3.5 * fp.g) {
        r.note("fft_numeric_peak_over_g", w / fp.g);
        r.note("fft_numeric_peak_magnitude", m);
    }
    Ok(r)
}

pub fn spectrum_report(cfg: &RunConfig) -> Result<Report> {
    let g = cfg.params.g;
    let omega: Vec<f64> = linspace(cfg.omega_min * g, cfg.omega_max * g, cfg.omega_points);
    let tau = TauGrid::uniform(cfg.tau_step, cfg.tau_max)?;
    if cfg.selftest {
        // e^{−γτ} has the Lorentzian γ/(π(γ² + ω²)) as its spectrum
        let gam = if cfg.params.gamma > 0.0 { cfg.params.gamma } else { 1.0 };
        let corr = CorrelationTrace {
            kind: CorrelationKind::FirstOrderAtomic,
            tau: tau.times().to_vec(),
            values: tau.times().iter().map(|t| C64::new((-gam * t).exp(), 0.0)).collect(),
            coherent: None,
        };
        let s = spectrum(&corr, &omega)?;
        let dev = s.omega.iter().zip(&s.values).map(|(w, v)| (v - gam / (PI * (gam * gam + w * w))).abs()).fold(0.0, f64::max);
        let mut r = Report::new(spectrum_table(&s, g));
        r.note("selftest", "lorentzian");
        r.note("selftest_max_deviation", dev);
        return Ok(r);
    }
    let s = fluorescence_spectrum(&cfg.dynamics_params(), &tau, &omega)?;
    let lines = derive_params(&cfg.params).spectral_lines();
    let bin = omega[1] - omega[0];
    let maxima = s.local_maxima();
    let mut peaks = Table::new("peaks", &["line", "predicted_over_g[1]", "nearest_max_over_g[1]", "offset[bins]", "S_at_max[1/kappa]"]);
    for line in &lines {
        let nearest = maxima.iter().min_by(|&&a, &&b| (s.omega[a] - line.omega).abs().total_cmp(&(s.omega[b] - line.omega).abs()));
        match nearest {
            Some(&i) => peaks.push(vec![
                line.label.clone().into(),
                (line.omega / g).into(),
                (s.omega[i] / g).into(),
                ((s.omega[i] - line.omega) / bin).into(),
                s.values[i].into(),
            ]),
            None => peaks.push(vec![line.label.clone().into(), (line.omega / g).into(), f64::NAN.into(), f64::NAN.into(), f64::NAN.into()]),
        }
    }
    let mut r = Report::new(spectrum_table(&s, g));
    r.sidecars.push(peaks);
    r.note("dynamics_n_max", cfg.dynamics_n_max);
    r.note("bin[kappa]", bin);
    Ok(r)
}

fn spectrum_table(s: &SpectrumTrace, g: f64) -> Table {
    let mut t = Table::new("spectrum", &["omega_minus_drive_over_g[1]", "omega_minus_drive[kappa]", "S[1/kappa]"]);
    for (w, v) in s.omega.iter().zip(&s.values) {
        t.push(vec![(w / g).into(), (*w).into(), (*v).into()]);
    }
    t
}

/// Steady-state Wigner function of the intracavity field on the default
/// grid.
pub fn steady_wigner(p: &ModelParams) -> Result<WignerMap> {
    let s = steady_point(p)?;
    let grid = default_wigner_grid();
    wigner(&s.field, &grid, &grid)
}

pub fn wigner_report(cfg: &RunConfig) -> Result<Report> {
    let grid = default_wigner_grid();
    let maps: Vec<(f64, WignerMap)> = if cfg.selftest {
        let vac = DensityMatrix::pure(&crate::hilbert::StateVector::basis(cfg.params.n_max + 1, 0));
        vec![(f64::NAN, wigner(&vac, &grid, &grid)?)]
    } else {
        cfg.wigner_detunings
            .par_iter()
            .map(|&d| Ok((d, steady_wigner(&cfg.params.with_delta_over_g(d))?)))
            .collect::<Result<_>>()?
    };
    let mut t = Table::new("wigner", &["delta_over_g[1]", "x[1]", "y[1]", "W[1]"]);
    let mut notes = Vec::new();
    for (k, (d, m)) in maps.iter().enumerate() {
        for (iy, &y) in m.y.iter().enumerate() {
            for (ix, &x) in m.x.iter().enumerate() {
                t.push(vec![(*d).into(), x.into(), y.into(), m.at(ix, iy).into()]);
            }
        }
        let (px, py) = m.principal_peak();
        notes.push((format!("map{k}_delta_over_g"), d.to_string()));
        notes.push((format!("map{k}_normalization"), m.normalization.to_string()));
        notes.push((format!("map{k}_truncation_warning"), m.truncation_warning.to_string()));
        notes.push((format!("map{k}_local_maxima"), m.local_maxima(0.05).len().to_string()));
        notes.push((format!("map{k}_principal_peak_angle[rad]"), py.atan2(px).to_string()));
        if m.truncation_warning {
            log::warn!("Wigner map at Δω/g = {d}: normalization {:.4}", m.normalization);
        }
    }
    let mut r = Report::new(t);
    r.notes = notes;
    if cfg.selftest {
        r.note("selftest", "vacuum");
    }
    Ok(r)
}

pub fn blockade_window(cfg: &RunConfig) -> Result<Report> {
    let d = cfg.params.delta_over_g();
    let rows: Vec<Vec<Cell>> = cfg
        .eps_list
        .par_iter()
        .map(|&eps| {
            let p = cfg.params.with_eps(eps);
            let sp = steady_point(&p)?;
            let pair = gn_zero_delay(&sp.rho, 2).and_then(|g2| Ok((g2, gn_zero_delay(&sp.rho, 3)?)));
            let (g2, g3) = match pair {
                Ok(v) => v,
                Err(Error::UndefinedCorrelation(_)) => (f64::NAN, f64::NAN),
                Err(e) => return Err(e),
            };
            let n = sp.photon_number;
            let label = if g2.is_nan() { "undefined" } else { blockade_label(g2, g3) };
            Ok(vec![eps.into(), g2.into(), g3.into(), n.into(), label.into()])
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new("blockade", &["eps_over_kappa[1]", "gF2_0[1]", "gF3_0[1]", "n_mean[photons]", "class"]);
    t.rows = rows;
    let mut r = Report::new(t);
    r.note("delta_over_g", d);
    Ok(r)
}

/// Consistency check used by the examples: steady-state excitation of the
/// full model against the cascade prediction.
pub fn excitation_pair(p: &ModelParams) -> Result<(f64, f64)> {
    let l = build_liouvillian(p)?;
    let rho = steady_state(&l)?;
    let ops = crate::hilbert::JcOperators::new(p.n_max)?;
    let full = expectation(&rho, &ops.excitation)?.re;
    let cascade = crate::effective::steady_occupations(&derive_params(p)).excitation;
    Ok((full, cascade))
}
