//! Two-time correlations by the quantum regression theorem, and their
//! one-sided Fourier transforms.
//!
//! A correlation `⟨A(0) B(τ) C(0)⟩` is evaluated as `tr[B e^{Lτ}(C ρ_ss A)]`
//! with the same rotating-frame generator used for the steady state.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{JcOperators, Operator};
use crate::liouvillian::{trace_functional, vectorize, DensityMatrix, Superoperator};
use crate::propagate::KrylovPropagator;
use crate::steadystate::expectation;

/// Ordered sample times starting at zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauGrid(Vec<f64>);

impl TauGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        match times.first() {
            None => return Err(Error::InvalidGrid("empty tau grid".into())),
            Some(&t0) if t0 != 0.0 => return Err(Error::InvalidGrid(format!("tau grid must start at 0, got {t0}"))),
            _ => {}
        }
        if let Some(w) = times.windows(2).find(|w| w[1] <= w[0] || !w[1].is_finite()) {
            return Err(Error::InvalidGrid(format!("tau grid not strictly increasing at {} -> {}", w[0], w[1])));
        }
        Ok(Self(times))
    }

    /// `0, step, 2·step, …` up to the first point at or beyond `t_max`.
    pub fn uniform(step: f64, t_max: f64) -> Result<Self> {
        if !(step > 0.0 && t_max > 0.0 && step.is_finite() && t_max.is_finite()) {
            return Err(Error::InvalidGrid(format!("invalid uniform grid: step {step}, t_max {t_max}")));
        }
        let n = (t_max / step - 1e-9).ceil() as usize;
        Self::new((0..=n).map(|k| k as f64 * step).collect())
    }

    /// Step of at most a twentieth of the beat period `2π/ν`, window `10/γ`.
    pub fn beat_resolved(nu: f64, gamma: f64) -> Result<Self> {
        Self::uniform(2.0 * PI / nu / 20.0, 10.0 / gamma)
    }

    /// Every other interval split in two.
    pub fn refined(&self) -> Self {
        let mut out = Vec::with_capacity(2 * self.0.len());
        for w in self.0.windows(2) {
            out.push(w[0]);
            out.push(0.5 * (w[0] + w[1]));
        }
        out.push(*self.0.last().unwrap());
        Self(out)
    }

    pub fn times(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> f64 {
        *self.0.last().unwrap()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorrelationKind {
    AtomicG2,
    FieldG2,
    FirstOrderAtomic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTrace {
    pub kind: CorrelationKind,
    pub tau: Vec<f64>,
    pub values: Vec<C64>,
    /// Stationary coherent part `|⟨σ₋⟩|²` removed from a first-order trace.
    pub coherent: Option<f64>,
}

impl CorrelationTrace {
    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTrace {
    /// Angular frequency in units of κ, relative to the drive for spectra.
    pub omega: Vec<f64>,
    pub values: Vec<f64>,
}

impl SpectrumTrace {
    pub fn argmax_in(&self, lo: f64, hi: f64) -> Option<usize> {
        (0..self.omega.len())
            .filter(|&i| self.omega[i] >= lo && self.omega[i] <= hi)
            .max_by(|&a, &b| self.values[a].total_cmp(&self.values[b]))
    }

    /// Indices of strict local maxima (interior points only).
    pub fn local_maxima(&self) -> Vec<usize> {
        (1..self.values.len().saturating_sub(1))
            .filter(|&i| self.values[i] > self.values[i - 1] && self.values[i] > self.values[i + 1])
            .collect()
    }
}

/// `e^{Lt} ρ₀`
pub fn evolve(l: &Superoperator, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    if rho0.dim() != l.dim() {
        return Err(Error::DimensionMismatch { expected: l.dim(), found: rho0.dim() });
    }
    let out = KrylovPropagator::new(l).evolve_vec(&rho0.to_vec(), t)?;
    Ok(DensityMatrix::from_vec(&out, l.dim()))
}

/// Normalized intensity correlation of the light emitted through `jump`:
/// `tr{[e^{Lτ} (J ρ_ss J†/N)] J†J} / ⟨J†J⟩_ss`.
pub fn g2_for(
    l: &Superoperator,
    rho_ss: &DensityMatrix,
    jump: &Operator,
    tau: &TauGrid,
    kind: CorrelationKind,
) -> Result<CorrelationTrace> {
    check_dims(l, rho_ss, jump)?;
    let n_op = jump.dagger().dot(jump);
    let mean = expectation(rho_ss, &n_op)?.re;
    if mean <= 1e-12 {
        return Err(Error::UndefinedCorrelation(format!("stationary intensity {mean:.3e} vanishes")));
    }
    let cond = jump.matrix().dot(rho_ss.matrix()).dot(jump.dagger().matrix());
    let norm = cond.diag().sum().re;
    let v0: Vec<C64> = vectorize(&cond).into_iter().map(|z| z / norm).collect();
    let w = trace_functional(&n_op);
    let out = KrylovPropagator::new(l).sample(&v0, tau.times(), &[&w])?;
    let values = out.into_iter().next().unwrap().into_iter().map(|z| z / mean).collect();
    Ok(CorrelationTrace { kind, tau: tau.times().to_vec(), values, coherent: None })
}

fn check_dims(l: &Superoperator, rho: &DensityMatrix, op: &Operator) -> Result<()> {
    for d in [rho.dim(), op.dim()] {
        if d != l.dim() {
            return Err(Error::DimensionMismatch { expected: l.dim(), found: d });
        }
    }
    Ok(())
}

fn jc_ops_for(l: &Superoperator) -> Result<JcOperators> {
    let d = l.dim();
    if d % 2 != 0 || d < 8 {
        return Err(Error::DimensionMismatch { expected: 2 * (d / 2).max(4), found: d });
    }
    JcOperators::new(d / 2 - 1)
}

/// Intensity correlation of side-scattered (atomic) fluorescence.
pub fn g2_atomic(l: &Superoperator, rho_ss: &DensityMatrix, tau: &TauGrid) -> Result<CorrelationTrace> {
    let ops = jc_ops_for(l)?;
    g2_for(l, rho_ss, &ops.sm, tau, CorrelationKind::AtomicG2)
}

/// Intensity correlation of the forwards-scattered (cavity) field.
pub fn g2_field(l: &Superoperator, rho_ss: &DensityMatrix, tau: &TauGrid) -> Result<CorrelationTrace> {
    let ops = jc_ops_for(l)?;
    g2_for(l, rho_ss, &ops.a, tau, CorrelationKind::FieldG2)
}

/// `⟨a†ⁿ aⁿ⟩ / ⟨a†a⟩ⁿ` for a field annihilation operator `a`.
pub fn gn_zero_delay_with(rho: &DensityMatrix, a: &Operator, n: u32) -> Result<f64> {
    if !(2..=3).contains(&n) {
        return Err(Error::InvalidParams(format!("zero-delay order must be 2 or 3, got {n}")));
    }
    let mut an = Operator::identity(a.dim());
    for _ in 0..n {
        an = an.dot(a);
    }
    let mean = expectation(rho, &a.dagger().dot(a))?.re;
    if mean <= 1e-12 {
        return Err(Error::UndefinedCorrelation(format!("mean photon number {mean:.3e} vanishes")));
    }
    let num = expectation(rho, &an.dagger().dot(&an))?.re;
    Ok(num / mean.powi(n as i32))
}

/// Zero-delay forwards-scattered `g_F^{(n)}(0)` of a composite-space state.
pub fn gn_zero_delay(rho_ss: &DensityMatrix, n: u32) -> Result<f64> {
    let d = rho_ss.dim();
    if d % 2 != 0 || d < 8 {
        return Err(Error::DimensionMismatch { expected: 2 * (d / 2).max(4), found: d });
    }
    let ops = JcOperators::new(d / 2 - 1)?;
    gn_zero_delay_with(rho_ss, &ops.a, n)
}

/// Incoherent part of `⟨σ₊(0)σ₋(τ)⟩_ss`, i.e. `⟨Δσ₊(0)Δσ₋(τ)⟩` with
/// `Δσ₋ = σ₋ − ⟨σ₋⟩_ss`. The initial operator `ρ_ss Δσ₊` is traceless, so
/// the trace decays to zero instead of to the coherent level.
pub fn first_order_atomic(l: &Superoperator, rho_ss: &DensityMatrix, tau: &TauGrid) -> Result<CorrelationTrace> {
    let ops = jc_ops_for(l)?;
    first_order_for(l, rho_ss, &ops.sm, tau)
}

pub fn first_order_for(l: &Superoperator, rho_ss: &DensityMatrix, lower: &Operator, tau: &TauGrid) -> Result<CorrelationTrace> {
    check_dims(l, rho_ss, lower)?;
    let mean_lower = expectation(rho_ss, lower)?;
    let raise = lower.dagger();
    let shifted = &raise - &Operator::identity(raise.dim()).scale(mean_lower.conj());
    let x0 = rho_ss.matrix().dot(shifted.matrix());
    let w = trace_functional(lower);
    let out = KrylovPropagator::new(l).sample(&vectorize(&x0), tau.times(), &[&w])?;
    Ok(CorrelationTrace {
        kind: CorrelationKind::FirstOrderAtomic,
        tau: tau.times().to_vec(),
        values: out.into_iter().next().unwrap(),
        coherent: Some(mean_lower.norm_sqr()),
    })
}

/// Requires `|C(τ_end)| ≤ rel_threshold · max|C|`.
pub fn check_window(values: &[C64], rel_threshold: f64) -> Result<()> {
    let peak = values.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    let tail = values.last().map_or(0.0, |z| z.norm());
    let threshold = rel_threshold * peak;
    if tail > threshold {
        return Err(Error::WindowTooShort { tail, threshold });
    }
    Ok(())
}

pub const SPECTRUM_WINDOW_TOL: f64 = 1e-6;
pub const FOURIER_WINDOW_TOL: f64 = 1e-3;

/// `∫₀^{τ_end} e^{iωτ} f(τ) dτ` by the trapezoidal rule, for each ω. Safe
/// for nonuniform grids; phasors are advanced multiplicatively across runs
/// of equal spacing.
pub fn one_sided_transform(tau: &[f64], f: &[C64], omega: &[f64]) -> Vec<C64> {
    assert_eq!(tau.len(), f.len());
    omega
        .par_iter()
        .map(|&w| {
            if tau.len() < 2 {
                return C64::new(0.0, 0.0);
            }
            let mut acc = C64::new(0.0, 0.0);
            let mut phase = C64::from_polar(1.0, w * tau[0]);
            let mut last_dt = f64::NAN;
            let mut step = C64::new(1.0, 0.0);
            for k in 0..tau.len() - 1 {
                let dt = tau[k + 1] - tau[k];
                if dt != last_dt {
                    step = C64::from_polar(1.0, w * dt);
                    last_dt = dt;
                }
                let next = phase * step;
                acc += 0.5 * dt * (phase * f[k] + next * f[k + 1]);
                phase = next;
                // re-anchor occasionally to keep rounding drift bounded
                if k % 4096 == 4095 {
                    phase = C64::from_polar(1.0, w * tau[k + 1]);
                }
            }
            acc
        })
        .collect()
}

/// `S(ω) = (1/π) Re ∫₀^∞ e^{iωτ} C(τ) dτ` of an incoherent correlation.
pub fn spectrum(corr: &CorrelationTrace, omega_grid: &[f64]) -> Result<SpectrumTrace> {
    check_window(&corr.values, SPECTRUM_WINDOW_TOL)?;
    let ft = one_sided_transform(&corr.tau, &corr.values, omega_grid);
    Ok(SpectrumTrace { omega: omega_grid.to_vec(), values: ft.iter().map(|z| z.re / PI).collect() })
}

/// `|∫₀ e^{iωτ} [g²(τ) − 1] dτ|`.
pub fn fourier_magnitude(corr: &CorrelationTrace, omega_grid: &[f64]) -> Result<SpectrumTrace> {
    let centred: Vec<C64> = corr.values.iter().map(|z| z - 1.0).collect();
    check_window(&centred, FOURIER_WINDOW_TOL)?;
    let ft = one_sided_transform(&corr.tau, &centred, omega_grid);
    Ok(SpectrumTrace { omega: omega_grid.to_vec(), values: ft.iter().map(|z| z.norm()).collect() })
}

/// Frequency resolution `2π/τ_end` of a transform over the window.
pub fn fourier_bin(tau_end: f64) -> f64 {
    2.0 * PI / tau_end
}

/// `[0, ω_max]` sampled at a quarter of the natural bin.
pub fn fourier_grid(omega_max: f64, tau_end: f64) -> Vec<f64> {
    let step = fourier_bin(tau_end) / 4.0;
    let n = (omega_max / step).ceil() as usize;
    (0..=n).map(|k| k as f64 * step).collect()
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{fock_annihilation, ModelParams, StateVector};
    use crate::liouvillian::build_liouvillian;
    use crate::steadystate::steady_state;

    #[test]
    fn tau_grid_validation() {
        assert!(TauGrid::new(vec![]).is_err());
        assert!(TauGrid::new(vec![0.1, 0.2]).is_err());
        assert!(TauGrid::new(vec![0.0, 0.2, 0.2]).is_err());
        let g = TauGrid::uniform(0.25, 1.0).unwrap();
        assert_eq!(g.times(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(g.refined().len(), 9);
    }

    #[test]
    fn lorentzian_from_exponential() {
        let gamma = 1.0;
        let tau = TauGrid::uniform(1e-3, 20.0).unwrap();
        let corr = CorrelationTrace {
            kind: CorrelationKind::FirstOrderAtomic,
            values: tau.times().iter().map(|t| C64::new((-gamma * t).exp(), 0.0)).collect(),
            tau: tau.times().to_vec(),
            coherent: None,
        };
        let omega = linspace(-5.0, 5.0, 101);
        let s = spectrum(&corr, &omega).unwrap();
        for (w, v) in s.omega.iter().zip(&s.values) {
            let want = gamma / (PI * (gamma * gamma + w * w));
            assert!((v - want).abs() < 1e-6, "ω={w}: {v} vs {want}");
        }
        let peak = s.argmax_in(-5.0, 5.0).unwrap();
        assert!(s.omega[peak].abs() < 1e-12);
    }

    #[test]
    fn short_window_rejected() {
        let tau = TauGrid::uniform(0.01, 1.0).unwrap();
        let corr = CorrelationTrace {
            kind: CorrelationKind::FirstOrderAtomic,
            values: tau.times().iter().map(|t| C64::new((-t).exp(), 0.0)).collect(),
            tau: tau.times().to_vec(),
            coherent: None,
        };
        assert!(matches!(spectrum(&corr, &[0.0]), Err(Error::WindowTooShort { .. })));
    }

    #[test]
    fn zero_delay_of_fock_and_coherent_states() {
        let a = fock_annihilation(40).unwrap();
        let one = DensityMatrix::pure(&StateVector::basis(41, 1));
        assert!(gn_zero_delay_with(&one, &a, 2).unwrap().abs() < 1e-14);
        // coherent state |α⟩ with α = 1.2, built from its Poisson amplitudes
        let alpha: f64 = 1.2;
        let mut amps = ndarray::Array1::zeros(41);
        let mut c = (-alpha * alpha / 2.0).exp();
        for n in 0..41 {
            if n > 0 {
                c *= alpha / (n as f64).sqrt();
            }
            amps[n] = C64::new(c, 0.0);
        }
        let coh = DensityMatrix::pure(&StateVector::from_amplitudes(amps).unwrap());
        for n in [2, 3] {
            assert!((gn_zero_delay_with(&coh, &a, n).unwrap() - 1.0).abs() < 1e-10);
        }
        let vac = DensityMatrix::pure(&StateVector::basis(41, 0));
        assert!(matches!(gn_zero_delay_with(&vac, &a, 2), Err(Error::UndefinedCorrelation(_))));
    }

    #[test]
    fn evolve_preserves_trace_and_steady_state() {
        let p = ModelParams::new(1000.0, 2.0, 40.0, -0.7094).with_n_max(6);
        let l = build_liouvillian(&p).unwrap();
        let rho = steady_state(&l).unwrap();
        let same = evolve(&l, &rho, 0.0).unwrap();
        assert_eq!(same, rho);
        let later = evolve(&l, &rho, 0.37).unwrap();
        let err = (later.matrix() - rho.matrix()).iter().fold(0.0_f64, |m, z| m.max(z.norm()));
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn undefined_g2_without_excitation() {
        let p = ModelParams::new(1000.0, 2.0, 0.0, -0.7).with_n_max(4);
        let l = build_liouvillian(&p).unwrap();
        let rho = steady_state(&l).unwrap();
        let tau = TauGrid::uniform(0.1, 1.0).unwrap();
        assert!(matches!(g2_atomic(&l, &rho, &tau), Err(Error::UndefinedCorrelation(_))));
    }
}
