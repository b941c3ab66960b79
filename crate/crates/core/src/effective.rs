//! Four-level cascade model of the driven two-photon resonance.
//!
//! Basis: `|0⟩` ground, `|1⟩`, `|2⟩` the lower and upper states of the
//! first couplet, `|3⟩` the lower state of the second couplet. Energies are
//! carried as drive-dependent shifts `δₖ` of the bare dressed energies, and
//! every quantity here depends only on differences, so the bare cavity
//! frequency never appears.
//!
//! The master equation is written in the frame rotating at the drive
//! frequency, which makes the two-photon coupling `Ω(|0⟩⟨3| + |3⟩⟨0|)`
//! time-independent. The rate equations quoted for populations and the
//! `0–3` coherence (damping `γ` everywhere) coincide with the Lindblad form
//! when `γ = 2κ`; away from that point the Lindblad form is used as is.

use std::f64::consts::SQRT_2;

use nalgebra::{Matrix3, Vector3};
use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{ModelParams, Operator, StateVector};
use crate::liouvillian::{dissipator, DensityMatrix, Superoperator};
use crate::propagate::KrylovPropagator;
use crate::regression::{CorrelationKind, CorrelationTrace};

/// Derived quantities of the cascade model, rates and frequencies in the
/// units of the parent [`ModelParams`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourLevelParams {
    pub g: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub eps_d: f64,
    /// Drive detuning `ω_d − ω₀` of the parent model.
    pub delta_omega: f64,
    /// Two-photon Rabi frequency `Ω`.
    pub omega: f64,
    /// Shifts `δ₀..δ₃` of the dressed energies.
    pub shifts: [f64; 4],
    pub gamma31: f64,
    pub gamma32: f64,
    /// Decay rate of either first-couplet state to the ground state.
    pub gamma_c: f64,
    /// Quantum beat frequency `ν = 2g + δ₂ − δ₁`.
    pub nu: f64,
}

const EXCITATIONS: [f64; 4] = [0.0, 1.0, 1.0, 2.0];

pub fn derive_params(p: &ModelParams) -> FourLevelParams {
    let (g, kappa, gamma, eps) = (p.g, p.kappa, p.gamma, p.eps_d);
    if eps / g > 0.1 {
        log::warn!("ε_d/g = {:.3} is not small; the cascade model is outside its range", eps / g);
    }
    let s = eps * eps / g;
    let shifts = [SQRT_2 * s, -(20.0 + 19.0 * SQRT_2) / 7.0 * s, (20.0 - 19.0 * SQRT_2) / 7.0 * s, -SQRT_2 * s];
    let up = (SQRT_2 + 1.0).powi(2);
    let down = (SQRT_2 - 1.0).powi(2);
    FourLevelParams {
        g,
        kappa,
        gamma,
        eps_d: eps,
        delta_omega: p.delta_omega,
        omega: 2.0 * SQRT_2 * s,
        shifts,
        gamma31: gamma / 4.0 + up * kappa / 2.0,
        gamma32: gamma / 4.0 + down * kappa / 2.0,
        gamma_c: gamma / 2.0 + kappa,
        nu: 2.0 * g + shifts[2] - shifts[1],
    }
}

/// Detuning `ω_d − ω₀` that drives the shifted `0 ↔ 3` transition on
/// resonance: `2ω_d = Ẽ₃ − Ẽ₀`.
pub fn resonant_detuning(g: f64, eps_d: f64) -> f64 {
    -g / SQRT_2 - SQRT_2 * eps_d * eps_d / g
}

/// The alternative detuning `Δω/g = −1/√2 − 2√2 (ε_d/g)²`, twice the shift
/// of [`resonant_detuning`].
pub fn caption_detuning(g: f64, eps_d: f64) -> f64 {
    -g / SQRT_2 - 2.0 * SQRT_2 * eps_d * eps_d / g
}

pub fn resonant_drive_frequency(p: &ModelParams) -> f64 {
    resonant_detuning(p.g, p.eps_d)
}

impl FourLevelParams {
    /// Same model retuned onto the shifted two-photon resonance.
    pub fn at_resonance(&self) -> Self {
        Self { delta_omega: resonant_detuning(self.g, self.eps_d), ..self.clone() }
    }

    /// Shifted dressed energies `Ẽₖ − nₖ ω_d` in the drive frame, `nₖ`
    /// being the excitation number of each level.
    pub fn rotating_energies(&self) -> [f64; 4] {
        let bare = [0.0, -self.g, self.g, -SQRT_2 * self.g];
        let mut e = [0.0; 4];
        for k in 0..4 {
            e[k] = bare[k] + self.shifts[k] - EXCITATIONS[k] * self.delta_omega;
        }
        e
    }

    /// Emission lines relative to the drive, in ascending order. The `0 ↔ 3`
    /// entry is the two-photon transition referred to `2ω_d`, halved.
    pub fn spectral_lines(&self) -> Vec<SpectralLine> {
        let e = self.rotating_energies();
        let mut lines = vec![
            SpectralLine { label: "E3-E2".into(), omega: e[3] - e[2] },
            SpectralLine { label: "E1-E0".into(), omega: e[1] - e[0] },
            SpectralLine { label: "E3-E0".into(), omega: 0.5 * (e[3] - e[0]) },
            SpectralLine { label: "E3-E1".into(), omega: e[3] - e[1] },
            SpectralLine { label: "E2-E0".into(), omega: e[2] - e[0] },
        ];
        lines.sort_by(|a, b| a.omega.total_cmp(&b.omega));
        lines
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralLine {
    pub label: String,
    pub omega: f64,
}

/// Field and atomic lowering operators restricted to the four levels.
pub fn truncated_operators() -> (Operator, Operator) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let a = Operator::from_real_fn(4, |i, j| match (i, j) {
        (0, 1) | (0, 2) => h,
        (1, 3) => 0.5 * (SQRT_2 + 1.0),
        (2, 3) => 0.5 * (SQRT_2 - 1.0),
        _ => 0.0,
    });
    let sm = Operator::from_real_fn(4, |i, j| match (i, j) {
        (0, 1) => -h,
        (0, 2) => h,
        (1, 3) | (2, 3) => -0.5,
        _ => 0.0,
    });
    (a, sm)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteadyOccupations {
    pub p: [f64; 4],
    /// `⟨σ₊σ₋⟩_ss`
    pub excitation: f64,
}

pub fn steady_occupations(fp: &FourLevelParams) -> SteadyOccupations {
    let (g2, o2) = (fp.gamma * fp.gamma, fp.omega * fp.omega);
    let denom = g2 + 4.0 * o2;
    if denom == 0.0 {
        return SteadyOccupations { p: [1.0, 0.0, 0.0, 0.0], excitation: 0.0 };
    }
    let p3 = o2 / denom;
    let p1 = fp.gamma31 / fp.gamma_c * p3;
    let p2 = fp.gamma32 / fp.gamma_c * p3;
    SteadyOccupations { p: [1.0 - p1 - p2 - p3, p1, p2, p3], excitation: 1.5 * o2 / denom }
}

/// State left behind by a side-scattered photon detection:
/// `(2/3)|0⟩⟨0| + (1/3)|ψ⟩⟨ψ|` with `|ψ⟩ = (|1⟩ + |2⟩)/√2`.
pub fn conditional_state() -> DensityMatrix {
    let psi = StateVector::from_amplitudes(ndarray::array![
        C64::new(0.0, 0.0),
        C64::new(1.0, 0.0),
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0)
    ])
    .expect("nonzero amplitudes");
    let mut m: Array2<C64> = psi.projector() / 3.0;
    m[[0, 0]] += C64::new(2.0 / 3.0, 0.0);
    DensityMatrix::from_matrix_unchecked(m)
}

fn ket_bra(i: usize, j: usize) -> Operator {
    Operator::from_real_fn(4, |r, c| if r == i && c == j { 1.0 } else { 0.0 })
}

/// Generator of the cascade model in the drive frame.
pub fn effective_liouvillian(fp: &FourLevelParams) -> Superoperator {
    let e = fp.rotating_energies();
    let mut h = Operator::from_real_fn(4, |i, j| if i == j { e[i] } else { 0.0 });
    h = &h + &(&(&ket_bra(0, 3) + &ket_bra(3, 0)) * fp.omega);
    Superoperator::hamiltonian(&h)
        .add(&dissipator(&ket_bra(2, 3)).scaled(C64::new(fp.gamma32, 0.0)))
        .add(&dissipator(&ket_bra(1, 3)).scaled(C64::new(fp.gamma31, 0.0)))
        .add(&dissipator(&ket_bra(0, 1)).scaled(C64::new(fp.gamma_c, 0.0)))
        .add(&dissipator(&ket_bra(0, 2)).scaled(C64::new(fp.gamma_c, 0.0)))
}

/// Cascade-model states at every sample time.
pub fn evolve_effective(fp: &FourLevelParams, rho0: &DensityMatrix, tau: &[f64]) -> Result<Vec<DensityMatrix>> {
    if rho0.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: rho0.dim() });
    }
    let l = effective_liouvillian(fp);
    let picks: Vec<Vec<C64>> = (0..16)
        .map(|k| (0..16).map(|i| if i == k { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }).collect())
        .collect();
    let refs: Vec<&[C64]> = picks.iter().map(|v| v.as_slice()).collect();
    let entries = KrylovPropagator::new(&l).sample(&rho0.to_vec(), tau, &refs)?;
    Ok((0..tau.len())
        .map(|s| {
            let v: Vec<C64> = entries.iter().map(|e| e[s]).collect();
            DensityMatrix::from_vec(&v, 4)
        })
        .collect())
}

/// Closed-form populations after a detection, from the linear system for
/// `u = (D, D*, Σ)` with `Σ = ρ₃₃ − ρ₀₀`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochTrace {
    pub tau: Vec<f64>,
    pub sigma: Vec<f64>,
    pub rho33: Vec<f64>,
    /// `ρ₁₁ + ρ₂₂`
    pub intermediate: Vec<f64>,
}

pub fn bloch_matrix(fp: &FourLevelParams) -> Matrix3<C64> {
    let (g, o) = (C64::new(-fp.gamma, 0.0), fp.omega);
    let i = C64::i();
    Matrix3::new(g, C64::new(0.0, 0.0), -i * o, C64::new(0.0, 0.0), g, i * o, -2.0 * i * o, 2.0 * i * o, g)
}

pub fn bloch_solution(fp: &FourLevelParams, tau: &[f64]) -> Result<BlochTrace> {
    let m = bloch_matrix(fp);
    let b = Vector3::new(C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-fp.gamma, 0.0));
    let m_inv = m
        .try_inverse()
        .ok_or_else(|| Error::DegenerateParameters("Bloch matrix singular (γ = Ω = 0)".into()))?;
    let fixed = -(m_inv * b);
    let u0 = Vector3::new(C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-2.0 / 3.0, 0.0));
    let excess = u0 - fixed;

    // ρ₁₁ + ρ₂₂ obeys  Ṗ = −γP + 2γρ₃₃ = −2γP + γ(1 + Σ); carried along in
    // an augmented exponential with a constant component.
    let gm = fp.gamma;
    let mut aug = nalgebra::SMatrix::<C64, 5, 5>::zeros();
    aug.fixed_view_mut::<3, 3>(0, 0).copy_from(&m);
    aug[(2, 4)] = C64::new(-gm, 0.0);
    aug[(3, 2)] = C64::new(gm, 0.0);
    aug[(3, 3)] = C64::new(-2.0 * gm, 0.0);
    aug[(3, 4)] = C64::new(gm, 0.0);
    let z0 = nalgebra::SVector::<C64, 5>::from([u0[0], u0[1], u0[2], C64::new(1.0 / 3.0, 0.0), C64::new(1.0, 0.0)]);

    let mut out = BlochTrace { tau: tau.to_vec(), sigma: Vec::new(), rho33: Vec::new(), intermediate: Vec::new() };
    for &t in tau {
        if t < 0.0 {
            return Err(Error::InvalidGrid(format!("negative time {t}")));
        }
        let u = fixed + (m * C64::new(t, 0.0)).exp() * excess;
        let z = (aug * C64::new(t, 0.0)).exp() * z0;
        let sigma = u[2].re;
        let p = z[3].re;
        out.sigma.push(sigma);
        out.intermediate.push(p);
        out.rho33.push(0.5 * (1.0 - p + sigma));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct G2Coefficients {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

impl G2Coefficients {
    /// `c₄` is fixed by `1 + c₁ + c₃ + c₄ = 0`, which keeps `g²(0) = 0` exact
    /// in floating point; [`G2Coefficients::beat_amplitude`] gives the
    /// explicit expression it equals.
    pub fn new(gamma: f64, omega: f64) -> Result<Self> {
        if !(omega > 0.0) {
            return Err(Error::DegenerateParameters(format!("two-photon Rabi frequency must be positive, got {omega}")));
        }
        let o2 = omega * omega;
        let c1 = (gamma * gamma - 4.0 * o2) / (9.0 * o2);
        let c2 = -5.0 * gamma / (9.0 * omega);
        let c3 = -1.0 / 9.0;
        Ok(Self { c1, c2, c3, c4: -1.0 - c1 - c3 })
    }

    pub fn beat_amplitude(gamma: f64, omega: f64) -> f64 {
        -(gamma * gamma + 4.0 * omega * omega) / (9.0 * omega * omega)
    }

    pub fn identity_defect(&self) -> f64 {
        1.0 + self.c1 + self.c3 + self.c4
    }
}

pub fn g2_coefficients(fp: &FourLevelParams) -> Result<G2Coefficients> {
    G2Coefficients::new(fp.gamma, fp.omega)
}

/// Closed-form `g²(τ)`, symmetric in `τ`. With `include_beat = false` the
/// quantum-beat term is dropped.
pub fn g2_analytic_at(fp: &FourLevelParams, c: &G2Coefficients, tau: f64, include_beat: bool) -> f64 {
    let t = tau.abs();
    let decay = (-fp.gamma * t).exp();
    let two_omega = 2.0 * fp.omega * t;
    let mut bracket = c.c1 * two_omega.cos() + c.c2 * two_omega.sin() + c.c3 * decay;
    if include_beat {
        bracket += c.c4 * (fp.nu * t).cos();
    }
    1.0 + decay * bracket
}

pub fn g2_analytic(fp: &FourLevelParams, tau: &[f64], include_beat: bool) -> Result<CorrelationTrace> {
    let c = g2_coefficients(fp)?;
    Ok(CorrelationTrace {
        kind: CorrelationKind::AtomicG2,
        tau: tau.to_vec(),
        values: tau.iter().map(|&t| C64::new(g2_analytic_at(fp, &c, t, include_beat), 0.0)).collect(),
        coherent: None,
    })
}

/// Isolated beat contribution `c₄ e^{−γτ} cos(ντ)`.
pub fn quantum_beat_term(fp: &FourLevelParams, tau: f64) -> Result<f64> {
    let c = g2_coefficients(fp)?;
    Ok(c.c4 * (-fp.gamma * tau.abs()).exp() * (fp.nu * tau).cos())
}

/// `g²(τ)` read off cascade-model states: `tr[ρ(τ) σ₊σ₋] / ⟨σ₊σ₋⟩_ss`.
pub fn g2_from_states(fp: &FourLevelParams, states: &[DensityMatrix]) -> Result<Vec<f64>> {
    let (_, sm) = truncated_operators();
    let exc = sm.dagger().dot(&sm);
    let ss = steady_occupations(fp).excitation;
    if ss <= 0.0 {
        return Err(Error::UndefinedCorrelation("vanishing stationary excitation".into()));
    }
    states.iter().map(|r| Ok(crate::steadystate::expectation(r, &exc)?.re / ss)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fig_params(eps: f64) -> FourLevelParams {
        derive_params(&ModelParams::new(1000.0, 2.0, eps, -std::f64::consts::FRAC_1_SQRT_2)).at_resonance()
    }

    #[test]
    fn derived_rates_at_gamma_two_kappa() {
        let fp = fig_params(60.0);
        assert_relative_eq!(fp.omega, 2.0 * SQRT_2 * 3.6, epsilon = 1e-12);
        assert_relative_eq!(fp.gamma31, 2.0 + SQRT_2, epsilon = 1e-12);
        assert_relative_eq!(fp.gamma32, 2.0 - SQRT_2, epsilon = 1e-12);
        assert_relative_eq!(fp.gamma_c, 2.0, epsilon = 1e-15);
        assert_relative_eq!(fp.gamma31 + fp.gamma32, 2.0 * fp.gamma, epsilon = 1e-14);
        assert_relative_eq!(fp.nu, 2000.0 + 40.0 / 7.0 * 3.6, epsilon = 1e-9);
    }

    #[test]
    fn resonance_shift_is_negative_and_quadratic() {
        assert_eq!(resonant_detuning(1000.0, 0.0), -1000.0 / SQRT_2);
        let d1 = resonant_detuning(1000.0, 10.0) + 1000.0 / SQRT_2;
        let d2 = resonant_detuning(1000.0, 20.0) + 1000.0 / SQRT_2;
        assert!(d1 < 0.0);
        assert_relative_eq!(d2 / d1, 4.0, epsilon = 1e-9);
        assert!((resonant_detuning(1000.0, 40.0) / 1000.0 + 0.7094).abs() < 1e-4);
        let fp = fig_params(40.0);
        let e = fp.rotating_energies();
        assert!((e[3] - e[0]).abs() < 1e-9);
    }

    #[test]
    fn truncated_operator_entries() {
        let (_, sm) = truncated_operators();
        let exc = sm.dagger().dot(&sm);
        let c = |i, j| exc.get(i, j).re;
        assert_relative_eq!(c(1, 1), 0.5, epsilon = 1e-15);
        assert_relative_eq!(c(1, 2), -0.5, epsilon = 1e-15);
        assert_relative_eq!(c(3, 3), 0.5, epsilon = 1e-15);
        assert_relative_eq!(c(0, 0), 0.0);
    }

    #[test]
    fn occupations_sum_and_ratio() {
        let fp = fig_params(40.0);
        let occ = steady_occupations(&fp);
        assert_relative_eq!(occ.p.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(occ.p[1] / occ.p[2], 3.0 + 2.0 * SQRT_2, epsilon = 1e-12);
        let zero = steady_occupations(&fig_params(0.0));
        assert_eq!(zero.p, [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn conditional_state_entries() {
        let r = conditional_state();
        r.validate().unwrap();
        let m = r.matrix();
        assert_relative_eq!(m[[0, 0]].re, 2.0 / 3.0, epsilon = 1e-15);
        for (i, j) in [(1, 1), (2, 2), (1, 2), (2, 1)] {
            assert_relative_eq!(m[[i, j]].re, 1.0 / 6.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn coefficient_identity_and_limits() {
        let fp = fig_params(20.0);
        let c = g2_coefficients(&fp).unwrap();
        assert_eq!(c.identity_defect(), 0.0);
        assert_eq!(c.c3, -1.0 / 9.0);
        assert_relative_eq!(c.c4, G2Coefficients::beat_amplitude(fp.gamma, fp.omega), epsilon = 1e-14);
        assert_eq!(g2_analytic_at(&fp, &c, 0.0, true), 0.0);
        assert_relative_eq!(g2_analytic_at(&fp, &c, 0.3, true), g2_analytic_at(&fp, &c, -0.3, true));
        assert!(quantum_beat_term(&derive_params(&ModelParams::new(1000.0, 2.0, 0.0, -0.7)), 0.1).is_err());
    }

    #[test]
    fn singular_bloch_matrix() {
        let fp = derive_params(&ModelParams::new(1000.0, 0.0, 0.0, -0.7));
        assert!(matches!(bloch_solution(&fp, &[0.0]), Err(Error::DegenerateParameters(_))));
    }

    #[test]
    fn bloch_initial_values() {
        let fp = fig_params(20.0);
        let b = bloch_solution(&fp, &[0.0]).unwrap();
        assert_relative_eq!(b.sigma[0], -2.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(b.intermediate[0], 1.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(b.rho33[0], 0.0, epsilon = 1e-14);
    }
}
