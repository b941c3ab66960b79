//! Truncated cavity ⊗ atom Hilbert space.
//!
//! Basis ordering is fixed everywhere: the cavity Fock index is the slow
//! index and the atom is the fast one, so `|n, s⟩` sits at `2n + s` with
//! `s = 0` for the ground state `|−⟩` and `s = 1` for the excited state `|+⟩`.
//! Every composite operator in the crate goes through [`tensor`].

use std::ops::{Add, Mul, Sub};

use ndarray::{linalg::kron, Array1, Array2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_N_MAX: usize = 30;
const HERMITIAN_TOL: f64 = 1e-12;

/// Physical parameters of the driven dissipative Jaynes-Cummings system.
///
/// All rates are expressed in units of the cavity field decay rate, so
/// `kappa` is normally 1. `delta_omega` is the drive-cavity detuning
/// `ω_d − ω₀`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub g: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub eps_d: f64,
    pub delta_omega: f64,
    pub n_max: usize,
}

impl ModelParams {
    /// Parameters in units of κ, with the detuning given as `Δω/g`.
    pub fn new(g_over_kappa: f64, gamma_over_kappa: f64, eps_over_kappa: f64, delta_over_g: f64) -> Self {
        Self {
            g: g_over_kappa,
            kappa: 1.0,
            gamma: gamma_over_kappa,
            eps_d: eps_over_kappa,
            delta_omega: delta_over_g * g_over_kappa,
            n_max: DEFAULT_N_MAX,
        }
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn with_delta_over_g(mut self, delta_over_g: f64) -> Self {
        self.delta_omega = delta_over_g * self.g;
        self
    }

    pub fn with_eps(mut self, eps_d: f64) -> Self {
        self.eps_d = eps_d;
        self
    }

    pub fn delta_over_g(&self) -> f64 {
        self.delta_omega / self.g
    }

    /// Composite Hilbert-space dimension `2 (n_max + 1)`.
    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.g, self.kappa, self.gamma, self.eps_d, self.delta_omega]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParams("non-finite rate".into()));
        }
        if self.g <= 0.0 || self.kappa <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "g and kappa must be positive (g = {}, kappa = {})",
                self.g, self.kappa
            )));
        }
        // eps_d = 0 is accepted: the undriven system is a useful limit.
        if self.eps_d < 0.0 {
            return Err(Error::InvalidParams(format!("eps_d must be non-negative, got {}", self.eps_d)));
        }
        if self.gamma < 0.0 {
            return Err(Error::InvalidParams(format!("gamma must be non-negative, got {}", self.gamma)));
        }
        if self.n_max < 3 {
            return Err(Error::InvalidTruncation(self.n_max, 3));
        }
        Ok(())
    }

    /// Soft checks of the strong-coupling, weak-drive regime. Returns one
    /// message per violated condition; callers decide whether to log them.
    pub fn regime_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.g / self.kappa < 10.0 {
            out.push(format!("g/kappa = {:.3} is not >> 1", self.g / self.kappa));
        }
        if self.eps_d / self.g > 0.1 {
            out.push(format!("eps_d/g = {:.3} is not << 1", self.eps_d / self.g));
        }
        out
    }
}

/// A square complex matrix acting on some (possibly composite) Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator(Array2<C64>);

impl Operator {
    pub fn new(matrix: Array2<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        Ok(Self(matrix))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(Array2::zeros((dim, dim)))
    }

    pub fn identity(dim: usize) -> Self {
        Self(Array2::eye(dim))
    }

    pub fn from_real_fn(dim: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        Self(Array2::from_shape_fn((dim, dim), |(i, j)| C64::new(f(i, j), 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[[i, j]]
    }

    pub fn dagger(&self) -> Self {
        Self(self.0.t().mapv(|z| z.conj()))
    }

    pub fn dot(&self, other: &Operator) -> Self {
        Self(self.0.dot(&other.0))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(self.0.mapv(|z| z * s))
    }

    pub fn commutator(&self, other: &Operator) -> Self {
        &self.dot(other) - &other.dot(self)
    }

    pub fn trace(&self) -> C64 {
        self.0.diag().sum()
    }

    pub fn apply(&self, psi: &StateVector) -> Array1<C64> {
        self.0.dot(psi.amplitudes())
    }

    /// Largest entrywise modulus of `O − O†`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.0[[i, j]] - self.0[[j, i]].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= HERMITIAN_TOL
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator(&self.0 + &rhs.0)
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator(&self.0 - &rhs.0)
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        Operator(self.0.mapv(|z| z * rhs))
    }
}

/// A normalized pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector(Array1<C64>);

impl StateVector {
    /// Normalizes the given amplitudes. Fails on a zero vector.
    pub fn from_amplitudes(amps: Array1<C64>) -> Result<Self> {
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("state vector has zero or non-finite norm".into()));
        }
        Ok(Self(amps.mapv(|z| z / norm)))
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Array1::zeros(dim);
        v[k] = C64::new(1.0, 0.0);
        Self(v)
    }

    /// `|n, s⟩` in the composite space of truncation `n_max`.
    pub fn fock_atom(n_max: usize, n: usize, excited: bool) -> Self {
        Self::basis(2 * (n_max + 1), composite_index(n, excited))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.0
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn projector(&self) -> Array2<C64> {
        let n = self.dim();
        Array2::from_shape_fn((n, n), |(i, j)| self.0[i] * self.0[j].conj())
    }
}

pub fn composite_index(n: usize, excited: bool) -> usize {
    2 * n + usize::from(excited)
}

/// Cavity annihilation operator on Fock states `0..=n_max`.
pub fn fock_annihilation(n_max: usize) -> Result<Operator> {
    if n_max < 1 {
        return Err(Error::InvalidTruncation(n_max, 1));
    }
    let d = n_max + 1;
    let mut a = Array2::zeros((d, d));
    for n in 1..d {
        a[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    Ok(Operator(a))
}

/// Two-level lowering operator `σ₋ = |g⟩⟨e|` with the ground state first.
pub fn atomic_lowering() -> Operator {
    let mut s = Array2::zeros((2, 2));
    s[[0, 1]] = C64::new(1.0, 0.0);
    Operator(s)
}

/// Kronecker product, left factor slow. Composite operators are always
/// built as `tensor(cavity, atom)`.
pub fn tensor(left: &Operator, right: &Operator) -> Operator {
    Operator(kron(&left.0, &right.0))
}

/// Elementary operators of the composite space, all built through [`tensor`].
#[derive(Clone, Debug)]
pub struct JcOperators {
    pub n_max: usize,
    /// `a ⊗ I`
    pub a: Operator,
    /// `I ⊗ σ₋`
    pub sm: Operator,
    /// `a†a ⊗ I`
    pub num: Operator,
    /// `I ⊗ σ₊σ₋`
    pub excitation: Operator,
    /// `I ⊗ σ_z`
    pub sigma_z: Operator,
    pub identity: Operator,
}

impl JcOperators {
    pub fn new(n_max: usize) -> Result<Self> {
        let a_f = fock_annihilation(n_max)?;
        let i_f = Operator::identity(n_max + 1);
        let s = atomic_lowering();
        let i_a = Operator::identity(2);
        let a = tensor(&a_f, &i_a);
        let sm = tensor(&i_f, &s);
        let num = tensor(&a_f.dagger().dot(&a_f), &i_a);
        let exc = s.dagger().dot(&s);
        let excitation = tensor(&i_f, &exc);
        let sz = &(&exc * 2.0) - &i_a;
        let sigma_z = tensor(&i_f, &sz);
        let identity = Operator::identity(2 * (n_max + 1));
        Ok(Self { n_max, a, sm, num, excitation, sigma_z, identity })
    }

    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1)
    }

    pub fn a_dag(&self) -> Operator {
        self.a.dagger()
    }

    pub fn sp(&self) -> Operator {
        self.sm.dagger()
    }

    /// `a^{†k} a^k`
    pub fn normal_ordered_power(&self, k: usize) -> Operator {
        let mut ak = Operator::identity(self.dim());
        for _ in 0..k {
            ak = ak.dot(&self.a);
        }
        ak.dagger().dot(&ak)
    }

    /// Undriven Jaynes-Cummings Hamiltonian with an explicit bare frequency.
    pub fn jc_hamiltonian(&self, omega0: f64, g: f64) -> Operator {
        let free = &(&self.num + &self.excitation) * omega0;
        let coupling = &self.a.dot(&self.sp()) + &self.a_dag().dot(&self.sm);
        &free + &(&coupling * g)
    }
}

/// The four dressed states of the ground state and the first two couplets
/// that make up the two-photon cascade:
///
/// ```text
/// |0⟩ = |0,−⟩
/// |1⟩ = (|1,−⟩ − |0,+⟩)/√2
/// |2⟩ = (|1,−⟩ + |0,+⟩)/√2
/// |3⟩ = (|2,−⟩ − |1,+⟩)/√2
/// ```
pub fn dressed_states(n_max: usize) -> Result<[StateVector; 4]> {
    if n_max < 2 {
        return Err(Error::InvalidTruncation(n_max, 2));
    }
    let d = 2 * (n_max + 1);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let combo = |terms: &[(usize, bool, f64)]| {
        let mut v = Array1::zeros(d);
        for &(n, e, c) in terms {
            v[composite_index(n, e)] += C64::new(c, 0.0);
        }
        StateVector(v)
    };
    Ok([
        combo(&[(0, false, 1.0)]),
        combo(&[(1, false, h), (0, true, -h)]),
        combo(&[(1, false, h), (0, true, h)]),
        combo(&[(2, false, h), (1, true, -h)]),
    ])
}
