//! Master-equation generator in the frame rotating at the drive frequency.
//!
//! Density matrices are vectorized column by column: entry `ρ[i, j]` sits at
//! `i + j·dim`. With this convention `AρB` becomes `(Bᵀ ⊗ A) vec(ρ)`.

use nalgebra::DMatrix;
use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::{JcOperators, ModelParams, Operator, StateVector};
use crate::sparse::CsrMatrix;

const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn vectorize(rho: &Array2<C64>) -> Vec<C64> {
    let d = rho.nrows();
    let mut v = Vec::with_capacity(d * d);
    for j in 0..d {
        for i in 0..d {
            v.push(rho[[i, j]]);
        }
    }
    v
}

pub fn unvectorize(v: &[C64], dim: usize) -> Array2<C64> {
    assert_eq!(v.len(), dim * dim, "vector length does not match dim²");
    Array2::from_shape_fn((dim, dim), |(i, j)| v[i + j * dim])
}

/// Row vector `w` with `w · vec(ρ) = tr(O ρ)`.
pub fn trace_functional(op: &Operator) -> Vec<C64> {
    // tr(Oρ) = Σ_ij O_ji ρ_ij
    let d = op.dim();
    let mut w = Vec::with_capacity(d * d);
    for j in 0..d {
        for i in 0..d {
            w.push(op.get(j, i));
        }
    }
    w
}

/// A linear map on density matrices of a `dim`-dimensional Hilbert space.
#[derive(Clone, Debug)]
pub struct Superoperator {
    dim: usize,
    matrix: CsrMatrix,
    params: Option<ModelParams>,
}

impl Superoperator {
    pub fn from_csr(dim: usize, matrix: CsrMatrix) -> Result<Self> {
        if matrix.n() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: matrix.n() });
        }
        Ok(Self { dim, matrix, params: None })
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, matrix: CsrMatrix::zeros(dim * dim), params: None }
    }

    /// `ρ ↦ AρB`
    pub fn sandwich(left: &Operator, right: &Operator) -> Self {
        let d = left.dim();
        assert_eq!(d, right.dim());
        let mut trip = Vec::new();
        let nz = |o: &Operator| -> Vec<(usize, usize, C64)> {
            let m = o.matrix();
            let mut out = Vec::new();
            for ((r, c), v) in m.indexed_iter() {
                if *v != C64::new(0.0, 0.0) {
                    out.push((r, c, *v));
                }
            }
            out
        };
        let a = nz(left);
        let b = nz(right);
        for &(i, k, aik) in &a {
            for &(l, j, blj) in &b {
                trip.push((i + j * d, k + l * d, aik * blj));
            }
        }
        Self { dim: d, matrix: CsrMatrix::from_triplets(d * d, trip), params: None }
    }

    /// `ρ ↦ Aρ`
    pub fn left(op: &Operator) -> Self {
        Self::sandwich(op, &Operator::identity(op.dim()))
    }

    /// `ρ ↦ ρB`
    pub fn right(op: &Operator) -> Self {
        Self::sandwich(&Operator::identity(op.dim()), op)
    }

    /// `ρ ↦ −i[H, ρ]`
    pub fn hamiltonian(h: &Operator) -> Self {
        Self::left(h).add(&Self::right(h).scaled(C64::new(-1.0, 0.0))).scaled(-I)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn csr(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn params(&self) -> Option<&ModelParams> {
        self.params.as_ref()
    }

    pub fn add(&self, other: &Superoperator) -> Self {
        assert_eq!(self.dim, other.dim);
        Self { dim: self.dim, matrix: self.matrix.add(&other.matrix), params: self.params.or(other.params) }
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self { dim: self.dim, matrix: self.matrix.scaled(s), params: self.params }
    }

    pub fn apply_vec(&self, v: &[C64]) -> Vec<C64> {
        self.matrix.matvec(v)
    }

    pub fn apply(&self, rho: &Array2<C64>) -> Result<Array2<C64>> {
        if rho.nrows() != self.dim || rho.ncols() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: rho.nrows() });
        }
        Ok(unvectorize(&self.apply_vec(&vectorize(rho)), self.dim))
    }

    /// Scale used for relative residual checks.
    pub fn scale(&self) -> f64 {
        self.matrix.max_abs().max(f64::MIN_POSITIVE)
    }
}

/// Lindblad dissipator `D[X]ρ = XρX† − ½{X†X, ρ}` without a rate prefactor.
pub fn dissipator(x: &Operator) -> Superoperator {
    let xd = x.dagger();
    let xdx = xd.dot(x);
    let jump = Superoperator::sandwich(x, &xd);
    let anti = Superoperator::left(&xdx).add(&Superoperator::right(&xdx));
    jump.add(&anti.scaled(C64::new(-0.5, 0.0)))
}

/// Hamiltonian in the frame rotating at the drive frequency:
/// `−Δω(a†a + σ₊σ₋) + g(aσ₊ + a†σ₋) + ε_d(a + a†)`.
pub fn rotating_hamiltonian(p: &ModelParams, ops: &JcOperators) -> Operator {
    let detune = &(&ops.num + &ops.excitation) * (-p.delta_omega);
    let coupling = &(&ops.a.dot(&ops.sp()) + &ops.a_dag().dot(&ops.sm)) * p.g;
    let drive = &(&ops.a + &ops.a_dag()) * p.eps_d;
    &(&detune + &coupling) + &drive
}

/// Full generator: `−i[H, ·] + 2κ D[a] + γ D[σ₋]`.
///
/// The cavity term is written `κ(2aρa† − a†aρ − ρa†a)` in the usual form,
/// i.e. photon number decays at `2κ`.
pub fn build_liouvillian(p: &ModelParams) -> Result<Superoperator> {
    p.validate()?;
    for w in p.regime_warnings() {
        log::warn!("{w}");
    }
    let ops = JcOperators::new(p.n_max)?;
    let h = rotating_hamiltonian(p, &ops);
    let mut l = Superoperator::hamiltonian(&h)
        .add(&dissipator(&ops.a).scaled(C64::new(2.0 * p.kappa, 0.0)));
    if p.gamma > 0.0 {
        l = l.add(&dissipator(&ops.sm).scaled(C64::new(p.gamma, 0.0)));
    }
    l.params = Some(*p);
    Ok(l)
}

/// Hermitian, unit-trace, positive semidefinite matrix (within tolerances).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(Array2<C64>);

impl DensityMatrix {
    pub const HERMITIAN_TOL: f64 = 1e-10;
    pub const TRACE_TOL: f64 = 1e-10;
    pub const POSITIVITY_TOL: f64 = 1e-8;

    /// Validates all three invariants.
    pub fn new(matrix: Array2<C64>) -> Result<Self> {
        let rho = Self(matrix);
        rho.validate()?;
        Ok(rho)
    }

    /// Wraps a matrix without checking it; used for conditioned or
    /// intermediate operators that are not states.
    pub fn from_matrix_unchecked(matrix: Array2<C64>) -> Self {
        Self(matrix)
    }

    pub fn pure(psi: &StateVector) -> Self {
        Self(psi.projector())
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

    pub fn trace(&self) -> C64 {
        self.0.diag().sum()
    }

    pub fn hermitize(&mut self) {
        let adj = self.0.t().mapv(|z| z.conj());
        self.0 = (&self.0 + &adj).mapv(|z| z * 0.5);
    }

    pub fn normalize_trace(&mut self) -> Result<()> {
        let t = self.trace();
        if t.norm() < f64::MIN_POSITIVE {
            return Err(Error::InvalidState("zero trace".into()));
        }
        self.0.mapv_inplace(|z| z / t);
        Ok(())
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((self.0[[i, j]] - self.0[[j, i]].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let d = self.dim();
        let m = DMatrix::from_fn(d, d, |i, j| 0.5 * (self.0[[i, j]] + self.0[[j, i]].conj()));
        let mut ev: Vec<f64> = nalgebra::SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.0.nrows() != self.0.ncols() {
            return Err(Error::DimensionMismatch { expected: self.0.nrows(), found: self.0.ncols() });
        }
        let herm = self.hermiticity_defect();
        if herm > Self::HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (defect {herm:.3e})")));
        }
        let t = self.trace();
        if (t - C64::new(1.0, 0.0)).norm() > Self::TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {t} differs from 1")));
        }
        let lam = self.min_eigenvalue();
        if lam < -Self::POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {lam:.3e}")));
        }
        Ok(())
    }

    pub fn to_vec(&self) -> Vec<C64> {
        vectorize(&self.0)
    }

    pub fn from_vec(v: &[C64], dim: usize) -> Self {
        Self(unvectorize(v, dim))
    }

    /// Populations along the diagonal.
    pub fn diagonal(&self) -> Array1<f64> {
        self.0.diag().mapv(|z| z.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::atomic_lowering;
    use rand::{Rng, SeedableRng};

    fn random_hermitian(d: usize, rng: &mut impl Rng) -> Array2<C64> {
        let m = Array2::from_shape_fn((d, d), |_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let adj = m.t().mapv(|z| z.conj());
        &m + &adj
    }

    #[test]
    fn vectorization_roundtrip_and_sandwich() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(1);
        let d = 4;
        let a = Operator::new(random_hermitian(d, &mut rng)).unwrap();
        let b = Operator::new(Array2::from_shape_fn((d, d), |(i, j)| C64::new(i as f64, j as f64))).unwrap();
        let rho = random_hermitian(d, &mut rng);
        assert_eq!(unvectorize(&vectorize(&rho), d), rho);
        let direct = a.matrix().dot(&rho).dot(b.matrix());
        let via = Superoperator::sandwich(&a, &b).apply(&rho).unwrap();
        let err = (&direct - &via).iter().fold(0.0_f64, |m, z| m.max(z.norm()));
        assert!(err < 1e-12);
    }

    #[test]
    fn dissipator_of_zero_is_zero() {
        let z = dissipator(&Operator::zeros(3));
        assert_eq!(z.csr().nnz(), 0);
    }

    #[test]
    fn atomic_decay_rates() {
        let d = dissipator(&atomic_lowering());
        let mut rho = Array2::zeros((2, 2));
        rho[[1, 1]] = C64::new(1.0, 0.0);
        let out = d.apply(&rho).unwrap();
        assert!((out[[0, 0]] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((out[[1, 1]] - C64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn cavity_dissipator_traceless() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let ops = JcOperators::new(4).unwrap();
        let d = dissipator(&ops.a);
        for _ in 0..20 {
            let rho = random_hermitian(ops.dim(), &mut rng);
            let out = d.apply(&rho).unwrap();
            assert!(out.diag().sum().norm() < 1e-12);
        }
    }

    #[test]
    fn undriven_vacuum_stationary() {
        let p = ModelParams::new(1000.0, 2.0, 0.0, -0.7).with_n_max(5);
        let l = build_liouvillian(&p).unwrap();
        let vac = DensityMatrix::pure(&StateVector::fock_atom(5, 0, false));
        let out = l.apply(vac.matrix()).unwrap();
        assert!(out.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn liouvillian_is_banded() {
        let p = ModelParams::new(1000.0, 2.0, 40.0, -0.7).with_n_max(10);
        let l = build_liouvillian(&p).unwrap();
        let (kl, ku) = l.csr().bandwidth();
        let d = p.dim();
        assert!(kl <= 2 * d + 2 && ku <= 2 * d + 2, "({kl}, {ku})");
    }

    #[test]
    fn density_matrix_validation() {
        let mut bad = Array2::zeros((2, 2));
        bad[[0, 0]] = C64::new(1.5, 0.0);
        bad[[1, 1]] = C64::new(-0.5, 0.0);
        assert!(matches!(DensityMatrix::new(bad), Err(Error::InvalidState(_))));
        let ok = DensityMatrix::pure(&StateVector::basis(2, 1));
        assert!(ok.validate().is_ok());
    }
}
