//! Stationary states of a Liouvillian.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::Operator;
use crate::liouvillian::{DensityMatrix, Superoperator};
use crate::sparse::{BandedLu, CsrMatrix};

const PIVOT_TOL: f64 = 1e-12;
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SteadyStateMethod {
    /// Replace one diagonal equation of `Lρ = 0` by a normalization
    /// constraint and solve directly.
    #[default]
    RowReplacement,
    /// Shifted inverse iteration for the eigenvector closest to zero.
    InverseIteration,
}

/// Unique stationary state of `l`, Hermitized and normalized.
pub fn steady_state(l: &Superoperator) -> Result<DensityMatrix> {
    steady_state_with(l, SteadyStateMethod::RowReplacement)
}

pub fn steady_state_with(l: &Superoperator, method: SteadyStateMethod) -> Result<DensityMatrix> {
    let raw = match method {
        SteadyStateMethod::RowReplacement => solve_row_replacement(l)?,
        SteadyStateMethod::InverseIteration => solve_inverse_iteration(l)?,
    };
    let mut rho = DensityMatrix::from_vec(&raw, l.dim());
    rho.normalize_trace()?;
    rho.hermitize();
    rho.validate().map_err(|e| Error::SolverFailure(format!("steady state failed validation: {e}")))?;
    Ok(rho)
}

/// Pins `ρ_kk = 1` in place of the `k`-th diagonal equation. The diagonal
/// rows of `L` sum to zero (trace preservation), so one of them is redundant
/// and the pinned system is regular whenever the kernel is one-dimensional
/// and `ρ_kk ≠ 0`. Normalizing afterwards is the same as imposing `tr ρ = 1`
/// on that row. Diagonal indices are tried in order; if every choice is
/// singular the kernel is degenerate.
fn solve_row_replacement(l: &Superoperator) -> Result<Vec<C64>> {
    let d = l.dim();
    let n = d * d;
    for k in 0..d {
        let row = k * (d + 1);
        let pinned = pin_row(l.csr(), row);
        match BandedLu::factor(&pinned, PIVOT_TOL) {
            Ok(lu) => {
                let mut b = vec![ZERO; n];
                b[row] = C64::new(1.0, 0.0);
                lu.solve_in_place(&mut b);
                if b.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                    return Ok(b);
                }
            }
            Err(sp) => {
                log::debug!("pinning diagonal {k} singular at pivot {} ({:.3e})", sp.index, sp.magnitude);
            }
        }
    }
    Err(Error::AmbiguousSteadyState(
        "normalized system singular for every pinned population: kernel is not one-dimensional".into(),
    ))
}

fn pin_row(a: &CsrMatrix, row: usize) -> CsrMatrix {
    let mut t: Vec<_> = a.triplets().into_iter().filter(|&(r, _, _)| r != row).collect();
    t.push((row, row, C64::new(1.0, 0.0)));
    CsrMatrix::from_triplets(a.n(), t)
}

fn solve_inverse_iteration(l: &Superoperator) -> Result<Vec<C64>> {
    let n = l.dim() * l.dim();
    let shift = C64::new(-1e-8 * l.scale(), 0.0);
    let lu = BandedLu::factor(&l.csr().shifted(shift), 1e-15)
        .map_err(|sp| Error::SolverFailure(format!("shifted factorization singular at {}", sp.index)))?;
    let mut x: Vec<C64> = start_vector(n);
    normalize(&mut x);
    for _ in 0..50 {
        let mut y = x.clone();
        lu.solve_in_place(&mut y);
        normalize(&mut y);
        // fix the global phase so successive iterates are comparable
        let k = y.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).map(|p| p.0).unwrap();
        let ph = y[k] / y[k].norm();
        y.iter_mut().for_each(|z| *z /= ph);
        let diff = x.iter().zip(&y).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        x = y;
        if diff < 1e-14 {
            return Ok(x);
        }
    }
    Ok(x)
}

fn start_vector(n: usize) -> Vec<C64> {
    (0..n).map(|i| C64::new(1.0 + 0.3 * (i as f64 * 0.7).cos(), 0.2 * (i as f64 * 1.3).sin())).collect()
}

fn normalize(x: &mut [C64]) {
    let nrm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    x.iter_mut().for_each(|z| *z /= nrm);
}

/// `tr(ρ O)`
pub fn expectation(rho: &DensityMatrix, op: &Operator) -> Result<C64> {
    if rho.dim() != op.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: op.dim() });
    }
    let r = rho.matrix();
    let o = op.matrix();
    let d = rho.dim();
    let mut acc = ZERO;
    for i in 0..d {
        for j in 0..d {
            acc += r[[i, j]] * o[[j, i]];
        }
    }
    Ok(acc)
}

/// Largest entry of `Lρ`.
pub fn residual(l: &Superoperator, rho: &DensityMatrix) -> f64 {
    l.apply_vec(&rho.to_vec()).iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// The `count` eigenvalues of `l` closest to zero, by shift-invert Arnoldi
/// around a small positive real shift. Sorted by modulus.
pub fn slowest_eigenvalues(l: &Superoperator, count: usize) -> Result<Vec<C64>> {
    let n = l.dim() * l.dim();
    let sigma = C64::new(1e-3, 0.0);
    let lu = BandedLu::factor(&l.csr().shifted(sigma), 1e-15)
        .map_err(|sp| Error::SolverFailure(format!("shift-invert factorization singular at {}", sp.index)))?;
    let m = (count + 20).min(n);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(m + 1);
    let mut h = DMatrix::<C64>::zeros(m + 1, m);
    let mut v = start_vector(n);
    normalize(&mut v);
    basis.push(v);
    let mut size = m;
    for j in 0..m {
        let mut w = lu.solve(&basis[j]);
        for _ in 0..2 {
            for (i, q) in basis.iter().enumerate() {
                let c: C64 = q.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                h[(i, j)] += c;
                w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= c * qi);
            }
        }
        let beta = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        h[(j + 1, j)] = C64::new(beta, 0.0);
        if beta < 1e-12 {
            size = j + 1;
            break;
        }
        w.iter_mut().for_each(|z| *z /= beta);
        basis.push(w);
    }
    let hm = h.view((0, 0), (size, size)).into_owned();
    let ritz = nalgebra::Schur::new(hm)
        .eigenvalues()
        .ok_or_else(|| Error::SolverFailure("Schur decomposition did not converge".into()))?;
    let mut lambdas: Vec<C64> = ritz.iter().filter(|t| t.norm() > 0.0).map(|t| sigma + C64::new(1.0, 0.0) / t).collect();
    lambdas.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    lambdas.truncate(count);
    Ok(lambdas)
}
