//! Reduced-state diagnostics of the intracavity field and the atom.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::composite_index;
use crate::liouvillian::DensityMatrix;

/// Drift of the Wigner grid integral beyond which a truncation warning is
/// raised.
pub const WIGNER_DRIFT_WARN: f64 = 1e-2;

fn composite_n_max(rho: &DensityMatrix) -> Result<usize> {
    let d = rho.dim();
    if d % 2 != 0 || d < 2 {
        return Err(Error::DimensionMismatch { expected: d + d % 2, found: d });
    }
    Ok(d / 2 - 1)
}

/// Field state `tr_atom ρ`.
pub fn partial_trace_atom(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let n_max = composite_n_max(rho)?;
    let m = rho.matrix();
    let f = Array2::from_shape_fn((n_max + 1, n_max + 1), |(i, j)| {
        m[[composite_index(i, false), composite_index(j, false)]] + m[[composite_index(i, true), composite_index(j, true)]]
    });
    Ok(DensityMatrix::from_matrix_unchecked(f))
}

/// Atomic state `tr_field ρ`.
pub fn partial_trace_field(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let n_max = composite_n_max(rho)?;
    let m = rho.matrix();
    let a = Array2::from_shape_fn((2, 2), |(s, t)| {
        (0..=n_max).map(|n| m[[composite_index(n, s == 1), composite_index(n, t == 1)]]).sum::<C64>()
    });
    Ok(DensityMatrix::from_matrix_unchecked(a))
}

/// `Pₙ = ⟨n|ρ|n⟩` of a field density matrix.
pub fn fock_occupations(rho_field: &DensityMatrix) -> Vec<f64> {
    rho_field.diagonal().to_vec()
}

/// `Pₙ` summed directly over the atomic index of a composite state.
pub fn fock_occupations_composite(rho: &DensityMatrix) -> Result<Vec<f64>> {
    let n_max = composite_n_max(rho)?;
    let m = rho.matrix();
    Ok((0..=n_max)
        .map(|n| m[[composite_index(n, false), composite_index(n, false)]].re + m[[composite_index(n, true), composite_index(n, true)]].re)
        .collect())
}

/// Truncation fidelity `F_m = Σ_{n ≤ m} Pₙ`.
pub fn fidelity_m(rho_field: &DensityMatrix, m: usize) -> Result<f64> {
    let p = fock_occupations(rho_field);
    if m >= p.len() {
        return Err(Error::InvalidParams(format!("fidelity order {m} exceeds truncation {}", p.len() - 1)));
    }
    Ok(p[..=m].iter().sum())
}

/// `⟨σ_z⟩` of a composite state.
pub fn atomic_inversion(rho: &DensityMatrix) -> Result<f64> {
    let a = partial_trace_field(rho)?;
    Ok(a.matrix()[[1, 1]].re - a.matrix()[[0, 0]].re)
}

/// `W(x + iy)` sampled on a rectangular grid, normalized so that
/// `∫ W dx dy = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerMap {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `values[iy][ix]`
    pub values: Vec<Vec<f64>>,
    /// Trapezoidal integral of `W` over the grid.
    pub normalization: f64,
    pub truncation_warning: bool,
}

impl WignerMap {
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy][ix]
    }

    /// Interior grid points exceeding all eight neighbours and at least
    /// `rel_floor` times the global maximum, sorted by decreasing height.
    pub fn local_maxima(&self, rel_floor: f64) -> Vec<(f64, f64, f64)> {
        let peak = self.values.iter().flatten().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        let mut out = Vec::new();
        for iy in 1..self.y.len().saturating_sub(1) {
            for ix in 1..self.x.len().saturating_sub(1) {
                let v = self.at(ix, iy);
                if v < rel_floor * peak {
                    continue;
                }
                let is_max = (-1i64..=1).all(|dy| {
                    (-1i64..=1).all(|dx| {
                        (dx == 0 && dy == 0) || v > self.at((ix as i64 + dx) as usize, (iy as i64 + dy) as usize)
                    })
                });
                if is_max {
                    out.push((self.x[ix], self.y[iy], v));
                }
            }
        }
        out.sort_by(|a, b| b.2.total_cmp(&a.2));
        out
    }

    /// Location of the global maximum.
    pub fn principal_peak(&self) -> (f64, f64) {
        let mut best = (0, 0, f64::NEG_INFINITY);
        for (iy, row) in self.values.iter().enumerate() {
            for (ix, &v) in row.iter().enumerate() {
                if v > best.2 {
                    best = (ix, iy, v);
                }
            }
        }
        (self.x[best.0], self.y[best.1])
    }
}

pub fn default_wigner_grid() -> Vec<f64> {
    crate::regression::linspace(-3.0, 3.0, 121)
}

/// Wigner function of a field state, `W(α) = (2/π) tr[ρ D(α) Π D(−α)]`,
/// evaluated with the Laguerre-polynomial recursion for the displaced
/// parity matrix elements.
pub fn wigner(rho_field: &DensityMatrix, x: &[f64], y: &[f64]) -> Result<WignerMap> {
    if x.len() < 2 || y.len() < 2 {
        return Err(Error::InvalidGrid("Wigner grid needs at least two points per axis".into()));
    }
    let rho = rho_field.matrix();
    let values: Vec<Vec<f64>> = y.par_iter().map(|&yy| x.iter().map(|&xx| wigner_point(rho, C64::new(xx, yy))).collect()).collect();
    let normalization = trapezoid_2d(x, y, &values);
    let truncation_warning = (normalization - 1.0).abs() > WIGNER_DRIFT_WARN;
    if truncation_warning {
        log::warn!("Wigner grid integral {normalization:.4} drifts from 1: grid or truncation too small");
    }
    Ok(WignerMap { x: x.to_vec(), y: y.to_vec(), values, normalization, truncation_warning })
}

fn wigner_point(rho: &Array2<C64>, alpha: C64) -> f64 {
    let d = rho.nrows();
    let mut col = vec![C64::new(0.0, 0.0); d];
    col[0] = C64::new((-2.0 * alpha.norm_sqr()).exp() / PI, 0.0);
    let mut w = rho[[0, 0]].re * col[0].re;
    for n in 1..d {
        col[n] = 2.0 * alpha * col[n - 1] / (n as f64).sqrt();
        w += 2.0 * (rho[[0, n]] * col[n]).re;
    }
    for m in 1..d {
        let sm = (m as f64).sqrt();
        let mut temp = col[m];
        col[m] = (2.0 * alpha.conj() * temp - sm * col[m - 1]) / sm;
        w += (rho[[m, m]] * col[m]).re;
        for n in m + 1..d {
            let next = (2.0 * alpha * col[n - 1] - sm * temp) / (n as f64).sqrt();
            temp = col[n];
            col[n] = next;
            w += 2.0 * (rho[[m, n]] * col[n]).re;
        }
    }
    2.0 * w
}

fn trapezoid_2d(x: &[f64], y: &[f64], v: &[Vec<f64>]) -> f64 {
    let weights = |g: &[f64]| -> Vec<f64> {
        (0..g.len())
            .map(|i| {
                let left = if i > 0 { g[i] - g[i - 1] } else { 0.0 };
                let right = if i + 1 < g.len() { g[i + 1] - g[i] } else { 0.0 };
                0.5 * (left + right)
            })
            .collect()
    };
    let (wx, wy) = (weights(x), weights(y));
    v.iter().zip(&wy).map(|(row, wyi)| wyi * row.iter().zip(&wx).map(|(a, b)| a * b).sum::<f64>()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::StateVector;
    use approx::assert_relative_eq;

    #[test]
    fn partial_trace_of_basis_state() {
        let rho = DensityMatrix::pure(&StateVector::fock_atom(4, 1, false));
        let f = partial_trace_atom(&rho).unwrap();
        assert_eq!(f.dim(), 5);
        assert_relative_eq!(f.matrix()[[1, 1]].re, 1.0);
        assert_relative_eq!(f.trace().re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(atomic_inversion(&rho).unwrap(), -1.0);
        assert!(partial_trace_atom(&DensityMatrix::pure(&StateVector::basis(3, 0))).is_err());
    }

    #[test]
    fn fidelity_is_cumulative() {
        let vac = DensityMatrix::pure(&StateVector::basis(6, 0));
        assert_eq!(fidelity_m(&vac, 0).unwrap(), 1.0);
        assert_eq!(fidelity_m(&vac, 5).unwrap(), 1.0);
        assert!(fidelity_m(&vac, 6).is_err());
    }

    #[test]
    fn vacuum_and_single_photon_wigner() {
        let g = default_wigner_grid();
        let vac = wigner(&DensityMatrix::pure(&StateVector::basis(10, 0)), &g, &g).unwrap();
        assert_relative_eq!(vac.at(60, 60), 2.0 / PI, epsilon = 1e-12);
        assert_relative_eq!(vac.at(70, 55), 2.0 / PI * (-2.0 * (0.5f64 * 0.5 + 0.25 * 0.25)).exp(), epsilon = 1e-12);
        assert!((vac.normalization - 1.0).abs() < 1e-3);
        let one = wigner(&DensityMatrix::pure(&StateVector::basis(10, 1)), &g, &g).unwrap();
        assert_relative_eq!(one.at(60, 60), -2.0 / PI, epsilon = 1e-12);
        assert!((one.normalization - 1.0).abs() < 1e-3);
    }
}
