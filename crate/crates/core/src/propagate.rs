//! Action of `exp(tL)` on a vector by restarted Arnoldi (Krylov) steps.
//!
//! Each step builds an `m`-dimensional Krylov basis `V` with Hessenberg
//! matrix `H` and approximates `exp(tL)v ≈ β V exp(tH) e₁`. The small vector
//! `exp(tH) e₁` is advanced from sample to sample by a Taylor series, and the
//! step is extended over successive sample times as long as the standard
//! a-posteriori estimate `β |h_{m+1,m}| |e_mᵀ exp(tH) e₁|` stays below the
//! tolerance. A dense τ-grid therefore costs little more than the Krylov
//! steps themselves.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::liouvillian::Superoperator;
use crate::sparse::CsrMatrix;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const MAX_REJECTIONS: usize = 60;

#[derive(Clone, Debug)]
pub struct KrylovPropagator<'a> {
    op: &'a CsrMatrix,
    krylov_dim: usize,
    tol: f64,
    norm_est: f64,
}

/// Square upper Hessenberg matrix, row-major.
struct Hessenberg {
    m: usize,
    h: Vec<C64>,
    norm1: f64,
}

impl Hessenberg {
    fn matvec(&self, x: &[C64], y: &mut [C64]) {
        let m = self.m;
        for (i, yi) in y.iter_mut().enumerate() {
            let row = &self.h[i * m..(i + 1) * m];
            let start = i.saturating_sub(1);
            *yi = row[start..].iter().zip(&x[start..]).map(|(a, b)| a * b).sum();
        }
    }

    /// `exp(tH) x` by a Taylor series, split into substeps with
    /// `‖tH‖₁ / s ≤ 1` so that no term is much larger than the sum.
    fn exp_action(&self, t: f64, x: &[C64]) -> Vec<C64> {
        let s = (t * self.norm1).ceil().max(1.0) as usize;
        let dt = t / s as f64;
        let mut out = x.to_vec();
        let mut term = vec![ZERO; self.m];
        let mut next = vec![ZERO; self.m];
        for _ in 0..s {
            term.copy_from_slice(&out);
            for k in 1..60 {
                self.matvec(&term, &mut next);
                let f = dt / k as f64;
                let mut tn = 0.0_f64;
                let mut sn = 0.0_f64;
                for ((tk, nk), ok) in term.iter_mut().zip(&next).zip(out.iter_mut()) {
                    *tk = nk * f;
                    *ok += *tk;
                    tn = tn.max(tk.norm());
                    sn = sn.max(ok.norm());
                }
                if tn <= 1e-17 * sn || sn == 0.0 {
                    break;
                }
            }
        }
        out
    }
}

struct KrylovBasis {
    beta: f64,
    vectors: Vec<Vec<C64>>,
    h: Hessenberg,
    /// `h_{m+1,m}`; zero on happy breakdown.
    residual: f64,
}

impl KrylovBasis {
    fn size(&self) -> usize {
        self.h.m
    }

    fn start(&self) -> Vec<C64> {
        let mut y = vec![ZERO; self.size()];
        y[0] = C64::new(self.beta, 0.0);
        y
    }

    fn error_estimate(&self, coeffs: &[C64]) -> f64 {
        self.residual * coeffs[self.size() - 1].norm()
    }

    fn combine(&self, coeffs: &[C64]) -> Vec<C64> {
        let n = self.vectors[0].len();
        let mut out = vec![ZERO; n];
        for (c, v) in coeffs.iter().zip(&self.vectors) {
            out.iter_mut().zip(v).for_each(|(o, x)| *o += c * x);
        }
        out
    }
}

/// What a visitor sees at one sample: either the live Krylov step (its
/// index, basis and coefficient vector) or the current full vector.
enum At<'b> {
    Step { id: usize, basis: &'b KrylovBasis, coeffs: &'b [C64] },
    Vector(&'b [C64]),
}

fn dot(w: &[C64], x: &[C64]) -> C64 {
    w.iter().zip(x).map(|(a, b)| a * b).sum()
}

impl<'a> KrylovPropagator<'a> {
    pub fn new(l: &'a Superoperator) -> Self {
        Self::from_csr(l.csr())
    }

    pub fn from_csr(op: &'a CsrMatrix) -> Self {
        Self { op, krylov_dim: 30, tol: 1e-12, norm_est: op.norm_inf().max(f64::MIN_POSITIVE) }
    }

    /// Local error tolerance per step, relative to the vector norm.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_krylov_dim(mut self, m: usize) -> Self {
        self.krylov_dim = m.max(2);
        self
    }

    fn arnoldi(&self, v: &[C64]) -> Option<KrylovBasis> {
        let n = v.len();
        let beta = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if beta == 0.0 {
            return None;
        }
        let m = self.krylov_dim.min(n);
        let mut vectors = Vec::with_capacity(m + 1);
        vectors.push(v.iter().map(|z| z / beta).collect::<Vec<_>>());
        let mut h = vec![ZERO; m * m];
        let mut size = m;
        let mut residual = 0.0;
        let mut w = vec![ZERO; n];
        for j in 0..m {
            self.op.matvec_into(&vectors[j], &mut w);
            for (i, q) in vectors.iter().enumerate() {
                let c: C64 = q.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                h[i * m + j] = c;
                w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= c * qi);
            }
            let nrm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nrm <= 1e-13 * self.norm_est {
                size = j + 1;
                residual = 0.0;
                break;
            }
            residual = nrm;
            if j + 1 < m {
                h[(j + 1) * m + j] = C64::new(nrm, 0.0);
                vectors.push(w.iter().map(|z| z / nrm).collect());
            }
        }
        let mut hs = vec![ZERO; size * size];
        for i in 0..size {
            hs[i * size..(i + 1) * size].copy_from_slice(&h[i * m..i * m + size]);
        }
        let norm1 = (0..size).map(|j| (0..size).map(|i| hs[i * size + j].norm()).sum::<f64>()).fold(0.0, f64::max);
        vectors.truncate(size);
        Some(KrylovBasis { beta, vectors, h: Hessenberg { m: size, h: hs, norm1 }, residual })
    }

    /// `exp(tL) v`
    pub fn evolve_vec(&self, v: &[C64], t: f64) -> Result<Vec<C64>> {
        if t < 0.0 || !t.is_finite() {
            return Err(Error::InvalidGrid(format!("propagation time must be finite and >= 0, got {t}")));
        }
        Ok(self.states(v, &[t])?.pop().expect("one sample"))
    }

    /// Evaluates the linear functionals `w · exp(t L) v` at every sample
    /// time. `times` must be non-decreasing and start at or after zero.
    /// The result is indexed `[functional][sample]`.
    pub fn sample(&self, v: &[C64], times: &[f64], functionals: &[&[C64]]) -> Result<Vec<Vec<C64>>> {
        let mut out = vec![Vec::with_capacity(times.len()); functionals.len()];
        let mut proj: (usize, Vec<Vec<C64>>) = (usize::MAX, Vec::new());
        self.drive(v, times, |at| match at {
            At::Step { id, basis, coeffs } => {
                if proj.0 != id {
                    let p = functionals.iter().map(|f| basis.vectors.iter().map(|q| dot(f, q)).collect()).collect();
                    proj = (id, p);
                }
                for (o, p) in out.iter_mut().zip(&proj.1) {
                    o.push(dot(p, coeffs));
                }
            }
            At::Vector(x) => {
                for (o, f) in out.iter_mut().zip(functionals) {
                    o.push(dot(f, x));
                }
            }
        })?;
        Ok(out)
    }

    /// Full vectors `exp(t L) v` at every sample time.
    pub fn states(&self, v: &[C64], times: &[f64]) -> Result<Vec<Vec<C64>>> {
        let mut out = Vec::with_capacity(times.len());
        self.drive(v, times, |at| match at {
            At::Step { basis, coeffs, .. } => out.push(basis.combine(coeffs)),
            At::Vector(x) => out.push(x.to_vec()),
        })?;
        Ok(out)
    }

    /// Core stepping loop; `visit` is called once per sample, in order.
    fn drive(&self, v: &[C64], times: &[f64], mut visit: impl FnMut(At<'_>)) -> Result<()> {
        if let Some(bad) = times.windows(2).find(|w| !(w[1] >= w[0])) {
            return Err(Error::InvalidGrid(format!("sample times not ordered: {} after {}", bad[1], bad[0])));
        }
        if times.first().is_some_and(|&t| !(t >= 0.0)) {
            return Err(Error::InvalidGrid("negative sample time".into()));
        }
        if times.last().is_some_and(|t| !t.is_finite()) {
            return Err(Error::InvalidGrid("non-finite sample time".into()));
        }
        let mut t_cur = 0.0;
        let mut cur = v.to_vec();
        let mut idx = 0;
        let (mut steps, mut rejected) = (0usize, 0usize);
        let mut h_guess = self.krylov_dim as f64 / (2.0 * self.norm_est);
        while idx < times.len() {
            while idx < times.len() && times[idx] <= t_cur {
                visit(At::Vector(&cur));
                idx += 1;
            }
            if idx == times.len() {
                break;
            }
            steps += 1;
            let Some(basis) = self.arnoldi(&cur) else {
                // the zero vector stays zero
                while idx < times.len() {
                    visit(At::Vector(&cur));
                    idx += 1;
                }
                break;
            };
            let tol = self.tol * basis.beta;
            let exact = basis.residual == 0.0;

            // walk forward over sample times while the estimate holds
            let mut y = basis.start();
            let mut offset = 0.0;
            let mut accepted = 0;
            while idx < times.len() {
                let off = times[idx] - t_cur;
                let trial = basis.h.exp_action(off - offset, &y);
                if !exact && basis.error_estimate(&trial) > tol {
                    break;
                }
                y = trial;
                offset = off;
                visit(At::Step { id: steps, basis: &basis, coeffs: &y });
                idx += 1;
                accepted += 1;
            }
            if accepted > 0 {
                h_guess = h_guess.max(offset);
                cur = basis.combine(&y);
                t_cur += offset;
                continue;
            }

            // next sample is out of reach: take a shorter adaptive step
            let mut h = h_guess.min(times[idx] - t_cur);
            let mut tries = 0;
            loop {
                let trial = basis.h.exp_action(h, &y);
                let err = basis.error_estimate(&trial);
                if err <= tol {
                    let grow = if err > 0.0 { 0.9 * (tol / err).powf(1.0 / basis.size() as f64) } else { 2.0 };
                    h_guess = h * grow.clamp(1.0, 2.0);
                    cur = basis.combine(&trial);
                    t_cur += h;
                    break;
                }
                h *= (0.9 * (tol / err).powf(1.0 / basis.size() as f64)).clamp(0.1, 0.7);
                tries += 1;
                rejected += 1;
                if tries > MAX_REJECTIONS || h <= 1e-15 * times[idx] {
                    return Err(Error::Stiffness {
                        t: t_cur,
                        reason: format!("step size underflow (h = {h:.3e}, error {err:.3e} vs tol {tol:.3e})"),
                    });
                }
            }
        }
        log::debug!("krylov: {steps} steps, {rejected} rejected, {} samples", times.len());
        Ok(())
    }
}
