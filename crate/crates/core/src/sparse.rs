//! Compressed sparse row storage and a banded LU factorization.
//!
//! Liouvillians built on the cavity ⊗ atom basis with column-major
//! vectorization are banded (half bandwidth `2·dim + 2`), so a banded
//! factorization with partial pivoting is all the steady-state and
//! shift-invert solvers need.

use num_complex::Complex64 as C64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<C64>,
}

impl CsrMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, indptr: vec![0; n + 1], indices: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            values: vec![C64::new(1.0, 0.0); n],
        }
    }

    /// Duplicate entries are summed; exact zeros are dropped.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0; n + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < n && c < n, "triplet ({r}, {c}) out of bounds for n = {n}");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                values.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..n {
            indptr[r + 1] += indptr[r];
        }
        Self { n, indptr, indices, values }.pruned()
    }

    fn pruned(self) -> Self {
        let mut trip = Vec::with_capacity(self.values.len());
        let mut indptr = vec![0; self.n + 1];
        let mut indices = Vec::with_capacity(self.values.len());
        for r in 0..self.n {
            for k in self.indptr[r]..self.indptr[r + 1] {
                if self.values[k] != ZERO {
                    indices.push(self.indices[k]);
                    trip.push(self.values[k]);
                }
            }
            indptr[r + 1] = indices.len();
        }
        Self { n: self.n, indptr, indices, values: trip }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        (self.indptr[r]..self.indptr[r + 1]).map(move |k| (self.indices[k], self.values[k]))
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.row(r).find(|&(cc, _)| cc == c).map_or(ZERO, |(_, v)| v)
    }

    pub fn triplets(&self) -> Vec<(usize, usize, C64)> {
        (0..self.n).flat_map(|r| self.row(r).map(move |(c, v)| (r, c, v))).collect()
    }

    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for (r, yr) in y.iter_mut().enumerate() {
            let mut acc = ZERO;
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += self.values[k] * x[self.indices[k]];
            }
            *yr = acc;
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![ZERO; self.n];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn scaled(&self, s: C64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out.pruned()
    }

    pub fn add(&self, other: &CsrMatrix) -> Self {
        assert_eq!(self.n, other.n);
        let mut t = self.triplets();
        t.extend(other.triplets());
        Self::from_triplets(self.n, t)
    }

    /// `self − shift·I`
    pub fn shifted(&self, shift: C64) -> Self {
        let mut t = self.triplets();
        t.extend((0..self.n).map(|i| (i, i, -shift)));
        Self::from_triplets(self.n, t)
    }

    /// Lower and upper half bandwidths.
    pub fn bandwidth(&self) -> (usize, usize) {
        let mut kl = 0;
        let mut ku = 0;
        for r in 0..self.n {
            for (c, _) in self.row(r) {
                if c < r {
                    kl = kl.max(r - c);
                } else {
                    ku = ku.max(c - r);
                }
            }
        }
        (kl, ku)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.norm()))
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n).map(|r| self.row(r).map(|(_, v)| v.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Vec<Vec<C64>> {
        let mut d = vec![vec![ZERO; self.n]; self.n];
        for (r, c, v) in self.triplets() {
            d[r][c] = v;
        }
        d
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularPivot {
    pub index: usize,
    pub magnitude: f64,
}

/// Banded LU factorization with partial pivoting, `P A = L U`.
///
/// Row `i` of the working array covers absolute columns
/// `[i − kl, i + kl + ku]`; the extra `kl` columns absorb pivoting fill-in.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    rows: Vec<C64>,
    mults: Vec<C64>,
    pivots: Vec<usize>,
}

impl BandedLu {
    /// Pivots smaller than `rel_tol · max|A|` are reported as singular.
    pub fn factor(a: &CsrMatrix, rel_tol: f64) -> Result<Self, SingularPivot> {
        let n = a.n();
        let (kl, ku) = a.bandwidth();
        let width = 2 * kl + ku + 1;
        let mut rows = vec![ZERO; n * width];
        for (r, c, v) in a.triplets() {
            rows[r * width + (c + kl - r)] = v;
        }
        let threshold = rel_tol * a.max_abs().max(f64::MIN_POSITIVE);
        let mut mults = vec![ZERO; n * kl.max(1)];
        let mut pivots = vec![0; n];

        // column c of row r lives at r*width + (c + kl - r)
        let idx = |r: usize, c: usize| r * width + (c + kl - r);

        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = rows[idx(k, k)].norm();
            for r in k + 1..=last {
                let m = rows[idx(r, k)].norm();
                if m > best {
                    best = m;
                    p = r;
                }
            }
            if best <= threshold {
                return Err(SingularPivot { index: k, magnitude: best });
            }
            pivots[k] = p;
            let col_end = (k + kl + ku).min(n - 1);
            if p != k {
                for c in k..=col_end {
                    rows.swap(idx(k, c), idx(p, c));
                }
            }
            let pivot = rows[idx(k, k)];
            for r in k + 1..=last {
                let f = rows[idx(r, k)] / pivot;
                mults[k * kl + (r - k - 1)] = f;
                if f == ZERO {
                    continue;
                }
                rows[idx(r, k)] = ZERO;
                for c in k + 1..=col_end {
                    let u = rows[idx(k, c)];
                    if u != ZERO {
                        rows[idx(r, c)] -= f * u;
                    }
                }
            }
        }
        Ok(Self { n, kl, ku, width, rows, mults, pivots })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn solve_in_place(&self, b: &mut [C64]) {
        let (n, kl, ku, width) = (self.n, self.kl, self.ku, self.width);
        let idx = |r: usize, c: usize| r * width + (c + kl - r);
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk != ZERO {
                let last = (k + kl).min(n - 1);
                for r in k + 1..=last {
                    b[r] -= self.mults[k * kl + (r - k - 1)] * bk;
                }
            }
        }
        for k in (0..n).rev() {
            let col_end = (k + kl + ku).min(n - 1);
            let mut acc = b[k];
            for c in k + 1..=col_end {
                acc -= self.rows[idx(k, c)] * b[c];
            }
            b[k] = acc / self.rows[idx(k, k)];
        }
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn triplets_sum_duplicates_and_drop_zeros() {
        let m = CsrMatrix::from_triplets(
            3,
            vec![(0, 0, c(1.0, 0.0)), (0, 0, c(2.0, 0.0)), (1, 2, c(1.0, 1.0)), (2, 1, c(1.0, 0.0)), (2, 1, c(-1.0, 0.0))],
        );
        assert_eq!(m.get(0, 0), c(3.0, 0.0));
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.bandwidth(), (0, 1));
    }

    #[test]
    fn banded_lu_matches_dense_residual() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let n: usize = 60;
        let (kl, ku) = (5, 3);
        let mut t = Vec::new();
        for r in 0..n {
            for cc in r.saturating_sub(kl)..(r + ku + 1).min(n) {
                // weak diagonal forces pivoting
                let scale = if cc == r { 0.1 } else { 1.0 };
                t.push((r, cc, c(rng.gen_range(-1.0..1.0) * scale, rng.gen_range(-1.0..1.0))));
            }
        }
        let a = CsrMatrix::from_triplets(n, t);
        let lu = BandedLu::factor(&a, 1e-14).unwrap();
        let b: Vec<C64> = (0..n).map(|i| c(i as f64, 1.0)).collect();
        let x = lu.solve(&b);
        let ax = a.matvec(&x);
        let resid = ax.iter().zip(&b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
        assert!(resid < 1e-10, "residual {resid}");
    }

    #[test]
    fn singular_matrix_reported() {
        let a = CsrMatrix::from_triplets(3, vec![(0, 0, c(1.0, 0.0)), (1, 1, c(1.0, 0.0))]);
        let err = BandedLu::factor(&a, 1e-12).unwrap_err();
        assert_eq!(err.index, 2);
    }
}
