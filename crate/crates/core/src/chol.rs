//! Upper-triangular Cholesky factor of the regularized Gram matrix `λI + YᵀY`.
//!
//! The factor is stored row-major. All mutating operations are transactional:
//! on error the factor is left exactly as it was before the call.

use crate::dense::{dot, ColMatrix};
use crate::error::{Error, Result};

/// Breakdown threshold multiplier on machine epsilon for the new pivot in a
/// column replacement.
const BREAKDOWN_EPS: f64 = 64.0 * f64::EPSILON;

/// `R` with `RᵀR = λI + YᵀY` for the columns `Y` it tracks.
#[derive(Debug, Clone, PartialEq)]
pub struct CholFactor {
    n: usize,
    lambda: f64,
    /// Row-major `n × n`, zero below the diagonal.
    r: Vec<f64>,
}

impl CholFactor {
    /// The 0×0 factor of an empty memory.
    pub fn empty(lambda: f64) -> Self {
        CholFactor {
            n: 0,
            lambda,
            r: Vec::new(),
        }
    }

    /// Wrap an explicit row-major upper-triangular matrix. Entries below the
    /// diagonal are ignored; the diagonal must be strictly positive.
    pub fn from_upper(lambda: f64, n: usize, row_major: &[f64]) -> Result<Self> {
        if row_major.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: row_major.len(),
            });
        }
        let mut r = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                r[i * n + j] = row_major[i * n + j];
            }
            let d = r[i * n + i];
            if !(d > 0.0) {
                return Err(Error::NotPositiveDefinite { index: i, pivot: d });
            }
        }
        Ok(CholFactor { n, lambda, r })
    }

    /// Normal-equation route: form `λI + YᵀY` and run a Cholesky routine.
    pub fn factor_normal_eq(y: &ColMatrix, lambda: f64) -> Result<Self> {
        check_inputs(y, lambda)?;
        let m = y.cols();
        let mut a = vec![0.0; m * m];
        for i in 0..m {
            for j in i..m {
                a[i * m + j] = dot(y.col(i), y.col(j));
            }
            a[i * m + i] += lambda;
        }
        // Upper Cholesky in place: row i of R from row i of A.
        for i in 0..m {
            let mut piv = a[i * m + i];
            for k in 0..i {
                piv -= a[k * m + i] * a[k * m + i];
            }
            if !(piv > 0.0) {
                return Err(Error::NotPositiveDefinite { index: i, pivot: piv });
            }
            let rii = piv.sqrt();
            a[i * m + i] = rii;
            for j in i + 1..m {
                let mut s = a[i * m + j];
                for k in 0..i {
                    s -= a[k * m + i] * a[k * m + j];
                }
                a[i * m + j] = s / rii;
            }
        }
        for i in 0..m {
            for j in 0..i {
                a[i * m + j] = 0.0;
            }
        }
        Ok(CholFactor { n: m, lambda, r: a })
    }

    /// Orthogonal route: Householder triangularization of the stacked
    /// `(m + d) × m` matrix `[√λ I; Y]`, with the diagonal made positive.
    pub fn factor_qr(y: &ColMatrix, lambda: f64) -> Result<Self> {
        check_inputs(y, lambda)?;
        let m = y.cols();
        let d = y.rows();
        let rows = m + d;
        let sl = lambda.sqrt();
        let mut a = ColMatrix::from_fn(rows, m, |i, j| {
            if i < m {
                if i == j {
                    sl
                } else {
                    0.0
                }
            } else {
                y.get(i - m, j)
            }
        });
        let mut v = vec![0.0; rows];
        for j in 0..m {
            let col = &a.col(j)[j..];
            let norm = dot(col, col).sqrt();
            if norm == 0.0 {
                return Err(Error::NotPositiveDefinite { index: j, pivot: 0.0 });
            }
            let alpha = if col[0] >= 0.0 { -norm } else { norm };
            let vlen = rows - j;
            v[..vlen].copy_from_slice(col);
            v[0] -= alpha;
            let vnorm_sq = dot(&v[..vlen], &v[..vlen]);
            if vnorm_sq > 0.0 {
                for k in j..m {
                    let ck = &mut a.col_mut(k)[j..];
                    let f = 2.0 * dot(&v[..vlen], ck) / vnorm_sq;
                    for (c, vi) in ck.iter_mut().zip(&v[..vlen]) {
                        *c -= f * vi;
                    }
                }
            }
        }
        let mut r = vec![0.0; m * m];
        for i in 0..m {
            let sign = if a.get(i, i) < 0.0 { -1.0 } else { 1.0 };
            for j in i..m {
                r[i * m + j] = sign * a.get(i, j);
            }
            if !(r[i * m + i] > 0.0) {
                return Err(Error::NotPositiveDefinite {
                    index: i,
                    pivot: r[i * m + i],
                });
            }
        }
        Ok(CholFactor { n: m, lambda, r })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.r[i * self.n + j]
    }

    /// Row-major view of `R`.
    pub fn as_row_major(&self) -> &[f64] {
        &self.r
    }

    /// `RᵀR`, row-major.
    pub fn gram(&self) -> Vec<f64> {
        let n = self.n;
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let kmax = i.min(j);
                g[i * n + j] = (0..=kmax).map(|k| self.get(k, i) * self.get(k, j)).sum();
            }
        }
        g
    }

    /// `‖RᵀR − (λI + YᵀY)‖_F` against explicit columns.
    pub fn reconstruction_error(&self, y: &ColMatrix) -> f64 {
        assert_eq!(y.cols(), self.n);
        let g = self.gram();
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut t = dot(y.col(i), y.col(j));
                if i == j {
                    t += self.lambda;
                }
                let e = g[i * n + j] - t;
                acc += e * e;
            }
        }
        acc.sqrt()
    }

    /// Solve `Rᵀ x = v` (forward substitution).
    pub fn solve_upper_tr(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check_len(v.len())?;
        let mut x = v.to_vec();
        forward_tr(&self.r, self.n, self.n, &mut x);
        Ok(x)
    }

    /// Solve `R x = v` (back substitution).
    pub fn solve_upper(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check_len(v.len())?;
        let mut x = v.to_vec();
        let n = self.n;
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.r[i * n + j] * x[j];
            }
            x[i] = s / self.r[i * n + i];
        }
        Ok(x)
    }

    /// Forward-backward substitution: `w = R⁻¹ R⁻ᵀ v`, i.e. `(RᵀR) w = v`.
    pub fn solve_fb(&self, v: &[f64]) -> Result<Vec<f64>> {
        let t = self.solve_upper_tr(v)?;
        self.solve_upper(&t)
    }

    /// `R'ᵀR' = RᵀR + uuᵀ` by Givens rotations.
    pub fn rank1_update(&mut self, u: &[f64]) -> Result<()> {
        self.check_len(u.len())?;
        let mut w = u.to_vec();
        givens_update(&mut self.r, self.n, 0, &mut w);
        Ok(())
    }

    /// `R'ᵀR' = RᵀR − uuᵀ` by hyperbolic rotations. Fails with
    /// [`Error::DowndateFailure`] when the result would not be positive definite.
    pub fn rank1_downdate(&mut self, u: &[f64]) -> Result<()> {
        self.check_len(u.len())?;
        let mut work = self.r.clone();
        let mut w = u.to_vec();
        hyperbolic_downdate(&mut work, self.n, 0, &mut w)?;
        self.r = work;
        Ok(())
    }

    /// Replace the column at `position` of the tracked `Y` by a new vector.
    ///
    /// `cross[j]` must hold `y_jᵀ y_new` for every other column `j` (the entry
    /// at `position` is ignored) and `new_sq = y_newᵀ y_new`. Columns before
    /// `position` form the leading block, columns after it the trailing block;
    /// the leading rows of `R` are untouched and the trailing block is
    /// refreshed by one rank-1 update and one rank-1 downdate, so the cost is
    /// `O(m²)` once the inner products are known.
    pub fn replace_column(&mut self, position: usize, cross: &[f64], new_sq: f64) -> Result<()> {
        let n = self.n;
        self.check_len(cross.len())?;
        if position >= n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: position,
            });
        }
        if !new_sq.is_finite() || cross.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        let p = position;
        let mut r = self.r.clone();

        // New column above the pivot: R₁ᵀ r₄ = Y_sᵀ y_new.
        let mut r4 = cross[..p].to_vec();
        forward_tr(&r, n, p, &mut r4);
        let piv_sq = self.lambda + new_sq - dot(&r4, &r4);
        if !(piv_sq > BREAKDOWN_EPS * (self.lambda + new_sq)) {
            return Err(Error::NumericalBreakdown { position: p });
        }
        let r5 = piv_sq.sqrt();

        // New row right of the pivot: r₆ = (y_newᵀ Y_e − r₄ᵀ R₂) / r₅.
        let tail = n - p - 1;
        let mut r6 = vec![0.0; tail];
        for (t, j) in (p + 1..n).enumerate() {
            let mut s = cross[j];
            for (i, r4i) in r4.iter().enumerate() {
                s -= r4i * r[i * n + j];
            }
            r6[t] = s / r5;
        }
        let mut r3: Vec<f64> = (p + 1..n).map(|j| r[p * n + j]).collect();

        for (i, v) in r4.iter().enumerate() {
            r[i * n + p] = *v;
        }
        r[p * n + p] = r5;
        for (t, j) in (p + 1..n).enumerate() {
            r[p * n + j] = r6[t];
        }

        // R₆ᵀR₆ = R₄ᵀR₄ + r₃ᵀr₃ − r₆ᵀr₆. The update goes first: the target is
        // positive definite, the intermediate R₄ᵀR₄ − r₆ᵀr₆ need not be.
        givens_update(&mut r, n, p + 1, &mut r3);
        if hyperbolic_downdate(&mut r, n, p + 1, &mut r6).is_err() {
            return Err(Error::NumericalBreakdown { position: p });
        }
        self.r = r;
        Ok(())
    }

    /// Bordered extension: append a column at the end of the tracked `Y`.
    /// `cross[j] = y_jᵀ y_new` for all current columns.
    pub fn append_column(&mut self, cross: &[f64], new_sq: f64) -> Result<()> {
        let n = self.n;
        self.check_len(cross.len())?;
        if !new_sq.is_finite() || cross.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut r4 = cross.to_vec();
        forward_tr(&self.r, n, n, &mut r4);
        let piv_sq = self.lambda + new_sq - dot(&r4, &r4);
        if !(piv_sq > BREAKDOWN_EPS * (self.lambda + new_sq)) {
            return Err(Error::NumericalBreakdown { position: n });
        }
        let m = n + 1;
        let mut r = vec![0.0; m * m];
        for i in 0..n {
            r[i * m..i * m + n].copy_from_slice(&self.r[i * n..(i + 1) * n]);
            r[i * m + n] = r4[i];
        }
        r[n * m + n] = piv_sq.sqrt();
        self.r = r;
        self.n = m;
        Ok(())
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: len,
            });
        }
        Ok(())
    }
}

fn check_inputs(y: &ColMatrix, lambda: f64) -> Result<()> {
    if !y.is_finite() || !lambda.is_finite() {
        return Err(Error::NonFinite);
    }
    if !(lambda > 0.0) {
        return Err(Error::NotPositiveDefinite {
            index: 0,
            pivot: lambda,
        });
    }
    Ok(())
}

/// Solve `R[..k, ..k]ᵀ x = x` in place, `R` row-major with leading dim `ld`.
fn forward_tr(r: &[f64], ld: usize, k: usize, x: &mut [f64]) {
    for i in 0..k {
        let mut s = x[i];
        for j in 0..i {
            s -= r[j * ld + i] * x[j];
        }
        x[i] = s / r[i * ld + i];
    }
}

/// Rank-1 update of the trailing block `R[off.., off..]` with `u`
/// (`u.len() == ld − off`).
fn givens_update(r: &mut [f64], ld: usize, off: usize, u: &mut [f64]) {
    let k = ld - off;
    debug_assert_eq!(u.len(), k);
    for i in 0..k {
        let b = u[i];
        if b == 0.0 {
            continue;
        }
        let row = (off + i) * ld + off;
        let a = r[row + i];
        let h = a.hypot(b);
        let c = a / h;
        let s = b / h;
        r[row + i] = h;
        for j in i + 1..k {
            let t = r[row + j];
            r[row + j] = c * t + s * u[j];
            u[j] = c * u[j] - s * t;
        }
    }
}

/// Rank-1 downdate of the trailing block by hyperbolic rotations in the
/// mixed (LINPACK) form. Leaves `r` partially modified on failure.
fn hyperbolic_downdate(r: &mut [f64], ld: usize, off: usize, u: &mut [f64]) -> Result<()> {
    let k = ld - off;
    debug_assert_eq!(u.len(), k);
    for i in 0..k {
        let b = u[i];
        if b == 0.0 {
            continue;
        }
        let row = (off + i) * ld + off;
        let a = r[row + i];
        let rr = (a - b) * (a + b);
        if !(rr > 0.0) {
            return Err(Error::DowndateFailure { index: off + i });
        }
        let h = rr.sqrt();
        let c = h / a;
        let s = b / a;
        r[row + i] = h;
        for j in i + 1..k {
            let t = (r[row + j] - s * u[j]) / c;
            r[row + j] = t;
            u[j] = c * u[j] - s * t;
        }
    }
    Ok(())
}
