//! Fixed-capacity storage of correction pairs `(s, ŷ)`.
//!
//! Columns are stored at physical slots `0..count`. While the buffer fills,
//! new pairs are appended; once full, the oldest pair (at the wrap index) is
//! overwritten in place and the wrap index advances cyclically. Seen from the
//! slot being replaced, the physical layout is `[newer..., oldest, older...]`:
//! the slots before it hold the pairs that already wrapped around.

use crate::chol::CholFactor;
use crate::dense::{dot, norm_sq, ColMatrix};
use crate::error::{Error, Result};

/// What `push_pair` did with the offered pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PushOutcome {
    /// Appended at the end during the growth phase.
    Appended { slot: usize },
    /// Overwrote the oldest pair.
    Replaced { slot: usize },
    /// `s = 0`: no displacement, nothing stored.
    Skipped,
}

#[derive(Debug, Clone)]
pub struct PairRingBuffer {
    dim: usize,
    capacity: usize,
    s: ColMatrix,
    y: ColMatrix,
    /// Slot of the oldest pair once the buffer is full.
    wrap: usize,
    /// `YᵀY`, row-major `capacity × capacity`, valid on `count × count`.
    yty: Vec<f64>,
    /// `ŷᵢᵀsᵢ` per slot.
    ys: Vec<f64>,
}

impl PairRingBuffer {
    pub fn new(dim: usize, capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::InvalidConfig("memory capacity must be at least 1".into()));
        }
        Ok(PairRingBuffer {
            dim,
            capacity,
            s: ColMatrix::zeros(dim, 0),
            y: ColMatrix::zeros(dim, 0),
            wrap: 0,
            yty: vec![0.0; capacity * capacity],
            ys: vec![0.0; capacity],
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn capacity(&self) -> usize {
        self.capacity
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.y.cols()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Slot holding the oldest pair.
    #[inline]
    pub fn wrap_index(&self) -> usize {
        self.wrap
    }

    /// Stored `ŷ` columns in physical slot order.
    pub fn y(&self) -> &ColMatrix {
        &self.y
    }

    /// Stored `s` columns in physical slot order.
    pub fn s(&self) -> &ColMatrix {
        &self.s
    }

    /// Cached `(YᵀY)[i][j]`.
    #[inline]
    pub fn yty(&self, i: usize, j: usize) -> f64 {
        self.yty[i * self.capacity + j]
    }

    /// Cached `ŷᵢᵀsᵢ` for every stored slot.
    pub fn ys_diag(&self) -> &[f64] {
        &self.ys[..self.len()]
    }

    /// Slots ordered from oldest to newest.
    pub fn chronological_slots(&self) -> impl Iterator<Item = usize> + '_ {
        let n = self.len();
        let start = if n == self.capacity { self.wrap } else { 0 };
        (0..n).map(move |i| (start + i) % n.max(1))
    }

    /// Store a new pair and bring `factor` in line with it.
    ///
    /// The buffer and its caches are always updated. If the factor update
    /// breaks down numerically the error is returned and `factor` is left in
    /// its previous (now stale) state: call [`PairRingBuffer::rebuild_factor`].
    pub fn push_pair(&mut self, factor: &mut CholFactor, s: &[f64], y_hat: &[f64]) -> Result<PushOutcome> {
        for v in [s, y_hat] {
            if v.len() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    found: v.len(),
                });
            }
        }
        if s.iter().chain(y_hat).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if s.iter().all(|&v| v == 0.0) {
            return Ok(PushOutcome::Skipped);
        }

        let n = self.len();
        let new_sq = norm_sq(y_hat);
        if n < self.capacity {
            let cross = self.y.tr_mul_vec(y_hat);
            self.s.push_col(s);
            self.y.push_col(y_hat);
            self.refresh_cache(n, &cross, new_sq, dot(y_hat, s));
            factor.append_column(&cross, new_sq)?;
            Ok(PushOutcome::Appended { slot: n })
        } else {
            let slot = self.wrap;
            self.s.col_mut(slot).copy_from_slice(s);
            self.y.col_mut(slot).copy_from_slice(y_hat);
            let cross = self.y.tr_mul_vec(y_hat);
            self.refresh_cache(slot, &cross, new_sq, dot(y_hat, s));
            self.wrap = (self.wrap + 1) % self.capacity;
            factor.replace_column(slot, &cross, new_sq)?;
            Ok(PushOutcome::Replaced { slot })
        }
    }

    /// From-scratch factor of `λI + YᵀY` over the stored columns.
    pub fn rebuild_factor(&self, lambda: f64) -> Result<CholFactor> {
        CholFactor::factor_qr(&self.y, lambda)
    }

    /// `YᵀS`, row-major `len × len`.
    pub fn yts(&self) -> Vec<f64> {
        let n = self.len();
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = if i == j {
                    self.ys[i]
                } else {
                    dot(self.y.col(i), self.s.col(j))
                };
            }
        }
        out
    }

    fn refresh_cache(&mut self, slot: usize, cross: &[f64], new_sq: f64, ys: f64) {
        let c = self.capacity;
        for (j, &v) in cross.iter().enumerate() {
            self.yty[slot * c + j] = v;
            self.yty[j * c + slot] = v;
        }
        self.yty[slot * c + slot] = new_sq;
        self.ys[slot] = ys;
    }
}
