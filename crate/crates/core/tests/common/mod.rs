//! Independent dense oracles built on nalgebra.
#![allow(dead_code)]

use lmls_core::{CholFactor, ColMatrix, PairRingBuffer};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> ColMatrix {
    ColMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

pub fn gaussian_vec(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn to_na(m: &ColMatrix) -> DMatrix<f64> {
    DMatrix::from_column_slice(m.rows(), m.cols(), m.as_slice())
}

pub fn factor_to_na(f: &CholFactor) -> DMatrix<f64> {
    let n = f.dim();
    DMatrix::from_fn(n, n, |i, j| f.get(i, j))
}

/// `λI + YᵀY`
pub fn gram(y: &ColMatrix, lambda: f64) -> DMatrix<f64> {
    let y = to_na(y);
    let m = y.ncols();
    DMatrix::identity(m, m) * lambda + y.transpose() * &y
}

/// `‖RᵀR − (λI + YᵀY)‖_F`
pub fn factor_error(f: &CholFactor, y: &ColMatrix) -> f64 {
    let r = factor_to_na(f);
    (r.transpose() * &r - gram(y, f.lambda())).norm()
}

/// Upper factor from nalgebra's Cholesky of `λI + YᵀY`.
pub fn dense_factor(y: &ColMatrix, lambda: f64) -> DMatrix<f64> {
    gram(y, lambda).cholesky().expect("SPD").l().transpose()
}

/// Dense inverse Hessian `(λγI + SYᵀ)(λI + YYᵀ)⁻¹`.
pub fn dense_h(s: &ColMatrix, y: &ColMatrix, lambda: f64, gamma: f64) -> DMatrix<f64> {
    let (s, y) = (to_na(s), to_na(y));
    let d = y.nrows();
    let left = DMatrix::identity(d, d) * (lambda * gamma) + &s * y.transpose();
    let right = DMatrix::identity(d, d) * lambda + &y * y.transpose();
    let inv = right.try_inverse().expect("invertible");
    left * inv
}

pub fn dense_h_of(buf: &PairRingBuffer, lambda: f64, gamma: f64) -> DMatrix<f64> {
    if buf.is_empty() {
        let d = buf.dim();
        return DMatrix::identity(d, d) * gamma;
    }
    dense_h(buf.s(), buf.y(), lambda, gamma)
}

/// Fill a buffer with `pairs` pairs of given vectors, returning the buffer
/// and its incrementally maintained factor.
pub fn filled_buffer(
    d: usize,
    m: usize,
    lambda: f64,
    pairs: &[(Vec<f64>, Vec<f64>)],
) -> (PairRingBuffer, CholFactor) {
    let mut buf = PairRingBuffer::new(d, m).unwrap();
    let mut f = CholFactor::empty(lambda);
    for (s, y) in pairs {
        buf.push_pair(&mut f, s, y).unwrap();
    }
    (buf, f)
}

pub fn random_pairs(d: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<(Vec<f64>, Vec<f64>)> {
    (0..count).map(|_| (gaussian_vec(d, rng), gaussian_vec(d, rng))).collect()
}

pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    num / den.max(f64::MIN_POSITIVE)
}

pub fn na_vec(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

/// Deterministic oracle from plain functions; the batch seed is ignored.
pub struct FnOracle<F, G> {
    pub dim: usize,
    pub f: F,
    pub g: G,
}

impl<F, G> lmls_core::StochasticOracle for FnOracle<F, G>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
    G: Fn(&[f64]) -> Vec<f64> + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval_f(&self, x: &[f64], _batch: u64) -> lmls_core::Result<f64> {
        Ok((self.f)(x))
    }

    fn eval_g(&self, x: &[f64], _batch: u64) -> lmls_core::Result<Vec<f64>> {
        Ok((self.g)(x))
    }

    fn true_f(&self, x: &[f64]) -> Option<f64> {
        Some((self.f)(x))
    }
}
