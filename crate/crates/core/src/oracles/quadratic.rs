use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{check_dim, BatchSeed, StochasticOracle};
use crate::dense::{axpy, dot, ColMatrix};
use crate::error::{Error, Result};

/// Additive measurement noise `f̂ = f + e`, `ĝ = g + v` with
/// `E[e] = bias`, `Var[e] = σ_f²`, `E[v] = 0`, `Cov[v] = σ_g² I`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseModel {
    pub bias: f64,
    pub sigma_f_sq: f64,
    pub sigma_g_sq: f64,
}

impl NoiseModel {
    pub fn gradient_only(sigma_g: f64) -> Self {
        NoiseModel {
            bias: 0.0,
            sigma_f_sq: 0.0,
            sigma_g_sq: sigma_g * sigma_g,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_f_sq >= 0.0 && self.sigma_g_sq >= 0.0 && self.bias.is_finite()) {
            return Err(Error::InvalidConfig("noise variances must be non-negative".into()));
        }
        Ok(())
    }
}

/// `f(x) = ½ xᵀAx − bᵀx` with Gaussian noise drawn from the batch seed.
#[derive(Debug, Clone)]
pub struct NoisyQuadratic {
    a: ColMatrix,
    b: Vec<f64>,
    noise: NoiseModel,
    minimizer: Vec<f64>,
}

const COST_STREAM: u64 = 0;
const GRAD_STREAM: u64 = 1;

impl NoisyQuadratic {
    pub fn new(a: ColMatrix, b: Vec<f64>, noise: NoiseModel) -> Result<Self> {
        let d = a.rows();
        if a.cols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: a.cols(),
            });
        }
        if b.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: b.len(),
            });
        }
        if !a.is_finite() || b.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        noise.validate()?;
        for i in 0..d {
            for j in 0..i {
                let (u, v) = (a.get(i, j), a.get(j, i));
                if (u - v).abs() > 1e-12 * (u.abs() + v.abs()).max(1.0) {
                    return Err(Error::InvalidConfig("A must be symmetric".into()));
                }
            }
        }
        let minimizer = spd_solve(&a, &b)?;
        Ok(NoisyQuadratic { a, b, noise, minimizer })
    }

    /// Random SPD instance `A = Q diag(eig) Qᵀ` with eigenvalues log-spaced in
    /// `[min_eig, max_eig]` and Gaussian `b`.
    pub fn random(d: usize, min_eig: f64, max_eig: f64, noise: NoiseModel, seed: u64) -> Result<Self> {
        if !(min_eig > 0.0 && max_eig >= min_eig) {
            return Err(Error::InvalidConfig("eigenvalue range must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_orthogonal(d, &mut rng);
        let eig: Vec<f64> = (0..d)
            .map(|i| {
                let t = if d > 1 { i as f64 / (d - 1) as f64 } else { 0.0 };
                min_eig * (max_eig / min_eig).powf(t)
            })
            .collect();
        let a = ColMatrix::from_fn(d, d, |i, j| (0..d).map(|k| q.get(i, k) * eig[k] * q.get(j, k)).sum());
        // symmetrize exactly
        let a = ColMatrix::from_fn(d, d, |i, j| 0.5 * (a.get(i, j) + a.get(j, i)));
        let b = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        NoisyQuadratic::new(a, b, noise)
    }

    pub fn with_noise(mut self, noise: NoiseModel) -> Result<Self> {
        noise.validate()?;
        self.noise = noise;
        Ok(self)
    }

    pub fn a(&self) -> &ColMatrix {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn noise(&self) -> NoiseModel {
        self.noise
    }

    /// `A⁻¹ b`
    pub fn minimizer(&self) -> &[f64] {
        &self.minimizer
    }

    pub fn min_value(&self) -> f64 {
        self.value(&self.minimizer)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        0.5 * dot(x, &self.a.mul_vec(x)) - dot(&self.b, x)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.a.mul_vec(x);
        axpy(-1.0, &self.b, &mut g);
        g
    }

    fn rng(batch: BatchSeed, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(batch);
        rng.set_stream(stream);
        rng
    }
}

impl StochasticOracle for NoisyQuadratic {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn eval_f(&self, x: &[f64], batch: BatchSeed) -> Result<f64> {
        check_dim(self.dim(), x)?;
        let mut f = self.value(x) + self.noise.bias;
        if self.noise.sigma_f_sq > 0.0 {
            let e: f64 = Self::rng(batch, COST_STREAM).sample(StandardNormal);
            f += self.noise.sigma_f_sq.sqrt() * e;
        }
        Ok(f)
    }

    fn eval_g(&self, x: &[f64], batch: BatchSeed) -> Result<Vec<f64>> {
        check_dim(self.dim(), x)?;
        let mut g = self.gradient(x);
        if self.noise.sigma_g_sq > 0.0 {
            let sd = self.noise.sigma_g_sq.sqrt();
            let mut rng = Self::rng(batch, GRAD_STREAM);
            for gi in g.iter_mut() {
                let v: f64 = rng.sample(StandardNormal);
                *gi += sd * v;
            }
        }
        Ok(g)
    }

    fn true_f(&self, x: &[f64]) -> Option<f64> {
        Some(self.value(x))
    }
}

/// Columns of a Haar-ish random orthogonal matrix by Gram-Schmidt.
fn random_orthogonal(d: usize, rng: &mut ChaCha8Rng) -> ColMatrix {
    let mut q = ColMatrix::zeros(d, 0);
    while q.cols() < d {
        let mut v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        // two passes for orthogonality to working precision
        for _ in 0..2 {
            for j in 0..q.cols() {
                let c = dot(q.col(j), &v);
                axpy(-c, q.col(j), &mut v);
            }
        }
        let n = dot(&v, &v).sqrt();
        if n > 1e-8 {
            v.iter_mut().for_each(|x| *x /= n);
            q.push_col(&v);
        }
    }
    q
}

/// Solve `A x = b` by Cholesky, failing if `A` is not positive definite.
fn spd_solve(a: &ColMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let d = b.len();
    let mut l = vec![0.0; d * d];
    for j in 0..d {
        let mut s = a.get(j, j);
        for k in 0..j {
            s -= l[j * d + k] * l[j * d + k];
        }
        if !(s > 0.0) {
            return Err(Error::NotPositiveDefinite { index: j, pivot: s });
        }
        let ljj = s.sqrt();
        l[j * d + j] = ljj;
        for i in j + 1..d {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l[i * d + k] * l[j * d + k];
            }
            l[i * d + j] = s / ljj;
        }
    }
    let mut x = b.to_vec();
    for i in 0..d {
        for k in 0..i {
            x[i] -= l[i * d + k] * x[k];
        }
        x[i] /= l[i * d + i];
    }
    for i in (0..d).rev() {
        for k in i + 1..d {
            x[i] -= l[k * d + i] * x[k];
        }
        x[i] /= l[i * d + i];
    }
    Ok(x)
}
