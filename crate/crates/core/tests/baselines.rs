mod common;

use std::collections::VecDeque;

use common::*;
use lmls_core::baselines::{
    lbfgs_direction, run_baseline, sgd_step, svrg_run, BaselineConfig, CurvaturePair, Lbfgs, LbfgsConfig,
};
use lmls_core::oracles::{LogisticOracle, NoiseModel, NoisyQuadratic, SparseDataset, StochasticOracle};
use lmls_core::{Budget, Error, EvalCounter, LineSearchConfig, Optimizer, Timing};
use nalgebra::DMatrix;

fn logistic(batch: usize) -> LogisticOracle {
    let ds = SparseDataset::synthetic(80, 6, 0.7, 0.5, 12);
    LogisticOracle::new(ds, 0.05, batch).unwrap()
}

#[test]
fn sgd_decreases_a_quadratic_monotonically() {
    let q = NoisyQuadratic::random(6, 0.5, 4.0, NoiseModel::default(), 1).unwrap();
    let mut x = vec![2.0; 6];
    let mut f = q.value(&x);
    for _ in 0..100 {
        x = sgd_step(&x, &q.gradient(&x), 0.45);
        let next = q.value(&x);
        // allow rounding once the iterate has settled at the minimizer
        assert!(next <= f + 1e-14 * f.abs());
        f = next;
    }
}

#[test]
fn svrg_with_full_batches_is_gradient_descent() {
    let o = logistic(80);
    let eta = 0.5;
    let t = svrg_run(&o, vec![0.0; 6], 5, eta, &Budget::iters(12), 0, Timing::Off).unwrap();
    let mut x = vec![0.0; 6];
    for row in &t.records[1..] {
        let g = o.full_gradient(&x).unwrap();
        x = sgd_step(&x, &g, eta);
        assert!((row.cost - o.true_f(&x).unwrap()).abs() <= 1e-13);
    }
    // snapshots every 5 inner steps cost n each, inner steps 2b each
    assert_eq!(t.records[1].grad_evals, 80 + 160);
    assert_eq!(t.records[5].grad_evals, 80 + 5 * 160);
    assert_eq!(t.records[6].grad_evals, 2 * 80 + 6 * 160);
}

#[test]
fn svrg_correction_is_unbiased() {
    let o = logistic(1);
    let x: Vec<f64> = (0..6).map(|i| 0.2 * i as f64).collect();
    let snap = vec![0.1; 6];
    let mu = o.full_gradient(&snap).unwrap();
    let n = o.data().n_samples();
    let mut mean = vec![0.0; 6];
    for i in 0..n {
        let (_, gx) = o.loss_grad_on(&x, &[i]);
        let (_, gs) = o.loss_grad_on(&snap, &[i]);
        for j in 0..6 {
            mean[j] += (gx[j] - gs[j] + mu[j]) / n as f64;
        }
    }
    assert!(rel_diff(&mean, &o.full_gradient(&x).unwrap()) < 1e-13);
}

#[test]
fn svrg_converges_on_strongly_convex_logistic() {
    let full = logistic(80);
    // reference optimum from a long exact-gradient L-BFGS run
    let cfg = LbfgsConfig {
        memory: 10,
        line_search: LineSearchConfig {
            tau: 1_000_000,
            ..Default::default()
        },
    };
    let mut opt = Lbfgs::new(vec![0.0; 6], cfg, 0);
    let mut ev = EvalCounter::default();
    for _ in 0..200 {
        opt.step(&full, &mut ev).unwrap();
    }
    let f_star = full.true_f(opt.x()).unwrap();
    assert!(full.full_gradient(opt.x()).unwrap().iter().all(|g| g.abs() < 1e-10));

    let o = logistic(4);
    let t = svrg_run(&o, vec![0.0; 6], 160, 0.3, &Budget::iters(4000), 5, Timing::Off).unwrap();
    let gap = t.final_cost() - f_star;
    assert!(gap <= 1e-8, "{gap:e}");
}

#[test]
fn svrg_needs_a_finite_sum() {
    let q = NoisyQuadratic::random(3, 1.0, 2.0, NoiseModel::default(), 1).unwrap();
    let err = svrg_run(&q, vec![0.0; 3], 10, 0.1, &Budget::iters(5), 0, Timing::Off).unwrap_err();
    assert!(matches!(err, Error::InvalidConfig(_)));
}

#[test]
fn lbfgs_empty_history_is_steepest_descent() {
    assert_eq!(lbfgs_direction(&VecDeque::new(), &[2.0, -1.0]), vec![-2.0, 1.0]);
}

#[test]
fn lbfgs_terminates_on_small_quadratic() {
    let q = NoisyQuadratic::random(4, 0.5, 5.0, NoiseModel::default(), 3).unwrap();
    let cfg = LbfgsConfig {
        memory: 4,
        line_search: LineSearchConfig {
            tau: 1_000_000,
            ..Default::default()
        },
    };
    let mut opt = Lbfgs::new(vec![1.0; 4], cfg, 0);
    let mut ev = EvalCounter::default();
    let mut done = false;
    for _ in 0..20 {
        opt.step(&q, &mut ev).unwrap();
        if q.gradient(opt.x()).iter().map(|v| v * v).sum::<f64>().sqrt() <= 1e-8 {
            done = true;
            break;
        }
    }
    assert!(done);
}

#[test]
fn two_loop_equals_dense_bfgs_recursion() {
    let mut r = rng(6);
    let d = 5;
    let a = {
        let b = DMatrix::from_fn(d, d, |_, _| gaussian_vec(1, &mut r)[0]);
        &b * b.transpose() + DMatrix::identity(d, d)
    };
    let pairs: VecDeque<CurvaturePair> = (0..3)
        .map(|_| {
            let s = gaussian_vec(d, &mut r);
            let y = (&a * na_vec(&s)).as_slice().to_vec();
            CurvaturePair::new(s, y).unwrap()
        })
        .collect();
    let last = pairs.back().unwrap();
    let h0 = last.s.iter().zip(&last.y).map(|(a, b)| a * b).sum::<f64>() / last.y.iter().map(|v| v * v).sum::<f64>();
    let mut h = DMatrix::identity(d, d) * h0;
    for p in &pairs {
        let (s, y) = (na_vec(&p.s), na_vec(&p.y));
        let rho = 1.0 / s.dot(&y);
        let v = DMatrix::identity(d, d) - &y * s.transpose() * rho;
        h = v.transpose() * h * v + &s * s.transpose() * rho;
    }
    let g = gaussian_vec(d, &mut r);
    let p = lbfgs_direction(&pairs, &g);
    let want = -(h * na_vec(&g));
    assert!(rel_diff(&p, want.as_slice()) < 1e-12);
}

#[test]
fn traces_share_one_schema() {
    let o = logistic(8);
    let budget = Budget::grad_evals(400);
    for cfg in [
        BaselineConfig::Sgd { eta: 0.1 },
        BaselineConfig::Adam(Default::default()),
        BaselineConfig::Svrg {
            eta: 0.1,
            epoch_length: 10,
        },
        BaselineConfig::Lbfgs(Default::default()),
    ] {
        let t = run_baseline(&o, vec![0.0; 6], &cfg, &budget, 1, Timing::Off).unwrap();
        assert!(t.last().unwrap().grad_evals <= 400, "{}", cfg.name());
        assert!(t.records.len() > 1, "{}", cfg.name());
        let again = run_baseline(&o, vec![0.0; 6], &cfg, &budget, 1, Timing::Off).unwrap();
        assert_eq!(t, again);
    }
    assert!(BaselineConfig::Sgd { eta: 0.0 }.validate().is_err());
    assert!(BaselineConfig::Svrg { eta: 0.1, epoch_length: 0 }.validate().is_err());
}
