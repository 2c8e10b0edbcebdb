mod common;

use common::FnOracle;
use lmls_core::line_search::{backtrack, initial_step, LineSearchConfig};
use proptest::prelude::*;

type Scalar = fn(&[f64]) -> f64;
type Gradient = fn(&[f64]) -> Vec<f64>;

fn quartic() -> FnOracle<Scalar, Gradient> {
    FnOracle {
        dim: 1,
        f: |x: &[f64]| x[0].powi(4),
        g: |x: &[f64]| vec![4.0 * x[0].powi(3)],
    }
}

#[test]
fn unit_step_on_half_square() {
    let o = FnOracle {
        dim: 1,
        f: |x: &[f64]| 0.5 * x[0] * x[0],
        g: |x: &[f64]| vec![x[0]],
    };
    let cfg = LineSearchConfig::new(0.5, 0.5, 10.0, 100).unwrap();
    let (out, x) = backtrack(&o, &[4.0], &[-4.0], &[4.0], 8.0, 1, &cfg, 0).unwrap();
    assert_eq!(out.alpha, 1.0);
    assert_eq!(out.backtracks, 0);
    assert!(out.wolfe_satisfied);
    assert_eq!(x, vec![0.0]);
}

#[test]
fn past_the_limit_the_initial_step_is_taken() {
    let o = quartic();
    let cfg = LineSearchConfig::new(0.1, 0.5, 10.0, 5).unwrap();
    for k in [5, 6, 50] {
        let (out, x) = backtrack(&o, &[1.0], &[-50.0], &[4.0], 1.0, k, &cfg, 0).unwrap();
        assert_eq!(out.backtracks, 0);
        assert_eq!(out.f_evals, 1);
        assert_eq!(out.alpha, initial_step(k, 10.0));
        assert!(!out.wolfe_satisfied);
        assert_eq!(x, vec![1.0 - 50.0 * out.alpha]);
    }
}

#[test]
fn overshooting_quartic_matches_scalar_scan() {
    let o = quartic();
    let (c, rho) = (0.1, 0.5);
    let cfg = LineSearchConfig::new(c, rho, 1e3, 1000).unwrap();
    let (out, _) = backtrack(&o, &[1.0], &[-50.0], &[4.0], 1.0, 1, &cfg, 0).unwrap();
    let j = (0..)
        .find(|&j| {
            let a = rho.powi(j);
            (1.0 - 50.0 * a).powi(4) <= 1.0 + c * a * (4.0 * -50.0)
        })
        .unwrap();
    assert_eq!(out.backtracks, j as usize);
    assert_eq!(out.alpha, rho.powi(j));
    assert_eq!(out.f_evals, j as usize + 1);
}

#[test]
fn nan_trial_is_rejected() {
    let o = FnOracle {
        dim: 1,
        f: |x: &[f64]| if x[0] < -1.0 { f64::NAN } else { x[0] * x[0] },
        g: |x: &[f64]| vec![2.0 * x[0]],
    };
    let cfg = LineSearchConfig::new(1e-4, 0.5, 10.0, 100).unwrap();
    let (out, x) = backtrack(&o, &[1.0], &[-4.0], &[2.0], 1.0, 1, &cfg, 0).unwrap();
    assert!(out.wolfe_satisfied);
    assert!(x[0] >= -1.0);
    assert!(out.backtracks >= 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn accepted_step_is_on_the_grid(
        x0 in -3.0f64..3.0,
        scale in 0.1f64..100.0,
        k in 1usize..60,
        tau in 1usize..40,
        xi in 1.0f64..30.0,
        rho in 0.1f64..0.9,
        c in 1e-4f64..0.9,
    ) {
        let o = quartic();
        let g = 4.0 * x0.powi(3);
        prop_assume!(g != 0.0);
        let p = -scale * g.signum();
        let f0 = x0.powi(4);
        let cfg = LineSearchConfig::new(c, rho, xi, tau).unwrap();
        let (out, x) = backtrack(&o, &[x0], &[p], &[g], f0, k, &cfg, 0).unwrap();

        let a0 = (xi / k as f64).min(1.0);
        let limit = tau.saturating_sub(k);
        prop_assert!(out.backtracks <= limit);
        prop_assert_eq!(out.alpha, a0 * rho.powi(out.backtracks as i32));
        prop_assert_eq!(out.f_evals, out.backtracks + 1);
        prop_assert_eq!(x[0], x0 + out.alpha * p);

        // brute-force scan of the same loop
        let holds = |i: usize| {
            let a = a0 * rho.powi(i as i32);
            (x0 + a * p).powi(4) <= f0 + c * a * g * p
        };
        let first = (0..=limit).find(|&i| holds(i));
        match first {
            Some(i) => {
                prop_assert_eq!(out.backtracks, i);
                prop_assert!(out.wolfe_satisfied);
            }
            None => {
                prop_assert_eq!(out.backtracks, limit);
                prop_assert!(!out.wolfe_satisfied);
            }
        }
    }
}
