//! Large-sample behaviour of the nuisance estimators.

mod common;

use common::{hetero_residuals, step_variance};
use urblock::nuisance::{kappa2_hat, sigma2_hat, variance_profile};

const N: usize = 100_000;

fn block(n: usize) -> usize {
    (n as f64).powf(0.6) as usize
}

/// `∫₀¹ f(r) dr` by the midpoint rule on a fine grid.
fn integrate(f: impl Fn(f64) -> f64) -> f64 {
    let m = 1_000_000;
    (0..m).map(|i| f((i as f64 + 0.5) / m as f64)).sum::<f64>() / m as f64
}

#[test]
fn sigma2_consistent_under_iid() {
    let u = hetero_residuals(N, 1, |_| 1.0);
    let s = sigma2_hat(&u).unwrap();
    assert!((0.98..=1.02).contains(&s), "{s}");
}

#[test]
fn kappa2_consistent_under_iid() {
    let u = hetero_residuals(N, 2, |_| 1.0);
    let k = kappa2_hat(&u, block(N)).unwrap();
    assert!((0.95..=1.05).contains(&k), "{k}");
}

#[test]
fn kappa2_consistent_under_step_variance() {
    let target = integrate(|r| step_variance(r).powi(2)) / integrate(step_variance);
    assert!((target - 11.0 / 3.0).abs() < 1e-4);
    let u = hetero_residuals(N, 3, step_variance);
    let k = kappa2_hat(&u, block(N)).unwrap();
    assert!((k / target - 1.0).abs() < 0.05, "{k} vs {target}");
}

#[test]
fn profile_near_identity_under_iid() {
    let u = hetero_residuals(N, 4, |_| 1.0);
    let d = variance_profile(&u).unwrap().sup_distance_to_identity();
    assert!(d < 0.02, "{d}");
}

#[test]
fn profile_tracks_step_variance() {
    let eta = integrate(|r| if r <= 2.0 / 3.0 { step_variance(r) } else { 0.0 }) / integrate(step_variance);
    assert!((eta - 8.0 / 9.0).abs() < 1e-4);
    let u = hetero_residuals(N, 5, step_variance);
    let p = variance_profile(&u).unwrap();
    assert!((p.eval(2.0 / 3.0) - eta).abs() < 0.02, "{}", p.eval(2.0 / 3.0));
    assert_eq!(p.eval(1.0), 1.0);
}
