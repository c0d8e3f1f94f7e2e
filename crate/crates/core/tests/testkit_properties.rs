mod common;

use proptest::prelude::*;
use urblock::prewhiten::{fit_prewhiten, select_lag_bic};
use urblock::rng::RngStream;
use urblock::testkit::{tau_fb_statistic, tau_sb_statistic};
use urblock::{run_test, CritTable, LagRule, Series, TestSpec};

fn walk(n: usize, seed: u64) -> Series {
    common::random_walk(n, seed)
}

fn ar_walk(n: usize, coef: f64, seed: u64) -> Series {
    let mut g = RngStream::new(seed, 1).generator();
    let (mut u, mut y) = (0.0, 0.0);
    Series::new(
        (0..n)
            .map(|_| {
                u = coef * u + g.normal();
                y += u;
                y
            })
            .collect(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn statistics_shift_and_scale_invariant(
        seed in 0u64..1_000_000,
        n in 40usize..400,
        c in -1e3f64..1e3,
        a in 0.01f64..100.0,
    ) {
        let s = walk(n, seed);
        let shifted = s.affine(1.0, c).unwrap();
        let scaled = s.affine(a, 0.0).unwrap();
        let b_sb = (n as f64).powf(0.7) as usize;
        let b_fb = n / 5;
        let (sb, _) = tau_sb_statistic(&s, b_sb).unwrap();
        let (fb, _) = tau_fb_statistic(&s, b_fb).unwrap();
        for other in [&shifted, &scaled] {
            let (sb2, _) = tau_sb_statistic(other, b_sb).unwrap();
            let (fb2, _) = tau_fb_statistic(other, b_fb).unwrap();
            prop_assert!((sb - sb2).abs() <= 1e-10 * sb.abs().max(1.0), "{sb} {sb2}");
            prop_assert!((fb - fb2).abs() <= 1e-10 * fb.abs().max(1.0), "{fb} {fb2}");
        }
    }

    #[test]
    fn rejection_monotone_in_alpha(seed in 0u64..1_000_000, fixed in any::<bool>()) {
        let table = CritTable::embedded();
        let s = ar_walk(200, 0.0, seed);
        let alphas = [0.01, 0.02, 0.03, 0.04, 0.05, 0.1, 0.2];
        let rejects: Vec<bool> = alphas
            .iter()
            .map(|&al| {
                let spec = if fixed { TestSpec::fixed_b(0.3) } else { TestSpec::small_b(0.7) };
                run_test(&s, &spec.with_alpha(al), &table).unwrap().reject
            })
            .collect();
        for w in rejects.windows(2) {
            prop_assert!(!w[0] || w[1]);
        }
    }

    #[test]
    fn zero_lag_prewhitening_is_identity(seed in 0u64..1_000_000, n in 20usize..200) {
        let s = walk(n, seed);
        prop_assert_eq!(fit_prewhiten(&s, 0).unwrap().whitened, s);
    }
}

#[test]
fn run_test_is_deterministic() {
    let table = CritTable::embedded();
    let s = ar_walk(300, 0.5, 9);
    for spec in [
        TestSpec::small_b(0.7).with_lag(LagRule::Bic(5)),
        TestSpec::fixed_b(0.2).with_lag(LagRule::Schwert),
    ] {
        let a = run_test(&s, &spec, &table).unwrap();
        let b = run_test(&s, &spec, &table).unwrap();
        assert_eq!(a.statistic.to_bits(), b.statistic.to_bits());
        assert_eq!(a.diagnostics.lag, b.diagnostics.lag);
    }
}

#[test]
fn bic_selection_is_deterministic_and_sensible() {
    // AR(1) errors with coefficient 0.5: BIC should mostly pick one lag
    let reps = 300u64;
    let mut hits = [0usize; 6];
    for r in 0..reps {
        let s = ar_walk(300, 0.5, 40_000 + r);
        let p = select_lag_bic(&s, 5).unwrap();
        assert_eq!(p, select_lag_bic(&s, 5).unwrap());
        hits[p] += 1;
    }
    assert!(hits[1] as f64 > 0.8 * reps as f64, "{hits:?}");
    assert!((hits[0] as u64) < reps / 50, "{hits:?}");

    // iid errors: zero lags most of the time
    let mut zero = 0;
    for r in 0..reps {
        if select_lag_bic(&ar_walk(300, 0.0, 50_000 + r), 5).unwrap() == 0 {
            zero += 1;
        }
    }
    assert!(zero as f64 > 0.85 * reps as f64, "{zero}");
}

#[test]
fn prewhitened_walk_looks_like_iid_walk() {
    // after filtering with the estimated coefficient the increments are close to white
    let s = ar_walk(20_000, 0.5, 77);
    let fit = fit_prewhiten(&s, 1).unwrap();
    let d: Vec<f64> = fit.whitened.values().windows(2).map(|w| w[1] - w[0]).collect();
    let m = d.iter().sum::<f64>() / d.len() as f64;
    let c0: f64 = d.iter().map(|x| (x - m).powi(2)).sum();
    let c1: f64 = d.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum();
    assert!((c1 / c0).abs() < 0.03, "{}", c1 / c0);
}
