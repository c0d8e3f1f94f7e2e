use urblock::limits::{
    build_crit_table, fb_functional, lower_quantile, simulate_fb_statistic, simulate_path, TABLE_ALPHA,
    TABLE_B,
};
use urblock::rng::RngStream;
use urblock::CritTable;

fn draws(b: f64, c: f64, grid: usize, reps: u64, seed: u64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..reps)
        .map(|r| simulate_fb_statistic(b, c, grid, RngStream::new(seed, r)).unwrap())
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Standard error of the lower `alpha` quantile from the sample itself.
fn quantile_se(sorted: &[f64], alpha: f64) -> f64 {
    let h = 0.01;
    let slope = (lower_quantile(sorted, alpha + h) - lower_quantile(sorted, alpha - h)) / (2.0 * h);
    slope * (alpha * (1.0 - alpha) / sorted.len() as f64).sqrt()
}

#[test]
fn seed_relabeling_leaves_quantiles_unchanged() {
    let a = draws(0.3, 0.0, 1000, 20_000, 1);
    let b = draws(0.3, 0.0, 1000, 20_000, 2);
    for alpha in [0.05, 0.1] {
        let se = (quantile_se(&a, alpha).powi(2) + quantile_se(&b, alpha).powi(2)).sqrt();
        let d = (lower_quantile(&a, alpha) - lower_quantile(&b, alpha)).abs();
        assert!(d < 3.0 * se, "alpha={alpha}: {d} vs se {se}");
    }
}

#[test]
fn local_alternative_shifts_distribution_left() {
    let null = draws(0.2, 0.0, 1000, 10_000, 3);
    let alt = draws(0.2, 10.0, 1000, 10_000, 3);
    assert!(alt[5000] < null[5000], "{} vs {}", alt[5000], null[5000]);
}

#[test]
fn doubling_the_grid_moves_the_quantile_less_than_its_se() {
    // the coarse path is the fine path sampled at every other point
    let (n, reps, b) = (2500usize, 20_000u64, 0.2);
    let mut fine = Vec::with_capacity(reps as usize);
    let mut coarse = Vec::with_capacity(reps as usize);
    for r in 0..reps {
        let path = simulate_path(b, 0.0, 2 * n, RngStream::new(4, r));
        let half: Vec<f64> = path.iter().step_by(2).copied().collect();
        fine.push(fb_functional(&path, b).value().unwrap());
        coarse.push(fb_functional(&half, b).value().unwrap());
    }
    fine.sort_by(f64::total_cmp);
    coarse.sort_by(f64::total_cmp);
    let se = quantile_se(&fine, 0.05);
    let d = (lower_quantile(&fine, 0.05) - lower_quantile(&coarse, 0.05)).abs();
    assert!(d < se, "{d} vs {se}");
}

#[test]
fn built_table_is_deterministic_and_monotone() {
    let a = build_crit_table(&TABLE_B, &TABLE_ALPHA, 200, 1000, 5).unwrap();
    let b = build_crit_table(&TABLE_B, &TABLE_ALPHA, 200, 1000, 5).unwrap();
    assert_eq!(a.to_text(), b.to_text());
    assert!(a.is_monotone_in_alpha());
    assert!(CritTable::embedded().is_monotone_in_alpha());
}

#[test]
fn thread_count_does_not_change_the_table() {
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| build_crit_table(&[0.2, 0.5], &[0.05, 0.1], 300, 1000, 6).unwrap())
    };
    assert_eq!(run(1).to_text(), run(4).to_text());
}
