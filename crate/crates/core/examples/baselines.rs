//! The four comparison tests on one series with simulated finite-sample
//! critical values. The first call per (test, T, lag) builds its null table.

use urblock::baselines::{baseline_test, BaseLag, BaselineKind, BaselineSpec};
use urblock::mc::{simulate_dgp, DgpSpec, TrendKind, TrendSpec};
use urblock::rng::RngStream;

fn main() -> urblock::Result<()> {
    let dgp = DgpSpec::random_walk(200)
        .with_rho(0.9)
        .with_trend(TrendSpec::new(TrendKind::Fourier, 3.0));
    let y = simulate_dgp(&dgp, RngStream::new(3, 0))?;
    for kind in [BaselineKind::Adf, BaselineKind::DfGls, BaselineKind::DfGlsTrend, BaselineKind::EndersLee] {
        let out = baseline_test(&y, &BaselineSpec::new(kind, BaseLag::Fixed(0)), 0.05)?;
        println!("{:13} stat={:7.3} cv={:7.3} reject={}", kind.id(), out.statistic, out.critical_value, out.reject);
    }
    Ok(())
}
