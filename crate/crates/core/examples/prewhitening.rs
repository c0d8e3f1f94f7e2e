//! BIC lag selection and the pre-whitened small-b test on AR(1) errors.

use urblock::mc::{simulate_dgp, DgpSpec, ErrorModel};
use urblock::prewhiten::{bic_values, fit_prewhiten, schwert_pmax};
use urblock::rng::RngStream;
use urblock::{run_test, CritTable, LagRule, TestSpec};

fn main() -> urblock::Result<()> {
    let dgp = DgpSpec::random_walk(300).with_errors(ErrorModel::Ar1(0.5));
    let y = simulate_dgp(&dgp, RngStream::new(5, 0))?;

    let p_max = schwert_pmax(y.len());
    for (p, bic) in bic_values(&y, p_max)?.iter().enumerate() {
        println!("p={p:2} bic={bic:.4}");
    }
    let fit = fit_prewhiten(&y, 1)?;
    println!("theta_hat={:?}", fit.theta_hat);

    let table = CritTable::embedded();
    for lag in [LagRule::Fixed(0), LagRule::Bic(p_max), LagRule::Schwert] {
        let out = run_test(&y, &TestSpec::small_b(0.7).with_lag(lag), &table)?;
        println!("{lag:?}: lag={} tau={:.3} reject={}", out.diagnostics.lag, out.statistic, out.reject);
    }
    Ok(())
}
