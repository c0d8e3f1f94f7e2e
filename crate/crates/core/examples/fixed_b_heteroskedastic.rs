//! Fixed-b test under a variance break. The variance profile drives the time
//! transformation; the diagnostics show the auxiliary length it produced.

use urblock::mc::{simulate_dgp, DgpSpec, VarianceFn};
use urblock::nuisance::variance_profile;
use urblock::pooled::pooled_fit;
use urblock::rng::RngStream;
use urblock::{resolve_blocklength, tau_fb, BlockScheme, CritTable};

fn main() -> urblock::Result<()> {
    let table = CritTable::load_default()?;
    let dgp = DgpSpec::random_walk(400).with_variance(VarianceFn::StepBreak(2.0));
    let y = simulate_dgp(&dgp, RngStream::new(11, 0))?;
    let b = resolve_blocklength(BlockScheme::FixedFraction(0.2), y.len())?;

    let profile = variance_profile(&pooled_fit(&y, b)?.residuals)?;
    for s in [0.25, 0.5, 2.0 / 3.0, 0.9] {
        println!("eta({s:.3}) = {:.3}", profile.eval(s));
    }

    let out = tau_fb(&y, b, 0.05, &table)?;
    let d = &out.diagnostics;
    println!(
        "tau-FB={:.3} cv={:.3} reject={} aux_len={:?} b={:?}",
        out.statistic, out.critical_value, out.reject, d.aux_len, d.relative_b
    );
    Ok(())
}
