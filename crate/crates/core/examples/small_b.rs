//! Small-b test on a random walk with a broken mean, and on a stationary
//! AR(1) around the same break.

use urblock::mc::{simulate_dgp, DgpSpec, TrendKind, TrendSpec};
use urblock::rng::RngStream;
use urblock::{resolve_blocklength, tau_sb, BlockScheme};

fn main() -> urblock::Result<()> {
    let trend = TrendSpec::new(TrendKind::SharpBreak, 6.0);
    for rho in [1.0, 0.9] {
        let dgp = DgpSpec::random_walk(300).with_rho(rho).with_trend(trend);
        let y = simulate_dgp(&dgp, RngStream::new(1, 0))?;
        let b = resolve_blocklength(BlockScheme::PowerRule(0.7), y.len())?;
        let out = tau_sb(&y, b, 0.05)?;
        println!(
            "rho={rho}: B={b} tau={:.3} cv={:.3} p={:.4} reject={}",
            out.statistic,
            out.critical_value,
            out.p_value.unwrap_or(f64::NAN),
            out.reject
        );
    }
    Ok(())
}
