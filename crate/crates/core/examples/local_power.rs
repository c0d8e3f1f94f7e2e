//! Asymptotic local power of the small-b test against `rho = 1 - c/sqrt(BT)`,
//! next to a finite-sample rejection rate at the same `c`.

use urblock::limits::sb_local_power;
use urblock::mc::{local_rho, run_experiment, DgpSpec, RunOptions, TestId};
use urblock::{resolve_blocklength, BlockScheme, CritTable, LagRule};

fn main() -> urblock::Result<()> {
    let t = 500;
    let b = resolve_blocklength(BlockScheme::PowerRule(0.7), t)?;
    let table = CritTable::embedded();
    let test = [TestId::tau_sb(0.7, LagRule::Fixed(0))];
    for c in [0.0, 1.0, 2.0, 3.0] {
        let dgp = DgpSpec::random_walk(t).with_rho(local_rho(c, b, t));
        let mc = run_experiment(&dgp, &test, &RunOptions::new(2000, 9), &table)?;
        println!(
            "c={c}: asymptotic {:.3} simulated {:.3}",
            sb_local_power(c, 0.05, |_| 1.0),
            mc[0].rate
        );
    }
    Ok(())
}
