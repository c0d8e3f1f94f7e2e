//! Trend shapes and size-adjusted power across initial conditions.

use urblock::mc::figures::{power_points_csv, size_adjusted_power, trend_curves};
use urblock::mc::{DgpSpec, TestId};
use urblock::{CritTable, LagRule};

fn main() -> urblock::Result<()> {
    let curves = trend_curves(3.0, 11);
    print!("{curves}");

    let alt = DgpSpec::random_walk(200).with_rho(0.95);
    let tests = [TestId::tau_sb(0.7, LagRule::Fixed(0)), TestId::tau_fb(0.2, LagRule::Fixed(0))];
    let points = size_adjusted_power(&alt, &tests, &[0.0, 2.0, 5.0], 0.05, 500, 17, &CritTable::embedded())?;
    print!("{}", power_points_csv(&points, None));
    Ok(())
}
