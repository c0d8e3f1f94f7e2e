//! Runs a small experiment grid from config text and prints both renderings.

use urblock::mc::{parse_config, run_experiment, table, RunOptions};
use urblock::CritTable;

const GRID: &str = "
[demo]
T = 150
rho = 1, 0.95
trend = lstar
lambda = 3
lags = 0
tests = tau-sb[0.7], tau-fb[0.2]
reps = 500
";

fn main() -> urblock::Result<()> {
    let table_cv = CritTable::embedded();
    for ex in parse_config(GRID)? {
        let opts = RunOptions { alpha: ex.alpha, ..RunOptions::new(ex.reps, 2024) };
        let mut results = Vec::new();
        for cell in &ex.cells {
            results.extend(run_experiment(cell, &ex.tests, &opts, &table_cv)?);
        }
        println!("[{}]", ex.name);
        print!("{}", table::to_text(&results));
        print!("{}", table::to_csv(&results, Some("example monte_carlo seed=2024")));
    }
    Ok(())
}
