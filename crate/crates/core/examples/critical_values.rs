//! Simulates a small fixed-b critical value table and sets it against the
//! embedded one.

use urblock::limits::build_crit_table;
use urblock::CritTable;

fn main() -> urblock::Result<()> {
    let b = [0.1, 0.2, 0.4];
    let alpha = [0.05, 0.1];
    let sim = build_crit_table(&b, &alpha, 2000, 5000, 7)?;
    let embedded = CritTable::embedded();
    for &bb in &b {
        for &a in &alpha {
            println!(
                "b={bb} alpha={a}: simulated {:.3} embedded {:.3}",
                sim.lookup(bb, a)?,
                embedded.lookup(bb, a)?
            );
        }
    }
    print!("{}", sim.to_text());
    Ok(())
}
