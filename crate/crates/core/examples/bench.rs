//! Time evaluation as the tree grows and count nodes touched by a single bit flip.

use kih::bench::{bench_report, run_bench, DEFAULT_SIZES};
use kih::{Entropy, Params, Preset};

fn main() -> kih::Result<()> {
    let params = Params::preset(Preset::Desk);
    let rows = run_bench(&params, &DEFAULT_SIZES, 3, &Entropy::from_hex("08")?)?;
    print!("{}", bench_report(&params, &rows));
    Ok(())
}
