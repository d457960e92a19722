//! Run the built-in consistency checks for every preset.

use kih::selftest::selftest;
use kih::{Entropy, Preset};

fn main() -> kih::Result<()> {
    for preset in [Preset::Toy, Preset::Desk] {
        let report = selftest(preset, &Entropy::from_hex("09")?)?;
        println!("{preset}: {} checks passed", report.get("checks").unwrap_or("?"));
    }
    Ok(())
}
