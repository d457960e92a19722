//! Measure how far `F_S1(x) + F_S2(y)` lands from `F'_{S1+S2}(x0, x1 ⊕' y1)`.

use kih::kihprf::{defect_report, defect_trials};
use kih::{Entropy, Params, Preset, PrfInstance};

fn main() -> kih::Result<()> {
    let e = Entropy::from_hex("04")?;
    let inst = PrfInstance::sample(&Params::preset(Preset::Toy), &mut e.stream("instance"))?;
    let trials = defect_trials(&inst, &e.child("trials"), 200, 4)?;
    print!("{}", defect_report(&trials));
    Ok(())
}
