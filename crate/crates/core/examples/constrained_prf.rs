//! Pin half of the input under one seed, finish the evaluation with another.

use kih::cprf::{constrain, eval_constrained, PadMode, Side};
use kih::{Entropy, Params, Preset, PrfInstance, SymbolString};

fn main() -> kih::Result<()> {
    let e = Entropy::from_hex("05")?;
    let inst = PrfInstance::sample(&Params::preset(Preset::Toy).with_tree("balanced:4")?, &mut e.stream("instance"))?;
    let k0 = inst.keygen(&mut e.stream("k0"));
    let k1 = inst.keygen(&mut e.stream("k1"));

    let ck = constrain(&inst, &k0, &"0110".parse()?, Side::Left, PadMode::Ones)?;
    for target in ["1100", "0101"] {
        let target: SymbolString = target.parse()?;
        let partner = ck.partner_input(&inst, &target)?;
        let out = eval_constrained(&ck, &inst, &k1, &target)?;
        println!("target {target}: partner input {partner}, row 0 {:?}", out.row(0));
    }
    Ok(())
}
