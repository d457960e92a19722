//! Sample an instance and a seed, then evaluate `F` and `F'`.

use kih::{BitString, Entropy, Params, Preset, PrfInstance, SymbolString};

fn main() -> kih::Result<()> {
    let e = Entropy::from_hex("02")?;
    let params = Params::preset(Preset::Toy).with_tree("balanced:4")?;
    let inst = PrfInstance::sample(&params, &mut e.stream("instance"))?;
    let s = inst.keygen(&mut e.stream("seed"));
    println!("tree {} with {} leaves", inst.tree(), inst.leaves());

    let y: BitString = "10010110".parse()?;
    let out = inst.prf_eval(&s, &y)?;
    println!("F({y}) row 0: {:?}", out.row(0));

    let z1: SymbolString = "1Z0Z".parse()?;
    let out = inst.prf_eval_prime(&s, &"1001".parse()?, &z1)?;
    println!("F'(1001, {z1}) row 0: {:?}", out.row(0));
    Ok(())
}
