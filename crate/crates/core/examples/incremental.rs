//! Flip one input bit and recompute only the path from that leaf to the root.

use kih::{BitString, Entropy, EvalCache, Params, Preset, PrfInstance};

fn main() -> kih::Result<()> {
    let e = Entropy::from_hex("03")?;
    let params = Params::preset(Preset::Desk).with_tree("leftspine:8")?;
    let inst = PrfInstance::sample(&params, &mut e.stream("instance"))?;
    let s = inst.keygen(&mut e.stream("seed"));
    let mut rng = e.stream("input");
    let y = BitString::random(2 * inst.leaves(), &mut rng);
    let mut cache = EvalCache::new();
    inst.prf_eval_cached(&s, &y, &mut cache)?;

    let depths = inst.tree().leaf_depths();
    for pos in [0, 3, inst.leaves() + 7] {
        let flipped = y.flipped(pos);
        let fast = inst.eval_incremental(&s, &flipped, pos, &mut cache)?;
        assert_eq!(fast, inst.prf_eval(&s, &flipped)?);
        let touched = cache.stats().last_recomputed;
        // flip it back so the next position differs from the cache in one place
        inst.eval_incremental(&s, &y, pos, &mut cache)?;
        println!(
            "bit {pos:2}: recomputed {touched} nodes (leaf depth {})",
            depths[pos % inst.leaves()]
        );
    }
    Ok(())
}
