use kih::{BitString, Entropy, Params, Preset, PrfInstance};
use rand::Rng;

#[test]
fn flipping_one_input_bit_changes_the_output() {
    let e = Entropy::from_hex("5e").unwrap();
    let inst = PrfInstance::sample(&Params::preset(Preset::Desk), &mut e.stream("instance")).unwrap();
    let t = inst.leaves();
    for k in 0..100 {
        let mut rng = e.trial("flip", k);
        let s = inst.keygen(&mut rng);
        let y = BitString::random(2 * t, &mut rng);
        let pos = rng.gen_range(0..2 * t);
        let a = inst.prf_eval(&s, &y).unwrap();
        let b = inst.prf_eval(&s, &y.flipped(pos)).unwrap();
        assert_ne!(a, b, "trial {k}: flipping bit {pos} of {y} left the output unchanged");
    }
}
