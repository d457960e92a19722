//! Encrypt, rotate the key, update the ciphertext, then measure what survived.

use kih::ue::{
    ue_dec, ue_enc, ue_next, ue_setup, ue_upd, unidirectionality_experiment, update_consistency_report, Message,
    MsgMode,
};
use kih::{BitString, Entropy, Params, Preset, PrfInstance};

fn main() -> kih::Result<()> {
    let e = Entropy::from_hex("06")?;
    let inst = PrfInstance::sample(&Params::preset(Preset::Desk), &mut e.stream("instance"))?;
    let mut rng = e.stream("protocol");

    let key = ue_setup(&inst, &mut rng);
    let m = Message::random(&inst, MsgMode::Raw, &mut rng)?;
    let i = BitString::random(inst.leaves(), &mut rng);
    let c = ue_enc(&inst, &key, &m, &i)?;
    assert_eq!(ue_dec(&inst, &key, &c)?, m);
    println!("epoch 0 round trip ok");

    let (next, tok) = ue_next(&inst, &key, &mut rng)?;
    let c1 = ue_upd(&inst, &tok, &c)?;
    let exact = ue_dec(&inst, &next, &c1)? == m;
    println!("epoch 1 after update decrypts exactly: {exact}");

    print!("{}", update_consistency_report(&inst, &e.child("consistency"), 20, 4)?);
    print!("{}", unidirectionality_experiment(&inst, &e.child("reversion"), 20, 4)?);
    Ok(())
}
