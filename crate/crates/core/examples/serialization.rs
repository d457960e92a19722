//! Write an instance, a seed and a ciphertext to bytes and read them back.

use kih::codec::{decode_ciphertext, decode_instance, decode_seed, encode_ciphertext, encode_instance, encode_seed};
use kih::ue::{ue_enc, ue_setup, Message, MsgMode};
use kih::{BitString, Entropy, Params, Preset, PrfInstance};

fn main() -> kih::Result<()> {
    let e = Entropy::from_hex("07")?;
    let inst = PrfInstance::sample(&Params::preset(Preset::Desk), &mut e.stream("instance"))?;
    let seed = inst.keygen(&mut e.stream("seed"));

    let bytes = encode_instance(&inst);
    let back = decode_instance(&bytes)?;
    println!("instance: {} bytes, equal {}", bytes.len(), back == inst);

    let bytes = encode_seed(inst.params(), &seed);
    println!("seed: {} bytes, equal {}", bytes.len(), decode_seed(&bytes, inst.params())? == seed);

    let mut rng = e.stream("ue");
    let key = ue_setup(&inst, &mut rng);
    let m = Message::random(&inst, MsgMode::Raw, &mut rng)?;
    let c = ue_enc(&inst, &key, &m, &BitString::random(inst.leaves(), &mut rng))?;
    let bytes = encode_ciphertext(&c);
    println!("ciphertext: {} bytes, equal {}", bytes.len(), decode_ciphertext(&bytes)? == c);

    let err = decode_instance(&bytes[..10]).unwrap_err();
    println!("truncated input: {err}");
    Ok(())
}
