//! The public generator `R: {0,1}^|T| -> Z_q^{nd x n}`, instantiated with
//! SHAKE256 keyed by the instance salt and the input bits.

use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake256;

use crate::modmath::ModMatrix;
use crate::symbols::BitString;

const DOMAIN: &[u8] = b"kih/prg-R/v1";

pub(crate) fn expand(salt: &[u8], input: &BitString, rows: usize, cols: usize, q: u64) -> ModMatrix {
    let mut xof = Shake256::default();
    xof.update(DOMAIN);
    xof.update(&(salt.len() as u64).to_le_bytes());
    xof.update(salt);
    xof.update(&(input.len() as u64).to_le_bytes());
    let packed: Vec<u8> = input.bits().iter().map(|&b| b as u8).collect();
    xof.update(&packed);
    let mut reader = xof.finalize_xof();

    let bits = 64 - (q - 1).leading_zeros();
    let mask = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
    let mut next = move || loop {
        let mut buf = [0u8; 8];
        reader.read(&mut buf);
        let v = u64::from_le_bytes(buf) & mask;
        if v < q {
            return v;
        }
    };
    ModMatrix::from_fn(rows, cols, q, |_, _| next())
}
