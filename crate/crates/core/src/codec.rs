//! Binary file formats.
//!
//! Every matrix is written as a 32-byte header (`KIHM`, version `u32`,
//! rows, cols, modulus as `u64`) followed by row-major little-endian `u64`
//! entries. Decompositions reuse the container with modulus 0.
//!
//! Higher-level files start with a 4-byte magic, a `u32` version and a
//! `u32` kind tag:
//!
//! | magic  | kind | payload                                            |
//! |--------|------|----------------------------------------------------|
//! | `KIHP` | 1    | params, `A0`, `A1`                                 |
//! | `KIHP` | 2    | params, seed matrix                                |
//! | `KIHC` | 1    | side, mode, `x0`, instance id, pinned value        |
//! | `KIHU` | 1    | epoch, seed matrix, nonce                          |
//! | `KIHU` | 2    | epoch, seed delta, nonce delta symbols             |
//! | `KIHU` | 3    | epoch, data id, message mode, body                 |
//!
//! Bit strings are a `u64` length then one byte per bit; symbol strings use
//! 0, 1 and 2 for `0`, `1` and `0̄`.

use crate::cprf::{ConstrainedKey, PadMode, Side};
use crate::error::{Error, Result};
use crate::gadget::Decomp;
use crate::kihprf::{PrfInstance, Seed};
use crate::modmath::ModMatrix;
use crate::params::Params;
use crate::symbols::{BitString, Symbol, SymbolString};
use crate::ue::{Ciphertext, EpochKey, MsgMode, UpdateToken};

pub const VERSION: u32 = 1;

const MATRIX_MAGIC: &[u8; 4] = b"KIHM";
const PRF_MAGIC: &[u8; 4] = b"KIHP";
const CPRF_MAGIC: &[u8; 4] = b"KIHC";
const UE_MAGIC: &[u8; 4] = b"KIHU";

const KIND_INSTANCE: u32 = 1;
const KIND_SEED: u32 = 2;
const KIND_CONSTRAINED: u32 = 1;
const KIND_EPOCH_KEY: u32 = 1;
const KIND_TOKEN: u32 = 2;
const KIND_CIPHERTEXT: u32 = 3;

fn malformed(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

#[derive(Default)]
struct Writer(Vec<u8>);

impl Writer {
    fn header(magic: &[u8; 4], kind: u32) -> Self {
        let mut w = Writer::default();
        w.0.extend_from_slice(magic);
        w.u32(VERSION);
        w.u32(kind);
        w
    }

    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }

    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }

    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }

    fn blob(&mut self, b: &[u8]) {
        self.u32(b.len() as u32);
        self.0.extend_from_slice(b);
    }

    fn raw_matrix(&mut self, rows: usize, cols: usize, modulus: u64, entries: impl Iterator<Item = u64>) {
        self.0.extend_from_slice(MATRIX_MAGIC);
        self.u32(VERSION);
        self.u64(rows as u64);
        self.u64(cols as u64);
        self.u64(modulus);
        for e in entries {
            self.u64(e);
        }
    }

    fn matrix(&mut self, m: &ModMatrix) {
        self.raw_matrix(m.rows(), m.cols(), m.modulus(), m.entries().iter().copied());
    }

    fn bits(&mut self, b: &BitString) {
        self.u64(b.len() as u64);
        self.0.extend(b.bits().iter().map(|&x| x as u8));
    }

    fn symbols(&mut self, s: &SymbolString) {
        self.u64(s.len() as u64);
        self.0.extend(s.symbols().iter().map(|s| match s {
            Symbol::Zero => 0u8,
            Symbol::One => 1,
            Symbol::ZeroBar => 2,
        }));
    }

    fn params(&mut self, p: &Params) {
        self.u64(p.n() as u64);
        self.u64(p.q());
        self.u64(p.p());
        self.blob(p.tree_desc().as_bytes());
        self.blob(p.prg_salt());
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| malformed(format!("truncated: need {n} bytes at offset {}", self.pos)))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn len(&mut self, what: &str) -> Result<usize> {
        let v = self.u64()?;
        let rest = (self.buf.len() - self.pos) as u64;
        if v > rest {
            return Err(malformed(format!("{what} length {v} exceeds the remaining {rest} bytes")));
        }
        Ok(v as usize)
    }

    fn blob(&mut self) -> Result<&'a [u8]> {
        let n = self.u32()? as usize;
        self.take(n)
    }

    fn header(&mut self, magic: &[u8; 4], kind: u32, what: &str) -> Result<()> {
        let got = self.take(4)?;
        if got != magic {
            return Err(malformed(format!(
                "expected {} magic for {what}, found {:?}",
                String::from_utf8_lossy(magic),
                String::from_utf8_lossy(got)
            )));
        }
        let version = self.u32()?;
        if version != VERSION {
            return Err(malformed(format!("unsupported version {version}")));
        }
        let k = self.u32()?;
        if k != kind {
            return Err(malformed(format!("file holds kind {k}, not a {what}")));
        }
        Ok(())
    }

    fn raw_matrix(&mut self) -> Result<(usize, usize, u64, Vec<u64>)> {
        if self.take(4)? != MATRIX_MAGIC {
            return Err(malformed("missing KIHM matrix header"));
        }
        let version = self.u32()?;
        if version != VERSION {
            return Err(malformed(format!("unsupported matrix version {version}")));
        }
        let rows = self.u64()?;
        let cols = self.u64()?;
        let modulus = self.u64()?;
        let count = rows
            .checked_mul(cols)
            .filter(|&c| c.saturating_mul(8) <= (self.buf.len() - self.pos) as u64)
            .ok_or_else(|| malformed(format!("{rows}x{cols} matrix does not fit in the file")))?;
        let entries = (0..count).map(|_| self.u64()).collect::<Result<Vec<_>>>()?;
        Ok((rows as usize, cols as usize, modulus, entries))
    }

    fn matrix(&mut self) -> Result<ModMatrix> {
        let (rows, cols, modulus, entries) = self.raw_matrix()?;
        if modulus == 0 {
            return Err(malformed("expected a matrix over Z_m, found a decomposition"));
        }
        ModMatrix::new(rows, cols, modulus, entries).map_err(|e| malformed(e.to_string()))
    }

    fn bits(&mut self) -> Result<BitString> {
        let n = self.len("bit string")?;
        self.take(n)?
            .iter()
            .map(|&b| match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(malformed(format!("bit byte {other}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString::new)
    }

    fn symbols(&mut self) -> Result<SymbolString> {
        let n = self.len("symbol string")?;
        self.take(n)?
            .iter()
            .map(|&b| match b {
                0 => Ok(Symbol::Zero),
                1 => Ok(Symbol::One),
                2 => Ok(Symbol::ZeroBar),
                other => Err(malformed(format!("symbol byte {other}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(SymbolString::new)
    }

    fn params(&mut self) -> Result<Params> {
        let n = self.u64()?;
        let q = self.u64()?;
        let p = self.u64()?;
        let tree = std::str::from_utf8(self.blob()?).map_err(|_| malformed("tree descriptor is not UTF-8"))?;
        let salt = self.blob()?;
        let n = usize::try_from(n).map_err(|_| malformed("n overflows"))?;
        Params::new(n, q, p, tree, salt).map_err(|e| malformed(format!("params block: {e}")))
    }

    fn finish(self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(malformed(format!("{} trailing bytes", self.buf.len() - self.pos)));
        }
        Ok(())
    }
}

fn seed_for(params: &Params, m: ModMatrix) -> Result<Seed> {
    Seed::new(params, m).map_err(|e| malformed(format!("seed: {e}")))
}

pub fn encode_matrix(m: &ModMatrix) -> Vec<u8> {
    let mut w = Writer::default();
    w.matrix(m);
    w.0
}

pub fn decode_matrix(bytes: &[u8]) -> Result<ModMatrix> {
    let mut r = Reader::new(bytes);
    let m = r.matrix()?;
    r.finish()?;
    Ok(m)
}

pub fn encode_decomp(x: &Decomp) -> Vec<u8> {
    let mut w = Writer::default();
    w.raw_matrix(x.rows(), x.cols(), 0, x.entries().iter().map(|&e| e as u64));
    w.0
}

pub fn decode_decomp(bytes: &[u8]) -> Result<Decomp> {
    let mut r = Reader::new(bytes);
    let (rows, cols, modulus, entries) = r.raw_matrix()?;
    r.finish()?;
    if modulus != 0 {
        return Err(malformed("decomposition must carry modulus 0"));
    }
    let entries = entries
        .into_iter()
        .map(|e| u32::try_from(e).map_err(|_| malformed(format!("decomposition entry {e} too large"))))
        .collect::<Result<Vec<_>>>()?;
    Decomp::new(rows, cols, entries).map_err(|e| malformed(e.to_string()))
}

pub fn encode_instance(inst: &PrfInstance) -> Vec<u8> {
    let mut w = Writer::header(PRF_MAGIC, KIND_INSTANCE);
    w.params(inst.params());
    w.matrix(inst.a0());
    w.matrix(inst.a1());
    w.0
}

pub fn decode_instance(bytes: &[u8]) -> Result<PrfInstance> {
    let mut r = Reader::new(bytes);
    r.header(PRF_MAGIC, KIND_INSTANCE, "PRF instance")?;
    let params = r.params()?;
    let a0 = r.matrix()?;
    let a1 = r.matrix()?;
    r.finish()?;
    PrfInstance::from_parts(params, a0, a1).map_err(|e| malformed(format!("instance: {e}")))
}

pub fn encode_seed(params: &Params, seed: &Seed) -> Vec<u8> {
    let mut w = Writer::header(PRF_MAGIC, KIND_SEED);
    w.params(params);
    w.matrix(seed.matrix());
    w.0
}

/// Reads a seed and checks it was written for `params`.
pub fn decode_seed(bytes: &[u8], params: &Params) -> Result<Seed> {
    let mut r = Reader::new(bytes);
    r.header(PRF_MAGIC, KIND_SEED, "seed")?;
    let stored = r.params()?;
    let m = r.matrix()?;
    r.finish()?;
    if &stored != params {
        return Err(Error::Precondition("seed was generated for different parameters".into()));
    }
    seed_for(params, m)
}

pub fn encode_constrained(ck: &ConstrainedKey) -> Vec<u8> {
    let mut w = Writer::header(CPRF_MAGIC, KIND_CONSTRAINED);
    w.u8(match ck.side {
        Side::Left => 0,
        Side::Right => 1,
    });
    w.u8(match ck.mode {
        PadMode::Ones => 0,
        PadMode::Zeros => 1,
    });
    w.bits(&ck.x0);
    w.0.extend_from_slice(&ck.instance_id);
    w.matrix(&ck.value);
    w.0
}

pub fn decode_constrained(bytes: &[u8]) -> Result<ConstrainedKey> {
    let mut r = Reader::new(bytes);
    r.header(CPRF_MAGIC, KIND_CONSTRAINED, "constrained key")?;
    let side = match r.u8()? {
        0 => Side::Left,
        1 => Side::Right,
        other => return Err(malformed(format!("side tag {other}"))),
    };
    let mode = match r.u8()? {
        0 => PadMode::Ones,
        1 => PadMode::Zeros,
        other => return Err(malformed(format!("mode tag {other}"))),
    };
    let x0 = r.bits()?;
    let instance_id = r.take(32)?.try_into().unwrap();
    let value = r.matrix()?;
    r.finish()?;
    Ok(ConstrainedKey {
        side,
        mode,
        x0,
        value,
        instance_id,
    })
}

pub fn encode_epoch_key(key: &EpochKey) -> Vec<u8> {
    let mut w = Writer::header(UE_MAGIC, KIND_EPOCH_KEY);
    w.u64(key.epoch);
    w.matrix(key.k.matrix());
    w.bits(&key.nonce);
    w.0
}

pub fn decode_epoch_key(bytes: &[u8], params: &Params) -> Result<EpochKey> {
    let mut r = Reader::new(bytes);
    r.header(UE_MAGIC, KIND_EPOCH_KEY, "epoch key")?;
    let epoch = r.u64()?;
    let k = seed_for(params, r.matrix()?)?;
    let nonce = r.bits()?;
    r.finish()?;
    Ok(EpochKey { epoch, k, nonce })
}

pub fn encode_token(tok: &UpdateToken) -> Vec<u8> {
    let mut w = Writer::header(UE_MAGIC, KIND_TOKEN);
    w.u64(tok.epoch);
    w.matrix(tok.dk.matrix());
    w.symbols(&tok.dn);
    w.0
}

pub fn decode_token(bytes: &[u8], params: &Params) -> Result<UpdateToken> {
    let mut r = Reader::new(bytes);
    r.header(UE_MAGIC, KIND_TOKEN, "update token")?;
    let epoch = r.u64()?;
    let dk = seed_for(params, r.matrix()?)?;
    let dn = r.symbols()?;
    r.finish()?;
    Ok(UpdateToken { epoch, dk, dn })
}

pub fn encode_ciphertext(c: &Ciphertext) -> Vec<u8> {
    let mut w = Writer::header(UE_MAGIC, KIND_CIPHERTEXT);
    w.u64(c.epoch);
    w.bits(&c.data_id);
    match c.mode {
        MsgMode::Raw => w.u8(0),
        MsgMode::Robust { t } => {
            w.u8(1);
            w.u64(t);
        }
    }
    w.matrix(&c.body);
    w.0
}

pub fn decode_ciphertext(bytes: &[u8]) -> Result<Ciphertext> {
    let mut r = Reader::new(bytes);
    r.header(UE_MAGIC, KIND_CIPHERTEXT, "ciphertext")?;
    let epoch = r.u64()?;
    let data_id = r.bits()?;
    let mode = match r.u8()? {
        0 => MsgMode::Raw,
        1 => MsgMode::Robust { t: r.u64()? },
        other => return Err(malformed(format!("message mode tag {other}"))),
    };
    let body = r.matrix()?;
    r.finish()?;
    Ok(Ciphertext {
        epoch,
        data_id,
        body,
        mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cprf::constrain;
    use crate::entropy::Entropy;
    use crate::params::Preset;
    use crate::ue::{ue_enc, ue_next, ue_setup, Message};

    fn toy() -> (PrfInstance, Entropy) {
        let e = Entropy::from_hex("c0dec0de").unwrap();
        let inst = PrfInstance::sample(&Params::preset(Preset::Toy), &mut e.stream("i")).unwrap();
        (inst, e)
    }

    #[test]
    fn matrix_layout_is_fixed() {
        let m = ModMatrix::new(1, 2, 16, vec![3, 15]).unwrap();
        let bytes = encode_matrix(&m);
        assert_eq!(&bytes[..4], b"KIHM");
        assert_eq!(&bytes[4..8], &[1, 0, 0, 0]);
        assert_eq!(bytes[8], 1);
        assert_eq!(bytes[16], 2);
        assert_eq!(bytes[24], 16);
        assert_eq!(bytes.len(), 32 + 16);
        assert_eq!(&bytes[32..40], &3u64.to_le_bytes());
        assert_eq!(decode_matrix(&bytes).unwrap(), m);
    }

    #[test]
    fn decomp_uses_modulus_zero() {
        let x = Decomp::new(2, 1, vec![0, 1]).unwrap();
        let bytes = encode_decomp(&x);
        assert_eq!(&bytes[24..32], &[0; 8]);
        assert_eq!(decode_decomp(&bytes).unwrap(), x);
        assert!(matches!(decode_matrix(&bytes), Err(Error::Format(_))));
    }

    #[test]
    fn malformed_inputs_are_format_errors() {
        let m = ModMatrix::new(2, 2, 16, vec![1, 2, 3, 4]).unwrap();
        let mut bytes = encode_matrix(&m);
        for cut in [0, 3, 31, bytes.len() - 1] {
            assert!(matches!(decode_matrix(&bytes[..cut]), Err(Error::Format(_))), "cut {cut}");
        }
        let mut long = bytes.clone();
        long.push(0);
        assert!(matches!(decode_matrix(&long), Err(Error::Format(_))));
        bytes[32] = 16; // not reduced
        assert!(matches!(decode_matrix(&bytes), Err(Error::Format(_))));
        let mut huge = encode_matrix(&m);
        huge[8..16].copy_from_slice(&u64::MAX.to_le_bytes());
        assert!(matches!(decode_matrix(&huge), Err(Error::Format(_))));
    }

    #[test]
    fn prf_files_round_trip() {
        let (inst, e) = toy();
        let back = decode_instance(&encode_instance(&inst)).unwrap();
        assert_eq!(back.id(), inst.id());
        let s = inst.keygen(&mut e.stream("s"));
        let bytes = encode_seed(inst.params(), &s);
        assert_eq!(decode_seed(&bytes, inst.params()).unwrap(), s);
        let desk = Params::preset(Preset::Desk);
        assert!(matches!(decode_seed(&bytes, &desk), Err(Error::Precondition(_))));
        assert!(matches!(decode_instance(&bytes), Err(Error::Format(_))));
    }

    #[test]
    fn constrained_key_round_trips_without_k0() {
        let (inst, e) = toy();
        let k0 = inst.keygen(&mut e.stream("k0"));
        let ck = constrain(&inst, &k0, &"01".parse().unwrap(), Side::Right, PadMode::Zeros).unwrap();
        let bytes = encode_constrained(&ck);
        assert_eq!(&bytes[..4], b"KIHC");
        assert_eq!(decode_constrained(&bytes).unwrap(), ck);
        // header + side + mode + x0 + id + one nd×nd matrix, nothing else
        let nd = inst.params().nd();
        assert_eq!(bytes.len(), 12 + 2 + 8 + 2 + 32 + 32 + 8 * nd * nd);
    }

    #[test]
    fn ue_types_cannot_be_confused() {
        let (inst, e) = toy();
        let mut rng = e.stream("ue");
        let key = ue_setup(&inst, &mut rng);
        let (_, tok) = ue_next(&inst, &key, &mut rng).unwrap();
        let m = Message::random(&inst, MsgMode::Raw, &mut rng).unwrap();
        let c = ue_enc(&inst, &key, &m, &"10".parse().unwrap()).unwrap();
        let p = inst.params();
        let (kb, tb, cb) = (encode_epoch_key(&key), encode_token(&tok), encode_ciphertext(&c));
        assert_eq!(decode_epoch_key(&kb, p).unwrap(), key);
        assert_eq!(decode_token(&tb, p).unwrap(), tok);
        assert_eq!(decode_ciphertext(&cb).unwrap(), c);
        assert!(matches!(decode_epoch_key(&tb, p), Err(Error::Format(_))));
        assert!(matches!(decode_token(&kb, p), Err(Error::Format(_))));
        assert!(matches!(decode_ciphertext(&kb), Err(Error::Format(_))));
    }
}
