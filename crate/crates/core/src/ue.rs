//! Updatable encryption with unidirectional updates.
//!
//! The owner holds one [`EpochKey`] `(k_e, N_e)` at a time and encrypts as
//! `C_e = F'_{k_e}(i, N_e) + m`. Rotating to the next epoch produces an
//! [`UpdateToken`] `(k_{e+1} − k_e, N_e ⊕̄ N_{e+1})` that an untrusted host
//! applies with [`ue_upd`] as `C_{e+1} = C_e − F'_{Δk}(i, ΔN)`, and a new
//! key `(2k_e − k_{e+1}, N_{e+1})`.
//!
//! Keys, tokens and ciphertexts carry explicit epoch numbers. A token for
//! epoch `e+1` only applies to a ciphertext of epoch `e`.

use std::fmt;

use rand::RngCore;

use crate::entropy::{uniform_matrix, Entropy};
use crate::error::{Error, Result};
use crate::kihprf::{PrfInstance, Seed};
use crate::modmath::{centered_inf_norm, ModMatrix};
use crate::report::{histogram, map_trials, ratio, Report};
use crate::symbols::{almost_xor, BitString, SymbolString};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpochKey {
    pub epoch: u64,
    pub k: Seed,
    pub nonce: BitString,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpdateToken {
    /// The epoch this token moves ciphertexts into.
    pub epoch: u64,
    pub dk: Seed,
    pub dn: SymbolString,
}

/// How a message is embedded into `Z_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MsgMode {
    /// Added directly, as in the bare scheme.
    Raw,
    /// Entries of `Z_t` scaled by `⌊p/t⌋` and decoded to the nearest multiple.
    Robust { t: u64 },
}

impl MsgMode {
    /// Checks `2 ≤ t ≤ p/4` for robust mode.
    pub fn validate(self, p: u64) -> Result<()> {
        match self {
            MsgMode::Raw => Ok(()),
            MsgMode::Robust { t } if t >= 2 && t.saturating_mul(4) <= p => Ok(()),
            MsgMode::Robust { t } => Err(Error::Precondition(format!(
                "robust mode needs 2 <= t <= p/4, got t={t} with p={p}"
            ))),
        }
    }

    fn message_modulus(self, p: u64) -> u64 {
        match self {
            MsgMode::Raw => p,
            MsgMode::Robust { t } => t,
        }
    }
}

impl fmt::Display for MsgMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MsgMode::Raw => f.write_str("raw"),
            MsgMode::Robust { t } => write!(f, "robust:{t}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Message {
    mode: MsgMode,
    values: ModMatrix,
}

impl Message {
    pub fn raw(values: ModMatrix) -> Self {
        Message { mode: MsgMode::Raw, values }
    }

    /// A message over `Z_t`; `values` must have modulus `t`.
    pub fn robust(values: ModMatrix) -> Self {
        Message {
            mode: MsgMode::Robust { t: values.modulus() },
            values,
        }
    }

    /// Uniform message of the right shape for `inst`.
    pub fn random(inst: &PrfInstance, mode: MsgMode, rng: &mut impl RngCore) -> Result<Self> {
        let p = inst.params().p();
        mode.validate(p)?;
        let nd = inst.params().nd();
        Ok(Message {
            mode,
            values: uniform_matrix(rng, nd, nd, mode.message_modulus(p)),
        })
    }

    pub fn zero(inst: &PrfInstance, mode: MsgMode) -> Result<Self> {
        let p = inst.params().p();
        mode.validate(p)?;
        let nd = inst.params().nd();
        Ok(Message {
            mode,
            values: ModMatrix::zeros(nd, nd, mode.message_modulus(p)),
        })
    }

    pub fn mode(&self) -> MsgMode {
        self.mode
    }

    pub fn values(&self) -> &ModMatrix {
        &self.values
    }

    fn check(&self, inst: &PrfInstance) -> Result<()> {
        let p = inst.params().p();
        self.mode.validate(p)?;
        let nd = inst.params().nd();
        if self.values.rows() != nd || self.values.cols() != nd || self.values.modulus() != self.mode.message_modulus(p) {
            return Err(Error::Structure(format!(
                "message must be {nd}x{nd} mod {}",
                self.mode.message_modulus(p)
            )));
        }
        Ok(())
    }

    /// The embedding into `Z_p`.
    pub fn encode(&self, p: u64) -> ModMatrix {
        match self.mode {
            MsgMode::Raw => self.values.clone(),
            MsgMode::Robust { t } => {
                let step = p / t;
                ModMatrix::new(
                    self.values.rows(),
                    self.values.cols(),
                    p,
                    self.values.entries().iter().map(|&v| v * step).collect(),
                )
                .expect("scaled entries stay below p")
            }
        }
    }
}

/// Nearest multiple of `⌊p/t⌋` (ties upward, `p` wraps to symbol 0) and the
/// distance to it.
pub fn robust_decode_entry(v: u64, p: u64, t: u64) -> (u64, u64) {
    let step = p / t;
    let j = (v / step).min(t - 1);
    let below = v - j * step;
    let upper = if j + 1 < t { (j + 1) * step } else { p };
    let above = upper - v;
    if above <= below {
        ((j + 1) % t, above)
    } else {
        (j, below)
    }
}

fn decode(mode: MsgMode, residue: ModMatrix) -> Result<Message> {
    match mode {
        MsgMode::Raw => Ok(Message::raw(residue)),
        MsgMode::Robust { t } => {
            let p = residue.modulus();
            let step = p / t;
            let mut out = Vec::with_capacity(residue.entries().len());
            for (idx, &v) in residue.entries().iter().enumerate() {
                let (sym, dist) = robust_decode_entry(v, p, t);
                if 2 * dist >= step {
                    return Err(Error::Integrity(format!(
                        "entry {idx} is {dist} away from a codeword, tolerance is below {}/2",
                        step
                    )));
                }
                out.push(sym);
            }
            Ok(Message::robust(ModMatrix::new(residue.rows(), residue.cols(), t, out)?))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ciphertext {
    pub epoch: u64,
    pub data_id: BitString,
    pub body: ModMatrix,
    pub mode: MsgMode,
}

fn check_data_id(inst: &PrfInstance, i: &BitString) -> Result<()> {
    if i.len() != inst.leaves() {
        return Err(Error::length("data id", inst.leaves(), i.len()));
    }
    Ok(())
}

fn check_body(inst: &PrfInstance, c: &Ciphertext) -> Result<()> {
    check_data_id(inst, &c.data_id)?;
    c.mode.validate(inst.params().p())?;
    let nd = inst.params().nd();
    if c.body.rows() != nd || c.body.cols() != nd || c.body.modulus() != inst.params().p() {
        return Err(Error::Structure("ciphertext body has the wrong shape".into()));
    }
    Ok(())
}

fn nonce_symbols(inst: &PrfInstance, key: &EpochKey) -> Result<SymbolString> {
    if key.nonce.len() != inst.leaves() {
        return Err(Error::length("epoch nonce", inst.leaves(), key.nonce.len()));
    }
    Ok(SymbolString::from_bits(&key.nonce))
}

/// Epoch-0 key: a uniform seed, then a uniform nonce.
pub fn ue_setup(inst: &PrfInstance, rng: &mut impl RngCore) -> EpochKey {
    let k = inst.keygen(rng);
    let nonce = BitString::random(inst.leaves(), rng);
    EpochKey { epoch: 0, k, nonce }
}

pub fn ue_enc(inst: &PrfInstance, key: &EpochKey, m: &Message, i: &BitString) -> Result<Ciphertext> {
    check_data_id(inst, i)?;
    m.check(inst)?;
    let pad = inst.prf_eval_prime(&key.k, i, &nonce_symbols(inst, key)?)?;
    Ok(Ciphertext {
        epoch: key.epoch,
        data_id: i.clone(),
        body: pad.add(&m.encode(inst.params().p()))?,
        mode: m.mode(),
    })
}

/// `body − F'_{k_e}(i, N_e)`, decoded per the ciphertext's mode.
pub fn ue_dec(inst: &PrfInstance, key: &EpochKey, c: &Ciphertext) -> Result<Message> {
    if key.epoch != c.epoch {
        return Err(Error::Protocol(format!(
            "key is for epoch {}, ciphertext for epoch {}",
            key.epoch, c.epoch
        )));
    }
    check_body(inst, c)?;
    let pad = inst.prf_eval_prime(&key.k, &c.data_id, &nonce_symbols(inst, key)?)?;
    decode(c.mode, c.body.sub(&pad)?)
}

/// Samples `N_{e+1}`, then `k_{e+1}`, and rotates.
pub fn ue_next(inst: &PrfInstance, key: &EpochKey, rng: &mut impl RngCore) -> Result<(EpochKey, UpdateToken)> {
    let nonce = BitString::random(inst.leaves(), rng);
    let k = inst.keygen(rng);
    ue_next_with(inst, key, &k, &nonce)
}

/// Deterministic rotation to explicitly given `(k_{e+1}, N_{e+1})`.
pub fn ue_next_with(
    inst: &PrfInstance,
    key: &EpochKey,
    k_next: &Seed,
    n_next: &BitString,
) -> Result<(EpochKey, UpdateToken)> {
    if n_next.len() != inst.leaves() {
        return Err(Error::length("epoch nonce", inst.leaves(), n_next.len()));
    }
    nonce_symbols(inst, key)?;
    let epoch = key.epoch + 1;
    let token = UpdateToken {
        epoch,
        dk: k_next.sub(&key.k)?,
        dn: almost_xor(&key.nonce, n_next)?,
    };
    let new_key = EpochKey {
        epoch,
        k: key.k.scale(2).sub(k_next)?,
        nonce: n_next.clone(),
    };
    Ok((new_key, token))
}

/// Host-side update. Sees only the public instance, the token and the
/// ciphertext.
pub fn ue_upd(inst: &PrfInstance, tok: &UpdateToken, c: &Ciphertext) -> Result<Ciphertext> {
    if tok.epoch != c.epoch + 1 {
        return Err(Error::Protocol(format!(
            "token moves into epoch {}, ciphertext is at epoch {}",
            tok.epoch, c.epoch
        )));
    }
    check_body(inst, c)?;
    if tok.dn.len() != inst.leaves() {
        return Err(Error::length("token nonce delta", inst.leaves(), tok.dn.len()));
    }
    let delta = inst.prf_eval_prime(&tok.dk, &c.data_id, &tok.dn)?;
    Ok(Ciphertext {
        epoch: tok.epoch,
        data_id: c.data_id.clone(),
        body: c.body.sub(&delta)?,
        mode: c.mode,
    })
}

/// Longest rotation chain measured by the consistency harness.
pub const MAX_CHAIN: usize = 8;

/// One owner/host chain: a raw message (and a robust one when `p` allows),
/// rotated `MAX_CHAIN` times.
#[derive(Clone, Debug)]
pub struct ConsistencyTrial {
    pub index: u64,
    /// `‖dec_e(C_e) − m‖_∞` after each update, for chain lengths 1..=8.
    pub defects: Vec<u64>,
    /// Whether the robust message still decoded correctly, per chain length.
    pub robust_ok: Vec<Option<bool>>,
}

/// Robust alphabet used by the harness, if the modulus leaves room for one.
pub fn harness_robust_mode(p: u64) -> Option<MsgMode> {
    let mode = MsgMode::Robust { t: 2 };
    mode.validate(p).ok().map(|_| mode)
}

pub fn consistency_trial(inst: &PrfInstance, entropy: &Entropy, index: u64) -> Result<ConsistencyTrial> {
    let mut rng = entropy.trial("ue-consistency", index);
    let mut key = ue_setup(inst, &mut rng);
    let i = BitString::random(inst.leaves(), &mut rng);
    let m = Message::random(inst, MsgMode::Raw, &mut rng)?;
    let mut c = ue_enc(inst, &key, &m, &i)?;
    let mut robust = match harness_robust_mode(inst.params().p()) {
        Some(mode) => {
            let mr = Message::random(inst, mode, &mut rng)?;
            let cr = ue_enc(inst, &key, &mr, &i)?;
            Some((mr, cr))
        }
        None => None,
    };
    let mut defects = Vec::with_capacity(MAX_CHAIN);
    let mut robust_ok = Vec::with_capacity(MAX_CHAIN);
    for _ in 0..MAX_CHAIN {
        let (next, tok) = ue_next(inst, &key, &mut rng)?;
        key = next;
        c = ue_upd(inst, &tok, &c)?;
        let got = ue_dec(inst, &key, &c)?;
        defects.push(centered_inf_norm(&got.values().sub(m.values())?));
        robust_ok.push(match robust.as_mut() {
            Some((mr, cr)) => {
                *cr = ue_upd(inst, &tok, cr)?;
                Some(matches!(ue_dec(inst, &key, cr), Ok(ref d) if d == mr))
            }
            None => None,
        });
    }
    Ok(ConsistencyTrial { index, defects, robust_ok })
}

pub fn consistency_trials(inst: &PrfInstance, entropy: &Entropy, trials: usize, jobs: usize) -> Result<Vec<ConsistencyTrial>> {
    map_trials(jobs, trials, |index| consistency_trial(inst, entropy, index))
}

/// Decryption defect after each number of updates. The scheme's claim is
/// that this is zero; it is reported, not assumed.
pub fn consistency_report(trials: &[ConsistencyTrial]) -> Report {
    let mut r = Report::new();
    r.set("trials", trials.len());
    for len in 1..=MAX_CHAIN {
        let prefix = format!("chain.{len}");
        let values: Vec<u64> = trials.iter().map(|t| t.defects[len - 1]).collect();
        let exact = values.iter().filter(|&&v| v == 0).count();
        r.set(format!("{prefix}.exact_decryptions"), exact);
        r.set(format!("{prefix}.fraction_exact"), ratio(exact, values.len()));
        r.set(
            format!("{prefix}.max_defect"),
            values.iter().max().map_or("none".into(), |v| v.to_string()),
        );
        histogram(&mut r, &format!("{prefix}.hist"), values);
        let robust: Vec<bool> = trials.iter().filter_map(|t| t.robust_ok[len - 1]).collect();
        if robust.is_empty() {
            r.set(format!("{prefix}.robust_decoded"), "unavailable");
        } else {
            let ok = robust.iter().filter(|&&b| b).count();
            r.set(format!("{prefix}.robust_decoded"), ok);
            r.set(format!("{prefix}.fraction_robust_decoded"), ratio(ok, robust.len()));
        }
    }
    r
}

pub fn update_consistency_report(inst: &PrfInstance, entropy: &Entropy, trials: usize, jobs: usize) -> Result<Report> {
    let mut r = consistency_report(&consistency_trials(inst, entropy, trials, jobs)?);
    r.set("instance", inst.id_hex());
    Ok(r)
}

/// One attempt to revert `C_{e+1}` to `C_e` from the public token.
#[derive(Clone, Debug)]
pub struct ReversionTrial {
    pub index: u64,
    /// `C_{e+1} + F'_{Δk}(i, ΔN)` equals `C_e`.
    pub candidate1_reverts: bool,
    /// `C_{e+1} − F'_{Δk}(i, ΔN)` equals `C_e`.
    pub candidate2_reverts: bool,
    pub candidate1_distance: u64,
    pub candidate2_distance: u64,
}

impl ReversionTrial {
    pub fn reverted(&self) -> bool {
        self.candidate1_reverts || self.candidate2_reverts
    }
}

pub fn reversion_trial(inst: &PrfInstance, entropy: &Entropy, index: u64) -> Result<ReversionTrial> {
    let mut rng = entropy.trial("ue-unidirectional", index);
    let key = ue_setup(inst, &mut rng);
    let i = BitString::random(inst.leaves(), &mut rng);
    let m = Message::random(inst, MsgMode::Raw, &mut rng)?;
    let c_e = ue_enc(inst, &key, &m, &i)?;
    let (_, tok) = ue_next(inst, &key, &mut rng)?;
    let c_next = ue_upd(inst, &tok, &c_e)?;
    let delta = inst.prf_eval_prime(&tok.dk, &i, &tok.dn)?;
    let cand1 = c_next.body.add(&delta)?;
    let cand2 = c_next.body.sub(&delta)?;
    Ok(ReversionTrial {
        index,
        candidate1_reverts: cand1 == c_e.body,
        candidate2_reverts: cand2 == c_e.body,
        candidate1_distance: centered_inf_norm(&cand1.sub(&c_e.body)?),
        candidate2_distance: centered_inf_norm(&cand2.sub(&c_e.body)?),
    })
}

pub fn reversion_trials(inst: &PrfInstance, entropy: &Entropy, trials: usize, jobs: usize) -> Result<Vec<ReversionTrial>> {
    map_trials(jobs, trials, |index| reversion_trial(inst, entropy, index))
}

pub fn reversion_report(trials: &[ReversionTrial]) -> Report {
    let mut r = Report::new();
    let c1 = trials.iter().filter(|t| t.candidate1_reverts).count();
    let c2 = trials.iter().filter(|t| t.candidate2_reverts).count();
    let any = trials.iter().filter(|t| t.reverted()).count();
    r.set("trials", trials.len());
    r.set("candidate1.reversions", c1);
    r.set("candidate2.reversions", c2);
    r.set("successful_reversions", any);
    r.set(
        "candidate2.min_distance",
        trials.iter().map(|t| t.candidate2_distance).min().map_or("none".into(), |v| v.to_string()),
    );
    histogram(&mut r, "candidate1.distance_hist", trials.iter().map(|t| t.candidate1_distance));
    histogram(&mut r, "candidate2.distance_hist", trials.iter().map(|t| t.candidate2_distance));
    r
}

/// Tries both token-based reversion candidates against the true previous
/// ciphertext in every trial.
pub fn unidirectionality_experiment(inst: &PrfInstance, entropy: &Entropy, trials: usize, jobs: usize) -> Result<Report> {
    let mut r = reversion_report(&reversion_trials(inst, entropy, trials, jobs)?);
    r.set("instance", inst.id_hex());
    Ok(r)
}
