//! Runs every library invariant at one preset and stops at the first
//! violation.

use rand::Rng;

use crate::codec;
use crate::cprf::{constrain, eval_constrained, PadMode, Side};
use crate::entropy::{uniform_matrix, uniform_residue, Entropy};
use crate::error::{Error, Result};
use crate::gadget::GadgetContext;
use crate::kihprf::{combine, defect_report, defect_trials, unwind, DerivedMatrices, EvalCache, PrfInstance};
use crate::modmath::{centered, ModMatrix};
use crate::params::{Params, Preset};
use crate::report::Report;
use crate::symbols::{almost_xor, BitString, Symbol, SymbolString};
use crate::tree::FullBinaryTree;
use crate::ue::{ue_dec, ue_enc, ue_next, ue_setup, ue_upd, Message, MsgMode};

struct Ctx {
    params: Params,
    entropy: Entropy,
    /// Trial count scaled down for the larger presets.
    trials: usize,
}

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Invariant(what()))
    }
}

type Check = fn(&Ctx) -> Result<()>;

const CHECKS: &[(&str, Check)] = &[
    ("modmath.ring_laws", ring_laws),
    ("modmath.rounding_bound", rounding_bound),
    ("gadget.reconstruction", reconstruction),
    ("gadget.value_linearity", value_linearity),
    ("treealg.shape_parameters", shape_parameters),
    ("symbols.almost_xor", almost_xor_algebra),
    ("kihprf.cache_coherence", cache_coherence),
    ("kihprf.zero_seed", zero_seed),
    ("kihprf.defect_determinism", defect_determinism),
    ("cprf.definitional", cprf_definitional),
    ("ue.protocol", ue_protocol),
    ("codec.round_trip", codec_round_trip),
];

/// Names of the checks in the order they run.
pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|(name, _)| *name).collect()
}

pub fn selftest(preset: Preset, entropy: &Entropy) -> Result<Report> {
    let ctx = Ctx {
        params: Params::preset(preset),
        entropy: entropy.child("selftest"),
        trials: match preset {
            Preset::Toy => 50,
            Preset::Desk => 10,
            Preset::Large => 1,
        },
    };
    let mut r = Report::new();
    r.set("preset", preset.name());
    for (name, check) in CHECKS {
        check(&ctx).map_err(|e| match e {
            Error::Invariant(msg) => Error::Invariant(format!("{name}: {msg}")),
            other => other,
        })?;
        r.set(format!("check.{name}"), "pass");
    }
    r.set("checks", CHECKS.len());
    Ok(r)
}

fn instance(ctx: &Ctx, tree: &str, label: &str) -> Result<PrfInstance> {
    PrfInstance::sample(&ctx.params.with_tree(tree)?, &mut ctx.entropy.stream(label))
}

fn ring_laws(ctx: &Ctx) -> Result<()> {
    let mut rng = ctx.entropy.stream("ring");
    let q = ctx.params.q();
    let n = ctx.params.n();
    for _ in 0..ctx.trials {
        let a = uniform_matrix(&mut rng, n, n + 1, q);
        let b = uniform_matrix(&mut rng, n, n + 1, q);
        let c = uniform_matrix(&mut rng, n + 1, 2, q);
        ensure(a.add(&b)?.sub(&b)? == a, || "(a+b)-b != a".into())?;
        ensure(a.add(&b)? == b.add(&a)?, || "addition not commutative".into())?;
        let lhs = a.add(&b)?.mul(&c)?;
        let rhs = a.mul(&c)?.add(&b.mul(&c)?)?;
        ensure(lhs == rhs, || "multiplication does not distribute".into())?;
        ensure(a.add(&a.neg())?.is_zero(), || "a + (-a) != 0".into())?;
    }
    Ok(())
}

fn rounding_bound(ctx: &Ctx) -> Result<()> {
    let (q, p) = (ctx.params.q(), ctx.params.p());
    let bound = (q / (2 * p)) as i128;
    let check = |x: u64| {
        let back = ctx.params.round(x) * (q / p);
        let err = centered((x + q - back % q) % q, q).abs();
        ensure(err <= bound, || format!("round error {err} > {bound} at x={x}"))
    };
    if q <= 1 << 16 {
        (0..q).try_for_each(check)
    } else {
        let mut rng = ctx.entropy.stream("round");
        (0..100_000).try_for_each(|_| check(uniform_residue(&mut rng, q)))
    }
}

fn reconstruction(ctx: &Ctx) -> Result<()> {
    let g = GadgetContext::new(&ctx.params);
    let q = ctx.params.q();
    let check = |a: u64| {
        let v = g.bit_decompose(a);
        ensure(g.inner(&v) % q as u128 == a as u128, || format!("<g, g^-1({a})> != {a}"))
    };
    if q <= 1 << 16 {
        (0..q).try_for_each(check)?;
    } else {
        let mut rng = ctx.entropy.stream("recon/scalars");
        (0..100_000).try_for_each(|_| check(uniform_residue(&mut rng, q)))?;
    }
    let mut rng = ctx.entropy.stream("recon/matrices");
    for _ in 0..ctx.trials {
        let a = uniform_matrix(&mut rng, ctx.params.n(), ctx.params.nd(), q);
        ensure(g.reconstruct(&g.mat_decompose(&a)?)? == a, || "G*G^-1(A) != A".into())?;
    }
    Ok(())
}

fn value_linearity(ctx: &Ctx) -> Result<()> {
    let g = GadgetContext::new(&ctx.params);
    let q = ctx.params.q();
    let limit = 1u128 << (ctx.params.l() + 1);
    let check = |a: u64, b: u64| {
        let sum: Vec<u32> = g
            .bit_decompose(a)
            .iter()
            .zip(g.bit_decompose(b))
            .map(|(x, y)| x + y)
            .collect();
        let v = g.inner(&sum);
        ensure(v < limit && v % q as u128 == ((a as u128 + b as u128) % q as u128), || {
            format!("value-linearity fails at ({a}, {b})")
        })
    };
    let mut rng = ctx.entropy.stream("linearity");
    for _ in 0..10_000 {
        check(uniform_residue(&mut rng, q), uniform_residue(&mut rng, q))?;
    }
    check(q - 1, q - 1)
}

fn shape_parameters(_: &Ctx) -> Result<()> {
    for desc in ["balanced:1", "balanced:8", "leftspine:5", "rightspine:5", "((.,.),(.,(.,.)))"] {
        let t = FullBinaryTree::parse(desc)?;
        let p = unwind::profile(&t);
        ensure(t.leaf_count() == t.internal_count() + 1, || format!("{desc}: leaves != internal + 1"))?;
        ensure(p.max_summands == t.expansion() + 1, || format!("{desc}: summands != e(T)+1"))?;
        ensure(p.max_added_decompositions == t.expansion(), || format!("{desc}: added G^-1 != e(T)"))?;
        ensure(p.max_nesting == t.sequentiality(), || format!("{desc}: nesting != s(T)"))?;
        ensure(p.decompositions == t.internal_count(), || format!("{desc}: G^-1 count"))?;
    }
    Ok(())
}

fn almost_xor_algebra(_: &Ctx) -> Result<()> {
    ensure(Symbol::almost_xor(true, true) == Symbol::Zero, || "1 xor 1".into())?;
    ensure(Symbol::almost_xor(false, true) == Symbol::One, || "0 xor 1".into())?;
    ensure(Symbol::almost_xor(true, false) == Symbol::One, || "1 xor 0".into())?;
    ensure(Symbol::almost_xor(false, false) == Symbol::ZeroBar, || "0 xor 0".into())?;
    for a in 0..16 {
        for b in 0..16 {
            let s = almost_xor(&BitString::from_u64(a, 4), &BitString::from_u64(b, 4))?;
            ensure((4..=8).contains(&s.bit_length()), || format!("bit length law at ({a}, {b})"))?;
        }
    }
    Ok(())
}

fn cache_coherence(ctx: &Ctx) -> Result<()> {
    for tree in ["balanced:2", "balanced:4", "leftspine:3", "rightspine:3"] {
        let inst = instance(ctx, tree, &format!("coherence/{tree}"))?;
        let t = inst.leaves();
        let depths = inst.tree().leaf_depths();
        let mut rng = ctx.entropy.stream(&format!("coherence/{tree}/trials"));
        let mut cache = EvalCache::new();
        for _ in 0..ctx.trials {
            let seed = inst.keygen(&mut rng);
            let y = BitString::random(2 * t, &mut rng);
            let pos = rng.gen_range(0..2 * t);
            let fresh = inst.prf_eval(&seed, &y)?;
            ensure(inst.prf_eval_cached(&seed, &y, &mut cache)? == fresh, || format!("{tree}: memo != fresh"))?;
            let flipped = y.flipped(pos);
            let inc = inst.eval_incremental(&seed, &flipped, pos, &mut cache)?;
            ensure(inc == inst.prf_eval(&seed, &flipped)?, || format!("{tree}: incremental != fresh"))?;
            ensure(cache.stats().last_recomputed == depths[pos % t], || {
                format!("{tree}: recomputed {} nodes for a leaf of depth {}", cache.stats().last_recomputed, depths[pos % t])
            })?;
        }
    }
    Ok(())
}

fn zero_seed(ctx: &Ctx) -> Result<()> {
    let inst = instance(ctx, "balanced:2", "zero")?;
    let zero = inst.zero_seed();
    let d = DerivedMatrices::new(&inst, &zero)?;
    let mut rng = ctx.entropy.stream("zero/inputs");
    for _ in 0..ctx.trials.min(16) {
        let x = BitString::random(2, &mut rng);
        let mut c = EvalCache::disabled();
        ensure(inst.eval_b(&d, &x, &mut c)? == inst.eval_a(&x, &mut c)?, || "B with zero seed != A".into())?;
    }
    Ok(())
}

fn defect_determinism(ctx: &Ctx) -> Result<()> {
    let inst = instance(ctx, "balanced:2", "defect")?;
    let e = ctx.entropy.child("defect/trials");
    let serial = defect_report(&defect_trials(&inst, &e, ctx.trials, 1)?);
    let parallel = defect_report(&defect_trials(&inst, &e, ctx.trials, 2)?);
    ensure(serial == parallel, || "defect report depends on thread count".into())
}

fn cprf_definitional(ctx: &Ctx) -> Result<()> {
    let inst = instance(ctx, "balanced:2", "cprf")?;
    let mut rng = ctx.entropy.stream("cprf/trials");
    for _ in 0..ctx.trials.min(20) {
        let k0 = inst.keygen(&mut rng);
        let k1 = inst.keygen(&mut rng);
        let x0 = BitString::random(2, &mut rng);
        let target = SymbolString::from_bits(&BitString::random(2, &mut rng));
        let ck = constrain(&inst, &k0, &x0, Side::Left, PadMode::Ones)?;
        let partner = x0.concat(&target.to_bits().unwrap().xor(&BitString::ones(2))?);
        let expected = combine(&inst.prf_eval(&k1, &partner)?, &ck.value)?;
        ensure(eval_constrained(&ck, &inst, &k1, &target)? == expected, || "constrained eval != combine".into())?;
    }
    for v in 0..4 {
        let x = BitString::from_u64(v, 2);
        ensure(PadMode::Ones.preimage(&PadMode::Ones.image(&x))? == x, || "ones mapping not a bijection".into())?;
    }
    Ok(())
}

fn ue_protocol(ctx: &Ctx) -> Result<()> {
    let inst = instance(ctx, "balanced:2", "ue")?;
    let mut rng = ctx.entropy.stream("ue/trials");
    let mut key = ue_setup(&inst, &mut rng);
    let i = BitString::random(2, &mut rng);
    for _ in 0..ctx.trials.min(20) {
        let m = Message::random(&inst, MsgMode::Raw, &mut rng)?;
        let c = ue_enc(&inst, &key, &m, &i)?;
        ensure(ue_dec(&inst, &key, &c)? == m, || format!("round trip fails at epoch {}", key.epoch))?;
        let (next, tok) = ue_next(&inst, &key, &mut rng)?;
        ensure(next.k.add(&tok.dk)? == key.k, || "new k + dk != old k".into())?;
        let updated = ue_upd(&inst, &tok, &c)?;
        let delta = inst.prf_eval_prime(&tok.dk, &i, &tok.dn)?;
        ensure(updated.body == c.body.sub(&delta)?, || "upd is not body - F'".into())?;
        ensure(matches!(ue_upd(&inst, &tok, &updated), Err(Error::Protocol(_))), || "token reused".into())?;
        key = next;
    }
    Ok(())
}

fn codec_round_trip(ctx: &Ctx) -> Result<()> {
    let inst = instance(ctx, "balanced:2", "codec")?;
    let mut rng = ctx.entropy.stream("codec/values");
    let seed = inst.keygen(&mut rng);
    ensure(codec::decode_instance(&codec::encode_instance(&inst))?.id() == inst.id(), || "instance".into())?;
    ensure(
        codec::decode_seed(&codec::encode_seed(inst.params(), &seed), inst.params())? == seed,
        || "seed".into(),
    )?;
    let m = ModMatrix::new(1, 3, 7, vec![0, 3, 6])?;
    ensure(codec::decode_matrix(&codec::encode_matrix(&m))? == m, || "matrix".into())
}
