use super::*;
use crate::entropy::Entropy;
use crate::error::Error;
use crate::params::{Params, Preset};
use crate::symbols::{BitString, Symbol, SymbolString};

fn bits(s: &str) -> BitString {
    s.parse().unwrap()
}

fn syms(s: &str) -> SymbolString {
    s.parse().unwrap()
}

fn toy(tree: &str) -> (PrfInstance, Entropy) {
    let e = Entropy::from_hex("7e57").unwrap();
    let params = Params::preset(Preset::Toy).with_tree(tree).unwrap();
    let inst = PrfInstance::sample(&params, &mut e.stream("instance")).unwrap();
    (inst, e)
}

#[test]
fn sampling_rejects_bad_params_and_differs_by_stream() {
    assert!(Params::new(0, 16, 4, "balanced:2", b"").is_err());
    let p = Params::preset(Preset::Toy);
    let a = PrfInstance::sample(&p, &mut Entropy::from_hex("01").unwrap().stream("i")).unwrap();
    let b = PrfInstance::sample(&p, &mut Entropy::from_hex("02").unwrap().stream("i")).unwrap();
    assert_ne!(a.a0(), b.a0());
    assert_ne!(a.a0(), a.a1());
    let err = PrfInstance::from_parts(p.clone(), a.a0().clone(), a.a0().clone());
    assert!(matches!(err, Err(Error::Invariant(_))));
}

#[test]
fn derived_matrices_are_consistent() {
    let (inst, e) = toy("balanced:2");
    let s = inst.keygen(&mut e.stream("seed"));
    let d = DerivedMatrices::new(&inst, &s).unwrap();
    let m = s.matrix();
    assert_eq!(&d.b0.sub(inst.a0()).unwrap(), m);
    assert_eq!(&d.b1.sub(inst.a1()).unwrap(), m);
    assert_eq!(d.c1, inst.a0().add(inst.a1()).unwrap().add(m).unwrap());
    assert_eq!(d.cbar0, inst.a0().scale(2).add(m).unwrap());
    assert_eq!(d.c0, inst.a1().scale(2).add(m).unwrap());
}

#[test]
fn leaf_cases() {
    let (inst, e) = toy("leftspine:1");
    let s = inst.keygen(&mut e.stream("seed"));
    let d = DerivedMatrices::new(&inst, &s).unwrap();
    let mut c = EvalCache::new();
    assert_eq!(&inst.eval_a(&bits("0"), &mut c).unwrap(), inst.a0());
    assert_eq!(&inst.eval_a(&bits("1"), &mut c).unwrap(), inst.a1());
    assert_eq!(inst.eval_b(&d, &bits("0"), &mut c).unwrap(), inst.a0().add(s.matrix()).unwrap());
    assert_eq!(inst.eval_c(&d, &syms("1"), &mut c).unwrap(), d.c1);
    assert_eq!(inst.eval_c(&d, &syms("Z"), &mut c).unwrap(), d.cbar0);
    assert_eq!(inst.eval_c(&d, &syms("0"), &mut c).unwrap(), d.c0);
}

#[test]
fn balanced_two_a_matches_hand_expansion() {
    let (inst, _) = toy("balanced:2");
    let hand = inst
        .gadget()
        .mul_inverse(inst.a1(), inst.a0())
        .unwrap()
        .add(inst.a1())
        .unwrap();
    assert_eq!(inst.eval_a(&bits("10"), &mut EvalCache::new()).unwrap(), hand);
}

#[test]
fn zero_seed_collapses_b_onto_a() {
    for tree in ["leftspine:1", "balanced:2"] {
        let (inst, _) = toy(tree);
        let zero = inst.zero_seed();
        let d = DerivedMatrices::new(&inst, &zero).unwrap();
        let t = inst.leaves();
        for v in 0..(1u64 << t) {
            let x = BitString::from_u64(v, t);
            let mut c = EvalCache::disabled();
            assert_eq!(inst.eval_b(&d, &x, &mut c).unwrap(), inst.eval_a(&x, &mut c).unwrap());
        }
    }
}

#[test]
fn length_mismatches_are_rejected() {
    let (inst, e) = toy("balanced:2");
    let s = inst.keygen(&mut e.stream("seed"));
    let d = DerivedMatrices::new(&inst, &s).unwrap();
    let mut c = EvalCache::new();
    assert!(matches!(inst.eval_a(&bits("101"), &mut c), Err(Error::Length { .. })));
    assert!(matches!(inst.eval_c(&d, &syms("1"), &mut c), Err(Error::Length { .. })));
    assert!(matches!(inst.prf_eval(&s, &bits("101")), Err(Error::Length { .. })));
    assert!(matches!(
        inst.prf_eval_prime(&s, &bits("1"), &syms("1Z")),
        Err(Error::Length { .. })
    ));
    assert!(matches!(inst.prg_r(&bits("1")), Err(Error::Length { .. })));
}

#[test]
fn prf_is_deterministic_and_shaped() {
    let (inst, e) = toy("balanced:4");
    let s = inst.keygen(&mut e.stream("seed"));
    let y = bits("10010110");
    let a = inst.prf_eval(&s, &y).unwrap();
    assert_eq!(a, inst.prf_eval(&s, &y).unwrap());
    let nd = inst.params().nd();
    assert_eq!((a.rows(), a.cols(), a.modulus()), (nd, nd, 4));
    let z = inst.prf_eval_prime(&s, &bits("1001"), &syms("1Z0Z")).unwrap();
    assert_eq!(z, inst.prf_eval_prime(&s, &bits("1001"), &syms("1Z0Z")).unwrap());
}

#[test]
fn prg_is_deterministic_and_input_sensitive() {
    let params = Params::preset(Preset::Desk);
    let inst = PrfInstance::sample(&params, &mut Entropy::from_hex("03").unwrap().stream("i")).unwrap();
    let x = bits("10110010");
    let r = inst.prg_r(&x).unwrap();
    assert_eq!((r.rows(), r.cols()), (params.nd(), params.n()));
    assert_eq!(r, inst.prg_r(&x).unwrap());
    for i in 0..8 {
        assert_ne!(r, inst.prg_r(&x.flipped(i)).unwrap());
    }
    let other = inst.with_tree("balanced:8").unwrap();
    assert_eq!(other.prg_r(&x).unwrap(), r);
}

#[test]
fn f_prime_uses_its_own_leaf_matrices() {
    let (inst, e) = toy("balanced:2");
    let s = inst.keygen(&mut e.stream("seed"));
    let d = DerivedMatrices::new(&inst, &s).unwrap();
    assert_ne!(d.c1, d.b1);
    assert_ne!(d.c0, d.b0);
    let all_zero_bar = inst.prf_eval_prime(&s, &bits("10"), &syms("ZZ")).unwrap();
    let all_zero = inst.prf_eval_prime(&s, &bits("10"), &syms("00")).unwrap();
    assert_ne!(all_zero_bar, all_zero);
}

#[test]
fn memoized_and_fresh_agree() {
    let (inst, e) = toy("balanced:4");
    let mut cache = EvalCache::new();
    let mut rng = e.stream("trials");
    for _ in 0..64 {
        let s = inst.keygen(&mut rng);
        let y = BitString::random(8, &mut rng);
        let fresh = inst.prf_eval(&s, &y).unwrap();
        assert_eq!(inst.prf_eval_cached(&s, &y, &mut cache).unwrap(), fresh);
        assert_eq!(inst.prf_eval_cached(&s, &y, &mut cache).unwrap(), fresh);
    }
    assert!(cache.stats().hits > 0);
}

#[test]
fn incremental_follows_single_flips() {
    let (inst, e) = toy("((.,.),(.,(.,.)))");
    let s = inst.keygen(&mut e.stream("seed"));
    let y = BitString::random(10, &mut e.stream("y"));
    let depths = inst.tree().leaf_depths();
    let mut cache = EvalCache::new();
    inst.prf_eval_cached(&s, &y, &mut cache).unwrap();
    let mut cur = y.clone();
    for i in 0..10 {
        cur = cur.flipped(i);
        let inc = inst.eval_incremental(&s, &cur, i, &mut cache).unwrap();
        assert_eq!(inc, inst.prf_eval(&s, &cur).unwrap());
        assert_eq!(cache.stats().last_recomputed, depths[i % 5]);
    }
    // flip everything back one at a time
    for i in (0..10).rev() {
        cur = cur.flipped(i);
        inst.eval_incremental(&s, &cur, i, &mut cache).unwrap();
    }
    assert_eq!(cur, y);
    assert_eq!(inst.eval_incremental(&s, &y.flipped(0), 0, &mut cache).unwrap(), inst.prf_eval(&s, &y.flipped(0)).unwrap());
}

#[test]
fn incremental_rejects_stale_caches() {
    let (inst, e) = toy("balanced:2");
    let s = inst.keygen(&mut e.stream("seed"));
    let s2 = inst.keygen(&mut e.stream("seed2"));
    let y = bits("0110");
    let mut cache = EvalCache::new();
    assert!(matches!(inst.eval_incremental(&s, &y, 0, &mut cache), Err(Error::StaleCache(_))));
    inst.prf_eval_cached(&s, &y, &mut cache).unwrap();
    // two positions differ
    assert!(matches!(
        inst.eval_incremental(&s, &bits("1010"), 0, &mut cache),
        Err(Error::StaleCache(_))
    ));
    // wrong index named
    assert!(matches!(
        inst.eval_incremental(&s, &y.flipped(1), 2, &mut cache),
        Err(Error::StaleCache(_))
    ));
    // other seed
    assert!(matches!(
        inst.eval_incremental(&s2, &y.flipped(1), 1, &mut cache),
        Err(Error::StaleCache(_))
    ));
    assert!(matches!(
        inst.eval_incremental(&s, &y.flipped(1), 9, &mut cache),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn defect_requires_equal_left_halves_and_is_symmetric() {
    let (inst, e) = toy("balanced:2");
    let s1 = inst.keygen(&mut e.stream("s1"));
    let s2 = inst.keygen(&mut e.stream("s2"));
    assert!(matches!(
        homomorphism_defect(&inst, &s1, &s2, &bits("1001"), &bits("0101")),
        Err(Error::Precondition(_))
    ));
    let x = bits("1001");
    let y = bits("1011");
    assert_eq!(
        homomorphism_defect(&inst, &s1, &s2, &x, &y).unwrap(),
        homomorphism_defect(&inst, &s2, &s1, &y, &x).unwrap()
    );
}

#[test]
fn almost_xor_symbols_feed_f_prime() {
    let x = bits("1001");
    let y = bits("1011");
    assert_eq!(combined_symbols(&x, &y).unwrap().symbols(), &[Symbol::One, Symbol::Zero]);
    assert!(!selectors_agree(&x, &y));
    assert!(selectors_agree(&bits("1000"), &bits("1001")));
    assert!(!selectors_agree(&bits("0010"), &bits("0000")));
}

#[test]
fn harness_is_deterministic_across_thread_counts() {
    let (inst, e) = toy("balanced:2");
    let a = defect_trials(&inst, &e, 40, 1).unwrap();
    let b = defect_trials(&inst, &e, 40, 3).unwrap();
    let da: Vec<_> = a.iter().map(|t| t.defect).collect();
    let db: Vec<_> = b.iter().map(|t| t.defect).collect();
    assert_eq!(da, db);
    assert_eq!(defect_report(&a), defect_report(&b));
    for t in &a {
        assert_eq!(t.x.halves().0, t.y.halves().0);
    }
}
