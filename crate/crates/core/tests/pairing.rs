use fogsec::pairing::{
    setup_pairing, Backend, OpCounter, PairingParams, Session, ELEMENT_BYTES, SCALAR_BYTES,
};
use fogsec::{clpre, homo, lsss, mabe};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn params(backend: Backend) -> PairingParams {
    setup_pairing(backend, b"integration").unwrap()
}

fn bilinear_on(backend: Backend, trials: usize) {
    let p = params(backend);
    let mut s = Session::new(&p);
    let mut rng = ChaCha20Rng::seed_from_u64(17);
    let g = p.generator().clone();
    let base = s.pair(&g, &g).unwrap();
    for _ in 0..trials {
        let a = s.scalars().random(&mut rng);
        let b = s.scalars().random(&mut rng);
        let ga = s.g1_exp(&g, &a).unwrap();
        let gb = s.g1_exp(&g, &b).unwrap();
        let lhs = s.pair(&ga, &gb).unwrap();
        let ab = s.scalars().mul(&a, &b);
        let rhs = s.gt_exp(&base, &ab).unwrap();
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn bilinearity_on_the_curve() {
    bilinear_on(Backend::Curve, 200);
}

#[test]
fn bilinearity_on_the_mock() {
    bilinear_on(Backend::Mock, 200);
}

#[derive(Clone, Debug)]
enum Op {
    Pair,
    PairProduct(usize),
    G1Mul,
    G1Exp,
    GtMul,
    GtDiv,
    GtExp,
    Hash,
    ScalarSub,
    ScalarInv,
}

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        Just(Op::Pair),
        (1usize..6).prop_map(Op::PairProduct),
        Just(Op::G1Mul),
        Just(Op::G1Exp),
        Just(Op::GtMul),
        Just(Op::GtDiv),
        Just(Op::GtExp),
        Just(Op::Hash),
        Just(Op::ScalarSub),
        Just(Op::ScalarInv),
    ]
}

fn expected(op: &Op) -> OpCounter {
    let mut c = OpCounter::default();
    match op {
        Op::Pair => c.pairings = 1,
        Op::PairProduct(k) => c.pairings = *k as u64,
        Op::G1Mul | Op::GtMul => c.multiplications = 1,
        Op::G1Exp | Op::GtExp => c.exponentiations = 1,
        Op::GtDiv | Op::ScalarInv => c.divisions = 1,
        Op::Hash => c.hashes = 1,
        Op::ScalarSub => c.subtractions = 1,
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_operation_bumps_only_its_own_category(ops in proptest::collection::vec(op(), 1..40), seed in any::<u64>()) {
        let p = params(Backend::Mock);
        let mut s = Session::new(&p);
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let g = s.random_g1(&mut rng);
        let h = s.random_g1(&mut rng);
        let x = s.random_gt(&mut rng);
        let k = s.scalars().random_nonzero(&mut rng);
        s.reset();
        let mut total = OpCounter::default();
        for o in &ops {
            let before = s.ops();
            match o {
                Op::Pair => { s.pair(&g, &h).unwrap(); }
                Op::PairProduct(n) => {
                    let terms = vec![(&g, &h); *n];
                    s.pair_product(&terms).unwrap();
                }
                Op::G1Mul => { s.g1_mul(&g, &h).unwrap(); }
                Op::G1Exp => { s.g1_exp(&g, &k).unwrap(); }
                Op::GtMul => { s.gt_mul(&x, &x).unwrap(); }
                Op::GtDiv => { s.gt_div(&x, &x).unwrap(); }
                Op::GtExp => { s.gt_exp(&x, &k).unwrap(); }
                Op::Hash => { s.hash_to_g1(b"packet"); }
                Op::ScalarSub => { s.scalar_sub(&k, &k); }
                Op::ScalarInv => { s.scalar_inv(&k).unwrap(); }
            }
            let after = s.ops();
            let step = expected(o);
            prop_assert_eq!(after, before + step, "{:?}", o);
            total += step;
        }
        prop_assert_eq!(s.ops(), total);
    }
}

#[test]
fn ciphertext_sizes_follow_element_counts() {
    for backend in [Backend::Mock, Backend::Curve] {
        let p = params(backend);
        let mut s = Session::new(&p);
        let mut rng = ChaCha20Rng::seed_from_u64(3);

        let pkg = clpre::pkg_setup(&mut s, &mut rng).unwrap();
        let mut enroll = |id: &[u8], sender: bool| {
            let partial = clpre::extract_partial_key(&mut s, &pkg, id).unwrap();
            clpre::user_keygen(&mut s, &mut rng, &partial, id, &pkg.mpk, sender).unwrap()
        };
        let sender = enroll(b"sender", true);
        let receiver = enroll(b"receiver", false);
        let m = s.random_gt(&mut rng);
        let ct = clpre::encrypt(&mut s, &mut rng, &m, &sender).unwrap();
        let rk = clpre::rekeygen(&mut s, &mut rng, &sender, &receiver.receiver_pub()).unwrap();
        let rct = clpre::reencrypt(&mut s, &ct, &rk).unwrap();
        assert_eq!(ct.to_bytes().len(), 3 * ELEMENT_BYTES);
        assert_eq!(rk.to_bytes().len(), 3 * ELEMENT_BYTES);
        assert_eq!(rct.to_bytes().len(), 4 * ELEMENT_BYTES);

        let kp = homo::keygen(&mut s, &mut rng).unwrap();
        for level in [homo::Level::First, homo::Level::Second] {
            let hct = homo::encrypt(&mut s, &mut rng, &m, &kp.public, level).unwrap();
            assert_eq!(hct.to_bytes().len(), 2 * ELEMENT_BYTES);
        }

        let auth = mabe::authority_setup(&mut s, &mut rng, "aa", &["A", "B", "C"]).unwrap();
        let mut dir = mabe::AttributeDirectory::new();
        dir.register(&auth).unwrap();
        let policy: lsss::Policy = "A AND (B OR C)".parse().unwrap();
        let leaves = policy.leaves();
        let (slots, states) = mabe::intermediate_encrypt(&mut s, &mut rng, &leaves, &dir).unwrap();
        let ct = mabe::full_encrypt(&mut s, &mut rng, &m, &slots, &states, &policy).unwrap();
        let b = ct.byte_breakdown();
        assert_eq!(b.elements, (1 + 3 * leaves.len()) * ELEMENT_BYTES);
        assert_eq!(b.scalars, 2 * leaves.len() * SCALAR_BYTES);
        assert_eq!(ct.to_bytes().len(), b.elements + b.scalars + b.framing);
    }
}
