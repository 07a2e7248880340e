//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so each line is printed even when everything passes.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use fogsec::aggsign::{
    aggregate, frame_wire_size, sign, verify_aggregate, verify_each, FrameMode, SignKeyPair,
    SignedFrame, DEFAULT_SIGNATURE_BYTES,
};
use fogsec::bench::{measure_suite, run_bench, BenchConfig, Point, Suite};
use fogsec::clpre::{self, UploadMessage};
use fogsec::costmodel::{self, eval_formula, RowStatus, Table};
use fogsec::fogsim::{run_builtin, BUILTIN_SCENARIOS};
use fogsec::homo::{self, Level};
use fogsec::lsss::{compile, reconstruct, Policy};
use fogsec::mabe::{
    authority_setup, encrypt_direct, full_decrypt, full_encrypt_with, intermediate_encrypt,
    keygen_user, partial_decrypt, transform_key, AttributeDirectory, AuthorityKeys, MabeError,
    OnlineRandomness, UserAttrKey,
};
use fogsec::pairing::{setup_pairing, Backend, G1Element, OpCounter, PairingParams, Session};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn params(backend: Backend) -> PairingParams {
    setup_pairing(backend, b"acceptance").expect("pairing setup")
}

fn ops(p: u64, e: u64, m: u64, h: u64, d: u64, s: u64) -> OpCounter {
    OpCounter {
        pairings: p,
        exponentiations: e,
        multiplications: m,
        hashes: h,
        divisions: d,
        subtractions: s,
    }
}

fn random_bytes(rng: &mut impl RngCore, len: usize) -> Vec<u8> {
    let mut b = vec![0u8; len];
    rng.fill_bytes(&mut b);
    b
}

fn random_frame(rng: &mut impl Rng, max_n: usize, max_len: usize) -> Vec<Vec<u8>> {
    let n = rng.gen_range(1..=max_n);
    (0..n)
        .map(|_| {
            let len = rng.gen_range(1..=max_len);
            random_bytes(rng, len)
        })
        .collect()
}

/// True when the bytes fail to decode or the decoded frame fails to verify.
fn rejected(sess: &mut Session, wire: &[u8], pk: &G1Element) -> bool {
    let params = sess.params().clone();
    match SignedFrame::decode(&params, wire, FrameMode::Aggregate, DEFAULT_SIGNATURE_BYTES) {
        Err(_) => true,
        Ok(frame) => !frame.verify(sess, pk),
    }
}

fn flip(wire: &[u8], bit: usize) -> Vec<u8> {
    let mut out = wire.to_vec();
    out[bit / 8] ^= 1 << (bit % 8);
    out
}

/// Seals, encodes and decodes a frame, then checks that it verifies and
/// that every listed bit flip is rejected. Returns the number of flips.
fn frame_round(
    sess: &mut Session,
    keys: &SignKeyPair,
    packets: Vec<Vec<u8>>,
    bits: impl FnOnce(&[u8]) -> Vec<usize>,
) -> Result<usize, String> {
    let frame = SignedFrame::seal(sess, packets, &keys.sk, FrameMode::Aggregate, DEFAULT_SIGNATURE_BYTES)
        .map_err(|e| e.to_string())?;
    let wire = frame.encode();
    ensure(!rejected(sess, &wire, &keys.pk), || {
        format!("honest frame of {} packets rejected", frame.packets.len())
    })?;
    let bits = bits(&wire);
    for bit in &bits {
        ensure(rejected(sess, &flip(&wire, *bit), &keys.pk), || {
            format!("flip of bit {bit} in a {}-byte frame accepted", wire.len())
        })?;
    }
    Ok(bits.len())
}

fn criterion_1() -> Check {
    let shapes: Vec<Vec<Vec<u8>>> = {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        (0..100).map(|_| random_frame(&mut rng, 64, 24)).collect()
    };

    let start = Instant::now();
    let curve = params(Backend::Curve);
    let mut sess = Session::new(&curve);
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let keys = SignKeyPair::generate(&mut sess, &mut rng).map_err(|e| e.to_string())?;
    let mut curve_flips = 0;
    for packets in &shapes {
        let payload_end = 4 + packets.iter().map(|p| 4 + p.len()).sum::<usize>();
        curve_flips += frame_round(&mut sess, &keys, packets.clone(), |wire| {
            let total = wire.len() * 8;
            let payload_byte = {
                let mut at = 4;
                let which = rng.gen_range(0..packets.len());
                for p in &packets[..which] {
                    at += 4 + p.len();
                }
                at + 4 + rng.gen_range(0..packets[which].len())
            };
            vec![
                payload_byte * 8 + rng.gen_range(0..8),
                rng.gen_range(payload_end * 8..total),
                rng.gen_range(0..total),
            ]
        })?;
    }
    let mut exhaustive_curve = 0;
    for n in [1, 1, 2] {
        let packets: Vec<Vec<u8>> = (0..n).map(|_| random_bytes(&mut rng, 3)).collect();
        exhaustive_curve += frame_round(&mut sess, &keys, packets, |wire| (0..wire.len() * 8).collect())?;
    }
    let curve_time = start.elapsed();
    ensure(curve_time < Duration::from_secs(120), || {
        format!("curve suite took {curve_time:?}")
    })?;

    let mock = params(Backend::Mock);
    let mut sess = Session::new(&mock);
    let keys = SignKeyPair::generate(&mut sess, &mut rng).map_err(|e| e.to_string())?;
    let mut mock_flips = 0;
    for packets in &shapes {
        mock_flips += frame_round(&mut sess, &keys, packets.clone(), |wire| (0..wire.len() * 8).collect())?;
    }
    let max_n = shapes.iter().map(Vec::len).max().unwrap_or(0);
    Ok(format!(
        "100 frames (n up to {max_n}) verify on curve and mock; curve: {curve_flips} sampled + \
         {exhaustive_curve} exhaustive flips rejected in {:.1}s; mock: all {mock_flips} flips rejected",
        curve_time.as_secs_f64()
    ))
}

fn criterion_2() -> Check {
    let curve = params(Backend::Curve);
    let mut sess = Session::new(&curve);
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let keys = SignKeyPair::generate(&mut sess, &mut rng).map_err(|e| e.to_string())?;
    for n in 1..=10u64 {
        let packets: Vec<Vec<u8>> = (0..n).map(|_| random_bytes(&mut rng, 100)).collect();
        let sigs: Vec<_> = packets
            .iter()
            .map(|p| sign(&mut sess, p, &keys.sk).map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
        let agg = aggregate(&mut sess, &sigs).map_err(|e| e.to_string())?;
        let (ok_agg, agg_ops) = sess.measure(|s| verify_aggregate(s, &packets, &agg, &keys.pk));
        let (ok_each, each_ops) = sess.measure(|s| verify_each(s, &packets, &sigs, &keys.pk));
        ensure(ok_agg && ok_each, || format!("n={n}: honest signatures rejected"))?;
        ensure(agg_ops == ops(n + 1, 0, 0, n, 0, 0), || format!("n={n}: aggregate verify cost {agg_ops}"))?;
        ensure(each_ops == ops(2 * n, 0, 0, n, 0, 0), || format!("n={n}: per-packet verify cost {each_ops}"))?;
        let p = costmodel::params(&[("n", n)]);
        for (task, measured) in [("verify-aggregate", agg_ops), ("bls-verify", each_ops)] {
            let table = eval_formula(Table::II, task, &p).map_err(|e| e.to_string())?;
            ensure(table.counts == measured, || format!("n={n}: {task} table {} vs {measured}", table.counts))?;
        }
    }
    Ok("verify_aggregate = nT_H+(n+1)T_P and n x verify_single = nT_H+2nT_P for n = 1..10".into())
}

fn criterion_3() -> Check {
    let mock = params(Backend::Mock);
    let mut sess = Session::new(&mock);
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let keys = SignKeyPair::generate(&mut sess, &mut rng).map_err(|e| e.to_string())?;
    for n in 1..=10usize {
        for m in [1usize, 20, 100] {
            let agg = frame_wire_size(n, m, FrameMode::Aggregate).map_err(|e| e.to_string())?;
            let bls = frame_wire_size(n, m, FrameMode::Bls).map_err(|e| e.to_string())?;
            ensure(agg == n * m + 96 && bls == n * m + 96 * n, || {
                format!("n={n} m={m}: sizes {agg} / {bls}")
            })?;
            let packets: Vec<Vec<u8>> = (0..n).map(|_| random_bytes(&mut rng, m)).collect();
            for (mode, want) in [(FrameMode::Aggregate, agg), (FrameMode::Bls, bls)] {
                let frame = SignedFrame::seal(&mut sess, packets.clone(), &keys.sk, mode, DEFAULT_SIGNATURE_BYTES)
                    .map_err(|e| e.to_string())?;
                let b = frame.byte_breakdown();
                ensure(b.accounted() == want && frame.encode().len() == b.total(), || {
                    format!("n={n} m={m} {mode:?}: encoded {:?}", b)
                })?;
            }
        }
    }
    let seven = (
        frame_wire_size(7, 100, FrameMode::Aggregate).map_err(|e| e.to_string())?,
        frame_wire_size(7, 100, FrameMode::Bls).map_err(|e| e.to_string())?,
    );
    ensure(seven == (796, 1372), || format!("n=7 sizes {seven:?}"))?;
    let report = run_builtin("secure-data-aggregation", None).map_err(|e| e.to_string())?;
    let ledger = (
        report.ledger.link_total("press-1", "fog-1"),
        report.ledger.link_total("press-2", "fog-1"),
    );
    ensure(ledger == (796, 1372), || format!("ledger {ledger:?}"))?;
    Ok(format!(
        "n|m|+96 vs n|m|+96n for n = 1..10; n=7, |m|=100: {} vs {} bytes, ledger {} vs {}",
        seven.0, seven.1, ledger.0, ledger.1
    ))
}

fn criterion_4() -> Check {
    let cfg = BenchConfig {
        ns: (2..=10).collect(),
        repeat: 10,
        ..BenchConfig::new(Suite::Agg)
    };
    let report = run_bench(&cfg).map_err(|e| e.to_string())?;
    let mean = |task: &str, n: usize| {
        report
            .row(task, n)
            .map(|r| r.mean_ms)
            .ok_or_else(|| format!("no {task} row for n={n}"))
    };
    let mut margins = Vec::new();
    for n in 2..=10 {
        let (agg_v, bls_v) = (mean("verify-aggregate", n)?, mean("bls-verify", n)?);
        let (sign_agg, sign) = (mean("sign-aggregate", n)?, mean("bls-sign", n)?);
        ensure(agg_v < bls_v, || format!("n={n}: aggregate verify {agg_v:.3} ms vs per-packet {bls_v:.3} ms"))?;
        ensure(sign_agg >= sign, || format!("n={n}: sign+aggregate {sign_agg:.3} ms vs sign {sign:.3} ms"))?;
        margins.push(bls_v - agg_v);
    }
    Ok(format!(
        "aggregate verify faster for n = 2..10 (saves {:.2}..{:.2} ms); sign+aggregate >= sign; 10 repetitions",
        margins.iter().cloned().fold(f64::INFINITY, f64::min),
        margins.iter().cloned().fold(0.0, f64::max)
    ))
}

fn criterion_5() -> Check {
    for backend in [Backend::Curve, Backend::Mock] {
        let p = params(backend);
        let mut sess = Session::new(&p);
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let pkg = clpre::pkg_setup(&mut sess, &mut rng).map_err(|e| e.to_string())?;
        for trial in 0..100 {
            let sid = random_bytes(&mut rng, 12);
            let rid = random_bytes(&mut rng, 12);
            let enroll = |id: &[u8], sender: bool, sess: &mut Session, rng: &mut ChaCha20Rng| {
                let partial = clpre::extract_partial_key(sess, &pkg, id).map_err(|e| e.to_string())?;
                clpre::user_keygen(sess, rng, &partial, id, &pkg.mpk, sender).map_err(|e| e.to_string())
            };
            let s_keys = enroll(&sid, true, &mut sess, &mut rng)?;
            let r_keys = enroll(&rid, false, &mut sess, &mut rng)?;
            let m = sess.random_gt(&mut rng);
            let ct = clpre::encrypt(&mut sess, &mut rng, &m, &s_keys).map_err(|e| e.to_string())?;
            let rk = clpre::rekeygen(&mut sess, &mut rng, &s_keys, &r_keys.receiver_pub())
                .map_err(|e| e.to_string())?;
            let upload = UploadMessage { ct: ct.clone(), rk: rk.clone() };
            ensure(upload.to_bytes().len() == 768, || format!("upload is {} bytes", upload.to_bytes().len()))?;
            let (rct, cost) = sess.measure(|s| clpre::reencrypt(s, &ct, &rk));
            let rct = rct.map_err(|e| e.to_string())?;
            ensure(cost == ops(1, 0, 1, 0, 0, 0), || format!("re-encryption cost {cost}"))?;
            let out = clpre::decrypt(&mut sess, &rct, &r_keys).map_err(|e| e.to_string())?;
            ensure(out == m, || format!("{backend}: trial {trial} decrypted to a different message"))?;
        }
    }
    let p = params(Backend::Curve);
    let measured = measure_suite(&p, 5, Suite::Clpre, Point::default()).map_err(|e| e.to_string())?;
    let report = costmodel::compare(&measured).map_err(|e| e.to_string())?;
    let row = report
        .row(Table::III, "sender-total-bytes")
        .ok_or("no sender-total-bytes row")?;
    ensure(
        row.reference.bytes == Some(640)
            && row.measured.bytes == Some(768)
            && row.delta.get("bytes") == Some(&128)
            && row.status == RowStatus::Annotated
            && !row.annotations.is_empty(),
        || format!("sender bytes row {row:?}"),
    )?;
    Ok(format!(
        "100 round trips on curve and mock; fog re-encryption T_P+T_M; sender sends 768 B vs table 640 B (+128, {})",
        row.annotations.join(",")
    ))
}

struct AbeWorld {
    auths: Vec<AuthorityKeys>,
    dir: AttributeDirectory,
}

const ABE_ATTRS: [&str; 4] = ["A", "B", "C", "D"];

fn abe_world(sess: &mut Session, rng: &mut ChaCha20Rng) -> Result<AbeWorld, String> {
    let a1 = authority_setup(sess, rng, "plant", &["A", "B"]).map_err(|e| e.to_string())?;
    let a2 = authority_setup(sess, rng, "quality", &["C", "D"]).map_err(|e| e.to_string())?;
    let mut dir = AttributeDirectory::new();
    dir.register(&a1).map_err(|e| e.to_string())?;
    dir.register(&a2).map_err(|e| e.to_string())?;
    Ok(AbeWorld { auths: vec![a1, a2], dir })
}

fn abe_user(sess: &mut Session, w: &AbeWorld, id: &[u8], attrs: &[&str]) -> Result<UserAttrKey, String> {
    let mut key = UserAttrKey { id: id.to_vec(), keys: Default::default() };
    for auth in &w.auths {
        let mine: Vec<&str> = auth.attributes().filter(|a| attrs.contains(a)).collect();
        key = key.merge(keygen_user(sess, auth, id, &mine).map_err(|e| e.to_string())?);
    }
    Ok(key)
}

/// Every AND/OR tree with exactly `leaves` leaves labelled from `labels`.
fn all_policies(leaves: usize, labels: &[&str]) -> Vec<Policy> {
    if leaves == 1 {
        return labels.iter().map(|l| Policy::leaf(l)).collect();
    }
    let mut out = Vec::new();
    for left in 1..leaves {
        let lhs = all_policies(left, labels);
        let rhs = all_policies(leaves - left, labels);
        for l in &lhs {
            for r in &rhs {
                out.push(Policy::and(l.clone(), r.clone()));
                out.push(Policy::or(l.clone(), r.clone()));
            }
        }
    }
    out
}

fn criterion_6() -> Check {
    let p = params(Backend::Mock);
    let mut sess = Session::new(&p);
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let w = abe_world(&mut sess, &mut rng)?;
    let subsets: Vec<Vec<&str>> = (0..1u32 << ABE_ATTRS.len())
        .map(|mask| {
            ABE_ATTRS
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, a)| *a)
                .collect()
        })
        .collect();
    let mut users = Vec::new();
    for (i, set) in subsets.iter().enumerate() {
        let uk = abe_user(&mut sess, &w, format!("user-{i}").as_bytes(), set)?;
        let (tk, r) = transform_key(&mut sess, &mut rng, &uk).map_err(|e| e.to_string())?;
        users.push((set.iter().copied().collect::<BTreeSet<&str>>(), tk, r));
    }

    let policies: Vec<Policy> = (1..=4).flat_map(|k| all_policies(k, &ABE_ATTRS)).collect();
    let (mut granted, mut denied) = (0usize, 0usize);
    let mut full_decrypt_cost = None;
    for policy in &policies {
        let d = sess.random_gt(&mut rng);
        let leaves = policy.leaves();
        let (slots, states) = intermediate_encrypt(&mut sess, &mut rng, &leaves, &w.dir).map_err(|e| e.to_string())?;
        let structure = compile(policy);
        let online = OnlineRandomness::sample(&sess, &mut rng, &structure);
        let split = full_encrypt_with(&mut sess, &d, &slots, &states, structure.clone(), &online)
            .map_err(|e| e.to_string())?;
        let t: Vec<_> = states.iter().map(|s| s.t.clone()).collect();
        let direct = encrypt_direct(&mut sess, &d, structure, &w.dir, &t, &online).map_err(|e| e.to_string())?;
        ensure(
            split.c0 == direct.c0 && split.effective_rows(&p).ok() == direct.effective_rows(&p).ok(),
            || format!("`{policy}`: split ciphertext differs from the single-shot one"),
        )?;
        for (set, tk, r) in &users {
            let expected = policy.evaluate(set);
            match partial_decrypt(&mut sess, &split, tk) {
                Err(MabeError::PolicyUnsatisfied) => {
                    ensure(!expected, || format!("`{policy}` refused {set:?}"))?;
                    denied += 1;
                }
                Err(e) => return Err(format!("`{policy}` with {set:?}: {e}")),
                Ok(pct) => {
                    ensure(expected, || format!("`{policy}` admitted {set:?}"))?;
                    let (out, cost) = sess.measure(|s| full_decrypt(s, &pct, r));
                    let out = out.map_err(|e| e.to_string())?;
                    let single = partial_decrypt(&mut sess, &direct, tk)
                        .and_then(|pd| full_decrypt(&mut sess, &pd, r))
                        .map_err(|e| e.to_string())?;
                    ensure(out == d && single == d, || format!("`{policy}` with {set:?} decrypted wrongly"))?;
                    ensure(cost == ops(0, 1, 1, 0, 1, 0), || format!("full decrypt cost {cost}"))?;
                    full_decrypt_cost = Some(cost);
                    granted += 1;
                }
            }
        }
    }
    Ok(format!(
        "{} policies x {} attribute subsets: {granted} decrypt, {denied} refused, all as the boolean policy says; \
         split = single-shot; full decrypt {}",
        policies.len(),
        subsets.len(),
        full_decrypt_cost.map(|c| c.to_string()).unwrap_or_default()
    ))
}

fn criterion_7() -> Check {
    for backend in [Backend::Curve, Backend::Mock] {
        let p = params(backend);
        let mut sess = Session::new(&p);
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let kp = homo::keygen(&mut sess, &mut rng).map_err(|e| e.to_string())?;
        for i in 0..200 {
            let level = if i % 2 == 0 { Level::Second } else { Level::First };
            let (m1, m2) = (sess.random_gt(&mut rng), sess.random_gt(&mut rng));
            let c1 = homo::encrypt(&mut sess, &mut rng, &m1, &kp.public, level).map_err(|e| e.to_string())?;
            let c2 = homo::encrypt(&mut sess, &mut rng, &m2, &kp.public, level).map_err(|e| e.to_string())?;
            let prod = homo::eval_mul(&mut sess, &mut rng, &c1, &c2, &kp.public).map_err(|e| e.to_string())?;
            let out = homo::decrypt(&mut sess, &prod, kp.secret()).map_err(|e| e.to_string())?;
            let want = sess.gt_mul(&m1, &m2).map_err(|e| e.to_string())?;
            ensure(out == want, || format!("{backend}: pair {i} decrypted to a different product"))?;
        }
    }

    let p = params(Backend::Mock);
    let mut sess = Session::new(&p);
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    let owner = homo::keygen(&mut sess, &mut rng).map_err(|e| e.to_string())?;
    let requester = homo::keygen(&mut sess, &mut rng).map_err(|e| e.to_string())?;
    let rk = homo::rekeygen(&mut sess, owner.secret(), &requester.public.pk2).map_err(|e| e.to_string())?;
    let gt = |v: u64| p.mock_gt(v).map_err(|e| e.to_string());
    let mut runs = 0;
    for x in 0..=20u64 {
        let cx = homo::encrypt(&mut sess, &mut rng, &gt(x)?, &owner.public, Level::Second).map_err(|e| e.to_string())?;
        for y in 0..=20u64 {
            let cy = homo::encrypt(&mut sess, &mut rng, &gt(y)?, &owner.public, Level::Second)
                .map_err(|e| e.to_string())?;
            let first = homo::eval_mul(&mut sess, &mut rng, &cx, &cy, &owner.public).map_err(|e| e.to_string())?;
            let moved = homo::reencrypt(&mut sess, &first, &rk).map_err(|e| e.to_string())?;
            for z in 0..=20u64 {
                let cz = homo::encrypt(&mut sess, &mut rng, &gt(z)?, &requester.public, Level::First)
                    .map_err(|e| e.to_string())?;
                let second = homo::eval_mul(&mut sess, &mut rng, &moved, &cz, &requester.public)
                    .map_err(|e| e.to_string())?;
                let out = homo::decrypt(&mut sess, &second, requester.secret()).map_err(|e| e.to_string())?;
                ensure(out.mock_log() == Some(x + y + z), || {
                    format!("pipeline ({x},{y},{z}) gave log {:?}", out.mock_log())
                })?;
                runs += 1;
            }
        }
    }

    let report = run_builtin("secure-computation", None).map_err(|e| e.to_string())?;
    let pf1 = report.ledger.sent_by("pf1");
    ensure(pf1 == 512, || format!("PF1 sent {pf1} bytes"))?;
    Ok(format!(
        "200 product pairs on curve and mock; {runs} eval/re-encrypt/eval pipelines exact over exponents 0..=20; PF1 sent {pf1} B"
    ))
}

fn criterion_8() -> Check {
    let p = params(Backend::Curve);
    let field = p.scalars();
    let mut rng = ChaCha20Rng::seed_from_u64(9);
    let pool = ["a", "b", "c", "d", "e", "f"];
    let mut reconstructions = 0;
    for _ in 0..50 {
        let leaves = rng.gen_range(1..=6);
        let policy = Policy::random(&mut rng, leaves, &pool);
        let structure = compile(&policy);
        let mut satisfying = Vec::new();
        for mask in 0..1u32 << pool.len() {
            let set: BTreeSet<&str> = pool
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, a)| *a)
                .collect();
            let attrs: Vec<&str> = set.iter().copied().collect();
            let coeffs = structure.satisfy(field, &attrs);
            ensure(coeffs.is_some() == policy.evaluate(&set), || {
                format!("`{policy}` with {set:?}: span check disagrees with the formula")
            })?;
            if let Some(c) = coeffs {
                ensure(c.keys().all(|x| set.contains(structure.rho[*x].as_str())), || {
                    format!("`{policy}`: coefficients use a row outside {set:?}")
                })?;
                satisfying.push(c);
            }
        }
        for _ in 0..100 {
            let secret = field.random(&mut rng);
            let shares = structure.share(field, &mut rng, &secret, false);
            for c in &satisfying {
                ensure(reconstruct(field, c, &shares) == secret, || {
                    format!("`{policy}`: reconstruction missed the secret")
                })?;
                reconstructions += 1;
            }
        }
    }
    Ok(format!(
        "50 random policies (<= 6 leaves) agree with boolean evaluation on all 64 subsets; {reconstructions} reconstructions exact"
    ))
}

type Golden = fn(&costmodel::Params) -> (OpCounter, Option<u64>);

/// Every table cell, written out by hand.
fn golden() -> Vec<(Table, &'static str, Golden)> {
    fn g(p: &costmodel::Params, k: &str) -> u64 {
        p[k]
    }
    vec![
        (Table::II, "agg-sign", |p| (ops(0, g(p, "n"), 0, g(p, "n"), 0, 0), None)),
        (Table::II, "aggregate", |p| (ops(0, 0, 0, g(p, "n") - 1, 0, 0), None)),
        (Table::II, "verify-aggregate", |p| (ops(g(p, "n") + 1, 0, 0, g(p, "n"), 0, 0), None)),
        (Table::II, "bls-sign", |p| (ops(0, g(p, "n"), 0, g(p, "n"), 0, 0), None)),
        (Table::II, "bls-verify", |p| (ops(2 * g(p, "n"), 0, 0, g(p, "n"), 0, 0), None)),
        (Table::II, "agg-device-bytes", |p| (ops(0, 0, 0, 0, 0, 0), Some(g(p, "n") * g(p, "m") + 96))),
        (Table::II, "bls-device-bytes", |p| (ops(0, 0, 0, 0, 0, 0), Some(g(p, "n") * g(p, "m") + 96 * g(p, "n")))),
        (Table::III, "sender-keygen", |_| (ops(0, 3, 0, 0, 0, 0), None)),
        (Table::III, "sender-encrypt", |_| (ops(1, 4, 1, 0, 0, 0), None)),
        (Table::III, "sender-rekeygen", |_| (ops(1, 4, 1, 1, 0, 0), None)),
        (Table::III, "sender-total-bytes", |_| (OpCounter::default(), Some(640))),
        (Table::III, "fog-reencrypt", |_| (ops(1, 0, 1, 0, 0, 0), None)),
        (Table::III, "fog-bytes", |_| (OpCounter::default(), Some(384))),
        (Table::IV, "intermediate-encrypt", |p| (ops(3 * g(p, "x"), 9 * g(p, "x"), 4 * g(p, "x"), 0, 0, 0), None)),
        (Table::IV, "device-p1-bytes", |p| (OpCounter::default(), Some(g(p, "m") + 640 * g(p, "x")))),
        (Table::IV, "key-transform", |_| (ops(0, 2, 0, 1, 0, 0), None)),
        (Table::IV, "full-decrypt", |_| (ops(1, 2, 1, 0, 1, 0), None)),
        (Table::IV, "device-p2-bytes", |_| (OpCounter::default(), Some(160))),
        (Table::IV, "full-encrypt", |p| (ops(1, 1, 1 + 4 * g(p, "x"), 0, 0, 2 * g(p, "x")), None)),
        (Table::IV, "fog-p1-bytes", |p| (OpCounter::default(), Some(640 * g(p, "x")))),
        (Table::IV, "partial-decrypt", |p| {
            let l = g(p, "l");
            (ops(3 * l, 4 * l, l, l, 2 * l, 0), None)
        }),
        (Table::IV, "fog-p2-bytes", |_| (OpCounter::default(), Some(256))),
        (Table::V, "pf1-keygen", |_| (ops(1, 2, 0, 0, 0, 0), None)),
        (Table::V, "pf1-encrypt", |_| (ops(0, 2, 1, 0, 0, 0), None)),
        (Table::V, "pf1-eval", |_| (ops(0, 2, 4, 0, 0, 0), None)),
        (Table::V, "pf1-rekeygen", |_| (ops(0, 1, 0, 0, 0, 0), None)),
        (Table::V, "pf1-reencrypt", |_| (ops(1, 2, 2, 0, 2, 0), None)),
        (Table::V, "pf1-eval-transformed", |_| (ops(0, 2, 4, 0, 0, 0), None)),
        (Table::V, "pf1-bytes", |_| (OpCounter::default(), Some(512))),
        (Table::V, "pf2-keygen", |_| (ops(1, 2, 0, 0, 0, 0), None)),
        (Table::V, "pf2-decrypt", |_| (ops(1, 1, 0, 0, 1, 0), None)),
        (Table::V, "pf2-bytes", |p| (OpCounter::default(), Some(g(p, "req")))),
    ]
}

fn criterion_9() -> Check {
    let cells = golden();
    let registry = costmodel::registry();
    ensure(registry.formulas().len() == cells.len(), || {
        format!("{} formulas vs {} golden cells", registry.formulas().len(), cells.len())
    })?;
    let mut evaluations = 0;
    for (table, task, cell) in &cells {
        for n in 1..=10 {
            for (m, x, l, req) in [(0, 1, 0, 0), (100, 2, 1, 64), (1000, 3, 2, 256), (37, 6, 6, 1000)] {
                let p = costmodel::params(&[("n", n), ("m", m), ("x", x), ("l", l), ("req", req)]);
                let got = eval_formula(*table, task, &p).map_err(|e| format!("{table}/{task}: {e}"))?;
                let (counts, bytes) = cell(&p);
                ensure(got.counts == counts && got.bytes == bytes, || {
                    format!("{table}/{task} at {p:?}: {} {:?} vs golden {counts} {bytes:?}", got.counts, got.bytes)
                })?;
                evaluations += 1;
            }
        }
    }

    let curve = params(Backend::Curve);
    let mut measured = Vec::new();
    for suite in Suite::ALL {
        measured.extend(measure_suite(&curve, 9, suite, Point::default()).map_err(|e| e.to_string())?);
    }
    let report = costmodel::compare(&measured).map_err(|e| e.to_string())?;
    for row in &report.rows {
        match row.table {
            Table::II => ensure(row.delta.is_empty(), || format!("II/{} delta {:?}", row.task, row.delta))?,
            _ => ensure(row.status != RowStatus::Unexplained, || {
                format!("{}/{} unexplained delta {:?}", row.table, row.task, row.delta)
            })?,
        }
    }
    let annotated = report.rows.iter().filter(|r| r.status == RowStatus::Annotated).count();
    Ok(format!(
        "{} cells match the golden tables ({evaluations} evaluations); {} compared rows: Table II zero delta, {annotated} annotated, none unexplained",
        cells.len(),
        report.rows.len()
    ))
}

fn criterion_10() -> Check {
    let mut artifacts = 0;
    for (name, _) in BUILTIN_SCENARIOS {
        let a = run_builtin(name, None).map_err(|e| e.to_string())?;
        let b = run_builtin(name, None).map_err(|e| e.to_string())?;
        ensure(a.passed(), || format!("{name} did not pass:\n{}", a.summary()))?;
        for (what, x, y) in [
            ("transcript", a.transcript_jsonl(), b.transcript_jsonl()),
            ("ledger", a.ledger.to_csv(), b.ledger.to_csv()),
            ("counters", a.counters_json(), b.counters_json()),
            (
                "report",
                serde_json::to_string(&a).map_err(|e| e.to_string())?,
                serde_json::to_string(&b).map_err(|e| e.to_string())?,
            ),
        ] {
            ensure(x == y, || format!("{name}: {what} differs between runs"))?;
            artifacts += 1;
        }
    }
    Ok(format!(
        "{} scenarios rerun with equal seeds: {artifacts} artifacts byte-identical",
        BUILTIN_SCENARIOS.len()
    ))
}

type Criterion = (&'static str, fn() -> Check);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("aggregate signature correctness and soundness", criterion_1),
        ("verification operation counts", criterion_2),
        ("frame byte counts", criterion_3),
        ("aggregate vs per-packet timing trend", criterion_4),
        ("proxy re-encryption end to end", criterion_5),
        ("attribute-based access exhaustive oracle", criterion_6),
        ("homomorphic pipeline", criterion_7),
        ("secret sharing oracle", criterion_8),
        ("cost model fidelity", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS [{secs:.1}s] {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL [{secs:.1}s] {name}: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
