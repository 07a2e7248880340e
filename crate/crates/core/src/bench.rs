//! Workloads for the four protocol suites, timed and op-counted.
//!
//! One workload run executes every task of a suite once on fresh inputs and
//! returns a [`TaskSample`] per task. Benchmarks average several runs;
//! cost-model measurements take the counts of a single run.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;
use std::time::{Duration, Instant};

use cpu_time::ThreadTime;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aggsign::{self, FrameMode, SignKeyPair, SignedFrame, DEFAULT_SIGNATURE_BYTES};
use crate::clpre;
use crate::costmodel::{self, Measurement, Table};
use crate::homo::{self, EvalOp, Level, Query};
use crate::lsss::Policy;
use crate::mabe::{self, AttributeDirectory, DeviceUpload};
use crate::pairing::{setup_pairing, Backend, OpCounter, PairingParams, Session};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{suite} workload failed: {reason}")]
    Workload { suite: Suite, reason: String },
}

pub type Result<T> = std::result::Result<T, BenchError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Agg,
    Clpre,
    Mabe,
    Homo,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Agg, Suite::Clpre, Suite::Mabe, Suite::Homo];

    pub fn table(self) -> Table {
        match self {
            Suite::Agg => Table::II,
            Suite::Clpre => Table::III,
            Suite::Mabe => Table::IV,
            Suite::Homo => Table::V,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Agg => "agg",
            Suite::Clpre => "clpre",
            Suite::Mabe => "mabe",
            Suite::Homo => "homo",
        }
    }
}

impl std::fmt::Display for Suite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| BenchError::Config(format!("unknown suite `{s}`")))
    }
}

/// Parameters of one workload run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Point {
    /// Packets per frame.
    pub n: usize,
    /// Payload bytes per packet or datum.
    pub msg_size: usize,
    /// Attributes attached to a datum and held by the requester.
    pub attrs: usize,
}

impl Default for Point {
    fn default() -> Point {
        Point {
            n: 7,
            msg_size: 100,
            attrs: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaskSample {
    pub task: &'static str,
    pub ops: OpCounter,
    /// Wall-clock time.
    pub elapsed: Duration,
    /// CPU time of the calling thread.
    pub cpu: Duration,
    /// Accounted wire bytes, for message tasks.
    pub bytes: Option<u64>,
}

struct Recorder {
    samples: Vec<TaskSample>,
}

impl Recorder {
    fn time<T>(&mut self, sess: &mut Session, task: &'static str, f: impl FnOnce(&mut Session) -> T) -> T {
        let start = Instant::now();
        let cpu = ThreadTime::now();
        let (out, ops) = sess.measure(f);
        let cpu = cpu.elapsed();
        self.samples.push(TaskSample {
            task,
            ops,
            elapsed: start.elapsed(),
            cpu,
            bytes: None,
        });
        out
    }

    /// Times two tasks in A-B-B-A order and records the mean of each pair,
    /// which cancels linear drift between them.
    fn time_paired<A, B>(
        &mut self,
        sess: &mut Session,
        (task_a, mut fa): (&'static str, impl FnMut(&mut Session) -> A),
        (task_b, mut fb): (&'static str, impl FnMut(&mut Session) -> B),
    ) -> (A, B) {
        let a = self.time(sess, task_a, &mut fa);
        let b = self.time(sess, task_b, &mut fb);
        self.time(sess, task_b, &mut fb);
        self.time(sess, task_a, &mut fa);
        let a2 = self.samples.pop().expect("second A block");
        let b2 = self.samples.pop().expect("second B block");
        let n = self.samples.len();
        for (i, extra) in [(n - 2, a2), (n - 1, b2)] {
            let first = &mut self.samples[i];
            first.elapsed = (first.elapsed + extra.elapsed) / 2;
            first.cpu = (first.cpu + extra.cpu) / 2;
        }
        (a, b)
    }

    fn bytes(&mut self, task: &'static str, bytes: usize) {
        self.samples.push(TaskSample {
            task,
            ops: OpCounter::default(),
            elapsed: Duration::ZERO,
            cpu: Duration::ZERO,
            bytes: Some(bytes as u64),
        });
    }
}

fn fail(suite: Suite) -> impl Fn(String) -> BenchError {
    move |reason| BenchError::Workload { suite, reason }
}

fn random_packet<R: RngCore + ?Sized>(rng: &mut R, len: usize) -> Vec<u8> {
    let mut p = vec![0u8; len.max(1)];
    rng.fill_bytes(&mut p);
    p
}

/// Runs every task of `suite` once.
pub fn run_workload<R: RngCore + ?Sized>(
    params: &PairingParams,
    rng: &mut R,
    suite: Suite,
    point: Point,
) -> Result<Vec<TaskSample>> {
    let mut rec = Recorder {
        samples: Vec::new(),
    };
    match suite {
        Suite::Agg => agg_workload(params, rng, point, &mut rec),
        Suite::Clpre => clpre_workload(params, rng, &mut rec),
        Suite::Mabe => mabe_workload(params, rng, point, &mut rec),
        Suite::Homo => homo_workload(params, rng, &mut rec),
    }
    .map_err(fail(suite))?;
    Ok(rec.samples)
}

fn agg_workload<R: RngCore + ?Sized>(
    params: &PairingParams,
    rng: &mut R,
    point: Point,
    rec: &mut Recorder,
) -> std::result::Result<(), String> {
    if point.n == 0 {
        return Err("n must be at least 1".into());
    }
    let mut s = Session::new(params);
    let keys = SignKeyPair::generate(&mut s, rng).map_err(|e| e.to_string())?;
    let packets: Vec<Vec<u8>> = (0..point.n).map(|_| random_packet(rng, point.msg_size)).collect();
    let sign_all = |s: &mut Session| {
        packets
            .iter()
            .map(|p| aggsign::sign(s, p, &keys.sk))
            .collect::<std::result::Result<Vec<_>, _>>()
    };

    let sign_then_aggregate = |s: &mut Session| {
        let sigs = sign_all(s)?;
        aggsign::aggregate(s, &sigs)
    };
    let (bls_sigs, agg) = rec.time_paired(
        &mut s,
        ("bls-sign", sign_all),
        ("sign-aggregate", sign_then_aggregate),
    );
    let (bls_sigs, agg) = (
        bls_sigs.map_err(|e| e.to_string())?,
        agg.map_err(|e| e.to_string())?,
    );
    let sigs = rec.time(&mut s, "agg-sign", sign_all).map_err(|e| e.to_string())?;
    let agg2 = rec
        .time(&mut s, "aggregate", |s| aggsign::aggregate(s, &sigs))
        .map_err(|e| e.to_string())?;
    if agg != agg2 {
        return Err("aggregation is not deterministic".into());
    }
    let ok = rec.time(&mut s, "verify-aggregate", |s| {
        aggsign::verify_aggregate(s, &packets, &agg, &keys.pk)
    });
    let ok_each = rec.time(&mut s, "bls-verify", |s| {
        aggsign::verify_each(s, &packets, &bls_sigs, &keys.pk)
    });
    if !(ok && ok_each) {
        return Err("honest frame rejected".into());
    }
    for mode in [FrameMode::Aggregate, FrameMode::Bls] {
        let frame = SignedFrame::seal(&mut s, packets.clone(), &keys.sk, mode, DEFAULT_SIGNATURE_BYTES)
            .map_err(|e| e.to_string())?;
        let task = match mode {
            FrameMode::Aggregate => "agg-device-bytes",
            FrameMode::Bls => "bls-device-bytes",
        };
        rec.bytes(task, frame.byte_breakdown().accounted());
    }
    Ok(())
}

fn clpre_workload<R: RngCore + ?Sized>(
    params: &PairingParams,
    rng: &mut R,
    rec: &mut Recorder,
) -> std::result::Result<(), String> {
    let e = |e: clpre::ClpreError| e.to_string();
    let mut s = Session::new(params);
    let pkg = rec.time(&mut s, "pkg-setup", |s| clpre::pkg_setup(s, rng)).map_err(e)?;
    let p_s = clpre::extract_partial_key(&mut s, &pkg, b"sender").map_err(e)?;
    let p_r = clpre::extract_partial_key(&mut s, &pkg, b"receiver").map_err(e)?;
    let sender = rec
        .time(&mut s, "sender-keygen", |s| {
            clpre::user_keygen(s, rng, &p_s, b"sender", &pkg.mpk, true)
        })
        .map_err(e)?;
    let receiver = rec
        .time(&mut s, "receiver-keygen", |s| {
            clpre::user_keygen(s, rng, &p_r, b"receiver", &pkg.mpk, false)
        })
        .map_err(e)?;
    let m = s.random_gt(rng);
    let ct = rec
        .time(&mut s, "sender-encrypt", |s| clpre::encrypt(s, rng, &m, &sender))
        .map_err(e)?;
    let rk = rec
        .time(&mut s, "sender-rekeygen", |s| {
            clpre::rekeygen(s, rng, &sender, &receiver.receiver_pub())
        })
        .map_err(e)?;
    let upload = clpre::UploadMessage { ct, rk };
    rec.bytes("sender-total-bytes", upload.to_bytes().len());
    let rct = rec
        .time(&mut s, "fog-reencrypt", |s| clpre::reencrypt(s, &upload.ct, &upload.rk))
        .map_err(e)?;
    rec.bytes("fog-bytes", rct.to_bytes().len());
    let out = rec
        .time(&mut s, "receiver-decrypt", |s| clpre::decrypt(s, &rct, &receiver))
        .map_err(e)?;
    if out != m {
        return Err("receiver recovered a different message".into());
    }
    Ok(())
}

fn mabe_workload<R: RngCore + ?Sized>(
    params: &PairingParams,
    rng: &mut R,
    point: Point,
    rec: &mut Recorder,
) -> std::result::Result<(), String> {
    if point.attrs == 0 {
        return Err("at least one attribute is required".into());
    }
    let e = |e: mabe::MabeError| e.to_string();
    let mut s = Session::new(params);
    let names: Vec<String> = (0..point.attrs).map(|i| format!("attr{i}")).collect();
    let (even, odd): (Vec<&str>, Vec<&str>) = {
        let all: Vec<&str> = names.iter().map(String::as_str).collect();
        let (a, b): (Vec<_>, Vec<_>) = all.iter().enumerate().partition(|(i, _)| i % 2 == 0);
        (a.into_iter().map(|x| *x.1).collect(), b.into_iter().map(|x| *x.1).collect())
    };
    let mut dir = AttributeDirectory::new();
    let mut user_key: Option<mabe::UserAttrKey> = None;
    for (name, attrs) in [("authority-a", &even), ("authority-b", &odd)] {
        if attrs.is_empty() {
            continue;
        }
        let auth = mabe::authority_setup(&mut s, rng, name, attrs).map_err(e)?;
        dir.register(&auth).map_err(e)?;
        let k = mabe::keygen_user(&mut s, &auth, b"requester", attrs).map_err(e)?;
        user_key = Some(match user_key {
            None => k,
            Some(prev) => prev.merge(k),
        });
    }
    let user_key = user_key.expect("at least one authority");
    let all: Vec<&str> = names.iter().map(String::as_str).collect();
    let policy = all[1..]
        .iter()
        .fold(Policy::leaf(all[0]), |acc, a| Policy::and(acc, Policy::leaf(a)));

    let d = s.random_gt(rng);
    let (slots, states) = rec
        .time(&mut s, "intermediate-encrypt", |s| mabe::intermediate_encrypt(s, rng, &all, &dir))
        .map_err(e)?;
    let upload = DeviceUpload { d: d.clone(), slots, states };
    rec.bytes("device-p1-bytes", upload.accounted_bytes(point.msg_size));
    let ct = rec
        .time(&mut s, "full-encrypt", |s| {
            mabe::full_encrypt(s, rng, &upload.d, &upload.slots, &upload.states, &policy)
        })
        .map_err(e)?;
    let breakdown = ct.byte_breakdown();
    rec.bytes("fog-p1-bytes", breakdown.elements + breakdown.scalars);
    let (tk, r) = rec
        .time(&mut s, "key-transform", |s| mabe::transform_key(s, rng, &user_key))
        .map_err(e)?;
    rec.bytes("device-p2-bytes", tk.wire_bytes());
    let pct = rec
        .time(&mut s, "partial-decrypt", |s| mabe::partial_decrypt(s, &ct, &tk))
        .map_err(e)?;
    rec.bytes("fog-p2-bytes", pct.to_bytes().len());
    let out = rec
        .time(&mut s, "full-decrypt", |s| mabe::full_decrypt(s, &pct, &r))
        .map_err(e)?;
    if out != d {
        return Err("requester recovered a different key".into());
    }
    Ok(())
}

fn homo_workload<R: RngCore + ?Sized>(
    params: &PairingParams,
    rng: &mut R,
    rec: &mut Recorder,
) -> std::result::Result<(), String> {
    let e = |e: homo::HomoError| e.to_string();
    let mut s = Session::new(params);
    let pf1 = rec.time(&mut s, "pf1-keygen", |s| homo::keygen(s, rng)).map_err(e)?;
    let pf2 = rec.time(&mut s, "pf2-keygen", |s| homo::keygen(s, rng)).map_err(e)?;
    let (m1, m2, m3) = (s.random_gt(rng), s.random_gt(rng), s.random_gt(rng));
    let a = rec
        .time(&mut s, "pf1-encrypt", |s| homo::encrypt(s, rng, &m1, &pf1.public, Level::Second))
        .map_err(e)?;
    let b = homo::encrypt(&mut s, rng, &m2, &pf1.public, Level::Second).map_err(e)?;
    let query = Query {
        operands: vec![a, b],
        program: vec![EvalOp::Mul(1)],
    };
    let request = EvalOp::encode(&query.program);
    rec.bytes("pf2-bytes", request.len());
    let res = rec
        .time(&mut s, "pf1-eval", |s| homo::evaluate(s, rng, &query, &pf1.public))
        .map_err(e)?;
    let rk = rec
        .time(&mut s, "pf1-rekeygen", |s| homo::rekeygen(s, pf1.secret(), &pf2.public.pk2))
        .map_err(e)?;
    let moved = rec
        .time(&mut s, "pf1-reencrypt", |s| homo::reencrypt(s, &res, &rk))
        .map_err(e)?;
    let c = homo::encrypt(&mut s, rng, &m3, &pf2.public, Level::First).map_err(e)?;
    let out_ct = rec
        .time(&mut s, "pf1-eval-transformed", |s| homo::eval_mul(s, rng, &moved, &c, &pf2.public))
        .map_err(e)?;
    rec.bytes(
        "pf1-bytes",
        query.operands[0].to_bytes().len() + out_ct.to_bytes().len(),
    );
    let out = rec
        .time(&mut s, "pf2-decrypt", |s| homo::decrypt(s, &out_ct, pf2.secret()))
        .map_err(e)?;
    let expect = {
        let mut u = Session::new(params);
        let t = u.gt_mul(&m1, &m2).map_err(|x| x.to_string())?;
        u.gt_mul(&t, &m3).map_err(|x| x.to_string())?
    };
    if out != expect {
        return Err("evaluated product decrypted incorrectly".into());
    }
    Ok(())
}

/// Symbol values the table formulas are evaluated at for this point.
pub fn formula_params(suite: Suite, point: Point, samples: &[TaskSample]) -> costmodel::Params {
    match suite {
        Suite::Agg => costmodel::params(&[("n", point.n as u64), ("m", point.msg_size as u64)]),
        Suite::Clpre => costmodel::Params::new(),
        Suite::Mabe => costmodel::params(&[
            ("x", point.attrs as u64),
            ("l", point.attrs as u64),
            ("m", point.msg_size as u64),
        ]),
        Suite::Homo => {
            let req = samples
                .iter()
                .find(|s| s.task == "pf2-bytes")
                .and_then(|s| s.bytes)
                .unwrap_or(0);
            costmodel::params(&[("req", req)])
        }
    }
}

/// One run's counts and bytes, restricted to tasks that have a formula.
pub fn measure_suite(
    params: &PairingParams,
    seed: u64,
    suite: Suite,
    point: Point,
) -> Result<Vec<Measurement>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let samples = run_workload(params, &mut rng, suite, point)?;
    let fparams = formula_params(suite, point, &samples);
    let reg = costmodel::registry();
    Ok(samples
        .iter()
        .filter(|s| reg.formula(suite.table(), s.task).is_ok())
        .map(|s| Measurement {
            table: suite.table(),
            task: s.task.to_string(),
            params: fparams.clone(),
            counts: s.ops,
            bytes: s.bytes,
        })
        .collect())
}

/// Reference wall-clock times (ms) for the data-sharing tasks.
pub fn clpre_reference_ms(task: &str) -> Option<f64> {
    Some(match task {
        "pkg-setup" => 9.964,
        "sender-keygen" => 30.317,
        "receiver-keygen" => 2.311,
        "sender-encrypt" => 57.717,
        "sender-rekeygen" => 45.997,
        "fog-reencrypt" => 0.723,
        "receiver-decrypt" => 0.581,
        _ => return None,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub suite: Suite,
    /// Packet counts to sweep (agg suite).
    pub ns: Vec<usize>,
    pub msg_size: usize,
    /// Attribute counts to sweep (mabe suite).
    pub attrs: Vec<usize>,
    pub repeat: usize,
    pub backend: Backend,
    pub seed: u64,
}

impl BenchConfig {
    pub fn new(suite: Suite) -> BenchConfig {
        BenchConfig {
            suite,
            ns: (1..=10).collect(),
            msg_size: 100,
            attrs: vec![2],
            repeat: 10,
            backend: Backend::Curve,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(BenchError::Config(m.to_string()));
        if self.repeat == 0 {
            return bad("repeat must be at least 1");
        }
        if self.ns.is_empty() || self.ns.contains(&0) {
            return bad("packet counts must be non-empty and positive");
        }
        if self.attrs.is_empty() || self.attrs.contains(&0) {
            return bad("attribute counts must be non-empty and positive");
        }
        Ok(())
    }

    fn points(&self) -> Vec<Point> {
        let base = Point {
            n: self.ns[0],
            msg_size: self.msg_size,
            attrs: self.attrs[0],
        };
        match self.suite {
            Suite::Agg => self.ns.iter().map(|n| Point { n: *n, ..base }).collect(),
            Suite::Mabe => self.attrs.iter().map(|a| Point { attrs: *a, ..base }).collect(),
            Suite::Clpre | Suite::Homo => vec![base],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub suite: Suite,
    pub task: String,
    pub n: usize,
    pub msg_size: usize,
    pub attrs: usize,
    pub repeat: usize,
    /// Mean wall-clock time.
    pub mean_ms: f64,
    /// Mean thread CPU time.
    pub mean_cpu_ms: f64,
    pub ops: OpCounter,
    pub bytes: Option<u64>,
    pub reference_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub rows: Vec<BenchRow>,
}

/// Averages `repeat` workload runs per sweep point. Counts must agree
/// across runs; the first run's are reported.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    cfg.validate()?;
    let params = setup_pairing(cfg.backend, &cfg.seed.to_be_bytes())
        .map_err(|e| BenchError::Config(e.to_string()))?;
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::new();
    for point in cfg.points() {
        let mut totals: BTreeMap<&'static str, (Duration, Duration)> = BTreeMap::new();
        let mut first: Option<Vec<TaskSample>> = None;
        run_workload(&params, &mut ChaCha20Rng::seed_from_u64(!cfg.seed), cfg.suite, point)?;
        for _ in 0..cfg.repeat {
            let run_seed: u64 = rng.gen();
            let mut run_rng = ChaCha20Rng::seed_from_u64(run_seed);
            let samples = run_workload(&params, &mut run_rng, cfg.suite, point)?;
            for s in &samples {
                let t = totals.entry(s.task).or_default();
                t.0 += s.elapsed;
                t.1 += s.cpu;
            }
            if first.is_none() {
                first = Some(samples);
            }
        }
        for s in first.expect("repeat is at least 1") {
            rows.push(BenchRow {
                suite: cfg.suite,
                task: s.task.to_string(),
                n: point.n,
                msg_size: point.msg_size,
                attrs: point.attrs,
                repeat: cfg.repeat,
                mean_ms: totals[s.task].0.as_secs_f64() * 1e3 / cfg.repeat as f64,
                mean_cpu_ms: totals[s.task].1.as_secs_f64() * 1e3 / cfg.repeat as f64,
                ops: s.ops,
                bytes: s.bytes,
                reference_ms: match cfg.suite {
                    Suite::Clpre => clpre_reference_ms(s.task),
                    _ => None,
                },
            });
        }
    }
    Ok(BenchReport {
        config: cfg.clone(),
        rows,
    })
}

impl BenchReport {
    pub fn row(&self, task: &str, n: usize) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.task == task && r.n == n)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "suite,task,n,msg_size,attrs,repeat,mean_ms,mean_cpu_ms,ops,pairings,exponentiations,multiplications,hashes,divisions,subtractions,bytes,reference_ms\n",
        );
        for r in &self.rows {
            let o = &r.ops;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{:.4},{:.4},{},{},{},{},{},{},{},{},{}",
                r.suite,
                r.task,
                r.n,
                r.msg_size,
                r.attrs,
                r.repeat,
                r.mean_ms,
                r.mean_cpu_ms,
                o,
                o.pairings,
                o.exponentiations,
                o.multiplications,
                o.hashes,
                o.divisions,
                o.subtractions,
                r.bytes.map(|b| b.to_string()).unwrap_or_default(),
                r.reference_ms.map(|b| b.to_string()).unwrap_or_default(),
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costmodel::{compare, RowStatus};

    fn mock() -> PairingParams {
        setup_pairing(Backend::Mock, b"bench").unwrap()
    }

    #[test]
    fn every_formula_is_measured() {
        let params = mock();
        let mut all = Vec::new();
        for suite in Suite::ALL {
            all.extend(measure_suite(&params, 1, suite, Point::default()).unwrap());
        }
        assert_eq!(all.len(), costmodel::registry().formulas().len());
        let report = compare(&all).unwrap();
        assert!(report.unexplained().is_empty(), "{}", report.to_text());
        for row in report.rows.iter().filter(|r| r.table == Table::II) {
            assert_eq!(row.status, RowStatus::Exact, "{}", row.task);
        }
    }

    #[test]
    fn bench_rows_and_formats() {
        let mut cfg = BenchConfig::new(Suite::Clpre);
        cfg.backend = Backend::Mock;
        cfg.repeat = 2;
        let report = run_bench(&cfg).unwrap();
        let row = report.rows.iter().find(|r| r.task == "fog-reencrypt").unwrap();
        assert_eq!(row.reference_ms, Some(0.723));
        assert_eq!(row.ops, OpCounter { pairings: 1, multiplications: 1, ..Default::default() });
        let csv = report.to_csv();
        assert_eq!(csv.lines().count(), report.rows.len() + 1);
        let back: BenchReport = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(back.rows.len(), report.rows.len());

        cfg.repeat = 0;
        assert!(run_bench(&cfg).is_err());
        let mut cfg = BenchConfig::new(Suite::Agg);
        cfg.ns = vec![0];
        assert!(run_bench(&cfg).is_err());
    }

    #[test]
    fn mabe_sweep_scales_with_attributes() {
        let mut cfg = BenchConfig::new(Suite::Mabe);
        cfg.backend = Backend::Mock;
        cfg.repeat = 1;
        cfg.attrs = vec![1, 3];
        let report = run_bench(&cfg).unwrap();
        let enc: Vec<u64> = report
            .rows
            .iter()
            .filter(|r| r.task == "intermediate-encrypt")
            .map(|r| r.ops.exponentiations)
            .collect();
        assert_eq!(enc, vec![5, 15]);
    }
}
