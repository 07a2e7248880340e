//! Deterministic discrete-event simulation of the four-layer plant
//! architecture: perception devices, fog nodes (some acting as proxies),
//! a key-less cloud store and application users.
//!
//! Events run in `(time, seq)` order on one thread. Every message passes an
//! authentication hook, is sized by its canonical serializer and lands in a
//! [`ByteLedger`]; every protocol step runs against the acting entity's own
//! [`Session`] so operation counts roll up per entity.
//!
//! ```
//! use fogsec::fogsim::{Scenario, Simulation};
//!
//! let mut scenario = Scenario::builtin("secure-data-aggregation").unwrap();
//! scenario.backend = fogsec::pairing::Backend::Mock;
//! let report = Simulation::build(scenario).unwrap().run();
//! assert!(report.passed(), "{}", report.summary());
//! assert_eq!(report.ledger.link_total("press-1", "fog-1"), 796);
//! ```

mod access;
mod aggregation;
mod computation;
pub mod kem;
mod scenario;
mod sharing;

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::fmt::{self, Display, Write as _};

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aggsign::SignedFrame;
use crate::clpre::{ClpreCiphertext, ReEncCiphertext, ReEncKey, UploadMessage};
use crate::homo::{EvalOp, HomoCiphertext};
use crate::mabe::{DeviceUpload, MabeCiphertext, PartialCiphertext, TransformedKey};
use crate::pairing::{setup_pairing, GTElement, OpCounter, PairingParams, Session};

pub use scenario::{
    AssertSpec, EntitySpec, Layer, Protocol, Role, Scenario, StepSpec, BUILTIN_SCENARIOS,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("scenario file: {0}")]
    Scenario(String),
    #[error("topology: {0}")]
    Topology(String),
    #[error("authentication hook denied {payload} from {src} to {dst}")]
    Auth {
        src: String,
        dst: String,
        payload: String,
    },
    #[error("{entity} failed at `{step}`: {reason}")]
    Protocol {
        entity: String,
        step: String,
        reason: String,
    },
    #[error("pairing setup: {0}")]
    Setup(String),
}

pub(crate) fn protocol_err(entity: &str, step: &str, reason: impl Display) -> SimError {
    SimError::Protocol {
        entity: entity.to_string(),
        step: step.to_string(),
        reason: reason.to_string(),
    }
}

/// Typed protocol object carried by a message.
#[derive(Clone, Debug)]
pub enum Payload {
    SignedFrame(SignedFrame),
    /// Verified packets passed on in the clear.
    SensorData(Vec<Vec<u8>>),
    Summary(Vec<u8>),
    ClpreUpload(UploadMessage),
    ClpreRekey(ReEncKey),
    ClpreCiphertext(ClpreCiphertext),
    ClpreDelivery(ReEncCiphertext),
    /// Bulk body under the KEM wrapper.
    Sealed(Vec<u8>),
    DataRequest(String),
    Notify { object: String, requester: String },
    AccessDenied(String),
    MabeUpload(DeviceUpload),
    MabeCiphertext(MabeCiphertext),
    TransformedKey(TransformedKey),
    PartialCiphertext(PartialCiphertext),
    HomoCiphertext(HomoCiphertext),
    HomoQuery {
        objects: Vec<String>,
        operands: Vec<HomoCiphertext>,
        program: Vec<EvalOp>,
    },
    EvalProgram {
        operands: Vec<HomoCiphertext>,
        program: Vec<EvalOp>,
    },
}

fn labels(out: &mut Vec<u8>, items: &[String]) -> usize {
    let before = out.len();
    out.extend_from_slice(&(items.len() as u16).to_be_bytes());
    for s in items {
        out.extend_from_slice(&(s.len() as u16).to_be_bytes());
        out.extend_from_slice(s.as_bytes());
    }
    out.len() - before
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::SignedFrame(_) => "signed-frame",
            Payload::SensorData(_) => "sensor-data",
            Payload::Summary(_) => "periodic-summary",
            Payload::ClpreUpload(_) => "ciphertext-and-rekey",
            Payload::ClpreRekey(_) => "rekey",
            Payload::ClpreCiphertext(_) => "stored-ciphertext",
            Payload::ClpreDelivery(_) => "reencrypted-ciphertext",
            Payload::Sealed(_) => "sealed-body",
            Payload::DataRequest(_) => "data-request",
            Payload::Notify { .. } => "notify",
            Payload::AccessDenied(_) => "access-denied",
            Payload::MabeUpload(_) => "intermediate-upload",
            Payload::MabeCiphertext(_) => "abe-ciphertext",
            Payload::TransformedKey(_) => "transformed-key",
            Payload::PartialCiphertext(_) => "partial-ciphertext",
            Payload::HomoCiphertext(_) => "homomorphic-ciphertext",
            Payload::HomoQuery { .. } => "query",
            Payload::EvalProgram { .. } => "evaluation-program",
        }
    }

    /// Canonical bytes and how many of them are framing (lengths, labels,
    /// routing ids) rather than protocol content.
    pub fn wire(&self) -> (Vec<u8>, usize) {
        match self {
            Payload::SignedFrame(f) => (f.encode(), f.byte_breakdown().framing),
            Payload::SensorData(packets) => {
                let mut out = (packets.len() as u32).to_be_bytes().to_vec();
                for p in packets {
                    out.extend_from_slice(&(p.len() as u32).to_be_bytes());
                    out.extend_from_slice(p);
                }
                (out, 4 + 4 * packets.len())
            }
            Payload::Summary(b) | Payload::Sealed(b) => (b.clone(), 0),
            Payload::ClpreUpload(u) => (u.to_bytes(), 0),
            Payload::ClpreRekey(rk) => (rk.to_bytes(), 0),
            Payload::ClpreCiphertext(ct) => (ct.to_bytes(), 0),
            Payload::ClpreDelivery(ct) => (ct.to_bytes(), 0),
            Payload::DataRequest(obj) | Payload::AccessDenied(obj) => {
                (obj.as_bytes().to_vec(), obj.len())
            }
            Payload::Notify { object, requester } => {
                let mut out = Vec::new();
                let n = labels(&mut out, &[object.clone(), requester.clone()]);
                (out, n)
            }
            Payload::MabeUpload(u) => u.to_bytes(),
            Payload::MabeCiphertext(ct) => {
                let bytes = ct.to_bytes();
                (bytes, ct.byte_breakdown().framing)
            }
            Payload::TransformedKey(tk) => tk.to_bytes(),
            Payload::PartialCiphertext(p) => (p.to_bytes(), 0),
            Payload::HomoCiphertext(ct) => (ct.to_bytes(), 0),
            Payload::HomoQuery {
                objects,
                operands,
                program,
            } => {
                let mut out = Vec::new();
                let framing = labels(&mut out, objects);
                for ct in operands {
                    out.extend_from_slice(&ct.to_bytes());
                }
                out.extend_from_slice(&EvalOp::encode(program));
                (out, framing)
            }
            Payload::EvalProgram { operands, program } => {
                let mut out = Vec::new();
                for ct in operands {
                    out.extend_from_slice(&ct.to_bytes());
                }
                out.extend_from_slice(&EvalOp::encode(program));
                (out, 0)
            }
        }
    }
}

/// Routing metadata travels beside the payload and is not counted.
#[derive(Clone, Debug)]
pub struct Message {
    pub src: String,
    pub dst: String,
    pub object: Option<String>,
    pub subject: Option<String>,
    pub payload: Payload,
}

/// All the authentication hook gets to see.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MessageMeta<'a> {
    pub src: &'a str,
    pub dst: &'a str,
    pub payload_type: &'a str,
}

/// Returns `false` to refuse a message.
pub type AuthHook = Box<dyn FnMut(&MessageMeta<'_>) -> bool>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub index: u64,
    pub time: u64,
    pub src: String,
    pub dst: String,
    pub payload: String,
    /// Protocol content, the figure the overhead formulas count.
    pub bytes: usize,
    pub framing: usize,
}

impl LedgerEntry {
    pub fn wire(&self) -> usize {
        self.bytes + self.framing
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkTotals {
    pub messages: Vec<usize>,
    pub total: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ByteLedger {
    entries: Vec<LedgerEntry>,
}

impl ByteLedger {
    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    fn record(&mut self, mut entry: LedgerEntry) {
        entry.index = self.entries.len() as u64;
        self.entries.push(entry);
    }

    pub fn link(&self, src: &str, dst: &str) -> impl Iterator<Item = &LedgerEntry> {
        let (src, dst) = (src.to_string(), dst.to_string());
        self.entries
            .iter()
            .filter(move |e| e.src == src && e.dst == dst)
    }

    pub fn link_total(&self, src: &str, dst: &str) -> usize {
        self.link(src, dst).map(|e| e.bytes).sum()
    }

    pub fn sent_by(&self, entity: &str) -> usize {
        self.entries
            .iter()
            .filter(|e| e.src == entity)
            .map(|e| e.bytes)
            .sum()
    }

    /// Ordered accounted sizes and their total per directed link.
    pub fn links(&self) -> BTreeMap<(String, String), LinkTotals> {
        let mut out: BTreeMap<(String, String), LinkTotals> = BTreeMap::new();
        for e in &self.entries {
            let link = out.entry((e.src.clone(), e.dst.clone())).or_default();
            link.messages.push(e.bytes);
            link.total += e.bytes;
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,time,src,dst,payload,bytes,framing,wire\n");
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                e.index,
                e.time,
                e.src,
                e.dst,
                e.payload,
                e.bytes,
                e.framing,
                e.wire()
            );
        }
        out
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryKind {
    /// Key provisioning before the first event.
    Setup,
    Step,
    Send,
    Deliver,
    Store,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub time: u64,
    pub entity: String,
    pub kind: EntryKind,
    /// Step id, or payload type for message entries.
    pub step: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ops: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peer: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bytes: Option<usize>,
}

impl TranscriptEntry {
    fn new(time: u64, entity: &str, kind: EntryKind, step: &str) -> TranscriptEntry {
        TranscriptEntry {
            time,
            entity: entity.to_string(),
            kind,
            step: step.to_string(),
            label: None,
            ops: None,
            peer: None,
            object: None,
            bytes: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoredObject {
    pub holder: String,
    pub object: Option<String>,
    pub payload: String,
    pub bytes: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub entity: String,
    pub name: String,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub time: u64,
    pub entity: String,
    pub step: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssertionResult {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

pub struct Entity {
    pub spec: EntitySpec,
    session: Session,
}

impl Entity {
    pub fn id(&self) -> &str {
        &self.spec.id
    }

    pub fn layer(&self) -> Layer {
        self.spec.layer
    }
}

enum Event {
    Step(usize),
    Deliver(Message),
    Summary(String),
}

struct Queued {
    time: u64,
    seq: u64,
    event: Event,
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        (self.time, self.seq) == (other.time, other.seq)
    }
}

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.time, self.seq).cmp(&(other.time, other.seq))
    }
}

/// Everything a protocol driver may touch. Entity sessions are reached only
/// through [`Core::step`], keyed by the acting entity.
pub(crate) struct Core {
    scenario: Scenario,
    params: PairingParams,
    rng: ChaCha20Rng,
    entities: BTreeMap<String, Entity>,
    queue: BinaryHeap<Reverse<Queued>>,
    seq: u64,
    now: u64,
    provisioning: bool,
    ledger: ByteLedger,
    transcript: Vec<TranscriptEntry>,
    hook: AuthHook,
    store: Vec<StoredObject>,
    outcomes: Vec<Outcome>,
    plaintexts: Vec<Vec<u8>>,
}

impl Core {
    pub(crate) fn params(&self) -> &PairingParams {
        &self.params
    }

    pub(crate) fn spec(&self, id: &str) -> Result<&EntitySpec, SimError> {
        self.entities
            .get(id)
            .map(|e| &e.spec)
            .ok_or_else(|| SimError::Topology(format!("unknown entity `{id}`")))
    }

    pub(crate) fn ids_where(&self, pred: impl Fn(&EntitySpec) -> bool) -> Vec<String> {
        self.entities
            .values()
            .filter(|e| pred(&e.spec))
            .map(|e| e.spec.id.clone())
            .collect()
    }

    pub(crate) fn first_cloud(&self) -> Result<String, SimError> {
        self.ids_where(|e| e.layer == Layer::Cloud)
            .into_iter()
            .next()
            .ok_or_else(|| SimError::Topology("no cloud entity".into()))
    }

    pub(crate) fn require_layer(&self, id: &str, layer: Layer, step: &str) -> Result<(), SimError> {
        let actual = self.spec(id)?.layer;
        if actual == layer {
            Ok(())
        } else {
            Err(protocol_err(
                id,
                step,
                format!("runs on the {layer:?} layer, entity is {actual:?}").to_lowercase(),
            ))
        }
    }

    /// Runs one protocol step on `entity`'s session and records it with the
    /// operations it cost.
    pub(crate) fn step<T, E: Display>(
        &mut self,
        entity: &str,
        id: &str,
        label: &str,
        f: impl FnOnce(&mut Session, &mut ChaCha20Rng) -> Result<T, E>,
    ) -> Result<T, SimError> {
        let ent = self
            .entities
            .get_mut(entity)
            .ok_or_else(|| SimError::Topology(format!("unknown entity `{entity}`")))?;
        let before = ent.session.ops();
        let out = f(&mut ent.session, &mut self.rng).map_err(|e| protocol_err(entity, label, e))?;
        let ops = ent.session.ops().since(&before);
        let kind = if self.provisioning {
            EntryKind::Setup
        } else {
            EntryKind::Step
        };
        let mut entry = TranscriptEntry::new(self.now, entity, kind, id);
        entry.label = Some(label.to_string());
        entry.ops = Some(ops.to_string());
        self.transcript.push(entry);
        Ok(out)
    }

    /// A fresh random target-group element drawn outside any entity's tally.
    pub(crate) fn fresh_gt(&mut self) -> GTElement {
        Session::new(&self.params).random_gt(&mut self.rng)
    }

    pub(crate) fn random_bytes(&mut self, len: usize) -> Vec<u8> {
        let mut out = vec![0u8; len];
        rand::RngCore::fill_bytes(&mut self.rng, &mut out);
        out
    }

    pub(crate) fn send(
        &mut self,
        src: &str,
        dst: &str,
        object: Option<&str>,
        subject: Option<&str>,
        payload: Payload,
    ) -> Result<(), SimError> {
        self.spec(dst)?;
        let kind = payload.kind();
        let meta = MessageMeta {
            src,
            dst,
            payload_type: kind,
        };
        if !(self.hook)(&meta) {
            return Err(SimError::Auth {
                src: src.into(),
                dst: dst.into(),
                payload: kind.into(),
            });
        }
        let (wire, framing) = payload.wire();
        self.ledger.record(LedgerEntry {
            index: 0,
            time: self.now,
            src: src.into(),
            dst: dst.into(),
            payload: kind.into(),
            bytes: wire.len() - framing,
            framing,
        });
        let mut entry = TranscriptEntry::new(self.now, src, EntryKind::Send, kind);
        entry.peer = Some(dst.into());
        entry.object = object.map(str::to_string);
        entry.bytes = Some(wire.len() - framing);
        self.transcript.push(entry);
        let msg = Message {
            src: src.into(),
            dst: dst.into(),
            object: object.map(str::to_string),
            subject: subject.map(str::to_string),
            payload,
        };
        let at = self.now + self.scenario.latency;
        self.schedule(at, Event::Deliver(msg));
        Ok(())
    }

    /// Cloud persistence; the stored bytes stay readable to the cloud.
    pub(crate) fn store(&mut self, holder: &str, object: Option<&str>, payload: &Payload) -> Result<(), SimError> {
        self.require_layer(holder, Layer::Cloud, "store")?;
        let (bytes, _) = payload.wire();
        let mut entry = TranscriptEntry::new(self.now, holder, EntryKind::Store, payload.kind());
        entry.object = object.map(str::to_string);
        entry.bytes = Some(bytes.len());
        self.transcript.push(entry);
        self.store.push(StoredObject {
            holder: holder.into(),
            object: object.map(str::to_string),
            payload: payload.kind().into(),
            bytes,
        });
        Ok(())
    }

    pub(crate) fn outcome(&mut self, entity: &str, name: &str, ok: bool) {
        self.outcomes.push(Outcome {
            entity: entity.into(),
            name: name.into(),
            ok,
        });
    }

    /// Registers plaintext that must never reach cloud storage.
    pub(crate) fn plaintext(&mut self, bytes: Vec<u8>) {
        if !bytes.is_empty() {
            self.plaintexts.push(bytes);
        }
    }

    fn schedule(&mut self, time: u64, event: Event) {
        let seq = self.seq;
        self.seq += 1;
        self.queue.push(Reverse(Queued { time, seq, event }));
    }
}

/// One of the four protocol flows.
pub(crate) trait Driver {
    /// Keys and public directories, before the first event.
    fn provision(&mut self, core: &mut Core) -> Result<(), SimError>;
    fn on_step(&mut self, core: &mut Core, step: &StepSpec) -> Result<(), SimError>;
    fn on_message(&mut self, core: &mut Core, msg: Message) -> Result<(), SimError>;
}

fn count_layer(sc: &Scenario, layer: Layer) -> usize {
    sc.entities.iter().filter(|e| e.layer == layer).count()
}

fn require(sc: &Scenario, ok: bool, what: &str) -> Result<(), SimError> {
    if ok {
        Ok(())
    } else {
        Err(SimError::Topology(format!(
            "{:?} scenario `{}` needs {what}",
            sc.protocol, sc.name
        )))
    }
}

fn check_topology(sc: &Scenario) -> Result<(), SimError> {
    let fogs_with = |role| {
        sc.entities
            .iter()
            .filter(|e| e.layer == Layer::Fog && e.has(role))
            .count()
    };
    let any_with = |role| sc.entities.iter().filter(|e| e.has(role)).count();
    for e in &sc.entities {
        if e.has(Role::Proxy) && e.layer != Layer::Fog {
            return Err(SimError::Topology(format!(
                "`{}` has the proxy role but is not a fog node",
                e.id
            )));
        }
        if e.summary_period.is_some() && e.layer != Layer::Fog {
            return Err(SimError::Topology(format!(
                "`{}` emits summaries but is not a fog node",
                e.id
            )));
        }
        if e.summary_period == Some(0) {
            return Err(SimError::Topology(format!("`{}` has a zero summary period", e.id)));
        }
    }
    if sc.entities.iter().any(|e| e.summary_period.is_some()) {
        require(sc, count_layer(sc, Layer::Cloud) >= 1, "a cloud to receive summaries")?;
    }
    match sc.protocol {
        Protocol::Aggregation => {
            require(sc, count_layer(sc, Layer::Perception) >= 1, "a perception device")?;
            require(sc, count_layer(sc, Layer::Fog) >= 1, "a fog node")?;
            require(sc, any_with(Role::Ta) <= 1, "at most one trusted authority")
        }
        Protocol::Sharing => {
            require(sc, fogs_with(Role::Proxy) >= 1, "a fog node with the proxy role")?;
            require(sc, any_with(Role::Pkg) == 1, "exactly one PKG")?;
            require(sc, any_with(Role::Sender) >= 1, "a sender")?;
            require(sc, any_with(Role::Receiver) >= 1, "a receiver")?;
            require(sc, count_layer(sc, Layer::Cloud) >= 1, "a cloud")
        }
        Protocol::AccessControl => {
            require(sc, any_with(Role::Authority) >= 1, "an attribute authority")?;
            require(sc, count_layer(sc, Layer::Fog) >= 1, "a fog node")?;
            require(sc, count_layer(sc, Layer::Cloud) >= 1, "a cloud")
        }
        Protocol::Computation => {
            require(sc, fogs_with(Role::Proxy) >= 2, "two fog nodes with the proxy role")?;
            require(sc, count_layer(sc, Layer::Cloud) >= 1, "a cloud")?;
            require(sc, any_with(Role::Ta) <= 1, "at most one trusted authority")
        }
    }
}

/// A built topology, ready to run.
pub struct Simulation {
    core: Core,
    driver: Box<dyn Driver>,
}

impl Simulation {
    /// Enrolls every entity and provisions keys through each protocol's
    /// setup flow.
    pub fn build(scenario: Scenario) -> Result<Simulation, SimError> {
        check_topology(&scenario)?;
        let seed_label = format!("fogsim/{}/{}", scenario.name, scenario.seed);
        let params = setup_pairing(scenario.backend, seed_label.as_bytes())
            .map_err(|e| SimError::Setup(e.to_string()))?;
        let entities = scenario
            .entities
            .iter()
            .map(|spec| {
                let ent = Entity {
                    spec: spec.clone(),
                    session: Session::new(&params),
                };
                (spec.id.clone(), ent)
            })
            .collect();
        let mut core = Core {
            rng: ChaCha20Rng::seed_from_u64(scenario.seed),
            scenario,
            params,
            entities,
            queue: BinaryHeap::new(),
            seq: 0,
            now: 0,
            provisioning: true,
            ledger: ByteLedger::default(),
            transcript: Vec::new(),
            hook: Box::new(|_| true),
            store: Vec::new(),
            outcomes: Vec::new(),
            plaintexts: Vec::new(),
        };
        let mut driver: Box<dyn Driver> = match core.scenario.protocol {
            Protocol::Aggregation => Box::new(aggregation::Aggregation::default()),
            Protocol::Sharing => Box::new(sharing::Sharing::default()),
            Protocol::AccessControl => Box::new(access::AccessControl::default()),
            Protocol::Computation => Box::new(computation::Computation::default()),
        };
        driver.provision(&mut core)?;
        core.provisioning = false;
        Ok(Simulation { core, driver })
    }

    /// Replaces the default allow-all hook.
    pub fn set_auth_hook(&mut self, hook: AuthHook) {
        self.core.hook = hook;
    }

    pub fn entities(&self) -> impl Iterator<Item = &Entity> {
        self.core.entities.values()
    }

    pub fn run(mut self) -> SimReport {
        let core = &mut self.core;
        let steps = core.scenario.steps.clone();
        let mut order: Vec<usize> = (0..steps.len()).collect();
        order.sort_by_key(|i| steps[*i].at);
        for i in order {
            core.schedule(steps[i].at, Event::Step(i));
        }
        let horizon = core
            .scenario
            .horizon
            .unwrap_or_else(|| steps.iter().map(|s| s.at).max().unwrap_or(0));
        let periodic: Vec<(String, u64)> = core
            .entities
            .values()
            .filter_map(|e| e.spec.summary_period.map(|p| (e.spec.id.clone(), p)))
            .collect();
        for (id, period) in periodic {
            let mut t = period;
            while t <= horizon {
                core.schedule(t, Event::Summary(id.clone()));
                t += period;
            }
        }

        let mut failure = None;
        while let Some(Reverse(q)) = core.queue.pop() {
            core.now = q.time;
            let result = match q.event {
                Event::Step(i) => self.driver.on_step(core, &steps[i]),
                Event::Deliver(msg) => {
                    let mut entry =
                        TranscriptEntry::new(core.now, &msg.dst, EntryKind::Deliver, msg.payload.kind());
                    entry.peer = Some(msg.src.clone());
                    entry.object = msg.object.clone();
                    core.transcript.push(entry);
                    match msg.payload {
                        Payload::Summary(_) => {
                            let dst = msg.dst.clone();
                            core.store(&dst, None, &msg.payload)
                        }
                        _ => self.driver.on_message(core, msg),
                    }
                }
                Event::Summary(id) => send_summary(core, &id),
            };
            if let Err(e) = result {
                failure = Some(failure_of(core.now, e));
                break;
            }
        }

        let mut report = SimReport {
            scenario: core.scenario.name.clone(),
            seed: core.scenario.seed,
            counters: core
                .entities
                .iter()
                .map(|(id, e)| (id.clone(), e.session.ops()))
                .collect(),
            ledger: std::mem::take(&mut core.ledger),
            transcript: std::mem::take(&mut core.transcript),
            outcomes: std::mem::take(&mut core.outcomes),
            store: std::mem::take(&mut core.store),
            assertions: Vec::new(),
            failure,
            plaintexts: std::mem::take(&mut core.plaintexts),
        };
        report.assertions = core
            .scenario
            .asserts
            .iter()
            .map(|a| evaluate(a, &report))
            .collect();
        report
    }
}

fn send_summary(core: &mut Core, id: &str) -> Result<(), SimError> {
    let cloud = core.first_cloud()?;
    let body = core.random_bytes(core.scenario.summary_bytes);
    core.send(id, &cloud, None, None, Payload::Summary(body))
}

fn failure_of(time: u64, e: SimError) -> Failure {
    match e {
        SimError::Protocol {
            entity,
            step,
            reason,
        } => Failure {
            time,
            entity,
            step,
            reason,
        },
        SimError::Auth { src, dst, payload } => Failure {
            time,
            reason: format!("authentication hook denied {payload} to {dst}"),
            entity: src,
            step: format!("send {payload}"),
        },
        other => Failure {
            time,
            entity: String::new(),
            step: String::new(),
            reason: other.to_string(),
        },
    }
}

/// Ledger, per-entity counters, transcript and assertion results of one run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimReport {
    pub scenario: String,
    pub seed: u64,
    pub ledger: ByteLedger,
    pub counters: BTreeMap<String, OpCounter>,
    pub transcript: Vec<TranscriptEntry>,
    pub outcomes: Vec<Outcome>,
    pub store: Vec<StoredObject>,
    pub assertions: Vec<AssertionResult>,
    pub failure: Option<Failure>,
    #[serde(skip)]
    plaintexts: Vec<Vec<u8>>,
}

impl SimReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none() && self.assertions.iter().all(|a| a.passed)
    }

    pub fn transcript_jsonl(&self) -> String {
        self.transcript
            .iter()
            .map(|e| serde_json::to_string(e).expect("transcript entry serializes") + "\n")
            .collect()
    }

    pub fn counters_json(&self) -> String {
        serde_json::to_string_pretty(&self.counters).expect("counters serialize")
    }

    /// Step ids in execution order, setup excluded.
    pub fn steps(&self) -> Vec<&str> {
        self.transcript
            .iter()
            .filter(|e| e.kind == EntryKind::Step)
            .map(|e| e.step.as_str())
            .collect()
    }

    /// Operation counts of every run of step `id` at `entity`.
    pub fn step_ops(&self, entity: &str, id: &str) -> Vec<OpCounter> {
        self.transcript
            .iter()
            .filter(|e| e.kind == EntryKind::Step && e.entity == entity && e.step == id)
            .filter_map(|e| e.ops.as_deref()?.parse().ok())
            .collect()
    }

    pub fn outcome(&self, entity: &str, name: &str) -> Option<bool> {
        self.outcomes
            .iter()
            .rev()
            .find(|o| o.entity == entity && o.name == name)
            .map(|o| o.ok)
    }

    /// Plaintexts found inside cloud-stored bytes, as (object, payload type).
    pub fn cloud_plaintext_leaks(&self) -> Vec<(Option<String>, String)> {
        self.store
            .iter()
            .filter(|s| {
                self.plaintexts
                    .iter()
                    .any(|p| s.bytes.windows(p.len()).any(|w| w == p.as_slice()))
            })
            .map(|s| (s.object.clone(), s.payload.clone()))
            .collect()
    }

    /// Number of distinct plaintexts the leak check looks for.
    pub fn tracked_plaintexts(&self) -> usize {
        self.plaintexts.iter().collect::<BTreeSet<_>>().len()
    }

    pub fn summary(&self) -> String {
        let mut out = format!("scenario {} (seed {})\n", self.scenario, self.seed);
        if let Some(f) = &self.failure {
            let _ = writeln!(out, "FAILED at t={} {} `{}`: {}", f.time, f.entity, f.step, f.reason);
        }
        for a in &self.assertions {
            let mark = if a.passed { "ok  " } else { "FAIL" };
            let _ = writeln!(out, "{mark} {}: {}", a.check, a.detail);
        }
        out
    }
}

impl fmt::Display for SimReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.summary())
    }
}

fn check(check: String, passed: bool, detail: String) -> AssertionResult {
    AssertionResult {
        check,
        passed,
        detail,
    }
}

fn evaluate(spec: &AssertSpec, r: &SimReport) -> AssertionResult {
    let matches = |want: &Option<String>, have: &str| want.as_deref().is_none_or(|w| w == have);
    match spec {
        AssertSpec::LinkBytes {
            src,
            dst,
            payload,
            equals,
        } => {
            let got: usize = r
                .ledger
                .link(src, dst)
                .filter(|e| matches(payload, &e.payload))
                .map(|e| e.bytes)
                .sum();
            check(
                format!("link-bytes {src}->{dst}"),
                got as u64 == *equals,
                format!("{got} bytes, expected {equals}"),
            )
        }
        AssertSpec::SentBytes {
            entity,
            payload,
            equals,
        } => {
            let got: usize = r
                .ledger
                .entries()
                .iter()
                .filter(|e| e.src == *entity && matches(payload, &e.payload))
                .map(|e| e.bytes)
                .sum();
            check(
                format!("sent-bytes {entity}"),
                got as u64 == *equals,
                format!("{got} bytes, expected {equals}"),
            )
        }
        AssertSpec::MessageCount {
            src,
            dst,
            payload,
            equals,
        } => {
            let got = r
                .ledger
                .entries()
                .iter()
                .filter(|e| matches(src, &e.src) && matches(dst, &e.dst) && matches(payload, &e.payload))
                .count();
            check(
                "message-count".into(),
                got as u64 == *equals,
                format!("{got} messages, expected {equals}"),
            )
        }
        AssertSpec::StepOps { entity, step, ops } => {
            let name = format!("step-ops {entity} {step}");
            let want: OpCounter = match ops.parse() {
                Ok(w) => w,
                Err(e) => return check(name, false, e),
            };
            let runs = r.step_ops(entity, step);
            let ok = !runs.is_empty() && runs.iter().all(|c| *c == want);
            let seen: Vec<String> = runs.iter().map(OpCounter::to_string).collect();
            check(name, ok, format!("[{}], expected {want}", seen.join(", ")))
        }
        AssertSpec::StepOrder { steps } => {
            let actual = r.steps();
            let mut it = actual.iter();
            let ok = steps.iter().all(|s| it.any(|a| a == s));
            check(
                "step-order".into(),
                ok,
                format!("expected subsequence {steps:?} of {actual:?}"),
            )
        }
        AssertSpec::Outcome { entity, name } => {
            let got = r.outcome(entity, name);
            check(
                format!("outcome {entity} {name}"),
                got == Some(true),
                match got {
                    None => "never recorded".into(),
                    Some(v) => v.to_string(),
                },
            )
        }
        AssertSpec::NoPlaintextInCloud => {
            let leaks = r.cloud_plaintext_leaks();
            check(
                "no-plaintext-in-cloud".into(),
                leaks.is_empty() && r.tracked_plaintexts() > 0,
                format!(
                    "{} stored objects, {} tracked plaintexts, leaks {leaks:?}",
                    r.store.len(),
                    r.tracked_plaintexts()
                ),
            )
        }
    }
}

/// Builds and runs a bundled scenario under `seed`.
pub fn run_builtin(name: &str, seed: Option<u64>) -> Result<SimReport, SimError> {
    let mut sc = Scenario::builtin(name)
        .ok_or_else(|| SimError::Scenario(format!("unknown scenario `{name}`")))?;
    if let Some(seed) = seed {
        sc.seed = seed;
    }
    Ok(Simulation::build(sc)?.run())
}
