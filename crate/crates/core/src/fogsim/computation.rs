//! Two proxy fog nodes in different plants. The owner uploads encrypted
//! readings; a requester's query is forwarded by the cloud to the owner,
//! which evaluates, re-encrypts toward the requester, evaluates once more
//! under the requester's key and returns the result through the cloud.
//!
//! Readings are encoded as `Z^v` so that ciphertext products add exponents;
//! the requester recovers the sum by a bounded search.

use std::collections::BTreeMap;

use super::{protocol_err, Core, Driver, Layer, Message, Payload, Role, SimError, StepSpec};
use crate::homo::{
    decrypt, encrypt, eval_mul, evaluate, keygen, reencrypt, rekeygen, EvalOp, HomoCiphertext,
    HomoKeyPair, HomoPublicKey, Level, Query,
};
use crate::pairing::{GTElement, PairingParams, Session};

/// Largest exponent the requester searches for when decoding a result.
pub const DECODE_LIMIT: u64 = 1 << 16;

pub(crate) fn encode_value(params: &PairingParams, v: u64) -> GTElement {
    let mut s = Session::new(params);
    let k = s.scalars().from_u64(v);
    s.gt_exp(params.gt_generator(), &k).expect("generator power")
}

pub(crate) fn decode_value(params: &PairingParams, m: &GTElement, limit: u64) -> Option<u64> {
    let mut s = Session::new(params);
    let z = params.gt_generator().clone();
    let mut acc = params.gt_identity();
    for v in 0..=limit {
        if acc == *m {
            return Some(v);
        }
        acc = s.gt_mul(&acc, &z).ok()?;
    }
    None
}

/// Program text: `MUL <operand index>` or `MUL_CONST <value>`.
fn parse_op(params: &PairingParams, text: &str) -> Result<(EvalOp, Option<u64>, Option<usize>), SimError> {
    let bad = || SimError::Scenario(format!("bad program step `{text}`"));
    let mut parts = text.split_whitespace();
    let (op, arg) = (parts.next().ok_or_else(bad)?, parts.next().ok_or_else(bad)?);
    if parts.next().is_some() {
        return Err(bad());
    }
    let n: u64 = arg.parse().map_err(|_| bad())?;
    match op {
        "MUL" => Ok((EvalOp::Mul(n as usize), None, Some(n as usize))),
        "MUL_CONST" => Ok((EvalOp::MulConst(encode_value(params, n)), Some(n), None)),
        _ => Err(bad()),
    }
}

struct StoredCt {
    owner: String,
    payload: Payload,
}

#[derive(Default)]
pub(crate) struct Computation {
    keys: BTreeMap<String, HomoKeyPair>,
    directory: BTreeMap<String, HomoPublicKey>,
    truth: BTreeMap<String, u64>,
    /// Cloud state.
    stored: BTreeMap<String, StoredCt>,
    /// Owner state: ciphertexts forwarded for a requester's query.
    forwarded: BTreeMap<(String, String), Vec<HomoCiphertext>>,
    /// Owner-side analysis applied after re-encryption, per requester.
    analysis: BTreeMap<(String, String), u64>,
    /// Result exponent each query should yield, from the plaintext side.
    expected: BTreeMap<String, u64>,
}

impl Driver for Computation {
    fn provision(&mut self, core: &mut Core) -> Result<(), SimError> {
        if let Some(ta) = core.ids_where(|e| e.has(Role::Ta)).into_iter().next() {
            core.step(&ta, "setup", "Setup", |_, _| Ok::<_, SimError>(()))?;
        }
        for id in core.ids_where(|e| e.layer == Layer::Fog && e.has(Role::Proxy)) {
            let kp = core.step(&id, "keygen", "Key Generation", keygen)?;
            self.directory.insert(id.clone(), kp.public.clone());
            self.keys.insert(id, kp);
        }
        Ok(())
    }

    fn on_step(&mut self, core: &mut Core, step: &StepSpec) -> Result<(), SimError> {
        match step.action.as_str() {
            "upload" => self.upload(core, step),
            "query" => self.query(core, step),
            other => Err(SimError::Scenario(format!("computation has no action `{other}`"))),
        }
    }

    fn on_message(&mut self, core: &mut Core, msg: Message) -> Result<(), SimError> {
        match core.spec(&msg.dst)?.layer {
            Layer::Cloud => self.at_cloud(core, msg),
            Layer::Fog => self.at_fog(core, msg),
            _ => Err(protocol_err(&msg.dst, "receive", "not part of this flow")),
        }
    }
}

impl Computation {
    fn proxy_keys(&self, core: &Core, id: &str, step: &str) -> Result<HomoKeyPair, SimError> {
        core.require_layer(id, Layer::Fog, step)?;
        self.keys
            .get(id)
            .cloned()
            .ok_or_else(|| protocol_err(id, step, "not a proxy fog node"))
    }

    fn upload(&mut self, core: &mut Core, step: &StepSpec) -> Result<(), SimError> {
        let owner = step.entity.as_str();
        let object = step.str("object")?;
        let value = step.u64("value")?;
        let cloud = match step.opt_str("cloud")? {
            Some(c) => c.to_string(),
            None => core.first_cloud()?,
        };
        let kp = self.proxy_keys(core, owner, "Upload Encrypted Data")?;
        let m = encode_value(core.params(), value);
        core.plaintext(m.to_bytes());
        self.truth.insert(object.to_string(), value);
        let ct = core.step(owner, "upload", "Upload Encrypted Data", |s, rng| {
            encrypt(s, rng, &m, &kp.public, Level::Second)
        })?;
        core.send(owner, &cloud, Some(object), None, Payload::HomoCiphertext(ct))
    }

    fn query(&mut self, core: &mut Core, step: &StepSpec) -> Result<(), SimError> {
        let requester = step.entity.as_str();
        let query_id = step.opt_str("query")?.unwrap_or("query-1");
        let owner = step.str("owner")?;
        let objects: Vec<String> = step.strs("objects")?.into_iter().map(String::from).collect();
        let extra = step.strs("operands")?;
        let factor = step.u64_or("transformed_factor", 0)?;
        let cloud = match step.opt_str("cloud")? {
            Some(c) => c.to_string(),
            None => core.first_cloud()?,
        };
        self.proxy_keys(core, requester, "Query")?;
        let owner_pk = self
            .directory
            .get(owner)
            .cloned()
            .ok_or_else(|| protocol_err(requester, "Query", format!("{owner} has no public key")))?;
        if objects.is_empty() {
            return Err(SimError::Scenario("query names no objects".into()));
        }

        // Plaintext-side value of every operand, stored objects first.
        let mut values = Vec::new();
        for o in &objects {
            let v = *self
                .truth
                .get(o)
                .ok_or_else(|| SimError::Scenario(format!("query on unknown object `{o}`")))?;
            values.push(v);
        }
        let mut extra_values = Vec::new();
        for e in &extra {
            let v: u64 = e
                .parse()
                .map_err(|_| SimError::Scenario(format!("operand `{e}` is not a number")))?;
            extra_values.push(v);
        }
        values.extend(&extra_values);
        let mut program = Vec::new();
        let mut expect = values[0];
        for text in step.strs("program")? {
            let (op, constant, index) = parse_op(core.params(), text)?;
            match (constant, index) {
                (Some(c), _) => expect += c,
                (_, Some(i)) => {
                    expect += values.get(i).copied().ok_or_else(|| {
                        SimError::Scenario(format!("`{text}` refers past {} operands", values.len()))
                    })?
                }
                _ => unreachable!("every op has an argument"),
            }
            program.push(op);
        }
        expect += factor;
        self.expected.insert(query_id.to_string(), expect);
        self.analysis
            .insert((owner.to_string(), requester.to_string()), factor);

        let encoded: Vec<GTElement> = extra_values
            .iter()
            .map(|v| encode_value(core.params(), *v))
            .collect();
        for m in &encoded {
            core.plaintext(m.to_bytes());
        }
        let operands = core.step(requester, "query", "Query", |s, rng| {
            encoded
                .iter()
                .map(|m| encrypt(s, rng, m, &owner_pk, Level::Second))
                .collect::<Result<Vec<_>, _>>()
        })?;
        let payload = Payload::HomoQuery {
            objects,
            operands,
            program,
        };
        core.send(requester, &cloud, Some(query_id), Some(requester), payload)
    }

    fn at_cloud(&mut self, core: &mut Core, msg: Message) -> Result<(), SimError> {
        let cloud = msg.dst.clone();
        let object = msg
            .object
            .clone()
            .ok_or_else(|| protocol_err(&cloud, "receive", "message carries no object id"))?;
        match (msg.payload, msg.subject) {
            (p @ Payload::HomoCiphertext(_), None) => {
                core.store(&cloud, Some(&object), &p)?;
                self.stored.insert(
                    object,
                    StoredCt {
                        owner: msg.src.clone(),
                        payload: p,
                    },
                );
                Ok(())
            }
            (p @ Payload::HomoCiphertext(_), Some(requester)) => {
                core.store(&cloud, Some(&object), &p)?;
                core.step(&cloud, "reply", "Reply", |_, _| Ok::<_, SimError>(()))?;
                core.send(&cloud, &requester, Some(&object), None, p)
            }
            (
                Payload::HomoQuery {
                    objects,
                    operands,
                    program,
                },
                Some(requester),
            ) => {
                let mut owner = None;
                for o in &objects {
                    let stored = self
                        .stored
                        .get(o)
                        .ok_or_else(|| protocol_err(&cloud, "forward query", format!("no object {o}")))?;
                    if owner.get_or_insert_with(|| stored.owner.clone()) != &stored.owner {
                        return Err(protocol_err(&cloud, "forward query", "objects span several owners"));
                    }
                    let ct = stored.payload.clone();
                    core.send(&cloud, &stored.owner, Some(&object), Some(&requester), ct)?;
                }
                let owner = owner.expect("query names at least one object");
                let prog = Payload::EvalProgram { operands, program };
                core.send(&cloud, &owner, Some(&object), Some(&requester), prog)
            }
            (other, _) => Err(protocol_err(&cloud, "receive", format!("unexpected {}", other.kind()))),
        }
    }

    fn at_fog(&mut self, core: &mut Core, msg: Message) -> Result<(), SimError> {
        let fog = msg.dst.clone();
        let object = msg.object.clone().unwrap_or_default();
        match (msg.payload, msg.subject) {
            (Payload::HomoCiphertext(ct), Some(requester)) => {
                self.forwarded.entry((fog, requester)).or_default().push(ct);
                Ok(())
            }
            (Payload::EvalProgram { operands, program }, Some(requester)) => {
                self.evaluate_for(core, &fog, &requester, &object, operands, program)
            }
            (Payload::HomoCiphertext(ct), None) => self.decrypt_result(core, &fog, &object, ct),
            (other, _) => Err(protocol_err(&fog, "receive", format!("unexpected {}", other.kind()))),
        }
    }

    fn evaluate_for(
        &mut self,
        core: &mut Core,
        owner: &str,
        requester: &str,
        query_id: &str,
        extra: Vec<HomoCiphertext>,
        program: Vec<EvalOp>,
    ) -> Result<(), SimError> {
        let kp = self.proxy_keys(core, owner, "Computation on Encrypted Data")?;
        let target = self
            .directory
            .get(requester)
            .cloned()
            .ok_or_else(|| protocol_err(owner, "Re-Encryption Key Generation", format!("{requester} unknown")))?;
        let mut operands = self
            .forwarded
            .remove(&(owner.to_string(), requester.to_string()))
            .unwrap_or_default();
        operands.extend(extra);
        let query = Query { operands, program };
        let res = core.step(owner, "eval", "Computation on Encrypted Data", |s, rng| {
            evaluate(s, rng, &query, &kp.public)
        })?;
        let rk = core.step(owner, "rkgen", "Re-Encryption Key Generation", |s, _| {
            rekeygen(s, kp.secret(), &target.pk2)
        })?;
        let transformed = core.step(owner, "reencrypt", "Re-Encryption", |s, _| reencrypt(s, &res, &rk))?;
        let factor = self
            .analysis
            .get(&(owner.to_string(), requester.to_string()))
            .copied()
            .unwrap_or(0);
        let m = encode_value(core.params(), factor);
        let result = core.step(owner, "eval-on-transformed", "Computation on Transformed Result", |s, rng| {
            let fresh = encrypt(s, rng, &m, &target, Level::First)?;
            eval_mul(s, rng, &transformed, &fresh, &target)
        })?;
        let cloud = core.first_cloud()?;
        core.send(owner, &cloud, Some(query_id), Some(requester), Payload::HomoCiphertext(result))
    }

    fn decrypt_result(&mut self, core: &mut Core, fog: &str, query_id: &str, ct: HomoCiphertext) -> Result<(), SimError> {
        let kp = self.proxy_keys(core, fog, "Decryption")?;
        let m = core.step(fog, "decrypt", "Decryption", |s, _| decrypt(s, &ct, kp.secret()))?;
        let got = decode_value(core.params(), &m, DECODE_LIMIT);
        let want = self.expected.get(query_id).copied();
        core.outcome(fog, "result-match", got.is_some() && got == want);
        Ok(())
    }
}
