//! Owner devices prepare intermediate ciphertexts offline; their fog node
//! fixes the access policy and stores the result in the cloud. Requesters
//! hand a blinded key to their own fog node, which downloads and partially
//! decrypts.

use std::collections::{BTreeMap, VecDeque};

use super::{kem, protocol_err, Core, Driver, Layer, Message, Payload, Role, SimError, StepSpec};
use crate::lsss::Policy;
use crate::mabe::{
    authority_setup, full_decrypt, full_encrypt, intermediate_encrypt, keygen_user,
    partial_decrypt, transform_key, AttributeDirectory, AuthorityKeys, DeviceUpload, MabeError,
    PartialCiphertext, TransformedKey, UserAttrKey,
};
use crate::pairing::Scalar;

#[derive(Default)]
struct Pending {
    partial: Option<PartialCiphertext>,
    body: Option<Vec<u8>>,
}

type Key = (String, String);

#[derive(Default)]
pub(crate) struct AccessControl {
    authorities: BTreeMap<String, AuthorityKeys>,
    directory: AttributeDirectory,
    /// Requester-held attribute keys and key-transformation blinds.
    user_keys: BTreeMap<String, UserAttrKey>,
    blinds: BTreeMap<Key, Scalar>,
    /// Fog configuration: the policy to apply per (fog, object).
    policies: BTreeMap<Key, Policy>,
    /// Fog state: requesters waiting on a download, with their blinded keys.
    waiting: BTreeMap<Key, VecDeque<(String, TransformedKey)>>,
    body_to: BTreeMap<Key, VecDeque<String>>,
    /// Cloud storage by object.
    stored_ct: BTreeMap<String, Payload>,
    stored_body: BTreeMap<String, Payload>,
    inbox: BTreeMap<Key, Pending>,
    truth: BTreeMap<String, Vec<u8>>,
}

impl Driver for AccessControl {
    fn provision(&mut self, core: &mut Core) -> Result<(), SimError> {
        for id in core.ids_where(|e| e.has(Role::Authority)) {
            let attrs = core.spec(&id)?.attributes.clone();
            let names: Vec<&str> = attrs.iter().map(String::as_str).collect();
            let keys = core.step(&id, "authority-setup", "Authority Setup", |s, rng| {
                authority_setup(s, rng, &id, &names)
            })?;
            self.directory
                .register(&keys)
                .map_err(|e| SimError::Topology(format!("authority {id}: {e}")))?;
            self.authorities.insert(id, keys);
        }
        let users = core.ids_where(|e| !e.has(Role::Authority) && !e.attributes.is_empty());
        for user in users {
            let mut by_authority: BTreeMap<String, Vec<String>> = BTreeMap::new();
            for attr in &core.spec(&user)?.attributes {
                let auth = self.directory.authority_of(attr).ok_or_else(|| {
                    SimError::Topology(format!("no authority controls `{attr}` held by {user}"))
                })?;
                by_authority.entry(auth.to_string()).or_default().push(attr.clone());
            }
            let mut merged: Option<UserAttrKey> = None;
            for (auth_id, attrs) in by_authority {
                let auth = &self.authorities[&auth_id];
                let names: Vec<&str> = attrs.iter().map(String::as_str).collect();
                let key = core.step(&auth_id, "keygen", "Key Generation", |s, _| {
                    keygen_user(s, auth, user.as_bytes(), &names)
                })?;
                merged = Some(match merged {
                    None => key,
                    Some(m) => m.merge(key),
                });
            }
            if let Some(k) = merged {
                self.user_keys.insert(user, k);
            }
        }
        Ok(())
    }

    fn on_step(&mut self, core: &mut Core, step: &StepSpec) -> Result<(), SimError> {
        match step.action.as_str() {
            "upload" => self.upload(core, step),
            "request" => self.request(core, step),
            other => Err(SimError::Scenario(format!("access control has no action `{other}`"))),
        }
    }

    fn on_message(&mut self, core: &mut Core, msg: Message) -> Result<(), SimError> {
        let object = msg
            .object
            .clone()
            .ok_or_else(|| protocol_err(&msg.dst, "receive", "message carries no object id"))?;
        match core.spec(&msg.dst)?.layer {
            Layer::Fog => self.at_fog(core, msg, object),
            Layer::Cloud => self.at_cloud(core, msg, object),
            _ => self.at_requester(core, msg, object),
        }
    }
}

impl AccessControl {
    fn upload(&mut self, core: &mut Core, step: &StepSpec) -> Result<(), SimError> {
        let owner = step.entity.as_str();
        let fog = step.str("to")?;
        let object = step.str("object")?;
        let attrs = step.strs("attrs")?;
        let policy: Policy = step
            .str("policy")?
            .parse()
            .map_err(|e| SimError::Scenario(format!("policy for {object}: {e}")))?;
        let body = match step.opt_str("payload")? {
            Some(text) => text.as_bytes().to_vec(),
            None => {
                let len = step.u64_or("msg_size", 100)? as usize;
                core.random_bytes(len)
            }
        };
        let d = core.fresh_gt();
        core.plaintext(body.clone());
        core.plaintext(d.to_bytes());
        self.truth.insert(object.to_string(), body.clone());
        self.policies.insert((fog.to_string(), object.to_string()), policy);

        let dir = &self.directory;
        let (slots, states) = core.step(owner, "intermediate-encrypt", "Intermediate Encryption", |s, rng| {
            intermediate_encrypt(s, rng, &attrs, dir)
        })?;
        let sealed = kem::seal(&d, &body);
        let upload = DeviceUpload { d, slots, states };
        core.send(owner, fog, Some(object), None, Payload::MabeUpload(upload))?;
        core.send(owner, fog, Some(object), None, Payload::Sealed(sealed))
    }

    fn request(&mut self, core: &mut Core, step: &StepSpec) -> Result<(), SimError> {
        let user = step.entity.as_str();
        let fog = step.str("via")?;
        let object = step.str("object")?;
        let uk = self
            .user_keys
            .get(user)
            .cloned()
            .ok_or_else(|| protocol_err(user, "Key Transformation", "holds no attribute keys"))?;
        let (tk, r) = core.step(user, "key-transform", "Key Transformation", |s, rng| {
            transform_key(s, rng, &uk)
        })?;
        self.blinds.insert((user.to_string(), object.to_string()), r);
        core.send(user, fog, Some(object), None, Payload::TransformedKey(tk))
    }

    fn at_fog(&mut self, core: &mut Core, msg: Message, object: String) -> Result<(), SimError> {
        let fog = msg.dst.clone();
        let key = (fog.clone(), object.clone());
        let from_cloud = core.spec(&msg.src)?.layer == Layer::Cloud;
        let cloud = core.first_cloud()?;
        match msg.payload {
            Payload::MabeUpload(up) => {
                let policy = self
                    .policies
                    .get(&key)
                    .cloned()
                    .ok_or_else(|| protocol_err(&fog, "Full Encrypt", format!("no policy for {object}")))?;
                let ct = core.step(&fog, "full-encrypt", "Full Encrypt", |s, rng| {
                    full_encrypt(s, rng, &up.d, &up.slots, &up.states, &policy)
                })?;
                core.send(&fog, &cloud, Some(&object), None, Payload::MabeCiphertext(ct))
            }
            Payload::Sealed(body) if !from_cloud => {
                core.send(&fog, &cloud, Some(&object), None, Payload::Sealed(body))
            }
            Payload::Sealed(body) => {
                let user = self
                    .body_to
                    .get_mut(&key)
                    .and_then(VecDeque::pop_front)
                    .ok_or_else(|| protocol_err(&fog, "download", "unrequested body"))?;
                core.send(&fog, &user, Some(&object), None, Payload::Sealed(body))
            }
            Payload::TransformedKey(tk) => {
                self.waiting
                    .entry(key)
                    .or_default()
                    .push_back((msg.src.clone(), tk));
                core.send(&fog, &cloud, Some(&object), None, Payload::DataRequest(object.clone()))
            }
            Payload::MabeCiphertext(ct) => {
                let (user, tk) = self
                    .waiting
                    .get_mut(&key)
                    .and_then(VecDeque::pop_front)
                    .ok_or_else(|| protocol_err(&fog, "Partial Decryption", "no waiting requester"))?;
                self.body_to.entry(key).or_default().push_back(user.clone());
                let result = core.step(&fog, "partial-decrypt", "Partial Decryption", |s, _| {
                    match partial_decrypt(s, &ct, &tk) {
                        Err(MabeError::PolicyUnsatisfied) => Ok(None),
                        other => other.map(Some),
                    }
                })?;
                let payload = match result {
                    Some(pct) => Payload::PartialCiphertext(pct),
                    None => Payload::AccessDenied(object.clone()),
                };
                core.send(&fog, &user, Some(&object), None, payload)
            }
            other => Err(protocol_err(&fog, "receive", format!("unexpected {}", other.kind()))),
        }
    }

    fn at_cloud(&mut self, core: &mut Core, msg: Message, object: String) -> Result<(), SimError> {
        let cloud = msg.dst.clone();
        match msg.payload {
            p @ Payload::MabeCiphertext(_) => {
                core.store(&cloud, Some(&object), &p)?;
                self.stored_ct.insert(object, p);
                Ok(())
            }
            p @ Payload::Sealed(_) => {
                core.store(&cloud, Some(&object), &p)?;
                self.stored_body.insert(object, p);
                Ok(())
            }
            Payload::DataRequest(_) => {
                let ct = self
                    .stored_ct
                    .get(&object)
                    .cloned()
                    .ok_or_else(|| protocol_err(&cloud, "download", format!("no object {object}")))?;
                core.send(&cloud, &msg.src, Some(&object), None, ct)?;
                if let Some(body) = self.stored_body.get(&object).cloned() {
                    core.send(&cloud, &msg.src, Some(&object), None, body)?;
                }
                Ok(())
            }
            other => Err(protocol_err(&cloud, "receive", format!("unexpected {}", other.kind()))),
        }
    }

    fn at_requester(&mut self, core: &mut Core, msg: Message, object: String) -> Result<(), SimError> {
        let user = msg.dst.clone();
        let key = (user.clone(), object.clone());
        let slot = self.inbox.entry(key.clone()).or_default();
        match msg.payload {
            Payload::PartialCiphertext(p) => slot.partial = Some(p),
            Payload::Sealed(b) => slot.body = Some(b),
            Payload::AccessDenied(_) => {
                self.inbox.remove(&key);
                self.blinds.remove(&key);
                core.outcome(&user, "access-denied", true);
                return Ok(());
            }
            other => return Err(protocol_err(&user, "receive", format!("unexpected {}", other.kind()))),
        }
        if slot.partial.is_none() || slot.body.is_none() {
            return Ok(());
        }
        let Pending { partial, body } = self.inbox.remove(&key).expect("slot present");
        let (pct, body) = (partial.expect("checked"), body.expect("checked"));
        let r = self
            .blinds
            .remove(&key)
            .ok_or_else(|| protocol_err(&user, "Full Decryption", "no blind for this request"))?;
        let d = core.step(&user, "full-decrypt", "Full Decryption", |s, _| full_decrypt(s, &pct, &r))?;
        let opened = kem::open(&d, &body);
        let ok = opened.is_some() && opened == self.truth.get(&object).cloned();
        core.outcome(&user, "plaintext-match", ok);
        Ok(())
    }
}
