//! Sender encrypts once and delegates to each receiver; a proxy fog node
//! stores the original ciphertext in the cloud and re-encrypts per receiver.
//! The bulk body travels sealed under the message element.

use std::collections::BTreeMap;

use super::{kem, protocol_err, Core, Driver, Layer, Message, Payload, Role, SimError, StepSpec};
use crate::clpre::{
    decrypt, encrypt, extract_partial_key, pkg_setup, reencrypt, rekeygen, user_keygen,
    ClpreCiphertext, ClpreUserKeys, ReEncCiphertext, ReEncKey, ReceiverPub,
    UploadMessage,
};

#[derive(Default)]
struct Inbox {
    delivery: Option<ReEncCiphertext>,
    body: Option<Vec<u8>>,
}

#[derive(Default)]
pub(crate) struct Sharing {
    /// Each member's own key material.
    members: BTreeMap<String, ClpreUserKeys>,
    directory: BTreeMap<String, ReceiverPub>,
    /// Proxy state: original ciphertexts and pending deliveries.
    proxy_cts: BTreeMap<(String, String), ClpreCiphertext>,
    pending: BTreeMap<(String, String, String), ReEncCiphertext>,
    /// Cloud bookkeeping: which proxy stored each object, and sealed bodies.
    origin: BTreeMap<String, String>,
    bodies: BTreeMap<String, Vec<u8>>,
    inbox: BTreeMap<(String, String), Inbox>,
    truth: BTreeMap<String, Vec<u8>>,
}

const REENCRYPT: &str = "Re-Encryption by Fog";

impl Driver for Sharing {
    fn provision(&mut self, core: &mut Core) -> Result<(), SimError> {
        let pkg_id = core.ids_where(|e| e.has(Role::Pkg)).remove(0);
        let pkg = core.step(&pkg_id, "pkg-setup", "PKG Setup", pkg_setup)?;
        let members = core.ids_where(|e| e.has(Role::Sender) || e.has(Role::Receiver));
        for id in members {
            let partial = core.step(&pkg_id, "extract-partial-key", "PKG Setup", |s, _| {
                extract_partial_key(s, &pkg, id.as_bytes())
            })?;
            let is_sender = core.spec(&id)?.has(Role::Sender);
            let mpk = pkg.mpk.clone();
            let keys = core.step(&id, "keygen", "Key Generation", |s, rng| {
                user_keygen(s, rng, &partial, id.as_bytes(), &mpk, is_sender)
            })?;
            self.directory.insert(id.clone(), keys.receiver_pub());
            self.members.insert(id, keys);
        }
        Ok(())
    }

    fn on_step(&mut self, core: &mut Core, step: &StepSpec) -> Result<(), SimError> {
        match step.action.as_str() {
            "share" => self.share(core, step),
            "request" => {
                let cloud = match step.opt_str("cloud")? {
                    Some(c) => c.to_string(),
                    None => core.first_cloud()?,
                };
                let object = step.str("object")?;
                core.send(
                    &step.entity,
                    &cloud,
                    Some(object),
                    None,
                    Payload::DataRequest(object.to_string()),
                )
            }
            other => Err(SimError::Scenario(format!("sharing has no action `{other}`"))),
        }
    }

    fn on_message(&mut self, core: &mut Core, msg: Message) -> Result<(), SimError> {
        let layer = core.spec(&msg.dst)?.layer;
        let is_proxy = core.spec(&msg.dst)?.has(Role::Proxy);
        match layer {
            Layer::Fog if is_proxy => self.at_proxy(core, msg),
            Layer::Fog => self.relay(core, msg),
            Layer::Cloud => self.at_cloud(core, msg),
            _ => self.at_receiver(core, msg),
        }
    }
}

impl Sharing {
    fn share(&mut self, core: &mut Core, step: &StepSpec) -> Result<(), SimError> {
        let sender = step.entity.as_str();
        let via = step.str("via")?;
        let object = step.str("object")?;
        let receivers = step.strs("receivers")?;
        if receivers.is_empty() {
            return Err(SimError::Scenario("share needs at least one receiver".into()));
        }
        let body = match step.opt_str("payload")? {
            Some(text) => text.as_bytes().to_vec(),
            None => {
                let len = step.u64_or("msg_size", 100)? as usize;
                core.random_bytes(len)
            }
        };
        let keys = self
            .members
            .get(sender)
            .filter(|k| k.is_sender())
            .cloned()
            .ok_or_else(|| protocol_err(sender, "Encryption", "not an enrolled sender"))?;
        let m = core.fresh_gt();
        core.plaintext(body.clone());
        core.plaintext(m.to_bytes());
        self.truth.insert(object.to_string(), body.clone());

        let ct = core.step(sender, "encrypt", "Encryption", |s, rng| encrypt(s, rng, &m, &keys))?;
        let mut rekeys = Vec::new();
        for r in &receivers {
            let pub_r = self
                .directory
                .get(*r)
                .cloned()
                .ok_or_else(|| protocol_err(sender, "Re-Encryption Key Generation", format!("{r} not enrolled")))?;
            let rk = core.step(sender, "rekeygen", "Re-Encryption Key Generation", |s, rng| {
                rekeygen(s, rng, &keys, &pub_r)
            })?;
            rekeys.push((*r, rk));
        }
        let sealed = kem::seal(&m, &body);
        let mut first = true;
        for (r, rk) in rekeys {
            let payload = if first {
                Payload::ClpreUpload(UploadMessage { ct: ct.clone(), rk })
            } else {
                Payload::ClpreRekey(rk)
            };
            first = false;
            core.send(sender, via, Some(object), Some(r), payload)?;
        }
        core.send(sender, via, Some(object), None, Payload::Sealed(sealed))
    }

    /// A fog node without the proxy role passes traffic to the first proxy.
    fn relay(&mut self, core: &mut Core, msg: Message) -> Result<(), SimError> {
        let proxy = core
            .ids_where(|e| e.layer == Layer::Fog && e.has(Role::Proxy))
            .into_iter()
            .next()
            .ok_or_else(|| SimError::Topology("no proxy fog".into()))?;
        core.step(&msg.dst, "forward", "Forward to Proxy", |_, _| Ok::<_, SimError>(()))?;
        core.send(
            &msg.dst,
            &proxy,
            msg.object.as_deref(),
            msg.subject.as_deref(),
            msg.payload,
        )
    }

    fn object_of(msg: &Message, step: &str) -> Result<String, SimError> {
        msg.object
            .clone()
            .ok_or_else(|| protocol_err(&msg.dst, step, "message carries no object id"))
    }

    fn reencrypt_for(
        &mut self,
        core: &mut Core,
        proxy: &str,
        object: &str,
        receiver: Option<&str>,
        rk: ReEncKey,
    ) -> Result<(), SimError> {
        core.require_layer(proxy, Layer::Fog, REENCRYPT)?;
        let receiver = receiver.ok_or_else(|| protocol_err(proxy, REENCRYPT, "rekey names no receiver"))?;
        let ct = self
            .proxy_cts
            .get(&(proxy.to_string(), object.to_string()))
            .cloned()
            .ok_or_else(|| protocol_err(proxy, REENCRYPT, format!("no ciphertext for {object}")))?;
        let rct = core.step(proxy, "reencrypt", REENCRYPT, |s, _| reencrypt(s, &ct, &rk))?;
        self.pending
            .insert((proxy.into(), object.into(), receiver.into()), rct);
        Ok(())
    }

    fn at_proxy(&mut self, core: &mut Core, msg: Message) -> Result<(), SimError> {
        let proxy = msg.dst.clone();
        let cloud = core.first_cloud()?;
        let object = Self::object_of(&msg, REENCRYPT);
        match msg.payload {
            Payload::ClpreUpload(UploadMessage { ct, rk }) => {
                let object = object?;
                self.proxy_cts.insert((proxy.clone(), object.clone()), ct.clone());
                core.send(&proxy, &cloud, Some(&object), None, Payload::ClpreCiphertext(ct))?;
                self.reencrypt_for(core, &proxy, &object, msg.subject.as_deref(), rk)
            }
            Payload::ClpreRekey(rk) => {
                let object = object?;
                self.reencrypt_for(core, &proxy, &object, msg.subject.as_deref(), rk)
            }
            Payload::Sealed(body) => core.send(&proxy, &cloud, msg.object.as_deref(), None, Payload::Sealed(body)),
            Payload::Notify { object, requester } => {
                let rct = self
                    .pending
                    .remove(&(proxy.clone(), object.clone(), requester.clone()))
                    .ok_or_else(|| {
                        protocol_err(&proxy, "deliver", format!("{requester} holds no delegation for {object}"))
                    })?;
                core.send(&proxy, &requester, Some(&object), None, Payload::ClpreDelivery(rct))
            }
            other => Err(protocol_err(&proxy, "receive", format!("unexpected {}", other.kind()))),
        }
    }

    fn at_cloud(&mut self, core: &mut Core, msg: Message) -> Result<(), SimError> {
        let cloud = msg.dst.clone();
        match &msg.payload {
            Payload::ClpreCiphertext(_) => {
                let object = Self::object_of(&msg, "store")?;
                core.store(&cloud, Some(&object), &msg.payload)?;
                self.origin.insert(object, msg.src.clone());
                Ok(())
            }
            Payload::Sealed(body) => {
                let object = Self::object_of(&msg, "store")?;
                core.store(&cloud, Some(&object), &msg.payload)?;
                self.bodies.insert(object, body.clone());
                Ok(())
            }
            Payload::DataRequest(object) => {
                let proxy = self
                    .origin
                    .get(object)
                    .cloned()
                    .ok_or_else(|| protocol_err(&cloud, "notify", format!("no object {object}")))?;
                let body = self.bodies.get(object).cloned().unwrap_or_default();
                let notify = Payload::Notify {
                    object: object.clone(),
                    requester: msg.src.clone(),
                };
                core.send(&cloud, &proxy, Some(object), None, notify)?;
                core.send(&cloud, &msg.src, Some(object), None, Payload::Sealed(body))
            }
            other => Err(protocol_err(&cloud, "receive", format!("unexpected {}", other.kind()))),
        }
    }

    fn at_receiver(&mut self, core: &mut Core, msg: Message) -> Result<(), SimError> {
        let receiver = msg.dst.clone();
        let object = Self::object_of(&msg, "Decryption")?;
        let slot = self
            .inbox
            .entry((receiver.clone(), object.clone()))
            .or_default();
        match msg.payload {
            Payload::ClpreDelivery(rct) => slot.delivery = Some(rct),
            Payload::Sealed(body) => slot.body = Some(body),
            other => return Err(protocol_err(&receiver, "receive", format!("unexpected {}", other.kind()))),
        }
        if slot.delivery.is_none() || slot.body.is_none() {
            return Ok(());
        }
        let Inbox { delivery, body } = self
            .inbox
            .remove(&(receiver.clone(), object.clone()))
            .expect("slot present");
        let (rct, body) = (delivery.expect("checked"), body.expect("checked"));
        let keys = self
            .members
            .get(&receiver)
            .cloned()
            .ok_or_else(|| protocol_err(&receiver, "Decryption", "not enrolled"))?;
        let m = core.step(&receiver, "decrypt", "Decryption", |s, _| decrypt(s, &rct, &keys))?;
        let opened = kem::open(&m, &body);
        let ok = opened.is_some() && opened == self.truth.get(&object).cloned();
        core.outcome(&receiver, "plaintext-match", ok);
        Ok(())
    }
}
