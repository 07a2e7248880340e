//! Devices sign batches of packets (folding the signatures in aggregate
//! mode) and their nearest fog node verifies under the device's public key.

use std::collections::BTreeMap;

use super::{protocol_err, Core, Driver, Layer, Message, Payload, Role, SimError, StepSpec};
use crate::aggsign::{
    aggregate, sign, FrameMode, FrameSignatures, SignKeyPair, Signature, SignedFrame,
    DEFAULT_SIGNATURE_BYTES,
};
use crate::pairing::G1Element;

#[derive(Default)]
pub(crate) struct Aggregation {
    /// Device-held signing keys.
    keys: BTreeMap<String, SignKeyPair>,
    /// Published device keys, readable by everyone.
    directory: BTreeMap<String, G1Element>,
    /// Packets each device put on the wire, for the end-to-end check.
    sent: BTreeMap<String, Vec<Vec<u8>>>,
    /// Where a fog node forwards verified packets, per device.
    forward: BTreeMap<String, String>,
}

impl Driver for Aggregation {
    fn provision(&mut self, core: &mut Core) -> Result<(), SimError> {
        let ta = core.ids_where(|e| e.has(Role::Ta)).into_iter().next();
        for dev in core.ids_where(|e| e.layer == Layer::Perception) {
            // The trusted authority derives device keys when one is present.
            let issuer = ta.clone().unwrap_or_else(|| dev.clone());
            let kp = core.step(&issuer, "setup", "Setup", SignKeyPair::generate)?;
            self.directory.insert(dev.clone(), kp.pk.clone());
            self.keys.insert(dev, kp);
        }
        Ok(())
    }

    fn on_step(&mut self, core: &mut Core, step: &StepSpec) -> Result<(), SimError> {
        match step.action.as_str() {
            "send-frame" => self.send_frame(core, step),
            other => Err(SimError::Scenario(format!("aggregation has no action `{other}`"))),
        }
    }

    fn on_message(&mut self, core: &mut Core, msg: Message) -> Result<(), SimError> {
        match msg.payload {
            Payload::SignedFrame(frame) => self.verify(core, &msg.dst, &msg.src, frame),
            Payload::SensorData(_) => Ok(()),
            other => Err(protocol_err(&msg.dst, "receive", format!("unexpected {}", other.kind()))),
        }
    }
}

impl Aggregation {
    fn send_frame(&mut self, core: &mut Core, step: &StepSpec) -> Result<(), SimError> {
        let dev = step.entity.as_str();
        core.require_layer(dev, Layer::Perception, "Sign")?;
        let to = step.str("to")?;
        let n = step.u64_or("n", 1)? as usize;
        let msg_size = step.u64_or("msg_size", 100)? as usize;
        let width = step.u64_or("sig_width", DEFAULT_SIGNATURE_BYTES as u64)? as usize;
        let mode = match step.opt_str("mode")?.unwrap_or("aggregate") {
            "aggregate" => FrameMode::Aggregate,
            "bls" => FrameMode::Bls,
            other => return Err(SimError::Scenario(format!("unknown frame mode `{other}`"))),
        };
        if n == 0 {
            return Err(protocol_err(dev, "Sign", "empty batch"));
        }
        if let Some(fwd) = step.opt_str("forward")? {
            self.forward.insert(dev.to_string(), fwd.to_string());
        }
        let packets: Vec<Vec<u8>> = (0..n).map(|_| core.random_bytes(msg_size)).collect();
        let sk = self
            .keys
            .get(dev)
            .ok_or_else(|| protocol_err(dev, "Sign", "no signing key"))?
            .sk
            .clone();
        let sigs = core.step(dev, "sign", "Sign", |s, _| {
            packets
                .iter()
                .map(|p| sign(s, p, &sk)?.with_width(width))
                .collect::<Result<Vec<Signature>, _>>()
        })?;
        let sig = match mode {
            FrameMode::Bls => FrameSignatures::PerPacket(sigs),
            FrameMode::Aggregate => {
                FrameSignatures::Aggregate(core.step(dev, "aggregate", "Aggregate", |s, _| aggregate(s, &sigs))?)
            }
        };
        self.sent.insert(dev.to_string(), packets.clone());
        core.send(dev, to, None, None, Payload::SignedFrame(SignedFrame { packets, sig }))
    }

    fn verify(&mut self, core: &mut Core, fog: &str, dev: &str, frame: SignedFrame) -> Result<(), SimError> {
        core.require_layer(fog, Layer::Fog, "Verify")?;
        let pk = self
            .directory
            .get(dev)
            .cloned()
            .ok_or_else(|| protocol_err(fog, "Verify", format!("no public key for {dev}")))?;
        let ok = core.step(fog, "verify", "Verify", |s, _| Ok::<_, SimError>(frame.verify(s, &pk)))?;
        core.outcome(fog, "frame-verified", ok);
        let intact = self.sent.get(dev) == Some(&frame.packets);
        core.outcome(fog, "packets-intact", intact);
        if !ok {
            return Err(protocol_err(fog, "Verify", format!("signature from {dev} rejected")));
        }
        if let Some(to) = self.forward.get(dev).cloned() {
            core.send(fog, &to, None, None, Payload::SensorData(frame.packets))?;
        }
        Ok(())
    }
}
