//! BLS signatures and single-signer aggregation for device-to-fog frames.
//!
//! A device signs every packet with `H1(D)^sk`, multiplies the signatures
//! into one group element, and ships the packets with that single
//! signature. The fog node checks
//!
//! ```text
//! ∏ ê(pk, H1(D_j)) = ê(σ_agg, g)
//! ```
//!
//! with one pairing per packet plus one.

use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pairing::{G1Element, PairingError, PairingParams, Scalar, Session, ELEMENT_BYTES};

/// Accounting width of a signature on the wire.
pub const DEFAULT_SIGNATURE_BYTES: usize = 96;

/// Width of the uncompressed encoding, the consistency-study setting.
pub const FULL_SIGNATURE_BYTES: usize = ELEMENT_BYTES;

/// Smallest width that still holds a compressed point.
pub const MIN_SIGNATURE_BYTES: usize = 65;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AggError {
    #[error("cannot sign an empty packet")]
    EmptyPacket,
    #[error("nothing to aggregate")]
    NoSignatures,
    #[error("a frame needs at least one packet")]
    NoPackets,
    #[error("signature width {0} is outside 65..=128")]
    BadWidth(usize),
    #[error("malformed frame: {0}")]
    Frame(String),
    #[error(transparent)]
    Pairing(#[from] PairingError),
}

pub type Result<T> = std::result::Result<T, AggError>;

fn check_width(width: usize) -> Result<usize> {
    if (MIN_SIGNATURE_BYTES..=FULL_SIGNATURE_BYTES).contains(&width) {
        Ok(width)
    } else {
        Err(AggError::BadWidth(width))
    }
}

#[derive(Clone, Debug)]
pub struct SignKeyPair {
    pub sk: Scalar,
    pub pk: G1Element,
}

impl SignKeyPair {
    /// Fresh key pair; one exponentiation.
    pub fn generate<R: RngCore + ?Sized>(sess: &mut Session, rng: &mut R) -> Result<SignKeyPair> {
        let sk = sess.scalars().random_nonzero(rng);
        SignKeyPair::from_secret(sess, sk)
    }

    pub fn from_secret(sess: &mut Session, sk: Scalar) -> Result<SignKeyPair> {
        let g = sess.params().generator().clone();
        let pk = sess.g1_exp(&g, &sk)?;
        Ok(SignKeyPair { sk, pk })
    }
}

/// A signature together with the width it occupies on the wire.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub sigma: G1Element,
    width: usize,
}

impl Signature {
    pub fn new(sigma: G1Element) -> Signature {
        Signature {
            sigma,
            width: DEFAULT_SIGNATURE_BYTES,
        }
    }

    pub fn with_width(self, width: usize) -> Result<Signature> {
        Ok(Signature {
            width: check_width(width)?,
            ..self
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// The full 128-byte element encoding at width 128, otherwise the
    /// compressed point zero-padded to the width.
    pub fn to_bytes(&self) -> Vec<u8> {
        if self.width == FULL_SIGNATURE_BYTES {
            self.sigma.to_bytes()
        } else {
            self.sigma.to_bytes_compressed(self.width)
        }
    }

    pub fn from_bytes(params: &PairingParams, bytes: &[u8], width: usize) -> Result<Signature> {
        let width = check_width(width)?;
        let sigma = if width == FULL_SIGNATURE_BYTES {
            params.g1_from_bytes(bytes)?
        } else {
            params.g1_from_bytes_compressed(bytes, width)?
        };
        Ok(Signature { sigma, width })
    }
}

/// σ = H1(packet)^sk. One hash and one exponentiation.
pub fn sign(sess: &mut Session, packet: &[u8], sk: &Scalar) -> Result<Signature> {
    if packet.is_empty() {
        return Err(AggError::EmptyPacket);
    }
    let h = sess.hash_to_g1(packet);
    Ok(Signature::new(sess.g1_exp(&h, sk)?))
}

/// Product of the signatures; n − 1 group multiplications. The result keeps
/// the width of the first input.
pub fn aggregate(sess: &mut Session, sigs: &[Signature]) -> Result<Signature> {
    let (first, rest) = sigs.split_first().ok_or(AggError::NoSignatures)?;
    let mut acc = first.sigma.clone();
    for s in rest {
        acc = sess.g1_mul(&acc, &s.sigma)?;
    }
    Ok(Signature {
        sigma: acc,
        width: first.width,
    })
}

/// Checks ∏ ê(pk, H1(D_j)) = ê(σ_agg, g): n hashes and n + 1 pairings.
/// Tampering, an empty packet list, or foreign elements give `false`.
pub fn verify_aggregate(
    sess: &mut Session,
    packets: &[Vec<u8>],
    agg: &Signature,
    pk: &G1Element,
) -> bool {
    if packets.is_empty() {
        return false;
    }
    let hashes: Vec<G1Element> = packets.iter().map(|d| sess.hash_to_g1(d)).collect();
    let terms: Vec<(&G1Element, &G1Element)> = hashes.iter().map(|h| (pk, h)).collect();
    let g = sess.params().generator().clone();
    let lhs = sess.pair_product(&terms);
    let rhs = sess.pair(&agg.sigma, &g);
    matches!((lhs, rhs), (Ok(l), Ok(r)) if l == r)
}

/// Plain BLS check ê(pk, H1(D)) = ê(σ, g): one hash and two pairings.
pub fn verify_single(sess: &mut Session, packet: &[u8], sig: &Signature, pk: &G1Element) -> bool {
    let h = sess.hash_to_g1(packet);
    let g = sess.params().generator().clone();
    let lhs = sess.pair(pk, &h);
    let rhs = sess.pair(&sig.sigma, &g);
    matches!((lhs, rhs), (Ok(l), Ok(r)) if l == r)
}

/// Verifies every packet of a per-packet frame. Always checks all n, so the
/// cost is exactly n hashes and 2n pairings.
pub fn verify_each(
    sess: &mut Session,
    packets: &[Vec<u8>],
    sigs: &[Signature],
    pk: &G1Element,
) -> bool {
    if packets.is_empty() || packets.len() != sigs.len() {
        return false;
    }
    packets
        .iter()
        .zip(sigs)
        .fold(true, |ok, (d, s)| verify_single(sess, d, s, pk) && ok)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameMode {
    /// One signature per packet.
    Bls,
    /// A single aggregate signature.
    Aggregate,
}

/// Accounted frame size: n·|m| plus one signature (aggregate) or n
/// signatures (BLS), at the default 96-byte width.
pub fn frame_wire_size(n: usize, msg_size: usize, mode: FrameMode) -> Result<usize> {
    frame_wire_size_with(n, msg_size, mode, DEFAULT_SIGNATURE_BYTES)
}

pub fn frame_wire_size_with(
    n: usize,
    msg_size: usize,
    mode: FrameMode,
    sig_width: usize,
) -> Result<usize> {
    if n == 0 {
        return Err(AggError::NoPackets);
    }
    let sig_width = check_width(sig_width)?;
    let sigs = match mode {
        FrameMode::Bls => n,
        FrameMode::Aggregate => 1,
    };
    Ok(n * msg_size + sigs * sig_width)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrameSignatures {
    PerPacket(Vec<Signature>),
    Aggregate(Signature),
}

/// Packets plus their signature(s).
///
/// Wire format: `[u32 n][n × (u32 len ‖ payload)][signature bytes]`, all
/// integers big-endian. A per-packet frame carries n signatures back to back.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedFrame {
    pub packets: Vec<Vec<u8>>,
    pub sig: FrameSignatures,
}

/// Byte breakdown of an encoded frame.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameBytes {
    pub payload: usize,
    pub signatures: usize,
    pub framing: usize,
}

impl FrameBytes {
    /// Payload plus signatures; what the overhead formulas count.
    pub fn accounted(&self) -> usize {
        self.payload + self.signatures
    }

    pub fn total(&self) -> usize {
        self.accounted() + self.framing
    }
}

impl SignedFrame {
    /// Signs every packet and, in aggregate mode, folds the signatures.
    pub fn seal(
        sess: &mut Session,
        packets: Vec<Vec<u8>>,
        sk: &Scalar,
        mode: FrameMode,
        sig_width: usize,
    ) -> Result<SignedFrame> {
        if packets.is_empty() {
            return Err(AggError::NoPackets);
        }
        let sigs = packets
            .iter()
            .map(|d| sign(sess, d, sk)?.with_width(sig_width))
            .collect::<Result<Vec<_>>>()?;
        let sig = match mode {
            FrameMode::Bls => FrameSignatures::PerPacket(sigs),
            FrameMode::Aggregate => FrameSignatures::Aggregate(aggregate(sess, &sigs)?),
        };
        Ok(SignedFrame { packets, sig })
    }

    pub fn mode(&self) -> FrameMode {
        match self.sig {
            FrameSignatures::PerPacket(_) => FrameMode::Bls,
            FrameSignatures::Aggregate(_) => FrameMode::Aggregate,
        }
    }

    pub fn verify(&self, sess: &mut Session, pk: &G1Element) -> bool {
        match &self.sig {
            FrameSignatures::PerPacket(sigs) => verify_each(sess, &self.packets, sigs, pk),
            FrameSignatures::Aggregate(agg) => verify_aggregate(sess, &self.packets, agg, pk),
        }
    }

    pub fn byte_breakdown(&self) -> FrameBytes {
        let signatures = match &self.sig {
            FrameSignatures::PerPacket(sigs) => sigs.iter().map(Signature::width).sum(),
            FrameSignatures::Aggregate(s) => s.width(),
        };
        FrameBytes {
            payload: self.packets.iter().map(Vec::len).sum(),
            signatures,
            framing: 4 + 4 * self.packets.len(),
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.byte_breakdown().total());
        out.extend_from_slice(&(self.packets.len() as u32).to_be_bytes());
        for p in &self.packets {
            out.extend_from_slice(&(p.len() as u32).to_be_bytes());
            out.extend_from_slice(p);
        }
        match &self.sig {
            FrameSignatures::PerPacket(sigs) => {
                for s in sigs {
                    out.extend_from_slice(&s.to_bytes());
                }
            }
            FrameSignatures::Aggregate(s) => out.extend_from_slice(&s.to_bytes()),
        }
        out
    }

    pub fn decode(
        params: &PairingParams,
        bytes: &[u8],
        mode: FrameMode,
        sig_width: usize,
    ) -> Result<SignedFrame> {
        let sig_width = check_width(sig_width)?;
        let mut cur = bytes;
        let mut take = |len: usize| -> Result<&[u8]> {
            if cur.len() < len {
                return Err(AggError::Frame("truncated".into()));
            }
            let (head, tail) = cur.split_at(len);
            cur = tail;
            Ok(head)
        };
        let read_u32 =
            |b: &[u8]| u32::from_be_bytes(b.try_into().expect("four bytes")) as usize;
        let n = read_u32(take(4)?);
        if n == 0 {
            return Err(AggError::NoPackets);
        }
        let mut packets = Vec::with_capacity(n.min(1024));
        for _ in 0..n {
            let len = read_u32(take(4)?);
            packets.push(take(len)?.to_vec());
        }
        let sig = match mode {
            FrameMode::Bls => FrameSignatures::PerPacket(
                (0..n)
                    .map(|_| Signature::from_bytes(params, take(sig_width)?, sig_width))
                    .collect::<Result<_>>()?,
            ),
            FrameMode::Aggregate => {
                FrameSignatures::Aggregate(Signature::from_bytes(params, take(sig_width)?, sig_width)?)
            }
        };
        if !cur.is_empty() {
            return Err(AggError::Frame("trailing bytes".into()));
        }
        Ok(SignedFrame { packets, sig })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairing::{setup_pairing, Backend, OpCounter};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn mock() -> PairingParams {
        setup_pairing(Backend::Mock, b"agg").unwrap()
    }

    fn packets(n: usize) -> Vec<Vec<u8>> {
        (0..n).map(|i| format!("reading #{i}").into_bytes()).collect()
    }

    #[test]
    fn unit_key_signs_to_the_hash() {
        let params = mock();
        let mut s = Session::new(&params);
        let one = s.scalars().one();
        let sig = sign(&mut s, b"D", &one).unwrap();
        assert_eq!(sig.sigma, s.hash_to_g1(b"D"));
    }

    #[test]
    fn mock_signature_log_is_product() {
        let params = mock();
        let mut s = Session::new(&params);
        let five = params.mock_g1(5).unwrap();
        assert_eq!(s.g1_exp(&five, &s.scalars().from_u64(7)).unwrap().mock_log(), Some(35));
        let h = s.hash_to_g1(b"D").mock_log().unwrap();
        let sk = s.scalars().from_u64(7);
        let sig = sign(&mut s, b"D", &sk).unwrap();
        let q = 2_147_483_647u128;
        assert_eq!(sig.sigma.mock_log().unwrap() as u128, (h as u128 * 7) % q);
    }

    #[test]
    fn aggregate_sums_logs() {
        let params = mock();
        let mut s = Session::new(&params);
        let sigs: Vec<Signature> = [3, 5, 11]
            .iter()
            .map(|l| Signature::new(params.mock_g1(*l).unwrap()))
            .collect();
        let (agg, ops) = s.measure(|s| aggregate(s, &sigs).unwrap());
        assert_eq!(agg.sigma.mock_log(), Some(19));
        assert_eq!(ops, OpCounter { multiplications: 2, ..Default::default() });
        assert_eq!(agg.to_bytes().len(), DEFAULT_SIGNATURE_BYTES);
        let single = aggregate(&mut s, &sigs[..1]).unwrap();
        assert_eq!(single.to_bytes(), sigs[0].to_bytes());
        assert_eq!(aggregate(&mut s, &[]), Err(AggError::NoSignatures));
    }

    #[test]
    fn verify_counts_match_the_formulas() {
        let params = mock();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let mut s = Session::new(&params);
        let keys = SignKeyPair::generate(&mut s, &mut rng).unwrap();
        let pk = keys.pk.clone();
        let frame =
            SignedFrame::seal(&mut s, packets(7), &keys.sk, FrameMode::Aggregate, 96).unwrap();
        let (ok, ops) = s.measure(|s| frame.verify(s, &pk));
        assert!(ok);
        assert_eq!(ops, OpCounter { pairings: 8, hashes: 7, ..Default::default() });

        let frame = SignedFrame::seal(&mut s, packets(7), &keys.sk, FrameMode::Bls, 96).unwrap();
        let (ok, ops) = s.measure(|s| frame.verify(s, &pk));
        assert!(ok);
        assert_eq!(ops, OpCounter { pairings: 14, hashes: 7, ..Default::default() });
    }

    #[test]
    fn exhaustive_single_substitution_fails() {
        let params = mock();
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let mut s = Session::new(&params);
        let keys = SignKeyPair::generate(&mut s, &mut rng).unwrap();
        let frame =
            SignedFrame::seal(&mut s, packets(3), &keys.sk, FrameMode::Aggregate, 96).unwrap();
        let FrameSignatures::Aggregate(agg) = &frame.sig else { unreachable!() };
        for i in 0..3 {
            let mut forged = frame.packets.clone();
            forged[i] = b"substituted".to_vec();
            assert!(!verify_aggregate(&mut s, &forged, agg, &keys.pk));
        }
        let other = SignKeyPair::generate(&mut s, &mut rng).unwrap();
        assert!(!verify_aggregate(&mut s, &frame.packets, agg, &other.pk));
        assert!(!verify_aggregate(&mut s, &[], agg, &keys.pk));
    }

    #[test]
    fn wire_sizes() {
        assert_eq!(frame_wire_size(7, 100, FrameMode::Aggregate), Ok(796));
        assert_eq!(frame_wire_size(7, 100, FrameMode::Bls), Ok(1372));
        assert_eq!(
            frame_wire_size(1, 33, FrameMode::Aggregate),
            frame_wire_size(1, 33, FrameMode::Bls)
        );
        assert_eq!(frame_wire_size(0, 100, FrameMode::Bls), Err(AggError::NoPackets));
        assert_eq!(
            frame_wire_size_with(7, 100, FrameMode::Aggregate, 128),
            Ok(828)
        );
        assert_eq!(
            frame_wire_size_with(7, 100, FrameMode::Aggregate, 64),
            Err(AggError::BadWidth(64))
        );
    }

    #[test]
    fn frame_round_trip_on_the_curve() {
        let params = setup_pairing(Backend::Curve, b"").unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let mut s = Session::new(&params);
        let keys = SignKeyPair::generate(&mut s, &mut rng).unwrap();
        for (mode, width) in [(FrameMode::Aggregate, 96), (FrameMode::Bls, 128)] {
            let frame = SignedFrame::seal(&mut s, packets(3), &keys.sk, mode, width).unwrap();
            let bytes = frame.encode();
            let breakdown = frame.byte_breakdown();
            assert_eq!(bytes.len(), breakdown.total());
            assert_eq!(
                breakdown.accounted(),
                frame_wire_size_with(3, 10, mode, width).unwrap()
            );
            let back = SignedFrame::decode(&params, &bytes, mode, width).unwrap();
            assert_eq!(back, frame);
            assert!(back.verify(&mut s, &keys.pk));
            let mut tampered = bytes.clone();
            tampered[9] ^= 1;
            let back = SignedFrame::decode(&params, &tampered, mode, width).unwrap();
            assert!(!back.verify(&mut s, &keys.pk));
            assert!(SignedFrame::decode(&params, &bytes[..bytes.len() - 1], mode, width).is_err());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn correct_and_sound_on_mock(
            seed in any::<u64>(),
            payloads in proptest::collection::vec(
                proptest::collection::vec(any::<u8>(), 1..24), 1..64),
            which in any::<proptest::sample::Index>(),
            bit in 0usize..8,
        ) {
            let params = mock();
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let mut s = Session::new(&params);
            let keys = SignKeyPair::generate(&mut s, &mut rng).unwrap();
            let frame = SignedFrame::seal(
                &mut s, payloads.clone(), &keys.sk, FrameMode::Aggregate, 96).unwrap();
            prop_assert!(frame.verify(&mut s, &keys.pk));

            let mut forged = frame.clone();
            let i = which.index(payloads.len());
            let j = which.index(forged.packets[i].len());
            forged.packets[i][j] ^= 1 << bit;
            prop_assert!(!forged.verify(&mut s, &keys.pk));

            let mut replaced = frame.clone();
            let random = s.random_g1(&mut rng);
            replaced.sig = FrameSignatures::Aggregate(Signature::new(random));
            prop_assert!(!replaced.verify(&mut s, &keys.pk));
        }
    }
}
