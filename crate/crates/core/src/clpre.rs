//! Certificateless proxy re-encryption.
//!
//! A private key generator (PKG) issues identity-bound partial keys
//! `P_i = H1(id)^mk`; each member completes its key with a self-chosen `k_i`,
//! so neither side holds the full secret alone. A sender encrypts once, hands
//! a fog proxy one re-encryption key per receiver, and the proxy transforms
//! the ciphertext with a single pairing without seeing the plaintext.
//!
//! Key material:
//!
//! | symbol | value |
//! |---|---|
//! | `g_i` | `H1(id)` |
//! | `S_i` | `P_i^{k_i} = g_i^{mk·k_i}` |
//! | public | `(g^{k_i}, mpk^{k_i})`, plus `g^d` for senders |
//!
//! Messages are target-group elements; bulk data rides on a key derived from
//! one (see the simulator).

use rand::RngCore;
use thiserror::Error;

use crate::pairing::{
    G1Element, GTElement, PairingError, PairingParams, Scalar, Session, ELEMENT_BYTES,
};

/// c0 ‖ c1 ‖ c2.
pub const CIPHERTEXT_BYTES: usize = 3 * ELEMENT_BYTES;
/// c4 ‖ u1 ‖ u2.
pub const REKEY_BYTES: usize = 3 * ELEMENT_BYTES;
/// Sender to fog: ciphertext plus re-encryption key.
pub const UPLOAD_BYTES: usize = CIPHERTEXT_BYTES + REKEY_BYTES;
/// Fog to receiver: c0 ‖ c'' ‖ u1 ‖ u2.
pub const DELIVERY_BYTES: usize = 4 * ELEMENT_BYTES;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClpreError {
    #[error("identity must be non-empty")]
    EmptyId,
    #[error("partial key does not match the identity under the master public key")]
    InconsistentPartialKey,
    #[error("user holds no delegation secret; only senders can encrypt or delegate")]
    NotSender,
    #[error("malformed encoding: expected {expected} bytes, got {got}")]
    Length { expected: usize, got: usize },
    #[error(transparent)]
    Pairing(#[from] PairingError),
}

pub type Result<T> = std::result::Result<T, ClpreError>;

/// The PKG's state. `mk` never leaves this struct; [`PkgState::public`] is
/// what gets published.
#[derive(Clone, Debug)]
pub struct PkgState {
    mk: Scalar,
    pub mpk: G1Element,
    pub params: PairingParams,
}

/// The published half of the PKG.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PkgPublic {
    pub mpk: G1Element,
}

impl PkgState {
    pub fn public(&self) -> PkgPublic {
        PkgPublic {
            mpk: self.mpk.clone(),
        }
    }

    /// Master key access for tests and oracles.
    pub fn master_key(&self) -> &Scalar {
        &self.mk
    }
}

/// Random non-zero master key, mpk = g^mk. One exponentiation.
pub fn pkg_setup<R: RngCore + ?Sized>(sess: &mut Session, rng: &mut R) -> Result<PkgState> {
    let mk = sess.scalars().random_nonzero(rng);
    pkg_from_master(sess, mk)
}

pub fn pkg_from_master(sess: &mut Session, mk: Scalar) -> Result<PkgState> {
    let g = sess.params().generator().clone();
    let mpk = sess.g1_exp(&g, &mk)?;
    Ok(PkgState {
        mk,
        mpk,
        params: sess.params().clone(),
    })
}

/// P_i = H1(id)^mk.
pub fn extract_partial_key(sess: &mut Session, pkg: &PkgState, id: &[u8]) -> Result<G1Element> {
    if id.is_empty() {
        return Err(ClpreError::EmptyId);
    }
    let g_i = sess.hash_to_g1(id);
    Ok(sess.g1_exp(&g_i, &pkg.mk)?)
}

#[derive(Clone, Debug)]
pub struct ClpreUserKeys {
    pub id: Vec<u8>,
    pub g_i: G1Element,
    pub partial: G1Element,
    pub secret_k: Scalar,
    pub s_i: G1Element,
    pub pub_u: G1Element,
    pub pub_x: G1Element,
    pub delegation_d: Option<Scalar>,
    pub pub_gd: Option<G1Element>,
}

/// What a receiver publishes for others to delegate to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReceiverPub {
    pub g_r: G1Element,
    pub pub_x: G1Element,
}

impl ClpreUserKeys {
    pub fn receiver_pub(&self) -> ReceiverPub {
        ReceiverPub {
            g_r: self.g_i.clone(),
            pub_x: self.pub_x.clone(),
        }
    }

    pub fn is_sender(&self) -> bool {
        self.delegation_d.is_some()
    }

    fn delegation(&self) -> Result<&Scalar> {
        self.delegation_d.as_ref().ok_or(ClpreError::NotSender)
    }
}

/// Completes a member's key. Checks ê(P_i, g) = ê(H1(id), mpk) first, then
/// draws k_i (and d for a sender).
pub fn user_keygen<R: RngCore + ?Sized>(
    sess: &mut Session,
    rng: &mut R,
    partial: &G1Element,
    id: &[u8],
    mpk: &G1Element,
    is_sender: bool,
) -> Result<ClpreUserKeys> {
    let k = sess.scalars().random_nonzero(rng);
    let d = is_sender.then(|| sess.scalars().random_nonzero(rng));
    user_keygen_with(sess, partial, id, mpk, k, d)
}

/// [`user_keygen`] with caller-chosen secrets.
pub fn user_keygen_with(
    sess: &mut Session,
    partial: &G1Element,
    id: &[u8],
    mpk: &G1Element,
    k: Scalar,
    d: Option<Scalar>,
) -> Result<ClpreUserKeys> {
    if id.is_empty() {
        return Err(ClpreError::EmptyId);
    }
    let g = sess.params().generator().clone();
    let g_i = sess.hash_to_g1(id);
    if sess.pair(partial, &g)? != sess.pair(&g_i, mpk)? {
        return Err(ClpreError::InconsistentPartialKey);
    }
    let s_i = sess.g1_exp(partial, &k)?;
    let pub_u = sess.g1_exp(&g, &k)?;
    let pub_x = sess.g1_exp(mpk, &k)?;
    let pub_gd = match &d {
        Some(d) => Some(sess.g1_exp(&g, d)?),
        None => None,
    };
    Ok(ClpreUserKeys {
        id: id.to_vec(),
        g_i,
        partial: partial.clone(),
        secret_k: k,
        s_i,
        pub_u,
        pub_x,
        delegation_d: d,
        pub_gd,
    })
}

fn put(out: &mut Vec<u8>, parts: &[Vec<u8>]) {
    for p in parts {
        out.extend_from_slice(p);
    }
}

fn chunks(bytes: &[u8], expected: usize) -> Result<Vec<&[u8]>> {
    if bytes.len() != expected {
        return Err(ClpreError::Length {
            expected,
            got: bytes.len(),
        });
    }
    Ok(bytes.chunks(ELEMENT_BYTES).collect())
}

/// (g^{dr}, g^r, m·ê(g_S^r, g^{d·k_S})).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClpreCiphertext {
    pub c0: G1Element,
    pub c1: G1Element,
    pub c2: GTElement,
}

impl ClpreCiphertext {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(CIPHERTEXT_BYTES);
        put(&mut out, &[self.c0.to_bytes(), self.c1.to_bytes(), self.c2.to_bytes()]);
        out
    }

    pub fn from_bytes(params: &PairingParams, bytes: &[u8]) -> Result<ClpreCiphertext> {
        let c = chunks(bytes, CIPHERTEXT_BYTES)?;
        Ok(ClpreCiphertext {
            c0: params.g1_from_bytes(c[0])?,
            c1: params.g1_from_bytes(c[1])?,
            c2: params.gt_from_bytes(c[2])?,
        })
    }
}

/// y wrapped for the receiver: (g^{r'}, y·ê(g_R^{r'}, mpk^{k_R})).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WrappedY {
    pub u1: G1Element,
    pub u2: GTElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReEncKey {
    pub c4: G1Element,
    pub wrapped_y: WrappedY,
}

impl ReEncKey {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(REKEY_BYTES);
        put(
            &mut out,
            &[
                self.c4.to_bytes(),
                self.wrapped_y.u1.to_bytes(),
                self.wrapped_y.u2.to_bytes(),
            ],
        );
        out
    }

    pub fn from_bytes(params: &PairingParams, bytes: &[u8]) -> Result<ReEncKey> {
        let c = chunks(bytes, REKEY_BYTES)?;
        Ok(ReEncKey {
            c4: params.g1_from_bytes(c[0])?,
            wrapped_y: WrappedY {
                u1: params.g1_from_bytes(c[1])?,
                u2: params.gt_from_bytes(c[2])?,
            },
        })
    }
}

/// The delivery 3-tuple ⟨c0, c'', C_R(y)⟩.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReEncCiphertext {
    pub c0: G1Element,
    pub c2pp: GTElement,
    pub wrapped_y: WrappedY,
}

impl ReEncCiphertext {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(DELIVERY_BYTES);
        put(
            &mut out,
            &[
                self.c0.to_bytes(),
                self.c2pp.to_bytes(),
                self.wrapped_y.u1.to_bytes(),
                self.wrapped_y.u2.to_bytes(),
            ],
        );
        out
    }

    pub fn from_bytes(params: &PairingParams, bytes: &[u8]) -> Result<ReEncCiphertext> {
        let c = chunks(bytes, DELIVERY_BYTES)?;
        Ok(ReEncCiphertext {
            c0: params.g1_from_bytes(c[0])?,
            c2pp: params.gt_from_bytes(c[1])?,
            wrapped_y: WrappedY {
                u1: params.g1_from_bytes(c[2])?,
                u2: params.gt_from_bytes(c[3])?,
            },
        })
    }
}

/// The upload 2-tuple ⟨c', rk⟩ sent from the sender to its fog node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UploadMessage {
    pub ct: ClpreCiphertext,
    pub rk: ReEncKey,
}

impl UploadMessage {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.ct.to_bytes();
        out.extend_from_slice(&self.rk.to_bytes());
        out
    }

    pub fn from_bytes(params: &PairingParams, bytes: &[u8]) -> Result<UploadMessage> {
        if bytes.len() != UPLOAD_BYTES {
            return Err(ClpreError::Length {
                expected: UPLOAD_BYTES,
                got: bytes.len(),
            });
        }
        let (ct, rk) = bytes.split_at(CIPHERTEXT_BYTES);
        Ok(UploadMessage {
            ct: ClpreCiphertext::from_bytes(params, ct)?,
            rk: ReEncKey::from_bytes(params, rk)?,
        })
    }
}

/// Encrypts m under the sender's delegation secret.
/// Four exponentiations, one multiplication, one pairing.
pub fn encrypt<R: RngCore + ?Sized>(
    sess: &mut Session,
    rng: &mut R,
    m: &GTElement,
    sender: &ClpreUserKeys,
) -> Result<ClpreCiphertext> {
    let r = sess.scalars().random_nonzero(rng);
    encrypt_with(sess, m, sender, &r)
}

pub fn encrypt_with(
    sess: &mut Session,
    m: &GTElement,
    sender: &ClpreUserKeys,
    r: &Scalar,
) -> Result<ClpreCiphertext> {
    let d = sender.delegation()?;
    let f = sess.scalars().clone();
    let g = sess.params().generator().clone();
    let c0 = sess.g1_exp(&g, &f.mul(d, r))?;
    let c1 = sess.g1_exp(&g, r)?;
    let gs_r = sess.g1_exp(&sender.g_i, r)?;
    let g_dk = sess.g1_exp(&g, &f.mul(d, &sender.secret_k))?;
    let blind = sess.pair(&gs_r, &g_dk)?;
    let c2 = sess.gt_mul(m, &blind)?;
    Ok(ClpreCiphertext { c0, c1, c2 })
}

/// Owner-side decryption of a first-hand ciphertext, using d and k_S.
pub fn decrypt_own(
    sess: &mut Session,
    ct: &ClpreCiphertext,
    sender: &ClpreUserKeys,
) -> Result<GTElement> {
    let d = sender.delegation()?;
    let dk = sess.scalars().mul(d, &sender.secret_k);
    let base = sess.pair(&sender.g_i, &ct.c1)?;
    let blind = sess.gt_exp(&base, &dk)?;
    Ok(sess.gt_div(&ct.c2, &blind)?)
}

/// Delegates to a receiver: c4 = g_S^{−d·k_S}·H2(y)^d for a fresh random y,
/// plus y wrapped under the receiver's public key.
pub fn rekeygen<R: RngCore + ?Sized>(
    sess: &mut Session,
    rng: &mut R,
    sender: &ClpreUserKeys,
    receiver: &ReceiverPub,
) -> Result<ReEncKey> {
    let y = sess.random_gt(rng);
    let r = sess.scalars().random_nonzero(rng);
    rekeygen_with(sess, sender, receiver, &y, &r)
}

pub fn rekeygen_with(
    sess: &mut Session,
    sender: &ClpreUserKeys,
    receiver: &ReceiverPub,
    y: &GTElement,
    wrap_r: &Scalar,
) -> Result<ReEncKey> {
    let d = sender.delegation()?;
    let f = sess.scalars().clone();
    let neg_dk = f.neg(&f.mul(d, &sender.secret_k));
    let unblind = sess.g1_exp(&sender.g_i, &neg_dk)?;
    let hy = sess.hash_gt_to_g1(y)?;
    let hy_d = sess.g1_exp(&hy, d)?;
    let c4 = sess.g1_mul(&unblind, &hy_d)?;

    let g = sess.params().generator().clone();
    let u1 = sess.g1_exp(&g, wrap_r)?;
    let gr_r = sess.g1_exp(&receiver.g_r, wrap_r)?;
    let blind = sess.pair(&gr_r, &receiver.pub_x)?;
    let u2 = sess.gt_mul(y, &blind)?;
    Ok(ReEncKey {
        c4,
        wrapped_y: WrappedY { u1, u2 },
    })
}

/// c'' = c2·ê(c4, c1). Uses only public material: one multiplication and
/// one pairing.
pub fn reencrypt(sess: &mut Session, ct: &ClpreCiphertext, rk: &ReEncKey) -> Result<ReEncCiphertext> {
    let t = sess.pair(&rk.c4, &ct.c1)?;
    let c2pp = sess.gt_mul(&ct.c2, &t)?;
    Ok(ReEncCiphertext {
        c0: ct.c0.clone(),
        c2pp,
        wrapped_y: rk.wrapped_y.clone(),
    })
}

/// Recovers y = u2 / ê(S_R, u1), then m = c'' / ê(H2(y), c0).
pub fn decrypt(
    sess: &mut Session,
    rct: &ReEncCiphertext,
    receiver: &ClpreUserKeys,
) -> Result<GTElement> {
    let blind = sess.pair(&receiver.s_i, &rct.wrapped_y.u1)?;
    let y = sess.gt_div(&rct.wrapped_y.u2, &blind)?;
    let hy = sess.hash_gt_to_g1(&y)?;
    let mask = sess.pair(&hy, &rct.c0)?;
    Ok(sess.gt_div(&rct.c2pp, &mask)?)
}
