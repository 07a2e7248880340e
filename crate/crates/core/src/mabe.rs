//! Multi-authority ciphertext-policy ABE with offline/online encryption and
//! outsourced decryption.
//!
//! Each attribute authority owns secrets `(a_k, b_k)` per attribute and
//! publishes `(ê(g,g)^{a_k}, g^{b_k})`; a user's key for attribute k is
//! `K = g^{a_k}·H1(id)^{b_k}`.
//!
//! Encryption is split. The device prepares one intermediate slot per
//! attribute with random `(t, λ', ω')`:
//!
//! ```text
//! ict1 = ê(g,g)^{λ'}·ê(g,g)^{a t}    ict2 = g^t    ict3 = g^{b t}·g^{ω'}
//! ```
//!
//! The fog node then fixes the policy, shares `m_s` (as λ) and 0 (as ω) over
//! the LSSS matrix and publishes only the corrections `λ − λ'` and `ω − ω'`.
//!
//! For decryption the user hands the fog node its key raised to `1/r`. The
//! fog node returns `CT1` (still carrying the `1/r`) and `CT2`; the user
//! finishes with one exponentiation, one multiplication and one division:
//! `d = C0 / (CT1^r · CT2)`.

use std::collections::{BTreeMap, BTreeSet};

use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lsss::{compile, AccessStructure, LsssError, Policy};
use crate::pairing::{
    G1Element, GTElement, PairingError, PairingParams, Scalar, Session, ELEMENT_BYTES,
    SCALAR_BYTES,
};

/// Per-slot device upload: three elements and three scalars.
pub const SLOT_UPLOAD_BYTES: usize = 3 * ELEMENT_BYTES + 3 * SCALAR_BYTES;

/// Fog-to-user response: CT1 ‖ CT2 ‖ C0.
pub const PARTIAL_CIPHERTEXT_BYTES: usize = 3 * ELEMENT_BYTES;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MabeError {
    #[error("attribute set is empty")]
    NoAttributes,
    #[error("attribute `{0}` is already controlled by an authority")]
    DuplicateAttribute(String),
    #[error("attribute `{0}` is not managed by this authority")]
    ForeignAttribute(String),
    #[error("no public key for attribute `{0}`")]
    UnknownAttribute(String),
    #[error("policy needs a prepared slot for attribute `{0}`")]
    NoSlot(String),
    #[error("attributes do not satisfy the access policy")]
    PolicyUnsatisfied,
    #[error("malformed ciphertext: {0}")]
    Decode(String),
    #[error(transparent)]
    Policy(#[from] LsssError),
    #[error(transparent)]
    Pairing(#[from] PairingError),
}

pub type Result<T> = std::result::Result<T, MabeError>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttributePublicKey {
    pub e_gg_a: GTElement,
    pub g_b: G1Element,
}

#[derive(Clone, Debug)]
pub struct AuthorityKeys {
    pub name: String,
    secrets: BTreeMap<String, (Scalar, Scalar)>,
    pub public: BTreeMap<String, AttributePublicKey>,
}

impl AuthorityKeys {
    pub fn attributes(&self) -> impl Iterator<Item = &str> {
        self.public.keys().map(String::as_str)
    }

    /// (a_k, b_k), for tests and oracles.
    pub fn secret(&self, attr: &str) -> Option<&(Scalar, Scalar)> {
        self.secrets.get(attr)
    }
}

/// Independent random (a_k, b_k) per attribute; two exponentiations each.
pub fn authority_setup<R: RngCore + ?Sized>(
    sess: &mut Session,
    rng: &mut R,
    name: &str,
    attrs: &[&str],
) -> Result<AuthorityKeys> {
    let f = sess.scalars().clone();
    let secrets = attrs
        .iter()
        .map(|a| (a.to_string(), f.random(rng), f.random(rng)))
        .collect::<Vec<_>>();
    authority_from_secrets(sess, name, secrets)
}

pub fn authority_from_secrets(
    sess: &mut Session,
    name: &str,
    secrets: Vec<(String, Scalar, Scalar)>,
) -> Result<AuthorityKeys> {
    if secrets.is_empty() {
        return Err(MabeError::NoAttributes);
    }
    let g = sess.params().generator().clone();
    let z = sess.params().gt_generator().clone();
    let mut keys = AuthorityKeys {
        name: name.to_string(),
        secrets: BTreeMap::new(),
        public: BTreeMap::new(),
    };
    for (attr, a, b) in secrets {
        if keys.secrets.contains_key(&attr) {
            return Err(MabeError::DuplicateAttribute(attr));
        }
        let pk = AttributePublicKey {
            e_gg_a: sess.gt_exp(&z, &a)?,
            g_b: sess.g1_exp(&g, &b)?,
        };
        keys.public.insert(attr.clone(), pk);
        keys.secrets.insert(attr, (a, b));
    }
    Ok(keys)
}

/// Attribute public keys across authorities. Every attribute name belongs to
/// exactly one authority.
#[derive(Clone, Debug, Default)]
pub struct AttributeDirectory {
    keys: BTreeMap<String, (String, AttributePublicKey)>,
}

impl AttributeDirectory {
    pub fn new() -> AttributeDirectory {
        AttributeDirectory::default()
    }

    pub fn register(&mut self, auth: &AuthorityKeys) -> Result<()> {
        if let Some(dup) = auth.public.keys().find(|a| self.keys.contains_key(*a)) {
            return Err(MabeError::DuplicateAttribute(dup.clone()));
        }
        for (attr, pk) in &auth.public {
            self.keys
                .insert(attr.clone(), (auth.name.clone(), pk.clone()));
        }
        Ok(())
    }

    pub fn get(&self, attr: &str) -> Result<&AttributePublicKey> {
        self.keys
            .get(attr)
            .map(|(_, pk)| pk)
            .ok_or_else(|| MabeError::UnknownAttribute(attr.to_string()))
    }

    pub fn authority_of(&self, attr: &str) -> Option<&str> {
        self.keys.get(attr).map(|(name, _)| name.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct UserAttrKey {
    pub id: Vec<u8>,
    pub keys: BTreeMap<String, G1Element>,
}

/// K_{k,id} = g^{a_k}·H1(id)^{b_k} for every requested attribute.
pub fn keygen_user(
    sess: &mut Session,
    auth: &AuthorityKeys,
    id: &[u8],
    attrs: &[&str],
) -> Result<UserAttrKey> {
    if let Some(a) = attrs.iter().find(|a| !auth.secrets.contains_key(**a)) {
        return Err(MabeError::ForeignAttribute(a.to_string()));
    }
    let g = sess.params().generator().clone();
    let h = sess.hash_to_g1(id);
    let mut keys = BTreeMap::new();
    for attr in attrs {
        let (a, b) = &auth.secrets[*attr];
        let ga = sess.g1_exp(&g, a)?;
        let hb = sess.g1_exp(&h, b)?;
        keys.insert(attr.to_string(), sess.g1_mul(&ga, &hb)?);
    }
    Ok(UserAttrKey {
        id: id.to_vec(),
        keys,
    })
}

impl UserAttrKey {
    /// Merges keys issued by several authorities to the same identity.
    pub fn merge(mut self, other: UserAttrKey) -> UserAttrKey {
        assert_eq!(self.id, other.id, "keys belong to different identities");
        self.keys.extend(other.keys);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IctSlot {
    pub attr: String,
    pub ict1: GTElement,
    pub ict2: G1Element,
    pub ict3: G1Element,
}

/// The scalars a slot was built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntermediateState {
    pub attr: String,
    pub t: Scalar,
    pub lambda_pre: Scalar,
    pub omega_pre: Scalar,
}

/// Builds one slot from its state: five exponentiations, two multiplications.
pub fn build_slot(
    sess: &mut Session,
    state: &IntermediateState,
    pk: &AttributePublicKey,
) -> Result<IctSlot> {
    let g = sess.params().generator().clone();
    let z = sess.params().gt_generator().clone();
    let blind = sess.gt_exp(&z, &state.lambda_pre)?;
    let masked = sess.gt_exp(&pk.e_gg_a, &state.t)?;
    let ict1 = sess.gt_mul(&blind, &masked)?;
    let ict2 = sess.g1_exp(&g, &state.t)?;
    let gbt = sess.g1_exp(&pk.g_b, &state.t)?;
    let gw = sess.g1_exp(&g, &state.omega_pre)?;
    let ict3 = sess.g1_mul(&gbt, &gw)?;
    Ok(IctSlot {
        attr: state.attr.clone(),
        ict1,
        ict2,
        ict3,
    })
}

/// Device-side offline phase: one slot per attribute attached to the datum.
pub fn intermediate_encrypt<R: RngCore + ?Sized>(
    sess: &mut Session,
    rng: &mut R,
    attrs: &[&str],
    dir: &AttributeDirectory,
) -> Result<(Vec<IctSlot>, Vec<IntermediateState>)> {
    if attrs.is_empty() {
        return Err(MabeError::NoAttributes);
    }
    let f = sess.scalars().clone();
    let mut slots = Vec::with_capacity(attrs.len());
    let mut states = Vec::with_capacity(attrs.len());
    for attr in attrs {
        let pk = dir.get(attr)?;
        let state = IntermediateState {
            attr: attr.to_string(),
            t: f.random(rng),
            lambda_pre: f.random(rng),
            omega_pre: f.random(rng),
        };
        slots.push(build_slot(sess, &state, pk)?);
        states.push(state);
    }
    Ok((slots, states))
}

/// The device-to-fog 3-tuple ⟨d, ICT, IS⟩. The fog node is trusted with d.
#[derive(Clone, Debug)]
pub struct DeviceUpload {
    pub d: GTElement,
    pub slots: Vec<IctSlot>,
    pub states: Vec<IntermediateState>,
}

impl DeviceUpload {
    /// Element and scalar bytes: |d| + X·(3·128 + 3·32). Attribute labels
    /// travel as framing and are not counted.
    pub fn accounted_bytes(&self, payload_len: usize) -> usize {
        payload_len + self.slots.len() * SLOT_UPLOAD_BYTES
    }

    /// `d` then per slot `ict1 ‖ ict2 ‖ ict3 ‖ t ‖ λ' ‖ ω' ‖ [u16 len][attribute]`.
    /// The second value is the label framing.
    pub fn to_bytes(&self) -> (Vec<u8>, usize) {
        let mut out = self.d.to_bytes();
        let mut framing = 0;
        for (slot, state) in self.slots.iter().zip(&self.states) {
            out.extend_from_slice(&slot.ict1.to_bytes());
            out.extend_from_slice(&slot.ict2.to_bytes());
            out.extend_from_slice(&slot.ict3.to_bytes());
            out.extend_from_slice(&state.t.to_bytes());
            out.extend_from_slice(&state.lambda_pre.to_bytes());
            out.extend_from_slice(&state.omega_pre.to_bytes());
            framing += put_label(&mut out, &slot.attr);
        }
        (out, framing)
    }
}

fn put_label(out: &mut Vec<u8>, label: &str) -> usize {
    out.extend_from_slice(&(label.len() as u16).to_be_bytes());
    out.extend_from_slice(label.as_bytes());
    2 + label.len()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MabeRow {
    pub slot: IctSlot,
    pub corr1: Scalar,
    pub corr2: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MabeCiphertext {
    pub structure: AccessStructure,
    pub c0: GTElement,
    pub rows: Vec<MabeRow>,
}

/// Online randomness: m_s and the tails of the two share vectors.
#[derive(Clone, Debug)]
pub struct OnlineRandomness {
    pub m_s: Scalar,
    pub lambda_tail: Vec<Scalar>,
    pub omega_tail: Vec<Scalar>,
}

impl OnlineRandomness {
    pub fn sample<R: RngCore + ?Sized>(
        sess: &Session,
        rng: &mut R,
        structure: &AccessStructure,
    ) -> OnlineRandomness {
        let f = sess.scalars();
        let tail = structure.cols().saturating_sub(1);
        OnlineRandomness {
            m_s: f.random(rng),
            lambda_tail: (0..tail).map(|_| f.random(rng)).collect(),
            omega_tail: (0..tail).map(|_| f.random(rng)).collect(),
        }
    }

    /// (λ_x), (ω_x) over the structure.
    pub fn shares(&self, sess: &Session, structure: &AccessStructure) -> (Vec<Scalar>, Vec<Scalar>) {
        let f = sess.scalars();
        let mut v = vec![self.m_s.clone()];
        v.extend(self.lambda_tail.iter().cloned());
        let mut w = vec![f.zero()];
        w.extend(self.omega_tail.iter().cloned());
        (structure.share_vector(f, &v), structure.share_vector(f, &w))
    }
}

/// Assigns each policy leaf the first unused slot with its attribute.
fn assign_slots(structure: &AccessStructure, slots: &[IctSlot]) -> Result<Vec<usize>> {
    let mut used = vec![false; slots.len()];
    structure
        .rho
        .iter()
        .map(|attr| {
            let i = (0..slots.len())
                .find(|i| !used[*i] && slots[*i].attr == *attr)
                .ok_or_else(|| MabeError::NoSlot(attr.clone()))?;
            used[i] = true;
            Ok(i)
        })
        .collect()
}

/// Fog-side online phase. Costs one exponentiation and one multiplication
/// for C0 plus two subtractions per row.
pub fn full_encrypt<R: RngCore + ?Sized>(
    sess: &mut Session,
    rng: &mut R,
    d: &GTElement,
    slots: &[IctSlot],
    states: &[IntermediateState],
    policy: &Policy,
) -> Result<MabeCiphertext> {
    let structure = compile(policy);
    let online = OnlineRandomness::sample(sess, rng, &structure);
    full_encrypt_with(sess, d, slots, states, structure, &online)
}

pub fn full_encrypt_with(
    sess: &mut Session,
    d: &GTElement,
    slots: &[IctSlot],
    states: &[IntermediateState],
    structure: AccessStructure,
    online: &OnlineRandomness,
) -> Result<MabeCiphertext> {
    assert_eq!(slots.len(), states.len(), "one state per slot");
    let assignment = assign_slots(&structure, slots)?;
    let (lambda, omega) = online.shares(sess, &structure);
    let z = sess.params().gt_generator().clone();
    let zs = sess.gt_exp(&z, &online.m_s)?;
    let c0 = sess.gt_mul(d, &zs)?;
    let rows = assignment
        .iter()
        .enumerate()
        .map(|(x, i)| MabeRow {
            slot: slots[*i].clone(),
            corr1: sess.scalar_sub(&lambda[x], &states[*i].lambda_pre),
            corr2: sess.scalar_sub(&omega[x], &states[*i].omega_pre),
        })
        .collect();
    Ok(MabeCiphertext {
        structure,
        c0,
        rows,
    })
}

/// Single-shot encryption using the final shares directly (λ' = λ, ω' = ω,
/// zero corrections). The reference the split path must agree with.
pub fn encrypt_direct(
    sess: &mut Session,
    d: &GTElement,
    structure: AccessStructure,
    dir: &AttributeDirectory,
    t: &[Scalar],
    online: &OnlineRandomness,
) -> Result<MabeCiphertext> {
    let (lambda, omega) = online.shares(sess, &structure);
    let z = sess.params().gt_generator().clone();
    let zs = sess.gt_exp(&z, &online.m_s)?;
    let c0 = sess.gt_mul(d, &zs)?;
    let zero = sess.scalars().zero();
    let mut rows = Vec::with_capacity(structure.rows());
    for (x, attr) in structure.rho.iter().enumerate() {
        let state = IntermediateState {
            attr: attr.clone(),
            t: t[x].clone(),
            lambda_pre: lambda[x].clone(),
            omega_pre: omega[x].clone(),
        };
        rows.push(MabeRow {
            slot: build_slot(sess, &state, dir.get(attr)?)?,
            corr1: zero.clone(),
            corr2: zero.clone(),
        });
    }
    Ok(MabeCiphertext {
        structure,
        c0,
        rows,
    })
}

impl MabeCiphertext {
    /// Rows with corrections folded in: (ê(g,g)^{λ}·ê(g,g)^{a t}, g^t,
    /// g^{b t}·g^{ω}). Uncounted; for oracles.
    pub fn effective_rows(&self, params: &PairingParams) -> Result<Vec<IctSlot>> {
        let mut s = Session::new(params);
        let g = params.generator().clone();
        let z = params.gt_generator().clone();
        self.rows
            .iter()
            .map(|row| {
                let zc = s.gt_exp(&z, &row.corr1)?;
                let gc = s.g1_exp(&g, &row.corr2)?;
                Ok(IctSlot {
                    attr: row.slot.attr.clone(),
                    ict1: s.gt_mul(&row.slot.ict1, &zc)?,
                    ict2: row.slot.ict2.clone(),
                    ict3: s.g1_mul(&row.slot.ict3, &gc)?,
                })
            })
            .collect()
    }

    /// `[u32 l][u32 m][u32 len][policy]` then C0, then per row
    /// `ict1 ‖ ict2 ‖ ict3 ‖ corr1 ‖ corr2 ‖ [u16 len][attribute]`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&(self.structure.rows() as u32).to_be_bytes());
        out.extend_from_slice(&(self.structure.cols() as u32).to_be_bytes());
        let policy = self.structure.policy.as_bytes();
        out.extend_from_slice(&(policy.len() as u32).to_be_bytes());
        out.extend_from_slice(policy);
        out.extend_from_slice(&self.c0.to_bytes());
        for row in &self.rows {
            out.extend_from_slice(&row.slot.ict1.to_bytes());
            out.extend_from_slice(&row.slot.ict2.to_bytes());
            out.extend_from_slice(&row.slot.ict3.to_bytes());
            out.extend_from_slice(&row.corr1.to_bytes());
            out.extend_from_slice(&row.corr2.to_bytes());
            put_label(&mut out, &row.slot.attr);
        }
        out
    }

    pub fn from_bytes(params: &PairingParams, bytes: &[u8]) -> Result<MabeCiphertext> {
        let mut cur = bytes;
        let mut take = |len: usize| -> Result<&[u8]> {
            if cur.len() < len {
                return Err(MabeError::Decode("truncated".into()));
            }
            let (head, tail) = cur.split_at(len);
            cur = tail;
            Ok(head)
        };
        let u32_at = |b: &[u8]| u32::from_be_bytes(b.try_into().expect("four bytes")) as usize;
        let l = u32_at(take(4)?);
        let m = u32_at(take(4)?);
        let plen = u32_at(take(4)?);
        let text = std::str::from_utf8(take(plen)?)
            .map_err(|_| MabeError::Decode("policy is not UTF-8".into()))?;
        let structure = compile(&text.parse::<Policy>()?);
        if structure.rows() != l || structure.cols() != m {
            return Err(MabeError::Decode("header disagrees with policy".into()));
        }
        let f = params.scalars();
        let scalar = |b: &[u8]| {
            f.from_bytes(b)
                .ok_or_else(|| MabeError::Decode("unreduced scalar".into()))
        };
        let c0 = params.gt_from_bytes(take(ELEMENT_BYTES)?)?;
        let mut rows = Vec::with_capacity(l);
        for x in 0..l {
            let ict1 = params.gt_from_bytes(take(ELEMENT_BYTES)?)?;
            let ict2 = params.g1_from_bytes(take(ELEMENT_BYTES)?)?;
            let ict3 = params.g1_from_bytes(take(ELEMENT_BYTES)?)?;
            let corr1 = scalar(take(SCALAR_BYTES)?)?;
            let corr2 = scalar(take(SCALAR_BYTES)?)?;
            let len = u16::from_be_bytes(take(2)?.try_into().expect("two bytes")) as usize;
            let attr = String::from_utf8(take(len)?.to_vec())
                .map_err(|_| MabeError::Decode("label is not UTF-8".into()))?;
            if attr != structure.rho[x] {
                return Err(MabeError::Decode(format!("row {x} label mismatch")));
            }
            rows.push(MabeRow {
                slot: IctSlot {
                    attr,
                    ict1,
                    ict2,
                    ict3,
                },
                corr1,
                corr2,
            });
        }
        if !cur.is_empty() {
            return Err(MabeError::Decode("trailing bytes".into()));
        }
        Ok(MabeCiphertext {
            structure,
            c0,
            rows,
        })
    }
}

/// The user key raised to 1/r, handed to the fog node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformedKey {
    pub keys: BTreeMap<String, G1Element>,
    pub id_hash: G1Element,
}

impl TransformedKey {
    pub fn attributes(&self) -> Vec<&str> {
        self.keys.keys().map(String::as_str).collect()
    }

    /// One element per attribute key plus H1(id)^{1/r}.
    pub fn wire_bytes(&self) -> usize {
        (self.keys.len() + 1) * ELEMENT_BYTES
    }

    /// `H1(id)^{1/r}` then per key `element ‖ [u16 len][attribute]`, with
    /// the label framing.
    pub fn to_bytes(&self) -> (Vec<u8>, usize) {
        let mut out = self.id_hash.to_bytes();
        let mut framing = 0;
        for (attr, k) in &self.keys {
            out.extend_from_slice(&k.to_bytes());
            framing += put_label(&mut out, attr);
        }
        (out, framing)
    }
}

/// Raises every key component to 1/r for a fresh random invertible r.
pub fn transform_key<R: RngCore + ?Sized>(
    sess: &mut Session,
    rng: &mut R,
    uk: &UserAttrKey,
) -> Result<(TransformedKey, Scalar)> {
    let r = sess.scalars().random_nonzero(rng);
    let tk = transform_key_with(sess, uk, &r)?;
    Ok((tk, r))
}

/// One inversion, one hash, one exponentiation per component.
pub fn transform_key_with(sess: &mut Session, uk: &UserAttrKey, r: &Scalar) -> Result<TransformedKey> {
    let inv = sess.scalar_inv(r)?;
    let h = sess.hash_to_g1(&uk.id);
    let id_hash = sess.g1_exp(&h, &inv)?;
    let mut keys = BTreeMap::new();
    for (attr, k) in &uk.keys {
        keys.insert(attr.clone(), sess.g1_exp(k, &inv)?);
    }
    Ok(TransformedKey { keys, id_hash })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialCiphertext {
    pub ct1: GTElement,
    pub ct2: GTElement,
    pub c0: GTElement,
}

impl PartialCiphertext {
    pub fn to_bytes(&self) -> Vec<u8> {
        [self.ct1.to_bytes(), self.ct2.to_bytes(), self.c0.to_bytes()].concat()
    }

    pub fn from_bytes(params: &PairingParams, bytes: &[u8]) -> Result<PartialCiphertext> {
        if bytes.len() != PARTIAL_CIPHERTEXT_BYTES {
            return Err(MabeError::Decode(format!(
                "expected {PARTIAL_CIPHERTEXT_BYTES} bytes, got {}",
                bytes.len()
            )));
        }
        let c: Vec<&[u8]> = bytes.chunks(ELEMENT_BYTES).collect();
        Ok(PartialCiphertext {
            ct1: params.gt_from_bytes(c[0])?,
            ct2: params.gt_from_bytes(c[1])?,
            c0: params.gt_from_bytes(c[2])?,
        })
    }
}

/// Fog-side partial decryption. Per contributing row: two pairings, four
/// exponentiations, one division and four multiplications (the first
/// row's accumulator products are free).
pub fn partial_decrypt(
    sess: &mut Session,
    ct: &MabeCiphertext,
    tk: &TransformedKey,
) -> Result<PartialCiphertext> {
    let attrs = tk.attributes();
    let coeffs = ct
        .structure
        .satisfy(sess.scalars(), &attrs)
        .ok_or(MabeError::PolicyUnsatisfied)?;
    let g = sess.params().generator().clone();
    let z = sess.params().gt_generator().clone();
    let mut ct1: Option<GTElement> = None;
    let mut ct2: Option<GTElement> = None;
    for (x, c) in &coeffs {
        let row = &ct.rows[*x];
        let key = &tk.keys[&ct.structure.rho[*x]];
        let gc = sess.g1_exp(&g, &row.corr2)?;
        let c3 = sess.g1_mul(&row.slot.ict3, &gc)?;
        let num = sess.pair(&tk.id_hash, &c3)?;
        let den = sess.pair(key, &row.slot.ict2)?;
        let q = sess.gt_div(&num, &den)?;
        let term1 = sess.gt_exp(&q, c)?;

        let zc = sess.gt_exp(&z, &row.corr1)?;
        let c1 = sess.gt_mul(&row.slot.ict1, &zc)?;
        let term2 = sess.gt_exp(&c1, c)?;

        ct1 = Some(match ct1 {
            None => term1,
            Some(acc) => sess.gt_mul(&acc, &term1)?,
        });
        ct2 = Some(match ct2 {
            None => term2,
            Some(acc) => sess.gt_mul(&acc, &term2)?,
        });
    }
    let one = sess.params().gt_identity();
    Ok(PartialCiphertext {
        ct1: ct1.unwrap_or_else(|| one.clone()),
        ct2: ct2.unwrap_or(one),
        c0: ct.c0.clone(),
    })
}

/// d = C0 / (CT1^r · CT2).
pub fn full_decrypt(sess: &mut Session, pct: &PartialCiphertext, r: &Scalar) -> Result<GTElement> {
    let unblinded = sess.gt_exp(&pct.ct1, r)?;
    let zs = sess.gt_mul(&unblinded, &pct.ct2)?;
    Ok(sess.gt_div(&pct.c0, &zs)?)
}

/// Attribute names of a key, as a set.
pub fn key_attributes(uk: &UserAttrKey) -> BTreeSet<&str> {
    uk.keys.keys().map(String::as_str).collect()
}

/// Serializable summary of a ciphertext's size, for ledgers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CiphertextBytes {
    pub elements: usize,
    pub scalars: usize,
    pub framing: usize,
}

impl MabeCiphertext {
    pub fn byte_breakdown(&self) -> CiphertextBytes {
        let elements = (1 + 3 * self.rows.len()) * ELEMENT_BYTES;
        let scalars = 2 * self.rows.len() * SCALAR_BYTES;
        CiphertextBytes {
            elements,
            scalars,
            framing: self.to_bytes().len() - elements - scalars,
        }
    }
}
