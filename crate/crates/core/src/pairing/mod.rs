//! Symmetric prime-order bilinear groups with operation counting.
//!
//! Two interchangeable backends sit behind one surface:
//!
//! * `Curve`: the Type-A supersingular curve y² = x³ + x over a 512-bit
//!   prime field with a 160-bit subgroup order and the reduced Tate pairing.
//! * `Mock`: elements are stored as their discrete logarithms modulo a small
//!   prime; the pairing multiplies logarithms. This is an algebraic oracle:
//!   every identity a protocol relies on can be checked on plain integers.
//!
//! All group operations go through a [`Session`], which tallies them in an
//! [`OpCounter`].

mod counter;
mod curve;
mod fp;
mod fp2;
mod scalar;
mod tate;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use rand::RngCore;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use counter::{OpCategory, OpCounter};
pub use scalar::{Scalar, ScalarField, SCALAR_BYTES};

use curve::{Affine, CONSTS};
use fp2::Fp2;

/// Serialized width of every group element, on both backends.
pub const ELEMENT_BYTES: usize = 128;

/// Width of the hash digest fed to the group maps.
pub const DIGEST_BYTES: usize = 32;

/// Default mock group order, 2^31 − 1.
pub const DEFAULT_MOCK_ORDER: u64 = 2_147_483_647;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PairingError {
    #[error("unsupported backend `{0}`")]
    UnsupportedBackend(String),
    #[error("the mock backend needs a non-empty seed")]
    EmptySeed,
    #[error("mock group order {0} must be an odd prime below 2^62")]
    BadMockOrder(u64),
    #[error("element belongs to different pairing parameters")]
    MismatchedParams,
    #[error("malformed element encoding: {0}")]
    Decode(String),
    #[error("scalar is not invertible")]
    NotInvertible,
}

pub type Result<T> = std::result::Result<T, PairingError>;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Curve,
    Mock,
}

impl FromStr for Backend {
    type Err = PairingError;

    fn from_str(s: &str) -> Result<Backend> {
        match s {
            "curve" => Ok(Backend::Curve),
            "mock" => Ok(Backend::Mock),
            other => Err(PairingError::UnsupportedBackend(other.to_string())),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Curve => "curve",
            Backend::Mock => "mock",
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Group {
    Curve,
    Mock(u64),
}

/// A G1 element.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct G1Element(G1Repr);

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum G1Repr {
    Curve(Affine),
    Mock { log: u64, q: u64 },
}

/// A GT element.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GTElement(GtRepr);

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum GtRepr {
    Curve(Fp2),
    Mock { log: u64, q: u64 },
}

fn mock_bytes(log: u64) -> Vec<u8> {
    let mut out = vec![0u8; ELEMENT_BYTES];
    out[ELEMENT_BYTES - 8..].copy_from_slice(&log.to_be_bytes());
    out
}

impl G1Element {
    fn group(&self) -> Group {
        match self.0 {
            G1Repr::Curve(_) => Group::Curve,
            G1Repr::Mock { q, .. } => Group::Mock(q),
        }
    }

    /// Canonical 128-byte encoding: big-endian x ‖ y on the curve (all zeros
    /// for the identity); the logarithm right-aligned in zeros on the mock.
    pub fn to_bytes(&self) -> Vec<u8> {
        match &self.0 {
            G1Repr::Curve(p) => p.to_bytes().to_vec(),
            G1Repr::Mock { log, .. } => mock_bytes(*log),
        }
    }

    /// Compressed encoding zero-padded to `width` bytes (at least 65): x ‖
    /// flag byte on the curve, the right-aligned logarithm on the mock.
    pub fn to_bytes_compressed(&self, width: usize) -> Vec<u8> {
        assert!(width >= 65, "compressed width {width} below 65 bytes");
        let mut out = vec![0u8; width];
        match &self.0 {
            G1Repr::Curve(p) => out[..65].copy_from_slice(&p.to_compressed()),
            G1Repr::Mock { log, .. } => out[width - 8..].copy_from_slice(&log.to_be_bytes()),
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        match &self.0 {
            G1Repr::Curve(p) => p.infinity,
            G1Repr::Mock { log, .. } => *log == 0,
        }
    }

    /// Discrete logarithm base g, available on the mock backend only.
    pub fn mock_log(&self) -> Option<u64> {
        match self.0 {
            G1Repr::Mock { log, .. } => Some(log),
            G1Repr::Curve(_) => None,
        }
    }
}

impl GTElement {
    fn group(&self) -> Group {
        match self.0 {
            GtRepr::Curve(_) => Group::Curve,
            GtRepr::Mock { q, .. } => Group::Mock(q),
        }
    }

    /// Canonical 128-byte encoding: big-endian c0 ‖ c1 of c0 + c1·i on the
    /// curve; the right-aligned logarithm on the mock.
    pub fn to_bytes(&self) -> Vec<u8> {
        match &self.0 {
            GtRepr::Curve(v) => v.to_bytes().to_vec(),
            GtRepr::Mock { log, .. } => mock_bytes(*log),
        }
    }

    pub fn is_identity(&self) -> bool {
        match &self.0 {
            GtRepr::Curve(v) => *v == Fp2::ONE,
            GtRepr::Mock { log, .. } => *log == 0,
        }
    }

    /// Discrete logarithm base ê(g, g), available on the mock backend only.
    pub fn mock_log(&self) -> Option<u64> {
        match self.0 {
            GtRepr::Mock { log, .. } => Some(log),
            GtRepr::Curve(_) => None,
        }
    }
}

struct ParamsInner {
    backend: Backend,
    group: Group,
    seed: Vec<u8>,
    scalars: ScalarField,
    base_field_bits: u32,
    generator: G1Element,
    gt_generator: GTElement,
}

/// Public pairing parameters. Immutable and cheap to clone.
#[derive(Clone)]
pub struct PairingParams(Arc<ParamsInner>);

impl fmt::Debug for PairingParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PairingParams")
            .field("backend", &self.0.backend)
            .field("group_order", self.0.scalars.modulus())
            .field("base_field_bits", &self.0.base_field_bits)
            .finish()
    }
}

impl PartialEq for PairingParams {
    fn eq(&self, other: &PairingParams) -> bool {
        self.0.group == other.0.group && self.0.seed == other.0.seed
    }
}

/// Sets up pairing parameters. The curve backend uses one fixed parameter
/// set; the mock backend uses the default order 2^31 − 1.
pub fn setup_pairing(backend: Backend, seed: &[u8]) -> Result<PairingParams> {
    match backend {
        Backend::Curve => Ok(PairingParams::curve(seed)),
        Backend::Mock => PairingParams::mock(DEFAULT_MOCK_ORDER, seed),
    }
}

/// As [`setup_pairing`], taking the backend by name.
pub fn setup_pairing_by_name(backend: &str, seed: &[u8]) -> Result<PairingParams> {
    setup_pairing(backend.parse()?, seed)
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // these witnesses are deterministic for all 64-bit inputs
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

impl PairingParams {
    fn curve(seed: &[u8]) -> PairingParams {
        let generator = G1Element(G1Repr::Curve(CONSTS.generator));
        let gt_generator = GTElement(GtRepr::Curve(tate::pairing(
            &CONSTS.generator,
            &CONSTS.generator,
        )));
        PairingParams(Arc::new(ParamsInner {
            backend: Backend::Curve,
            group: Group::Curve,
            seed: seed.to_vec(),
            scalars: ScalarField::new(CONSTS.order.clone()),
            base_field_bits: 512,
            generator,
            gt_generator,
        }))
    }

    /// Mock parameters over a caller-chosen prime order.
    pub fn mock(order: u64, seed: &[u8]) -> Result<PairingParams> {
        if seed.is_empty() {
            return Err(PairingError::EmptySeed);
        }
        if order == 2 || order >= 1 << 62 || !is_prime_u64(order) {
            return Err(PairingError::BadMockOrder(order));
        }
        Ok(PairingParams(Arc::new(ParamsInner {
            backend: Backend::Mock,
            group: Group::Mock(order),
            seed: seed.to_vec(),
            scalars: ScalarField::new(BigUint::from(order)),
            base_field_bits: 64 - order.leading_zeros(),
            generator: G1Element(G1Repr::Mock { log: 1, q: order }),
            gt_generator: GTElement(GtRepr::Mock { log: 1, q: order }),
        })))
    }

    pub fn backend(&self) -> Backend {
        self.0.backend
    }

    pub fn group_order(&self) -> &BigUint {
        self.0.scalars.modulus()
    }

    pub fn scalars(&self) -> &ScalarField {
        &self.0.scalars
    }

    pub fn base_field_bits(&self) -> u32 {
        self.0.base_field_bits
    }

    pub fn seed(&self) -> &[u8] {
        &self.0.seed
    }

    pub fn generator(&self) -> &G1Element {
        &self.0.generator
    }

    /// ê(g, g), published with the parameters.
    pub fn gt_generator(&self) -> &GTElement {
        &self.0.gt_generator
    }

    pub fn g1_identity(&self) -> G1Element {
        match self.0.group {
            Group::Curve => G1Element(G1Repr::Curve(Affine::IDENTITY)),
            Group::Mock(q) => G1Element(G1Repr::Mock { log: 0, q }),
        }
    }

    pub fn gt_identity(&self) -> GTElement {
        match self.0.group {
            Group::Curve => GTElement(GtRepr::Curve(Fp2::ONE)),
            Group::Mock(q) => GTElement(GtRepr::Mock { log: 0, q }),
        }
    }

    /// g^log on the mock backend.
    pub fn mock_g1(&self, log: u64) -> Result<G1Element> {
        match self.0.group {
            Group::Mock(q) => Ok(G1Element(G1Repr::Mock { log: log % q, q })),
            Group::Curve => Err(PairingError::MismatchedParams),
        }
    }

    /// ê(g, g)^log on the mock backend.
    pub fn mock_gt(&self, log: u64) -> Result<GTElement> {
        match self.0.group {
            Group::Mock(q) => Ok(GTElement(GtRepr::Mock { log: log % q, q })),
            Group::Curve => Err(PairingError::MismatchedParams),
        }
    }

    fn check_g1(&self, e: &G1Element) -> Result<()> {
        if e.group() == self.0.group {
            Ok(())
        } else {
            Err(PairingError::MismatchedParams)
        }
    }

    fn check_gt(&self, e: &GTElement) -> Result<()> {
        if e.group() == self.0.group {
            Ok(())
        } else {
            Err(PairingError::MismatchedParams)
        }
    }

    fn mock_decode(&self, bytes: &[u8], width: usize, q: u64) -> Result<u64> {
        if bytes.len() != width {
            return Err(PairingError::Decode(format!(
                "expected {width} bytes, got {}",
                bytes.len()
            )));
        }
        if bytes[..width - 8].iter().any(|b| *b != 0) {
            return Err(PairingError::Decode("non-zero padding".into()));
        }
        let log = u64::from_be_bytes(bytes[width - 8..].try_into().expect("8 bytes"));
        if log >= q {
            return Err(PairingError::Decode("logarithm out of range".into()));
        }
        Ok(log)
    }

    pub fn g1_from_bytes(&self, bytes: &[u8]) -> Result<G1Element> {
        match self.0.group {
            Group::Curve => {
                if bytes.len() != ELEMENT_BYTES {
                    return Err(PairingError::Decode(format!(
                        "expected {ELEMENT_BYTES} bytes, got {}",
                        bytes.len()
                    )));
                }
                Affine::from_bytes(bytes)
                    .map(|p| G1Element(G1Repr::Curve(p)))
                    .ok_or_else(|| PairingError::Decode("not a subgroup point".into()))
            }
            Group::Mock(q) => {
                let log = self.mock_decode(bytes, ELEMENT_BYTES, q)?;
                Ok(G1Element(G1Repr::Mock { log, q }))
            }
        }
    }

    /// Inverse of [`G1Element::to_bytes_compressed`].
    pub fn g1_from_bytes_compressed(&self, bytes: &[u8], width: usize) -> Result<G1Element> {
        if bytes.len() != width || width < 65 {
            return Err(PairingError::Decode(format!(
                "expected {width} bytes, got {}",
                bytes.len()
            )));
        }
        match self.0.group {
            Group::Curve => {
                if bytes[65..].iter().any(|b| *b != 0) {
                    return Err(PairingError::Decode("non-zero padding".into()));
                }
                Affine::from_compressed(&bytes[..65])
                    .map(|p| G1Element(G1Repr::Curve(p)))
                    .ok_or_else(|| PairingError::Decode("not a subgroup point".into()))
            }
            Group::Mock(q) => {
                let log = self.mock_decode(bytes, width, q)?;
                Ok(G1Element(G1Repr::Mock { log, q }))
            }
        }
    }

    pub fn gt_from_bytes(&self, bytes: &[u8]) -> Result<GTElement> {
        match self.0.group {
            Group::Curve => {
                let v = Fp2::from_bytes(bytes).ok_or_else(|| {
                    PairingError::Decode(format!(
                        "expected {ELEMENT_BYTES} canonical bytes, got {}",
                        bytes.len()
                    ))
                })?;
                if !tate::is_unitary(&v) {
                    return Err(PairingError::Decode("not in the target group".into()));
                }
                Ok(GTElement(GtRepr::Curve(v)))
            }
            Group::Mock(q) => {
                let log = self.mock_decode(bytes, ELEMENT_BYTES, q)?;
                Ok(GTElement(GtRepr::Mock { log, q }))
            }
        }
    }
}

/// SHA-256 digest; the 32-byte intermediary of both hash-to-group maps.
pub fn digest(data: &[u8]) -> [u8; DIGEST_BYTES] {
    Sha256::digest(data).into()
}

fn mock_mul(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

fn scalar_mod_u64(k: &Scalar, q: u64) -> u64 {
    let r = k.value() % q;
    r.to_u64_digits().first().copied().unwrap_or(0)
}

/// A measurement context: the parameters plus a private operation counter.
///
/// Sessions are never shared implicitly; combine their counters with
/// [`OpCounter::merge`].
pub struct Session {
    params: PairingParams,
    ops: OpCounter,
}

impl Session {
    pub fn new(params: &PairingParams) -> Session {
        Session {
            params: params.clone(),
            ops: OpCounter::default(),
        }
    }

    pub fn params(&self) -> &PairingParams {
        &self.params
    }

    pub fn scalars(&self) -> &ScalarField {
        self.params.scalars()
    }

    pub fn ops(&self) -> OpCounter {
        self.ops
    }

    /// Clears the counter, returning what it held.
    pub fn reset(&mut self) -> OpCounter {
        std::mem::take(&mut self.ops)
    }

    /// Runs `f` and returns its result with the operations it performed.
    pub fn measure<T>(&mut self, f: impl FnOnce(&mut Session) -> T) -> (T, OpCounter) {
        let before = self.ops;
        let out = f(self);
        (out, self.ops.since(&before))
    }

    fn count(&mut self, cat: OpCategory) {
        self.ops.bump(cat, 1);
    }

    pub fn pair(&mut self, a: &G1Element, b: &G1Element) -> Result<GTElement> {
        self.params.check_g1(a)?;
        self.params.check_g1(b)?;
        self.count(OpCategory::Pairing);
        Ok(match (&a.0, &b.0) {
            (G1Repr::Curve(p), G1Repr::Curve(q)) => GTElement(GtRepr::Curve(tate::pairing(p, q))),
            (G1Repr::Mock { log: x, q }, G1Repr::Mock { log: y, .. }) => GTElement(GtRepr::Mock {
                log: mock_mul(*x, *y, *q),
                q: *q,
            }),
            _ => unreachable!("checked above"),
        })
    }

    /// ∏ ê(a_i, b_i), computed with one shared final exponentiation on the
    /// curve. Counts one pairing per term.
    pub fn pair_product(&mut self, pairs: &[(&G1Element, &G1Element)]) -> Result<GTElement> {
        for (a, b) in pairs {
            self.params.check_g1(a)?;
            self.params.check_g1(b)?;
        }
        self.ops.bump(OpCategory::Pairing, pairs.len() as u64);
        Ok(match self.params.0.group {
            Group::Curve => {
                let affine: Vec<(Affine, Affine)> = pairs
                    .iter()
                    .map(|(a, b)| match (&a.0, &b.0) {
                        (G1Repr::Curve(p), G1Repr::Curve(q)) => (*p, *q),
                        _ => unreachable!("checked above"),
                    })
                    .collect();
                GTElement(GtRepr::Curve(tate::multi_pairing(&affine)))
            }
            Group::Mock(q) => {
                let log = pairs.iter().fold(0u64, |acc, (a, b)| {
                    let term = mock_mul(a.mock_log().unwrap(), b.mock_log().unwrap(), q);
                    (acc + term) % q
                });
                GTElement(GtRepr::Mock { log, q })
            }
        })
    }

    pub fn g1_mul(&mut self, a: &G1Element, b: &G1Element) -> Result<G1Element> {
        self.params.check_g1(a)?;
        self.params.check_g1(b)?;
        self.count(OpCategory::Multiplication);
        Ok(match (&a.0, &b.0) {
            (G1Repr::Curve(p), G1Repr::Curve(r)) => G1Element(G1Repr::Curve(p.add(r))),
            (G1Repr::Mock { log: x, q }, G1Repr::Mock { log: y, .. }) => {
                G1Element(G1Repr::Mock { log: (x + y) % q, q: *q })
            }
            _ => unreachable!("checked above"),
        })
    }

    pub fn g1_exp(&mut self, a: &G1Element, k: &Scalar) -> Result<G1Element> {
        self.params.check_g1(a)?;
        self.count(OpCategory::Exponentiation);
        Ok(match &a.0 {
            G1Repr::Curve(p) => G1Element(G1Repr::Curve(p.mul_limbs(&k.limbs()))),
            G1Repr::Mock { log, q } => G1Element(G1Repr::Mock {
                log: mock_mul(*log, scalar_mod_u64(k, *q), *q),
                q: *q,
            }),
        })
    }

    pub fn gt_mul(&mut self, a: &GTElement, b: &GTElement) -> Result<GTElement> {
        self.params.check_gt(a)?;
        self.params.check_gt(b)?;
        self.count(OpCategory::Multiplication);
        Ok(match (&a.0, &b.0) {
            (GtRepr::Curve(x), GtRepr::Curve(y)) => GTElement(GtRepr::Curve(x.mul(y))),
            (GtRepr::Mock { log: x, q }, GtRepr::Mock { log: y, .. }) => {
                GTElement(GtRepr::Mock { log: (x + y) % q, q: *q })
            }
            _ => unreachable!("checked above"),
        })
    }

    /// a / b. Target-group elements are unitary, so the inverse is the
    /// conjugate.
    pub fn gt_div(&mut self, a: &GTElement, b: &GTElement) -> Result<GTElement> {
        self.params.check_gt(a)?;
        self.params.check_gt(b)?;
        self.count(OpCategory::Division);
        Ok(match (&a.0, &b.0) {
            (GtRepr::Curve(x), GtRepr::Curve(y)) => GTElement(GtRepr::Curve(x.mul(&y.conjugate()))),
            (GtRepr::Mock { log: x, q }, GtRepr::Mock { log: y, .. }) => {
                GTElement(GtRepr::Mock { log: (x + q - y) % q, q: *q })
            }
            _ => unreachable!("checked above"),
        })
    }

    pub fn gt_exp(&mut self, a: &GTElement, k: &Scalar) -> Result<GTElement> {
        self.params.check_gt(a)?;
        self.count(OpCategory::Exponentiation);
        Ok(match &a.0 {
            GtRepr::Curve(v) => GTElement(GtRepr::Curve(v.pow(&k.limbs()))),
            GtRepr::Mock { log, q } => GTElement(GtRepr::Mock {
                log: mock_mul(*log, scalar_mod_u64(k, *q), *q),
                q: *q,
            }),
        })
    }

    /// H1: {0,1}* → G1. SHA-256 first, then hash-and-increment onto the
    /// curve (or reduction modulo q on the mock, skipping zero).
    pub fn hash_to_g1(&mut self, data: &[u8]) -> G1Element {
        self.count(OpCategory::Hash);
        let d = digest(data);
        match self.params.0.group {
            Group::Curve => G1Element(G1Repr::Curve(curve::map_to_subgroup(
                &d,
                &CONSTS.cofactor_limbs,
            ))),
            Group::Mock(q) => {
                let mut material = d;
                loop {
                    let log = (BigUint::from_bytes_be(&material) % q)
                        .to_u64_digits()
                        .first()
                        .copied()
                        .unwrap_or(0);
                    if log != 0 {
                        return G1Element(G1Repr::Mock { log, q });
                    }
                    material = digest(&material);
                }
            }
        }
    }

    /// H2: GT → G1, i.e. H1 over the canonical encoding of `y`.
    pub fn hash_gt_to_g1(&mut self, y: &GTElement) -> Result<G1Element> {
        self.params.check_gt(y)?;
        Ok(self.hash_to_g1(&y.to_bytes()))
    }

    /// a − b in Z_q, counted as a subtraction.
    pub fn scalar_sub(&mut self, a: &Scalar, b: &Scalar) -> Scalar {
        self.count(OpCategory::Subtraction);
        self.params.scalars().sub(a, b)
    }

    /// 1/a in Z_q, counted as a division.
    pub fn scalar_inv(&mut self, a: &Scalar) -> Result<Scalar> {
        self.count(OpCategory::Division);
        self.params.scalars().inv(a).ok_or(PairingError::NotInvertible)
    }

    /// A uniformly random target-group element ê(g,g)^t. One exponentiation.
    pub fn random_gt<R: RngCore + ?Sized>(&mut self, rng: &mut R) -> GTElement {
        let t = self.params.scalars().random(rng);
        let base = self.params.gt_generator().clone();
        self.gt_exp(&base, &t).expect("generator matches params")
    }

    /// A uniformly random G1 element g^t. One exponentiation.
    pub fn random_g1<R: RngCore + ?Sized>(&mut self, rng: &mut R) -> G1Element {
        let t = self.params.scalars().random(rng);
        let g = self.params.generator().clone();
        self.g1_exp(&g, &t).expect("generator matches params")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn mock() -> PairingParams {
        setup_pairing(Backend::Mock, b"42").unwrap()
    }

    #[test]
    fn mock_setup_is_deterministic() {
        assert_eq!(mock(), mock());
        assert_eq!(
            setup_pairing(Backend::Mock, b"").unwrap_err(),
            PairingError::EmptySeed
        );
        assert!(matches!(
            setup_pairing_by_name("type-f", b"1"),
            Err(PairingError::UnsupportedBackend(_))
        ));
        assert!(PairingParams::mock(1_000_000, b"x").is_err());
        assert!(PairingParams::mock(1_000_003, b"x").is_ok());
    }

    #[test]
    fn mock_bilinearity_examples() {
        let p = mock();
        let mut s = Session::new(&p);
        let a = p.mock_g1(3).unwrap();
        let b = p.mock_g1(5).unwrap();
        let e = s.pair(&a, &b).unwrap();
        assert_eq!(e, p.mock_gt(15).unwrap());
        assert_eq!(s.pair(&b, &a).unwrap(), e);
        assert_eq!(s.ops().pairings, 2);
        assert!(s.pair(&p.g1_identity(), &a).unwrap().is_identity());
        assert!(!s.pair(p.generator(), p.generator()).unwrap().is_identity());
    }

    #[test]
    fn mismatched_params_are_rejected() {
        let p = mock();
        let other = PairingParams::mock(1_000_003, b"x").unwrap();
        let mut s = Session::new(&p);
        let foreign = other.mock_g1(2).unwrap();
        assert_eq!(
            s.pair(&foreign, p.generator()).unwrap_err(),
            PairingError::MismatchedParams
        );
        // a failed operation is not counted
        assert_eq!(s.ops().pairings, 0);
    }

    #[test]
    fn hash_contracts() {
        for p in [mock(), setup_pairing(Backend::Curve, b"").unwrap()] {
            let mut s = Session::new(&p);
            let a = s.hash_to_g1(b"a");
            assert_eq!(a, s.hash_to_g1(b"a"));
            assert_ne!(a, s.hash_to_g1(b"b"));
            assert!(!a.is_identity());
            assert_eq!(s.ops().hashes, 3);
            let y = s.random_gt(&mut ChaCha20Rng::seed_from_u64(1));
            let h2 = s.hash_gt_to_g1(&y).unwrap();
            assert_eq!(h2, s.hash_to_g1(&y.to_bytes()));
        }
        assert_eq!(digest(b"anything").len(), 32);
    }

    #[test]
    fn hashing_is_not_homomorphic() {
        let p = mock();
        let mut s = Session::new(&p);
        let y = p.mock_gt(77).unwrap();
        let d = p.scalars().from_u64(5);
        let hash_then_exp = {
            let h = s.hash_gt_to_g1(&y).unwrap();
            s.g1_exp(&h, &d).unwrap()
        };
        let exp_then_hash = {
            let yd = s.gt_exp(&y, &d).unwrap();
            s.hash_gt_to_g1(&yd).unwrap()
        };
        assert_ne!(hash_then_exp, exp_then_hash);
    }

    #[test]
    fn element_encodings() {
        for p in [mock(), setup_pairing(Backend::Curve, b"").unwrap()] {
            let g = p.generator();
            let bytes = g.to_bytes();
            assert_eq!(bytes.len(), ELEMENT_BYTES);
            assert_eq!(&p.g1_from_bytes(&bytes).unwrap(), g);
            assert!(matches!(
                p.g1_from_bytes(&bytes[..127]),
                Err(PairingError::Decode(_))
            ));
            let e = p.gt_generator();
            assert_eq!(&p.gt_from_bytes(&e.to_bytes()).unwrap(), e);
            assert!(p.gt_from_bytes(&[7u8; 127]).is_err());
            let c = g.to_bytes_compressed(96);
            assert_eq!(c.len(), 96);
            assert_eq!(&p.g1_from_bytes_compressed(&c, 96).unwrap(), g);
        }
    }

    #[test]
    fn curve_bilinearity_small_exponents() {
        let p = setup_pairing(Backend::Curve, b"").unwrap();
        let f = p.scalars();
        let mut s = Session::new(&p);
        let g = p.generator().clone();
        let ga = s.g1_exp(&g, &f.from_u64(3)).unwrap();
        let gb = s.g1_exp(&g, &f.from_u64(5)).unwrap();
        let lhs = s.pair(&ga, &gb).unwrap();
        let rhs = s.gt_exp(p.gt_generator(), &f.from_u64(15)).unwrap();
        assert_eq!(lhs, rhs);
        let prod = s.pair_product(&[(&ga, &g), (&gb, &g)]).unwrap();
        assert_eq!(prod, s.gt_exp(p.gt_generator(), &f.from_u64(8)).unwrap());
    }
}
