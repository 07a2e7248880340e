//! Multiplicatively homomorphic encryption with one-hop proxy re-encryption.
//!
//! With `Z = ê(g,g)`, a key pair is `(sk, pk1 = Z^sk, pk2 = g^sk)`.
//!
//! ```text
//! second level:  (pk2^y, m·Z^y)     decrypt: c2 / ê(c1, g)^{1/sk}
//! first level:   (pk1^y, m·Z^y)     decrypt: c2 / c1^{1/sk}
//! ```
//!
//! The re-encryption key from A to B is `pk2_B^{1/sk_A} = g^{sk_B/sk_A}`, so
//! `ê(pk2_A^y, rk) = pk1_B^y` turns a second-level ciphertext under A into a
//! first-level one under B. Products of ciphertexts at the same level under
//! the same key decrypt to products of plaintexts.

use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pairing::{
    G1Element, GTElement, PairingError, PairingParams, Scalar, Session, ELEMENT_BYTES,
};

pub const CIPHERTEXT_BYTES: usize = 2 * ELEMENT_BYTES;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomoError {
    #[error("operands are at different levels")]
    LevelMismatch,
    #[error("expected a {0:?}-level ciphertext")]
    WrongLevel(Level),
    #[error("ciphertext reference {0} is out of range")]
    BadOperand(usize),
    #[error("malformed ciphertext: {0}")]
    Decode(String),
    #[error(transparent)]
    Pairing(#[from] PairingError),
}

pub type Result<T> = std::result::Result<T, HomoError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    /// Owner level; can be re-encrypted.
    Second,
    /// Re-encrypted; can only be evaluated on and decrypted.
    First,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomoPublicKey {
    pub pk1: GTElement,
    pub pk2: G1Element,
}

#[derive(Clone, Debug)]
pub struct HomoKeyPair {
    sk: Scalar,
    pub public: HomoPublicKey,
}

impl HomoKeyPair {
    pub fn secret(&self) -> &Scalar {
        &self.sk
    }
}

/// Random secret key; see [`keygen_with`].
pub fn keygen<R: RngCore + ?Sized>(sess: &mut Session, rng: &mut R) -> Result<HomoKeyPair> {
    let sk = sess.scalars().random_nonzero(rng);
    keygen_with(sess, sk)
}

/// Two exponentiations and one pairing for the `pk1 = ê(pk2, g)` check.
pub fn keygen_with(sess: &mut Session, sk: Scalar) -> Result<HomoKeyPair> {
    let g = sess.params().generator().clone();
    let z = sess.params().gt_generator().clone();
    let pk2 = sess.g1_exp(&g, &sk)?;
    let pk1 = sess.gt_exp(&z, &sk)?;
    let check = sess.pair(&pk2, &g)?;
    assert_eq!(check, pk1, "inconsistent homomorphic key pair");
    Ok(HomoKeyPair {
        sk,
        public: HomoPublicKey { pk1, pk2 },
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FirstComponent {
    Second(G1Element),
    First(GTElement),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomoCiphertext {
    pub c1: FirstComponent,
    pub c2: GTElement,
}

impl HomoCiphertext {
    pub fn level(&self) -> Level {
        match self.c1 {
            FirstComponent::Second(_) => Level::Second,
            FirstComponent::First(_) => Level::First,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let c1 = match &self.c1 {
            FirstComponent::Second(e) => e.to_bytes(),
            FirstComponent::First(e) => e.to_bytes(),
        };
        [c1, self.c2.to_bytes()].concat()
    }

    /// The level is not encoded and must come from context.
    pub fn from_bytes(params: &PairingParams, bytes: &[u8], level: Level) -> Result<HomoCiphertext> {
        if bytes.len() != CIPHERTEXT_BYTES {
            return Err(HomoError::Decode(format!(
                "expected {CIPHERTEXT_BYTES} bytes, got {}",
                bytes.len()
            )));
        }
        let (a, b) = bytes.split_at(ELEMENT_BYTES);
        let c1 = match level {
            Level::Second => FirstComponent::Second(params.g1_from_bytes(a)?),
            Level::First => FirstComponent::First(params.gt_from_bytes(a)?),
        };
        Ok(HomoCiphertext {
            c1,
            c2: params.gt_from_bytes(b)?,
        })
    }
}

pub fn encrypt<R: RngCore + ?Sized>(
    sess: &mut Session,
    rng: &mut R,
    m: &GTElement,
    pk: &HomoPublicKey,
    level: Level,
) -> Result<HomoCiphertext> {
    let y = sess.scalars().random(rng);
    encrypt_with(sess, m, pk, level, &y)
}

/// Two exponentiations and one multiplication.
pub fn encrypt_with(
    sess: &mut Session,
    m: &GTElement,
    pk: &HomoPublicKey,
    level: Level,
    y: &Scalar,
) -> Result<HomoCiphertext> {
    let c1 = match level {
        Level::Second => FirstComponent::Second(sess.g1_exp(&pk.pk2, y)?),
        Level::First => FirstComponent::First(sess.gt_exp(&pk.pk1, y)?),
    };
    let z = sess.params().gt_generator().clone();
    let zy = sess.gt_exp(&z, y)?;
    Ok(HomoCiphertext {
        c1,
        c2: sess.gt_mul(m, &zy)?,
    })
}

pub fn eval_mul<R: RngCore + ?Sized>(
    sess: &mut Session,
    rng: &mut R,
    a: &HomoCiphertext,
    b: &HomoCiphertext,
    pk: &HomoPublicKey,
) -> Result<HomoCiphertext> {
    let fresh = sess.scalars().random(rng);
    eval_mul_with(sess, a, b, pk, &fresh)
}

/// Component-wise product rerandomized by a fresh encryption of 1:
/// four multiplications and two exponentiations.
pub fn eval_mul_with(
    sess: &mut Session,
    a: &HomoCiphertext,
    b: &HomoCiphertext,
    pk: &HomoPublicKey,
    fresh: &Scalar,
) -> Result<HomoCiphertext> {
    let c1 = match (&a.c1, &b.c1) {
        (FirstComponent::Second(x), FirstComponent::Second(y)) => {
            let prod = sess.g1_mul(x, y)?;
            let mask = sess.g1_exp(&pk.pk2, fresh)?;
            FirstComponent::Second(sess.g1_mul(&prod, &mask)?)
        }
        (FirstComponent::First(x), FirstComponent::First(y)) => {
            let prod = sess.gt_mul(x, y)?;
            let mask = sess.gt_exp(&pk.pk1, fresh)?;
            FirstComponent::First(sess.gt_mul(&prod, &mask)?)
        }
        _ => return Err(HomoError::LevelMismatch),
    };
    let z = sess.params().gt_generator().clone();
    let prod = sess.gt_mul(&a.c2, &b.c2)?;
    let mask = sess.gt_exp(&z, fresh)?;
    Ok(HomoCiphertext {
        c1,
        c2: sess.gt_mul(&prod, &mask)?,
    })
}

/// Multiplies the plaintext by a public constant: one multiplication.
pub fn mul_const(sess: &mut Session, ct: &HomoCiphertext, k: &GTElement) -> Result<HomoCiphertext> {
    Ok(HomoCiphertext {
        c1: ct.c1.clone(),
        c2: sess.gt_mul(&ct.c2, k)?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomoReKey {
    pub rk: G1Element,
}

impl HomoReKey {
    /// ê(rk, pk2_source) = ê(pk2_target, g). Uncounted.
    pub fn is_well_formed(&self, params: &PairingParams, source: &HomoPublicKey, target: &HomoPublicKey) -> bool {
        let mut s = Session::new(params);
        let g = params.generator().clone();
        let lhs = s.pair(&self.rk, &source.pk2);
        let rhs = s.pair(&target.pk2, &g);
        matches!((lhs, rhs), (Ok(l), Ok(r)) if l == r)
    }
}

/// One inversion and one exponentiation. Needs no secret of the target.
pub fn rekeygen(sess: &mut Session, source_sk: &Scalar, target_pk2: &G1Element) -> Result<HomoReKey> {
    let inv = sess.scalar_inv(source_sk)?;
    Ok(HomoReKey {
        rk: sess.g1_exp(target_pk2, &inv)?,
    })
}

/// One pairing; the second component passes through.
pub fn reencrypt(sess: &mut Session, ct: &HomoCiphertext, rk: &HomoReKey) -> Result<HomoCiphertext> {
    let FirstComponent::Second(c1) = &ct.c1 else {
        return Err(HomoError::WrongLevel(Level::Second));
    };
    Ok(HomoCiphertext {
        c1: FirstComponent::First(sess.pair(c1, &rk.rk)?),
        c2: ct.c2.clone(),
    })
}

/// Second level: P + E + 2D. First level: E + 2D.
pub fn decrypt(sess: &mut Session, ct: &HomoCiphertext, sk: &Scalar) -> Result<GTElement> {
    let base = match &ct.c1 {
        FirstComponent::Second(c1) => {
            let g = sess.params().generator().clone();
            sess.pair(c1, &g)?
        }
        FirstComponent::First(c1) => c1.clone(),
    };
    let inv = sess.scalar_inv(sk)?;
    let mask = sess.gt_exp(&base, &inv)?;
    Ok(sess.gt_div(&ct.c2, &mask)?)
}

/// One step of an evaluation program. Operand references index the query's
/// ciphertext list; the accumulator starts at operand 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalOp {
    Mul(usize),
    MulConst(GTElement),
}

/// Query message ⟨CT, f⟩.
#[derive(Clone, Debug)]
pub struct Query {
    pub operands: Vec<HomoCiphertext>,
    pub program: Vec<EvalOp>,
}

/// Runs a program under `pk`. Evaluating the empty program returns operand 0.
pub fn evaluate<R: RngCore + ?Sized>(
    sess: &mut Session,
    rng: &mut R,
    query: &Query,
    pk: &HomoPublicKey,
) -> Result<HomoCiphertext> {
    let mut acc = query.operands.first().ok_or(HomoError::BadOperand(0))?.clone();
    for op in &query.program {
        acc = match op {
            EvalOp::Mul(i) => {
                let rhs = query.operands.get(*i).ok_or(HomoError::BadOperand(*i))?;
                eval_mul(sess, rng, &acc, rhs, pk)?
            }
            EvalOp::MulConst(k) => mul_const(sess, &acc, k)?,
        };
    }
    Ok(acc)
}

impl EvalOp {
    /// `MUL <u32 index>` is tag 1, `MUL_CONST <element>` is tag 2.
    pub fn encode(program: &[EvalOp]) -> Vec<u8> {
        let mut out = (program.len() as u32).to_be_bytes().to_vec();
        for op in program {
            match op {
                EvalOp::Mul(i) => {
                    out.push(1);
                    out.extend_from_slice(&(*i as u32).to_be_bytes());
                }
                EvalOp::MulConst(k) => {
                    out.push(2);
                    out.extend_from_slice(&k.to_bytes());
                }
            }
        }
        out
    }

    pub fn decode(params: &PairingParams, bytes: &[u8]) -> Result<Vec<EvalOp>> {
        let bad = || HomoError::Decode("bad program".into());
        let (head, mut rest) = bytes.split_at_checked(4).ok_or_else(bad)?;
        let n = u32::from_be_bytes(head.try_into().expect("four bytes"));
        let mut ops = Vec::new();
        for _ in 0..n {
            let (&tag, tail) = rest.split_first().ok_or_else(bad)?;
            rest = tail;
            match tag {
                1 => {
                    let (i, tail) = rest.split_at_checked(4).ok_or_else(bad)?;
                    ops.push(EvalOp::Mul(u32::from_be_bytes(i.try_into().expect("four bytes")) as usize));
                    rest = tail;
                }
                2 => {
                    let (k, tail) = rest.split_at_checked(ELEMENT_BYTES).ok_or_else(bad)?;
                    ops.push(EvalOp::MulConst(params.gt_from_bytes(k)?));
                    rest = tail;
                }
                _ => return Err(bad()),
            }
        }
        if !rest.is_empty() {
            return Err(bad());
        }
        Ok(ops)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairing::{setup_pairing, Backend, OpCounter};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn mock() -> (PairingParams, ChaCha20Rng) {
        (setup_pairing(Backend::Mock, b"homo").unwrap(), ChaCha20Rng::seed_from_u64(3))
    }

    #[test]
    fn keygen_logs_and_cost() {
        let (params, _) = mock();
        let mut s = Session::new(&params);
        let four = s.scalars().from_u64(4);
        let (kp, ops) = s.measure(|s| keygen_with(s, four).unwrap());
        assert_eq!(kp.public.pk2.mock_log(), Some(4));
        assert_eq!(kp.public.pk1.mock_log(), Some(4));
        assert_eq!(
            ops,
            OpCounter { pairings: 1, exponentiations: 2, ..Default::default() }
        );
    }

    #[test]
    fn encrypt_shape_and_cost() {
        let (params, mut rng) = mock();
        let mut s = Session::new(&params);
        let kp = keygen(&mut s, &mut rng).unwrap();
        let y = s.scalars().from_u64(9);
        let one = params.gt_identity();
        let (ct, ops) = s.measure(|s| encrypt_with(s, &one, &kp.public, Level::Second, &y).unwrap());
        assert_eq!(ct.c2.mock_log(), Some(9));
        assert_eq!(
            ops,
            OpCounter { exponentiations: 2, multiplications: 1, ..Default::default() }
        );
        assert_eq!(ct.to_bytes().len(), 256);
        assert_eq!(HomoCiphertext::from_bytes(&params, &ct.to_bytes(), Level::Second).unwrap(), ct);
        let (out, ops) = s.measure(|s| decrypt(s, &ct, kp.secret()).unwrap());
        assert_eq!(out, one);
        assert_eq!(ops.pairings, 1);
        assert_eq!(ops.exponentiations, 1);
    }

    #[test]
    fn eval_mul_adds_exponents() {
        let (params, mut rng) = mock();
        let mut s = Session::new(&params);
        let kp = keygen(&mut s, &mut rng).unwrap();
        for level in [Level::Second, Level::First] {
            let a = encrypt(&mut s, &mut rng, &params.mock_gt(3).unwrap(), &kp.public, level).unwrap();
            let b = encrypt(&mut s, &mut rng, &params.mock_gt(5).unwrap(), &kp.public, level).unwrap();
            let (c, ops) = s.measure(|s| eval_mul(s, &mut rng, &a, &b, &kp.public).unwrap());
            assert_eq!(
                ops,
                OpCounter { exponentiations: 2, multiplications: 4, ..Default::default() }
            );
            assert_eq!(decrypt(&mut s, &c, kp.secret()).unwrap().mock_log(), Some(8));
            let c2 = eval_mul(&mut s, &mut rng, &a, &b, &kp.public).unwrap();
            assert_ne!(c, c2);
            assert_eq!(decrypt(&mut s, &c2, kp.secret()).unwrap().mock_log(), Some(8));
            let id = encrypt(&mut s, &mut rng, &params.gt_identity(), &kp.public, level).unwrap();
            let c = eval_mul(&mut s, &mut rng, &a, &id, &kp.public).unwrap();
            assert_eq!(decrypt(&mut s, &c, kp.secret()).unwrap().mock_log(), Some(3));
        }
        let a = encrypt(&mut s, &mut rng, &params.mock_gt(3).unwrap(), &kp.public, Level::Second).unwrap();
        let b = encrypt(&mut s, &mut rng, &params.mock_gt(3).unwrap(), &kp.public, Level::First).unwrap();
        assert_eq!(eval_mul(&mut s, &mut rng, &a, &b, &kp.public), Err(HomoError::LevelMismatch));
    }

    #[test]
    fn rekey_logs_and_switching() {
        let (params, mut rng) = mock();
        let mut s = Session::new(&params);
        let f = s.scalars().clone();
        let a = keygen_with(&mut s, f.from_u64(4)).unwrap();
        let b = keygen_with(&mut s, f.from_u64(12)).unwrap();
        let (rk, ops) = s.measure(|s| rekeygen(s, a.secret(), &b.public.pk2).unwrap());
        assert_eq!(rk.rk.mock_log(), Some(3));
        assert_eq!(
            ops,
            OpCounter { exponentiations: 1, divisions: 1, ..Default::default() }
        );
        assert!(rk.is_well_formed(&params, &a.public, &b.public));
        assert!(!rk.is_well_formed(&params, &b.public, &a.public));
        let own = rekeygen(&mut s, a.secret(), &a.public.pk2).unwrap();
        assert_eq!(own.rk, *params.generator());

        let m = s.random_gt(&mut rng);
        let ct = encrypt(&mut s, &mut rng, &m, &a.public, Level::Second).unwrap();
        let (moved, ops) = s.measure(|s| reencrypt(s, &ct, &rk).unwrap());
        assert_eq!(ops, OpCounter { pairings: 1, ..Default::default() });
        assert_eq!(moved.level(), Level::First);
        assert_eq!(decrypt(&mut s, &moved, b.secret()).unwrap(), m);
        assert_ne!(decrypt(&mut s, &moved, a.secret()).unwrap(), m);
        assert_eq!(reencrypt(&mut s, &moved, &rk), Err(HomoError::WrongLevel(Level::Second)));
    }

    #[test]
    fn program_pipeline() {
        let (params, mut rng) = mock();
        let mut s = Session::new(&params);
        let pf1 = keygen(&mut s, &mut rng).unwrap();
        let pf2 = keygen(&mut s, &mut rng).unwrap();
        let cts: Vec<_> = [2u64, 7, 11]
            .iter()
            .map(|l| encrypt(&mut s, &mut rng, &params.mock_gt(*l).unwrap(), &pf1.public, Level::Second).unwrap())
            .collect();
        let program = vec![EvalOp::Mul(1), EvalOp::MulConst(params.mock_gt(100).unwrap()), EvalOp::Mul(2)];
        assert_eq!(EvalOp::decode(&params, &EvalOp::encode(&program)).unwrap(), program);
        let query = Query { operands: cts, program };
        let res = evaluate(&mut s, &mut rng, &query, &pf1.public).unwrap();
        let rk = rekeygen(&mut s, pf1.secret(), &pf2.public.pk2).unwrap();
        let moved = reencrypt(&mut s, &res, &rk).unwrap();
        let extra = encrypt(&mut s, &mut rng, &params.mock_gt(5).unwrap(), &pf2.public, Level::First).unwrap();
        let out = eval_mul(&mut s, &mut rng, &moved, &extra, &pf2.public).unwrap();
        assert_eq!(decrypt(&mut s, &out, pf2.secret()).unwrap().mock_log(), Some(125));
        let bad = Query { operands: query.operands.clone(), program: vec![EvalOp::Mul(9)] };
        assert_eq!(evaluate(&mut s, &mut rng, &bad, &pf1.public).unwrap_err(), HomoError::BadOperand(9));
    }

    #[test]
    fn curve_pipeline() {
        let params = setup_pairing(Backend::Curve, b"homo").unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let mut s = Session::new(&params);
        let pf1 = keygen(&mut s, &mut rng).unwrap();
        let pf2 = keygen(&mut s, &mut rng).unwrap();
        let (m1, m2) = (s.random_gt(&mut rng), s.random_gt(&mut rng));
        let a = encrypt(&mut s, &mut rng, &m1, &pf1.public, Level::Second).unwrap();
        let b = encrypt(&mut s, &mut rng, &m2, &pf1.public, Level::Second).unwrap();
        let c = eval_mul(&mut s, &mut rng, &a, &b, &pf1.public).unwrap();
        let rk = rekeygen(&mut s, pf1.secret(), &pf2.public.pk2).unwrap();
        assert!(rk.is_well_formed(&params, &pf1.public, &pf2.public));
        let moved = reencrypt(&mut s, &c, &rk).unwrap();
        let moved = HomoCiphertext::from_bytes(&params, &moved.to_bytes(), Level::First).unwrap();
        let expect = s.gt_mul(&m1, &m2).unwrap();
        assert_eq!(decrypt(&mut s, &moved, pf2.secret()).unwrap(), expect);
    }
}
