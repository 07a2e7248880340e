//! Arithmetic in the 512-bit base field of the Type-A curve.
//!
//! Elements are kept in Montgomery form (`a·R mod p`, `R = 2^512`) over eight
//! little-endian 64-bit limbs.

use std::sync::LazyLock;

use num_bigint::BigUint;

pub(crate) const LIMBS: usize = 8;
pub(crate) const BYTES: usize = 64;

/// p = h·r − 1, p ≡ 3 (mod 4).
pub(crate) const P: [u64; LIMBS] = [
    0xcf6230c28e284d97,
    0x2539e8ff9b4f30a3,
    0x459e54dab7ba5be9,
    0xa7afdaf9b049744a,
    0x28d1f80010940622,
    0x364bb946f5ed8396,
    0x6edef8ce96e7217e,
    0xa7a73868e95fba88,
];

/// R mod p.
const R1: [u64; LIMBS] = [
    0x309dcf3d71d7b269,
    0xdac6170064b0cf5c,
    0xba61ab254845a416,
    0x585025064fb68bb5,
    0xd72e07ffef6bf9dd,
    0xc9b446b90a127c69,
    0x912107316918de81,
    0x5858c79716a04577,
];

/// R^2 mod p.
const R2: [u64; LIMBS] = [
    0xde1edb425a3ca657,
    0x7eff257402de9a1d,
    0x1f0d551eb7d063c8,
    0xea1c555261184d6a,
    0x6238350cf8d89111,
    0xf227d4a91dd70835,
    0x9e1b11b7775a00db,
    0x96ff57c172d7593d,
];

/// −p^{-1} mod 2^64.
const INV: u64 = 0xc1fc53896318fdd9;

struct Exponents {
    #[cfg_attr(not(test), allow(dead_code))]
    p_minus_2: Vec<u64>,
    sqrt: Vec<u64>,
}

static MODULUS: LazyLock<BigUint> = LazyLock::new(modulus);

static EXP: LazyLock<Exponents> = LazyLock::new(|| {
    let p = modulus();
    Exponents {
        p_minus_2: (&p - 2u32).to_u64_digits(),
        sqrt: ((&p + 1u32) >> 2u32).to_u64_digits(),
    }
});

pub(crate) fn modulus() -> BigUint {
    BigUint::from_slice(&to_u32_digits(&P))
}

fn to_u32_digits(limbs: &[u64]) -> Vec<u32> {
    limbs
        .iter()
        .flat_map(|l| [*l as u32, (*l >> 32) as u32])
        .collect()
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) struct Fp([u64; LIMBS]);

impl std::fmt::Debug for Fp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Fp(0x{})", hex_be(&self.to_bytes()))
    }
}

fn hex_be(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[inline]
fn adc(a: u64, b: u64, carry: u64) -> (u64, u64) {
    let t = a as u128 + b as u128 + carry as u128;
    (t as u64, (t >> 64) as u64)
}

#[inline]
fn sbb(a: u64, b: u64, borrow: u64) -> (u64, u64) {
    let t = (a as u128).wrapping_sub(b as u128 + borrow as u128);
    (t as u64, (t >> 127) as u64)
}

#[inline]
fn mac(acc: u64, a: u64, b: u64, carry: u64) -> (u64, u64) {
    let t = acc as u128 + (a as u128) * (b as u128) + carry as u128;
    (t as u64, (t >> 64) as u64)
}

/// a − p if a ≥ p (with `hi` an extra top word), else a.
#[inline]
fn reduce_once(a: [u64; LIMBS], hi: u64) -> [u64; LIMBS] {
    let mut d = [0u64; LIMBS];
    let mut borrow = 0;
    for i in 0..LIMBS {
        let (v, b) = sbb(a[i], P[i], borrow);
        d[i] = v;
        borrow = b;
    }
    // hi:a ≥ p exactly when the subtraction does not underflow the top word.
    if hi != 0 || borrow == 0 {
        d
    } else {
        a
    }
}

#[inline]
fn mont_mul(a: &[u64; LIMBS], b: &[u64; LIMBS]) -> [u64; LIMBS] {
    // schoolbook product into 16 limbs, then word-by-word reduction
    let mut t = [0u64; 2 * LIMBS];
    for i in 0..LIMBS {
        let mut carry = 0;
        for j in 0..LIMBS {
            let (v, c) = mac(t[i + j], a[i], b[j], carry);
            t[i + j] = v;
            carry = c;
        }
        t[i + LIMBS] = carry;
    }
    let mut hi_carry = 0;
    for i in 0..LIMBS {
        let m = t[i].wrapping_mul(INV);
        let mut carry = 0;
        for j in 0..LIMBS {
            let (v, c) = mac(t[i + j], m, P[j], carry);
            t[i + j] = v;
            carry = c;
        }
        let (v, c) = adc(t[i + LIMBS], carry, hi_carry);
        t[i + LIMBS] = v;
        hi_carry = c;
    }
    let mut out = [0u64; LIMBS];
    out.copy_from_slice(&t[LIMBS..]);
    reduce_once(out, hi_carry)
}

impl Fp {
    pub(crate) const ZERO: Fp = Fp([0; LIMBS]);
    pub(crate) const ONE: Fp = Fp(R1);

    #[cfg(test)]
    pub(crate) fn from_u64(v: u64) -> Fp {
        let mut l = [0u64; LIMBS];
        l[0] = v;
        Fp(mont_mul(&l, &R2))
    }

    /// Interprets `bytes` as a big-endian integer and reduces it modulo p.
    pub(crate) fn from_bytes_reduced(bytes: &[u8]) -> Fp {
        let v = BigUint::from_bytes_be(bytes) % &*MODULUS;
        Fp::from_canonical_limbs(&v.to_u64_digits())
    }

    /// Strict decoding of a 64-byte big-endian canonical value (< p).
    pub(crate) fn from_bytes(bytes: &[u8]) -> Option<Fp> {
        if bytes.len() != BYTES {
            return None;
        }
        let mut l = [0u64; LIMBS];
        for (i, chunk) in bytes.rchunks(8).enumerate() {
            l[i] = u64::from_be_bytes(chunk.try_into().expect("8-byte chunk"));
        }
        if reduce_once(l, 0) != l {
            return None;
        }
        Some(Fp(mont_mul(&l, &R2)))
    }

    fn from_canonical_limbs(digits: &[u64]) -> Fp {
        let mut l = [0u64; LIMBS];
        l[..digits.len()].copy_from_slice(digits);
        Fp(mont_mul(&l, &R2))
    }

    fn canonical(&self) -> [u64; LIMBS] {
        let mut one = [0u64; LIMBS];
        one[0] = 1;
        mont_mul(&self.0, &one)
    }

    pub(crate) fn to_bytes(&self) -> [u8; BYTES] {
        let c = self.canonical();
        let mut out = [0u8; BYTES];
        for (i, chunk) in out.rchunks_mut(8).enumerate() {
            chunk.copy_from_slice(&c[i].to_be_bytes());
        }
        out
    }

    pub(crate) fn to_biguint(&self) -> BigUint {
        BigUint::from_slice(&to_u32_digits(&self.canonical()))
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.0 == [0; LIMBS]
    }

    /// Parity of the canonical representative.
    pub(crate) fn is_odd(&self) -> bool {
        self.canonical()[0] & 1 == 1
    }

    pub(crate) fn add(&self, rhs: &Fp) -> Fp {
        let mut s = [0u64; LIMBS];
        let mut carry = 0;
        for i in 0..LIMBS {
            let (v, c) = adc(self.0[i], rhs.0[i], carry);
            s[i] = v;
            carry = c;
        }
        Fp(reduce_once(s, carry))
    }

    pub(crate) fn sub(&self, rhs: &Fp) -> Fp {
        let mut d = [0u64; LIMBS];
        let mut borrow = 0;
        for i in 0..LIMBS {
            let (v, b) = sbb(self.0[i], rhs.0[i], borrow);
            d[i] = v;
            borrow = b;
        }
        if borrow != 0 {
            let mut carry = 0;
            for i in 0..LIMBS {
                let (v, c) = adc(d[i], P[i], carry);
                d[i] = v;
                carry = c;
            }
        }
        Fp(d)
    }

    pub(crate) fn neg(&self) -> Fp {
        Fp::ZERO.sub(self)
    }

    pub(crate) fn double(&self) -> Fp {
        self.add(self)
    }

    pub(crate) fn mul(&self, rhs: &Fp) -> Fp {
        Fp(mont_mul(&self.0, &rhs.0))
    }

    pub(crate) fn square(&self) -> Fp {
        Fp(mont_mul(&self.0, &self.0))
    }

    /// Left-to-right square-and-multiply over little-endian exponent limbs.
    pub(crate) fn pow(&self, exp: &[u64]) -> Fp {
        let mut acc = Fp::ONE;
        for limb in exp.iter().rev() {
            for bit in (0..64).rev() {
                acc = acc.square();
                if (limb >> bit) & 1 == 1 {
                    acc = acc.mul(self);
                }
            }
        }
        acc
    }

    pub(crate) fn inverse(&self) -> Option<Fp> {
        if self.is_zero() {
            return None;
        }
        let inv = self.to_biguint().modinv(&MODULUS)?;
        Some(Fp::from_canonical_limbs(&inv.to_u64_digits()))
    }

    /// Fermat inversion, kept as an independent check of `inverse`.
    #[cfg(test)]
    fn inverse_fermat(&self) -> Fp {
        self.pow(&EXP.p_minus_2)
    }

    /// Square root, when one exists. Uses p ≡ 3 (mod 4).
    pub(crate) fn sqrt(&self) -> Option<Fp> {
        let root = self.pow(&EXP.sqrt);
        (root.square() == *self).then_some(root)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(fp: &Fp) -> BigUint {
        fp.to_biguint()
    }

    #[test]
    fn constants_match_modulus() {
        let p = modulus();
        let r = BigUint::from(1u8) << 512;
        assert_eq!(BigUint::from_slice(&to_u32_digits(&R1)), &r % &p);
        assert_eq!(BigUint::from_slice(&to_u32_digits(&R2)), (&r * &r) % &p);
        let inv = (BigUint::from(1u8) << 64) - BigUint::from(INV);
        assert_eq!((inv * &p) % (BigUint::from(1u8) << 64), BigUint::from(1u8));
        assert_eq!(p.bits(), 512);
        assert_eq!(&p % 4u32, BigUint::from(3u8));
    }

    #[test]
    fn byte_round_trip_and_strictness() {
        let a = Fp::from_u64(123456789);
        assert_eq!(Fp::from_bytes(&a.to_bytes()), Some(a));
        assert_eq!(Fp::from_bytes(&[0xff; 64]), None);
        assert_eq!(Fp::from_bytes(&[0; 63]), None);
    }

    fn arb_fp() -> impl Strategy<Value = Fp> {
        proptest::collection::vec(any::<u8>(), 64).prop_map(|b| Fp::from_bytes_reduced(&b))
    }

    proptest! {
        #[test]
        fn field_ops_agree_with_bigint(a in arb_fp(), b in arb_fp()) {
            let p = modulus();
            prop_assert_eq!(big(&a.mul(&b)), (big(&a) * big(&b)) % &p);
            prop_assert_eq!(big(&a.add(&b)), (big(&a) + big(&b)) % &p);
            prop_assert_eq!(big(&a.sub(&b)), (big(&a) + &p - big(&b)) % &p);
            if !a.is_zero() {
                prop_assert_eq!(a.mul(&a.inverse().unwrap()), Fp::ONE);
                prop_assert_eq!(a.inverse().unwrap(), a.inverse_fermat());
            }
            let sq = a.square();
            let root = sq.sqrt().unwrap();
            prop_assert!(root == a || root == a.neg());
        }
    }
}

