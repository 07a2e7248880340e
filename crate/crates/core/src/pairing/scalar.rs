use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::RngCore;

/// An exponent in Z_q, always kept reduced.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Scalar(pub(crate) BigUint);

/// Fixed serialized width of a scalar.
pub const SCALAR_BYTES: usize = 32;

impl Scalar {
    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// 32-byte big-endian encoding.
    pub fn to_bytes(&self) -> [u8; SCALAR_BYTES] {
        let raw = self.0.to_bytes_be();
        let mut out = [0u8; SCALAR_BYTES];
        out[SCALAR_BYTES - raw.len()..].copy_from_slice(&raw);
        out
    }

    pub(crate) fn limbs(&self) -> Vec<u64> {
        self.0.to_u64_digits()
    }
}

/// Arithmetic modulo the prime group order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ScalarField {
    modulus: BigUint,
}

impl ScalarField {
    pub fn new(modulus: BigUint) -> ScalarField {
        ScalarField { modulus }
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn reduce(&self, v: BigUint) -> Scalar {
        Scalar(v % &self.modulus)
    }

    pub fn zero(&self) -> Scalar {
        Scalar(BigUint::zero())
    }

    pub fn one(&self) -> Scalar {
        Scalar(BigUint::one())
    }

    pub fn from_u64(&self, v: u64) -> Scalar {
        self.reduce(BigUint::from(v))
    }

    /// Maps a signed integer into Z_q (so −1 becomes q − 1).
    pub fn from_i64(&self, v: i64) -> Scalar {
        let s = self.from_u64(v.unsigned_abs());
        if v < 0 {
            self.neg(&s)
        } else {
            s
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.reduce(&a.0 + &b.0)
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.reduce(&a.0 + &self.modulus - &b.0)
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.reduce(&a.0 * &b.0)
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        self.reduce(&self.modulus - &a.0)
    }

    /// Multiplicative inverse via Fermat; `None` for zero.
    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        if a.is_zero() {
            return None;
        }
        let e = &self.modulus - 2u32;
        Some(Scalar(a.0.modpow(&e, &self.modulus)))
    }

    /// Uniform sample, drawing 64 bits beyond the modulus width so the
    /// reduction bias is negligible.
    pub fn random<R: RngCore + ?Sized>(&self, rng: &mut R) -> Scalar {
        let len = (self.modulus.bits() as usize).div_ceil(8) + 8;
        let mut buf = vec![0u8; len];
        rng.fill_bytes(&mut buf);
        self.reduce(BigUint::from_bytes_be(&buf))
    }

    pub fn random_nonzero<R: RngCore + ?Sized>(&self, rng: &mut R) -> Scalar {
        loop {
            let s = self.random(rng);
            if !s.is_zero() {
                return s;
            }
        }
    }

    /// Strict decoding: rejects wrong lengths and unreduced values.
    pub fn from_bytes(&self, bytes: &[u8]) -> Option<Scalar> {
        if bytes.len() != SCALAR_BYTES {
            return None;
        }
        let v = BigUint::from_bytes_be(bytes);
        (v < self.modulus).then_some(Scalar(v))
    }
}
