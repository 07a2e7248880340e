//! Points on the supersingular curve y² = x³ + x over F_p.
//!
//! The curve has p + 1 = h·r points; the pairing group is the order-r
//! subgroup. Points are stored affine and lifted to Jacobian coordinates
//! for arithmetic.

use std::sync::LazyLock;

use num_bigint::BigUint;
use sha2::{Digest, Sha256};

use super::fp::{self, Fp};

/// Order of the pairing subgroup: 2^159 + 2^107 + 1.
pub(crate) fn subgroup_order() -> BigUint {
    (BigUint::from(1u8) << 159u32) + (BigUint::from(1u8) << 107u32) + 1u32
}

pub(crate) struct CurveConsts {
    pub(crate) order: BigUint,
    pub(crate) order_limbs: Vec<u64>,
    pub(crate) cofactor_limbs: Vec<u64>,
    pub(crate) generator: Affine,
}

pub(crate) static CONSTS: LazyLock<CurveConsts> = LazyLock::new(|| {
    let order = subgroup_order();
    let cofactor = (fp::modulus() + 1u32) / &order;
    let cofactor_limbs = cofactor.to_u64_digits();
    let generator = map_to_subgroup(b"fogsec/type-a/generator", &cofactor_limbs);
    CurveConsts {
        order_limbs: order.to_u64_digits(),
        order,
        cofactor_limbs,
        generator,
    }
});

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub(crate) struct Affine {
    pub(crate) x: Fp,
    pub(crate) y: Fp,
    pub(crate) infinity: bool,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Jacobian {
    pub(crate) x: Fp,
    pub(crate) y: Fp,
    pub(crate) z: Fp,
}

fn rhs(x: &Fp) -> Fp {
    x.square().mul(x).add(x)
}

impl Affine {
    pub(crate) const IDENTITY: Affine = Affine {
        x: Fp::ZERO,
        y: Fp::ZERO,
        infinity: true,
    };

    pub(crate) fn is_on_curve(&self) -> bool {
        self.infinity || self.y.square() == rhs(&self.x)
    }

    #[cfg(test)]
    pub(crate) fn neg(&self) -> Affine {
        Affine {
            y: self.y.neg(),
            ..*self
        }
    }

    pub(crate) fn to_jacobian(&self) -> Jacobian {
        if self.infinity {
            Jacobian::IDENTITY
        } else {
            Jacobian {
                x: self.x,
                y: self.y,
                z: Fp::ONE,
            }
        }
    }

    pub(crate) fn add(&self, rhs: &Affine) -> Affine {
        self.to_jacobian().add_affine(rhs).to_affine()
    }

    /// Fixed 4-bit window multiplication over little-endian exponent limbs.
    pub(crate) fn mul_limbs(&self, k: &[u64]) -> Affine {
        if self.infinity {
            return Affine::IDENTITY;
        }
        let mut multiples = Vec::with_capacity(15);
        let mut acc = self.to_jacobian();
        multiples.push(acc);
        for _ in 2..16 {
            acc = acc.add_affine(self);
            multiples.push(acc);
        }
        let table = batch_to_affine(&multiples);

        let mut acc = Jacobian::IDENTITY;
        for limb in k.iter().rev() {
            for shift in (0..16).rev() {
                for _ in 0..4 {
                    acc = acc.double();
                }
                let nibble = ((limb >> (4 * shift)) & 0xf) as usize;
                if nibble != 0 {
                    acc = acc.add_affine(&table[nibble - 1]);
                }
            }
        }
        acc.to_affine()
    }

    pub(crate) fn in_subgroup(&self) -> bool {
        self.mul_limbs(&CONSTS.order_limbs).infinity
    }

    /// 128 bytes: x ‖ y big-endian; the identity is all zeros. (0, 0) is a
    /// curve point of order two, never a subgroup element, so the encoding
    /// is unambiguous.
    pub(crate) fn to_bytes(&self) -> [u8; 128] {
        let mut out = [0u8; 128];
        if !self.infinity {
            out[..64].copy_from_slice(&self.x.to_bytes());
            out[64..].copy_from_slice(&self.y.to_bytes());
        }
        out
    }

    pub(crate) fn from_bytes(bytes: &[u8]) -> Option<Affine> {
        if bytes.len() != 128 {
            return None;
        }
        if bytes.iter().all(|b| *b == 0) {
            return Some(Affine::IDENTITY);
        }
        let p = Affine {
            x: Fp::from_bytes(&bytes[..64])?,
            y: Fp::from_bytes(&bytes[64..])?,
            infinity: false,
        };
        (p.is_on_curve() && p.in_subgroup()).then_some(p)
    }

    /// x ‖ flags, where flag bit 0 is the parity of y and bit 1 marks the
    /// identity.
    pub(crate) fn to_compressed(&self) -> [u8; 65] {
        let mut out = [0u8; 65];
        if self.infinity {
            out[64] = 0b10;
        } else {
            out[..64].copy_from_slice(&self.x.to_bytes());
            out[64] = self.y.is_odd() as u8;
        }
        out
    }

    pub(crate) fn from_compressed(bytes: &[u8]) -> Option<Affine> {
        if bytes.len() != 65 {
            return None;
        }
        match bytes[64] {
            0b10 if bytes[..64].iter().all(|b| *b == 0) => Some(Affine::IDENTITY),
            flag @ (0 | 1) => {
                let x = Fp::from_bytes(&bytes[..64])?;
                let mut y = rhs(&x).sqrt()?;
                if y.is_odd() != (flag == 1) {
                    y = y.neg();
                }
                let p = Affine {
                    x,
                    y,
                    infinity: false,
                };
                p.in_subgroup().then_some(p)
            }
            _ => None,
        }
    }
}

impl Jacobian {
    pub(crate) const IDENTITY: Jacobian = Jacobian {
        x: Fp::ONE,
        y: Fp::ONE,
        z: Fp::ZERO,
    };

    pub(crate) fn is_identity(&self) -> bool {
        self.z.is_zero()
    }

    pub(crate) fn to_affine(&self) -> Affine {
        match self.z.inverse() {
            None => Affine::IDENTITY,
            Some(zi) => {
                let zi2 = zi.square();
                Affine {
                    x: self.x.mul(&zi2),
                    y: self.y.mul(&zi2).mul(&zi),
                    infinity: false,
                }
            }
        }
    }

    /// Doubling for a = 1.
    pub(crate) fn double(&self) -> Jacobian {
        if self.is_identity() || self.y.is_zero() {
            return Jacobian::IDENTITY;
        }
        let xx = self.x.square();
        let yy = self.y.square();
        let zz = self.z.square();
        let s = self.x.mul(&yy).double().double();
        let m = xx.double().add(&xx).add(&zz.square());
        let x3 = m.square().sub(&s.double());
        let yyyy8 = yy.square().double().double().double();
        let y3 = m.mul(&s.sub(&x3)).sub(&yyyy8);
        let z3 = self.y.mul(&self.z).double();
        Jacobian {
            x: x3,
            y: y3,
            z: z3,
        }
    }

    /// Mixed addition with an affine point.
    pub(crate) fn add_affine(&self, q: &Affine) -> Jacobian {
        if q.infinity {
            return *self;
        }
        if self.is_identity() {
            return q.to_jacobian();
        }
        let z1z1 = self.z.square();
        let u2 = q.x.mul(&z1z1);
        let s2 = q.y.mul(&self.z).mul(&z1z1);
        let h = u2.sub(&self.x);
        let r = s2.sub(&self.y);
        if h.is_zero() {
            return if r.is_zero() {
                self.double()
            } else {
                Jacobian::IDENTITY
            };
        }
        let hh = h.square();
        let hhh = h.mul(&hh);
        let v = self.x.mul(&hh);
        let x3 = r.square().sub(&hhh).sub(&v.double());
        let y3 = r.mul(&v.sub(&x3)).sub(&self.y.mul(&hhh));
        let z3 = self.z.mul(&h);
        Jacobian {
            x: x3,
            y: y3,
            z: z3,
        }
    }
}

/// Normalizes many points with a single field inversion.
pub(crate) fn batch_to_affine(points: &[Jacobian]) -> Vec<Affine> {
    let mut prefix = Vec::with_capacity(points.len());
    let mut running = Fp::ONE;
    for p in points {
        prefix.push(running);
        if !p.is_identity() {
            running = running.mul(&p.z);
        }
    }
    let mut inv = running.inverse().expect("product of non-zero z");
    let mut out = vec![Affine::IDENTITY; points.len()];
    for (i, p) in points.iter().enumerate().rev() {
        if p.is_identity() {
            continue;
        }
        let zi = inv.mul(&prefix[i]);
        inv = inv.mul(&p.z);
        let zi2 = zi.square();
        out[i] = Affine {
            x: p.x.mul(&zi2),
            y: p.y.mul(&zi2).mul(&zi),
            infinity: false,
        };
    }
    out
}

/// Tries successive counters until SHA-256(seed ‖ ctr ‖ 0) ‖ SHA-256(seed ‖
/// ctr ‖ 1) reduces to the x-coordinate of a point whose cofactor multiple is
/// not the identity.
pub(crate) fn map_to_subgroup(seed: &[u8], cofactor: &[u64]) -> Affine {
    let mut ctr: u32 = 0;
    loop {
        let mut wide = Vec::with_capacity(64);
        for half in 0u8..2 {
            let mut h = Sha256::new();
            h.update(seed);
            h.update(ctr.to_be_bytes());
            h.update([half]);
            wide.extend_from_slice(&h.finalize());
        }
        let x = Fp::from_bytes_reduced(&wide);
        if let Some(mut y) = rhs(&x).sqrt() {
            // the low bit of the seed material picks the root
            if y.is_odd() != (wide[63] & 1 == 1) {
                y = y.neg();
            }
            let p = Affine {
                x,
                y,
                infinity: false,
            }
            .mul_limbs(cofactor);
            if !p.infinity {
                return p;
            }
        }
        ctr += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_has_prime_order() {
        let g = CONSTS.generator;
        assert!(g.is_on_curve());
        assert!(!g.infinity);
        assert!(g.in_subgroup());
    }

    #[test]
    fn group_law() {
        let g = CONSTS.generator;
        let g2 = g.add(&g);
        assert_eq!(g2, g.mul_limbs(&[2]));
        assert_eq!(g2.add(&g), g.mul_limbs(&[3]));
        assert!(g.add(&g.neg()).infinity);
        let a = g.mul_limbs(&[12345]);
        let b = g.mul_limbs(&[67890]);
        assert_eq!(a.add(&b), g.mul_limbs(&[12345 + 67890]));
        // windowed multiplication against repeated addition
        let mut acc = Affine::IDENTITY;
        for k in 0..40u64 {
            assert_eq!(g.mul_limbs(&[k]), acc);
            acc = acc.add(&g);
        }
        assert!(a.add(&b).is_on_curve());
    }

    #[test]
    fn encodings_round_trip() {
        let p = CONSTS.generator.mul_limbs(&[987654321]);
        assert_eq!(Affine::from_bytes(&p.to_bytes()), Some(p));
        assert_eq!(Affine::from_compressed(&p.to_compressed()), Some(p));
        assert_eq!(
            Affine::from_bytes(&Affine::IDENTITY.to_bytes()),
            Some(Affine::IDENTITY)
        );
        let mut bad = p.to_bytes();
        bad[127] ^= 1;
        assert_eq!(Affine::from_bytes(&bad), None);
    }
}
