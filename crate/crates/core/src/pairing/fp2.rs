//! The quadratic extension F_p[i]/(i² + 1), home of the target group.

use super::fp::Fp;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub(crate) struct Fp2 {
    pub(crate) c0: Fp,
    pub(crate) c1: Fp,
}

impl Fp2 {
    pub(crate) const ONE: Fp2 = Fp2 {
        c0: Fp::ONE,
        c1: Fp::ZERO,
    };

    pub(crate) fn new(c0: Fp, c1: Fp) -> Fp2 {
        Fp2 { c0, c1 }
    }

    pub(crate) fn mul(&self, rhs: &Fp2) -> Fp2 {
        let aa = self.c0.mul(&rhs.c0);
        let bb = self.c1.mul(&rhs.c1);
        let cross = self.c0.add(&self.c1).mul(&rhs.c0.add(&rhs.c1));
        Fp2 {
            c0: aa.sub(&bb),
            c1: cross.sub(&aa).sub(&bb),
        }
    }

    pub(crate) fn square(&self) -> Fp2 {
        let ab = self.c0.mul(&self.c1);
        Fp2 {
            c0: self.c0.add(&self.c1).mul(&self.c0.sub(&self.c1)),
            c1: ab.double(),
        }
    }

    /// The Frobenius map x ↦ x^p, which for this extension is conjugation.
    pub(crate) fn conjugate(&self) -> Fp2 {
        Fp2 {
            c0: self.c0,
            c1: self.c1.neg(),
        }
    }

    pub(crate) fn norm(&self) -> Fp {
        self.c0.square().add(&self.c1.square())
    }

    pub(crate) fn inverse(&self) -> Option<Fp2> {
        let n = self.norm().inverse()?;
        Some(Fp2 {
            c0: self.c0.mul(&n),
            c1: self.c1.neg().mul(&n),
        })
    }

    pub(crate) fn pow(&self, exp: &[u64]) -> Fp2 {
        let mut acc = Fp2::ONE;
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

    pub(crate) fn to_bytes(&self) -> [u8; 128] {
        let mut out = [0u8; 128];
        out[..64].copy_from_slice(&self.c0.to_bytes());
        out[64..].copy_from_slice(&self.c1.to_bytes());
        out
    }

    pub(crate) fn from_bytes(bytes: &[u8]) -> Option<Fp2> {
        if bytes.len() != 128 {
            return None;
        }
        Some(Fp2 {
            c0: Fp::from_bytes(&bytes[..64])?,
            c1: Fp::from_bytes(&bytes[64..])?,
        })
    }
}
