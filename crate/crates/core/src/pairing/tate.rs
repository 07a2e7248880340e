//! Reduced Tate pairing ê(P, Q) = f_{r,P}(ψ(Q))^{(p²−1)/r} with the
//! distortion map ψ(x, y) = (−x, i·y).
//!
//! ψ(Q) has its x-coordinate in F_p, so vertical-line denominators and any
//! F_p scaling of the line values vanish under the final exponentiation.

use super::curve::{Affine, Jacobian, CONSTS};
use super::fp::Fp;
use super::fp2::Fp2;

/// Tangent at `t` evaluated at ψ(q); returns the line value and 2t.
fn double_step(t: &Jacobian, q: &Affine) -> (Fp2, Jacobian) {
    let zz = t.z.square();
    let xx = t.x.square();
    let m = xx.double().add(&xx).add(&zz.square());
    let z3 = t.y.mul(&t.z).double();
    let real = m
        .mul(&zz.mul(&q.x).add(&t.x))
        .sub(&t.y.square().double());
    let imag = z3.mul(&zz).mul(&q.y);
    (Fp2::new(real, imag), t.double())
}

/// Chord through `t` and `p` evaluated at ψ(q); `None` when the chord is
/// vertical (t = −p), in which case its value lies in F_p.
fn add_step(t: &Jacobian, p: &Affine, q: &Affine) -> (Option<Fp2>, Jacobian) {
    let zz = t.z.square();
    let h = p.x.mul(&zz).sub(&t.x);
    if h.is_zero() {
        return (None, t.add_affine(p));
    }
    let r = p.y.mul(&t.z).mul(&zz).sub(&t.y);
    let z3 = t.z.mul(&h);
    let real = r.mul(&q.x.add(&p.x)).sub(&z3.mul(&p.y));
    let imag = z3.mul(&q.y);
    (Some(Fp2::new(real, imag)), t.add_affine(p))
}

fn miller_loop(p: &Affine, q: &Affine) -> Fp2 {
    let order = &CONSTS.order_limbs;
    let top = 64 * order.len() - order.last().expect("nonzero order").leading_zeros() as usize;
    let mut f = Fp2::ONE;
    let mut t = p.to_jacobian();
    for i in (0..top - 1).rev() {
        let (line, t2) = double_step(&t, q);
        f = f.square().mul(&line);
        t = t2;
        if (order[i / 64] >> (i % 64)) & 1 == 1 {
            let (line, t2) = add_step(&t, p, q);
            if let Some(line) = line {
                f = f.mul(&line);
            }
            t = t2;
        }
    }
    f
}

/// f^{(p²−1)/r} = (f^{p−1})^{(p+1)/r}, with f^{p−1} = conj(f)/f.
fn final_exponentiation(f: &Fp2) -> Fp2 {
    let inv = f.inverse().expect("Miller loop value is nonzero");
    let unitary = f.conjugate().mul(&inv);
    unitary.pow(&CONSTS.cofactor_limbs)
}

pub(crate) fn pairing(p: &Affine, q: &Affine) -> Fp2 {
    if p.infinity || q.infinity {
        return Fp2::ONE;
    }
    final_exponentiation(&miller_loop(p, q))
}

/// Product of pairings sharing a single final exponentiation.
pub(crate) fn multi_pairing(pairs: &[(Affine, Affine)]) -> Fp2 {
    let mut f = Fp2::ONE;
    for (p, q) in pairs {
        if !(p.infinity || q.infinity) {
            f = f.mul(&miller_loop(p, q));
        }
    }
    final_exponentiation(&f)
}

/// Target-group elements have norm one, so membership is cheap to screen.
pub(crate) fn is_unitary(v: &Fp2) -> bool {
    v.norm() == Fp::ONE
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bilinear_and_non_degenerate() {
        let g = CONSTS.generator;
        let e = pairing(&g, &g);
        assert_ne!(e, Fp2::ONE);
        assert!(is_unitary(&e));
        assert_eq!(e.pow(&CONSTS.order_limbs), Fp2::ONE);
        let a = g.mul_limbs(&[3]);
        let b = g.mul_limbs(&[5]);
        assert_eq!(pairing(&a, &b), e.pow(&[15]));
        assert_eq!(pairing(&b, &a), pairing(&a, &b));
    }

    #[test]
    fn multi_pairing_is_product() {
        let g = CONSTS.generator;
        let a = g.mul_limbs(&[7]);
        let b = g.mul_limbs(&[11]);
        let expected = pairing(&a, &g).mul(&pairing(&b, &a));
        assert_eq!(multi_pairing(&[(a, g), (b, a)]), expected);
    }
}
