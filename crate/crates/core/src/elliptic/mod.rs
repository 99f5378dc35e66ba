//! Elliptic curves over finite fields of characteristic at least 5.
//!
//! Curves are short Weierstrass, `y^2 = x^3 + ax + b`.  Points do not carry a
//! back-pointer to their curve; the curve acts as the context object, and the
//! checked entry points ([`EllipticCurve::add`], [`EllipticCurve::scalar_mul`])
//! reject coordinates that do not satisfy the curve equation.
//!
//! [`order`] finds group and point orders at desk scale, [`velu`] builds
//! quotient isogenies with explicit rational maps, and [`dual`] answers the
//! two fiber questions (kernel of the dual isogeny, Frobenius displacement)
//! by lifting a preimage to the extension field where it lives.

pub mod dual;
pub mod order;
pub mod velu;

pub use dual::{in_dual_kernel, kappa};
pub use order::{curve_order, find_curve_with_point_of_order};
pub use velu::{velu_quotient, Isogeny};

use crate::error::{Error, Result};
use crate::field::{Element, Field};

/// A short Weierstrass curve `y^2 = x^3 + ax + b` with nonzero discriminant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EllipticCurve {
    pub field: Field,
    pub a: Element,
    pub b: Element,
}

/// A point on some curve: the group identity, or an affine pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CurvePoint {
    Infinity,
    Affine { x: Element, y: Element },
}

impl CurvePoint {
    pub fn affine(x: Element, y: Element) -> Self {
        CurvePoint::Affine { x, y }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }
}

impl EllipticCurve {
    /// Checks the characteristic and the discriminant `4a^3 + 27b^2`.
    pub fn new(field: &Field, a: Element, b: Element) -> Result<Self> {
        let p = field.char();
        if p < 5 {
            return Err(Error::UnsupportedCharacteristic(p));
        }
        if !field.contains(&a) || !field.contains(&b) {
            return Err(Error::FieldMismatch("curve coefficients"));
        }
        let disc = field.add(
            &field.scale_by_u64(&field.mul(&field.mul(&a, &a), &a), 4),
            &field.scale_by_u64(&field.mul(&b, &b), 27),
        );
        if field.is_zero(&disc) {
            return Err(Error::DegenerateConfiguration("singular curve"));
        }
        Ok(EllipticCurve {
            field: field.clone(),
            a,
            b,
        })
    }

    /// Right-hand side `x^3 + ax + b`.
    pub fn rhs(&self, x: &Element) -> Element {
        let f = &self.field;
        let x2 = f.mul(x, x);
        f.add(&f.add(&f.mul(&x2, x), &f.mul(&self.a, x)), &self.b)
    }

    pub fn contains(&self, p: &CurvePoint) -> bool {
        match p {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { x, y } => {
                self.field.contains(x)
                    && self.field.contains(y)
                    && self.field.mul(y, y) == self.rhs(x)
            }
        }
    }

    fn check(&self, p: &CurvePoint) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::CurveMismatch)
        }
    }

    pub fn neg(&self, p: &CurvePoint) -> CurvePoint {
        match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::Affine {
                x: x.clone(),
                y: self.field.neg(y),
            },
        }
    }

    pub fn add(&self, p: &CurvePoint, q: &CurvePoint) -> Result<CurvePoint> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.add_raw(p, q))
    }

    pub fn sub(&self, p: &CurvePoint, q: &CurvePoint) -> Result<CurvePoint> {
        self.add(p, &self.neg(q))
    }

    /// `k * p` by double-and-add.
    pub fn scalar_mul(&self, k: u128, p: &CurvePoint) -> Result<CurvePoint> {
        self.check(p)?;
        Ok(self.scalar_mul_raw(k, p))
    }

    /// Group law without the membership check; callers guarantee `p`, `q`
    /// satisfy the curve equation.  The case split keeps every divisor
    /// nonzero: distinct x-coordinates give an invertible chord slope, and
    /// doubling only divides by `2y` with `y != 0`.
    pub(crate) fn add_raw(&self, p: &CurvePoint, q: &CurvePoint) -> CurvePoint {
        let f = &self.field;
        let (x1, y1) = match p {
            CurvePoint::Infinity => return q.clone(),
            CurvePoint::Affine { x, y } => (x, y),
        };
        let (x2, y2) = match q {
            CurvePoint::Infinity => return p.clone(),
            CurvePoint::Affine { x, y } => (x, y),
        };
        let lambda = if x1 == x2 {
            if *y1 == f.neg(y2) {
                return CurvePoint::Infinity;
            }
            let num = f.add(&f.scale_by_u64(&f.mul(x1, x1), 3), &self.a);
            let den = f.scale_by_u64(y1, 2);
            f.mul(&num, &f.inv(&den).expect("doubling a point with y != 0"))
        } else {
            let num = f.sub(y2, y1);
            let den = f.sub(x2, x1);
            f.mul(&num, &f.inv(&den).expect("chord through distinct x"))
        };
        let x3 = f.sub(&f.sub(&f.mul(&lambda, &lambda), x1), x2);
        let y3 = f.sub(&f.mul(&lambda, &f.sub(x1, &x3)), y1);
        CurvePoint::Affine { x: x3, y: y3 }
    }

    pub(crate) fn scalar_mul_raw(&self, mut k: u128, p: &CurvePoint) -> CurvePoint {
        let mut acc = CurvePoint::Infinity;
        let mut base = p.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add_raw(&acc, &base);
            }
            base = self.add_raw(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// The same curve viewed over an extension of its field of definition.
    pub fn base_change(&self, big: &Field) -> Result<EllipticCurve> {
        Ok(EllipticCurve {
            field: big.clone(),
            a: embed_into(big, &self.field, &self.a)?,
            b: embed_into(big, &self.field, &self.b)?,
        })
    }

    /// A point with coordinates in the curve field, viewed over `big`.
    pub fn embed_point(&self, big: &Field, p: &CurvePoint) -> Result<CurvePoint> {
        Ok(match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::Affine {
                x: embed_into(big, &self.field, x)?,
                y: embed_into(big, &self.field, y)?,
            },
        })
    }
}

/// Embeds an element of `small` into the tower field `big` built over it.
pub(crate) fn embed_into(big: &Field, small: &Field, v: &Element) -> Result<Element> {
    if big == small {
        return Ok(v.clone());
    }
    if big.is_prime_field() {
        return Err(Error::FieldMismatch("embedding target does not extend the source"));
    }
    let below = embed_into(&big.base(), small, v)?;
    Ok(big.embed_base(&below))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gf7_curve() -> EllipticCurve {
        let f = Field::prime(7).unwrap();
        EllipticCurve::new(&f, f.from_u64(1), f.from_u64(4)).unwrap()
    }

    fn pt(f: &Field, x: u64, y: u64) -> CurvePoint {
        CurvePoint::affine(f.from_u64(x), f.from_u64(y))
    }

    #[test]
    fn test_rejects_small_characteristic_and_singular() {
        let f3 = Field::prime(3).unwrap();
        assert_eq!(
            EllipticCurve::new(&f3, f3.zero(), f3.one()),
            Err(Error::UnsupportedCharacteristic(3))
        );
        let f7 = Field::prime(7).unwrap();
        // 4a^3 + 27b^2 = 0 for a = -3, b = 2 since x^3 - 3x + 2 = (x-1)^2 (x+2).
        assert_eq!(
            EllipticCurve::new(&f7, f7.from_u64(4), f7.from_u64(2)),
            Err(Error::DegenerateConfiguration("singular curve"))
        );
    }

    #[test]
    fn test_identity_and_inverse_laws() {
        let e = gf7_curve();
        let f = &e.field;
        let p = pt(f, 6, 4);
        assert!(e.contains(&p));
        assert_eq!(e.add(&p, &CurvePoint::Infinity).unwrap(), p);
        assert_eq!(
            e.add(&p, &e.neg(&p)).unwrap(),
            CurvePoint::Infinity
        );
    }

    #[test]
    fn test_order_five_point_from_worked_example() {
        let e = gf7_curve();
        let t = pt(&e.field, 6, 4);
        let mut acc = CurvePoint::Infinity;
        for _ in 0..5 {
            acc = e.add(&acc, &t).unwrap();
        }
        assert_eq!(acc, CurvePoint::Infinity);
        assert_eq!(e.scalar_mul(5, &t).unwrap(), CurvePoint::Infinity);
        for k in 1..5 {
            assert!(!e.scalar_mul(k, &t).unwrap().is_infinity());
        }
    }

    #[test]
    fn test_rejects_foreign_point() {
        let e = gf7_curve();
        let bad = pt(&e.field, 1, 1);
        assert_eq!(e.add(&bad, &CurvePoint::Infinity), Err(Error::CurveMismatch));
    }

    #[test]
    fn test_group_law_associative_on_samples() {
        let f = Field::prime(1009).unwrap();
        let e = EllipticCurve::new(&f, f.from_u64(12), f.from_u64(77)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut pts = Vec::new();
        while pts.len() < 3 * 20 {
            let x = f.random(&mut rng);
            let c = e.rhs(&x);
            if let Some(y) = crate::field::factor::roots(
                &f,
                &crate::field::poly::UPoly::from_coeffs(&f, vec![f.neg(&c), f.zero(), f.one()]),
            )
            .unwrap()
            .into_iter()
            .next()
            {
                pts.push(CurvePoint::affine(x, y));
            }
        }
        for c in pts.chunks(3) {
            let (p, q, r) = (&c[0], &c[1], &c[2]);
            let left = e.add(&e.add(p, q).unwrap(), r).unwrap();
            let right = e.add(p, &e.add(q, r).unwrap()).unwrap();
            assert_eq!(left, right);
            assert_eq!(e.add(p, q).unwrap(), e.add(q, p).unwrap());
        }
    }

    #[test]
    fn test_base_change_preserves_membership() {
        let e = gf7_curve();
        let f = &e.field;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = crate::field::factor::random_irreducible(f, 2, &mut rng);
        let big = Field::extension(f, &m).unwrap();
        let up = e.base_change(&big).unwrap();
        let p = e.embed_point(&big, &pt(f, 6, 4)).unwrap();
        assert!(up.contains(&p));
        assert_eq!(up.scalar_mul(5, &p).unwrap(), CurvePoint::Infinity);
    }
}
