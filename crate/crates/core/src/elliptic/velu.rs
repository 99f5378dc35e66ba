//! Quotient isogenies by a cyclic rational kernel, with explicit rational maps.
//!
//! The x-map is stored as `num/den` with `num` monic of degree n and `den`
//! monic of degree n-1; the y-map is `y * dnum / den^2` where
//! `dnum = num'*den - num*den'`.  Construction always re-checks the curve
//! identity symbolically, so a returned [`Isogeny`] is a proven morphism.

use crate::elliptic::order::point_order;
use crate::elliptic::{embed_into, CurvePoint, EllipticCurve};
use crate::error::{Error, Result};
use crate::field::poly::UPoly;
use crate::field::{Element, Field};

/// A separable isogeny with cyclic kernel generated by a rational point.
#[derive(Clone, Debug)]
pub struct Isogeny {
    pub domain: EllipticCurve,
    pub codomain: EllipticCurve,
    pub kernel_generator: CurvePoint,
    /// Kernel size; also the degree of the map.
    pub degree: u64,
    /// Numerator of the x-map, monic of degree `degree`.
    pub num: UPoly,
    /// Denominator of the x-map, monic of degree `degree - 1`; its roots are
    /// exactly the x-coordinates of the affine kernel points.
    pub den: UPoly,
    /// `num'*den - num*den'`; the y-map is `y * dnum / den^2`.
    pub dnum: UPoly,
}

fn linear(f: &Field, root: &Element) -> UPoly {
    UPoly::from_coeffs(f, vec![f.neg(root), f.one()])
}

fn exact_div(f: &Field, a: &UPoly, b: &UPoly) -> UPoly {
    let (q, r) = a.divrem(f, b).expect("nonzero divisor");
    debug_assert!(r.is_zero());
    q
}

/// The quotient of `y_curve` by the subgroup generated by `t`.
///
/// The kernel is folded into representatives `{k*t : 1 <= k <= (n-1)/2}`
/// (plus the lone two-torsion point for even n), contributing
/// `t_Q = 2(3x_Q^2 + a)` (halved on two-torsion), `u_Q = 4 y_Q^2`, and
/// codomain coefficients `a - 5*sum t_Q`, `b - 7*sum (u_Q + x_Q t_Q)`.
pub fn velu_quotient(y_curve: &EllipticCurve, t: &CurvePoint) -> Result<Isogeny> {
    if !y_curve.contains(t) {
        return Err(Error::CurveMismatch);
    }
    let n = point_order(y_curve, t)?;
    if n == 1 || n % y_curve.field.char() as u128 == 0 {
        return Err(Error::BadKernelOrder(n as u64));
    }
    let f = &y_curve.field;

    let mut sum_t = f.zero();
    let mut sum_w = f.zero();
    let mut den = UPoly::one(f);
    // (x_Q, t_Q, u_Q, multiplicity of (x - x_Q) in den)
    let mut local = Vec::new();
    let mut walk = t.clone();
    for k in 1..=n / 2 {
        let CurvePoint::Affine { x, y } = walk.clone() else {
            unreachable!("proper multiples of an order-n point are affine");
        };
        let gx = f.add(&f.scale_by_u64(&f.mul(&x, &x), 3), &y_curve.a);
        let two_torsion = n % 2 == 0 && k == n / 2;
        let (tq, uq, mult) = if two_torsion {
            (gx, f.zero(), 1usize)
        } else {
            (f.scale_by_u64(&gx, 2), f.scale_by_u64(&f.mul(&y, &y), 4), 2)
        };
        sum_t = f.add(&sum_t, &tq);
        sum_w = f.add(&sum_w, &f.add(&uq, &f.mul(&x, &tq)));
        let lin = linear(f, &x);
        for _ in 0..mult {
            den = den.mul(f, &lin);
        }
        local.push((x, tq, uq, mult));
        walk = y_curve.add_raw(&walk, t);
    }

    let mut num = UPoly::x(f).mul(f, &den);
    for (x, tq, uq, mult) in &local {
        let lin = linear(f, x);
        let mut co = exact_div(f, &den, &lin);
        if *mult == 2 {
            co = exact_div(f, &co, &lin);
            let part = linear(f, x).mul_scalar(f, tq).add(f, &UPoly::constant(f, uq.clone()));
            num = num.add(f, &part.mul(f, &co));
        } else {
            num = num.add(f, &co.mul_scalar(f, tq));
        }
    }

    let a2 = f.sub(&y_curve.a, &f.scale_by_u64(&sum_t, 5));
    let b2 = f.sub(&y_curve.b, &f.scale_by_u64(&sum_w, 7));
    let codomain = EllipticCurve::new(f, a2, b2)?;
    let dnum = num
        .derivative(f)
        .mul(f, &den)
        .sub(f, &num.mul(f, &den.derivative(f)));

    let iso = Isogeny {
        domain: y_curve.clone(),
        codomain,
        kernel_generator: t.clone(),
        degree: n as u64,
        num,
        den,
        dnum,
    };
    iso.check_symbolic()?;
    Ok(iso)
}

impl Isogeny {
    /// Proves the stored maps: degrees and monicity, coprime x-map, kernel
    /// roots, and the curve identity
    /// `g * dnum^2 = (num^3 + a'*num*den^2 + b'*den^3) * den  mod nothing`,
    /// which says the image of a generic point satisfies the codomain
    /// equation.
    fn check_symbolic(&self) -> Result<()> {
        let f = &self.domain.field;
        let n = self.degree as usize;
        let shape = self.num.degree() == Some(n)
            && self.den.degree() == Some(n - 1)
            && f.is_one(self.num.lc())
            && f.is_one(self.den.lc());
        if !shape {
            return Err(Error::VerificationFailed(
                "quotient x-map does not have the monic degree-(n, n-1) shape".into(),
            ));
        }
        if self.num.gcd(f, &self.den).degree() != Some(0) {
            return Err(Error::VerificationFailed(
                "quotient x-map numerator and denominator share a root".into(),
            ));
        }
        let g = UPoly::from_coeffs(
            f,
            vec![self.domain.b.clone(), self.domain.a.clone(), f.zero(), f.one()],
        );
        let den2 = self.den.mul(f, &self.den);
        let lhs = g.mul(f, &self.dnum.mul(f, &self.dnum));
        let cubic = self
            .num
            .mul(f, &self.num)
            .mul(f, &self.num)
            .add(f, &self.num.mul(f, &den2).mul_scalar(f, &self.codomain.a))
            .add(f, &den2.mul(f, &self.den).mul_scalar(f, &self.codomain.b));
        if lhs != cubic.mul(f, &self.den) {
            return Err(Error::VerificationFailed(
                "quotient maps do not satisfy the codomain equation".into(),
            ));
        }
        let mut walk = self.kernel_generator.clone();
        while let CurvePoint::Affine { ref x, .. } = walk {
            if !f.is_zero(&self.den.eval(f, x)) {
                return Err(Error::VerificationFailed(
                    "a kernel multiple does not map to the origin".into(),
                ));
            }
            walk = self.domain.add_raw(&walk, &self.kernel_generator);
        }
        Ok(())
    }

    /// Image of a point with coordinates in the domain field.
    pub fn apply(&self, p: &CurvePoint) -> Result<CurvePoint> {
        self.apply_in(&self.domain.field, p)
    }

    /// Image of a point with coordinates in `big`, an extension of the
    /// domain field (or that field itself).
    pub fn apply_in(&self, big: &Field, p: &CurvePoint) -> Result<CurvePoint> {
        let domain_up = self.domain.base_change(big)?;
        if !domain_up.contains(p) {
            return Err(Error::CurveMismatch);
        }
        let CurvePoint::Affine { x, y } = p else {
            return Ok(CurvePoint::Infinity);
        };
        let small = &self.domain.field;
        let emb = |poly: &UPoly| -> Result<UPoly> {
            let mut out = Vec::with_capacity(poly.coeffs.len());
            for c in &poly.coeffs {
                out.push(embed_into(big, small, c)?);
            }
            Ok(UPoly::from_coeffs(big, out))
        };
        let den_x = emb(&self.den)?.eval(big, x);
        if big.is_zero(&den_x) {
            return Ok(CurvePoint::Infinity);
        }
        let inv = big.inv(&den_x).expect("nonzero denominator");
        let xx = big.mul(&emb(&self.num)?.eval(big, x), &inv);
        let yy = big.mul(
            y,
            &big.mul(&emb(&self.dnum)?.eval(big, x), &big.mul(&inv, &inv)),
        );
        Ok(CurvePoint::affine(xx, yy))
    }

    /// `num - x_s * den`: the monic degree-n polynomial whose roots are the
    /// x-coordinates of the fiber over the affine point `s`.
    pub fn fiber_poly(&self, s: &CurvePoint) -> Result<UPoly> {
        if !self.codomain.contains(s) {
            return Err(Error::CurveMismatch);
        }
        let CurvePoint::Affine { x, .. } = s else {
            return Err(Error::DegenerateConfiguration(
                "the fiber polynomial is defined for affine points only",
            ));
        };
        let f = &self.domain.field;
        Ok(self.num.sub(f, &self.den.mul_scalar(f, x)))
    }
}
