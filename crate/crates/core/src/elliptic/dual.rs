//! Fiber questions answered through an explicit preimage point.
//!
//! Both operations lift a point `s` on the codomain to a preimage `S` on the
//! domain over the smallest extension where one lives: factor the fiber
//! polynomial, take a smallest-degree factor `h`, and read off
//! `y_S = y_s * den(x_S)^2 / dnum(x_S)`, which the quotient's symbolic curve
//! identity proves to lie on the domain curve.  Only when `dnum` vanishes on
//! the whole fiber (a two-torsion `s`) does `y_S` fall back to a square root.

use crate::elliptic::velu::Isogeny;
use crate::elliptic::{embed_into, CurvePoint, EllipticCurve};
use crate::error::{Error, Result};
use crate::field::factor::{factor, poly_key, roots};
use crate::field::poly::UPoly;
use crate::field::Field;

/// A preimage of the affine point `s` (coordinates in `base`, which extends
/// the isogeny's field of definition), together with the field the preimage
/// lives in and the domain curve base-changed to that field.
pub(crate) fn fiber_point(
    rho: &Isogeny,
    base: &Field,
    s: &CurvePoint,
) -> Result<(Field, EllipticCurve, CurvePoint)> {
    let k = &rho.domain.field;
    let CurvePoint::Affine { x: xs, y: ys } = s else {
        return Err(Error::DegenerateConfiguration(
            "the origin has no affine fiber",
        ));
    };
    let num = embed_poly(base, k, &rho.num);
    let den = embed_poly(base, k, &rho.den);
    let fiber = num.sub(base, &den.mul_scalar(base, xs));
    let mut factors: Vec<UPoly> = factor(base, &fiber)?.into_iter().map(|(p, _)| p).collect();
    factors.sort_by_key(poly_key);
    let h = factors.first().expect("degree-n fiber polynomial");

    let (big, x_up) = if h.degree() == Some(1) {
        (base.clone(), base.neg(&h.coeff(base, 0)))
    } else {
        let ext = Field::extension(base, h)?;
        let mut coords = vec![base.zero(); h.degree().unwrap()];
        coords[1] = base.one();
        let x = ext.from_coords(&coords)?;
        (ext, x)
    };
    let den_x = embed_poly(&big, k, &rho.den).eval(&big, &x_up);
    let dnum_x = embed_poly(&big, k, &rho.dnum).eval(&big, &x_up);
    // den(x_S) != 0: a root shared with the fiber polynomial would be a
    // common root of num and den.
    let curve_up = rho.domain.base_change(&big)?;
    let y_up = if !big.is_zero(&dnum_x) {
        let ys_up = embed_into(&big, base, ys)?;
        let d2 = big.mul(&den_x, &den_x);
        big.mul(&big.mul(&ys_up, &d2), &big.inv(&dnum_x)?)
    } else {
        // Then y_s = 0 and every preimage has y^2 = rhs(x_S); the square
        // root may need one further quadratic step.
        let c = curve_up.rhs(&x_up);
        let quad = UPoly::from_coeffs(&big, vec![big.neg(&c), big.zero(), big.one()]);
        match roots(&big, &quad)?.into_iter().next() {
            Some(r) => r,
            None => {
                let ext2 = Field::extension(&big, &quad)?;
                let y2 = ext2.from_coords(&[big.zero(), big.one()])?;
                let x2 = embed_into(&ext2, &big, &x_up)?;
                let curve2 = rho.domain.base_change(&ext2)?;
                return Ok((ext2, curve2, CurvePoint::affine(x2, y2)));
            }
        }
    };
    let point = CurvePoint::affine(x_up, y_up);
    debug_assert!(curve_up.contains(&point));
    Ok((big, curve_up, point))
}

fn embed_poly(big: &Field, small: &Field, p: &UPoly) -> UPoly {
    p.map_coeffs(big, |c| {
        embed_into(big, small, c).expect("tower extends the coefficient field")
    })
}

/// Is the rational point `s` in the kernel of the dual isogeny?
pub fn in_dual_kernel(rho: &Isogeny, s: &CurvePoint) -> Result<bool> {
    in_dual_kernel_in(rho, &rho.domain.field, s)
}

/// [`in_dual_kernel`] for a point with coordinates in `base`, an extension
/// of the isogeny's field of definition.
///
/// A preimage `S` of `s` satisfies `n*S = dual(s)` up to the kernel of
/// `rho`, which `n` kills; so `s` is in the dual kernel exactly when
/// `n*S = Infinity`.
pub fn in_dual_kernel_in(rho: &Isogeny, base: &Field, s: &CurvePoint) -> Result<bool> {
    if !rho.codomain.base_change(base)?.contains(s) {
        return Err(Error::CurveMismatch);
    }
    if s.is_infinity() {
        return Ok(true);
    }
    let (_, curve_up, preimage) = fiber_point(rho, base, s)?;
    Ok(curve_up
        .scalar_mul_raw(rho.degree as u128, &preimage)
        .is_infinity())
}

/// Frobenius displacement of the fiber over the rational point `p`: the
/// index `c` with `F_q(S) - S = c * t` for any preimage `S` of `p`.
///
/// Well-defined because preimages differ by rational kernel points, which
/// the `q`-power Frobenius fixes.  The multiplicative order of `c` in Z/n is
/// the inertial degree of `p`: the fiber splits into `n / ord(c)` orbits.
pub fn kappa(rho: &Isogeny, p: &CurvePoint) -> Result<u64> {
    if !rho.codomain.contains(p) {
        return Err(Error::CurveMismatch);
    }
    if p.is_infinity() {
        return Ok(0);
    }
    let k = &rho.domain.field;
    let q = k.order_u128().expect("order-bounded base field");
    let (big, curve_up, preimage) = fiber_point(rho, k, p)?;
    let frob = match &preimage {
        CurvePoint::Affine { x, y } => CurvePoint::affine(big.pow_u128(x, q), big.pow_u128(y, q)),
        CurvePoint::Infinity => unreachable!("fiber points are affine"),
    };
    let diff = curve_up.add_raw(&frob, &curve_up.neg(&preimage));
    let mut multiple = CurvePoint::Infinity;
    for c in 0..rho.degree {
        if rho.domain.embed_point(&big, &multiple)? == diff {
            return Ok(c);
        }
        multiple = rho.domain.add_raw(&multiple, &rho.kernel_generator);
    }
    Err(Error::VerificationFailed(
        "Frobenius displacement of a fiber point is not a kernel multiple".into(),
    ))
}
