//! Group order, point order and seeded curve search at desk scale.
//!
//! `curve_order` works for any field of size up to `2^40`: it lifts exact
//! orders of random points by baby-step/giant-step inside the Hasse window
//! and stops once a single multiple of their lcm fits the window.  Curves
//! whose rational exponent is too small for that argument (possible only for
//! tiny or very special fields) fall back to direct enumeration.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::elliptic::{CurvePoint, EllipticCurve};
use crate::error::{Error, Result};
use crate::field::factor::roots;
use crate::field::poly::UPoly;
use crate::field::Field;

/// Largest field size accepted by the order routines.
pub const ORDER_LIMIT: u128 = 1 << 40;

/// Fields at most this large resolve order ambiguities by enumeration.
const ENUMERATION_LIMIT: u128 = 1 << 24;

/// Hasse window `[q + 1 - floor(2*sqrt(q)), q + 1 + floor(2*sqrt(q))]`.
///
/// `floor(2*sqrt(q)) = isqrt(4q)`, so both ends are exact integers; the open
/// real bounds round inward to exactly this closed window.
pub fn hasse_window(q: u128) -> (u128, u128) {
    let s = (4 * q).isqrt();
    (q + 1 - s, q + 1 + s)
}

/// Does `[lo, hi]` contain a positive multiple of `n`?
pub fn window_has_multiple(lo: u128, hi: u128, n: u64) -> bool {
    let k = hi / n as u128;
    k >= 1 && k * n as u128 >= lo
}

/// A random point with both coordinates in the curve field.
pub(crate) fn random_point<R: Rng>(e: &EllipticCurve, rng: &mut R) -> CurvePoint {
    let f = &e.field;
    loop {
        let x = f.random(rng);
        let c = e.rhs(&x);
        let quad = UPoly::from_coeffs(f, vec![f.neg(&c), f.zero(), f.one()]);
        let mut rts = roots(f, &quad).expect("order-bounded field");
        if rts.is_empty() {
            continue;
        }
        let pick = if rts.len() == 2 && rng.gen::<bool>() { 1 } else { 0 };
        return CurvePoint::affine(x, rts.swap_remove(pick));
    }
}

/// Some `k` in the Hasse window with `k * p = Infinity`, by baby-step/giant-step.
fn annihilator_in_window(e: &EllipticCurve, p: &CurvePoint) -> u128 {
    let q = e.field.order_u128().expect("guarded field size");
    let (lo, hi) = hasse_window(q);
    let width = hi - lo;
    // Find r in [0, width] with r*p = target; then lo + r annihilates p.
    let target = e.neg(&e.scalar_mul_raw(lo, p));
    let m = width.isqrt() + 1;
    let mut baby = HashMap::new();
    let mut cur = CurvePoint::Infinity;
    for j in 0..m {
        baby.entry(cur.clone()).or_insert(j);
        cur = e.add_raw(&cur, p);
    }
    let back = e.neg(&e.scalar_mul_raw(m, p));
    let mut cur = target;
    for i in 0..=width / m {
        if let Some(j) = baby.get(&cur) {
            let r = i * m + j;
            if r <= width {
                debug_assert!(e.scalar_mul_raw(lo + r, p).is_infinity());
                return lo + r;
            }
        }
        cur = e.add_raw(&cur, &back);
    }
    unreachable!("the group order annihilates every point inside the window")
}

fn factor_u128(mut v: u128) -> Vec<(u128, u32)> {
    let mut out = Vec::new();
    let mut d = 2u128;
    while d * d <= v {
        if v % d == 0 {
            let mut e = 0;
            while v % d == 0 {
                v /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if v > 1 {
        out.push((v, 1));
    }
    out
}

/// Exact order of a point, by peeling primes off a window annihilator.
pub fn point_order(e: &EllipticCurve, p: &CurvePoint) -> Result<u128> {
    if !e.contains(p) {
        return Err(Error::CurveMismatch);
    }
    guard_size(&e.field)?;
    if p.is_infinity() {
        return Ok(1);
    }
    let mut ord = annihilator_in_window(e, p);
    for (prime, _) in factor_u128(ord) {
        while ord % prime == 0 && e.scalar_mul_raw(ord / prime, p).is_infinity() {
            ord /= prime;
        }
    }
    Ok(ord)
}

fn guard_size(f: &Field) -> Result<u128> {
    match f.order_u128() {
        Some(q) if q <= ORDER_LIMIT => Ok(q),
        _ => Err(Error::FieldTooLarge(40)),
    }
}

fn gcd_u128(a: u128, b: u128) -> u128 {
    if b == 0 { a } else { gcd_u128(b, a % b) }
}

/// `|E(K)|` by direct enumeration of x-coordinates; quadratic residues are
/// detected with Euler's criterion.
pub(crate) fn curve_order_enumerated(e: &EllipticCurve) -> Result<u128> {
    let f = &e.field;
    let q = f.order_u128().ok_or(Error::FieldTooLarge(40))?;
    if q > ENUMERATION_LIMIT {
        return Err(Error::FieldTooLarge(24));
    }
    let mut count = 1u128;
    for i in 0..q {
        let x = f.element_from_index(i);
        let c = e.rhs(&x);
        if f.is_zero(&c) {
            count += 1;
        } else if f.is_one(&f.pow_u128(&c, (q - 1) / 2)) {
            count += 2;
        }
    }
    Ok(count)
}

/// Exact `|E(K)|`.
///
/// Repeatedly samples points, lifts their exact orders, and accumulates the
/// lcm `L`; the order is pinned once the Hasse window contains exactly one
/// multiple of `L`.
pub fn curve_order(e: &EllipticCurve) -> Result<u128> {
    let q = guard_size(&e.field)?;
    let (lo, hi) = hasse_window(q);
    let mut rng = ChaCha8Rng::seed_from_u64(0x0bde5);
    let mut l = 1u128;
    for _ in 0..64 {
        let p = random_point(e, &mut rng);
        let ord = {
            let mut ord = annihilator_in_window(e, &p);
            for (prime, _) in factor_u128(ord) {
                while ord % prime == 0 && e.scalar_mul_raw(ord / prime, &p).is_infinity() {
                    ord /= prime;
                }
            }
            ord
        };
        l = l / gcd_u128(l, ord) * ord;
        let first = lo.div_ceil(l) * l;
        debug_assert!(first <= hi, "the group order is a multiple of every point order");
        if first + l > hi {
            return Ok(first);
        }
    }
    // The exponent divides several candidates: a rational group structure
    // close to (Z/s)^2.  Only reachable for small q, where counting is cheap.
    curve_order_enumerated(e)
}

/// Seeded random search for a curve whose rational group contains a point of
/// exact order `n`; returns the curve and such a point.
///
/// Deterministic in `(field, n, seed)`: candidates `(a, b)` are drawn from a
/// single seeded stream and the first success is returned.
pub fn find_curve_with_point_of_order(
    field: &Field,
    n: u64,
    seed: u64,
    budget: u64,
) -> Result<(EllipticCurve, CurvePoint)> {
    let p = field.char();
    if p < 5 {
        return Err(Error::UnsupportedCharacteristic(p));
    }
    let q = guard_size(field)?;
    let (lo, hi) = hasse_window(q);
    if !window_has_multiple(lo, hi, n) {
        return Err(Error::HasseInfeasible {
            n,
            m: field.abs_degree() as u32,
        });
    }
    let n_factors = factor_u128(n as u128);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..budget {
        let a = field.random(&mut rng);
        let b = field.random(&mut rng);
        let curve = match EllipticCurve::new(field, a, b) {
            Ok(c) => c,
            Err(_) => continue,
        };
        let order = curve_order(&curve)?;
        if order % n as u128 != 0 {
            continue;
        }
        let cofactor = order / n as u128;
        // A cofactor multiple has order dividing n; it has exact order n
        // unless it dies at some n/prime.  Points of order n need not exist
        // (only n | order is known), so failed draws move to the next curve.
        for _ in 0..32 {
            let t = curve.scalar_mul_raw(cofactor, &random_point(&curve, &mut rng));
            if t.is_infinity() {
                continue;
            }
            if n_factors
                .iter()
                .all(|(prime, _)| !curve.scalar_mul_raw(n as u128 / prime, &t).is_infinity())
            {
                return Ok((curve, t));
            }
        }
    }
    Err(Error::NotFound(budget))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(q: u64, a: u64, b: u64) -> EllipticCurve {
        let f = Field::prime(q).unwrap();
        EllipticCurve::new(&f, f.from_u64(a), f.from_u64(b)).unwrap()
    }

    #[test]
    fn test_worked_example_orders() {
        assert_eq!(curve_order(&curve(7, 1, 4)).unwrap(), 10);
        // The quotient curve of the same worked example; isogenous curves
        // have equal order.
        assert_eq!(curve_order(&curve(7, 3, 4)).unwrap(), 10);
    }

    #[test]
    fn test_order_agrees_with_enumeration() {
        for (a, b) in [(1u64, 4u64), (3, 4), (2, 3), (5, 5), (0, 1)] {
            let e = curve(101, a, b);
            assert_eq!(curve_order(&e).unwrap(), curve_order_enumerated(&e).unwrap());
        }
    }

    #[test]
    fn test_random_curves_land_in_hasse_window() {
        let f = Field::prime(1009).unwrap();
        let (lo, hi) = hasse_window(1009);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut seen = 0;
        while seen < 50 {
            let a = f.random(&mut rng);
            let b = f.random(&mut rng);
            let Ok(e) = EllipticCurve::new(&f, a, b) else {
                continue;
            };
            let n = curve_order(&e).unwrap();
            assert!(lo <= n && n <= hi, "order {n} outside [{lo}, {hi}]");
            let p = random_point(&e, &mut rng);
            let ord = point_order(&e, &p).unwrap();
            assert!(e.scalar_mul(ord, &p).unwrap().is_infinity());
            assert_eq!(n % ord, 0);
            seen += 1;
        }
    }

    #[test]
    fn test_order_over_extension_field() {
        let f7 = Field::prime(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = crate::field::factor::random_irreducible(&f7, 2, &mut rng);
        let f49 = Field::extension(&f7, &m).unwrap();
        let e = EllipticCurve::new(&f49, f49.from_u64(1), f49.from_u64(4)).unwrap();
        assert_eq!(curve_order(&e).unwrap(), curve_order_enumerated(&e).unwrap());
    }

    #[test]
    fn test_search_finds_order_five_point_over_gf7() {
        let f = Field::prime(7).unwrap();
        let (e, t) = find_curve_with_point_of_order(&f, 5, 0, 512).unwrap();
        assert!(point_order(&e, &t).unwrap() == 5);
        assert_eq!(curve_order(&e).unwrap() % 5, 0);
    }

    #[test]
    fn test_search_reports_infeasible_windows() {
        let f5 = Field::prime(5).unwrap();
        assert_eq!(
            find_curve_with_point_of_order(&f5, 11, 0, 10),
            Err(Error::HasseInfeasible { n: 11, m: 1 })
        );
        // Window [2, 10] still admits n = 5 and n = 7.
        assert!(find_curve_with_point_of_order(&f5, 7, 0, 512).is_ok());
    }

    #[test]
    fn test_infeasible_windows_for_degree_up_to_three() {
        let f11 = Field::prime(11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut base = f11.clone();
        for m in 1..=3u32 {
            if m > 1 {
                let modulus = crate::field::factor::random_irreducible(&f11, m as usize, &mut rng);
                base = Field::extension(&f11, &modulus).unwrap();
            }
            assert_eq!(
                find_curve_with_point_of_order(&base, 239, 0, 10),
                Err(Error::HasseInfeasible { n: 239, m })
            );
        }
    }

    #[test]
    fn test_window_arithmetic() {
        assert_eq!(hasse_window(7), (3, 13));
        assert_eq!(hasse_window(11), (6, 18));
        let (lo, hi) = hasse_window(11);
        assert!(window_has_multiple(lo, hi, 6));
        let (lo2, hi2) = hasse_window(121);
        assert_eq!((lo2, hi2), (100, 144));
        assert!(!window_has_multiple(lo2, hi2, 239));
    }
}
