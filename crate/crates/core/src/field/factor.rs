//! Univariate polynomial factorization over finite fields.
//!
//! The pipeline is the classical one: squarefree decomposition, then
//! distinct-degree splitting by Frobenius powers, then randomized
//! equal-degree splitting.  Equal-degree splitting in odd characteristic
//! raises a norm of the random element to the power `(Q-1)/2` instead of
//! raising the element itself to `(Q^d-1)/2`, so exponents stay within
//! `u128` for every field this crate constructs.  Characteristic 2 uses
//! additive traces.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::poly::UPoly;
use crate::field::{Element, Field};

/// Deterministic ordering key for elements of one field.
pub(crate) fn element_key(e: &Element) -> Vec<u64> {
    match e {
        Element::P(v) => vec![*v],
        Element::E(c) => c.iter().flat_map(element_key).collect(),
    }
}

/// Deterministic ordering key for polynomials over one field.
pub(crate) fn poly_key(p: &UPoly) -> (usize, Vec<u64>) {
    (
        p.coeffs.len(),
        p.coeffs.iter().rev().flat_map(element_key).collect(),
    )
}

fn field_order(f: &Field) -> u128 {
    f.order_u128()
        .expect("factorization requires the field order to fit in u128")
}

/// `x^(Q^k) mod m` by iterated Frobenius, starting from `start`.
fn iterate_frobenius(f: &Field, start: &UPoly, k: usize, m: &UPoly) -> Result<UPoly> {
    let q = field_order(f);
    let mut h = start.clone();
    for _ in 0..k {
        h = h.pow_mod(f, q, m)?;
    }
    Ok(h)
}

/// Rabin irreducibility test.  Constants and zero are not irreducible.
pub fn is_irreducible(f: &Field, poly: &UPoly) -> bool {
    let Some(n) = poly.degree() else { return false };
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let m = poly.monic(f).expect("nonzero polynomial");
    let x = UPoly::x(f);
    // x^(Q^n) must reduce to x mod poly.
    let h = iterate_frobenius(f, &x, n, &m).expect("monic modulus");
    if h != x.rem(f, &m).expect("monic modulus") {
        return false;
    }
    for r in prime_divisors(n) {
        let h = iterate_frobenius(f, &x, n / r, &m).expect("monic modulus");
        let g = h.sub(f, &x).gcd(f, &m);
        if g.degree() != Some(0) {
            return false;
        }
    }
    true
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `p`-th root of a polynomial whose derivative vanishes.
fn pth_root(f: &Field, poly: &UPoly) -> UPoly {
    let p = f.char() as usize;
    let q = field_order(f);
    let mut out = Vec::new();
    let mut i = 0;
    while i < poly.coeffs.len() {
        // c^(Q/p) is the p-th root of c in GF(Q).
        out.push(f.pow_u128(&poly.coeffs[i], q / p as u128));
        i += p;
    }
    UPoly::from_coeffs(f, out)
}

/// Monic squarefree factors with multiplicities, unsorted.
fn squarefree_decomposition(f: &Field, poly: &UPoly) -> Result<Vec<(UPoly, usize)>> {
    let mut out = Vec::new();
    squarefree_rec(f, &poly.monic(f)?, 1, &mut out)?;
    Ok(out)
}

fn squarefree_rec(
    f: &Field,
    poly: &UPoly,
    e: usize,
    out: &mut Vec<(UPoly, usize)>,
) -> Result<()> {
    if poly.degree() == Some(0) {
        return Ok(());
    }
    let dp = poly.derivative(f);
    if dp.is_zero() {
        return squarefree_rec(f, &pth_root(f, poly), e * f.char() as usize, out);
    }
    let mut t = poly.gcd(f, &dp);
    let mut w = poly.divrem(f, &t)?.0;
    let mut i = 1;
    while w.degree() > Some(0) {
        let y = w.gcd(f, &t);
        let z = w.divrem(f, &y)?.0;
        if z.degree() > Some(0) {
            out.push((z, e * i));
        }
        t = t.divrem(f, &y)?.0;
        w = y;
        i += 1;
    }
    if t.degree() > Some(0) {
        squarefree_rec(f, &pth_root(f, &t), e * f.char() as usize, out)?;
    }
    Ok(())
}

/// Split a monic squarefree polynomial into products of irreducibles of a
/// common degree: returns pairs (product, degree).
fn distinct_degree(f: &Field, poly: &UPoly) -> Result<Vec<(UPoly, usize)>> {
    let q = field_order(f);
    let mut v = poly.clone();
    let mut h = UPoly::x(f).rem(f, &v)?;
    let mut out = Vec::new();
    let mut d = 0;
    while v.degree().unwrap_or(0) >= 2 * (d + 1) {
        d += 1;
        h = h.pow_mod(f, q, &v)?;
        let g = h.sub(f, &UPoly::x(f)).gcd(f, &v);
        if g.degree() > Some(0) {
            out.push((g.clone(), d));
            v = v.divrem(f, &g)?.0;
            h = h.rem(f, &v)?;
        }
    }
    if v.degree() > Some(0) {
        let d = v.degree().unwrap();
        out.push((v, d));
    }
    Ok(out)
}

/// Equal-degree splitting of a monic squarefree product of irreducibles of
/// degree `d`.
fn equal_degree(
    f: &Field,
    poly: &UPoly,
    d: usize,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<UPoly>,
) -> Result<()> {
    let n = poly.degree().expect("nonzero polynomial");
    if n == d {
        out.push(poly.clone());
        return Ok(());
    }
    let q = field_order(f);
    loop {
        let r = random_poly(f, n, rng);
        if r.degree().unwrap_or(0) == 0 {
            continue;
        }
        let g0 = r.gcd(f, poly);
        if g0.degree() > Some(0) && g0.degree() < poly.degree() {
            let rest = poly.divrem(f, &g0)?.0;
            equal_degree(f, &g0, d, rng, out)?;
            equal_degree(f, &rest, d, rng, out)?;
            return Ok(());
        }
        let s = if f.char() == 2 {
            // Additive trace to GF(2): sum of r^(2^j) over all j below
            // d * log2(Q).
            let k = f.abs_degree() * d;
            let mut term = r.rem(f, poly)?;
            let mut acc = term.clone();
            for _ in 1..k {
                term = term.mul(f, &term).rem(f, poly)?;
                acc = acc.add(f, &term);
            }
            acc
        } else {
            // Norm to GF(Q) followed by an Euler power: the exponent
            // (Q^d - 1)/2 factors as (1 + Q + ... + Q^(d-1)) * (Q-1)/2.
            let mut term = r.rem(f, poly)?;
            let mut norm = term.clone();
            for _ in 1..d {
                term = term.pow_mod(f, q, poly)?;
                norm = norm.mul(f, &term).rem(f, poly)?;
            }
            let s = norm.pow_mod(f, (q - 1) / 2, poly)?;
            s.sub(f, &UPoly::one(f))
        };
        let g = s.gcd(f, poly);
        if g.degree() > Some(0) && g.degree() < poly.degree() {
            let rest = poly.divrem(f, &g)?.0;
            equal_degree(f, &g, d, rng, out)?;
            equal_degree(f, &rest, d, rng, out)?;
            return Ok(());
        }
    }
}

fn random_poly<R: Rng>(f: &Field, below_degree: usize, rng: &mut R) -> UPoly {
    let coeffs = (0..below_degree).map(|_| f.random(rng)).collect();
    UPoly::from_coeffs(f, coeffs)
}

/// Full factorization into monic irreducibles with multiplicities, sorted
/// deterministically by degree and then by coefficients.
///
/// The unit leading coefficient is discarded; factoring a constant yields
/// an empty list.
pub fn factor(f: &Field, poly: &UPoly) -> Result<Vec<(UPoly, usize)>> {
    if poly.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut out = Vec::new();
    for (sq, mult) in squarefree_decomposition(f, poly)? {
        for (prod, d) in distinct_degree(f, &sq)? {
            let mut parts = Vec::new();
            equal_degree(f, &prod, d, &mut rng, &mut parts)?;
            out.extend(parts.into_iter().map(|p| (p, mult)));
        }
    }
    out.sort_by(|a, b| poly_key(&a.0).cmp(&poly_key(&b.0)));
    Ok(out)
}

/// Roots in the coefficient field, sorted deterministically, each listed
/// once regardless of multiplicity.
pub fn roots(f: &Field, poly: &UPoly) -> Result<Vec<Element>> {
    if poly.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if poly.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let m = poly.monic(f)?;
    let q = field_order(f);
    // gcd with x^Q - x isolates the distinct linear factors.
    let xq = UPoly::x(f).pow_mod(f, q, &m)?;
    let lin = xq.sub(f, &UPoly::x(f)).gcd(f, &m);
    if lin.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut parts = Vec::new();
    equal_degree(f, &lin, 1, &mut rng, &mut parts)?;
    let mut out: Vec<Element> = parts
        .into_iter()
        .map(|p| f.neg(&p.coeffs[0]))
        .collect();
    out.sort_by_key(element_key);
    Ok(out)
}

/// Number of distinct roots in the coefficient field.
pub fn count_roots(f: &Field, poly: &UPoly) -> Result<usize> {
    if poly.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if poly.degree() == Some(0) {
        return Ok(0);
    }
    let m = poly.monic(f)?;
    let q = field_order(f);
    let xq = UPoly::x(f).pow_mod(f, q, &m)?;
    let lin = xq.sub(f, &UPoly::x(f)).gcd(f, &m);
    Ok(lin.degree().unwrap_or(0))
}

/// Uniformly sampled monic irreducible of exact degree `d`.
pub fn random_irreducible<R: Rng>(f: &Field, d: usize, rng: &mut R) -> UPoly {
    assert!(d >= 1, "irreducible polynomials have positive degree");
    loop {
        let mut coeffs: Vec<Element> = (0..d).map(|_| f.random(rng)).collect();
        coeffs.push(f.one());
        let cand = UPoly { coeffs };
        if is_irreducible(f, &cand) {
            return cand;
        }
    }
}
