//! Finite fields of word-sized characteristic.
//!
//! A [`Field`] is a cheap cloneable handle, either a prime field `GF(p)` with
//! `p < 2^61`, or an extension `GF(p)[x]/(f)` over another handle with a
//! monic irreducible modulus `f`.  Towers are supported by letting the base
//! of an extension be itself an extension; the constructions in this crate
//! use at most two extension steps above the prime field.
//!
//! Elements are passed by value and interpreted relative to a handle, in the
//! style of a context object: the handle owns the modulus, elements own only
//! their coordinates.  Extension elements store their coordinates in the
//! power basis of the recorded modulus, lowest degree first, always at full
//! length.

pub mod factor;
pub mod linalg;
pub mod normal;
pub mod poly;

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use poly::UPoly;

/// Largest supported prime characteristic, exclusive.
pub const MAX_PRIME: u64 = 1 << 61;

/// An element of a finite field, interpreted relative to a [`Field`] handle.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Element {
    /// Residue in a prime field.
    P(u64),
    /// Coordinates over the base field in the power basis of the modulus.
    E(Vec<Element>),
}

impl Element {
    /// Residue value of a prime-field element.
    ///
    /// Panics when called on an extension element.
    pub fn as_u64(&self) -> u64 {
        match self {
            Element::P(v) => *v,
            Element::E(_) => panic!("extension element has no residue value"),
        }
    }

    /// Coordinate slice of an extension element.
    pub fn coords(&self) -> &[Element] {
        match self {
            Element::E(c) => c,
            Element::P(_) => panic!("prime-field element has no coordinates"),
        }
    }
}

#[derive(Debug)]
enum FieldKind {
    Prime { p: u64 },
    Ext {
        base: Field,
        /// Monic irreducible modulus over `base`; length `degree + 1`.
        modulus: UPoly,
        degree: usize,
    },
}

/// Handle to a finite field.  Clones share the same underlying description.
#[derive(Clone, Debug)]
pub struct Field(Arc<FieldKind>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        match (&*self.0, &*other.0) {
            (FieldKind::Prime { p: a }, FieldKind::Prime { p: b }) => a == b,
            (
                FieldKind::Ext { base: b1, modulus: m1, .. },
                FieldKind::Ext { base: b2, modulus: m2, .. },
            ) => b1 == b2 && m1.coeffs == m2.coeffs,
            _ => false,
        }
    }
}

impl Eq for Field {}

impl Field {
    /// The prime field `GF(p)`.  Primality is checked deterministically.
    pub fn prime(p: u64) -> Result<Self> {
        if p < 2 || p >= MAX_PRIME || !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Field(Arc::new(FieldKind::Prime { p })))
    }

    /// The extension of `base` by a monic irreducible `modulus`.
    ///
    /// Irreducibility is verified; pass a modulus from
    /// [`factor::random_irreducible`] to skip redundant work at the call
    /// site (the check here is cheap relative to the search).
    pub fn extension(base: &Field, modulus: &UPoly) -> Result<Self> {
        let d = modulus.degree().ok_or(Error::ZeroPolynomial)?;
        if d == 0 {
            return Err(Error::ReducibleModulus(0));
        }
        if !base.is_one(modulus.lc()) {
            return Err(Error::ReducibleModulus(d));
        }
        if !factor::is_irreducible(base, modulus) {
            return Err(Error::ReducibleModulus(d));
        }
        Ok(Field(Arc::new(FieldKind::Ext {
            base: base.clone(),
            modulus: modulus.clone(),
            degree: d,
        })))
    }

    /// Extension by a monic modulus whose irreducibility the caller
    /// certifies by other means.
    ///
    /// Large-degree quotients used internally are certified by group-order
    /// arguments, which is much cheaper than a direct irreducibility test.
    /// With a reducible modulus the quotient is merely a ring and [`inv`]
    /// fails on zero divisors.
    ///
    /// [`inv`]: Field::inv
    pub fn extension_unchecked(base: &Field, modulus: &UPoly) -> Result<Self> {
        let d = modulus.degree().ok_or(Error::ZeroPolynomial)?;
        if d == 0 || !base.is_one(modulus.lc()) {
            return Err(Error::ReducibleModulus(d));
        }
        Ok(Field(Arc::new(FieldKind::Ext {
            base: base.clone(),
            modulus: modulus.clone(),
            degree: d,
        })))
    }

    /// Characteristic of the field.
    pub fn char(&self) -> u64 {
        match &*self.0 {
            FieldKind::Prime { p } => *p,
            FieldKind::Ext { base, .. } => base.char(),
        }
    }

    /// Degree over the prime field.
    pub fn abs_degree(&self) -> usize {
        match &*self.0 {
            FieldKind::Prime { .. } => 1,
            FieldKind::Ext { base, degree, .. } => base.abs_degree() * degree,
        }
    }

    /// Degree over the immediate base field (1 for a prime field).
    pub fn ext_degree(&self) -> usize {
        match &*self.0 {
            FieldKind::Prime { .. } => 1,
            FieldKind::Ext { degree, .. } => *degree,
        }
    }

    /// Immediate base field (self for a prime field).
    pub fn base(&self) -> Field {
        match &*self.0 {
            FieldKind::Prime { .. } => self.clone(),
            FieldKind::Ext { base, .. } => base.clone(),
        }
    }

    /// Modulus of an extension field.
    pub fn modulus(&self) -> Option<&UPoly> {
        match &*self.0 {
            FieldKind::Prime { .. } => None,
            FieldKind::Ext { modulus, .. } => Some(modulus),
        }
    }

    /// Number of elements, when it fits in a `u128`.
    pub fn order_u128(&self) -> Option<u128> {
        let p = self.char() as u128;
        let mut acc: u128 = 1;
        for _ in 0..self.abs_degree() {
            acc = acc.checked_mul(p)?;
        }
        Some(acc)
    }

    pub fn is_prime_field(&self) -> bool {
        matches!(&*self.0, FieldKind::Prime { .. })
    }

    pub fn zero(&self) -> Element {
        match &*self.0 {
            FieldKind::Prime { .. } => Element::P(0),
            FieldKind::Ext { base, degree, .. } => {
                Element::E(vec![base.zero(); *degree])
            }
        }
    }

    pub fn one(&self) -> Element {
        self.from_u64(1)
    }

    /// The image of the integer `v` (reduction of `v` mod `p`, embedded).
    pub fn from_u64(&self, v: u64) -> Element {
        match &*self.0 {
            FieldKind::Prime { p } => Element::P(v % p),
            FieldKind::Ext { base, degree, .. } => {
                let mut c = vec![base.zero(); *degree];
                c[0] = base.from_u64(v);
                Element::E(c)
            }
        }
    }

    /// Embed an element of the immediate base field as a constant.
    pub fn embed_base(&self, v: &Element) -> Element {
        match &*self.0 {
            FieldKind::Prime { .. } => v.clone(),
            FieldKind::Ext { base, degree, .. } => {
                debug_assert!(base.contains(v));
                let mut c = vec![base.zero(); *degree];
                c[0] = v.clone();
                Element::E(c)
            }
        }
    }

    /// Build an extension element from base coordinates (padded with zeros).
    pub fn from_coords(&self, coords: &[Element]) -> Result<Element> {
        match &*self.0 {
            FieldKind::Prime { .. } => {
                if coords.len() != 1 {
                    return Err(Error::FieldMismatch("coordinate length"));
                }
                self.check(&coords[0])?;
                Ok(coords[0].clone())
            }
            FieldKind::Ext { base, degree, .. } => {
                if coords.len() > *degree {
                    return Err(Error::FieldMismatch("coordinate length"));
                }
                let mut c = coords.to_vec();
                for x in &c {
                    base.check(x)?;
                }
                c.resize(*degree, base.zero());
                Ok(Element::E(c))
            }
        }
    }

    /// Structural membership test for an element.
    pub fn contains(&self, v: &Element) -> bool {
        match (&*self.0, v) {
            (FieldKind::Prime { p }, Element::P(x)) => x < p,
            (FieldKind::Ext { base, degree, .. }, Element::E(c)) => {
                c.len() == *degree && c.iter().all(|x| base.contains(x))
            }
            _ => false,
        }
    }

    /// Membership test as a `Result`, for public API boundaries.
    pub fn check(&self, v: &Element) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::FieldMismatch("element does not belong to this field"))
        }
    }

    pub fn is_zero(&self, v: &Element) -> bool {
        match v {
            Element::P(x) => *x == 0,
            Element::E(c) => {
                let b = self.base();
                c.iter().all(|x| b.is_zero(x))
            }
        }
    }

    pub fn is_one(&self, v: &Element) -> bool {
        *v == self.one()
    }

    pub fn add(&self, a: &Element, b: &Element) -> Element {
        match (&*self.0, a, b) {
            (FieldKind::Prime { p }, Element::P(x), Element::P(y)) => {
                Element::P(addmod(*x, *y, *p))
            }
            (FieldKind::Ext { base, .. }, Element::E(x), Element::E(y)) => {
                debug_assert_eq!(x.len(), y.len());
                Element::E(
                    x.iter().zip(y).map(|(u, v)| base.add(u, v)).collect(),
                )
            }
            _ => panic!("mixed element kinds in add"),
        }
    }

    pub fn sub(&self, a: &Element, b: &Element) -> Element {
        self.add(a, &self.neg(b))
    }

    pub fn neg(&self, a: &Element) -> Element {
        match (&*self.0, a) {
            (FieldKind::Prime { p }, Element::P(x)) => {
                Element::P(if *x == 0 { 0 } else { p - x })
            }
            (FieldKind::Ext { base, .. }, Element::E(x)) => {
                Element::E(x.iter().map(|u| base.neg(u)).collect())
            }
            _ => panic!("mixed element kinds in neg"),
        }
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        match (&*self.0, a, b) {
            (FieldKind::Prime { p }, Element::P(x), Element::P(y)) => {
                Element::P(mulmod(*x, *y, *p))
            }
            (FieldKind::Ext { base, modulus, degree }, Element::E(x), Element::E(y)) => {
                Element::E(mul_mod_coords(base, x, y, modulus, *degree))
            }
            _ => panic!("mixed element kinds in mul"),
        }
    }

    /// Multiply by an element of the immediate base field.
    pub fn scale(&self, a: &Element, s: &Element) -> Element {
        match (&*self.0, a) {
            (FieldKind::Prime { .. }, _) => self.mul(a, s),
            (FieldKind::Ext { base, .. }, Element::E(x)) => {
                Element::E(x.iter().map(|u| base.mul(u, s)).collect())
            }
            _ => panic!("mixed element kinds in scale"),
        }
    }

    pub fn inv(&self, a: &Element) -> Result<Element> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        match (&*self.0, a) {
            (FieldKind::Prime { p }, Element::P(x)) => {
                Ok(Element::P(invmod(*x, *p)))
            }
            (FieldKind::Ext { base, modulus, .. }, Element::E(x)) => {
                let f = UPoly::from_coeffs(base, x.clone());
                let (g, s, _) = f.ext_gcd(base, modulus)?;
                if g.degree() != Some(0) {
                    // The modulus is irreducible, so only zero lacks an
                    // inverse; reaching this indicates a corrupted handle.
                    return Err(Error::DivisionByZero);
                }
                let scale = base.inv(g.lc())?;
                let inv = s.mul_scalar(base, &scale);
                let mut c = inv.coeffs;
                c.resize(self.ext_degree(), base.zero());
                Ok(Element::E(c))
            }
            _ => panic!("mixed element kinds in inv"),
        }
    }

    pub fn div(&self, a: &Element, b: &Element) -> Result<Element> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow_u128(&self, a: &Element, mut e: u128) -> Element {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// `a^(p^k)` where `p` is the characteristic.
    pub fn frobenius_char(&self, a: &Element, k: usize) -> Element {
        let mut acc = a.clone();
        let p = self.char() as u128;
        for _ in 0..k {
            acc = self.pow_u128(&acc, p);
        }
        acc
    }

    /// Uniformly random element from the given generator.
    pub fn random<R: Rng>(&self, rng: &mut R) -> Element {
        match &*self.0 {
            FieldKind::Prime { p } => Element::P(rng.gen_range(0..*p)),
            FieldKind::Ext { base, degree, .. } => {
                Element::E((0..*degree).map(|_| base.random(rng)).collect())
            }
        }
    }

    /// Element with the given index in the lexicographic enumeration.
    ///
    /// Index 0 is zero; prime residues enumerate in natural order; an
    /// extension enumerates coordinates as base-`|base|` digits, lowest
    /// coordinate least significant.
    pub fn element_from_index(&self, idx: u128) -> Element {
        match &*self.0 {
            FieldKind::Prime { p } => Element::P((idx % (*p as u128)) as u64),
            FieldKind::Ext { base, degree, .. } => {
                let b = base
                    .order_u128()
                    .expect("enumeration requires a small base field");
                let mut rem = idx;
                let mut c = Vec::with_capacity(*degree);
                for _ in 0..*degree {
                    c.push(base.element_from_index(rem % b));
                    rem /= b;
                }
                Element::E(c)
            }
        }
    }
}

/// Schoolbook product of coordinate vectors reduced by the monic modulus.
fn mul_mod_coords(
    base: &Field,
    x: &[Element],
    y: &[Element],
    modulus: &UPoly,
    degree: usize,
) -> Vec<Element> {
    let mut prod = vec![base.zero(); 2 * degree - 1];
    for (i, xi) in x.iter().enumerate() {
        if base.is_zero(xi) {
            continue;
        }
        for (j, yj) in y.iter().enumerate() {
            if base.is_zero(yj) {
                continue;
            }
            let t = base.mul(xi, yj);
            prod[i + j] = base.add(&prod[i + j], &t);
        }
    }
    // Monic reduction, highest coefficient first.
    for i in (degree..prod.len()).rev() {
        if base.is_zero(&prod[i]) {
            continue;
        }
        let c = prod[i].clone();
        for j in 0..degree {
            let t = base.mul(&c, &modulus.coeffs[j]);
            prod[i - degree + j] = base.sub(&prod[i - degree + j], &t);
        }
        prod[i] = base.zero();
    }
    prod.truncate(degree);
    prod
}

#[inline]
pub(crate) fn addmod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub(crate) fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn powmod(mut a: u64, mut e: u128, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    acc
}

pub(crate) fn invmod(a: u64, p: u64) -> u64 {
    // p is prime and a != 0 mod p.
    powmod(a, (p - 2) as u128, p)
}

/// Deterministic Miller-Rabin, valid for all inputs below 2^64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d as u128, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Integer square root of a `u128`.
pub fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = 1u128 << ((128 - n.leading_zeros()).div_ceil(2));
    loop {
        let y = (x + n / x) / 2;
        if y >= x {
            return x;
        }
        x = y;
    }
}
