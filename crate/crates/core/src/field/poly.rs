//! Dense univariate polynomials over a [`Field`].
//!
//! Coefficients are stored lowest degree first with no trailing zeros, so
//! the zero polynomial is the empty vector.  Every operation takes the
//! coefficient field as an explicit context argument, matching the handle
//! style of the element type.

use crate::error::{Error, Result};
use crate::field::{Element, Field};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct UPoly {
    pub coeffs: Vec<Element>,
}

impl UPoly {
    pub fn zero() -> Self {
        UPoly { coeffs: Vec::new() }
    }

    pub fn one(f: &Field) -> Self {
        UPoly { coeffs: vec![f.one()] }
    }

    pub fn x(f: &Field) -> Self {
        UPoly { coeffs: vec![f.zero(), f.one()] }
    }

    pub fn constant(f: &Field, c: Element) -> Self {
        UPoly::from_coeffs(f, vec![c])
    }

    /// Normalizing constructor: strips trailing zeros.
    pub fn from_coeffs(f: &Field, mut coeffs: Vec<Element>) -> Self {
        while coeffs.last().is_some_and(|c| f.is_zero(c)) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    /// Convenience constructor from integer coefficients, lowest first.
    pub fn from_u64s(f: &Field, coeffs: &[u64]) -> Self {
        UPoly::from_coeffs(f, coeffs.iter().map(|&c| f.from_u64(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Leading coefficient.  Panics on the zero polynomial.
    pub fn lc(&self) -> &Element {
        self.coeffs.last().expect("leading coefficient of zero polynomial")
    }

    /// Coefficient of `x^i` (zero beyond the stored length).
    pub fn coeff(&self, f: &Field, i: usize) -> Element {
        self.coeffs.get(i).cloned().unwrap_or_else(|| f.zero())
    }

    pub fn add(&self, f: &Field, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(f.add(&self.coeff(f, i), &other.coeff(f, i)));
        }
        UPoly::from_coeffs(f, out)
    }

    pub fn sub(&self, f: &Field, other: &Self) -> Self {
        self.add(f, &other.neg(f))
    }

    pub fn neg(&self, f: &Field) -> Self {
        UPoly { coeffs: self.coeffs.iter().map(|c| f.neg(c)).collect() }
    }

    pub fn mul(&self, f: &Field, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if f.is_zero(b) {
                    continue;
                }
                let t = f.mul(a, b);
                out[i + j] = f.add(&out[i + j], &t);
            }
        }
        UPoly::from_coeffs(f, out)
    }

    pub fn mul_scalar(&self, f: &Field, s: &Element) -> Self {
        UPoly::from_coeffs(f, self.coeffs.iter().map(|c| f.mul(c, s)).collect())
    }

    /// Multiply by `x^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return UPoly::zero();
        }
        let mut out = Vec::with_capacity(self.coeffs.len() + k);
        out.resize(k, zero_like(&self.coeffs[0]));
        out.extend(self.coeffs.iter().cloned());
        UPoly { coeffs: out }
    }

    /// Quotient and remainder by a nonzero divisor.
    pub fn divrem(&self, f: &Field, div: &Self) -> Result<(Self, Self)> {
        let dd = div.degree().ok_or(Error::DivisionByZero)?;
        let lc_inv = f.inv(div.lc())?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((UPoly::zero(), self.clone()));
        }
        let qlen = rem.len() - dd;
        let mut quot = vec![f.zero(); qlen];
        let mut i = rem.len();
        while i > dd {
            i -= 1;
            if f.is_zero(&rem[i]) {
                continue;
            }
            let c = f.mul(&rem[i], &lc_inv);
            let off = i - dd;
            for (j, dc) in div.coeffs.iter().enumerate() {
                let t = f.mul(&c, dc);
                rem[off + j] = f.sub(&rem[off + j], &t);
            }
            quot[off] = c;
        }
        Ok((UPoly::from_coeffs(f, quot), UPoly::from_coeffs(f, rem)))
    }

    pub fn rem(&self, f: &Field, div: &Self) -> Result<Self> {
        Ok(self.divrem(f, div)?.1)
    }

    /// Make monic; errors only on the zero polynomial.
    pub fn monic(&self, f: &Field) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let s = f.inv(self.lc())?;
        Ok(self.mul_scalar(f, &s))
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, f: &Field, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(f, &b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic(f).expect("nonzero gcd")
        }
    }

    /// Extended gcd: returns `(g, s, t)` with `s*self + t*other = g`.
    pub fn ext_gcd(&self, f: &Field, other: &Self) -> Result<(Self, Self, Self)> {
        let mut r0 = self.clone();
        let mut r1 = other.clone();
        let mut s0 = UPoly::one(f);
        let mut s1 = UPoly::zero();
        let mut t0 = UPoly::zero();
        let mut t1 = UPoly::one(f);
        while !r1.is_zero() {
            let (q, r) = r0.divrem(f, &r1)?;
            r0 = r1;
            r1 = r;
            let ns = s0.sub(f, &q.mul(f, &s1));
            s0 = s1;
            s1 = ns;
            let nt = t0.sub(f, &q.mul(f, &t1));
            t0 = t1;
            t1 = nt;
        }
        Ok((r0, s0, t0))
    }

    pub fn derivative(&self, f: &Field) -> Self {
        if self.coeffs.len() <= 1 {
            return UPoly::zero();
        }
        let out = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(i, c)| f.scale_by_u64(c, (i + 1) as u64))
            .collect();
        UPoly::from_coeffs(f, out)
    }

    /// Horner evaluation.
    pub fn eval(&self, f: &Field, x: &Element) -> Element {
        let mut acc = f.zero();
        for c in self.coeffs.iter().rev() {
            acc = f.mul(&acc, x);
            acc = f.add(&acc, c);
        }
        acc
    }

    /// `self(g) mod m` by Horner over the quotient ring.
    pub fn compose_mod(&self, f: &Field, g: &Self, m: &Self) -> Result<Self> {
        let mut acc = UPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(f, g).rem(f, m)?;
            acc = acc.add(f, &UPoly::constant(f, c.clone()));
        }
        Ok(acc)
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, f: &Field, mut e: u128, m: &Self) -> Result<Self> {
        let mut acc = UPoly::one(f).rem(f, m)?;
        let mut base = self.rem(f, m)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(f, &base).rem(f, m)?;
            }
            base = base.mul(f, &base).rem(f, m)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Apply a map to every coefficient (e.g. a field embedding).
    pub fn map_coeffs<F>(&self, target: &Field, mut op: F) -> Self
    where
        F: FnMut(&Element) -> Element,
    {
        UPoly::from_coeffs(target, self.coeffs.iter().map(|c| op(c)).collect())
    }
}

fn zero_like(e: &Element) -> Element {
    match e {
        Element::P(_) => Element::P(0),
        Element::E(c) => Element::E(c.iter().map(zero_like).collect()),
    }
}

impl Field {
    /// Multiply an element by a small integer (repeated-doubling scalar).
    pub fn scale_by_u64(&self, a: &Element, k: u64) -> Element {
        let r = k % self.char();
        self.mul(a, &self.from_u64(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_divrem_roundtrip() {
        let f = Field::prime(7).unwrap();
        // (x^3 + x + 4) / (x + 1): remainder is the value at x = -1.
        let a = UPoly::from_u64s(&f, &[4, 1, 0, 1]);
        let d = UPoly::from_u64s(&f, &[1, 1]);
        let (q, r) = a.divrem(&f, &d).unwrap();
        assert_eq!(q.mul(&f, &d).add(&f, &r), a);
        assert_eq!(r, UPoly::from_u64s(&f, &[2])); // (-1)^3 + (-1) + 4 = 2
    }

    #[test]
    fn test_ext_gcd_bezout() {
        // -1 is not a square mod 11, so x^2 + 1 stays coprime to x + 5.
        let f = Field::prime(11).unwrap();
        let a = UPoly::from_u64s(&f, &[1, 0, 1]).mul(&f, &UPoly::from_u64s(&f, &[3, 1]));
        let b = UPoly::from_u64s(&f, &[5, 1]).mul(&f, &UPoly::from_u64s(&f, &[3, 1]));
        let (g, s, t) = a.ext_gcd(&f, &b).unwrap();
        let lhs = s.mul(&f, &a).add(&f, &t.mul(&f, &b));
        assert_eq!(lhs, g);
        assert_eq!(g.monic(&f).unwrap(), UPoly::from_u64s(&f, &[3, 1]));
    }

    #[test]
    fn test_eval_and_derivative() {
        let f = Field::prime(11).unwrap();
        let p = UPoly::from_u64s(&f, &[2, 0, 5, 1]); // x^3 + 5x^2 + 2
        assert_eq!(p.eval(&f, &f.from_u64(3)), f.from_u64((27 + 45 + 2) % 11));
        let dp = p.derivative(&f);
        assert_eq!(dp, UPoly::from_u64s(&f, &[0, 10, 3]));
    }

    #[test]
    fn test_pow_mod_fermat() {
        // x^p = x mod any irreducible of degree 1 chain: use x^7 mod (x^2+1).
        let f = Field::prime(7).unwrap();
        let m = UPoly::from_u64s(&f, &[1, 0, 1]);
        let xp = UPoly::x(&f).pow_mod(&f, 7, &m).unwrap();
        // x^2 = -1, so x^7 = (x^2)^3 x = -x.
        assert_eq!(xp, UPoly::from_u64s(&f, &[0, 6]));
    }
}
