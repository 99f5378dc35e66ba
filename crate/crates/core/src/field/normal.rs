//! Normal elements of a field extension.
//!
//! For an extension `E/K` of degree `n` with `|K| = q`, an element is
//! normal when its Frobenius orbit `{a, a^q, ..., a^(q^(n-1))}` is a
//! `K`-basis of `E`.  The `q`-power map is applied through its matrix in
//! the power basis, which keeps conjugate computations polynomial in `n`
//! rather than in `log q`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::linalg::Mat;
use crate::field::poly::UPoly;
use crate::field::{Element, Field};

/// Matrix of the `|base|`-power Frobenius of `e` in the power basis,
/// acting on coordinate columns over the base field.
pub fn frobenius_matrix(e: &Field) -> Mat {
    let k = e.base();
    let n = e.ext_degree();
    let m = e.modulus().expect("extension field required");
    let q = k.order_u128().expect("base field order must fit in u128");
    let xq = UPoly::x(&k).pow_mod(&k, q, m).expect("monic modulus");
    let mut out = Mat::zero(&k, n, n);
    let mut pow = UPoly::one(&k);
    for j in 0..n {
        for (i, c) in pow.coeffs.iter().enumerate() {
            *out.at_mut(i, j) = c.clone();
        }
        if j + 1 < n {
            pow = pow.mul(&k, &xq).rem(&k, m).expect("monic modulus");
        }
    }
    out
}

/// The conjugates `a, a^q, ..., a^(q^(n-1))` over the immediate base.
pub fn conjugates(e: &Field, a: &Element, frob: &Mat) -> Vec<Element> {
    let k = e.base();
    let n = e.ext_degree();
    let mut out = Vec::with_capacity(n);
    let mut cur = a.coords().to_vec();
    for _ in 0..n {
        out.push(e.from_coords(&cur).expect("coords stay in the field"));
        cur = frob.mul_vec(&k, &cur).expect("square matrix");
    }
    out
}

/// Matrix with column `i` holding the coordinates of `a^(q^i)`.
pub fn conjugate_matrix(e: &Field, a: &Element) -> Mat {
    let k = e.base();
    let n = e.ext_degree();
    let frob = frobenius_matrix(e);
    let conj = conjugates(e, a, &frob);
    let mut m = Mat::zero(&k, n, n);
    for (j, c) in conj.iter().enumerate() {
        for (i, x) in c.coords().iter().enumerate() {
            *m.at_mut(i, j) = x.clone();
        }
    }
    m
}

pub fn is_normal(e: &Field, a: &Element) -> bool {
    let k = e.base();
    let n = e.ext_degree();
    conjugate_matrix(e, a).rank(&k) == n
}

/// First normal element found by seeded random search.
pub fn find_normal_element<R: Rng>(e: &Field, rng: &mut R) -> Result<Element> {
    if e.is_prime_field() {
        return Err(Error::NotNormal);
    }
    // Normal elements are plentiful; a small bound guards the degenerate
    // case where the handle was built with a reducible modulus.
    for _ in 0..256 {
        let cand = e.random(rng);
        if is_normal(e, &cand) {
            return Ok(cand);
        }
    }
    Err(Error::NotNormal)
}
