//! The group algebra K[C] for a cyclic group C of order n.
//!
//! Elements are coordinate vectors indexed by powers of a fixed generator
//! of C.  The algebra carries two products: the convolution product `star`
//! (multiplication of coordinate polynomials mod `x^n - 1`) and the
//! componentwise product `diamond`.  For field multiplication the
//! generator of C is the Frobenius `x -> x^q`, so the generator action is
//! a cyclic shift of normal-basis coordinates toward higher index.
//!
//! [`Convolver`] carries an optional number-theoretic transform that is
//! built exactly when K contains a primitive n-th root of unity
//! (`n | q - 1`); its output agrees bit for bit with the direct sum since
//! both paths are exact field arithmetic.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::poly::UPoly;
use crate::field::{Element, Field};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GroupAlgebraElement {
    pub field: Field,
    pub coords: Vec<Element>,
}

impl GroupAlgebraElement {
    pub fn new(field: &Field, coords: Vec<Element>) -> Result<Self> {
        for c in &coords {
            field.check(c)?;
        }
        Ok(GroupAlgebraElement { field: field.clone(), coords })
    }

    pub fn from_u64s(field: &Field, coords: &[u64]) -> Self {
        GroupAlgebraElement {
            field: field.clone(),
            coords: coords.iter().map(|&c| field.from_u64(c)).collect(),
        }
    }

    /// Identity for ⋆: the group identity with coefficient one.
    pub fn star_unit(field: &Field, n: usize) -> Self {
        let mut coords = vec![field.zero(); n];
        coords[0] = field.one();
        GroupAlgebraElement { field: field.clone(), coords }
    }

    /// Identity for ⋄: the all-ones vector.
    pub fn diamond_unit(field: &Field, n: usize) -> Self {
        GroupAlgebraElement { field: field.clone(), coords: vec![field.one(); n] }
    }

    pub fn zero(field: &Field, n: usize) -> Self {
        GroupAlgebraElement { field: field.clone(), coords: vec![field.zero(); n] }
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch("group algebra elements"));
        }
        if self.n() != other.n() {
            return Err(Error::SizeMismatch(self.n(), other.n()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let f = &self.field;
        Ok(GroupAlgebraElement {
            field: f.clone(),
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| f.add(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, s: &Element) -> Self {
        let f = &self.field;
        GroupAlgebraElement {
            field: f.clone(),
            coords: self.coords.iter().map(|a| f.mul(a, s)).collect(),
        }
    }

    /// Action of the group generator: one cyclic shift toward higher index.
    pub fn shift(&self) -> Self {
        let n = self.n();
        let mut coords = Vec::with_capacity(n);
        coords.push(self.coords[n - 1].clone());
        coords.extend(self.coords[..n - 1].iter().cloned());
        GroupAlgebraElement { field: self.field.clone(), coords }
    }
}

/// Convolution product: coordinate polynomials multiplied mod `x^n - 1`.
pub fn star(a: &GroupAlgebraElement, b: &GroupAlgebraElement) -> Result<GroupAlgebraElement> {
    a.compatible(b)?;
    Ok(star_direct(a, b))
}

fn star_direct(a: &GroupAlgebraElement, b: &GroupAlgebraElement) -> GroupAlgebraElement {
    let f = &a.field;
    let n = a.n();
    let mut out = vec![f.zero(); n];
    for (i, x) in a.coords.iter().enumerate() {
        if f.is_zero(x) {
            continue;
        }
        for (j, y) in b.coords.iter().enumerate() {
            let t = f.mul(x, y);
            let k = if i + j >= n { i + j - n } else { i + j };
            out[k] = f.add(&out[k], &t);
        }
    }
    GroupAlgebraElement { field: f.clone(), coords: out }
}

/// Componentwise product.
pub fn diamond(a: &GroupAlgebraElement, b: &GroupAlgebraElement) -> Result<GroupAlgebraElement> {
    a.compatible(b)?;
    let f = &a.field;
    Ok(GroupAlgebraElement {
        field: f.clone(),
        coords: a
            .coords
            .iter()
            .zip(&b.coords)
            .map(|(x, y)| f.mul(x, y))
            .collect(),
    })
}

/// Componentwise ⋄ on k-tuples.
pub fn diamond_k(
    a: &[GroupAlgebraElement],
    b: &[GroupAlgebraElement],
) -> Result<Vec<GroupAlgebraElement>> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch(a.len(), b.len()));
    }
    a.iter().zip(b).map(|(x, y)| diamond(x, y)).collect()
}

/// Inverse for ⋆, when the coordinate polynomial is coprime to `x^n - 1`.
pub fn star_inverse(a: &GroupAlgebraElement) -> Result<GroupAlgebraElement> {
    let f = &a.field;
    let n = a.n();
    let poly = UPoly::from_coeffs(f, a.coords.clone());
    let mut mod_coeffs = vec![f.zero(); n + 1];
    mod_coeffs[0] = f.neg(&f.one());
    mod_coeffs[n] = f.one();
    let xn1 = UPoly { coeffs: mod_coeffs };
    let (g, s, _) = poly.ext_gcd(f, &xn1)?;
    if g.degree() != Some(0) {
        return Err(Error::NotInvertible);
    }
    let scale = f.inv(g.lc())?;
    let inv = s.rem(f, &xn1)?.mul_scalar(f, &scale);
    let mut coords = inv.coeffs;
    coords.resize(n, f.zero());
    Ok(GroupAlgebraElement { field: f.clone(), coords })
}

struct NttPlan {
    /// Powers 1, ω, ..., ω^(n-1) of a primitive n-th root of unity.
    omega_pows: Vec<Element>,
    /// Powers of ω^(-1).
    omega_inv_pows: Vec<Element>,
    n_inv: Element,
}

/// Convolution context for a fixed (K, n); carries the transform tables
/// when K has a primitive n-th root of unity.
pub struct Convolver {
    pub field: Field,
    pub n: usize,
    plan: Option<NttPlan>,
}

impl Convolver {
    pub fn new(field: &Field, n: usize) -> Self {
        Convolver { field: field.clone(), n, plan: build_plan(field, n) }
    }

    pub fn transform_active(&self) -> bool {
        self.plan.is_some()
    }

    pub fn star(&self, a: &GroupAlgebraElement, b: &GroupAlgebraElement) -> Result<GroupAlgebraElement> {
        a.compatible(b)?;
        if a.n() != self.n || a.field != self.field {
            return Err(Error::FieldMismatch("convolver context"));
        }
        match &self.plan {
            None => Ok(star_direct(a, b)),
            Some(plan) => Ok(self.star_ntt(plan, a, b)),
        }
    }

    fn star_ntt(
        &self,
        plan: &NttPlan,
        a: &GroupAlgebraElement,
        b: &GroupAlgebraElement,
    ) -> GroupAlgebraElement {
        let f = &self.field;
        let ah = dft(f, &a.coords, &plan.omega_pows);
        let bh = dft(f, &b.coords, &plan.omega_pows);
        let prod: Vec<Element> = ah.iter().zip(&bh).map(|(x, y)| f.mul(x, y)).collect();
        let raw = dft(f, &prod, &plan.omega_inv_pows);
        let coords = raw.iter().map(|x| f.mul(x, &plan.n_inv)).collect();
        GroupAlgebraElement { field: f.clone(), coords }
    }
}

fn dft(f: &Field, v: &[Element], pows: &[Element]) -> Vec<Element> {
    let n = v.len();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = f.zero();
        for (i, x) in v.iter().enumerate() {
            let t = f.mul(x, &pows[(i * k) % n]);
            acc = f.add(&acc, &t);
        }
        out.push(acc);
    }
    out
}

fn build_plan(field: &Field, n: usize) -> Option<NttPlan> {
    if n == 0 {
        return None;
    }
    let q = field.order_u128()?;
    if (q - 1) % n as u128 != 0 {
        return None;
    }
    let omega = find_primitive_root(field, n as u128, q)?;
    let mut omega_pows = Vec::with_capacity(n);
    let mut cur = field.one();
    for _ in 0..n {
        omega_pows.push(cur.clone());
        cur = field.mul(&cur, &omega);
    }
    let mut omega_inv_pows = vec![field.one()];
    omega_inv_pows.extend(omega_pows[1..].iter().rev().cloned());
    let n_inv = field.inv(&field.from_u64(n as u64)).ok()?;
    Some(NttPlan { omega_pows, omega_inv_pows, n_inv })
}

/// Element of exact multiplicative order n, found from random candidates.
fn find_primitive_root(field: &Field, n: u128, q: u128) -> Option<Element> {
    let mut small = Vec::new();
    let mut rem = n;
    let mut d = 2u128;
    while d * d <= rem {
        if rem % d == 0 {
            small.push(d);
            while rem % d == 0 {
                rem /= d;
            }
        }
        d += 1;
    }
    if rem > 1 {
        small.push(rem);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x0a11);
    for _ in 0..256 {
        let r = field.random(&mut rng);
        if field.is_zero(&r) {
            continue;
        }
        let cand = field.pow_u128(&r, (q - 1) / n);
        if !field.is_one(&field.pow_u128(&cand, n)) {
            continue;
        }
        if small
            .iter()
            .all(|&l| !field.is_one(&field.pow_u128(&cand, n / l)))
        {
            return Some(cand);
        }
    }
    None
}
