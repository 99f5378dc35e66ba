//! Symmetric bilinear decompositions of an extension field over its base.
//!
//! Over GF(q), multiplying two degree < m polynomials is recovered from
//! their values at 2m-2 distinct points plus the leading coefficients
//! (the point at infinity), giving 2m-1 pure symmetric terms whenever
//! q >= 2m-2.  Smaller base fields fall back to the symmetric-basis split
//! of the structure tensor with m(3m-1)/2 terms.

use crate::error::{Error, Result};
use crate::equivariant::PureSymmetricTerm;
use crate::field::poly::UPoly;
use crate::field::{Element, Field};

/// Pure symmetric terms computing products in `field` over its base:
/// x*y = sum_t coeff_t * f_t(x) * f_t(y) with base-valued functionals f_t
/// applied to power-basis coordinates.
#[derive(Clone, Debug)]
pub struct MuDecomposition {
    pub field: Field,
    pub terms: Vec<PureSymmetricTerm>,
}

impl MuDecomposition {
    pub fn mu(&self) -> usize {
        self.terms.len()
    }

    /// Power-basis coordinates of x over the immediate base field.
    pub fn coords(&self, x: &Element) -> Vec<Element> {
        if self.field.is_prime_field() {
            vec![x.clone()]
        } else {
            x.coords().to_vec()
        }
    }

    /// Applies functional t to the coordinates of x.
    pub fn apply(&self, t: usize, x: &Element) -> Element {
        let base = self.field.base();
        let coords = self.coords(x);
        let mut acc = base.zero();
        for (c, f) in coords.iter().zip(&self.terms[t].functional) {
            acc = base.add(&acc, &base.mul(c, f));
        }
        acc
    }

    /// Exact check against field multiplication: bilinearity makes the
    /// basis products a complete test.
    pub fn check(&self) -> Result<()> {
        let f = &self.field;
        let m = f.ext_degree();
        let basis = |i: usize| -> Element {
            let mut c = vec![f.base().zero(); m];
            c[i] = f.base().one();
            f.from_coords(&c).expect("basis coords")
        };
        for i in 0..m {
            for j in 0..m {
                let (ei, ej) = (basis(i), basis(j));
                let want = f.mul(&ei, &ej);
                let mut got = f.zero();
                for t in 0..self.terms.len() {
                    let s = f.base().mul(&self.apply(t, &ei), &self.apply(t, &ej));
                    got = f.add(&got, &f.scale(&self.terms[t].coeff, &s));
                }
                if got != want {
                    return Err(Error::VerificationFailed(format!(
                        "mu decomposition wrong on basis pair ({i}, {j})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Decomposition for the degree-m tower generated deterministically over
/// GF(q); see `mu_decomposition_for_field` to target an existing field.
pub fn lagrange_mu_decomposition(q: u64, m: usize) -> Result<MuDecomposition> {
    let k = Field::prime(q)?;
    if m == 1 {
        return mu_decomposition_for_field(&k);
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let modulus = crate::field::factor::random_irreducible(&k, m, &mut rng);
    let kp = Field::extension(&k, &modulus)?;
    mu_decomposition_for_field(&kp)
}

use rand::SeedableRng;

/// Decomposition of multiplication in `kp` over its immediate base.
pub fn mu_decomposition_for_field(kp: &Field) -> Result<MuDecomposition> {
    let m = kp.ext_degree();
    let base = kp.base();
    if m == 1 {
        let dec = MuDecomposition {
            field: kp.clone(),
            terms: vec![PureSymmetricTerm {
                coeff: kp.one(),
                functional: vec![kp.one()],
            }],
        };
        dec.check()?;
        return Ok(dec);
    }
    let q = base.order_u128().unwrap_or(u128::MAX);
    let dec = if q >= (2 * m - 2) as u128 {
        interpolation_terms(kp)?
    } else {
        symmetric_basis_terms(kp)
    };
    dec.check()?;
    Ok(dec)
}

/// 2m-1 terms from evaluation at 0, 1, ..., 2m-3 and infinity.
fn interpolation_terms(kp: &Field) -> Result<MuDecomposition> {
    let m = kp.ext_degree();
    let base = kp.base();
    let h = kp.modulus().expect("extension field").clone();
    let pts: Vec<Element> = (0..(2 * m - 2) as u64).map(|v| base.from_u64(v)).collect();
    // Monic product of (x - c) over all sample points.
    let mut full = UPoly::one(&base);
    for c in &pts {
        let lin = UPoly::from_coeffs(&base, vec![base.neg(c), base.one()]);
        full = full.mul(&base, &lin);
    }
    let embed = |p: &UPoly| -> Result<Element> {
        let r = p.rem(&base, &h)?;
        let mut coords = vec![base.zero(); m];
        for (i, c) in r.coeffs.iter().enumerate() {
            coords[i] = c.clone();
        }
        kp.from_coords(&coords)
    };
    let mut terms = Vec::with_capacity(2 * m - 1);
    for c in &pts {
        // Lagrange basis polynomial for c over the sample points.
        let lin = UPoly::from_coeffs(&base, vec![base.neg(c), base.one()]);
        let (num, r) = full.divrem(&base, &lin)?;
        debug_assert!(r.is_zero());
        let scale = base.inv(&num.eval(&base, c))?;
        let lagrange = num.mul_scalar(&base, &scale);
        let functional: Vec<Element> = (0..m)
            .scan(base.one(), |pow, _| {
                let out = pow.clone();
                *pow = base.mul(pow, c);
                Some(out)
            })
            .collect();
        terms.push(PureSymmetricTerm { coeff: embed(&lagrange)?, functional });
    }
    // Leading coefficients carry the part of the product not determined
    // by the finite samples.
    let mut top = vec![base.zero(); m];
    top[m - 1] = base.one();
    terms.push(PureSymmetricTerm { coeff: embed(&full)?, functional: top });
    Ok(MuDecomposition { field: kp.clone(), terms })
}

/// m(3m-1)/2 terms from the symmetric-basis split of the structure
/// tensor; works for every base field size.
fn symmetric_basis_terms(kp: &Field) -> MuDecomposition {
    let m = kp.ext_degree();
    let base = kp.base();
    let basis = |i: usize| -> Element {
        let mut c = vec![base.zero(); m];
        c[i] = base.one();
        kp.from_coords(&c).expect("basis coords")
    };
    let row = |i: usize| -> Vec<Element> {
        let mut r = vec![base.zero(); m];
        r[i] = base.one();
        r
    };
    let mut terms = Vec::with_capacity(m * (3 * m - 1) / 2);
    for i in 0..m {
        terms.push(PureSymmetricTerm {
            coeff: kp.mul(&basis(i), &basis(i)),
            functional: row(i),
        });
    }
    for i in 0..m {
        for j in i + 1..m {
            let w = kp.mul(&basis(i), &basis(j));
            let mut rij = row(i);
            rij[j] = base.one();
            terms.push(PureSymmetricTerm { coeff: w.clone(), functional: rij });
            let neg = kp.neg(&w);
            terms.push(PureSymmetricTerm { coeff: neg.clone(), functional: row(i) });
            terms.push(PureSymmetricTerm { coeff: neg, functional: row(j) });
        }
    }
    MuDecomposition { field: kp.clone(), terms }
}
