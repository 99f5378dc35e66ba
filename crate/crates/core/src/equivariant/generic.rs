//! Generic equivariant decomposition from the identity-component form.
//!
//! For any shift-equivariant product on K^n the full structure tensor is
//! determined by the single symmetric matrix G with G_ij = coordinate 0 of
//! e_i * e_j: coordinate k of u * v is G evaluated on the shifted-back
//! pair.  Splitting G into pure symmetric terms with the identity
//! (u_i + u_j)(v_i + v_j) - u_i v_i - u_j v_j = u_i v_j + u_j v_i
//! works in every characteristic and lifts term by term to a cyclic
//! decomposition of the whole product.

use crate::error::Result;
use crate::equivariant::{EquivariantDecomposition, MulContext};
use crate::field::Element;
use crate::group_algebra::GroupAlgebraElement;

/// One pure term lambda * f(u) * f(v) of a symmetric bilinear form, with
/// the functional f given by its coefficient row.
#[derive(Clone, Debug)]
pub struct PureSymmetricTerm {
    pub coeff: Element,
    pub functional: Vec<Element>,
}

/// Lifts pure terms of the identity-component form to a decomposition of
/// the full product, one cyclic term per input term.
///
/// A functional row alpha turns into the convolver with coordinates
/// t_k = alpha_{(n-k) mod n}, so that (t ⋆ u)_k recovers alpha applied to
/// the k-fold shifted-back u; the scalar coefficient becomes a multiple
/// of the convolution unit on the output side.
pub fn lift_identity_component<C: MulContext>(
    ctx: &C,
    terms: &[PureSymmetricTerm],
) -> Result<EquivariantDecomposition> {
    let f = ctx.field();
    let n = ctx.n();
    let mut tops = Vec::with_capacity(terms.len());
    let mut bots = Vec::with_capacity(terms.len());
    for term in terms {
        let t: Vec<Element> = (0..n)
            .map(|k| term.functional[(n - k) % n].clone())
            .collect();
        tops.push(GroupAlgebraElement::new(f, t)?);
        let mut b = vec![f.zero(); n];
        b[0] = term.coeff.clone();
        bots.push(GroupAlgebraElement::new(f, b)?);
    }
    EquivariantDecomposition::new(f, ctx.n1(), ctx.n2(), tops, bots)
}

/// Characteristic-free decomposition with exactly n(3n-1)/2 terms.
///
/// Zero-coefficient terms are kept so the term count depends only on n.
pub fn generic_decomposition<C: MulContext>(ctx: &C) -> Result<EquivariantDecomposition> {
    let f = ctx.field();
    let n = ctx.n();
    let basis = |i: usize| -> Vec<Element> {
        let mut e = vec![f.zero(); n];
        e[i] = f.one();
        e
    };
    // G_ij = coordinate 0 of e_i * e_j; the product is commutative so only
    // the upper triangle is computed.
    let mut g = vec![vec![f.zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let prod = ctx.ref_multiply(&basis(i), &basis(j))?;
            g[i][j] = prod[0].clone();
            g[j][i] = prod[0].clone();
        }
    }
    let mut terms = Vec::with_capacity(n * (3 * n - 1) / 2);
    for i in 0..n {
        terms.push(PureSymmetricTerm { coeff: g[i][i].clone(), functional: basis(i) });
    }
    for i in 0..n {
        for j in i + 1..n {
            let mut eij = basis(i);
            eij[j] = f.one();
            terms.push(PureSymmetricTerm { coeff: g[i][j].clone(), functional: eij });
            let neg = f.neg(&g[i][j]);
            terms.push(PureSymmetricTerm { coeff: neg.clone(), functional: basis(i) });
            terms.push(PureSymmetricTerm { coeff: neg, functional: basis(j) });
        }
    }
    lift_identity_component(ctx, &terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivariant::{verify_decomposition, NormalBasisContext, SemisimpleAlgebra};
    use crate::field::Field;

    #[test]
    fn test_trivial_extension() {
        let k = Field::prime(5).unwrap();
        let ctx = NormalBasisContext::generate(&k, 1, 0).unwrap();
        let dec = generic_decomposition(&ctx).unwrap();
        assert_eq!(dec.sigma(), 1);
        assert!(verify_decomposition(&dec, &ctx, 0).unwrap().passed());
    }

    #[test]
    fn test_char_two_cubic() {
        let k = Field::prime(2).unwrap();
        let ctx = NormalBasisContext::generate(&k, 3, 1).unwrap();
        let dec = generic_decomposition(&ctx).unwrap();
        assert_eq!(dec.sigma(), 12);
        assert!(verify_decomposition(&dec, &ctx, 0).unwrap().passed());
    }

    #[test]
    fn test_gf7_cubic_exhaustive() {
        let k = Field::prime(7).unwrap();
        let ctx = NormalBasisContext::generate(&k, 3, 7).unwrap();
        let dec = generic_decomposition(&ctx).unwrap();
        assert_eq!(dec.sigma(), 12);
        let out = verify_decomposition(&dec, &ctx, 0).unwrap();
        assert!(out.passed());
    }

    #[test]
    fn test_twisted_semisimple() {
        // Six-dimensional algebra (two copies of GF(8)) with a twisted
        // cycle of order six; exhaustive over 2^6 coordinate vectors.
        let k = Field::prime(2).unwrap();
        let alg = SemisimpleAlgebra::new(&k, 3, 2, 2, 5).unwrap();
        let dec = generic_decomposition(&alg).unwrap();
        assert_eq!(dec.sigma(), 51);
        assert!(verify_decomposition(&dec, &alg, 0).unwrap().passed());
    }
}
