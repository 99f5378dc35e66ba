//! Scalar descent: from a decomposition over an extension of the base
//! field to one over the base field itself.
//!
//! Setting: K' is a degree-m extension of K, and `dec_up` decomposes a
//! rank-one K'[C]-module algebra A of K'-dimension n (a field or a
//! product of fields, presented by `ctx_up`).  A contains a copy of the
//! degree-n extension of K, recovered here as the kernel of
//! `gamma - Frobenius_q` where gamma is the C-generator of the module.
//! Expanding every K'-scalar of `dec_up` through a symmetric bilinear
//! decomposition of K'/K (`mu`) with mu terms turns each of the sigma
//! terms into mu terms over K, for a total of sigma * mu.
//!
//! Writing z for a module generator of the embedded field, Lambda for its
//! coordinate vector and (w_j, f_j) for the mu terms, the descended terms
//! are indexed by (i, j), i outer:
//!
//! ```text
//! t_ij = f_j applied coordinatewise to  T_i ⋆ Lambda
//! b_ij = P(w_j * B_i)
//! ```
//!
//! where P is the equivariant projection of A onto the embedded field's
//! coordinates, computed by averaging a one-sided inverse of the orbit
//! matrix of z over the cyclic group.  The averaging divides by n, so the
//! characteristic must not divide n.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::equivariant::lagrange::MuDecomposition;
use crate::equivariant::verify::{verify_sampled, VerifyOutcome};
use crate::equivariant::{EquivariantDecomposition, MulContext, NormalBasisContext};
use crate::field::linalg::Mat;
use crate::field::poly::UPoly;
use crate::field::{Element, Field};
use crate::group_algebra::{star, GroupAlgebraElement};

/// Descends `dec_up` (verified against `ctx_up`, coefficients in K') to a
/// decomposition of the degree-n extension of K, returning it with the
/// tower it is expressed in.  The output is re-verified before returning;
/// sigma of the output is exactly sigma(dec_up) * mu.
pub fn descend_scalars<C: MulContext>(
    dec_up: &EquivariantDecomposition,
    ctx_up: &C,
    mu: &MuDecomposition,
) -> Result<(EquivariantDecomposition, NormalBasisContext)> {
    let kp = &mu.field;
    if dec_up.field != *kp || *ctx_up.field() != *kp {
        return Err(Error::FieldMismatch("descent inputs"));
    }
    if dec_up.n != ctx_up.n() || dec_up.n1 != ctx_up.n1() || dec_up.n2 != ctx_up.n2() {
        return Err(Error::SizeMismatch(dec_up.n, ctx_up.n()));
    }
    let n = dec_up.n;
    let m = kp.ext_degree();
    let k = kp.base();
    if n as u64 % k.char() == 0 {
        return Err(Error::DegenerateConfiguration(
            "equivariant averaging needs the characteristic coprime to n",
        ));
    }
    let q = k
        .order_u128()
        .ok_or(Error::FieldTooLarge(k.abs_degree() as u32))?;

    // Generator of the embedded field: for m = 1 the module generator
    // itself works and makes the descent the identity on the data.
    let z = if m == 1 {
        let mut e0 = vec![kp.zero(); n];
        e0[0] = kp.one();
        e0
    } else {
        find_descent_generator(ctx_up, mu, q)?
    };

    // Minimal polynomial of z over K gives the descended tower.
    let minpoly = minpoly_over_base(ctx_up, mu, &z)?;
    let l_abs = Field::extension(&k, &minpoly)?;
    let theta = generator_class(&l_abs, &minpoly)?;
    let down_ctx = NormalBasisContext::new(&l_abs, &theta, 1)?;

    // One-sided inverse of the orbit matrix, restricted to independent
    // rows, then averaged over the cycle for equivariance.
    let orbit = orbit_matrix(mu, &z);
    let pivot_rows = orbit.transpose(&k).pivot_columns(&k);
    if pivot_rows.len() != n {
        return Err(Error::VerificationFailed(format!(
            "orbit of the descent generator has rank {} (expected {n})",
            pivot_rows.len()
        )));
    }
    let mut sub = Mat::zero(&k, n, n);
    for (a, &r) in pivot_rows.iter().enumerate() {
        for c in 0..n {
            *sub.at_mut(a, c) = orbit.at(r, c).clone();
        }
    }
    let sub_inv = sub.inverse(&k)?;
    let inv_n = k.inv(&k.from_u64(n as u64))?;
    let project = |coords: &[Element]| -> Result<Vec<Element>> {
        let mut acc = vec![k.zero(); n];
        let mut cur = coords.to_vec();
        for step in 0..n {
            if step > 0 {
                cur.rotate_right(1);
            }
            let sel: Vec<Element> = pivot_rows
                .iter()
                .map(|&r| mu.coords(&cur[r / m])[r % m].clone())
                .collect();
            let y = sub_inv.mul_vec(&k, &sel)?;
            for i in 0..n {
                acc[i] = k.add(&acc[i], &y[(i + step) % n]);
            }
        }
        Ok(acc.iter().map(|x| k.mul(x, &inv_n)).collect())
    };

    let z_ga = GroupAlgebraElement::new(kp, z.clone())?;
    let mut tops = Vec::with_capacity(dec_up.sigma() * mu.mu());
    let mut bots = Vec::with_capacity(dec_up.sigma() * mu.mu());
    for i in 0..dec_up.sigma() {
        let tz = star(&dec_up.tops[i], &z_ga)?;
        for j in 0..mu.mu() {
            let t_coords: Vec<Element> =
                tz.coords.iter().map(|x| mu.apply(j, x)).collect();
            tops.push(GroupAlgebraElement::new(&k, t_coords)?);
            let w = &mu.terms[j].coeff;
            let scaled: Vec<Element> =
                dec_up.bots[i].coords.iter().map(|x| kp.mul(w, x)).collect();
            bots.push(GroupAlgebraElement::new(&k, project(&scaled)?)?);
        }
    }
    let dec = EquivariantDecomposition::new(&k, n, 1, tops, bots)?;

    match verify_sampled(&dec, &down_ctx, 200)? {
        VerifyOutcome::Pass { .. } => Ok((dec, down_ctx)),
        VerifyOutcome::Fail { .. } => Err(Error::VerificationFailed(
            "descended decomposition disagrees with reference multiplication".into(),
        )),
    }
}

/// K-coordinates of a K'-coordinate vector, power basis within each slot.
fn flatten(mu: &MuDecomposition, v: &[Element]) -> Vec<Element> {
    v.iter().flat_map(|x| mu.coords(x)).collect()
}

/// Columns are the flattened coordinates of the gamma-orbit of z.
fn orbit_matrix(mu: &MuDecomposition, z: &[Element]) -> Mat {
    let k = mu.field.base();
    let n = z.len();
    let m = mu.field.ext_degree();
    let mut mat = Mat::zero(&k, n * m, n);
    let mut cur = z.to_vec();
    for c in 0..n {
        if c > 0 {
            cur.rotate_right(1);
        }
        for (r, x) in flatten(mu, &cur).into_iter().enumerate() {
            *mat.at_mut(r, c) = x;
        }
    }
    mat
}

/// The embedded copy of the degree-n extension of K inside the module
/// algebra is the kernel of `gamma - Frobenius_q`, computed in flattened
/// K-coordinates; a random kernel combination with an independent orbit
/// is a module generator of it.
fn find_descent_generator<C: MulContext>(
    ctx: &C,
    mu: &MuDecomposition,
    q: u128,
) -> Result<Vec<Element>> {
    let kp = &mu.field;
    let k = kp.base();
    let n = ctx.n();
    let m = kp.ext_degree();
    let nm = n * m;
    // Coordinates of Theta^q; gamma^k of it rotates the coordinates.
    let mut e0 = vec![kp.zero(); n];
    e0[0] = kp.one();
    let theta_q = ctx.pow_coords(&e0, q)?;
    let f_basis: Vec<Element> = (0..m)
        .map(|b| {
            let mut c = vec![k.zero(); m];
            c[b] = k.one();
            kp.from_coords(&c).expect("basis coords")
        })
        .collect();
    let mut mat = Mat::zero(&k, nm, nm);
    for s in 0..n {
        let mut rot = theta_q.clone();
        rot.rotate_right(s);
        for (b, fb) in f_basis.iter().enumerate() {
            // Column for the basis element f_b gamma^s Theta:
            // gamma moves it up one slot, Frobenius_q sends it to
            // f_b^q * gamma^s(Theta^q).
            let fbq = kp.pow_u128(fb, q);
            let mut col = vec![kp.zero(); n];
            col[(s + 1) % n] = fb.clone();
            for t in 0..n {
                col[t] = kp.sub(&col[t], &kp.mul(&fbq, &rot[t]));
            }
            for (r, x) in flatten(mu, &col).into_iter().enumerate() {
                *mat.at_mut(r, s * m + b) = x;
            }
        }
    }
    let kernel = mat.kernel_basis(&k);
    if kernel.len() != n {
        return Err(Error::VerificationFailed(format!(
            "descent kernel has dimension {} (expected {n}); \
             the context's twist does not match the scalars",
            kernel.len()
        )));
    }
    // Kernel vectors back to K'-coordinates.
    let members: Vec<Vec<Element>> = kernel
        .iter()
        .map(|v| {
            (0..n)
                .map(|s| kp.from_coords(&v[s * m..(s + 1) * m]).expect("slot coords"))
                .collect()
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0xde5c);
    for _ in 0..128 {
        let mut z = vec![kp.zero(); n];
        for member in &members {
            let c = k.random(&mut rng);
            for (zi, mi) in z.iter_mut().zip(member) {
                *zi = kp.add(zi, &kp.scale(mi, &c));
            }
        }
        let orbit = orbit_matrix(mu, &z);
        if orbit.rank(&k) == n {
            return Ok(z);
        }
    }
    Err(Error::DegenerateConfiguration(
        "no normal generator found in the descended field",
    ))
}

/// Monic minimal polynomial of z over K, via the first linear dependency
/// among its algebra powers; degree n is forced by orbit independence.
fn minpoly_over_base<C: MulContext>(
    ctx: &C,
    mu: &MuDecomposition,
    z: &[Element],
) -> Result<UPoly> {
    let k = mu.field.base();
    let n = ctx.n();
    let m = mu.field.ext_degree();
    let mut pows: Vec<Vec<Element>> = vec![ctx.unit_coords()];
    for j in 1..=n {
        pows.push(ctx.ref_multiply(&pows[j - 1], z)?);
    }
    let mut mat = Mat::zero(&k, n * m, n + 1);
    for (c, p) in pows.iter().enumerate() {
        for (r, x) in flatten(mu, p).into_iter().enumerate() {
            *mat.at_mut(r, c) = x;
        }
    }
    let kernel = mat.kernel_basis(&k);
    if kernel.len() != 1 {
        return Err(Error::VerificationFailed(format!(
            "minimal polynomial space has dimension {}",
            kernel.len()
        )));
    }
    let c = &kernel[0];
    let lead = k.inv(&c[n]).map_err(|_| {
        Error::VerificationFailed("descent generator satisfies a short relation".into())
    })?;
    Ok(UPoly::from_coeffs(
        &k,
        c.iter().map(|x| k.mul(x, &lead)).collect(),
    ))
}

/// The class of x in K[x]/(h), the canonical generator of the rebuilt
/// tower.
fn generator_class(l: &Field, h: &UPoly) -> Result<Element> {
    let k = l.base();
    if l.ext_degree() == 1 {
        // x reduces to the negated constant term.
        return l.from_coords(&[k.neg(&h.coeffs[0])]);
    }
    let mut c = vec![k.zero(); l.ext_degree()];
    c[1] = k.one();
    l.from_coords(&c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivariant::generic::generic_decomposition;
    use crate::equivariant::lagrange::mu_decomposition_for_field;
    use crate::equivariant::verify::verify_decomposition;
    use crate::field::factor;

    fn twisted_context(kp: &Field, n: usize, delta: usize, seed: u64) -> NormalBasisContext {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let modulus = factor::random_irreducible(kp, n, &mut rng);
        let l = Field::extension(kp, &modulus).unwrap();
        let theta = crate::field::normal::find_normal_element(&l, &mut rng).unwrap();
        NormalBasisContext::new(&l, &theta, delta).unwrap()
    }

    #[test]
    fn test_identity_descent() {
        let k = Field::prime(3).unwrap();
        let ctx = NormalBasisContext::generate(&k, 2, 0).unwrap();
        let dec_up = generic_decomposition(&ctx).unwrap();
        let mu = mu_decomposition_for_field(&k).unwrap();
        let (dec, down) = descend_scalars(&dec_up, &ctx, &mu).unwrap();
        assert_eq!(dec.tops, dec_up.tops);
        assert_eq!(dec.bots, dec_up.bots);
        assert!(verify_decomposition(&dec, &down, 0).unwrap().passed());
    }

    #[test]
    fn test_descent_gf8_through_gf4() {
        // n = 3, m = 2: the twist is the inverse of m mod n, here 2.
        let k = Field::prime(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let h = factor::random_irreducible(&k, 2, &mut rng);
        let kp = Field::extension(&k, &h).unwrap();
        let mu = mu_decomposition_for_field(&kp).unwrap();
        assert_eq!(mu.mu(), 3);
        let ctx_up = twisted_context(&kp, 3, 2, 1);
        let dec_up = generic_decomposition(&ctx_up).unwrap();
        assert_eq!(dec_up.sigma(), 12);
        let (dec, down) = descend_scalars(&dec_up, &ctx_up, &mu).unwrap();
        assert_eq!(dec.sigma(), 36);
        let out = verify_decomposition(&dec, &down, 0).unwrap();
        assert!(matches!(out, VerifyOutcome::Pass { exhaustive: true, .. }));
    }

    #[test]
    fn test_wrong_twist_is_rejected() {
        // Plain Frobenius as the C-generator cannot come from extending
        // scalars by GF(4) on a cubic extension; the fixed space is too
        // small and the descent reports it.
        let k = Field::prime(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let h = factor::random_irreducible(&k, 2, &mut rng);
        let kp = Field::extension(&k, &h).unwrap();
        let mu = mu_decomposition_for_field(&kp).unwrap();
        let ctx_up = twisted_context(&kp, 3, 1, 1);
        let dec_up = generic_decomposition(&ctx_up).unwrap();
        match descend_scalars(&dec_up, &ctx_up, &mu) {
            Err(Error::VerificationFailed(msg)) => {
                assert!(msg.contains("kernel"), "unexpected message: {msg}");
            }
            other => panic!("expected a kernel dimension error, got {:?}", other.map(|_| ())),
        }
    }
}
