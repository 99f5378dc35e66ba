//! Multiplication contexts: the algebras whose product a decomposition is
//! measured against.
//!
//! Both context types present the same picture: a free rank-one module
//! over K[C] with a distinguished generator, whose orbit under the
//! C-generator is the coordinate basis.  [`NormalBasisContext`] is a field
//! extension with the orbit of a normal element under a fixed power of the
//! Frobenius; [`SemisimpleAlgebra`] is a product of `n2` copies of a field
//! `GF(q'^{n1})` on which the C-generator shifts components and applies a
//! Frobenius twist at the wraparound.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::linalg::Mat;
use crate::field::normal::{conjugates, frobenius_matrix};
use crate::field::{factor, Element, Field};

/// A context that can multiply coordinate vectors for reference.
pub trait MulContext: Sync {
    /// Coefficient field K of coordinate vectors.
    fn field(&self) -> &Field;
    /// Module dimension over K (always n1 * n2).
    fn n(&self) -> usize;
    fn n1(&self) -> usize;
    fn n2(&self) -> usize;
    /// Reference product of two coordinate vectors.
    fn ref_multiply(&self, u: &[Element], v: &[Element]) -> Result<Vec<Element>>;
    /// Coordinates of the algebra unit.
    fn unit_coords(&self) -> Vec<Element>;
    /// Coordinates of the e-th power of the element with the given
    /// coordinates (algebra exponentiation, not coordinatewise).
    fn pow_coords(&self, coords: &[Element], e: u128) -> Result<Vec<Element>>;
}

/// Field extension L/K together with a normal element and the matrices
/// converting between power-basis and normal-basis coordinates.
///
/// Coordinate `i` is the coefficient of `theta^(q^(delta*i))`; the
/// C-generator is the `delta`-th power of the q-power Frobenius, so it
/// acts on coordinates as one cyclic shift toward higher index.  The plain
/// convention of the rest of the crate is `delta = 1`; other values
/// (coprime to n) arise when a decomposition over a larger field must be
/// equivariant under the twisted generator that scalar restriction
/// produces.
#[derive(Debug)]
pub struct NormalBasisContext {
    pub k: Field,
    pub l: Field,
    pub theta: Element,
    pub delta: usize,
    conj: Vec<Element>,
    /// Columns are power-basis coordinates of the ordered conjugates.
    from_normal: Mat,
    to_normal: Mat,
}

impl NormalBasisContext {
    pub fn new(l: &Field, theta: &Element, delta: usize) -> Result<Self> {
        let k = l.base();
        let n = l.ext_degree();
        l.check(theta)?;
        if n == 0 || (delta == 0 && n > 1) || gcd(delta.max(1), n) != 1 {
            return Err(Error::NotNormal);
        }
        let frob = frobenius_matrix(l);
        let plain = conjugates(l, theta, &frob);
        let conj: Vec<Element> = (0..n).map(|i| plain[(delta * i) % n].clone()).collect();
        let mut from_normal = Mat::zero(&k, n, n);
        for (j, c) in conj.iter().enumerate() {
            for (i, x) in c.coords().iter().enumerate() {
                *from_normal.at_mut(i, j) = x.clone();
            }
        }
        let to_normal = from_normal.inverse(&k).map_err(|_| Error::NotNormal)?;
        Ok(NormalBasisContext {
            k,
            l: l.clone(),
            theta: theta.clone(),
            delta: delta.max(1),
            conj,
            from_normal,
            to_normal,
        })
    }

    /// Build GF(q^n)/GF(q) from scratch: seeded random irreducible modulus
    /// and a seeded normal element search.
    pub fn generate(k: &Field, n: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let modulus = factor::random_irreducible(k, n, &mut rng);
        let l = Field::extension(k, &modulus)?;
        let theta = if n == 1 {
            l.one()
        } else {
            crate::field::normal::find_normal_element(&l, &mut rng)?
        };
        NormalBasisContext::new(&l, &theta, 1)
    }

    /// Normal-basis coordinates of a field element.
    pub fn coords(&self, x: &Element) -> Result<Vec<Element>> {
        self.l.check(x)?;
        self.to_normal.mul_vec(&self.k, x.coords())
    }

    /// Field element with the given normal-basis coordinates.
    pub fn element(&self, coords: &[Element]) -> Result<Element> {
        let power = self.from_normal.mul_vec(&self.k, coords)?;
        self.l.from_coords(&power)
    }

    /// The ordered conjugate basis `theta^(q^(delta*i))`.
    pub fn conjugate(&self, i: usize) -> &Element {
        &self.conj[i % self.conj.len()]
    }

    /// The C-generator applied to a field element: `x^(q^delta)`.
    ///
    /// Computed through the Frobenius matrix so that large `q^delta`
    /// exponents never materialize.
    pub fn generator_action(&self, x: &Element) -> Result<Element> {
        self.l.check(x)?;
        let frob = frobenius_matrix(&self.l);
        let mut c = x.coords().to_vec();
        for _ in 0..self.delta {
            c = frob.mul_vec(&self.k, &c)?;
        }
        self.l.from_coords(&c)
    }
}

impl MulContext for NormalBasisContext {
    fn field(&self) -> &Field {
        &self.k
    }

    fn n(&self) -> usize {
        self.l.ext_degree()
    }

    fn n1(&self) -> usize {
        self.l.ext_degree()
    }

    fn n2(&self) -> usize {
        1
    }

    fn ref_multiply(&self, u: &[Element], v: &[Element]) -> Result<Vec<Element>> {
        let a = self.element(u)?;
        let b = self.element(v)?;
        self.coords(&self.l.mul(&a, &b))
    }

    fn unit_coords(&self) -> Vec<Element> {
        self.coords(&self.l.one()).expect("unit lies in the field")
    }

    fn pow_coords(&self, coords: &[Element], e: u128) -> Result<Vec<Element>> {
        let a = self.element(coords)?;
        self.coords(&self.l.pow_u128(&a, e))
    }
}

/// The product algebra `GF(q'^{n1})^{n2}` as a free rank-one module over
/// K'[C], K' = GF(q').
///
/// The distinguished automorphism sends `(x_0, ..., x_{n2-1})` to
/// `(x_1, ..., x_{n2-1}, F(x_0))` where `F` is the `delta`-th power of the
/// q'-power Frobenius of the component field; `delta = 1` is the plain
/// convention, and the automorphism has order `n1 * n2` whenever
/// `gcd(delta, n1) = 1`.
pub struct SemisimpleAlgebra {
    pub kp: Field,
    /// Component field GF(q'^{n1}) as an extension of kp.
    pub comp: Field,
    pub n1: usize,
    pub n2: usize,
    pub delta: usize,
    /// Module generator: its orbit under the automorphism is the basis.
    theta: Vec<Element>,
    from_coords_m: Mat,
    to_coords_m: Mat,
    /// Matrix of the `delta`-th Frobenius power on the component field.
    frob_delta: Mat,
}

impl SemisimpleAlgebra {
    pub fn new(kp: &Field, n1: usize, n2: usize, delta: usize, seed: u64) -> Result<Self> {
        if n1 == 0 || n2 == 0 || gcd(delta.max(1), n1) != 1 {
            return Err(Error::DegenerateConfiguration(
                "component twist must be coprime to the component degree",
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let modulus = factor::random_irreducible(kp, n1, &mut rng);
        let comp = Field::extension(kp, &modulus)?;
        // A random tuple generates the module with high probability; the
        // orbit matrix being invertible is the defining test.
        for _ in 0..64 {
            let theta: Vec<Element> = (0..n2).map(|_| comp.random(&mut rng)).collect();
            if let Ok(alg) = Self::with_generator(kp, &comp, n2, delta, theta) {
                return Ok(alg);
            }
        }
        Err(Error::NotNormal)
    }

    /// Construct around an explicitly chosen generator tuple.
    pub fn with_generator(
        kp: &Field,
        comp: &Field,
        n2: usize,
        delta: usize,
        theta: Vec<Element>,
    ) -> Result<Self> {
        let n1 = comp.ext_degree();
        if theta.len() != n2 {
            return Err(Error::SizeMismatch(theta.len(), n2));
        }
        if gcd(delta.max(1), n1) != 1 {
            return Err(Error::DegenerateConfiguration(
                "component twist must be coprime to the component degree",
            ));
        }
        for x in &theta {
            comp.check(x)?;
        }
        let frob = frobenius_matrix(comp);
        let mut frob_delta = Mat::identity(kp, n1);
        for _ in 0..delta.max(1) {
            frob_delta = frob.mul(kp, &frob_delta)?;
        }
        let n = n1 * n2;
        let mut from_coords_m = Mat::zero(kp, n, n);
        let mut cur = theta.clone();
        for j in 0..n {
            for (c, x) in cur.iter().enumerate() {
                for (s, coord) in x.coords().iter().enumerate() {
                    *from_coords_m.at_mut(c * n1 + s, j) = coord.clone();
                }
            }
            cur = apply_automorphism(kp, comp, &frob_delta, &cur)?;
        }
        let to_coords_m = from_coords_m.inverse(kp).map_err(|_| Error::NotNormal)?;
        Ok(SemisimpleAlgebra {
            kp: kp.clone(),
            comp: comp.clone(),
            n1,
            n2,
            delta: delta.max(1),
            theta,
            from_coords_m,
            to_coords_m,
            frob_delta,
        })
    }

    pub fn generator(&self) -> &[Element] {
        &self.theta
    }

    /// The distinguished automorphism on tuples.
    pub fn automorphism(&self, tuple: &[Element]) -> Result<Vec<Element>> {
        apply_automorphism(&self.kp, &self.comp, &self.frob_delta, tuple)
    }

    /// K'[C]-coordinates of a tuple.
    pub fn coords(&self, tuple: &[Element]) -> Result<Vec<Element>> {
        self.to_coords_m.mul_vec(&self.kp, &self.flatten(tuple)?)
    }

    /// Tuple with the given K'[C]-coordinates.
    pub fn tuple(&self, coords: &[Element]) -> Result<Vec<Element>> {
        let flat = self.from_coords_m.mul_vec(&self.kp, coords)?;
        Ok(self.unflatten(&flat))
    }

    fn flatten(&self, tuple: &[Element]) -> Result<Vec<Element>> {
        if tuple.len() != self.n2 {
            return Err(Error::SizeMismatch(tuple.len(), self.n2));
        }
        let mut flat = Vec::with_capacity(self.n1 * self.n2);
        for x in tuple {
            self.comp.check(x)?;
            flat.extend(x.coords().iter().cloned());
        }
        Ok(flat)
    }

    fn unflatten(&self, flat: &[Element]) -> Vec<Element> {
        (0..self.n2)
            .map(|c| {
                self.comp
                    .from_coords(&flat[c * self.n1..(c + 1) * self.n1])
                    .expect("chunk has component degree")
            })
            .collect()
    }
}

fn apply_automorphism(
    kp: &Field,
    comp: &Field,
    frob_delta: &Mat,
    tuple: &[Element],
) -> Result<Vec<Element>> {
    let mut out: Vec<Element> = tuple[1..].to_vec();
    let wrapped = frob_delta.mul_vec(kp, tuple[0].coords())?;
    out.push(comp.from_coords(&wrapped)?);
    Ok(out)
}

impl MulContext for SemisimpleAlgebra {
    fn field(&self) -> &Field {
        &self.kp
    }

    fn n(&self) -> usize {
        self.n1 * self.n2
    }

    fn n1(&self) -> usize {
        self.n1
    }

    fn n2(&self) -> usize {
        self.n2
    }

    fn ref_multiply(&self, u: &[Element], v: &[Element]) -> Result<Vec<Element>> {
        let a = self.tuple(u)?;
        let b = self.tuple(v)?;
        let prod: Vec<Element> = a
            .iter()
            .zip(&b)
            .map(|(x, y)| self.comp.mul(x, y))
            .collect();
        self.coords(&prod)
    }

    fn unit_coords(&self) -> Vec<Element> {
        let ones = vec![self.comp.one(); self.n2];
        self.coords(&ones).expect("unit lies in the algebra")
    }

    fn pow_coords(&self, coords: &[Element], e: u128) -> Result<Vec<Element>> {
        let t = self.tuple(coords)?;
        let powed: Vec<Element> = t.iter().map(|x| self.comp.pow_u128(x, e)).collect();
        self.coords(&powed)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_normal_ctx_shift_is_frobenius() {
        let k = Field::prime(7).unwrap();
        let ctx = NormalBasisContext::generate(&k, 5, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let x = ctx.l.random(&mut rng);
            let mut c = ctx.coords(&x).unwrap();
            c.rotate_right(1);
            let xq = ctx.generator_action(&x).unwrap();
            assert_eq!(ctx.coords(&xq).unwrap(), c);
        }
    }

    #[test]
    fn test_normal_ctx_roundtrip_and_unit() {
        let k = Field::prime(3).unwrap();
        let ctx = NormalBasisContext::generate(&k, 4, 1).unwrap();
        assert_eq!(ctx.coords(&ctx.theta).unwrap()[0], k.one());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let x = ctx.l.random(&mut rng);
            let c = ctx.coords(&x).unwrap();
            assert_eq!(ctx.element(&c).unwrap(), x);
        }
        let u = ctx.unit_coords();
        let r = ctx.ref_multiply(&u, &u).unwrap();
        assert_eq!(r, u);
    }

    #[test]
    fn test_twisted_ctx_shift_is_twisted_frobenius() {
        // delta = 3 is coprime to n = 5, so the twisted orbit is a basis.
        let k = Field::prime(2).unwrap();
        let base = NormalBasisContext::generate(&k, 5, 0).unwrap();
        let ctx = NormalBasisContext::new(&base.l, &base.theta, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let x = ctx.l.random(&mut rng);
            let mut c = ctx.coords(&x).unwrap();
            c.rotate_right(1);
            let x8 = ctx.generator_action(&x).unwrap(); // x^(2^3)
            assert_eq!(ctx.coords(&x8).unwrap(), c);
        }
    }

    #[test]
    fn test_semisimple_automorphism_order() {
        let kp = Field::prime(3).unwrap();
        let alg = SemisimpleAlgebra::new(&kp, 2, 2, 1, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t: Vec<Element> = (0..2).map(|_| alg.comp.random(&mut rng)).collect();
        let mut cur = t.clone();
        let n = 4;
        for step in 1..=n {
            cur = alg.automorphism(&cur).unwrap();
            if step < n {
                assert_ne!(cur, t, "automorphism order divides {step}");
            }
        }
        assert_eq!(cur, t);
    }

    #[test]
    fn test_semisimple_shift_compatibility() {
        // Multiplication commutes with the automorphism, so coordinate
        // shift must commute with ref_multiply.
        let kp = Field::prime(5).unwrap();
        let alg = SemisimpleAlgebra::new(&kp, 3, 2, 1, 7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let u: Vec<Element> = (0..6).map(|_| kp.random(&mut rng)).collect();
            let v: Vec<Element> = (0..6).map(|_| kp.random(&mut rng)).collect();
            let mut su = u.clone();
            su.rotate_right(1);
            let mut sv = v.clone();
            sv.rotate_right(1);
            let mut sprod = alg.ref_multiply(&u, &v).unwrap();
            sprod.rotate_right(1);
            assert_eq!(alg.ref_multiply(&su, &sv).unwrap(), sprod);
        }
    }

    #[test]
    fn test_semisimple_unit_and_pow() {
        let kp = Field::prime(3).unwrap();
        let alg = SemisimpleAlgebra::new(&kp, 2, 2, 1, 0).unwrap();
        let u = alg.unit_coords();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x: Vec<Element> = (0..4).map(|_| kp.random(&mut rng)).collect();
        assert_eq!(alg.ref_multiply(&u, &x).unwrap(), x);
        // pow_coords(x, 2) must equal x * x.
        assert_eq!(
            alg.pow_coords(&x, 2).unwrap(),
            alg.ref_multiply(&x, &x).unwrap()
        );
    }

    #[test]
    fn test_normal_ctx_shift_compatibility() {
        let k = Field::prime(7).unwrap();
        let ctx = NormalBasisContext::generate(&k, 5, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..10 {
            let u: Vec<Element> = (0..5).map(|_| k.random(&mut rng)).collect();
            let v: Vec<Element> = (0..5).map(|_| k.random(&mut rng)).collect();
            let mut su = u.clone();
            su.rotate_right(1);
            let mut sv = v.clone();
            sv.rotate_right(1);
            let mut sprod = ctx.ref_multiply(&u, &v).unwrap();
            sprod.rotate_right(1);
            assert_eq!(ctx.ref_multiply(&su, &sv).unwrap(), sprod);
        }
    }
}
