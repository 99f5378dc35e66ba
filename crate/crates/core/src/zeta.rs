//! Point counting on small curve models, Frobenius characteristic
//! polynomials from counts, and the divisibility checks that decide whether
//! a Jacobian can carry a cyclic subgroup suitable for descent.
//!
//! Counting is direct enumeration over `GF(q^i)` (guarded at `2^24`), so
//! every downstream quantity is exact.  The characteristic polynomial is
//! reconstructed over the integers from `genus` counts via Newton's
//! identities plus the functional equation, and [`feasibility`] reports the
//! arithmetic facts about it modulo a target order `n`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::elliptic::embed_into;
use crate::elliptic::order::{hasse_window, window_has_multiple};
use crate::error::{Error, Result};
use crate::field::factor::{count_roots, factor, poly_key, random_irreducible};
use crate::field::poly::UPoly;
use crate::field::{Element, Field};

/// Enumeration guard for [`count_points`].
pub const COUNT_LIMIT: u128 = 1 << 24;

/// A curve given by an affine hyperelliptic equation or a plane projective
/// model.  Counting always refers to the smooth projective model.
#[derive(Clone, Debug)]
pub enum CurveModel {
    /// `y^2 = f(x)`; the smooth model has one point at infinity when
    /// `deg f` is odd, and two or zero when even.
    Hyperelliptic { field: Field, f: UPoly, genus: usize },
    /// A smooth plane curve `F(x, y, z) = 0` of total degree `d`, stored as
    /// monomials `(i, j, k, c)` with `i + j + k = d`.  Smoothness and
    /// absolute irreducibility are assumed, not verified.
    Plane {
        field: Field,
        monomials: Vec<(u32, u32, u32, Element)>,
        degree: u32,
        genus: usize,
    },
}

impl CurveModel {
    /// `y^2 = f(x)` with `f` squarefree; `genus` must equal
    /// `floor((deg f - 1)/2)`.
    pub fn hyperelliptic(field: &Field, f: UPoly, genus: usize) -> Result<Self> {
        if field.char() == 2 {
            return Err(Error::UnsupportedCharacteristic(2));
        }
        let d = f.degree().ok_or(Error::ZeroPolynomial)?;
        if f.gcd(field, &f.derivative(field)).degree() != Some(0) {
            return Err(Error::DegenerateConfiguration(
                "hyperelliptic branch polynomial is not squarefree",
            ));
        }
        if d < 3 || genus != (d - 1) / 2 {
            return Err(Error::DegenerateConfiguration(
                "genus does not match the branch polynomial degree",
            ));
        }
        Ok(CurveModel::Hyperelliptic {
            field: field.clone(),
            f,
            genus,
        })
    }

    /// A plane projective model from its nonzero monomials; `genus` must be
    /// the smooth plane value `(d-1)(d-2)/2`.
    pub fn plane(field: &Field, monomials: Vec<(u32, u32, u32, Element)>, genus: usize) -> Result<Self> {
        let degree = match monomials.first() {
            Some((i, j, k, _)) => i + j + k,
            None => return Err(Error::ZeroPolynomial),
        };
        for (i, j, k, c) in &monomials {
            if i + j + k != degree {
                return Err(Error::DegenerateConfiguration(
                    "plane model is not homogeneous",
                ));
            }
            if !field.contains(c) {
                return Err(Error::FieldMismatch("plane model coefficient"));
            }
        }
        if degree < 1 || genus != ((degree - 1) * (degree - 2) / 2) as usize {
            return Err(Error::DegenerateConfiguration(
                "genus does not match the smooth plane degree",
            ));
        }
        Ok(CurveModel::Plane {
            field: field.clone(),
            monomials,
            degree,
            genus,
        })
    }

    pub fn field(&self) -> &Field {
        match self {
            CurveModel::Hyperelliptic { field, .. } => field,
            CurveModel::Plane { field, .. } => field,
        }
    }

    pub fn genus(&self) -> usize {
        match self {
            CurveModel::Hyperelliptic { genus, .. } => *genus,
            CurveModel::Plane { genus, .. } => *genus,
        }
    }
}

/// `GF(q^i)` over the model field, deterministic in `(field, i)`.
fn extension_field(base: &Field, i: usize) -> Field {
    if i == 1 {
        return base.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xc072); // fixed modulus choice
    let m = random_irreducible(base, i, &mut rng);
    Field::extension(base, &m).expect("random irreducible modulus")
}

/// Number of points of the smooth projective model over `GF(q^i)`.
pub fn count_points(curve: &CurveModel, i: usize) -> Result<u128> {
    let base = curve.field();
    let q = base.order_u128().ok_or(Error::TooLarge(i as u32))?;
    let big_q = q.checked_pow(i as u32).ok_or(Error::TooLarge(i as u32))?;
    if i == 0 || big_q > COUNT_LIMIT {
        return Err(Error::TooLarge(i as u32));
    }
    let kk = extension_field(base, i);
    match curve {
        CurveModel::Hyperelliptic { f, .. } => {
            let fk = f.map_coeffs(&kk, |c| {
                embed_into(&kk, base, c).expect("model field extends into the tower")
            });
            let affine: u128 = (0..big_q)
                .into_par_iter()
                .map(|idx| {
                    let x = kk.element_from_index(idx);
                    let v = fk.eval(&kk, &x);
                    square_class(&kk, big_q, &v)
                })
                .sum();
            let at_infinity = if fk.degree().unwrap() % 2 == 1 {
                1
            } else {
                square_class(&kk, big_q, fk.lc())
            };
            Ok(affine + at_infinity)
        }
        CurveModel::Plane { monomials, degree, .. } => {
            let monos: Vec<(u32, u32, u32, Element)> = monomials
                .iter()
                .map(|(i0, j0, k0, c)| {
                    (
                        *i0,
                        *j0,
                        *k0,
                        embed_into(&kk, base, c).expect("model field extends into the tower"),
                    )
                })
                .collect();
            // Chart z = 1 over all x, then the line z = 0 as (1 : y : 0)
            // plus possibly (0 : 1 : 0).
            let affine: u128 = (0..big_q)
                .into_par_iter()
                .map(|idx| {
                    let x = kk.element_from_index(idx);
                    let ypoly = y_slice(&kk, &monos, *degree, &x, &kk.one());
                    count_y_roots(&kk, big_q, &ypoly)
                })
                .sum();
            let far_line = {
                let ypoly = y_slice(&kk, &monos, *degree, &kk.one(), &kk.zero());
                count_y_roots(&kk, big_q, &ypoly)
            };
            let top = monos
                .iter()
                .find(|(_, j, _, _)| *j == *degree)
                .map_or(true, |(_, _, _, c)| kk.is_zero(c));
            Ok(affine + far_line + u128::from(top))
        }
    }
}

/// 1 for zero, 2 for a nonzero square, 0 otherwise.
fn square_class(kk: &Field, big_q: u128, v: &Element) -> u128 {
    if kk.is_zero(v) {
        1
    } else if kk.is_one(&kk.pow_u128(v, (big_q - 1) / 2)) {
        2
    } else {
        0
    }
}

/// The model restricted to fixed `(x, z)`, as a polynomial in `y`.
fn y_slice(
    kk: &Field,
    monos: &[(u32, u32, u32, Element)],
    degree: u32,
    x: &Element,
    z: &Element,
) -> UPoly {
    let mut coeffs = vec![kk.zero(); degree as usize + 1];
    for (i, j, k, c) in monos {
        let mut term = c.clone();
        for _ in 0..*i {
            term = kk.mul(&term, x);
        }
        for _ in 0..*k {
            term = kk.mul(&term, z);
        }
        coeffs[*j as usize] = kk.add(&coeffs[*j as usize], &term);
    }
    UPoly::from_coeffs(kk, coeffs)
}

fn count_y_roots(kk: &Field, big_q: u128, ypoly: &UPoly) -> u128 {
    if ypoly.is_zero() {
        // The whole slice lies on the curve; excluded by irreducibility but
        // counted correctly anyway.
        return big_q;
    }
    count_roots(kk, ypoly).expect("order-bounded field") as u128
}

/// The Frobenius characteristic polynomial, an integer polynomial of degree
/// `2*genus` with constant term `q^genus` and leading coefficient 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CharPoly {
    /// Ascending coefficients: `coeffs[i]` multiplies `t^i`.
    pub coeffs: Vec<i128>,
    pub q: u64,
    pub genus: usize,
}

impl CharPoly {
    /// Coefficient of `t^(2g - j)` (the "j-th from the top").
    fn a(&self, j: usize) -> i128 {
        self.coeffs[2 * self.genus - j]
    }

    pub fn eval(&self, x: i128) -> i128 {
        self.coeffs.iter().rev().fold(0, |acc, c| acc * x + c)
    }

    pub fn derivative_at_one(&self) -> i128 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| i as i128 * c)
            .sum()
    }

    /// Power sums `p_1..p_upto` of the Frobenius roots, from Newton's
    /// identities run backwards.
    fn power_sums(&self, upto: usize) -> Vec<i128> {
        let deg = 2 * self.genus;
        let mut p = Vec::with_capacity(upto);
        for k in 1..=upto {
            let mut acc = if k <= deg { k as i128 * self.a(k) } else { 0 };
            for i in 1..k.min(deg + 1) {
                if k - i >= 1 {
                    acc += self.a(i) * p[k - i - 1];
                }
            }
            p.push(-acc);
        }
        p
    }

    /// The count over `GF(q^i)` this polynomial predicts.
    pub fn predicted_count(&self, i: usize) -> i128 {
        let qi = (self.q as i128).pow(i as u32);
        qi + 1 - self.power_sums(i)[i - 1]
    }

    /// Coefficient symmetry `a_{2g-i} = q^{g-i} a_i`.
    pub fn functional_equation_holds(&self) -> bool {
        let g = self.genus;
        (0..=g).all(|i| self.a(2 * g - i) == (self.q as i128).pow((g - i) as u32) * self.a(i))
    }
}

/// Reconstructs the characteristic polynomial from the counts
/// `N_1, ..., N_genus`.
///
/// Newton's identities determine the top half of the coefficients from the
/// power sums `p_i = q^i + 1 - N_i`; the functional equation supplies the
/// rest.  Each Newton step divides by `k`, and a non-integral quotient
/// means the counts cannot come from any curve.
pub fn char_poly_from_counts(counts: &[u128], q: u64, genus: usize) -> Result<CharPoly> {
    if counts.len() != genus {
        return Err(Error::SizeMismatch(counts.len(), genus));
    }
    let mut a = vec![0i128; 2 * genus + 1];
    a[0] = 1;
    let p: Vec<i128> = (1..=genus)
        .map(|i| (q as i128).pow(i as u32) + 1 - counts[i - 1] as i128)
        .collect();
    for k in 1..=genus {
        let mut acc = p[k - 1];
        for i in 1..k {
            acc += a[i] * p[k - i - 1];
        }
        if acc % k as i128 != 0 {
            return Err(Error::InconsistentCounts(k));
        }
        a[k] = -acc / k as i128;
    }
    for i in 0..genus {
        a[2 * genus - i] = (q as i128).pow((genus - i) as u32) * a[i];
    }
    // Ascending storage: coeffs[i] is the t^i coefficient, so a_j lands at
    // index 2g - j.
    let coeffs: Vec<i128> = a.into_iter().rev().collect();
    Ok(CharPoly { coeffs, q, genus })
}

/// One prime divisor of the target order together with the factorization of
/// the characteristic polynomial modulo it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorsModPrime {
    pub ell: u64,
    /// Ascending coefficient vectors of the monic irreducible factors.
    pub factors: Vec<(Vec<u64>, usize)>,
    /// Does `t - q` divide the polynomial mod `ell`?
    pub has_q_root: bool,
}

/// Arithmetic facts about a characteristic polynomial relative to a target
/// subgroup order `n`; serialized as the CLI report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FeasibilityReport {
    pub q: u64,
    pub genus: usize,
    /// Counts `N_1..N_genus` predicted by the polynomial.
    pub counts: Vec<i128>,
    /// Ascending integer coefficients of the polynomial.
    pub chi_coeffs: Vec<i128>,
    pub chi_at_1: i128,
    pub n: u64,
    /// `n` divides `chi(1)`.
    pub divides: bool,
    /// `gcd(chi'(1), n)`.
    pub gcd_chi_prime: u64,
    pub factors_mod_n: Vec<FactorsModPrime>,
    /// `t - q` divides the polynomial modulo every prime divisor of `n`.
    pub q_root_mod_n: bool,
    /// Index of the subgroup generated by `q` in `(Z/n)^*`, for prime `n`
    /// coprime to `q`.
    pub orbit_index: Option<u64>,
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd_u64(b, a % b) }
}

fn prime_factors_u64(mut v: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= v {
        if v % d == 0 {
            out.push(d);
            while v % d == 0 {
                v /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if v > 1 {
        out.push(v);
    }
    out
}

fn pow_mod_u64(mut b: u128, mut e: u64, m: u128) -> u128 {
    let mut acc = 1u128;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Multiplicative order of `q` modulo the prime `n`.
fn order_mod_prime(q: u64, n: u64) -> u64 {
    let mut ord = n - 1;
    for r in prime_factors_u64(n - 1) {
        while ord % r == 0 && pow_mod_u64(q as u128, ord / r, n as u128) == 1 {
            ord /= r;
        }
    }
    ord
}

/// Evaluates the subgroup-order conditions for `chi` against `n`.
///
/// Composite `n` is handled prime by prime: the factorization and the
/// `t - q` root test are reported for every prime divisor, and
/// `q_root_mod_n` aggregates over all of them.
pub fn feasibility(chi: &CharPoly, n: u64) -> Result<FeasibilityReport> {
    let chi_at_1 = chi.eval(1);
    let primes = prime_factors_u64(n);
    let mut factors_mod_n = Vec::new();
    for ell in &primes {
        let fl = Field::prime(*ell)?;
        let coeffs: Vec<Element> = chi
            .coeffs
            .iter()
            .map(|c| fl.from_u64(c.rem_euclid(*ell as i128) as u64))
            .collect();
        let poly = UPoly::from_coeffs(&fl, coeffs);
        let mut parts = factor(&fl, &poly)?;
        parts.sort_by_key(|(p, _)| poly_key(p));
        let has_q_root = fl.is_zero(&poly.eval(&fl, &fl.from_u64(chi.q % ell)));
        factors_mod_n.push(FactorsModPrime {
            ell: *ell,
            factors: parts
                .into_iter()
                .map(|(p, m)| (p.coeffs.iter().map(Element::as_u64).collect(), m))
                .collect(),
            has_q_root,
        });
    }
    let q_root_mod_n = factors_mod_n.iter().all(|f| f.has_q_root);
    let n_is_prime = n > 1 && primes == [n];
    let orbit_index = if n_is_prime && chi.q % n != 0 {
        Some((n - 1) / order_mod_prime(chi.q, n))
    } else {
        None
    };
    Ok(FeasibilityReport {
        q: chi.q,
        genus: chi.genus,
        counts: (1..=chi.genus).map(|i| chi.predicted_count(i)).collect(),
        chi_coeffs: chi.coeffs.clone(),
        chi_at_1,
        n,
        divides: chi_at_1.rem_euclid(n as i128) == 0,
        gcd_chi_prime: gcd_u64(chi.derivative_at_one().unsigned_abs() as u64 % n, n),
        factors_mod_n,
        q_root_mod_n,
        orbit_index,
    })
}

/// Does the Hasse window of `q^m` contain a positive multiple of `n`?
///
/// Exact integer arithmetic: the window bounds round inward through the
/// integer square root, so the answer is never off by a unit at the ends.
pub fn hasse_feasible(q: u64, m: u32, n: u64) -> bool {
    let big_q = (q as u128)
        .checked_pow(m)
        .expect("q^m must fit in 128 bits");
    let (lo, hi) = hasse_window(big_q);
    window_has_multiple(lo, hi, n)
}
