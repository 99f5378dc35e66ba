//! Explicit function spaces with poles bounded by a fiber.
//!
//! The space with poles at most `k` times the fiber over `v` consists of
//! the functions `(A(x) + B(x) y) / F_v(x)^k` with `deg A <= kn`,
//! `deg B <= kn - 2`, vanishing to order `k` on the fiber over `-v`; the
//! vanishing conditions are linear and, expanded over the irreducible
//! factors of `F_v`, give a square system whose kernel has dimension
//! exactly `kn` precisely when the ansatz reaches the whole space.
//!
//! The translation action is computed by one of two routes: symbolically,
//! by composing a function with the addition formulas and dividing back
//! into the ansatz form, or numerically, by evaluating the basis on
//! `k + 1` rational translation orbits and solving for the permuted
//! values.  The second route needs enough rational points, the first is
//! cubic in `n`; both produce the same matrix and the choice is by point
//! count alone.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::construction::EllipticCover;
use crate::elliptic::order::curve_order;
use crate::elliptic::{embed_into, CurvePoint};
use crate::error::{Error, Result};
use crate::field::factor::{factor, poly_key, roots};
use crate::field::linalg::Mat;
use crate::field::poly::UPoly;
use crate::field::{Element, Field};

/// Seed for the free-generator sampling; fixed so that a given cover and
/// point selection always produce the same basis.
const GENERATOR_SEED: u64 = 0x66e0;

/// A function `(a(x) + b(x) y) / F^k` on the cover; the denominator power
/// lives in the enclosing [`FunctionSpaceBasis`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveFunction {
    pub a: UPoly,
    pub b: UPoly,
}

/// A basis of the space of functions with poles at most `multiplicity`
/// times the fiber over the selected point.
#[derive(Clone, Debug)]
pub struct FunctionSpaceBasis {
    pub field: Field,
    /// The fiber polynomial of `v`, the common denominator base.
    pub denominator: UPoly,
    pub multiplicity: usize,
    pub functions: Vec<CurveFunction>,
    /// Matrix of precomposition with translation by `-t`: column `j`
    /// holds the basis coordinates of `f_j(. - t)`.  For multiplicity 1
    /// the basis is the translation orbit of a free generator, so this is
    /// the cyclic permutation sending coordinate `j` to `j + 1`.
    pub c_action: Mat,
}

fn coords_in_base(d: usize, e: &Element) -> Vec<Element> {
    if d == 1 {
        vec![e.clone()]
    } else {
        e.coords().to_vec()
    }
}

/// Arithmetic view of one irreducible factor `h` of the denominator: the
/// residue field, the class of `x`, and its powers.
struct FactorBlock {
    res: Field,
    deg: usize,
    x_pows: Vec<Element>,
    y_minus: Element,
    g1_at_x: Element,
}

fn factor_block(
    cover: &EllipticCover,
    h: &UPoly,
    y_v: &Element,
    g1: &UPoly,
    max_pow: usize,
) -> Result<FactorBlock> {
    let f = cover.field();
    let deg = h.degree().expect("nonzero factor");
    let (res, x_class) = if deg == 1 {
        (f.clone(), f.neg(&h.coeff(f, 0)))
    } else {
        // `factor` certifies irreducibility, so skip the recheck.
        let ext = Field::extension_unchecked(f, h)?;
        let mut c = vec![f.zero(); deg];
        c[1] = f.one();
        let x = ext.from_coords(&c)?;
        (ext, x)
    };
    let mut x_pows = Vec::with_capacity(max_pow + 1);
    let mut cur = res.one();
    for _ in 0..=max_pow {
        x_pows.push(cur.clone());
        cur = res.mul(&cur, &x_class);
    }
    let at_x = |p: &UPoly| -> Element {
        let mut acc = res.zero();
        for c in p.coeffs.iter().rev() {
            acc = res.mul(&acc, &x_class);
            acc = res.add(&acc, &embed_into(&res, f, c).expect("tower"));
        }
        acc
    };
    let den_x = at_x(&cover.rho.den);
    let dnum_x = at_x(&cover.rho.dnum);
    if res.is_zero(&dnum_x) {
        return Err(Error::DegenerateConfiguration(
            "fiber of v meets the branch locus",
        ));
    }
    // The y-coordinate on the sheet over -v; nonzero because v is not
    // two-torsion and den has no root in common with the fiber.
    let y_v_up = embed_into(&res, f, y_v)?;
    let d2 = res.mul(&den_x, &den_x);
    let y_plus = res.mul(&res.mul(&y_v_up, &d2), &res.inv(&dnum_x)?);
    let y_minus = res.neg(&y_plus);
    let g1_at_x = at_x(g1);
    Ok(FactorBlock { res, deg, x_pows, y_minus, g1_at_x })
}

/// Kernel basis of the vanishing conditions, as raw `(A, B)` pairs.
fn solve_ansatz(
    cover: &EllipticCover,
    v: &CurvePoint,
    fv: &UPoly,
    k: usize,
) -> Result<Vec<CurveFunction>> {
    let f = cover.field();
    let n = cover.n;
    let kn = k * n;
    let na = kn + 1;
    let nb = kn - 1;
    let CurvePoint::Affine { y: y_v, .. } = v else {
        return Err(Error::DegenerateConfiguration("v must be affine"));
    };
    let g = curve_rhs_poly(cover);
    let g1 = g.derivative(f);

    let mut factors: Vec<(UPoly, usize)> = factor(f, fv)?;
    factors.sort_by_key(|(p, _)| poly_key(p));
    let mut rows: Vec<Vec<Element>> = Vec::with_capacity(kn);
    for (h, e) in &factors {
        if *e != 1 {
            return Err(Error::DegenerateConfiguration(
                "fiber polynomial has repeated roots",
            ));
        }
        let blk = factor_block(cover, h, y_v, &g1, kn)?;
        let res = &blk.res;
        // Order-one vanishing on the sheet over -v:
        //   A(x) + B(x) * y_minus = 0.
        let mut cond1: Vec<Element> = Vec::with_capacity(na + nb);
        for j in 0..na {
            cond1.push(blk.x_pows[j].clone());
        }
        for j in 0..nb {
            cond1.push(res.mul(&blk.x_pows[j], &blk.y_minus));
        }
        let mut conds = vec![cond1];
        if k == 2 {
            // Derivative along the sheet, with dy/dx = g'(x) / (2y):
            //   A'(x) + B'(x) y_minus + B(x) g'(x) / (2 y_minus) = 0.
            let half = res.inv(&res.from_u64(2))?;
            let slope = res.mul(
                &res.mul(&blk.g1_at_x, &half),
                &res.inv(&blk.y_minus)?,
            );
            let mut cond2: Vec<Element> = Vec::with_capacity(na + nb);
            for j in 0..na {
                let c = if j == 0 {
                    res.zero()
                } else {
                    res.mul(&blk.x_pows[j - 1], &res.from_u64(j as u64))
                };
                cond2.push(c);
            }
            for j in 0..nb {
                let mut c = res.mul(&blk.x_pows[j], &slope);
                if j > 0 {
                    let d = res.mul(&blk.x_pows[j - 1], &res.from_u64(j as u64));
                    c = res.add(&c, &res.mul(&d, &blk.y_minus));
                }
                cond2.push(c);
            }
            conds.push(cond2);
        }
        for cond in conds {
            let mut flat: Vec<Vec<Element>> = vec![Vec::with_capacity(na + nb); blk.deg];
            for coeff in &cond {
                for (r, part) in coords_in_base(blk.deg, coeff).into_iter().enumerate() {
                    flat[r].push(part);
                }
            }
            rows.extend(flat);
        }
    }
    debug_assert_eq!(rows.len(), kn);
    let mat = Mat::from_rows(f, rows)?;
    let kern = mat.kernel_basis(f);
    if kern.len() != kn {
        return Err(Error::DegenerateConfiguration(
            "vanishing conditions do not cut the expected dimension",
        ));
    }
    Ok(kern
        .into_iter()
        .map(|vec| CurveFunction {
            a: UPoly::from_coeffs(f, vec[..na].to_vec()),
            b: UPoly::from_coeffs(f, vec[na..].to_vec()),
        })
        .collect())
}

fn curve_rhs_poly(cover: &EllipticCover) -> UPoly {
    let f = cover.field();
    let y = cover.domain();
    UPoly::from_coeffs(
        f,
        vec![y.b.clone(), y.a.clone(), f.zero(), f.one()],
    )
}

/// Coordinate solver for the raw ansatz basis: inverts a full-rank square
/// subsystem once and checks each solution against the whole stack.
struct AnsatzCoords {
    stack: Mat,
    pivot_rows: Vec<usize>,
    inv: Mat,
    na: usize,
    nb: usize,
}

impl AnsatzCoords {
    fn new(f: &Field, functions: &[CurveFunction], na: usize, nb: usize) -> Result<Self> {
        let dim = functions.len();
        let mut stack = Mat::zero(f, na + nb, dim);
        for (j, func) in functions.iter().enumerate() {
            for i in 0..na {
                *stack.at_mut(i, j) = func.a.coeff(f, i);
            }
            for i in 0..nb {
                *stack.at_mut(na + i, j) = func.b.coeff(f, i);
            }
        }
        let pivot_rows = stack.transpose(f).pivot_columns(f);
        if pivot_rows.len() != dim {
            return Err(Error::DegenerateConfiguration(
                "basis functions are linearly dependent",
            ));
        }
        let mut square = Mat::zero(f, dim, dim);
        for (r, &row) in pivot_rows.iter().enumerate() {
            for c in 0..dim {
                *square.at_mut(r, c) = stack.at(row, c).clone();
            }
        }
        let inv = square.inverse(f)?;
        Ok(AnsatzCoords { stack, pivot_rows, inv, na, nb })
    }

    fn coords(&self, f: &Field, func: &CurveFunction) -> Result<Vec<Element>> {
        let mut full = Vec::with_capacity(self.na + self.nb);
        for i in 0..self.na {
            full.push(func.a.coeff(f, i));
        }
        for i in 0..self.nb {
            full.push(func.b.coeff(f, i));
        }
        let rhs: Vec<Element> = self.pivot_rows.iter().map(|&r| full[r].clone()).collect();
        let sol = self.inv.mul_vec(f, &rhs)?;
        let back = self.stack.mul_vec(f, &sol)?;
        if back != full {
            return Err(Error::DegenerateConfiguration(
                "function does not lie in the ansatz space",
            ));
        }
        Ok(sol)
    }
}

/// `f(. + s)` for an affine point `s = (s_x, s_y)`, pulled back into the
/// ansatz form over the same denominator power.
///
/// With `D = x - s_x`, the addition formulas give
/// `x(P + s) = (S + T y) / D^2` and `y(P + s) = (N + M y) / D^3` for the
/// fixed low-degree polynomials computed below; substituting and clearing
/// denominators leaves the numerator exponent and the denominator
/// exponent equal, so the translate is again `(A' + B' y) / F_v^k` and
/// the two divisions at the end are exact.
fn translate_function(
    f: &Field,
    g: &UPoly,
    fv: &UPoly,
    k: usize,
    n: usize,
    func: &CurveFunction,
    s_x: &Element,
    s_y: &Element,
) -> Result<CurveFunction> {
    let kn = k * n;
    let x = UPoly::x(f);
    let d = UPoly::from_coeffs(f, vec![f.neg(s_x), f.one()]);
    let d2 = d.mul(f, &d);
    let d3 = d2.mul(f, &d);
    let sy2 = f.mul(s_y, s_y);
    let x_plus_sx = UPoly::from_coeffs(f, vec![s_x.clone(), f.one()]);
    // x(P + s) = (sx_poly + t_y * y) / D^2.
    let sx_poly = g
        .add(f, &UPoly::constant(f, sy2))
        .sub(f, &x_plus_sx.mul(f, &d2));
    let t_y = f.neg(&f.add(s_y, s_y));
    // y(P + s) = (n_y + m_y * y) / D^3.
    let n_y = sx_poly
        .mul_scalar(f, s_y)
        .sub(f, &g.mul_scalar(f, &t_y))
        .sub(f, &x.mul(f, &d2).mul_scalar(f, s_y));
    let m_y = x
        .mul(f, &d2)
        .sub(f, &sx_poly)
        .add(f, &UPoly::constant(f, f.mul(s_y, &t_y)))
        .sub(f, &d3);

    // Horner for p(x(P + s)) with fixed degree bound `bound`, returning
    // even and odd parts over the common denominator D^(2 * bound).
    let eval_at_image = |p: &UPoly, bound: usize| -> (UPoly, UPoly) {
        let mut even = UPoly::constant(f, p.coeff(f, bound));
        let mut odd = UPoly::zero();
        let mut d2pow = UPoly::one(f);
        for i in (0..bound).rev() {
            let new_even = even
                .mul(f, &sx_poly)
                .add(f, &odd.mul(f, g).mul_scalar(f, &t_y));
            let new_odd = odd.mul(f, &sx_poly).add(f, &even.mul_scalar(f, &t_y));
            even = new_even;
            odd = new_odd;
            d2pow = d2pow.mul(f, &d2);
            even = even.add(f, &d2pow.mul_scalar(f, &p.coeff(f, i)));
        }
        (even, odd)
    };

    let (pa, qa) = eval_at_image(&func.a, kn);
    let (pb, qb) = eval_at_image(&func.b, kn - 2);
    // B(x') * y': numerator parts over D^(2(kn-2) + 3) = D^(2kn - 1).
    let pby = pb.mul(f, &n_y).add(f, &qb.mul(f, &m_y).mul(f, g));
    let qby = pb.mul(f, &m_y).add(f, &qb.mul(f, &n_y));
    // Total numerator over D^(2kn).
    let pn = pa.add(f, &pby.mul(f, &d));
    let qn = qa.add(f, &qby.mul(f, &d));
    // F_v(x')^k over D^(2kn): the exponents cancel exactly.
    let (pf, qf) = eval_at_image(fv, n);
    let (pk, qk) = if k == 1 {
        (pf, qf)
    } else {
        let even = pf.mul(f, &pf).add(f, &qf.mul(f, &qf).mul(f, g));
        let odd = pf.mul(f, &qf);
        (even, odd.add(f, &odd))
    };
    let w = pk.mul(f, &pk).sub(f, &qk.mul(f, &qk).mul(f, g));
    let alpha = pn.mul(f, &pk).sub(f, &qn.mul(f, &qk).mul(f, g));
    let beta = qn.mul(f, &pk).sub(f, &pn.mul(f, &qk));
    let fvk = if k == 1 { fv.clone() } else { fv.mul(f, fv) };
    let div_exact = |num: &UPoly| -> Result<UPoly> {
        let (q, r) = num.mul(f, &fvk).divrem(f, &w)?;
        if !r.is_zero() {
            return Err(Error::VerificationFailed(
                "translated function left the ansatz space".into(),
            ));
        }
        Ok(q)
    };
    let a = div_exact(&alpha)?;
    let b = div_exact(&beta)?;
    if a.degree().unwrap_or(0) > kn || b.degree().unwrap_or(0) + 2 > kn {
        return Err(Error::VerificationFailed(
            "translated function exceeds the degree bounds".into(),
        ));
    }
    Ok(CurveFunction { a, b })
}

/// Translation action by the symbolic route: translate every basis
/// function by `-t` and solve for its coordinates.
fn action_by_translation(
    cover: &EllipticCover,
    fv: &UPoly,
    k: usize,
    functions: &[CurveFunction],
) -> Result<Mat> {
    let f = cover.field();
    let n = cover.n;
    let g = curve_rhs_poly(cover);
    let minus_t = cover.domain().neg(&cover.t);
    let CurvePoint::Affine { x: s_x, y: s_y } = &minus_t else {
        return Err(Error::DegenerateConfiguration("trivial kernel generator"));
    };
    let coords = AnsatzCoords::new(f, functions, k * n + 1, k * n - 1)?;
    let dim = functions.len();
    let mut m = Mat::zero(f, dim, dim);
    for (j, func) in functions.iter().enumerate() {
        let moved = translate_function(f, &g, fv, k, n, func, s_x, s_y)?;
        for (i, c) in coords.coords(f, &moved)?.into_iter().enumerate() {
            *m.at_mut(i, j) = c;
        }
    }
    Ok(m)
}

/// Translation action by the evaluation route: value matrices on `k + 1`
/// rational translation orbits, solved row-permuted against themselves.
///
/// Precondition: the domain curve has at least `(k + 1) n` rational
/// points; orbits whose image meets `v` (where the functions have poles)
/// are skipped.
fn action_by_evaluation(
    cover: &EllipticCover,
    v: &CurvePoint,
    fv: &UPoly,
    k: usize,
    functions: &[CurveFunction],
) -> Result<Mat> {
    let f = cover.field();
    let n = cover.n;
    let dim = functions.len();
    let y_curve = cover.domain();
    let ev = FunctionEvaluator::new(cover, f, fv, k, functions)?;

    // Orbit representatives with pairwise distinct images, found by a
    // deterministic scan of x-coordinates.
    let mut reps: Vec<CurvePoint> = vec![CurvePoint::Infinity];
    let mut images: Vec<CurvePoint> = vec![CurvePoint::Infinity];
    let order = f
        .order_u128()
        .ok_or(Error::FieldTooLarge(u32::MAX))?;
    let mut idx: u128 = 0;
    while reps.len() < k + 1 && idx < order {
        let x0 = f.element_from_index(idx);
        idx += 1;
        let rhs = y_curve.rhs(&x0);
        let quad = UPoly::from_coeffs(f, vec![f.neg(&rhs), f.zero(), f.one()]);
        let mut ys = roots(f, &quad)?;
        ys.sort_by_key(|e| element_key(e));
        let Some(y0) = ys.into_iter().next() else { continue };
        let p = CurvePoint::affine(x0, y0);
        let image = cover.rho.apply(&p)?;
        if images.contains(&image) || image == *v {
            continue;
        }
        images.push(image);
        reps.push(p);
    }
    if reps.len() < k + 1 {
        return Err(Error::DegenerateConfiguration(
            "not enough rational orbits for the evaluation route",
        ));
    }

    let rows = (k + 1) * n;
    let mut vals = Mat::zero(f, rows, dim);
    let mut shifted = Mat::zero(f, rows, dim);
    for (o, rep) in reps.iter().enumerate() {
        let mut orbit = Vec::with_capacity(n);
        let mut cur = rep.clone();
        for _ in 0..n {
            orbit.push(cur.clone());
            cur = y_curve.add_raw(&cur, &cover.t);
        }
        let mut values = Vec::with_capacity(n);
        for pt in &orbit {
            let mut row = Vec::with_capacity(dim);
            for j in 0..dim {
                row.push(ev.eval(j, pt)?);
            }
            values.push(row);
        }
        for j in 0..n {
            for c in 0..dim {
                *vals.at_mut(o * n + j, c) = values[j][c].clone();
                // (f . tau_{-t})(rep + j t) = f(rep + (j - 1) t).
                *shifted.at_mut(o * n + j, c) = values[(j + n - 1) % n][c].clone();
            }
        }
    }
    let pivot_rows = vals.transpose(f).pivot_columns(f);
    if pivot_rows.len() != dim {
        return Err(Error::DegenerateConfiguration(
            "evaluation points fail to separate the basis",
        ));
    }
    let mut square = Mat::zero(f, dim, dim);
    let mut target = Mat::zero(f, dim, dim);
    for (r, &row) in pivot_rows.iter().enumerate() {
        for c in 0..dim {
            *square.at_mut(r, c) = vals.at(row, c).clone();
            *target.at_mut(r, c) = shifted.at(row, c).clone();
        }
    }
    square.inverse(f)?.mul(f, &target)
}

pub(crate) fn element_key(e: &Element) -> Vec<u64> {
    match e {
        Element::P(v) => vec![*v],
        Element::E(parts) => parts.iter().flat_map(|p| element_key(p)).collect(),
    }
}

/// Basis of the space with poles at most `multiplicity` times the fiber
/// over `v`, with the translation action; multiplicity 1 is reorganized
/// into the orbit of a free generator.
pub fn riemann_roch_basis(
    cover: &EllipticCover,
    v: &CurvePoint,
    multiplicity: usize,
) -> Result<FunctionSpaceBasis> {
    if multiplicity != 1 && multiplicity != 2 {
        return Err(Error::SizeMismatch(multiplicity, 2));
    }
    let f = cover.field().clone();
    let n = cover.n;
    let k = multiplicity;
    let CurvePoint::Affine { y: y_v, .. } = v else {
        return Err(Error::DegenerateConfiguration("v must be affine"));
    };
    if f.is_zero(y_v) {
        return Err(Error::DegenerateConfiguration("v must avoid two-torsion"));
    }
    let fv = cover.rho.fiber_poly(v)?;
    let mut functions = solve_ansatz(cover, v, &fv, k)?;

    let orbits = curve_order(cover.domain())? / n as u128;
    let mut c_action = if orbits >= (k + 1) as u128 {
        action_by_evaluation(cover, v, &fv, k, &functions)?
    } else {
        action_by_translation(cover, &fv, k, &functions)?
    };

    if k == 1 {
        // Reorganize into the orbit of a free generator: sample until the
        // orbit of a random vector under the action is a basis.
        let mut rng = ChaCha8Rng::seed_from_u64(GENERATOR_SEED);
        let mut orbit_coords: Option<Mat> = None;
        for _ in 0..64 {
            let c: Vec<Element> = (0..n).map(|_| f.random(&mut rng)).collect();
            let mut m = Mat::zero(&f, n, n);
            let mut cur = c;
            for j in 0..n {
                for i in 0..n {
                    *m.at_mut(i, j) = cur[i].clone();
                }
                cur = c_action.mul_vec(&f, &cur)?;
            }
            if m.rank(&f) == n {
                orbit_coords = Some(m);
                break;
            }
        }
        let Some(m) = orbit_coords else {
            return Err(Error::DegenerateConfiguration(
                "no free generator for the translation action",
            ));
        };
        let mut reorganized = Vec::with_capacity(n);
        for j in 0..n {
            let mut a = UPoly::zero();
            let mut b = UPoly::zero();
            for i in 0..n {
                let c = m.at(i, j);
                a = a.add(&f, &functions[i].a.mul_scalar(&f, c));
                b = b.add(&f, &functions[i].b.mul_scalar(&f, c));
            }
            reorganized.push(CurveFunction { a, b });
        }
        functions = reorganized;
        let mut cycle = Mat::zero(&f, n, n);
        for j in 0..n {
            *cycle.at_mut((j + 1) % n, j) = f.one();
        }
        c_action = cycle;
    }

    Ok(FunctionSpaceBasis {
        field: f,
        denominator: fv,
        multiplicity: k,
        functions,
        c_action,
    })
}

/// Evaluator for a fixed function list over an extension of the
/// coefficient field, with removable singularities resolved by jets.
///
/// At a simple root of the denominator the point lies over `v` (a true
/// pole, reported as `SingularEvaluation`) or over `-v`, where the
/// numerator vanishes to the denominator's order and the value is the
/// ratio of the first non-forced jets.
pub(crate) struct FunctionEvaluator {
    small: Field,
    big: Field,
    k: usize,
    fv: UPoly,
    fv1: UPoly,
    g1: UPoly,
    g2: UPoly,
    jets: Vec<FunctionJet>,
    /// Generic-class fast path: when the evaluation x-coordinate is the
    /// class of `x` in `big = small[x]/h`, polynomial evaluation is
    /// reduction mod `h`.
    class: Option<(UPoly, Element)>,
    half: Element,
}

struct FunctionJet {
    a: UPoly,
    b: UPoly,
    a1: UPoly,
    b1: UPoly,
    a2: UPoly,
    b2: UPoly,
    lead: Element,
}

impl FunctionEvaluator {
    pub fn new(
        cover: &EllipticCover,
        big: &Field,
        fv: &UPoly,
        k: usize,
        functions: &[CurveFunction],
    ) -> Result<Self> {
        let f = cover.field();
        let g = curve_rhs_poly(cover);
        let g1 = g.derivative(f);
        let g2 = g1.derivative(f);
        let kn = k * cover.n;
        let jets = functions
            .iter()
            .map(|func| -> Result<FunctionJet> {
                let a1 = func.a.derivative(f);
                let b1 = func.b.derivative(f);
                Ok(FunctionJet {
                    a2: a1.derivative(f),
                    b2: b1.derivative(f),
                    a1,
                    b1,
                    lead: embed_into(big, f, &func.a.coeff(f, kn))?,
                    a: func.a.clone(),
                    b: func.b.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let half = big.inv(&big.from_u64(2))?;
        Ok(FunctionEvaluator {
            small: f.clone(),
            big: big.clone(),
            k,
            fv: fv.clone(),
            fv1: fv.derivative(f),
            g1,
            g2,
            jets,
            class: None,
            half,
        })
    }

    /// Enables the reduction fast path for x-coordinates equal to the
    /// class of `x` in `big = small[x]/h`.
    pub fn with_class(mut self, h: &UPoly) -> Result<Self> {
        let d = h.degree().ok_or(Error::SizeMismatch(0, 1))?;
        let mut c = vec![self.small.zero(); d];
        c[1] = self.small.one();
        let class = self.big.from_coords(&c)?;
        self.class = Some((h.clone(), class));
        Ok(self)
    }

    fn eval_poly(&self, p: &UPoly, x0: &Element) -> Result<Element> {
        if let Some((h, cls)) = &self.class {
            if x0 == cls {
                let d = h.degree().expect("nonzero modulus");
                let r = p.rem(&self.small, h)?;
                let mut coords = vec![self.small.zero(); d];
                for (i, c) in r.coeffs.iter().enumerate() {
                    coords[i] = c.clone();
                }
                return self.big.from_coords(&coords);
            }
        }
        let mut acc = self.big.zero();
        for c in p.coeffs.iter().rev() {
            acc = self.big.mul(&acc, x0);
            acc = self.big.add(&acc, &embed_into(&self.big, &self.small, c)?);
        }
        Ok(acc)
    }

    pub fn eval(&self, idx: usize, pt: &CurvePoint) -> Result<Element> {
        let b = &self.big;
        let jet = &self.jets[idx];
        let CurvePoint::Affine { x: x0, y: y0 } = pt else {
            // At the origin the monic denominator and the top coefficient
            // of A dominate; the B part vanishes there.
            return Ok(jet.lead.clone());
        };
        let d0 = self.eval_poly(&self.fv, x0)?;
        if !b.is_zero(&d0) {
            let num = b.add(
                &self.eval_poly(&jet.a, x0)?,
                &b.mul(&self.eval_poly(&jet.b, x0)?, y0),
            );
            let dk = if self.k == 1 { d0.clone() } else { b.mul(&d0, &d0) };
            return b.div(&num, &dk);
        }
        if b.is_zero(y0) {
            return Err(Error::SingularEvaluation);
        }
        let jet0 = b.add(
            &self.eval_poly(&jet.a, x0)?,
            &b.mul(&self.eval_poly(&jet.b, x0)?, y0),
        );
        if !b.is_zero(&jet0) {
            return Err(Error::SingularEvaluation);
        }
        let fd = self.eval_poly(&self.fv1, x0)?;
        if b.is_zero(&fd) {
            return Err(Error::SingularEvaluation);
        }
        let y_inv = b.inv(y0)?;
        let g1x = self.eval_poly(&self.g1, x0)?;
        let b_at = self.eval_poly(&jet.b, x0)?;
        let b1_at = self.eval_poly(&jet.b1, x0)?;
        // d/dx of A + B y along the sheet through (x0, y0).
        let jet1 = b.add(
            &b.add(&self.eval_poly(&jet.a1, x0)?, &b.mul(&b1_at, y0)),
            &b.mul(&b.mul(&b_at, &g1x), &b.mul(&y_inv, &self.half)),
        );
        if self.k == 1 {
            return b.div(&jet1, &fd);
        }
        if !b.is_zero(&jet1) {
            return Err(Error::SingularEvaluation);
        }
        // Half of the second derivative along the sheet.
        let g2x = self.eval_poly(&self.g2, x0)?;
        let y_inv2 = b.mul(&y_inv, &y_inv);
        let curvature = b.sub(
            &b.mul(&b.mul(&g2x, &self.half), &y_inv),
            &b.mul(
                &b.mul(&b.mul(&g1x, &g1x), &self.half),
                &b.mul(&b.mul(&y_inv2, &y_inv), &self.half),
            ),
        );
        let second = b.add(
            &b.add(&self.eval_poly(&jet.a2, x0)?, &b.mul(&self.eval_poly(&jet.b2, x0)?, y0)),
            &b.add(&b.mul(&b1_at, &b.mul(&g1x, &y_inv)), &b.mul(&b_at, &curvature)),
        );
        let jet2 = b.mul(&second, &self.half);
        b.div(&jet2, &b.mul(&fd, &fd))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::order::find_curve_with_point_of_order;
    use crate::elliptic::EllipticCurve;

    fn worked_cover() -> EllipticCover {
        let f = Field::prime(7).unwrap();
        let y = EllipticCurve::new(&f, f.from_u64(1), f.from_u64(4)).unwrap();
        let t = CurvePoint::affine(f.from_u64(6), f.from_u64(4));
        EllipticCover::new(&y, &t).unwrap()
    }

    fn worked_v(f: &Field) -> CurvePoint {
        CurvePoint::affine(f.from_u64(0), f.from_u64(5))
    }

    #[test]
    fn test_dimensions_and_cycle_action() {
        let cover = worked_cover();
        let f = cover.field().clone();
        let v = worked_v(&f);
        let b1 = riemann_roch_basis(&cover, &v, 1).unwrap();
        assert_eq!(b1.functions.len(), 5);
        let b2 = riemann_roch_basis(&cover, &v, 2).unwrap();
        assert_eq!(b2.functions.len(), 10);
        // The reorganized multiplicity-1 action is the 5-cycle.
        for i in 0..5 {
            for j in 0..5 {
                let want = if i == (j + 1) % 5 { f.one() } else { f.zero() };
                assert_eq!(*b1.c_action.at(i, j), want);
            }
        }
        // The translation has order n in both spaces.
        let mut pow = b2.c_action.clone();
        for _ in 0..4 {
            pow = pow.mul(&f, &b2.c_action).unwrap();
        }
        assert_eq!(pow, Mat::identity(&f, 10));
    }

    #[test]
    fn test_constant_function_lies_in_both_spaces() {
        let cover = worked_cover();
        let f = cover.field().clone();
        let v = worked_v(&f);
        for k in [1usize, 2] {
            let basis = riemann_roch_basis(&cover, &v, k).unwrap();
            let n = cover.n;
            let fvk = if k == 1 {
                basis.denominator.clone()
            } else {
                basis.denominator.mul(&f, &basis.denominator)
            };
            let one = CurveFunction { a: fvk, b: UPoly::zero() };
            let coords = AnsatzCoords::new(&f, &basis.functions, k * n + 1, k * n - 1)
                .unwrap()
                .coords(&f, &one)
                .unwrap();
            assert_eq!(coords.len(), k * n);
            // And it evaluates to 1 everywhere, including via the jet
            // path at the fiber over -v.
            let ev = FunctionEvaluator::new(&cover, &f, &basis.denominator, k, &[one]).unwrap();
            let y = cover.domain().clone();
            assert!(f.is_one(&ev.eval(0, &CurvePoint::Infinity).unwrap()));
            for idx in 0..7u64 {
                let x0 = f.from_u64(idx);
                let rhs = y.rhs(&x0);
                for ydx in 0..7u64 {
                    let y0 = f.from_u64(ydx);
                    if f.mul(&y0, &y0) == rhs {
                        let pt = CurvePoint::affine(x0.clone(), y0);
                        match ev.eval(0, &pt) {
                            Ok(val) => assert!(f.is_one(&val)),
                            Err(Error::SingularEvaluation) => {
                                // Points over v itself are poles of the
                                // basis denominators, not of the constant,
                                // but the evaluator cannot simplify F/F at
                                // order two; only those points may fail.
                                let img = cover.rho.apply(&pt).unwrap();
                                assert_eq!(img, worked_v(&f));
                            }
                            Err(e) => panic!("unexpected error {e:?}"),
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn test_action_routes_agree() {
        // A curve with 20 rational points and a 5-torsion point gives
        // four rational orbits, enough for the evaluation route at both
        // multiplicities; compare it against the symbolic route.
        let f = Field::prime(13).unwrap();
        let (y, t) = find_curve_with_point_of_order(&f, 5, 0, 500).unwrap();
        let cover = EllipticCover::new(&y, &t).unwrap();
        assert!(curve_order(cover.domain()).unwrap() >= 15);
        // A valid v: affine, not two-torsion, fiber disjoint from -v's.
        let x_curve = cover.codomain().clone();
        let mut v = None;
        for idx in 0..13u64 {
            let x0 = f.from_u64(idx);
            let rhs = x_curve.rhs(&x0);
            for ydx in 1..13u64 {
                let y0 = f.from_u64(ydx);
                if f.mul(&y0, &y0) == rhs {
                    v = Some(CurvePoint::affine(x0.clone(), y0));
                    break;
                }
            }
            if v.is_some() {
                break;
            }
        }
        let v = v.unwrap();
        for k in [1usize, 2] {
            let fv = cover.rho.fiber_poly(&v).unwrap();
            let funcs = solve_ansatz(&cover, &v, &fv, k).unwrap();
            let by_eval = action_by_evaluation(&cover, &v, &fv, k, &funcs).unwrap();
            let by_translation = action_by_translation(&cover, &fv, k, &funcs).unwrap();
            assert_eq!(by_eval, by_translation);
        }
    }

    #[test]
    fn test_rejects_two_torsion_v() {
        let cover = worked_cover();
        let f = cover.field().clone();
        let v = CurvePoint::affine(f.from_u64(6), f.from_u64(0));
        assert!(matches!(
            riemann_roch_basis(&cover, &v, 1),
            Err(Error::DegenerateConfiguration(_))
        ));
    }
}
