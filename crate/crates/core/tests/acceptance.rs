//! Acceptance gate: one test per release criterion, each ending in a
//! single PASS line (visible with --nocapture) or a panic.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use equimul::construction::{pipeline, EllipticCover, REFERENCE_SEED};
use equimul::elliptic::{curve_order, in_dual_kernel, CurvePoint, EllipticCurve};
use equimul::equivariant::lagrange::mu_decomposition_for_field;
use equimul::equivariant::verify::verify_sampled;
use equimul::equivariant::{
    descend_scalars, exact_rank_small, generic_decomposition, verify_decomposition,
    EquivariantDecomposition, MulContext, NormalBasisContext, SemisimpleAlgebra, VerifyOutcome,
};
use equimul::field::factor::{factor, random_irreducible};
use equimul::field::normal::find_normal_element;
use equimul::field::poly::UPoly;
use equimul::field::Field;
use equimul::group_algebra::GroupAlgebraElement;
use equimul::zeta::{char_poly_from_counts, count_points, feasibility, hasse_feasible, CurveModel};
use equimul::Error;

fn random_vec(f: &Field, n: usize, rng: &mut ChaCha8Rng) -> GroupAlgebraElement {
    let coords = (0..n).map(|_| f.random(rng)).collect();
    GroupAlgebraElement::new(f, coords).expect("coordinate vector")
}

fn assert_pass(outcome: VerifyOutcome) -> (u64, bool) {
    match outcome {
        VerifyOutcome::Pass { pairs, exhaustive } => (pairs, exhaustive),
        VerifyOutcome::Fail { u, v, .. } => panic!("verification failed at u={u:?}, v={v:?}"),
    }
}

#[test]
fn criterion_1_reference_run_reproduces_the_worked_curve() {
    let t0 = Instant::now();
    let out = pipeline(7, 5, REFERENCE_SEED, 1).expect("reference pipeline");
    assert_eq!(out.m, 1);
    assert_eq!(out.decomposition.sigma(), 2, "two terms");
    assert_eq!(out.sigma_upstairs, 2);

    // The pinned curve, rebuilt independently: 10 rational points and a
    // kernel generator of exact order 5.
    let f = Field::prime(7).unwrap();
    let y = EllipticCurve::new(&f, f.from_u64(1), f.from_u64(4)).unwrap();
    assert_eq!(curve_order(&y).unwrap(), 10);
    let t = CurvePoint::affine(f.from_u64(6), f.from_u64(4));
    assert!(y.contains(&t));
    assert!(y.scalar_mul(5, &t).unwrap().is_infinity());
    for k in 1..5 {
        assert!(!y.scalar_mul(k, &t).unwrap().is_infinity());
    }
    for needle in [
        "curve: y^2 = x^3 + 1 x + 4",
        "kernel generator t: (6, 4) (order 5)",
        "quotient: y^2 = x^3 + 3 x + 4",
        "a: (5, 5)",
        "u: (6, 0)",
        "v: (2, 5)",
        "preimage of u: (2, 0)",
    ] {
        assert!(out.provenance.contains(needle), "provenance misses {needle:?}");
    }

    // The selected triple is valid: all on the quotient, u the image of a
    // rational point, a with an irreducible degree-5 fiber, v clear of the
    // dual-kernel conditions.
    let cover = EllipticCover::new(&y, &t).unwrap();
    let x_curve = cover.codomain().clone();
    assert_eq!(x_curve.a, f.from_u64(3));
    assert_eq!(x_curve.b, f.from_u64(4));
    let a = CurvePoint::affine(f.from_u64(5), f.from_u64(5));
    let u = CurvePoint::affine(f.from_u64(6), f.from_u64(0));
    let v = CurvePoint::affine(f.from_u64(2), f.from_u64(5));
    let p_u = CurvePoint::affine(f.from_u64(2), f.from_u64(0));
    for p in [&a, &u, &v] {
        assert!(x_curve.contains(p));
    }
    assert!(cover.domain().contains(&p_u));
    assert_eq!(cover.rho.apply(&p_u).unwrap(), u);
    let fiber = cover.rho.fiber_poly(&a).unwrap();
    let parts = factor(&f, &fiber).unwrap();
    assert_eq!(parts.len(), 1, "fiber over a is inert");
    assert_eq!(parts[0].0.degree(), Some(5));
    assert!(!in_dual_kernel(&cover.rho, &x_curve.sub(&v, &a).unwrap()).unwrap());
    let u_minus_2v = x_curve.sub(&u, &x_curve.scalar_mul(2, &v).unwrap()).unwrap();
    assert!(!in_dual_kernel(&cover.rho, &u_minus_2v).unwrap());

    // Exact product check: every basis pair plus ten thousand random pairs.
    let (pairs, _) = assert_pass(verify_sampled(&out.decomposition, &out.context, 10_000).unwrap());
    assert_eq!(pairs, 10_000 + 25);

    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:.1?}");
    println!("criterion 1: PASS (sigma = 2, {pairs} pairs exact, {elapsed:.2?})");
}

#[test]
fn criterion_2_genus_two_certificate_for_degree_239() {
    let t0 = Instant::now();
    let f11 = Field::prime(11).unwrap();
    let branch = UPoly::from_u64s(&f11, &[3, 0, 2, 1, 0, 1]);
    let curve = CurveModel::hyperelliptic(&f11, branch, 2).unwrap();
    let counts: Vec<u128> = (1..=2).map(|i| count_points(&curve, i).unwrap()).collect();
    assert_eq!(counts[0], 19);
    let chi = char_poly_from_counts(&counts, 11, 2).unwrap();
    assert_eq!(chi.coeffs, vec![121, 77, 33, 7, 1]);
    assert!(chi.functional_equation_holds());
    let report = feasibility(&chi, 239).unwrap();
    assert_eq!(report.chi_at_1, 239);
    assert!(report.divides);
    assert_eq!(report.gcd_chi_prime, 1);
    assert!(report.q_root_mod_n);
    assert_eq!(report.orbit_index, Some(2));
    assert_eq!(report.factors_mod_n.len(), 1);
    assert_eq!(
        report.factors_mod_n[0].factors,
        vec![(vec![228, 1], 1), (vec![238, 1], 1), (vec![11, 19, 1], 1)]
    );
    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:.1?}");
    println!("criterion 2: PASS (chi(1) = 239, orbit index 2, {elapsed:.2?})");
}

#[test]
fn criterion_3_genus_three_certificate_for_degree_4639() {
    let t0 = Instant::now();
    let f13 = Field::prime(13).unwrap();
    let monomials = vec![
        (0u32, 3u32, 1u32, f13.from_u64(1)),
        (3, 1, 0, f13.from_u64(1)),
        (1, 1, 2, f13.from_u64(2)),
        (0, 1, 3, f13.from_u64(1)),
        (3, 0, 1, f13.from_u64(11)),
        (2, 0, 2, f13.from_u64(9)),
        (1, 0, 3, f13.from_u64(10)),
    ];
    let curve = CurveModel::plane(&f13, monomials, 3).unwrap();
    let counts: Vec<u128> = (1..=3).map(|i| count_points(&curve, i).unwrap()).collect();
    assert_eq!(counts[0], 23);
    let chi = char_poly_from_counts(&counts, 13, 3).unwrap();
    assert_eq!(chi.coeffs, vec![2197, 1521, 663, 197, 51, 9, 1]);
    assert!(chi.functional_equation_holds());
    let report = feasibility(&chi, 4639).unwrap();
    assert_eq!(report.chi_at_1, 4639);
    assert!(report.divides);
    assert_eq!(report.gcd_chi_prime, 1);
    assert!(report.q_root_mod_n);
    assert_eq!(report.orbit_index, Some(1));
    assert_eq!(
        report.factors_mod_n[0].factors,
        vec![
            (vec![2195, 1], 1),
            (vec![3726, 1], 1),
            (vec![4626, 1], 1),
            (vec![4638, 1], 1),
            (vec![13, 3380, 1], 1),
        ]
    );
    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(300), "took {elapsed:.1?}");
    println!("criterion 3: PASS (chi(1) = 4639, orbit index 1, {elapsed:.2?})");
}

#[test]
fn criterion_4_degree_239_first_succeeds_over_quartic_scalars() {
    let t0 = Instant::now();
    for m in 1u32..=3 {
        assert!(!hasse_feasible(11, m, 239), "m = {m} must be infeasible");
    }
    assert!(hasse_feasible(11, 4, 239));
    let out = pipeline(11, 239, REFERENCE_SEED, 4).expect("degree-239 pipeline");
    assert_eq!(out.m, 4);
    assert_eq!(out.sigma_upstairs, 2);
    assert_eq!(out.mu, Some(7));
    let sigma = out.decomposition.sigma();
    assert_eq!(sigma, out.sigma_upstairs * out.mu.unwrap());
    assert!(sigma <= 2 * 7, "sigma = {sigma}");
    let (pairs, _) = assert_pass(verify_sampled(&out.decomposition, &out.context, 25).unwrap());
    println!(
        "criterion 4: PASS (m = 4, sigma = {sigma}, {pairs} pairs, {:.1?})",
        t0.elapsed()
    );
}

/// One descent: check the scalar term count, descend, check the exact
/// composed term count, and verify downstairs (exhaustive whenever the
/// downstairs field has at most 2^16 elements, ten thousand random pairs
/// otherwise).
fn descent_case<C: MulContext>(
    dec_up: EquivariantDecomposition,
    ctx_up: &C,
    mu_expect: usize,
) -> (usize, u64, bool) {
    let mu = mu_decomposition_for_field(ctx_up.field()).expect("scalar decomposition");
    assert_eq!(mu.mu(), mu_expect, "scalar term count");
    let sigma_up = dec_up.sigma();
    let (dec, down) = descend_scalars(&dec_up, ctx_up, &mu).expect("descent");
    assert_eq!(dec.sigma(), sigma_up * mu_expect, "exact composed term count");
    let (pairs, exhaustive) = assert_pass(verify_decomposition(&dec, &down, 10_000).unwrap());
    (dec.sigma(), pairs, exhaustive)
}

#[test]
fn criterion_5_scalar_descents_compose_exactly() {
    // Quartic scalars over GF(2), degree 5: generic 35 terms upstairs,
    // 22 for the scalars, 770 composed, swept over all of GF(2^5).  The
    // twist is the inverse of m = 4 modulo 5.
    let f2 = Field::prime(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let kp16 = Field::extension(&f2, &random_irreducible(&f2, 4, &mut rng)).unwrap();
    let l = Field::extension(&kp16, &random_irreducible(&kp16, 5, &mut rng)).unwrap();
    let theta = find_normal_element(&l, &mut rng).unwrap();
    let ctx = NormalBasisContext::new(&l, &theta, 4).unwrap();
    let dec = generic_decomposition(&ctx).unwrap();
    assert_eq!(dec.sigma(), 35);
    let (sigma_a, pairs_a, ex_a) = descent_case(dec, &ctx, 22);
    assert_eq!(sigma_a, 770);
    assert!(ex_a, "2^5 elements must be swept exhaustively");
    assert_eq!(pairs_a, 32 * 32);

    // Quadratic scalars over GF(3) on a split residue algebra: two copies
    // of GF(81) over GF(9), descending to GF(3^4) with 81 elements.
    let f3 = Field::prime(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let kp9 = Field::extension(&f3, &random_irreducible(&f3, 2, &mut rng)).unwrap();
    let alg = SemisimpleAlgebra::new(&kp9, 2, 2, 1, 5).unwrap();
    let dec = generic_decomposition(&alg).unwrap();
    assert_eq!(dec.sigma(), 22);
    let (sigma_b, pairs_b, ex_b) = descent_case(dec, &alg, 3);
    assert_eq!(sigma_b, 66);
    assert!(ex_b, "3^4 elements must be swept exhaustively");
    assert_eq!(pairs_b, 81 * 81);

    // Trivial scalars: the descent is the identity on the reference run.
    let out = pipeline(7, 5, REFERENCE_SEED, 1).unwrap();
    let (sigma_c, pairs_c, ex_c) = descent_case(out.decomposition, &out.context, 1);
    assert_eq!(sigma_c, 2);
    assert!(ex_c, "7^5 elements fit the exhaustive bound");
    assert_eq!(pairs_c, 16807 * 16807);
    println!(
        "criterion 5: PASS (35*22 = {sigma_a} over {pairs_a} pairs, \
         22*3 = {sigma_b} over {pairs_b} pairs, 2*1 = {sigma_c} over {pairs_c} pairs)"
    );
}

/// The algebra laws every produced decomposition must satisfy.
fn law_suite(
    dec: &EquivariantDecomposition,
    ctx: &NormalBasisContext,
    samples: usize,
    seed: u64,
) {
    let f = dec.field.clone();
    let n = dec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = GroupAlgebraElement::new(&f, ctx.unit_coords()).unwrap();
    for _ in 0..samples {
        let u = random_vec(&f, n, &mut rng);
        let v = random_vec(&f, n, &mut rng);
        let uv = dec.multiply(&u, &v).unwrap();
        // Applying the generator to both factors applies it to the product.
        assert_eq!(dec.multiply(&u.shift(), &v.shift()).unwrap(), uv.shift());
        assert_eq!(dec.multiply(&v, &u).unwrap(), uv, "commutativity");
        assert_eq!(dec.multiply(&unit, &v).unwrap(), v, "unit law");
    }
}

/// The generator acts on normal-basis coordinates as one cyclic shift.
/// Swept over every field element.
fn qpower_is_shift(ctx: &NormalBasisContext) -> u128 {
    let total = ctx.l.order_u128().expect("small field");
    for i in 0..total {
        let x = ctx.l.element_from_index(i);
        let shifted = GroupAlgebraElement::new(&ctx.k, ctx.coords(&x).unwrap()).unwrap().shift();
        let qx = ctx.generator_action(&x).unwrap();
        assert_eq!(ctx.coords(&qx).unwrap(), shifted.coords, "element {i}");
    }
    total
}

#[test]
fn criterion_6_equivariance_commutativity_and_unit_laws() {
    let out = pipeline(7, 5, REFERENCE_SEED, 1).unwrap();
    law_suite(&out.decomposition, &out.context, 1000, 101);

    let mut swept = 0u128;
    for (q, n, seed) in [(5u64, 3usize, 102u64), (3, 5, 103), (7, 2, 104)] {
        let k = Field::prime(q).unwrap();
        let ctx = NormalBasisContext::generate(&k, n, seed).unwrap();
        let dec = generic_decomposition(&ctx).unwrap();
        law_suite(&dec, &ctx, 1000, seed);
        // q^n <= 2^12 for all three: sweep the q-power/shift identity.
        swept += qpower_is_shift(&ctx);
    }

    // A descended decomposition obeys the same laws downstairs.
    let f3 = Field::prime(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let kp9 = Field::extension(&f3, &random_irreducible(&f3, 2, &mut rng)).unwrap();
    let alg = SemisimpleAlgebra::new(&kp9, 2, 2, 1, 5).unwrap();
    let dec_up = generic_decomposition(&alg).unwrap();
    let mu = mu_decomposition_for_field(&kp9).unwrap();
    let (dec, down) = descend_scalars(&dec_up, &alg, &mu).unwrap();
    law_suite(&dec, &down, 1000, 105);
    swept += qpower_is_shift(&down);

    println!("criterion 6: PASS (5 decompositions, 1000 samples each, {swept} elements swept)");
}

#[test]
fn criterion_7_generic_decomposition_meets_its_bound_everywhere() {
    let mut checked = 0;
    for q in [2u64, 3, 5, 7] {
        for n in 1usize..=5 {
            let k = Field::prime(q).unwrap();
            let ctx = NormalBasisContext::generate(&k, n, 1000 + n as u64).unwrap();
            let dec = generic_decomposition(&ctx).unwrap();
            assert_eq!(dec.sigma(), n * (3 * n - 1) / 2, "sigma at q = {q}, n = {n}");
            assert_pass(verify_sampled(&dec, &ctx, 1000).unwrap());
            checked += 1;
        }
    }
    println!("criterion 7: PASS ({checked} (q, n) pairs at sigma = n(3n - 1)/2)");
}

#[test]
fn criterion_8_two_terms_are_necessary_and_sufficient_for_small_fields() {
    let mut lines = Vec::new();
    for (q, n) in [(2u64, 2usize), (2, 3), (3, 2)] {
        // One term is impossible...
        match exact_rank_small(q, n, 1) {
            Err(Error::Exceeded(1)) => {}
            other => panic!("expected the one-term search to exhaust, got {other:?}"),
        }
        // ...and the two-term witness multiplies correctly on every pair.
        let (dec, ctx) = exact_rank_small(q, n, 4).unwrap();
        assert_eq!(dec.sigma(), 2, "exact rank at q = {q}, n = {n}");
        let (pairs, exhaustive) = assert_pass(verify_decomposition(&dec, &ctx, 0).unwrap());
        assert!(exhaustive);
        lines.push(format!("({q}, {n}): nu = 2, {pairs} pairs"));
    }
    println!("criterion 8: PASS ({})", lines.join("; "));
}

#[test]
fn criterion_9_operation_counts_are_exactly_three_sigma_and_sigma() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut cases = Vec::new();

    let out = pipeline(7, 5, REFERENCE_SEED, 1).unwrap();
    cases.push(out.decomposition);

    let k5 = Field::prime(5).unwrap();
    let ctx = NormalBasisContext::generate(&k5, 4, 9).unwrap();
    cases.push(generic_decomposition(&ctx).unwrap());

    let f3 = Field::prime(3).unwrap();
    let mut field_rng = ChaCha8Rng::seed_from_u64(2);
    let kp9 = Field::extension(&f3, &random_irreducible(&f3, 2, &mut field_rng)).unwrap();
    let alg = SemisimpleAlgebra::new(&kp9, 2, 2, 1, 5).unwrap();
    let dec_up = generic_decomposition(&alg).unwrap();
    let mu = mu_decomposition_for_field(&kp9).unwrap();
    cases.push(descend_scalars(&dec_up, &alg, &mu).unwrap().0);

    let mut sigmas = Vec::new();
    for dec in &cases {
        let mult = dec.multiplier();
        let sigma = dec.sigma() as u64;
        for _ in 0..10 {
            let u = random_vec(&dec.field, dec.n, &mut rng);
            let v = random_vec(&dec.field, dec.n, &mut rng);
            let (_, counts) = mult.multiply_counted(&u, &v).unwrap();
            assert_eq!(counts.star, 3 * sigma, "convolutions at sigma = {sigma}");
            assert_eq!(counts.diamond, sigma, "pointwise products at sigma = {sigma}");
        }
        sigmas.push(sigma);
    }
    println!("criterion 9: PASS (3 decompositions, sigma = {sigmas:?}, 10 products each)");
}
