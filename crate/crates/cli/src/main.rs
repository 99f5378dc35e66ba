//! Command line front end for the decomposition library.
//!
//! Exit codes: 0 success, 1 verification failure, 2 search exhausted,
//! 3 unsupported parameters, 4 bad input.  Timings go to stderr so that
//! stdout is byte-identical across runs with the same command and seed.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use equimul::construction::{pipeline, REFERENCE_SEED};
use equimul::elliptic::order::{curve_order, find_curve_with_point_of_order};
use equimul::elliptic::CurvePoint;
use equimul::equivariant::rank::exact_rank_small;
use equimul::equivariant::verify::verify_sampled;
use equimul::equivariant::{
    generic_decomposition, serial, verify_decomposition, EquivariantDecomposition,
    NormalBasisContext, VerifyOutcome,
};
use equimul::field::factor::random_irreducible;
use equimul::field::poly::UPoly;
use equimul::field::{Element, Field};
use equimul::group_algebra::GroupAlgebraElement;
use equimul::zeta::{char_poly_from_counts, count_points, feasibility, CurveModel};
use equimul::Error;

/// Mixing constant for per-tower seeds; matches the search pipeline.
const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Parser)]
#[command(name = "equimul", version, about = "Equivariant multiplication toolkit")]
struct Cli {
    /// Master seed for every randomized search.
    #[arg(long, global = true, default_value_t = REFERENCE_SEED)]
    seed: u64,
    /// Worker threads (0 uses every core); output does not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Random pairs drawn by sampled verification.
    #[arg(long, global = true, default_value_t = 10_000)]
    trials: u64,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Search for a short decomposition of GF(q^n)/GF(q) and write it out.
    Decompose {
        /// Characteristic of the base field (a prime, at least 5).
        #[arg(long)]
        q: u64,
        /// Extension degree.
        #[arg(long)]
        n: usize,
        /// Largest scalar tower degree tried before giving up.
        #[arg(long, default_value_t = 4)]
        m_max: u32,
        /// Output path for the decomposition file.
        #[arg(long, default_value = "decomposition.json")]
        out: PathBuf,
    },
    /// Multiply two coordinate vectors with a stored decomposition.
    Multiply {
        /// Decomposition file produced by `decompose`.
        #[arg(long)]
        file: PathBuf,
        /// Left operand, comma separated residues in normal-basis order.
        #[arg(long)]
        u: String,
        /// Right operand, same format.
        #[arg(long)]
        v: String,
    },
    /// Re-verify a stored decomposition against field arithmetic.
    Verify {
        /// Decomposition file produced by `decompose`.
        #[arg(long)]
        file: PathBuf,
        /// Check every pair of field elements instead of sampling.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Time a stored decomposition against baseline multipliers.
    Bench {
        /// Decomposition file produced by `decompose`.
        #[arg(long)]
        file: PathBuf,
        /// Products measured per multiplier.
        #[arg(long, default_value_t = 100_000)]
        reps: u64,
    },
    /// Exact minimal number of equivariant terms, by exhaustive search.
    Rank {
        /// Base field order (a prime).
        #[arg(long)]
        q: u64,
        /// Extension degree.
        #[arg(long)]
        n: usize,
        /// Largest term count tried.
        #[arg(long, default_value_t = 6)]
        max: usize,
    },
    /// Find a curve over GF(q^m) with a rational point of order n.
    CurveSearch {
        /// Characteristic of the base field (a prime, at least 5).
        #[arg(long)]
        q: u64,
        /// Degree of the coefficient field over the prime field.
        #[arg(long, default_value_t = 1)]
        m: u32,
        /// Required point order.
        #[arg(long)]
        n: u64,
        /// Curves tried before giving up.
        #[arg(long, default_value_t = 4096)]
        budget: u64,
    },
    /// Feasibility report for a curve order divisible by n.
    ZetaCheck {
        /// Field order of the curve (a prime).
        #[arg(long)]
        q: u64,
        /// Target divisor of the rational point count.
        #[arg(long)]
        n: u64,
        /// Point counts N_1,...,N_g over the first g extensions.
        #[arg(long, value_delimiter = ',', conflicts_with = "hyperelliptic")]
        counts: Option<Vec<u128>>,
        /// Ascending coefficients of f for the curve y^2 = f(x).
        #[arg(long, value_delimiter = ',')]
        hyperelliptic: Option<Vec<u64>>,
        /// Curve genus; defaults to the count length or floor((deg f - 1)/2).
        #[arg(long)]
        genus: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let ok = !e.use_stderr();
            let _ = e.print();
            return if ok { ExitCode::SUCCESS } else { ExitCode::from(4) };
        }
    };
    if cli.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    let result = match &cli.command {
        Cmd::Decompose { q, n, m_max, out } => decompose(cli.seed, *q, *n, *m_max, out),
        Cmd::Multiply { file, u, v } => multiply(file, u, v),
        Cmd::Verify { file, exhaustive } => verify(file, *exhaustive, cli.trials),
        Cmd::Bench { file, reps } => bench(cli.seed, file, *reps),
        Cmd::Rank { q, n, max } => rank(*q, *n, *max),
        Cmd::CurveSearch { q, m, n, budget } => curve_search(cli.seed, *q, *m, *n, *budget),
        Cmd::ZetaCheck { q, n, counts, hyperelliptic, genus } => {
            zeta_check(*q, *n, counts.as_deref(), hyperelliptic.as_deref(), *genus)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_class(&e))
        }
    }
}

fn exit_class(e: &Error) -> u8 {
    match e {
        Error::PipelineExhausted(_)
        | Error::NotFound(_)
        | Error::Exceeded(_)
        | Error::HasseInfeasible { .. } => 2,
        Error::TooLarge(_)
        | Error::FieldTooLarge(_)
        | Error::UnsupportedCharacteristic(_)
        | Error::PrimeFieldOnly => 3,
        Error::NotPrime(_)
        | Error::NotCoprime(_)
        | Error::BadFile(_)
        | Error::SizeMismatch(_, _)
        | Error::InconsistentCounts(_)
        | Error::BadKernelOrder(_) => 4,
        _ => 1,
    }
}

/// Degree one needs no curve: scalar multiplication is a single term.
fn trivial_decomposition(q: u64) -> Result<(EquivariantDecomposition, NormalBasisContext), Error> {
    let k = Field::prime(q)?;
    let modulus = UPoly::from_u64s(&k, &[q - 1, 1]);
    let l = Field::extension(&k, &modulus)?;
    let theta = l.from_coords(&[k.one()])?;
    let ctx = NormalBasisContext::new(&l, &theta, 1)?;
    let unit = GroupAlgebraElement::star_unit(&k, 1);
    let dec = EquivariantDecomposition::new(&k, 1, 1, vec![unit.clone()], vec![unit])?;
    Ok((dec, ctx))
}

fn decompose(seed: u64, q: u64, n: usize, m_max: u32, out: &PathBuf) -> Result<(), Error> {
    let (dec, ctx, report) = if n == 1 {
        let (dec, ctx) = trivial_decomposition(q)?;
        (dec, ctx, format!("seed: {seed}\nbase field: GF({q})\nterms: 1\n"))
    } else {
        let run = pipeline(q, n, seed, m_max)?;
        (run.decomposition, run.context, run.provenance)
    };
    let json = serial::to_json(&dec, &ctx)?;
    fs::write(out, json + "\n").map_err(|e| Error::BadFile(e.to_string()))?;
    print!("{report}");
    println!("sigma: {}", dec.sigma());
    println!("wrote {}", out.display());
    Ok(())
}

fn load(file: &PathBuf) -> Result<(EquivariantDecomposition, NormalBasisContext), Error> {
    let text = fs::read_to_string(file).map_err(|e| Error::BadFile(e.to_string()))?;
    serial::from_json(&text)
}

fn parse_operand(dec: &EquivariantDecomposition, text: &str) -> Result<GroupAlgebraElement, Error> {
    let q = dec.q().expect("stored decompositions have prime base fields");
    let mut coords = Vec::new();
    for part in text.split(',') {
        let v: u64 = part
            .trim()
            .parse()
            .map_err(|_| Error::BadFile(format!("bad coordinate {:?}", part.trim())))?;
        if u128::from(v) >= q {
            return Err(Error::BadFile(format!("coordinate {v} is not reduced mod {q}")));
        }
        coords.push(v);
    }
    if coords.len() != dec.n {
        return Err(Error::SizeMismatch(coords.len(), dec.n));
    }
    Ok(GroupAlgebraElement::from_u64s(&dec.field, &coords))
}

fn fmt_coords(el: &GroupAlgebraElement) -> String {
    let parts: Vec<String> = el.coords.iter().map(fmt_elem).collect();
    parts.join(",")
}

/// Residues print as decimals, extension elements as power-basis arrays.
fn fmt_elem(e: &Element) -> String {
    match e {
        Element::P(v) => v.to_string(),
        Element::E(cs) => {
            let parts: Vec<String> = cs.iter().map(fmt_elem).collect();
            format!("[{}]", parts.join(", "))
        }
    }
}

fn multiply(file: &PathBuf, u: &str, v: &str) -> Result<(), Error> {
    let (dec, _ctx) = load(file)?;
    let u = parse_operand(&dec, u)?;
    let v = parse_operand(&dec, v)?;
    let (prod, counts) = dec.multiplier().multiply_counted(&u, &v)?;
    println!("product: {}", fmt_coords(&prod));
    println!(
        "convolutions: {} (3 per term, {} terms), pointwise products: {}",
        counts.star,
        dec.sigma(),
        counts.diamond
    );
    Ok(())
}

fn verify(file: &PathBuf, exhaustive: bool, trials: u64) -> Result<(), Error> {
    let (dec, ctx) = load(file)?;
    let outcome = if exhaustive {
        verify_decomposition(&dec, &ctx, trials)?
    } else {
        verify_sampled(&dec, &ctx, trials)?
    };
    match outcome {
        VerifyOutcome::Pass { pairs, exhaustive } => {
            let mode = if exhaustive { "exhaustive" } else { "sampled" };
            println!("pass: {pairs} pairs ({mode})");
            Ok(())
        }
        VerifyOutcome::Fail { u, v, got, want } => {
            println!("fail: u = {u:?}, v = {v:?}");
            println!("  decomposition: {got:?}");
            println!("  field product: {want:?}");
            Err(Error::VerificationFailed("stored decomposition disagrees".into()))
        }
    }
}

/// Wall-clock for `reps` products cycling through a fixed operand pool.
fn time_products<F: FnMut(usize)>(reps: u64, pool: usize, mut f: F) -> f64 {
    let start = Instant::now();
    for i in 0..reps {
        f(i as usize % pool);
    }
    start.elapsed().as_secs_f64()
}

fn bench(seed: u64, file: &PathBuf, reps: u64) -> Result<(), Error> {
    let (dec, ctx) = load(file)?;
    let n = dec.n;
    let q = dec.q().expect("stored decompositions have prime base fields") as u64;
    let k = dec.field.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const POOL: usize = 64;
    let pool: Vec<(GroupAlgebraElement, GroupAlgebraElement)> = (0..POOL)
        .map(|_| {
            let mut draw = || {
                let coords: Vec<u64> = (0..n).map(|_| rng.gen_range(0..q)).collect();
                GroupAlgebraElement::from_u64s(&k, &coords)
            };
            (draw(), draw())
        })
        .collect();

    // The decomposition must agree with field arithmetic and must spend
    // exactly three convolutions per term.
    let mult = dec.multiplier();
    for (u, v) in &pool[..8.min(POOL)] {
        let (got, counts) = mult.multiply_counted(u, v)?;
        if counts.star != 3 * dec.sigma() as u64 || counts.diamond != dec.sigma() as u64 {
            return Err(Error::VerificationFailed(format!(
                "operation counts {}/{} do not match 3*sigma/sigma",
                counts.star, counts.diamond
            )));
        }
        let want = ctx.coords(&ctx.l.mul(&ctx.element(&u.coords)?, &ctx.element(&v.coords)?))?;
        if got.coords != want {
            return Err(Error::VerificationFailed("product disagrees with the field".into()));
        }
    }
    println!("sigma: {}", dec.sigma());
    println!("convolutions per product: {} (3 per term)", 3 * dec.sigma());
    println!("agreement with field arithmetic: ok");

    let generic = generic_decomposition(&ctx)?;
    let generic_mult = generic.multiplier();
    println!("generic sigma: {}", generic.sigma());

    // Power-basis operands for the schoolbook baseline.
    let poly_pool: Vec<(UPoly, UPoly)> = (0..POOL)
        .map(|_| {
            let mut draw = || {
                let coeffs: Vec<u64> = (0..n).map(|_| rng.gen_range(0..q)).collect();
                UPoly::from_u64s(&k, &coeffs)
            };
            (draw(), draw())
        })
        .collect();
    let modulus = ctx.l.modulus().expect("extension field").clone();
    println!("reps: {reps}");

    let t_dec = time_products(reps, POOL, |i| {
        let (u, v) = &pool[i];
        mult.multiply(u, v).expect("benchmark product");
    });
    let t_gen = time_products(reps, POOL, |i| {
        let (u, v) = &pool[i];
        generic_mult.multiply(u, v).expect("benchmark product");
    });
    let t_poly = time_products(reps, POOL, |i| {
        let (u, v) = &poly_pool[i];
        u.mul(&k, v).rem(&k, &modulus).expect("benchmark product");
    });
    eprintln!("decomposition: {:.3} s ({:.2} us/product)", t_dec, 1e6 * t_dec / reps as f64);
    eprintln!("generic:       {:.3} s ({:.2} us/product)", t_gen, 1e6 * t_gen / reps as f64);
    eprintln!("schoolbook:    {:.3} s ({:.2} us/product)", t_poly, 1e6 * t_poly / reps as f64);
    eprintln!("generic/decomposition ratio: {:.2}", t_gen / t_dec);
    Ok(())
}

fn rank(q: u64, n: usize, max: usize) -> Result<(), Error> {
    let (dec, ctx) = exact_rank_small(q, n, max)?;
    let outcome = verify_decomposition(&dec, &ctx, 0)?;
    if !outcome.passed() {
        return Err(Error::VerificationFailed("rank witness does not multiply".into()));
    }
    println!("nu: {}", dec.sigma());
    for (t, b) in dec.tops.iter().zip(&dec.bots) {
        println!("term: t = {}, b = {}", fmt_coords(t), fmt_coords(b));
    }
    Ok(())
}

fn fmt_point(p: &CurvePoint) -> String {
    match p {
        CurvePoint::Infinity => "infinity".into(),
        CurvePoint::Affine { x, y } => format!("({}, {})", fmt_elem(x), fmt_elem(y)),
    }
}

fn curve_search(seed: u64, q: u64, m: u32, n: u64, budget: u64) -> Result<(), Error> {
    let k = Field::prime(q)?;
    let tower_seed = seed ^ u64::from(m).wrapping_mul(SEED_STRIDE);
    let field = if m <= 1 {
        k
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(tower_seed ^ 1);
        let modulus = random_irreducible(&k, m as usize, &mut rng);
        println!("modulus: {}", fmt_poly(&modulus));
        Field::extension(&k, &modulus)?
    };
    let (curve, point) = find_curve_with_point_of_order(&field, n, tower_seed ^ 2, budget)?;
    println!("curve: y^2 = x^3 + {} x + {} over GF({q}^{m})", fmt_elem(&curve.a), fmt_elem(&curve.b));
    println!("point: {} (order {n})", fmt_point(&point));
    println!("curve order: {}", curve_order(&curve)?);
    Ok(())
}

fn fmt_poly(p: &UPoly) -> String {
    let parts: Vec<String> = p.coeffs.iter().map(fmt_elem).collect();
    format!("[{}]", parts.join(", "))
}

fn zeta_check(
    q: u64,
    n: u64,
    counts: Option<&[u128]>,
    hyperelliptic: Option<&[u64]>,
    genus: Option<usize>,
) -> Result<(), Error> {
    let chi = match (counts, hyperelliptic) {
        (Some(counts), None) => {
            let genus = genus.unwrap_or(counts.len());
            char_poly_from_counts(counts, q, genus)?
        }
        (None, Some(coeffs)) => {
            let k = Field::prime(q)?;
            let f = UPoly::from_u64s(&k, coeffs);
            let deg = f.degree().ok_or(Error::BadFile("zero branch polynomial".into()))?;
            let genus = genus.unwrap_or((deg - 1) / 2);
            let model = CurveModel::hyperelliptic(&k, f, genus)?;
            let counts: Vec<u128> =
                (1..=genus).map(|i| count_points(&model, i)).collect::<Result<_, _>>()?;
            char_poly_from_counts(&counts, q, genus)?
        }
        _ => {
            return Err(Error::BadFile(
                "exactly one of --counts and --hyperelliptic is required".into(),
            ))
        }
    };
    let report = feasibility(&chi, n)?;
    let text = serde_json::to_string_pretty(&report).map_err(|e| Error::BadFile(e.to_string()))?;
    println!("{text}");
    Ok(())
}
