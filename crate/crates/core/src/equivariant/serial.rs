//! JSON persistence for decompositions over prime base fields.
//!
//! The document is versioned and the writer keeps a fixed key order, so a
//! decomposition produced from a fixed seed serializes to identical bytes
//! on every run.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::equivariant::{EquivariantDecomposition, NormalBasisContext};
use crate::field::poly::UPoly;
use crate::field::{Element, Field};
use crate::group_algebra::GroupAlgebraElement;

pub const FORMAT_VERSION: u32 = 1;

/// Wire format; field order is the canonical key order.
#[derive(Serialize, Deserialize)]
struct DecompositionFile {
    version: u32,
    q: u64,
    n: usize,
    n1: usize,
    n2: usize,
    sigma: usize,
    modulus_poly: Vec<u64>,
    theta: Vec<u64>,
    tops: Vec<Vec<u64>>,
    bots: Vec<Vec<u64>>,
}

fn residues(els: &[Element]) -> Result<Vec<u64>> {
    els.iter()
        .map(|e| match e {
            Element::P(v) => Ok(*v),
            Element::E(_) => Err(Error::PrimeFieldOnly),
        })
        .collect()
}

/// Serializes a decomposition with the tower it was built for.
pub fn to_json(dec: &EquivariantDecomposition, ctx: &NormalBasisContext) -> Result<String> {
    if !dec.field.is_prime_field() {
        return Err(Error::PrimeFieldOnly);
    }
    if dec.field != ctx.k || dec.n != ctx.l.ext_degree() {
        return Err(Error::FieldMismatch("decomposition vs context"));
    }
    if ctx.delta != 1 {
        return Err(Error::BadFile("twisted contexts are not serialized".into()));
    }
    let q = dec.field.order_u128().expect("prime field") as u64;
    let modulus = ctx.l.modulus().ok_or(Error::PrimeFieldOnly)?;
    let file = DecompositionFile {
        version: FORMAT_VERSION,
        q,
        n: dec.n,
        n1: dec.n1,
        n2: dec.n2,
        sigma: dec.sigma(),
        modulus_poly: residues(&modulus.coeffs)?,
        theta: residues(ctx.theta.coords())?,
        tops: dec.tops.iter().map(|t| residues(&t.coords)).collect::<Result<_>>()?,
        bots: dec.bots.iter().map(|b| residues(&b.coords)).collect::<Result<_>>()?,
    };
    serde_json::to_string(&file).map_err(|e| Error::BadFile(e.to_string()))
}

/// Rebuilds a decomposition and its tower, re-validating every invariant
/// (prime q, irreducible modulus, normal theta, shape constraints).
pub fn from_json(text: &str) -> Result<(EquivariantDecomposition, NormalBasisContext)> {
    let file: DecompositionFile =
        serde_json::from_str(text).map_err(|e| Error::BadFile(e.to_string()))?;
    if file.version != FORMAT_VERSION {
        return Err(Error::BadFile(format!("unsupported version {}", file.version)));
    }
    let k = Field::prime(file.q)?;
    let lift = |vals: &[u64]| -> Vec<Element> {
        vals.iter().map(|&v| k.from_u64(v)).collect()
    };
    let modulus = UPoly::from_coeffs(&k, lift(&file.modulus_poly));
    if modulus.degree() != Some(file.n) {
        return Err(Error::BadFile("modulus degree does not match n".into()));
    }
    let l = Field::extension(&k, &modulus)?;
    if file.theta.len() != file.n {
        return Err(Error::BadFile("theta has wrong length".into()));
    }
    let theta = l.from_coords(&lift(&file.theta))?;
    let ctx = NormalBasisContext::new(&l, &theta, 1)?;
    if file.tops.len() != file.sigma || file.bots.len() != file.sigma {
        return Err(Error::BadFile("sigma does not match term count".into()));
    }
    let unpack = |rows: &[Vec<u64>]| -> Result<Vec<GroupAlgebraElement>> {
        rows.iter()
            .map(|r| {
                if r.len() != file.n {
                    return Err(Error::BadFile("term has wrong length".into()));
                }
                GroupAlgebraElement::new(&k, lift(r))
            })
            .collect()
    };
    let dec = EquivariantDecomposition::new(
        &k,
        file.n1,
        file.n2,
        unpack(&file.tops)?,
        unpack(&file.bots)?,
    )?;
    if dec.n != file.n {
        return Err(Error::BadFile("n1 * n2 does not match n".into()));
    }
    Ok((dec, ctx))
}
