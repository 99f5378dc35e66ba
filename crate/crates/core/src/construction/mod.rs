//! Rank-two decompositions from quotients of elliptic curves.
//!
//! Given a curve `Y` with a rational point `t` of order n and the quotient
//! isogeny `rho: Y -> X = Y/<t>`, evaluation of small function spaces on
//! `Y` at the fiber over a closed point `a` and at the two rational orbits
//! over the origin and over a point `u` turns multiplication in the n-th
//! degree extension (or in a product of component fields when the fiber
//! over `a` splits) into two convolution terms.  The stages are:
//!
//! 1. [`select_points`]: pick `a` (target inertia), `u` (nonzero image of
//!    a rational point) and `v` (pole divisor), subject to the dual-kernel
//!    conditions that make both evaluation maps isomorphisms.
//! 2. [`riemann_roch_basis`]: explicit bases of the function spaces with
//!    poles bounded by the fiber over `v` (multiplicity 1 and 2), plus the
//!    matrix of the translation action; the multiplicity-1 basis is
//!    reorganized into the translation orbit of a free generator.
//! 3. [`evaluation_maps`]: the four value matrices (residue and orbit
//!    evaluations of both bases), with invertibility checks.
//! 4. [`build_decomposition`]: two tops read off the generator's orbit
//!    values, two bots obtained by interpolating indicator vectors,
//!    verified against reference field arithmetic before returning.
//! 5. [`pipeline`]: the full search over scalar extensions, combining the
//!    curve search, the construction and descent back to the prime field.

mod basis;
mod build;
mod pipeline;
mod select;

pub use basis::{riemann_roch_basis, CurveFunction, FunctionSpaceBasis};
pub use build::{build_decomposition, evaluation_maps, EvaluationMaps, ResidueContext};
pub use pipeline::{pipeline, PipelineOutput, REFERENCE_SEED};
pub use select::select_points;

use crate::elliptic::velu::{velu_quotient, Isogeny};
use crate::elliptic::{order::point_order, CurvePoint, EllipticCurve};
use crate::error::{Error, Result};
use crate::field::Field;

/// A cyclic quotient `rho: Y -> X` with kernel generated by the rational
/// point `t` of order `n`, `gcd(n, char) = 1`.
#[derive(Clone, Debug)]
pub struct EllipticCover {
    pub rho: Isogeny,
    pub t: CurvePoint,
    pub n: usize,
}

impl EllipticCover {
    /// Quotient of `y_curve` by the subgroup generated by `t`.
    pub fn new(y_curve: &EllipticCurve, t: &CurvePoint) -> Result<Self> {
        let n = point_order(y_curve, t)?;
        if n < 2 {
            return Err(Error::BadKernelOrder(n as u64));
        }
        if n % y_curve.field.char() as u128 == 0 {
            return Err(Error::BadKernelOrder(n as u64));
        }
        let rho = velu_quotient(y_curve, t)?;
        Ok(EllipticCover { rho, t: t.clone(), n: n as usize })
    }

    pub fn field(&self) -> &Field {
        &self.rho.domain.field
    }

    pub fn domain(&self) -> &EllipticCurve {
        &self.rho.domain
    }

    pub fn codomain(&self) -> &EllipticCurve {
        &self.rho.codomain
    }
}

/// The three selected points of the construction, all rational.
///
/// Invariants established by [`select_points`] and assumed downstream:
/// `u` is nonzero in the image of the rational points of the cover and
/// `p_u` is a rational preimage; neither `v - a` nor `u - 2v` lies in the
/// dual-isogeny kernel; `v` avoids the origin, `u`, `-u` and `a`, and
/// `2v` is nonzero so the fibers over `v` and `-v` stay disjoint.
#[derive(Clone, Debug)]
pub struct ConstructionPoints {
    pub a: CurvePoint,
    pub u: CurvePoint,
    pub v: CurvePoint,
    pub p_u: CurvePoint,
}
