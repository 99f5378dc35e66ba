//! Symmetric bilinear decompositions of field multiplication that commute
//! with the Galois action.
//!
//! A decomposition holds `sigma` pairs `(t_i, b_i)` of group algebra
//! elements.  On normal-basis coordinate vectors it computes
//!
//! ```text
//! u * v = sum_i  b_i ⋆ ((t_i ⋆ u) ⋄ (t_i ⋆ v))
//! ```
//!
//! with exactly `3 sigma` convolutions and `sigma` componentwise products
//! per invocation.  Contexts ([`NormalBasisContext`], [`SemisimpleAlgebra`])
//! supply the reference multiplication against which decompositions are
//! verified.

pub mod context;
pub mod descent;
pub mod generic;
pub mod lagrange;
pub mod rank;
pub mod serial;
pub mod verify;

pub use context::{MulContext, NormalBasisContext, SemisimpleAlgebra};
pub use descent::descend_scalars;
pub use generic::{generic_decomposition, lift_identity_component, PureSymmetricTerm};
pub use lagrange::{lagrange_mu_decomposition, MuDecomposition};
pub use rank::exact_rank_small;
pub use verify::{verify_decomposition, VerifyOutcome};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::group_algebra::{diamond, Convolver, GroupAlgebraElement};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EquivariantDecomposition {
    /// Base field K (the coefficient field of all tops and bots).
    pub field: Field,
    pub n: usize,
    pub n1: usize,
    pub n2: usize,
    pub tops: Vec<GroupAlgebraElement>,
    pub bots: Vec<GroupAlgebraElement>,
}

/// Star and diamond counts observed during one `multiply` invocation.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct OpCounts {
    pub star: u64,
    pub diamond: u64,
}

impl EquivariantDecomposition {
    pub fn new(
        field: &Field,
        n1: usize,
        n2: usize,
        tops: Vec<GroupAlgebraElement>,
        bots: Vec<GroupAlgebraElement>,
    ) -> Result<Self> {
        let n = n1 * n2;
        if tops.len() != bots.len() {
            return Err(Error::SizeMismatch(tops.len(), bots.len()));
        }
        if tops.is_empty() {
            return Err(Error::SizeMismatch(0, 1));
        }
        for el in tops.iter().chain(&bots) {
            if el.field != *field {
                return Err(Error::FieldMismatch("decomposition coefficients"));
            }
            if el.n() != n {
                return Err(Error::SizeMismatch(el.n(), n));
            }
        }
        Ok(EquivariantDecomposition { field: field.clone(), n, n1, n2, tops, bots })
    }

    pub fn sigma(&self) -> usize {
        self.tops.len()
    }

    /// Cardinality of K, when it fits.
    pub fn q(&self) -> Option<u128> {
        self.field.order_u128()
    }

    /// Runtime with a cached convolution plan for repeated products.
    pub fn multiplier(&self) -> Multiplier<'_> {
        Multiplier { dec: self, conv: Convolver::new(&self.field, self.n) }
    }

    /// One-shot product of coordinate vectors.
    pub fn multiply(
        &self,
        u: &GroupAlgebraElement,
        v: &GroupAlgebraElement,
    ) -> Result<GroupAlgebraElement> {
        Ok(self.multiplier().multiply_counted(u, v)?.0)
    }
}

pub struct Multiplier<'a> {
    dec: &'a EquivariantDecomposition,
    conv: Convolver,
}

impl Multiplier<'_> {
    pub fn decomposition(&self) -> &EquivariantDecomposition {
        self.dec
    }

    pub fn multiply(
        &self,
        u: &GroupAlgebraElement,
        v: &GroupAlgebraElement,
    ) -> Result<GroupAlgebraElement> {
        Ok(self.multiply_counted(u, v)?.0)
    }

    /// Product together with the observed operation counts; the counter is
    /// local to the invocation, so concurrent callers never interfere.
    pub fn multiply_counted(
        &self,
        u: &GroupAlgebraElement,
        v: &GroupAlgebraElement,
    ) -> Result<(GroupAlgebraElement, OpCounts)> {
        let dec = self.dec;
        if u.n() != dec.n || v.n() != dec.n {
            return Err(Error::SizeMismatch(u.n(), dec.n));
        }
        let mut counts = OpCounts::default();
        let mut acc = GroupAlgebraElement::zero(&dec.field, dec.n);
        for (t, b) in dec.tops.iter().zip(&dec.bots) {
            let tu = self.conv.star(t, u)?;
            let tv = self.conv.star(t, v)?;
            counts.star += 2;
            let d = diamond(&tu, &tv)?;
            counts.diamond += 1;
            let term = self.conv.star(b, &d)?;
            counts.star += 1;
            acc = acc.add(&term)?;
        }
        Ok((acc, counts))
    }
}
