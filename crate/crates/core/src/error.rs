//! Error taxonomy shared by every module in the crate.

use thiserror::Error;

/// Errors surfaced by field construction, decomposition building and the
/// curve machinery.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Attempt to invert or divide by the zero element.
    #[error("division by zero")]
    DivisionByZero,
    /// Two elements from different field handles were combined.
    #[error("field mismatch: {0}")]
    FieldMismatch(&'static str),
    /// The requested modulus is not prime (or not a supported prime).
    #[error("{0} is not a prime below 2^61")]
    NotPrime(u64),
    /// A polynomial argument that must be nonzero was zero.
    #[error("zero polynomial")]
    ZeroPolynomial,
    /// A modulus that must be irreducible failed the irreducibility test.
    #[error("reducible modulus of degree {0}")]
    ReducibleModulus(usize),
    /// The element does not generate a normal basis.
    #[error("element is not normal")]
    NotNormal,
    /// Group algebra operands of different lengths.
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    /// The element has no inverse under cyclic convolution.
    #[error("not invertible in the group algebra")]
    NotInvertible,
    /// Points from different curves were combined.
    #[error("curve mismatch")]
    CurveMismatch,
    /// Field too large for the point-count or order routine.
    #[error("field of size ~2^{0} exceeds the supported bound")]
    FieldTooLarge(u32),
    /// Characteristic 2 or 3 requested where short Weierstrass is assumed.
    #[error("unsupported characteristic {0}")]
    UnsupportedCharacteristic(u64),
    /// No group order in the Hasse interval is divisible by the target.
    #[error("no multiple of {n} in the Hasse interval for q^{m}")]
    HasseInfeasible { n: u64, m: u32 },
    /// Search budget exhausted without a witness.
    #[error("search exhausted after {0} trials")]
    NotFound(u64),
    /// The supplied point does not generate a subgroup of the stated order.
    #[error("kernel generator does not have order {0}")]
    BadKernelOrder(u64),
    /// Point selection could not satisfy a stated constraint.
    #[error("point selection failed: {0}")]
    SelectionFailed(&'static str),
    /// A function-space or evaluation-map matrix was singular.
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(&'static str),
    /// Evaluation of a section at a point where it is undefined.
    #[error("singular evaluation at a point of the support")]
    SingularEvaluation,
    /// A freshly built decomposition failed re-verification.
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    /// Every extension degree up to the cap was tried without success.
    #[error("pipeline exhausted at m_max = {0}")]
    PipelineExhausted(u32),
    /// The extension degree shares a factor with the characteristic.
    #[error("target degree {0} is divisible by the characteristic")]
    NotCoprime(u64),
    /// Point counting over an extension that exceeds the enumeration guard.
    #[error("q^{0} exceeds the point-count guard")]
    TooLarge(u32),
    /// Newton recursion produced a non-integral coefficient.
    #[error("inconsistent point counts at index {0}")]
    InconsistentCounts(usize),
    /// Exact rank search exceeded its bound without finding a witness.
    #[error("no decomposition with at most {0} terms")]
    Exceeded(usize),
    /// Serialized decomposition did not match the expected schema.
    #[error("bad decomposition file: {0}")]
    BadFile(String),
    /// Operation restricted to prime base fields.
    #[error("operation supports prime base fields only")]
    PrimeFieldOnly,
}

pub type Result<T> = std::result::Result<T, Error>;
