use thiserror::Error;

/// Crate-wide error type.
///
/// Every fallible operation in the crate returns [`Result`].  The variants
/// are deliberately coarse: each one names a *mathematical* failure mode
/// (a hypothesis of some construction that did not hold for the given
/// input) rather than a location in the code.
#[derive(Debug, Error)]
pub enum Error {
    /// Ambient dimension outside the supported range (exact hulls are
    /// implemented for ambient dimension at most 4).
    #[error("ambient dimension {0} is unsupported (must be between 1 and 4)")]
    DimensionUnsupported(usize),

    /// An operation that needs a full-dimensional polytope received a
    /// lower-dimensional one, or vice versa.
    #[error("polytope is not full-dimensional (intrinsic {intrinsic} < ambient {ambient})")]
    NotFullDimensional { intrinsic: usize, ambient: usize },

    /// The point set handed to a hull construction was empty.
    #[error("empty point set")]
    EmptyPointSet,

    /// Mismatched vector or polytope dimensions inside a single call.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A halfspace description cut out an empty or unbounded region where a
    /// bounded polytope was required.
    #[error("halfspace system does not bound a nonempty polytope: {0}")]
    UnboundedOrEmpty(String),

    /// The fan data failed one of the structural checks (primitivity,
    /// standard-basis prefix, reflexivity, smoothness, vertex convexity
    /// or the anti-canonical degree inequality).
    #[error("fan validation failed: {0}")]
    InvalidFan(String),

    /// A divisor was required to be ample and is not.
    #[error("divisor is not ample: {0}")]
    NotAmple(String),

    /// A mixed subdivision violated the transversality condition
    /// dim(total) = sum of summand dimensions on some cell.
    #[error("mixed subdivision is not transverse: {0}")]
    NotTransverse(String),

    /// The support of a tropical polynomial does not span the declared
    /// Newton polytope.
    #[error("newton polytope mismatch: {0}")]
    NewtonPolytopeMismatch(String),

    /// The extracted curve fails the balancing condition at some vertex.
    #[error("curve is unbalanced at vertex {vertex}: defect {defect}")]
    Unbalanced { vertex: usize, defect: String },

    /// The clipped curve does not fit inside the target region for the
    /// requested shrink factor.
    #[error("curve does not fit inside the region (try a smaller shrink): {0}")]
    DoesNotFit(String),

    /// An unbounded edge, traced from its vertex, leaves the region through
    /// a facet other than the one its dual cell lies on.
    #[error("unbounded edge exits through the wrong facet: {0}")]
    WrongFacet(String),

    /// The positional terms of the edge contributions failed to cancel in
    /// the charge assembly.
    #[error("telescoping of edge positions failed to cancel: residual {0}")]
    TelescopeFailure(String),

    /// A product of two coefficients each carrying the Euler constant was
    /// requested; the symbolic coefficient domain only tracks degree <= 1.
    #[error("coefficient product would produce a gamma-squared term")]
    GammaSquare,

    /// The Euler-constant component of a series coefficient that must
    /// cancel identically did not.
    #[error("gamma component failed to cancel: {0}")]
    GammaResidue(String),

    /// A series operation received an argument with the wrong constant
    /// term (exp needs 0, log needs 1, map inversion needs unit factors).
    #[error("bad constant term for series operation: {0}")]
    BadConstantTerm(String),

    /// A series constant term that must vanish did not.
    #[error("obstruction term is nonzero: {0}")]
    NonzeroObstruction(String),

    /// A render request with no two-dimensional curve or amoeba data.
    #[error("nothing to render: {0}")]
    NothingToRender(String),

    /// A numerical root candidate failed the residual test (amoeba lab).
    #[error("residual too large in numerical solve: {0}")]
    ResidualTooLarge(f64),

    /// Bad run configuration.
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    /// A verification run completed but some checks failed.
    #[error("verification failed: {0}")]
    VerificationFailed(String),

    /// Underlying I/O problem (config or report files).
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed structured text (config or report files).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
