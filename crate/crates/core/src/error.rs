use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported ring d = {0}; expected one of 0, 1, 2, 3, 7, 11")]
    UnsupportedRing(i64),

    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("element fixes infinity (c = 0), so it does not define a rational line")]
    NotRationalLine,

    #[error("element has no axis: {0}")]
    NoAxis(&'static str),

    #[error("the isometric spheres with |c| <= {c_max} leave {} uncovered point(s), first at {:?}", .uncovered.len(), .uncovered.first())]
    IncompleteComplex { c_max: f64, uncovered: Vec<(f64, f64)> },

    #[error("basin chain inconsistent at step {step}: {detail}")]
    InconsistentBasinChain { step: usize, detail: String },

    #[error("zero inner sum at k = {k} in the reconstruction formula")]
    DegenerateStep { k: usize },

    #[error("step {certified_prefix} cannot be certified at the input precision")]
    Uncertified { certified_prefix: usize },

    #[error("no hyperbolic element within the search bounds")]
    EmptySearch,

    #[error("(ell, theta) = ({ell}, {theta}) lies outside the reduced wedge after the implemented symmetries; a change of curve is required")]
    RequiresCurveChange { ell: f64, theta: f64 },

    #[error("tangent circle configuration outside t >= r + s > 0, r >= s")]
    OutOfLemmaDomain,

    #[error("group construction failed: {0}")]
    ConstructionFailure(String),
}

impl Error {
    pub(crate) fn parse(input: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            input: input.to_string(),
            reason: reason.into(),
        }
    }
}
