use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model `{id}`: {reason}")]
    InvalidModel { id: String, reason: String },
    #[error("duplicate model id `{0}`")]
    DuplicateModelId(String),
    #[error("model set must contain at least one model")]
    EmptyModelSet,
    #[error("two-model sets require utility(low) < utility(high), got {low} >= {high}")]
    ModelOrder { low: f64, high: f64 },
    #[error("invalid price {price} for model `{id}`")]
    InvalidPrice { id: String, price: f64 },
    #[error("no price for model `{0}` in schedule")]
    SchedulePriceMissing(String),
    #[error("ambiguity must lie strictly inside (0, 1), got {0}")]
    InvalidAmbiguity(f64),
    #[error("invalid ambiguity distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid quadrature config: {0}")]
    InvalidQuadrature(String),
    #[error("non-finite integrand value {value} at node {index} (eps = {eps})")]
    NonFinite { index: usize, eps: f64, value: f64 },
    #[error("no sign change on [{lo}, {hi}]: g(lo) = {g_lo}, g(hi) = {g_hi}")]
    NoBracket {
        lo: f64,
        hi: f64,
        g_lo: f64,
        g_hi: f64,
    },
    #[error("zero price for model `{0}` makes demand unbounded")]
    UnboundedDemand(String),
    #[error("model `{0}` can never be preferred at this ambiguity")]
    NoPreferenceBound(String),
    #[error("invalid configuration: {0}")]
    ConfigError(String),
    #[error("cost-based pricing needs positive costs, model `{0}` has zero cost")]
    DegenerateCostBase(String),
}
