use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// The path loss model violates one of its invariants.
    #[error("invalid path loss model: {0}")]
    InvalidModel(String),

    /// Scenario parameters violate an invariant.
    #[error("invalid network parameters: {0}")]
    InvalidParams(String),

    /// `kappa * alpha_n == 2` makes a term of the moment expansion singular.
    #[error("singular moment term: kappa * alpha_{slope} = 2 (alpha = {alpha}, kappa = {kappa})")]
    Singular { slope: usize, alpha: f64, kappa: u32 },

    /// The last slope decays too slowly for the interference moment to exist.
    #[error("mu_{kappa} infinite: kappa * alpha_N = {product} <= 2")]
    Divergent { kappa: u32, product: f64 },

    /// Zero-forcing needs more antennas than users.
    #[error("zero-forcing requires M > K (M = {m}, K = {k})")]
    DegreesOfFreedom { m: usize, k: usize },

    /// No admissible point in a search grid.
    #[error("empty feasible grid: {0}")]
    EmptyGrid(String),

    /// Simulator configuration cannot be realized.
    #[error("simulator configuration: {0}")]
    Config(String),

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
