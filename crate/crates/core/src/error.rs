use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid network: {0}")]
    Validation(String),

    #[error("could not parse network description: {0}")]
    Parse(String),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error(
        "direction space has {count} vectors, more than the enumeration cap of {cap}; \
         fall back to simulation"
    )]
    CapExceeded { count: u128, cap: u128 },

    /// Reachability analysis said the system was solvable but elimination
    /// hit a zero pivot.
    #[error("singular hitting-time system at node {node}")]
    SingularSystem { node: String },

    #[error("network is not a tree: {0}")]
    NotATree(String),

    #[error("trust policy has no value for branch degree {0}")]
    MissingTrust(usize),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("degenerate policy: {0}")]
    DegeneratePolicy(String),

    #[error("coordinate descent did not converge after {sweeps} sweeps")]
    NonConvergence { sweeps: usize },

    #[error("treasure hunt is only defined on the three-node line {{0, 1, 2 = H}}: {0}")]
    UnsupportedGameNetwork(String),
}
