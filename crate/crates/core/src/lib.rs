//! Expected travel times and optimal trust for a walker guided by an
//! unreliable navigation device on a network.
//!
//! At every branch node a device points along some arc. The pointer is on a
//! shortest path with probability `p` (the reliability); the walker follows
//! it with probability `q` (the trust) and otherwise picks one of the other
//! arcs uniformly. The crate computes exact expected times by averaging over
//! every direction vector, closed forms for stars, trees and lines, optimal
//! trust policies, a Monte Carlo cross-check, and two pursuit games on the
//! three-node line.
//!
//! All solvers are generic over [`Scalar`] (`f32` or `f64`); the `*F64`
//! aliases below name the common double-precision instantiations.

pub mod closed_form;
pub mod error;
pub mod fixtures;
pub mod game;
pub mod hitting;
pub mod linalg;
pub mod netfile;
pub mod network;
pub mod optimizer;
pub mod pointer;
pub mod scalar;
pub mod simulate;

pub use error::{Error, Result};
pub use fixtures::Fixture;
pub use game::{GameMode, GameRegime, GameSolution};
pub use hitting::{ExactSolver, TimeProfile, TrustPolicy};
pub use netfile::{ArcDescription, NetworkDescription};
pub use network::{ArcId, Network, NodeId};
pub use optimizer::{OptimizationResult, TrustMode};
pub use pointer::{DirectionVector, WeightedDirectionSpace};
pub use scalar::Scalar;
pub use simulate::{SimulationConfig, SimulationSummary};

pub type NetworkF64 = Network<f64>;
pub type NetworkF32 = Network<f32>;
pub type TrustPolicyF64 = TrustPolicy<f64>;
pub type TimeProfileF64 = TimeProfile<f64>;
pub type ExactSolverF64<'a> = ExactSolver<'a, f64>;
pub type OptimizationResultF64 = OptimizationResult<f64>;
pub type GameSolutionF64 = GameSolution<f64>;
