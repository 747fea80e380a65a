//! Spectral moments of marginals of random graph states.
//!
//! A graph with `n = 2m` subsystems, `m` maximally entangled bonds and one
//! Haar unitary per vertex induces a random pure state. Tracing out a subset
//! of subsystems gives a random density matrix whose moments are computed
//! here in two ways:
//!
//! * exactly at finite `N`, by a Weingarten sum ([`moments::exact_moment`]);
//! * to leading order in `N`, via a max-flow problem on an associated
//!   network and an enumeration of non-crossing partitions
//!   ([`moments::asymptotic_moment`]).
//!
//! The [`spectra`] module collects the limit laws (free Poisson,
//! Fuss-Catalan and their products) and [`montecarlo`] samples the ensemble
//! directly so that both engines can be checked numerically.

pub mod combinatorics;
pub mod error;
pub mod families;
pub mod flow;
pub mod graph;
mod linalg;
pub mod moments;
pub mod montecarlo;
pub mod rational;
pub mod spectra;
pub mod weingarten;

pub use combinatorics::{ConstraintPoset, NcPartition, Permutation, Pin};
pub use error::{Error, Result};
pub use flow::{FlowNetwork, MaxFlowResult};
pub use graph::{GraphSpec, MarginalSpec, MarginalViews, VertexType};
pub use moments::{Budgets, Classification, DistributionId, MinimizerSet, MomentReport};
pub use montecarlo::{EstimateConfig, EstimateReport, SamplingMode};
pub use rational::Rational;
pub use spectra::{DensityFn, MomentSequence};
