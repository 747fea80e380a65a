//! Moment engines and limit-law identification.
//!
//! * [`asymptotic`]: leading order in `N` by minimizing `F_β` over tuples of
//!   non-crossing partitions.
//! * [`exact`]: the full Weingarten sum at fixed `N`.
//! * [`closed_form`]: predictions for one-unitary, star and cycle marginals.
//! * [`classify`]: moment matching against the known limit laws.

pub mod asymptotic;
pub mod classify;
pub mod closed_form;
pub mod exact;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::combinatorics::ConstraintPoset;
use crate::rational::{self, Rational};

pub use asymptotic::{asymptotic_moment, asymptotic_moments, f_beta, minimizer_set, MinimizerSet};
pub use classify::{classify, classify_sequence, Classification, ClassifyOptions};
pub use closed_form::{
    cycle_marginal, one_unitary_marginal, star_marginal, CyclePrediction, OneUnitaryCase, OneUnitaryPrediction,
    StarPrediction,
};
pub use exact::{exact_moment, exact_moment_gaussian};

/// Enumeration limits shared by the engines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    /// Maximum number of NC tuples the minimizer search may visit.
    pub tuples: u128,
    /// Maximum number of terms the exact engine may evaluate.
    pub terms: u128,
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            tuples: 5_000_000,
            terms: 10_000_000,
        }
    }
}

/// Leading term `coefficient · N^{exponent}` of `E tr ρ_S^p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentReport {
    pub p: usize,
    /// `−X(p−1)`.
    pub exponent: i64,
    #[serde(with = "rational::serde_string")]
    pub coefficient: Rational,
}

impl MomentReport {
    /// `coefficient · N^{exponent}` as a float.
    pub fn evaluate(&self, n: f64) -> f64 {
        rational::to_f64(&self.coefficient) * n.powi(self.exponent as i32)
    }
}

/// Limit laws recognized by the classifier and the closed-form theorems.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistributionId {
    /// `ρ_S` is (asymptotically) `I/D` on its full space, `D = factor · N^exponent`.
    MaximallyMixed {
        #[serde(with = "rational::serde_string")]
        factor: Rational,
        exponent: u64,
    },
    /// The rescaled spectrum concentrates at 1 (a normalized projector).
    Dirac,
    /// Marchenko–Pastur law with parameter `c`.
    FreePoisson {
        #[serde(with = "rational::serde_string")]
        c: Rational,
    },
    FussCatalan { s: usize },
    /// Classical multiplicative convolution of the factors.
    ClassicalProduct { factors: Vec<DistributionId> },
    /// Moments count order-preserving `NC(p)`-labellings of a poset.
    PosetLaw { poset: ConstraintPoset },
    Unknown {
        #[serde(with = "rational::serde_string_vec")]
        moments: Vec<Rational>,
    },
}

impl fmt::Display for DistributionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistributionId::MaximallyMixed { factor, exponent } => {
                write!(f, "maximally mixed (dim {}·N^{exponent})", rational::format(factor))
            }
            DistributionId::Dirac => write!(f, "Dirac"),
            DistributionId::FreePoisson { c } => write!(f, "free Poisson(c={})", rational::format(c)),
            DistributionId::FussCatalan { s } => write!(f, "Fuss-Catalan(s={s})"),
            DistributionId::ClassicalProduct { factors } => {
                let parts: Vec<String> = factors.iter().map(ToString::to_string).collect();
                write!(f, "{}", parts.join(" x "))
            }
            DistributionId::PosetLaw { poset } => write!(f, "poset law {:?}", poset.relations()),
            DistributionId::Unknown { .. } => write!(f, "unknown"),
        }
    }
}
