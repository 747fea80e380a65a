//! Identification of the limit law by moment matching.
//!
//! Leading coefficients `c_p` (of `N^{−X(p−1)}`) are compared with
//! `δ^{1−p} m_p(μ) / m_1(μ)` for candidate laws `μ` and an effective scale
//! `δ`, so that `δ N^X ρ_S` converges in moments to `μ` on a space of
//! dimension `δ N^X / m_1(μ)`. A candidate is accepted only if it matches at
//! every computed order.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{count_poset_tuples, fuss_catalan, ConstraintPoset};
use crate::error::Result;
use crate::flow::max_flow_value;
use crate::graph::MarginalSpec;
use crate::rational::{self, from_biguint, int, pow, Rational};
use crate::spectra::{law_entropy, law_moment};

use super::asymptotic::asymptotic_moment_with;
use super::{Budgets, DistributionId};

/// A limit law together with the scale at which it appears.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub law: DistributionId,
    /// Max-flow value `X`.
    pub flow: u64,
    /// `δ` in the effective dimension `δ N^X`.
    #[serde(with = "rational::serde_string")]
    pub scale: Rational,
}

impl Classification {
    /// Predicted leading coefficient of `E tr ρ^p`, when the law's moments are known.
    pub fn coefficient(&self, p: usize) -> Option<Rational> {
        let mp = law_moment(&self.law, p)?;
        let m1 = law_moment(&self.law, 1)?;
        Some(pow(&self.scale, 1 - p as i64) * mp / m1)
    }

    /// Leading-order purity `E tr ρ²`.
    pub fn purity(&self, n: f64) -> f64 {
        let c = self.coefficient(2).map_or(f64::NAN, |c| rational::to_f64(&c));
        c * n.powi(-(self.flow as i32))
    }

    /// Leading-order entropy `X ln N + ln δ + H(μ)/m_1(μ)`, natural log.
    pub fn entropy(&self, n: f64) -> f64 {
        let h = law_entropy(&self.law).unwrap_or(f64::NAN);
        let m1 = law_moment(&self.law, 1).map_or(f64::NAN, |m| rational::to_f64(&m));
        self.flow as f64 * n.ln() + rational::to_f64(&self.scale).ln() + h / m1
    }
}

#[derive(Clone, Debug, Default)]
pub struct ClassifyOptions {
    pub budgets: Budgets,
    /// Extra poset laws to try after the built-in families.
    pub posets: Vec<ConstraintPoset>,
}

pub fn classify(m: &MarginalSpec, p_max: usize) -> Result<Classification> {
    classify_with(m, p_max, &ClassifyOptions::default())
}

pub fn classify_with(m: &MarginalSpec, p_max: usize, options: &ClassifyOptions) -> Result<Classification> {
    let coefficients = (1..=p_max.max(1))
        .map(|p| asymptotic_moment_with(m, p, &options.budgets).map(|r| r.coefficient))
        .collect::<Result<Vec<_>>>()?;
    let kept = m.kept();
    let kept_dim = m.graph().product_dim(&kept);
    Ok(classify_sequence(
        &coefficients,
        max_flow_value(m),
        kept.len() as u64,
        kept_dim,
        &options.posets,
    ))
}

/// Classifies `c_1..c_P` for a marginal with max flow `flow` whose kept
/// space has dimension `kept_dim · N^{kept}`.
pub fn classify_sequence(
    coefficients: &[Rational],
    flow: u64,
    kept: u64,
    kept_dim: u64,
    posets: &[ConstraintPoset],
) -> Classification {
    let unknown = Classification {
        law: DistributionId::Unknown {
            moments: coefficients.to_vec(),
        },
        flow,
        scale: int(1),
    };
    let Some(c1) = coefficients.first() else {
        return unknown;
    };
    if !c1.is_one() || coefficients.iter().any(|c| !c.is_positive()) {
        return unknown;
    }
    let full_rank = flow == kept;
    let kept_dim = int(kept_dim as i64);
    let top = coefficients.len();
    let make = |law: DistributionId, scale: Rational| Classification { law, flow, scale };
    let matches = |unit_moments: &dyn Fn(usize) -> Rational, scale: &Rational| {
        (1..=top).all(|p| pow(scale, 1 - p as i64) * unit_moments(p) == coefficients[p - 1])
    };
    let scale_from = |m2: Rational| -> Rational {
        if top >= 2 {
            m2 / &coefficients[1]
        } else {
            int(1)
        }
    };

    // δ_1
    let delta = scale_from(int(1));
    if matches(&|_| int(1), &delta) {
        if full_rank && delta == kept_dim {
            return make(
                DistributionId::MaximallyMixed {
                    factor: kept_dim,
                    exponent: kept,
                },
                delta,
            );
        }
        return make(DistributionId::Dirac, delta);
    }

    if let Some(found) = match_free_poisson(coefficients, full_rank, &kept_dim) {
        return make(DistributionId::FreePoisson { c: found.0 }, found.1);
    }

    let fc = |s: usize| move |p: usize| from_biguint(&fuss_catalan(s, p));
    for s in 2..=FC_SEARCH_MAX {
        let delta = scale_from(int(s as i64 + 1));
        if matches(&fc(s), &delta) {
            return make(DistributionId::FussCatalan { s }, delta);
        }
    }

    for parts in fc_multisets() {
        let moments = |p: usize| {
            parts
                .iter()
                .fold(Rational::one(), |acc, &s| acc * from_biguint(&fuss_catalan(s, p)))
        };
        let delta = scale_from(moments(2));
        if matches(&moments, &delta) {
            let factors = parts
                .iter()
                .map(|&s| match s {
                    1 => DistributionId::FreePoisson { c: int(1) },
                    s => DistributionId::FussCatalan { s },
                })
                .collect();
            return make(DistributionId::ClassicalProduct { factors }, delta);
        }
    }

    let builtin = [ConstraintPoset::exotic()];
    for poset in builtin.iter().chain(posets) {
        let counts: Option<Vec<Rational>> = (1..=top)
            .map(|p| count_poset_tuples(poset, p).ok().map(|c| from_biguint(&c)))
            .collect();
        let Some(counts) = counts else { continue };
        if counts[0] != int(1) {
            continue;
        }
        let delta = scale_from(counts.get(1).cloned().unwrap_or_else(|| int(1)));
        if matches(&|p| counts[p - 1].clone(), &delta) {
            return make(DistributionId::PosetLaw { poset: poset.clone() }, delta);
        }
    }
    unknown
}

const FC_SEARCH_MAX: usize = 12;

/// Multisets of at least two orders `s ≥ 1` with `Σ s ≤ 12` and at most four parts,
/// in non-increasing order.
fn fc_multisets() -> Vec<Vec<usize>> {
    fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() >= 2 {
            out.push(cur.clone());
        }
        if cur.len() == 4 {
            return;
        }
        for s in (1..=rest.min(max)).rev() {
            cur.push(s);
            rec(rest - s, s, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(FC_SEARCH_MAX, FC_SEARCH_MAX, &mut Vec::new(), &mut out);
    out.sort_by_key(|parts| (parts.iter().sum::<usize>(), parts.len()));
    out
}

/// Solves for `(c, δ)` with `c_p = δ^{1−p} m_p(π_c)/c`. Using `c_2 δ = c + 1`
/// and `c_3 δ² = c² + 3c + 1` gives `(c_3 − c_2²) δ² − c_2 δ + 1 = 0`.
fn match_free_poisson(coefficients: &[Rational], full_rank: bool, kept_dim: &Rational) -> Option<(Rational, Rational)> {
    if coefficients.len() < 3 {
        return None;
    }
    let (c2, c3) = (&coefficients[1], &coefficients[2]);
    let a = c3 - c2 * c2;
    let mut roots = Vec::new();
    if a.is_zero() {
        roots.push(c2.recip());
    } else {
        let disc = c2 * c2 - int(4) * &a;
        let sq = rational::sqrt_exact(&disc)?;
        let two_a = int(2) * &a;
        roots.push((c2 + &sq) / &two_a);
        roots.push((c2 - &sq) / &two_a);
    }
    let mut valid: Vec<(Rational, Rational)> = roots
        .into_iter()
        .filter(|delta| delta.is_positive())
        .map(|delta| (c2 * &delta - int(1), delta))
        .filter(|(c, _)| c.is_positive())
        .filter(|(c, delta)| {
            (1..=coefficients.len()).all(|p| {
                let law = DistributionId::FreePoisson { c: c.clone() };
                let mp = law_moment(&law, p).unwrap();
                pow(delta, 1 - p as i64) * mp / c == coefficients[p - 1]
            })
        })
        .collect();
    valid.dedup();
    if valid.is_empty() {
        return None;
    }
    let preferred = if full_rank {
        valid.iter().position(|(c, delta)| &(delta / c) == kept_dim)
    } else {
        valid.iter().position(|(c, _)| *c >= int(1))
    };
    Some(valid.swap_remove(preferred.unwrap_or(0)))
}
