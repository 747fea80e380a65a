//! Limit laws of three marginal families that are known in closed form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{int, Rational};

use super::{Classification, DistributionId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OneUnitaryCase {
    /// `|S| < |T'| + |G|`.
    I,
    /// `|S| = |T'| + |G|`.
    II,
    /// `|S| > |T'| + |G|`.
    III,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneUnitaryPrediction {
    pub case: OneUnitaryCase,
    pub limit: Classification,
}

/// Marginal whose kept set `S` lies in a single vertex block `b`: `T'` are
/// the traced subsystems of `b` and `G` the subsystems of `b` bonded to
/// other vertices.
pub fn one_unitary_marginal(
    s: usize,
    t_prime: usize,
    g: usize,
    d_s: u64,
    d_t: u64,
    d_g: u64,
) -> Result<OneUnitaryPrediction> {
    if s == 0 {
        return Err(Error::InvalidParameter("S must be nonempty".into()));
    }
    if d_s == 0 || d_t == 0 || d_g == 0 {
        return Err(Error::InvalidParameter("dimension factors must be positive".into()));
    }
    let other = t_prime + g;
    let support = int((d_t * d_g) as i64);
    let (case, limit) = if s < other {
        (
            OneUnitaryCase::I,
            Classification {
                law: DistributionId::MaximallyMixed {
                    factor: int(d_s as i64),
                    exponent: s as u64,
                },
                flow: s as u64,
                scale: int(d_s as i64),
            },
        )
    } else if s == other {
        let c = Rational::new((d_t * d_g).into(), d_s.into());
        (
            OneUnitaryCase::II,
            Classification {
                law: DistributionId::FreePoisson { c },
                flow: s as u64,
                scale: support,
            },
        )
    } else {
        (
            OneUnitaryCase::III,
            Classification {
                law: DistributionId::MaximallyMixed {
                    factor: support.clone(),
                    exponent: other as u64,
                },
                flow: other as u64,
                scale: support,
            },
        )
    };
    Ok(OneUnitaryPrediction { case, limit })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StarPrediction {
    pub limit: Classification,
    /// True when the law holds at every `N`, not only asymptotically.
    pub exact: bool,
}

impl StarPrediction {
    /// Leading purity `m_2 · N^{−X}`.
    pub fn purity(&self, n: f64) -> f64 {
        self.limit.purity(n)
    }

    pub fn entropy(&self, n: f64) -> f64 {
        self.limit.entropy(n)
    }
}

/// Marginal of the `m`-star keeping `s` satellites and `t` central subsystems.
pub fn star_marginal(m: usize, s: usize, t: usize) -> Result<StarPrediction> {
    if m == 0 || s > m || t > m {
        return Err(Error::InvalidParameter(format!("star parameters out of range: m={m}, s={s}, t={t}")));
    }
    let plain = |law: DistributionId, x: usize| Classification {
        law,
        flow: x as u64,
        scale: int(1),
    };
    let prediction = if s == 0 || t == 0 {
        StarPrediction {
            limit: plain(
                DistributionId::MaximallyMixed {
                    factor: int(1),
                    exponent: (s + t) as u64,
                },
                s + t,
            ),
            exact: true,
        }
    } else if s + t < m {
        StarPrediction {
            limit: plain(DistributionId::Dirac, s + t),
            exact: false,
        }
    } else if s + t > m {
        StarPrediction {
            limit: plain(DistributionId::Dirac, 2 * m - s - t),
            exact: false,
        }
    } else {
        StarPrediction {
            limit: plain(DistributionId::FreePoisson { c: int(1) }, m),
            exact: false,
        }
    };
    Ok(prediction)
}

/// Vertex classes on a cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CycleVertex {
    /// Nothing traced.
    S,
    /// Exactly one of the two subsystems traced.
    R,
    /// Both traced.
    T,
}

pub fn parse_cycle_types(types: &str) -> Result<Vec<CycleVertex>> {
    types
        .chars()
        .map(|c| match c.to_ascii_uppercase() {
            'S' => Ok(CycleVertex::S),
            'R' => Ok(CycleVertex::R),
            'T' => Ok(CycleVertex::T),
            other => Err(Error::InvalidParameter(format!("unknown cycle vertex type '{other}'"))),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CyclePrediction {
    pub limit: Classification,
    pub r_count: usize,
    /// Number of type `R` vertices on each `T R…R S` arc, including empty ones.
    pub arcs: Vec<usize>,
}

/// Limit law of a cycle marginal given its vertex types in cyclic order.
///
/// A `T R…R S` arc is a pair of consecutive non-`R` vertices of types `T`
/// and `S` (in either order) together with the `R` vertices between them;
/// adjacent `T`/`S` pairs form arcs with no `R` vertex. The leading moment
/// exponent is `k_R + |A|` and each arc of length `a` contributes a
/// `FC(a)` factor. With no `S` or `T` vertex at all the limit is free
/// Poisson over all `m` vertices.
pub fn cycle_marginal(types: &str) -> Result<CyclePrediction> {
    let verts = parse_cycle_types(types)?;
    let m = verts.len();
    if m < 2 {
        return Err(Error::InvalidParameter("a cycle needs at least two vertices".into()));
    }
    let r_count = verts.iter().filter(|&&v| v == CycleVertex::R).count();
    let anchors: Vec<usize> = (0..m).filter(|&i| verts[i] != CycleVertex::R).collect();
    if anchors.is_empty() {
        return Ok(CyclePrediction {
            limit: Classification {
                law: DistributionId::FreePoisson { c: int(1) },
                flow: m as u64,
                scale: int(1),
            },
            r_count,
            arcs: Vec::new(),
        });
    }
    let mut arcs = Vec::new();
    if anchors.len() > 1 {
        for (idx, &a) in anchors.iter().enumerate() {
            let b = anchors[(idx + 1) % anchors.len()];
            if verts[a] != verts[b] {
                let gap = (b + m - a) % m - 1;
                arcs.push(gap);
            }
        }
    }
    let flow = (r_count + arcs.len()) as u64;
    let mut factors: Vec<usize> = arcs.iter().copied().filter(|&a| a > 0).collect();
    factors.sort_unstable_by(|a, b| b.cmp(a));
    let kept: usize = verts
        .iter()
        .map(|v| match v {
            CycleVertex::S => 2,
            CycleVertex::R => 1,
            CycleVertex::T => 0,
        })
        .sum();
    let law = match factors.len() {
        0 if flow == kept as u64 => DistributionId::MaximallyMixed {
            factor: int(1),
            exponent: flow,
        },
        0 => DistributionId::Dirac,
        1 => fc_law(factors[0]),
        _ => DistributionId::ClassicalProduct {
            factors: factors.into_iter().map(fc_law).collect(),
        },
    };
    Ok(CyclePrediction {
        limit: Classification {
            law,
            flow,
            scale: int(1),
        },
        r_count,
        arcs,
    })
}

fn fc_law(s: usize) -> DistributionId {
    if s == 1 {
        DistributionId::FreePoisson { c: int(1) }
    } else {
        DistributionId::FussCatalan { s }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn one_unitary_cases() {
        let p = one_unitary_marginal(1, 1, 0, 1, 1, 1).unwrap();
        assert_eq!(p.case, OneUnitaryCase::II);
        assert_eq!(p.limit.law, DistributionId::FreePoisson { c: int(1) });
        let p = one_unitary_marginal(2, 1, 0, 1, 1, 1).unwrap();
        assert_eq!(p.case, OneUnitaryCase::III);
        assert_eq!(p.limit.flow, 1);
        assert_eq!(
            p.limit.law,
            DistributionId::MaximallyMixed {
                factor: int(1),
                exponent: 1
            }
        );
        let p = one_unitary_marginal(2, 1, 1, 3, 2, 1).unwrap();
        assert_eq!(p.limit.law, DistributionId::FreePoisson { c: ratio(2, 3) });
        let p = one_unitary_marginal(1, 2, 1, 2, 1, 1).unwrap();
        assert_eq!(p.case, OneUnitaryCase::I);
        assert!(one_unitary_marginal(0, 1, 1, 1, 1, 1).is_err());
    }

    #[test]
    fn star_branches() {
        let p = star_marginal(2, 1, 1).unwrap();
        assert_eq!(p.limit.law, DistributionId::FreePoisson { c: int(1) });
        assert!((p.purity(16.0) - 2.0 / 256.0).abs() < 1e-15);
        assert!((p.entropy(16.0) - (2.0 * 16f64.ln() - 0.5)).abs() < 1e-12);
        let p = star_marginal(2, 0, 2).unwrap();
        assert!(p.exact);
        assert!((p.purity(4.0) - 1.0 / 16.0).abs() < 1e-15);
        let p = star_marginal(2, 1, 2).unwrap();
        assert_eq!(p.limit.law, DistributionId::Dirac);
        assert_eq!(p.limit.flow, 1);
        let p = star_marginal(3, 1, 1).unwrap();
        assert_eq!((p.limit.law.clone(), p.limit.flow), (DistributionId::Dirac, 2));
        assert!(star_marginal(2, 3, 0).is_err());
    }

    #[test]
    fn cycle_arcs() {
        let tsrr = cycle_marginal("TSRR").unwrap();
        assert_eq!(tsrr.limit.flow, 4);
        assert_eq!(tsrr.limit.law, DistributionId::FussCatalan { s: 2 });
        let trs = cycle_marginal("TRS").unwrap();
        assert_eq!(trs.limit.flow, 3);
        assert_eq!(trs.limit.law, DistributionId::FreePoisson { c: int(1) });
        let all_r = cycle_marginal("RRRR").unwrap();
        assert_eq!(all_r.limit.flow, 4);
        assert_eq!(all_r.limit.law, DistributionId::FreePoisson { c: int(1) });
        let prod = cycle_marginal("TRRSRT").unwrap();
        assert_eq!(prod.arcs, vec![2, 1]);
        assert_eq!(
            prod.limit.law,
            DistributionId::ClassicalProduct {
                factors: vec![DistributionId::FussCatalan { s: 2 }, DistributionId::FreePoisson { c: int(1) }]
            }
        );
        assert!((tsrr.limit.entropy(10.0) - (4.0 * 10f64.ln() - 5.0 / 6.0)).abs() < 1e-12);
        assert!(cycle_marginal("S").is_err());
        assert!(cycle_marginal("TXS").is_err());
    }

    #[test]
    fn cycle_without_arcs() {
        let ts = cycle_marginal("TS").unwrap();
        assert_eq!(ts.limit.flow, 2);
        assert!(matches!(ts.limit.law, DistributionId::MaximallyMixed { .. }));
        let tr = cycle_marginal("TRT").unwrap();
        assert_eq!(tr.limit.flow, 1);
        assert!(matches!(tr.limit.law, DistributionId::MaximallyMixed { .. }));
        let sr = cycle_marginal("SRS").unwrap();
        assert_eq!(sr.limit.flow, 1);
        assert_eq!(sr.limit.law, DistributionId::Dirac);
    }
}
