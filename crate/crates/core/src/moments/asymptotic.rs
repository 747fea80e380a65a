//! Leading-order moments from the minimizers of `F_β`.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::combinatorics::{enumerate_nc, NcPartition, Permutation};
use crate::error::{Error, Result};
use crate::flow::max_flow_value;
use crate::graph::{MarginalSpec, VertexType};
use crate::rational::{self, Rational};

use super::{Budgets, MomentReport};

/// Pair tables are precomputed up to this many entries.
const PAIR_TABLE_LIMIT: usize = 1 << 25;

/// `F_β = Σ_i |S_i||γ⁻¹β_i| + |T_i||β_i| + Σ_{i<j} |E_ij||β_i⁻¹β_j|` for
/// arbitrary permutations `β_i ∈ S_p`.
pub fn f_beta(m: &MarginalSpec, tuple: &[Permutation], p: usize) -> Result<u64> {
    let v = m.views();
    if tuple.len() != v.k() {
        return Err(Error::LengthMismatch(tuple.len(), v.k()));
    }
    if let Some(bad) = tuple.iter().find(|b| b.order() != p) {
        return Err(Error::OrderMismatch(bad.order(), p));
    }
    let gamma_inv = Permutation::full_cycle(p).inverse();
    let mut f = 0u64;
    for (b, beta) in v.blocks.iter().zip(tuple) {
        f += (b.kept.len() * gamma_inv.compose(beta).length() + b.traced.len() * beta.length()) as u64;
    }
    for c in &v.cross {
        f += (c.count * tuple[c.i].inverse().compose(&tuple[c.j]).length()) as u64;
    }
    Ok(f)
}

/// All pinned tuples of geodesic permutations with `F_β = X(p−1)`.
#[derive(Clone, Debug, Serialize)]
pub struct MinimizerSet {
    pub p: usize,
    /// Max-flow value `X`.
    pub flow: u64,
    #[serde(skip)]
    nc: Arc<Vec<NcPartition>>,
    /// Each tuple lists indices into `NC(p)` as ordered by [`enumerate_nc`].
    tuples: Vec<Vec<u16>>,
}

impl MinimizerSet {
    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn partitions(&self, i: usize) -> Vec<&NcPartition> {
        self.tuples[i].iter().map(|&a| &self.nc[a as usize]).collect()
    }

    pub fn permutations(&self, i: usize) -> Vec<Permutation> {
        self.tuples[i].iter().map(|&a| self.nc[a as usize].to_geodesic()).collect()
    }
}

struct Vertex {
    kept: u64,
    traced: u64,
    kept_dim: u64,
    traced_dim: u64,
    pin: Option<usize>,
}

struct Search {
    p: usize,
    nc: Arc<Vec<NcPartition>>,
    perms: Vec<Permutation>,
    /// `|β_a|` per NC index.
    len_id: Vec<u64>,
    pair_table: Option<Vec<u8>>,
    vertices: Vec<Vertex>,
    /// Free vertices in search order.
    free: Vec<usize>,
    /// Per vertex: `(neighbour, |E_ij|, d_{E_ij})`.
    neighbours: Vec<Vec<(usize, u64, u64)>>,
    weighted: bool,
}

struct Outcome {
    count: u64,
    weight: BigUint,
    below_target: Option<u64>,
    tuples: Vec<Vec<u16>>,
}

impl Outcome {
    fn empty() -> Self {
        Self {
            count: 0,
            weight: BigUint::zero(),
            below_target: None,
            tuples: Vec::new(),
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.count += other.count;
        self.weight += other.weight;
        self.below_target = match (self.below_target, other.below_target) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.tuples.extend(other.tuples);
        self
    }
}

impl Search {
    fn new(m: &MarginalSpec, p: usize, budgets: &Budgets) -> Result<Self> {
        let nc = enumerate_nc(p)?;
        let views = m.views();
        let bottom = nc.iter().position(|x| *x == NcPartition::finest(p)).unwrap();
        let top = nc.iter().position(|x| *x == NcPartition::coarsest(p)).unwrap();
        let vertices: Vec<Vertex> = views
            .blocks
            .iter()
            .map(|b| Vertex {
                kept: b.kept.len() as u64,
                traced: b.traced.len() as u64,
                kept_dim: b.kept_dim,
                traced_dim: b.traced_dim,
                pin: match b.vertex_type {
                    VertexType::Traced => Some(bottom),
                    VertexType::Kept => Some(top),
                    VertexType::Mixed => None,
                },
            })
            .collect();
        let k = vertices.len();
        let mut neighbours = vec![Vec::new(); k];
        for c in &views.cross {
            neighbours[c.i].push((c.j, c.count as u64, c.dim));
            neighbours[c.j].push((c.i, c.count as u64, c.dim));
        }
        let free = search_order(&vertices, &neighbours);
        let estimated = (nc.len() as u128).saturating_pow(free.len() as u32);
        if estimated > budgets.tuples {
            return Err(Error::BudgetExceeded {
                what: "NC tuples",
                estimated,
                budget: budgets.tuples,
            });
        }
        let perms: Vec<Permutation> = nc.iter().map(NcPartition::to_geodesic).collect();
        let len_id = perms.iter().map(|x| x.length() as u64).collect();
        let l = nc.len();
        let pair_table = (l * l <= PAIR_TABLE_LIMIT && !free.is_empty()).then(|| {
            let inverses: Vec<Permutation> = perms.iter().map(Permutation::inverse).collect();
            let mut table = vec![0u8; l * l];
            table.par_chunks_mut(l).enumerate().for_each(|(a, row)| {
                for (b, slot) in row.iter_mut().enumerate() {
                    *slot = inverses[a].compose(&perms[b]).length() as u8;
                }
            });
            table
        });
        let weighted = m.graph().dims().iter().any(|&d| d != 1);
        Ok(Self {
            p,
            nc,
            perms,
            len_id,
            pair_table,
            vertices,
            free,
            neighbours,
            weighted,
        })
    }

    fn pair(&self, a: usize, b: usize) -> u64 {
        match &self.pair_table {
            Some(t) => t[a * self.nc.len() + b] as u64,
            None => self.perms[a].inverse().compose(&self.perms[b]).length() as u64,
        }
    }

    /// Own cost of vertex `v` labelled `a`.
    fn own(&self, v: usize, a: usize) -> u64 {
        let vert = &self.vertices[v];
        let len = self.len_id[a];
        vert.kept * (self.p as u64 - 1 - len) + vert.traced * len
    }

    fn own_weight(&self, v: usize, a: usize) -> BigUint {
        let vert = &self.vertices[v];
        let len = self.len_id[a] as u32;
        let p = self.p as u32;
        BigUint::from(vert.kept_dim).pow(1 + len) * BigUint::from(vert.traced_dim).pow(p - len)
    }

    fn pair_weight(&self, dim: u64, len: u64) -> BigUint {
        BigUint::from(dim).pow(self.p as u32 - len as u32)
    }

    fn run(&self, target: u64, collect: bool, prune: bool) -> Outcome {
        let k = self.vertices.len();
        let mut labels = vec![usize::MAX; k];
        let mut base = 0u64;
        let mut base_weight = BigUint::one();
        for (v, vert) in self.vertices.iter().enumerate() {
            if let Some(a) = vert.pin {
                labels[v] = a;
                base += self.own(v, a);
                if self.weighted {
                    base_weight *= self.own_weight(v, a);
                }
            }
        }
        for (v, vert) in self.vertices.iter().enumerate() {
            for &(u, count, dim) in &self.neighbours[v] {
                if u > v && vert.pin.is_some() && self.vertices[u].pin.is_some() {
                    let len = self.pair(labels[v], labels[u]);
                    base += count * len;
                    if self.weighted {
                        base_weight *= self.pair_weight(dim, len);
                    }
                }
            }
        }
        if self.free.is_empty() {
            let mut out = Outcome::empty();
            self.leaf(base, target, &base_weight, &labels, collect, &mut out);
            return out;
        }
        let first = self.free[0];
        (0..self.nc.len())
            .into_par_iter()
            .map(|a| {
                let mut labels = labels.clone();
                let mut out = Outcome::empty();
                let (cost, weight) = self.assign(first, a, &labels, base, &base_weight);
                if !prune || cost <= target {
                    labels[first] = a;
                    self.descend(1, cost, &weight, &mut labels, target, collect, prune, &mut out);
                }
                out
            })
            .reduce(Outcome::empty, Outcome::merge)
    }

    /// Cost and weight after labelling free vertex `v` with `a`, given the
    /// labels already placed.
    fn assign(&self, v: usize, a: usize, labels: &[usize], cost: u64, weight: &BigUint) -> (u64, BigUint) {
        let mut cost = cost + self.own(v, a);
        let mut weight = if self.weighted {
            weight * self.own_weight(v, a)
        } else {
            BigUint::one()
        };
        for &(u, count, dim) in &self.neighbours[v] {
            if labels[u] != usize::MAX {
                let len = self.pair(labels[u], a);
                cost += count * len;
                if self.weighted {
                    weight *= self.pair_weight(dim, len);
                }
            }
        }
        (cost, weight)
    }

    #[allow(clippy::too_many_arguments)]
    fn descend(
        &self,
        depth: usize,
        cost: u64,
        weight: &BigUint,
        labels: &mut Vec<usize>,
        target: u64,
        collect: bool,
        prune: bool,
        out: &mut Outcome,
    ) {
        if depth == self.free.len() {
            self.leaf(cost, target, weight, labels, collect, out);
            return;
        }
        let v = self.free[depth];
        for a in 0..self.nc.len() {
            let (c, w) = self.assign(v, a, labels, cost, weight);
            if prune && c > target {
                continue;
            }
            labels[v] = a;
            self.descend(depth + 1, c, &w, labels, target, collect, prune, out);
            labels[v] = usize::MAX;
        }
    }

    fn leaf(&self, cost: u64, target: u64, weight: &BigUint, labels: &[usize], collect: bool, out: &mut Outcome) {
        if cost < target {
            out.below_target = Some(out.below_target.map_or(cost, |b| b.min(cost)));
        } else if cost == target {
            out.count += 1;
            if self.weighted {
                out.weight += weight;
            }
            if collect {
                out.tuples.push(labels.iter().map(|&a| a as u16).collect());
            }
        }
    }

    /// Minimum of `F_β` over the pinned set, without pruning.
    fn minimum(&self) -> u64 {
        let out = self.run(u64::MAX, false, false);
        out.below_target.unwrap_or(u64::MAX)
    }
}

/// Free vertices ordered so that each one, where possible, touches an
/// already placed vertex.
fn search_order(vertices: &[Vertex], neighbours: &[Vec<(usize, u64, u64)>]) -> Vec<usize> {
    let free: Vec<usize> = (0..vertices.len()).filter(|&v| vertices[v].pin.is_none()).collect();
    let mut placed = vec![false; vertices.len()];
    for (v, vert) in vertices.iter().enumerate() {
        placed[v] = vert.pin.is_some();
    }
    let mut order = Vec::with_capacity(free.len());
    while order.len() < free.len() {
        let next = free
            .iter()
            .copied()
            .filter(|&v| !order.contains(&v))
            .max_by_key(|&v| {
                let touching: u64 = neighbours[v].iter().filter(|n| placed[n.0]).map(|n| n.1).sum();
                (touching, std::cmp::Reverse(v))
            })
            .unwrap();
        placed[next] = true;
        order.push(next);
    }
    order
}

struct Found {
    flow: u64,
    count: u64,
    weight: BigUint,
    tuples: Vec<Vec<u16>>,
    nc: Arc<Vec<NcPartition>>,
    weighted: bool,
}

fn find(m: &MarginalSpec, p: usize, budgets: &Budgets, collect: bool) -> Result<Found> {
    if p == 0 {
        return Err(Error::InvalidParameter("moment order must be at least 1".into()));
    }
    let flow = max_flow_value(m);
    let target = flow * (p as u64 - 1);
    let search = Search::new(m, p, budgets)?;
    let out = search.run(target, collect, true);
    if let Some(found) = out.below_target {
        return Err(Error::FlowMismatch { found, expected: target });
    }
    if out.count == 0 {
        return Err(Error::FlowMismatch {
            found: search.minimum(),
            expected: target,
        });
    }
    let mut tuples = out.tuples;
    tuples.sort_unstable();
    Ok(Found {
        flow,
        count: out.count,
        weight: out.weight,
        tuples,
        nc: search.nc.clone(),
        weighted: search.weighted,
    })
}

pub fn minimizer_set(m: &MarginalSpec, p: usize) -> Result<MinimizerSet> {
    minimizer_set_with(m, p, &Budgets::default())
}

pub fn minimizer_set_with(m: &MarginalSpec, p: usize, budgets: &Budgets) -> Result<MinimizerSet> {
    let found = find(m, p, budgets, true)?;
    Ok(MinimizerSet {
        p,
        flow: found.flow,
        nc: found.nc,
        tuples: found.tuples,
    })
}

/// `d_[n]^{−p/2} · Π_i d_{E_ii}^p · Π_i d_{C_i}^{−p}`.
fn prefactor(m: &MarginalSpec, p: usize) -> Rational {
    let views = m.views();
    let p = p as i64;
    let mut numer = BigInt::one();
    let mut denom = num_traits::pow(BigInt::from(m.graph().half_total_dim()), p as usize);
    for b in &views.blocks {
        numer *= num_traits::pow(BigInt::from(b.loop_dim), p as usize);
        denom *= num_traits::pow(BigInt::from(b.block_dim), p as usize);
    }
    Rational::new(numer, denom)
}

pub fn asymptotic_moment(m: &MarginalSpec, p: usize) -> Result<MomentReport> {
    asymptotic_moment_with(m, p, &Budgets::default())
}

pub fn asymptotic_moment_with(m: &MarginalSpec, p: usize, budgets: &Budgets) -> Result<MomentReport> {
    let found = find(m, p, budgets, false)?;
    let sum = if found.weighted {
        found.weight
    } else {
        BigUint::from(found.count)
    };
    let coefficient = rational::from_biguint(&sum) * prefactor(m, p);
    Ok(MomentReport {
        p,
        exponent: -((found.flow * (p as u64 - 1)) as i64),
        coefficient,
    })
}

/// Reports for `p = 1..=p_max`.
pub fn asymptotic_moments(m: &MarginalSpec, p_max: usize, budgets: &Budgets) -> Result<Vec<MomentReport>> {
    (1..=p_max).map(|p| asymptotic_moment_with(m, p, budgets)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{catalan, fuss_catalan};
    use crate::families;
    use crate::rational::int;

    #[test]
    fn f_beta_extremes() {
        let m = families::pi2_template();
        let v = m.views();
        let k = v.k();
        let s: usize = v.blocks.iter().map(|b| b.kept.len()).sum();
        let t: usize = v.blocks.iter().map(|b| b.traced.len()).sum();
        for p in 1..=4 {
            let ids = vec![Permutation::identity(p); k];
            let gammas = vec![Permutation::full_cycle(p); k];
            assert_eq!(f_beta(&m, &ids, p).unwrap(), ((p - 1) * s) as u64);
            assert_eq!(f_beta(&m, &gammas, p).unwrap(), ((p - 1) * t) as u64);
        }
    }

    #[test]
    fn one_loop_p2() {
        let m = families::one_loop();
        assert_eq!(f_beta(&m, &[Permutation::identity(2)], 2).unwrap(), 1);
        assert_eq!(f_beta(&m, &[Permutation::full_cycle(2)], 2).unwrap(), 1);
        assert_eq!(minimizer_set(&m, 2).unwrap().len(), 2);
    }

    #[test]
    fn minimizer_counts() {
        let one = families::one_loop();
        for p in 1..=6 {
            assert_eq!(BigUint::from(minimizer_set(&one, p).unwrap().len()), catalan(p));
        }
        let pi2 = families::pi2_template();
        for p in 1..=5 {
            assert_eq!(BigUint::from(minimizer_set(&pi2, p).unwrap().len()), fuss_catalan(2, p));
        }
        let star = families::star(2, 1, 1).unwrap();
        for p in 1..=5 {
            let set = minimizer_set(&star, p).unwrap();
            assert_eq!(BigUint::from(set.len()), catalan(p));
        }
    }

    #[test]
    fn pins_hold() {
        let star = families::star(2, 1, 1).unwrap();
        let set = minimizer_set(&star, 3).unwrap();
        let types = star.views().types();
        for i in 0..set.len() {
            for (beta, t) in set.partitions(i).iter().zip(&types) {
                match t {
                    VertexType::Traced => assert_eq!(**beta, NcPartition::finest(3)),
                    VertexType::Kept => assert_eq!(**beta, NcPartition::coarsest(3)),
                    VertexType::Mixed => {}
                }
            }
        }
    }

    #[test]
    fn pi2_report() {
        let r = asymptotic_moment(&families::pi2_template(), 3).unwrap();
        assert_eq!(r.exponent, -6);
        assert_eq!(r.coefficient, int(12));
    }

    #[test]
    fn first_moment_is_one_with_dims() {
        let m = families::fc_template_with_dims(2, &[2, 3, 1]).unwrap();
        let r = asymptotic_moment(&m, 1).unwrap();
        assert_eq!((r.exponent, r.coefficient), (0, int(1)));
    }

    #[test]
    fn budget_guard() {
        let m = families::fc_template(4);
        let tight = Budgets { tuples: 10, terms: 10 };
        assert!(matches!(
            asymptotic_moment_with(&m, 3, &tight),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
