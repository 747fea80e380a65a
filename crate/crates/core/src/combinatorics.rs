//! Permutations, the lattice of non-crossing partitions and the counting
//! functions built on it.
//!
//! Throughout, `γ = (1 2 … p)` is the fixed full cycle. Subsets of `[p]` are
//! 1-based in the public API; permutations are stored 0-based.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest order for which [`enumerate_nc`] will build `NC(p)` by default.
pub const DEFAULT_NC_CAP: usize = 10;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn identity(p: usize) -> Self {
        Self { map: (0..p).collect() }
    }

    /// The full cycle `γ = (1 2 … p)`.
    pub fn full_cycle(p: usize) -> Self {
        Self {
            map: (0..p).map(|i| (i + 1) % p.max(1)).collect(),
        }
    }

    /// Builds a permutation from its one-line notation on `{1..p}`.
    pub fn from_one_line(image: &[usize]) -> Result<Self> {
        let p = image.len();
        let mut seen = vec![false; p];
        let mut map = Vec::with_capacity(p);
        for &x in image {
            if x == 0 || x > p || seen[x - 1] {
                return Err(Error::InvalidPartition(format!("{image:?} is not a permutation")));
            }
            seen[x - 1] = true;
            map.push(x - 1);
        }
        Ok(Self { map })
    }

    /// Builds a permutation from disjoint 1-based cycles; unlisted points are fixed.
    pub fn from_cycles(p: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut map: Vec<usize> = (0..p).collect();
        let mut seen = vec![false; p];
        for cycle in cycles {
            for (i, &x) in cycle.iter().enumerate() {
                if x == 0 || x > p || seen[x - 1] {
                    return Err(Error::InvalidPartition(format!("bad cycle {cycle:?}")));
                }
                seen[x - 1] = true;
                map[x - 1] = cycle[(i + 1) % cycle.len()] - 1;
            }
        }
        Ok(Self { map })
    }

    pub(crate) fn from_map_unchecked(map: Vec<usize>) -> Self {
        Self { map }
    }

    pub fn order(&self) -> usize {
        self.map.len()
    }

    /// Image of the 0-based point `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn one_line(&self) -> Vec<usize> {
        self.map.iter().map(|&x| x + 1).collect()
    }

    /// `self ∘ other`, i.e. `x ↦ self(other(x))`.
    pub fn compose(&self, other: &Self) -> Self {
        debug_assert_eq!(self.order(), other.order());
        Self {
            map: other.map.iter().map(|&x| self.map[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut map = vec![0; self.map.len()];
        for (i, &x) in self.map.iter().enumerate() {
            map[x] = i;
        }
        Self { map }
    }

    /// Number of cycles `#σ`.
    pub fn cycle_count(&self) -> usize {
        cycle_count(&self.map)
    }

    /// Length `|σ| = p − #σ`, the minimal number of transpositions.
    pub fn length(&self) -> usize {
        self.order() - self.cycle_count()
    }

    /// Cycles as 1-based lists, each starting at its smallest element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let p = self.order();
        let mut seen = vec![false; p];
        let mut out = Vec::new();
        for start in 0..p {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                cycle.push(j + 1);
                j = self.map[j];
            }
            out.push(cycle);
        }
        out
    }

    /// Cycle lengths in non-increasing order (the conjugacy class).
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }

    /// The partition `[σ]` whose blocks are the cycles of `σ`.
    pub fn cycle_partition(&self) -> NcOrNot {
        let blocks = self.cycles();
        let partition = SetPartition::new(self.order(), blocks);
        if partition.is_noncrossing() {
            NcOrNot::Nc(NcPartition { inner: partition })
        } else {
            NcOrNot::Crossing(partition)
        }
    }

    /// True when `|σ| + |σ⁻¹γ| = p − 1`.
    pub fn is_geodesic(&self) -> bool {
        let p = self.order();
        if p == 0 {
            return true;
        }
        let gamma = Self::full_cycle(p);
        self.length() + self.inverse().compose(&gamma).length() == p - 1
    }

    /// Every permutation of `{1..p}` in lexicographic order of one-line notation.
    pub fn all(p: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut current: Vec<usize> = (0..p).collect();
        loop {
            out.push(Self { map: current.clone() });
            // next lexicographic permutation
            let Some(i) = (1..p).rev().find(|&i| current[i - 1] < current[i]) else {
                break;
            };
            let j = (i..p).rev().find(|&j| current[j] > current[i - 1]).unwrap();
            current.swap(i - 1, j);
            current[i..].reverse();
        }
        out
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.cycles() {
            let s: Vec<String> = c.iter().map(ToString::to_string).collect();
            write!(f, "({})", s.join(" "))?;
        }
        Ok(())
    }
}

pub(crate) fn cycle_count(map: &[usize]) -> usize {
    let mut seen = 0u64;
    let mut big_seen;
    let p = map.len();
    let mut count = 0;
    if p <= 64 {
        for start in 0..p {
            if seen & (1 << start) != 0 {
                continue;
            }
            count += 1;
            let mut j = start;
            while seen & (1 << j) == 0 {
                seen |= 1 << j;
                j = map[j];
            }
        }
    } else {
        big_seen = vec![false; p];
        for start in 0..p {
            if big_seen[start] {
                continue;
            }
            count += 1;
            let mut j = start;
            while !big_seen[j] {
                big_seen[j] = true;
                j = map[j];
            }
        }
    }
    count
}

/// Result of taking the cycle partition of an arbitrary permutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NcOrNot {
    Nc(NcPartition),
    Crossing(SetPartition),
}

/// A set partition of `{1..p}` in canonical form: blocks sorted internally
/// and ordered by their smallest element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SetPartition {
    p: usize,
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    fn new(p: usize, mut blocks: Vec<Vec<usize>>) -> Self {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.retain(|b| !b.is_empty());
        blocks.sort_unstable_by_key(|b| b[0]);
        Self { p, blocks }
    }

    pub fn from_blocks(p: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; p];
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &x in b {
                if x == 0 || x > p || seen[x - 1] {
                    return Err(Error::InvalidPartition(format!("bad element {x} for p={p}")));
                }
                seen[x - 1] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidPartition(format!("blocks do not cover [1..{p}]")));
        }
        Ok(Self::new(p, blocks))
    }

    pub fn order(&self) -> usize {
        self.p
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_noncrossing(&self) -> bool {
        let label = self.labels();
        // a < b < c < d with a,c in X and b,d in Y != X
        let p = self.p;
        for a in 0..p {
            for b in a + 1..p {
                if label[b] == label[a] {
                    continue;
                }
                for c in b + 1..p {
                    if label[c] != label[a] {
                        continue;
                    }
                    if (c + 1..p).any(|d| label[d] == label[b]) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Block index of every element (0-based elements).
    pub fn labels(&self) -> Vec<usize> {
        let mut label = vec![0; self.p];
        for (i, b) in self.blocks.iter().enumerate() {
            for &x in b {
                label[x - 1] = i;
            }
        }
        label
    }

    /// Refinement order: every block of `self` lies inside a block of `other`.
    pub fn leq(&self, other: &Self) -> Result<bool> {
        if self.p != other.p {
            return Err(Error::OrderMismatch(self.p, other.p));
        }
        let label = other.labels();
        Ok(self
            .blocks
            .iter()
            .all(|b| b.iter().all(|&x| label[x - 1] == label[b[0] - 1])))
    }

    /// Every set partition of `{1..p}` (Bell-number many).
    pub fn all(p: usize) -> Vec<SetPartition> {
        fn rec(i: usize, p: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<SetPartition>) {
            if i > p {
                out.push(SetPartition::new(p, blocks.clone()));
                return;
            }
            for b in 0..blocks.len() {
                blocks[b].push(i);
                rec(i + 1, p, blocks, out);
                blocks[b].pop();
            }
            blocks.push(vec![i]);
            rec(i + 1, p, blocks, out);
            blocks.pop();
        }
        let mut out = Vec::new();
        rec(1, p, &mut Vec::new(), &mut out);
        out
    }
}

/// An element of the lattice `NC(p)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NcPartition {
    inner: SetPartition,
}

impl fmt::Debug for NcPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .inner
            .blocks
            .iter()
            .map(|b| {
                let s: Vec<String> = b.iter().map(ToString::to_string).collect();
                format!("{{{}}}", s.join(","))
            })
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl NcPartition {
    pub fn from_blocks(p: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let inner = SetPartition::from_blocks(p, blocks)?;
        if !inner.is_noncrossing() {
            return Err(Error::InvalidPartition(format!("{:?} is crossing", inner.blocks)));
        }
        Ok(Self { inner })
    }

    /// `0̂_p`, all singletons.
    pub fn finest(p: usize) -> Self {
        Self {
            inner: SetPartition::new(p, (1..=p).map(|i| vec![i]).collect()),
        }
    }

    /// `1̂_p`, a single block.
    pub fn coarsest(p: usize) -> Self {
        Self {
            inner: SetPartition::new(p, vec![(1..=p).collect()]),
        }
    }

    pub fn order(&self) -> usize {
        self.inner.p
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.inner.blocks
    }

    pub fn block_count(&self) -> usize {
        self.inner.blocks.len()
    }

    pub fn as_set_partition(&self) -> &SetPartition {
        &self.inner
    }

    pub fn leq(&self, other: &Self) -> Result<bool> {
        self.inner.leq(&other.inner)
    }

    /// The geodesic permutation with cycle partition `self`: each block is
    /// traversed increasingly, which is the cyclic order induced by `γ`.
    pub fn to_geodesic(&self) -> Permutation {
        let mut map: Vec<usize> = (0..self.order()).collect();
        for b in &self.inner.blocks {
            for (i, &x) in b.iter().enumerate() {
                map[x - 1] = b[(i + 1) % b.len()] - 1;
            }
        }
        Permutation { map }
    }

    /// Kreweras complement, computed as the cycle partition of `σ⁻¹γ`
    /// where `σ` is the geodesic permutation of `self`.
    pub fn kreweras(&self) -> NcPartition {
        let p = self.order();
        let sigma = self.to_geodesic();
        let k = sigma.inverse().compose(&Permutation::full_cycle(p));
        match k.cycle_partition() {
            NcOrNot::Nc(nc) => nc,
            NcOrNot::Crossing(_) => unreachable!("σ⁻¹γ is geodesic for geodesic σ"),
        }
    }
}

/// `nc_to_geodesic` under its operational name.
pub fn nc_to_geodesic(pi: &NcPartition) -> Permutation {
    pi.to_geodesic()
}

pub fn leq(a: &NcPartition, b: &NcPartition) -> Result<bool> {
    a.leq(b)
}

pub fn kreweras(pi: &NcPartition) -> NcPartition {
    pi.kreweras()
}

type NcCache = RwLock<HashMap<usize, Arc<Vec<NcPartition>>>>;

fn nc_cache() -> &'static NcCache {
    static CACHE: OnceLock<NcCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// All of `NC(p)` for `1 ≤ p ≤ DEFAULT_NC_CAP`, memoized.
pub fn enumerate_nc(p: usize) -> Result<Arc<Vec<NcPartition>>> {
    enumerate_nc_capped(p, DEFAULT_NC_CAP)
}

pub fn enumerate_nc_capped(p: usize, cap: usize) -> Result<Arc<Vec<NcPartition>>> {
    if p == 0 || p > cap {
        return Err(Error::OrderTooLarge { p, cap });
    }
    if let Some(hit) = nc_cache().read().unwrap().get(&p) {
        return Ok(hit.clone());
    }
    let mut list: Vec<NcPartition> = nc_on_interval(1, p)
        .into_iter()
        .map(|blocks| NcPartition {
            inner: SetPartition::new(p, blocks),
        })
        .collect();
    list.sort();
    let list = Arc::new(list);
    nc_cache().write().unwrap().insert(p, list.clone());
    Ok(list)
}

/// Non-crossing partitions of the interval `{start..start+len-1}`, built by
/// choosing the block of the first element and filling each gap
/// independently.
fn nc_on_interval(start: usize, len: usize) -> Vec<Vec<Vec<usize>>> {
    if len == 0 {
        return vec![Vec::new()];
    }
    let rest: Vec<usize> = (start + 1..start + len).collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << rest.len()) {
        let mut block = vec![start];
        block.extend(rest.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &x)| x));
        // gaps between consecutive members of the block, and after the last one
        let mut gaps = Vec::new();
        for w in block.windows(2) {
            gaps.push((w[0] + 1, w[1] - w[0] - 1));
        }
        let last = *block.last().unwrap();
        gaps.push((last + 1, start + len - 1 - last));
        let mut partial: Vec<Vec<Vec<usize>>> = vec![vec![block.clone()]];
        for (gs, gl) in gaps {
            let fills = nc_on_interval(gs, gl);
            let mut next = Vec::with_capacity(partial.len() * fills.len());
            for base in &partial {
                for fill in &fills {
                    let mut combined = base.clone();
                    combined.extend(fill.iter().cloned());
                    next.push(combined);
                }
            }
            partial = next;
        }
        out.extend(partial);
    }
    out
}

/// Möbius function on the symmetric group: multiplicative over cycles, a
/// cycle of length `d` contributing `(−1)^{d−1} c_{d−1}`.
pub fn mobius(sigma: &Permutation) -> BigInt {
    sigma.cycles().iter().fold(BigInt::one(), |acc, c| {
        let d = c.len();
        let cat = BigInt::from(catalan(d - 1));
        if d % 2 == 0 {
            acc * -cat
        } else {
            acc * cat
        }
    })
}

pub fn catalan(i: usize) -> BigUint {
    fuss_catalan(1, i)
}

/// `FC^{(s)}_p = binom((s+1)p, p) / (sp + 1)`; `FC^{(0)}_p = 1`.
pub fn fuss_catalan(s: usize, p: usize) -> BigUint {
    let top = BigUint::from((s + 1) * p);
    let b: BigUint = binomial(top, BigUint::from(p));
    b / BigUint::from(s * p + 1)
}

/// Dense `leq` table over `NC(p)` in the order of [`enumerate_nc`].
pub(crate) fn leq_table(list: &[NcPartition]) -> Vec<Vec<bool>> {
    list.iter()
        .map(|a| list.iter().map(|b| a.leq(b).unwrap()).collect())
        .collect()
}

/// Number of multichains `σ_1 ≤ … ≤ σ_s` in `NC(p)`, by dynamic programming
/// over the lattice.
pub fn count_chains(s: usize, p: usize) -> Result<BigUint> {
    if s == 0 {
        return Ok(BigUint::one());
    }
    let list = enumerate_nc(p)?;
    let table = leq_table(&list);
    let mut ways: Vec<BigUint> = vec![BigUint::one(); list.len()];
    for _ in 1..s {
        ways = (0..list.len())
            .map(|top| {
                (0..list.len())
                    .filter(|&below| table[below][top])
                    .map(|below| ways[below].clone())
                    .sum()
            })
            .collect();
    }
    Ok(ways.into_iter().sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pin {
    /// Pinned to `0̂_p` (the identity permutation).
    Bottom,
    /// Pinned to `1̂_p` (the full cycle `γ`).
    Top,
}

/// Nodes `0..k` labelled by elements of `NC(p)`, subject to `a ≺ b`
/// meaning `label(a) ≤ label(b)` and optional pins.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConstraintPoset {
    nodes: usize,
    relations: Vec<(usize, usize)>,
    pins: Vec<(usize, Pin)>,
}

impl ConstraintPoset {
    pub fn new(nodes: usize, relations: Vec<(usize, usize)>, pins: Vec<(usize, Pin)>) -> Result<Self> {
        for &(a, b) in &relations {
            if a >= nodes || b >= nodes {
                return Err(Error::InvalidParameter(format!("relation ({a},{b}) out of range")));
            }
        }
        for &(a, _) in &pins {
            if a >= nodes {
                return Err(Error::InvalidParameter(format!("pin on node {a} out of range")));
            }
        }
        let poset = Self { nodes, relations, pins };
        poset.topological_order()?;
        poset.check_pins()?;
        Ok(poset)
    }

    /// `0 ≺ 1 ≺ … ≺ s−1`.
    pub fn chain(s: usize) -> Self {
        Self::new(s, (1..s).map(|i| (i - 1, i)).collect(), Vec::new()).unwrap()
    }

    /// Disjoint union; node indices of `other` are shifted past `self`.
    pub fn disjoint_union(&self, other: &Self) -> Self {
        let shift = self.nodes;
        let mut relations = self.relations.clone();
        relations.extend(other.relations.iter().map(|&(a, b)| (a + shift, b + shift)));
        let mut pins = self.pins.clone();
        pins.extend(other.pins.iter().map(|&(a, pin)| (a + shift, pin)));
        Self {
            nodes: self.nodes + other.nodes,
            relations,
            pins,
        }
    }

    /// The poset `0 ≺ 1`, `0 ≺ 2` of the three-vertex exotic marginal.
    pub fn exotic() -> Self {
        Self::new(3, vec![(0, 1), (0, 2)], Vec::new()).unwrap()
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn relations(&self) -> &[(usize, usize)] {
        &self.relations
    }

    pub fn pins(&self) -> &[(usize, Pin)] {
        &self.pins
    }

    fn topological_order(&self) -> Result<Vec<usize>> {
        let mut indegree = vec![0usize; self.nodes];
        for &(_, b) in &self.relations {
            indegree[b] += 1;
        }
        let mut ready: Vec<usize> = (0..self.nodes).filter(|&i| indegree[i] == 0).rev().collect();
        let mut order = Vec::with_capacity(self.nodes);
        while let Some(v) = ready.pop() {
            order.push(v);
            for &(a, b) in &self.relations {
                if a == v {
                    indegree[b] -= 1;
                    if indegree[b] == 0 {
                        ready.push(b);
                    }
                }
            }
        }
        if order.len() < self.nodes {
            let stuck = (0..self.nodes).find(|&i| indegree[i] > 0).unwrap();
            return Err(Error::CyclicPoset(stuck));
        }
        Ok(order)
    }

    fn check_pins(&self) -> Result<()> {
        // a node pinned to the top must not lie below a node pinned to the bottom
        for &(top, pin) in &self.pins {
            if pin != Pin::Top {
                continue;
            }
            let mut stack = vec![top];
            let mut seen = vec![false; self.nodes];
            while let Some(v) = stack.pop() {
                if seen[v] {
                    continue;
                }
                seen[v] = true;
                if self.pins.iter().any(|&(n, pn)| n == v && pn == Pin::Bottom) {
                    return Err(Error::InconsistentPins(top, v));
                }
                stack.extend(self.relations.iter().filter(|r| r.0 == v).map(|r| r.1));
            }
        }
        Ok(())
    }
}

/// Number of `NC(p)`-labellings of the poset nodes respecting every relation and pin.
pub fn count_poset_tuples(poset: &ConstraintPoset, p: usize) -> Result<BigUint> {
    let list = enumerate_nc(p)?;
    let table = leq_table(&list);
    let bottom = list.iter().position(|x| *x == NcPartition::finest(p)).unwrap();
    let top = list.iter().position(|x| *x == NcPartition::coarsest(p)).unwrap();
    let order = poset.topological_order()?;
    let mut allowed: Vec<Vec<usize>> = vec![(0..list.len()).collect(); poset.nodes];
    for &(node, pin) in &poset.pins {
        let fixed = match pin {
            Pin::Bottom => bottom,
            Pin::Top => top,
        };
        allowed[node].retain(|&x| x == fixed);
    }
    let mut labels = vec![usize::MAX; poset.nodes];
    let mut count = BigUint::zero();
    fn rec(
        depth: usize,
        order: &[usize],
        poset: &ConstraintPoset,
        allowed: &[Vec<usize>],
        table: &[Vec<bool>],
        labels: &mut [usize],
        count: &mut BigUint,
    ) {
        if depth == order.len() {
            *count += 1u32;
            return;
        }
        let v = order[depth];
        'label: for &x in &allowed[v] {
            for &(a, b) in &poset.relations {
                // predecessors come earlier in topological order
                if b == v && !table[labels[a]][x] {
                    continue 'label;
                }
            }
            labels[v] = x;
            rec(depth + 1, order, poset, allowed, table, labels, count);
        }
        labels[v] = usize::MAX;
    }
    rec(0, &order, poset, &allowed, &table, &mut labels, &mut count);
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nc(p: usize, blocks: &[&[usize]]) -> NcPartition {
        NcPartition::from_blocks(p, blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }

    #[test]
    fn nc_counts_small() {
        assert_eq!(enumerate_nc(1).unwrap().len(), 1);
        // brute force: filter all set partitions
        for p in 1..=7 {
            let brute: Vec<SetPartition> = SetPartition::all(p).into_iter().filter(|x| x.is_noncrossing()).collect();
            let fast = enumerate_nc(p).unwrap();
            assert_eq!(fast.len(), brute.len(), "p={p}");
            let mut a: Vec<_> = fast.iter().map(|x| x.as_set_partition().clone()).collect();
            let mut b = brute;
            a.sort();
            b.sort();
            assert_eq!(a, b);
        }
        assert_eq!(enumerate_nc(3).unwrap().len(), 5);
        let four = enumerate_nc(4).unwrap();
        assert_eq!(four.len(), 14);
        let crossing = SetPartition::from_blocks(4, vec![vec![1, 3], vec![2, 4]]).unwrap();
        assert!(!crossing.is_noncrossing());
        assert!(four.iter().all(|x| *x.as_set_partition() != crossing));
        assert_eq!(SetPartition::all(4).len(), 15);
    }

    #[test]
    fn nc_cap() {
        assert!(matches!(enumerate_nc(11), Err(Error::OrderTooLarge { .. })));
        assert!(enumerate_nc(0).is_err());
    }

    #[test]
    fn leq_examples() {
        let p = 4;
        let zero = NcPartition::finest(p);
        for x in enumerate_nc(p).unwrap().iter() {
            assert!(zero.leq(x).unwrap());
            assert!(x.leq(&NcPartition::coarsest(p)).unwrap());
        }
        let a = nc(4, &[&[1], &[3], &[2, 4]]);
        let b = nc(4, &[&[1, 3], &[2], &[4]]);
        assert!(!a.leq(&b).unwrap());
        assert!(!b.leq(&a).unwrap());
        assert!(nc(3, &[&[1, 2], &[3]]).leq(&NcPartition::coarsest(3)).unwrap());
        assert!(matches!(a.leq(&NcPartition::finest(3)), Err(Error::OrderMismatch(4, 3))));
    }

    #[test]
    fn geodesic_conversion() {
        for p in 1..=6 {
            let gamma = Permutation::full_cycle(p);
            assert_eq!(NcPartition::finest(p).to_geodesic(), Permutation::identity(p));
            assert_eq!(NcPartition::coarsest(p).to_geodesic(), gamma);
        }
        let sigma = nc(4, &[&[1, 3], &[2], &[4]]).to_geodesic();
        assert_eq!(sigma, Permutation::from_cycles(4, &[&[1, 3]]).unwrap());
        let gamma = Permutation::full_cycle(4);
        assert_eq!(gamma.compose(&sigma.inverse()).length() + sigma.length(), 3);
    }

    #[test]
    fn geodesics_are_exactly_nc() {
        for p in 1..=6 {
            let geodesic = Permutation::all(p).into_iter().filter(Permutation::is_geodesic).count();
            assert_eq!(geodesic, enumerate_nc(p).unwrap().len());
        }
    }

    #[test]
    fn mobius_values() {
        assert_eq!(mobius(&Permutation::identity(3)), BigInt::from(1));
        assert_eq!(mobius(&Permutation::from_cycles(2, &[&[1, 2]]).unwrap()), BigInt::from(-1));
        assert_eq!(mobius(&Permutation::full_cycle(3)), BigInt::from(2));
        assert_eq!(mobius(&Permutation::full_cycle(4)), BigInt::from(-5));
        let two_swaps = Permutation::from_cycles(4, &[&[1, 2], &[3, 4]]).unwrap();
        assert_eq!(mobius(&two_swaps), BigInt::from(1));
    }

    #[test]
    fn catalan_and_fuss_catalan() {
        let cats = [1u32, 1, 2, 5, 14, 42, 132, 429, 1430];
        for (i, &c) in cats.iter().enumerate() {
            assert_eq!(catalan(i), BigUint::from(c));
        }
        for p in 1..=8 {
            assert_eq!(fuss_catalan(1, p), catalan(p));
            assert_eq!(fuss_catalan(0, p), BigUint::one());
        }
        assert_eq!(fuss_catalan(2, 2), BigUint::from(3u32));
        assert_eq!(fuss_catalan(2, 3), BigUint::from(12u32));
        assert_eq!(fuss_catalan(2, 4), BigUint::from(55u32));
        for s in 0..6 {
            assert_eq!(fuss_catalan(s, 1), BigUint::one());
        }
        // beyond 64 bits
        assert!(fuss_catalan(4, 40).bits() > 64);
    }

    #[test]
    fn chain_counts() {
        assert_eq!(count_chains(2, 2).unwrap(), BigUint::from(3u32));
        assert_eq!(count_chains(1, 3).unwrap(), BigUint::from(5u32));
        assert_eq!(count_chains(3, 1).unwrap(), BigUint::one());
    }

    #[test]
    fn poset_counts() {
        let exotic = ConstraintPoset::exotic();
        assert_eq!(count_poset_tuples(&exotic, 2).unwrap(), BigUint::from(5u32));
        assert_eq!(count_poset_tuples(&exotic, 3).unwrap(), BigUint::from(38u32));
        for s in 1..=3 {
            for p in 1..=4 {
                assert_eq!(count_poset_tuples(&ConstraintPoset::chain(s), p).unwrap(), fuss_catalan(s, p));
            }
        }
        let pinned = ConstraintPoset::new(3, vec![(0, 1), (1, 2)], vec![(0, Pin::Bottom), (2, Pin::Top)]).unwrap();
        assert_eq!(count_poset_tuples(&pinned, 4).unwrap(), BigUint::from(14u32));
    }

    #[test]
    fn poset_errors() {
        assert!(matches!(
            ConstraintPoset::new(2, vec![(0, 1), (1, 0)], vec![]),
            Err(Error::CyclicPoset(_))
        ));
        assert!(matches!(
            ConstraintPoset::new(2, vec![(0, 1)], vec![(0, Pin::Top), (1, Pin::Bottom)]),
            Err(Error::InconsistentPins(0, 1))
        ));
    }

    #[test]
    fn kreweras_examples() {
        for p in 1..=6 {
            assert_eq!(NcPartition::finest(p).kreweras(), NcPartition::coarsest(p));
            assert_eq!(NcPartition::coarsest(p).kreweras(), NcPartition::finest(p));
        }
        let k = NcPartition::finest(2).kreweras();
        assert_eq!(k, nc(2, &[&[1, 2]]));
        assert_eq!(NcPartition::finest(2).block_count() + k.block_count(), 3);
    }
}
