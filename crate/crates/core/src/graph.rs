//! Graphs, dimension factors and trace partitions.
//!
//! Subsystems are numbered `1..=n`. Every subsystem `i` carries a Hilbert
//! space of dimension `d_i · N`; bonds pair subsystems of equal `d` into
//! maximally entangled states and vertex blocks group the subsystems acted
//! on by one random unitary.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GraphSpec {
    dims: Vec<u64>,
    vertices: Vec<Vec<usize>>,
    bonds: Vec<(usize, usize)>,
}

/// Returns every invariant violation of the raw data, or an empty list.
pub fn validate(dims: &[u64], vertices: &[Vec<usize>], bonds: &[(usize, usize)]) -> Vec<String> {
    let n = dims.len();
    let mut problems = Vec::new();
    if n == 0 {
        problems.push("graph has no subsystems".to_string());
    }
    if n % 2 == 1 {
        problems.push(format!("odd subsystem count {n}"));
    }
    for (i, &d) in dims.iter().enumerate() {
        if d == 0 {
            problems.push(format!("subsystem {} has dimension factor 0", i + 1));
        }
    }

    let mut owner = vec![None; n];
    for (b, block) in vertices.iter().enumerate() {
        if block.is_empty() {
            problems.push(format!("vertex block {} is empty", b + 1));
        }
        for &x in block {
            if x == 0 || x > n {
                problems.push(format!("vertex block {} names unknown subsystem {x}", b + 1));
            } else if let Some(prev) = owner[x - 1] {
                problems.push(format!("subsystem {x} appears in vertex blocks {} and {}", prev + 1, b + 1));
            } else {
                owner[x - 1] = Some(b);
            }
        }
    }
    for (i, o) in owner.iter().enumerate() {
        if o.is_none() {
            problems.push(format!("subsystem {} is in no vertex block", i + 1));
        }
    }

    let mut partner = vec![None; n];
    for &(a, b) in bonds {
        let valid = |x: usize| x >= 1 && x <= n;
        if !valid(a) || !valid(b) {
            problems.push(format!("bond {{{a},{b}}} names an unknown subsystem"));
            continue;
        }
        if a == b {
            problems.push(format!("bond {{{a},{b}}} pairs a subsystem with itself"));
            continue;
        }
        for x in [a, b] {
            if partner[x - 1].is_some() {
                problems.push(format!("subsystem {x} is in more than one bond"));
            }
            partner[x - 1] = Some(a + b - x);
        }
        if dims[a - 1] != dims[b - 1] {
            problems.push(format!(
                "bond dimension mismatch on {{{a},{b}}}: d_{a}={} but d_{b}={}",
                dims[a - 1],
                dims[b - 1]
            ));
        }
    }
    for (i, p) in partner.iter().enumerate() {
        if p.is_none() {
            problems.push(format!("subsystem {} is in no bond", i + 1));
        }
    }
    if dims.iter().try_fold(1u64, |acc, &d| acc.checked_mul(d.max(1))).is_none() {
        problems.push("product of dimension factors overflows 64 bits".to_string());
    }
    problems
}

impl GraphSpec {
    /// Validates and canonicalizes: blocks sorted and ordered by smallest
    /// member, bonds stored as `(a, b)` with `a < b` and sorted.
    pub fn new(dims: Vec<u64>, vertices: Vec<Vec<usize>>, bonds: Vec<(usize, usize)>) -> Result<Self> {
        let problems = validate(&dims, &vertices, &bonds);
        if !problems.is_empty() {
            return Err(Error::InvalidGraph(problems));
        }
        let mut vertices = vertices;
        for b in &mut vertices {
            b.sort_unstable();
        }
        vertices.sort_unstable_by_key(|b| b[0]);
        let mut bonds: Vec<(usize, usize)> = bonds.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        bonds.sort_unstable();
        Ok(Self { dims, vertices, bonds })
    }

    /// All dimension factors equal to one.
    pub fn unit(vertices: Vec<Vec<usize>>, bonds: Vec<(usize, usize)>) -> Result<Self> {
        let n = vertices.iter().map(Vec::len).sum();
        Self::new(vec![1; n], vertices, bonds)
    }

    pub fn n(&self) -> usize {
        self.dims.len()
    }

    /// Number of bonds, `m = n/2`.
    pub fn m(&self) -> usize {
        self.bonds.len()
    }

    /// Number of vertex blocks.
    pub fn k(&self) -> usize {
        self.vertices.len()
    }

    pub fn dims(&self) -> &[u64] {
        &self.dims
    }

    pub fn dim(&self, subsystem: usize) -> u64 {
        self.dims[subsystem - 1]
    }

    pub fn vertices(&self) -> &[Vec<usize>] {
        &self.vertices
    }

    pub fn bonds(&self) -> &[(usize, usize)] {
        &self.bonds
    }

    /// Index of the vertex block containing `subsystem`.
    pub fn block_of(&self, subsystem: usize) -> usize {
        self.vertices
            .iter()
            .position(|b| b.contains(&subsystem))
            .expect("validated graph covers every subsystem")
    }

    pub fn partner(&self, subsystem: usize) -> usize {
        self.bonds
            .iter()
            .find_map(|&(a, b)| {
                if a == subsystem {
                    Some(b)
                } else if b == subsystem {
                    Some(a)
                } else {
                    None
                }
            })
            .expect("validated graph matches every subsystem")
    }

    /// `d_[n]^{1/2}`: the product of `d` over bonds.
    pub fn half_total_dim(&self) -> u64 {
        self.bonds.iter().map(|&(a, _)| self.dim(a)).product()
    }

    pub fn product_dim(&self, subsystems: &[usize]) -> u64 {
        subsystems.iter().map(|&x| self.dim(x)).product()
    }
}

/// Classification of a vertex block by how much of it is traced out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VertexType {
    /// Every subsystem traced.
    Traced,
    /// No subsystem traced.
    Kept,
    Mixed,
}

impl fmt::Display for VertexType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VertexType::Traced => "T",
            VertexType::Kept => "S",
            VertexType::Mixed => "mixed",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MarginalSpec {
    graph: GraphSpec,
    traced: Vec<usize>,
}

impl MarginalSpec {
    pub fn new(graph: GraphSpec, traced: &[usize]) -> Result<Self> {
        let n = graph.n();
        if let Some(&bad) = traced.iter().find(|&&x| x == 0 || x > n) {
            return Err(Error::TraceOutOfRange(bad, n));
        }
        let mut traced = traced.to_vec();
        traced.sort_unstable();
        traced.dedup();
        Ok(Self { graph, traced })
    }

    pub fn graph(&self) -> &GraphSpec {
        &self.graph
    }

    /// `T`, sorted.
    pub fn traced(&self) -> &[usize] {
        &self.traced
    }

    /// `S = [n] ∖ T`, sorted.
    pub fn kept(&self) -> Vec<usize> {
        (1..=self.graph.n()).filter(|x| self.traced.binary_search(x).is_err()).collect()
    }

    pub fn is_traced(&self, subsystem: usize) -> bool {
        self.traced.binary_search(&subsystem).is_ok()
    }

    /// The marginal with the roles of `S` and `T` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            graph: self.graph.clone(),
            traced: self.kept(),
        }
    }

    pub fn views(&self) -> MarginalViews {
        derive_marginal_views(self)
    }
}

/// Index sets of one vertex block `C_i` under a marginal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockView {
    pub subsystems: Vec<usize>,
    /// `S_i`.
    pub kept: Vec<usize>,
    /// `T_i`.
    pub traced: Vec<usize>,
    /// `E_ii`: both endpoints of every bond internal to the block.
    pub loop_nodes: Vec<usize>,
    /// Number of internal bonds.
    pub loops: usize,
    pub vertex_type: VertexType,
    pub block_dim: u64,
    pub kept_dim: u64,
    pub traced_dim: u64,
    /// Product of `d` over internal bonds, each counted once.
    pub loop_dim: u64,
}

/// Bonds between two distinct blocks `i < j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossView {
    pub i: usize,
    pub j: usize,
    /// `E_{i→j}`: subsystems of `C_i` bonded into `C_j`.
    pub from_i: Vec<usize>,
    /// `E_{j→i}`.
    pub from_j: Vec<usize>,
    /// `|E_ij|`, the number of bonds.
    pub count: usize,
    /// `d_{E_ij}`, the product of `d` over these bonds.
    pub dim: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarginalViews {
    pub blocks: Vec<BlockView>,
    /// Nonempty cross sets, ordered by `(i, j)`.
    pub cross: Vec<CrossView>,
}

impl MarginalViews {
    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn cross_between(&self, i: usize, j: usize) -> Option<&CrossView> {
        let (i, j) = (i.min(j), i.max(j));
        self.cross.iter().find(|c| c.i == i && c.j == j)
    }

    /// `E_{i→j}` for `i ≠ j`, or the loop nodes for `i = j`.
    pub fn edge_set(&self, i: usize, j: usize) -> Vec<usize> {
        if i == j {
            return self.blocks[i].loop_nodes.clone();
        }
        match self.cross_between(i, j) {
            Some(c) if c.i == i => c.from_i.clone(),
            Some(c) => c.from_j.clone(),
            None => Vec::new(),
        }
    }

    pub fn types(&self) -> Vec<VertexType> {
        self.blocks.iter().map(|b| b.vertex_type).collect()
    }
}

pub fn derive_marginal_views(m: &MarginalSpec) -> MarginalViews {
    let g = m.graph();
    let k = g.k();
    let mut blocks: Vec<BlockView> = g
        .vertices()
        .iter()
        .map(|c| {
            let kept: Vec<usize> = c.iter().copied().filter(|&x| !m.is_traced(x)).collect();
            let traced: Vec<usize> = c.iter().copied().filter(|&x| m.is_traced(x)).collect();
            let vertex_type = if kept.is_empty() {
                VertexType::Traced
            } else if traced.is_empty() {
                VertexType::Kept
            } else {
                VertexType::Mixed
            };
            BlockView {
                subsystems: c.clone(),
                block_dim: g.product_dim(c),
                kept_dim: g.product_dim(&kept),
                traced_dim: g.product_dim(&traced),
                kept,
                traced,
                loop_nodes: Vec::new(),
                loops: 0,
                vertex_type,
                loop_dim: 1,
            }
        })
        .collect();
    let mut cross: Vec<CrossView> = Vec::new();
    for &(a, b) in g.bonds() {
        let (ba, bb) = (g.block_of(a), g.block_of(b));
        let d = g.dim(a);
        if ba == bb {
            let blk = &mut blocks[ba];
            blk.loop_nodes.extend([a, b]);
            blk.loops += 1;
            blk.loop_dim *= d;
            continue;
        }
        let (i, j, xi, xj) = if ba < bb { (ba, bb, a, b) } else { (bb, ba, b, a) };
        match cross.iter_mut().find(|c| c.i == i && c.j == j) {
            Some(c) => {
                c.from_i.push(xi);
                c.from_j.push(xj);
                c.count += 1;
                c.dim *= d;
            }
            None => cross.push(CrossView {
                i,
                j,
                from_i: vec![xi],
                from_j: vec![xj],
                count: 1,
                dim: d,
            }),
        }
    }
    for blk in &mut blocks {
        blk.loop_nodes.sort_unstable();
    }
    for c in &mut cross {
        c.from_i.sort_unstable();
        c.from_j.sort_unstable();
    }
    cross.sort_by_key(|c| (c.i, c.j));
    debug_assert_eq!(blocks.len(), k);
    MarginalViews { blocks, cross }
}

/// Vertex blocks, with every block that lies entirely inside `T` split into
/// singletons.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntanglePartition {
    pub blocks: Vec<Vec<usize>>,
}

pub fn entangle_partition(m: &MarginalSpec) -> EntanglePartition {
    let mut blocks = Vec::new();
    for c in m.graph().vertices() {
        if c.iter().all(|&x| m.is_traced(x)) {
            blocks.extend(c.iter().map(|&x| vec![x]));
        } else {
            blocks.push(c.clone());
        }
    }
    blocks.sort_unstable_by_key(|b| b[0]);
    EntanglePartition { blocks }
}

impl EntanglePartition {
    /// Blocks of `(Π_entangle ∨ Π_edge)` restricted to `S`, i.e. the tensor
    /// factors of `ρ_S`. Restrictions that become empty are dropped.
    pub fn factors(&self, m: &MarginalSpec) -> Vec<Vec<usize>> {
        let n = m.graph().n();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            parent[x] = r;
            r
        }
        let union = |a: usize, b: usize, parent: &mut Vec<usize>| {
            let (ra, rb) = (find(parent, a), find(parent, b));
            parent[ra.max(rb)] = ra.min(rb);
        };
        for b in &self.blocks {
            for w in b.windows(2) {
                union(w[0] - 1, w[1] - 1, &mut parent);
            }
        }
        for &(a, b) in m.graph().bonds() {
            union(a - 1, b - 1, &mut parent);
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut root_of: Vec<Option<usize>> = vec![None; n];
        for x in m.kept() {
            let r = find(&mut parent, x - 1);
            match root_of[r] {
                Some(g) => groups[g].push(x),
                None => {
                    root_of[r] = Some(groups.len());
                    groups.push(vec![x]);
                }
            }
        }
        groups
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> GraphSpec {
        GraphSpec::unit(vec![vec![1], vec![2, 3], vec![4, 5, 6]], vec![(1, 2), (3, 4), (5, 6)]).unwrap()
    }

    #[test]
    fn smallest_graph() {
        assert!(GraphSpec::new(vec![1, 1], vec![vec![1, 2]], vec![(1, 2)]).is_ok());
        assert!(example().k() == 3);
    }

    #[test]
    fn bond_mismatch() {
        let err = GraphSpec::new(vec![2, 3], vec![vec![1, 2]], vec![(1, 2)]).unwrap_err();
        let Error::InvalidGraph(msgs) = err else { panic!() };
        assert!(msgs.iter().any(|m| m.contains("bond dimension mismatch")));
    }

    #[test]
    fn collects_all_violations() {
        let problems = validate(&[1, 1, 1], &[vec![1, 2], vec![2]], &[(1, 2)]);
        assert!(problems.iter().any(|p| p.contains("odd")));
        assert!(problems.iter().any(|p| p.contains("appears in vertex blocks")));
        assert!(problems.iter().any(|p| p.contains("3 is in no vertex block")));
        assert!(problems.iter().any(|p| p.contains("3 is in no bond")));
    }

    #[test]
    fn example_views() {
        let m = MarginalSpec::new(example(), &[1, 4, 5]).unwrap();
        let v = m.views();
        let c3 = &v.blocks[2];
        assert_eq!(c3.kept, vec![6]);
        assert_eq!(c3.traced, vec![4, 5]);
        assert_eq!(v.edge_set(2, 1), vec![4]);
        assert_eq!(v.edge_set(2, 0), Vec::<usize>::new());
        assert_eq!(v.edge_set(2, 2), vec![5, 6]);
        assert_eq!(v.types(), vec![VertexType::Traced, VertexType::Kept, VertexType::Mixed]);
    }

    #[test]
    fn degenerate_traces() {
        let g = example();
        let all = MarginalSpec::new(g.clone(), &[1, 2, 3, 4, 5, 6]).unwrap();
        assert!(all.views().types().iter().all(|&t| t == VertexType::Traced));
        let none = MarginalSpec::new(g, &[]).unwrap();
        assert!(none.views().types().iter().all(|&t| t == VertexType::Kept));
        assert!(matches!(MarginalSpec::new(example(), &[7]), Err(Error::TraceOutOfRange(7, 6))));
    }

    #[test]
    fn block_tallies() {
        let m = MarginalSpec::new(example(), &[1, 4, 5]).unwrap();
        let v = m.views();
        for (i, b) in v.blocks.iter().enumerate() {
            assert_eq!(b.kept.len() + b.traced.len(), b.subsystems.len());
            let cross: usize = (0..v.k()).filter(|&j| j != i).map(|j| v.edge_set(i, j).len()).sum();
            assert_eq!(cross + 2 * b.loops, b.subsystems.len());
        }
    }

    #[test]
    fn broadcasting_partition() {
        let g = GraphSpec::unit(vec![vec![1], vec![2], vec![3], vec![4, 5, 6]], vec![(1, 4), (2, 5), (3, 6)]).unwrap();
        let m = MarginalSpec::new(g.clone(), &[2, 4, 6]).unwrap();
        let e = entangle_partition(&m);
        assert!(e.blocks.contains(&vec![4, 5, 6]));
        assert!(e.blocks.contains(&vec![2]));
        let pure = MarginalSpec::new(g.clone(), &[]).unwrap();
        assert_eq!(entangle_partition(&pure).blocks, g.vertices().to_vec());
        let split = MarginalSpec::new(example(), &[2, 3]).unwrap();
        assert_eq!(entangle_partition(&split).blocks, vec![vec![1], vec![2], vec![3], vec![4, 5, 6]]);
        // {1} and {4,5,6} decouple once C_2 is traced entirely
        assert_eq!(entangle_partition(&split).factors(&split), vec![vec![1], vec![4, 5, 6]]);
    }

    #[test]
    fn canonical_order() {
        let a = GraphSpec::unit(vec![vec![4, 6, 5], vec![3, 2], vec![1]], vec![(6, 5), (2, 1), (4, 3)]).unwrap();
        assert_eq!(a, example());
    }
}
