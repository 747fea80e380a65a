//! Ready-made graphs and marginals used throughout the tests and the CLI.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{GraphSpec, MarginalSpec};

/// One vertex `{1,2}` with a loop, `T = {2}`.
pub fn one_loop() -> MarginalSpec {
    let g = GraphSpec::unit(vec![vec![1, 2]], vec![(1, 2)]).unwrap();
    MarginalSpec::new(g, &[2]).unwrap()
}

/// Blocks `{1}, {2,3}, {4,5,6}`, bonds `{1,2}, {3,4}, {5,6}`, `T = {1,4,5}`.
pub fn example_marginal() -> MarginalSpec {
    let g = GraphSpec::unit(vec![vec![1], vec![2, 3], vec![4, 5, 6]], vec![(1, 2), (3, 4), (5, 6)]).unwrap();
    MarginalSpec::new(g, &[1, 4, 5]).unwrap()
}

/// The `s = 2` chain template, whose limit law is `FC(2)`.
pub fn pi2_template() -> MarginalSpec {
    fc_template(2)
}

/// A chain of `s` vertices with a loop at each end and a partial trace
/// that forces `0̂ ≤ [β_1] ≤ … ≤ [β_s] ≤ 1̂`; max flow `s + 1`.
///
/// For `s = 1` the chain degenerates to one vertex with two loops, one end
/// of each traced.
pub fn fc_template(s: usize) -> MarginalSpec {
    let bonds = if s <= 1 { 2 } else { s + 1 };
    fc_template_with_dims(s.max(1), &vec![1; bonds]).unwrap()
}

/// [`fc_template`] with one dimension factor per bond, listed as first
/// loop, chain bonds in order, last loop.
pub fn fc_template_with_dims(s: usize, bond_dims: &[u64]) -> Result<MarginalSpec> {
    if s == 0 {
        return Err(Error::InvalidParameter("chain order must be at least 1".into()));
    }
    if s == 1 {
        if bond_dims.len() != 2 {
            return Err(Error::LengthMismatch(bond_dims.len(), 2));
        }
        let dims = vec![bond_dims[0], bond_dims[0], bond_dims[1], bond_dims[1]];
        let g = GraphSpec::new(dims, vec![vec![1, 2, 3, 4]], vec![(1, 2), (3, 4)])?;
        return MarginalSpec::new(g, &[1, 3]);
    }
    if bond_dims.len() != s + 1 {
        return Err(Error::LengthMismatch(bond_dims.len(), s + 1));
    }
    let mut vertices = vec![vec![1, 2, 3]];
    let mut bonds = vec![(1, 2)];
    let mut dims = vec![bond_dims[0], bond_dims[0], bond_dims[1]];
    let mut traced = vec![1, 2];
    let mut chain_out = 3;
    let mut next = 4;
    for j in 2..s {
        vertices.push(vec![next, next + 1]);
        bonds.push((chain_out, next));
        dims.extend([bond_dims[j - 1], bond_dims[j]]);
        traced.push(next);
        chain_out = next + 1;
        next += 2;
    }
    vertices.push(vec![next, next + 1, next + 2]);
    bonds.push((chain_out, next));
    bonds.push((next + 1, next + 2));
    dims.extend([bond_dims[s - 1], bond_dims[s], bond_dims[s]]);
    traced.push(next);
    let g = GraphSpec::new(dims, vertices, bonds)?;
    MarginalSpec::new(g, &traced)
}

/// Three vertices whose minimizers satisfy `[β_1] ≤ [β_2]`, `[β_1] ≤ [β_3]`.
pub fn exotic() -> MarginalSpec {
    let g = GraphSpec::unit(
        vec![vec![1, 2, 3, 4], vec![5, 6, 7], vec![8, 9, 10]],
        vec![(1, 2), (3, 5), (4, 8), (6, 7), (9, 10)],
    )
    .unwrap();
    MarginalSpec::new(g, &[1, 2, 3, 5, 8]).unwrap()
}

/// The `m`-star: satellites `{j}` bonded to center subsystem `m + j`.
/// Keeps satellites `1..=s` and center subsystems `m+1..=m+t`.
pub fn star(m: usize, s: usize, t: usize) -> Result<MarginalSpec> {
    if m == 0 || s > m || t > m {
        return Err(Error::InvalidParameter(format!("star parameters out of range: m={m}, s={s}, t={t}")));
    }
    let mut vertices: Vec<Vec<usize>> = (1..=m).map(|j| vec![j]).collect();
    vertices.push((m + 1..=2 * m).collect());
    let bonds = (1..=m).map(|j| (j, m + j)).collect();
    let g = GraphSpec::unit(vertices, bonds)?;
    let traced: Vec<usize> = (s + 1..=m).chain(m + t + 1..=2 * m).collect();
    MarginalSpec::new(g, &traced)
}

/// The `m`-cycle with vertices `W_i = {2i−1, 2i}` and bonds `{2i, 2i+1}`
/// (cyclically), traced according to `types` (`S`, `R` or `T` per vertex;
/// an `R` vertex traces its first subsystem).
pub fn cycle(types: &str) -> Result<MarginalSpec> {
    let verts = crate::moments::closed_form::parse_cycle_types(types)?;
    let m = verts.len();
    if m < 2 {
        return Err(Error::InvalidParameter("a cycle needs at least two vertices".into()));
    }
    let traced: Vec<usize> = verts
        .iter()
        .enumerate()
        .flat_map(|(i, v)| {
            let (a, b) = (2 * i + 1, 2 * i + 2);
            match v {
                crate::moments::closed_form::CycleVertex::S => vec![],
                crate::moments::closed_form::CycleVertex::R => vec![a],
                crate::moments::closed_form::CycleVertex::T => vec![a, b],
            }
        })
        .collect();
    cycle_with_trace(m, &traced)
}

/// The `m`-cycle with an explicit traced set.
pub fn cycle_with_trace(m: usize, traced: &[usize]) -> Result<MarginalSpec> {
    if m < 2 {
        return Err(Error::InvalidParameter("a cycle needs at least two vertices".into()));
    }
    let vertices = (1..=m).map(|i| vec![2 * i - 1, 2 * i]).collect();
    let bonds = (1..=m).map(|i| (2 * i, if i == m { 1 } else { 2 * i + 1 })).collect();
    MarginalSpec::new(GraphSpec::unit(vertices, bonds)?, traced)
}

/// The 4-cycle marginal with `S = {3,4,5,8}`, i.e. types `T S R R`.
pub fn cycle_tsrr() -> MarginalSpec {
    cycle_with_trace(4, &[1, 2, 6, 7]).unwrap()
}

/// A random valid marginal with at most `max_subsystems` subsystems and
/// bond dimension factors in `1..=max_dim`.
pub fn random_marginal<R: Rng + ?Sized>(rng: &mut R, max_subsystems: usize, max_dim: u64) -> MarginalSpec {
    let m = rng.random_range(1..=(max_subsystems / 2).max(1));
    let n = 2 * m;
    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(rng);
    let bonds: Vec<(usize, usize)> = order.chunks(2).map(|c| (c[0], c[1])).collect();
    let mut dims = vec![1u64; n];
    for &(a, b) in &bonds {
        let d = rng.random_range(1..=max_dim.max(1));
        dims[a - 1] = d;
        dims[b - 1] = d;
    }
    let k = rng.random_range(1..=n);
    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); k];
    for x in 1..=n {
        blocks[rng.random_range(0..k)].push(x);
    }
    blocks.retain(|b| !b.is_empty());
    let traced: Vec<usize> = (1..=n).filter(|_| rng.random_bool(0.5)).collect();
    let g = GraphSpec::new(dims, blocks, bonds).expect("construction yields a valid graph");
    MarginalSpec::new(g, &traced).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::max_flow_value;
    use crate::graph::VertexType;

    #[test]
    fn template_flows() {
        assert_eq!(max_flow_value(&one_loop()), 1);
        assert_eq!(max_flow_value(&pi2_template()), 3);
        for s in 1..=6 {
            assert_eq!(max_flow_value(&fc_template(s)), s as u64 + 1, "s={s}");
        }
        assert_eq!(max_flow_value(&exotic()), 5);
        assert_eq!(max_flow_value(&cycle_tsrr()), 4);
        assert_eq!(max_flow_value(&cycle("TSRR").unwrap()), 4);
        assert_eq!(max_flow_value(&star(2, 1, 1).unwrap()), 2);
    }

    #[test]
    fn pi2_shape() {
        let v = pi2_template().views();
        assert_eq!((v.blocks[0].traced.len(), v.blocks[0].kept.len()), (2, 1));
        assert_eq!((v.blocks[1].traced.len(), v.blocks[1].kept.len()), (1, 2));
    }

    #[test]
    fn star_pins() {
        let types = star(2, 1, 1).unwrap().views().types();
        assert_eq!(types, vec![VertexType::Kept, VertexType::Traced, VertexType::Mixed]);
    }

    #[test]
    fn random_corpus_is_valid() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let m = random_marginal(&mut rng, 8, 3);
            assert!(m.graph().n() <= 8);
            assert!(m.graph().dims().iter().all(|&d| (1..=3).contains(&d)));
        }
    }
}
