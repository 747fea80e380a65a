//! The capacitated network attached to a marginal and its maximum flow.
//!
//! Node `0` is the source (labelled `id`), node `1` the sink (`γ`) and node
//! `2 + i` stands for the permutation `β_i` of vertex block `i`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::graph::MarginalSpec;

pub const SOURCE: usize = 0;
pub const SINK: usize = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub capacity: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowNetwork {
    k: usize,
    capacity: Vec<Vec<u64>>,
}

impl FlowNetwork {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn node_count(&self) -> usize {
        self.k + 2
    }

    pub fn beta(i: usize) -> usize {
        i + 2
    }

    pub fn capacity(&self, from: usize, to: usize) -> u64 {
        self.capacity[from][to]
    }

    /// Positive-capacity directed edges in node order.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for (from, row) in self.capacity.iter().enumerate() {
            for (to, &capacity) in row.iter().enumerate() {
                if capacity > 0 {
                    out.push(Edge { from, to, capacity });
                }
            }
        }
        out
    }

    pub fn node_label(node: usize) -> String {
        match node {
            SOURCE => "id".to_string(),
            SINK => "gamma".to_string(),
            v => format!("beta_{}", v - 1),
        }
    }
}

pub fn build_network(m: &MarginalSpec) -> FlowNetwork {
    let v = m.views();
    let k = v.k();
    let mut capacity = vec![vec![0u64; k + 2]; k + 2];
    for (i, b) in v.blocks.iter().enumerate() {
        capacity[SOURCE][FlowNetwork::beta(i)] = b.traced.len() as u64;
        capacity[FlowNetwork::beta(i)][SINK] = b.kept.len() as u64;
    }
    for c in &v.cross {
        let (bi, bj) = (FlowNetwork::beta(c.i), FlowNetwork::beta(c.j));
        capacity[bi][bj] = c.count as u64;
        capacity[bj][bi] = c.count as u64;
    }
    FlowNetwork { k, capacity }
}

/// Where a `β_i` node ends up in the residual network of a maximum flow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// Reachable from the source.
    Source,
    /// Can reach the sink.
    Sink,
    Isolated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxFlowResult {
    pub value: u64,
    /// Skew-symmetric net flow, `flow[u][v] = −flow[v][u]`.
    pub flow: Vec<Vec<i64>>,
    /// Residual capacities `c(u,v) − f(u,v)`.
    pub residual: Vec<Vec<u64>>,
    /// Residual side of each `β_i`.
    pub sides: Vec<Side>,
}

/// Edmonds–Karp: augment along shortest residual paths until none remain.
pub fn max_flow(net: &FlowNetwork) -> MaxFlowResult {
    let size = net.node_count();
    let mut flow = vec![vec![0i64; size]; size];
    let residual_of = |flow: &Vec<Vec<i64>>, u: usize, v: usize| -> u64 {
        (net.capacity[u][v] as i64 - flow[u][v]) as u64
    };
    let mut value = 0u64;
    loop {
        let mut parent = vec![usize::MAX; size];
        parent[SOURCE] = SOURCE;
        let mut queue = VecDeque::from([SOURCE]);
        while let Some(u) = queue.pop_front() {
            if u == SINK {
                break;
            }
            for v in 0..size {
                if parent[v] == usize::MAX && residual_of(&flow, u, v) > 0 {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if parent[SINK] == usize::MAX {
            break;
        }
        let mut bottleneck = u64::MAX;
        let mut v = SINK;
        while v != SOURCE {
            let u = parent[v];
            bottleneck = bottleneck.min(residual_of(&flow, u, v));
            v = u;
        }
        let mut v = SINK;
        while v != SOURCE {
            let u = parent[v];
            flow[u][v] += bottleneck as i64;
            flow[v][u] -= bottleneck as i64;
            v = u;
        }
        value += bottleneck;
    }
    let residual: Vec<Vec<u64>> = (0..size)
        .map(|u| (0..size).map(|v| residual_of(&flow, u, v)).collect())
        .collect();
    let from_source = reachable(&residual, SOURCE, false);
    let to_sink = reachable(&residual, SINK, true);
    let sides = (0..net.k)
        .map(|i| {
            let node = FlowNetwork::beta(i);
            if from_source[node] {
                Side::Source
            } else if to_sink[node] {
                Side::Sink
            } else {
                Side::Isolated
            }
        })
        .collect();
    MaxFlowResult {
        value,
        flow,
        residual,
        sides,
    }
}

fn reachable(residual: &[Vec<u64>], start: usize, reverse: bool) -> Vec<bool> {
    let size = residual.len();
    let mut seen = vec![false; size];
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for v in 0..size {
            let cap = if reverse { residual[v][u] } else { residual[u][v] };
            if cap > 0 && !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

/// The max-flow value `X` of a marginal.
pub fn max_flow_value(m: &MarginalSpec) -> u64 {
    max_flow(&build_network(m)).value
}

/// True when exchanging `S` and `T` leaves the max-flow value unchanged.
pub fn duality_check(m: &MarginalSpec) -> bool {
    max_flow_value(m) == max_flow_value(&m.swapped())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphSpec;

    fn one_loop() -> MarginalSpec {
        MarginalSpec::new(GraphSpec::unit(vec![vec![1, 2]], vec![(1, 2)]).unwrap(), &[2]).unwrap()
    }

    /// Minimum over all source/sink cuts, by enumeration.
    fn min_cut(net: &FlowNetwork) -> u64 {
        let k = net.k();
        (0u32..1 << k)
            .map(|mask| {
                let side = |node: usize| match node {
                    SOURCE => true,
                    SINK => false,
                    v => mask & (1 << (v - 2)) != 0,
                };
                net.edges()
                    .iter()
                    .filter(|e| side(e.from) && !side(e.to))
                    .map(|e| e.capacity)
                    .sum()
            })
            .min()
            .unwrap()
    }

    #[test]
    fn one_loop_network() {
        let net = build_network(&one_loop());
        assert_eq!(
            net.edges(),
            vec![
                Edge { from: SOURCE, to: 2, capacity: 1 },
                Edge { from: 2, to: SINK, capacity: 1 }
            ]
        );
        assert_eq!(max_flow(&net).value, 1);
        assert!(duality_check(&one_loop()));
    }

    #[test]
    fn example_network() {
        let g = GraphSpec::unit(vec![vec![1], vec![2, 3], vec![4, 5, 6]], vec![(1, 2), (3, 4), (5, 6)]).unwrap();
        let net = build_network(&MarginalSpec::new(g, &[1, 4, 5]).unwrap());
        assert_eq!(net.capacity(SOURCE, 2), 1);
        assert_eq!(net.capacity(2, SINK), 0);
        assert_eq!(net.capacity(3, SINK), 2);
        assert_eq!(net.capacity(SOURCE, 4), 2);
        assert_eq!(net.capacity(4, SINK), 1);
        assert_eq!(net.capacity(2, 3), 1);
        assert_eq!(net.capacity(3, 4), 1);
        assert_eq!(net.capacity(2, 4), 0);
        assert_eq!(net.capacity(SOURCE, SINK), 0);
        assert_eq!(max_flow(&net).value, 3);
    }

    #[test]
    fn full_trace_has_no_sink_edges() {
        let g = GraphSpec::unit(vec![vec![1, 3], vec![2, 4]], vec![(1, 2), (3, 4)]).unwrap();
        let net = build_network(&MarginalSpec::new(g, &[1, 2, 3, 4]).unwrap());
        assert!(net.edges().iter().all(|e| e.to != SINK));
        assert_eq!(max_flow(&net).value, 0);
    }

    #[test]
    fn flow_axioms_and_min_cut() {
        let g = GraphSpec::unit(
            vec![vec![1, 2, 3], vec![4, 5], vec![6, 7, 8]],
            vec![(1, 4), (2, 6), (3, 7), (5, 8)],
        )
        .unwrap();
        for mask in 0u32..256 {
            let traced: Vec<usize> = (1..=8).filter(|i| mask & (1 << (i - 1)) != 0).collect();
            let m = MarginalSpec::new(g.clone(), &traced).unwrap();
            let net = build_network(&m);
            let res = max_flow(&net);
            assert_eq!(res.value, min_cut(&net));
            let size = net.node_count();
            for u in 0..size {
                for v in 0..size {
                    assert!(res.flow[u][v] <= net.capacity(u, v) as i64);
                    assert_eq!(res.flow[u][v], -res.flow[v][u]);
                }
                if u != SOURCE && u != SINK {
                    assert_eq!(res.flow[u].iter().sum::<i64>(), 0);
                }
            }
            assert_eq!(res.flow[SOURCE].iter().sum::<i64>(), res.value as i64);
            assert!(duality_check(&m));
        }
    }
}
