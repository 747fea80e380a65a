//! JSON graph documents.
//!
//! ```json
//! {
//!   "subsystems": [{"id": 1, "d": 1}, {"id": 2, "d": 1}],
//!   "vertices": [[1, 2]],
//!   "bonds": [[1, 2]],
//!   "trace": [2]
//! }
//! ```
//!
//! Ids must be exactly `1..=n` in any order. `trace` may be omitted, in
//! which case the document describes the pure state and commands need an
//! explicit `--trace`.

use std::path::Path;

use graphstate_core::{families, GraphSpec, MarginalSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubsystemEntry {
    pub id: usize,
    pub d: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub subsystems: Vec<SubsystemEntry>,
    pub vertices: Vec<Vec<usize>>,
    pub bonds: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<usize>>,
}

impl GraphFile {
    pub fn from_marginal(m: &MarginalSpec) -> Self {
        let g = m.graph();
        Self {
            subsystems: (1..=g.n()).map(|id| SubsystemEntry { id, d: g.dim(id) }).collect(),
            vertices: g.vertices().to_vec(),
            bonds: g.bonds().iter().map(|&(a, b)| [a, b]).collect(),
            trace: Some(m.traced().to_vec()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph files always serialize")
    }

    /// Field-level checks with JSON paths, then the structural checks of
    /// the core graph model.
    pub fn validate(&self, origin: &str) -> Result<GraphDocument> {
        let n = self.subsystems.len();
        let mut errors = Vec::new();
        let mut dims = vec![0u64; n];
        let mut seen = vec![false; n];
        for (i, s) in self.subsystems.iter().enumerate() {
            if s.id == 0 || s.id > n {
                errors.push(format!("subsystems[{i}].id: {} is outside 1..={n}", s.id));
                continue;
            }
            if seen[s.id - 1] {
                errors.push(format!("subsystems[{i}].id: duplicate id {}", s.id));
            }
            seen[s.id - 1] = true;
            if s.d == 0 {
                errors.push(format!("subsystems[{i}].d: dimension must be positive"));
            }
            dims[s.id - 1] = s.d;
        }
        let known = |id: usize| id >= 1 && id <= n;
        for (i, block) in self.vertices.iter().enumerate() {
            for (j, &id) in block.iter().enumerate() {
                if !known(id) {
                    errors.push(format!("vertices[{i}][{j}]: unknown subsystem {id}"));
                }
            }
        }
        for (i, &[a, b]) in self.bonds.iter().enumerate() {
            for (j, id) in [a, b].into_iter().enumerate() {
                if !known(id) {
                    errors.push(format!("bonds[{i}][{j}]: unknown subsystem {id}"));
                }
            }
            if known(a) && known(b) && dims[a - 1] != dims[b - 1] {
                errors.push(format!(
                    "bonds[{i}]: subsystems {a} and {b} have dimensions {} and {}",
                    dims[a - 1],
                    dims[b - 1]
                ));
            }
        }
        if let Some(trace) = &self.trace {
            for (i, &id) in trace.iter().enumerate() {
                if !known(id) {
                    errors.push(format!("trace[{i}]: unknown subsystem {id}"));
                }
            }
        }
        if !errors.is_empty() {
            return Err(CliError::Invalid {
                origin: origin.to_string(),
                errors,
            });
        }
        let bonds = self.bonds.iter().map(|&[a, b]| (a, b)).collect();
        let graph = GraphSpec::new(dims, self.vertices.clone(), bonds).map_err(|e| match e {
            graphstate_core::Error::InvalidGraph(errors) => CliError::Invalid {
                origin: origin.to_string(),
                errors,
            },
            other => CliError::Core(other),
        })?;
        Ok(GraphDocument {
            graph,
            trace: self.trace.clone(),
        })
    }
}

/// A validated graph and the trace set it came with, if any.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphDocument {
    pub graph: GraphSpec,
    pub trace: Option<Vec<usize>>,
}

impl GraphDocument {
    /// The document's marginal, or the pure state if it has no trace set.
    pub fn spec(&self) -> MarginalSpec {
        MarginalSpec::new(self.graph.clone(), self.trace.as_deref().unwrap_or(&[])).expect("trace validated on parse")
    }

    /// The marginal with `trace` taking precedence over the document's own.
    pub fn marginal(&self, trace: Option<&[usize]>) -> Result<MarginalSpec> {
        match trace.or(self.trace.as_deref()) {
            Some(t) => Ok(MarginalSpec::new(self.graph.clone(), t)?),
            None => Err(CliError::Usage(
                "the graph has no trace set; pass --trace with the traced subsystems".into(),
            )),
        }
    }
}

pub fn parse_graph_str(text: &str, origin: &str) -> Result<GraphDocument> {
    let file: GraphFile = serde_json::from_str(text).map_err(|e| CliError::Syntax {
        origin: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    file.validate(origin)
}

pub fn parse_graph(path: &Path) -> Result<GraphDocument> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_graph_str(&text, &path.display().to_string())
}

/// Built-in graphs by name: `one-loop`, `example`, `pi2`, `exotic`, `tsrr`,
/// `fc:S`, `star:M,S,T` and `cycle:TYPES` (letters `T`, `S`, `R`).
pub fn builtin(name: &str) -> Result<Option<MarginalSpec>> {
    let bad = |what: &str| CliError::Usage(format!("malformed built-in graph {name:?}: {what}"));
    let spec = match name {
        "one-loop" => families::one_loop(),
        "example" => families::example_marginal(),
        "pi2" => families::pi2_template(),
        "exotic" => families::exotic(),
        "tsrr" => families::cycle_tsrr(),
        _ => {
            let Some((family, args)) = name.split_once(':') else {
                return Ok(None);
            };
            match family {
                "fc" => {
                    let s: usize = args.parse().map_err(|_| bad("expected fc:S"))?;
                    if s == 0 {
                        return Err(bad("S must be at least 1"));
                    }
                    families::fc_template(s)
                }
                "star" => {
                    let v: Vec<usize> = args
                        .split(',')
                        .map(str::parse)
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| bad("expected star:M,S,T"))?;
                    let [m, s, t] = v[..] else {
                        return Err(bad("expected star:M,S,T"));
                    };
                    families::star(m, s, t)?
                }
                "cycle" => families::cycle(args)?,
                _ => return Ok(None),
            }
        }
    };
    Ok(Some(spec))
}

/// A path to a graph file, or else a built-in name.
pub fn resolve_graph(arg: &str) -> Result<GraphDocument> {
    let path = Path::new(arg);
    if path.exists() {
        return parse_graph(path);
    }
    match builtin(arg)? {
        Some(m) => Ok(GraphDocument {
            graph: m.graph().clone(),
            trace: Some(m.traced().to_vec()),
        }),
        None => Err(CliError::Usage(format!("{arg}: no such file or built-in graph"))),
    }
}
