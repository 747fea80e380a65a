//! Versioned, machine-readable command output.

use std::fmt::Write;

use graphstate_core::flow::{build_network, max_flow, FlowNetwork};
use graphstate_core::rational::{self, Rational};
use graphstate_core::{DistributionId, EstimateReport, MarginalSpec, MomentReport};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const SCHEMA: &str = "graphstate.report/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network: Option<NetworkSummary>,
    /// Max-flow value `X`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flow: Option<u64>,
    /// Leading-order table `E tr ρ^p ≈ coefficient · N^exponent`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub moments: Vec<MomentReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<DistributionId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predictions: Option<Predictions>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exact: Vec<ExactMoment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<EstimateReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub deviations: Vec<Deviation>,
    /// Rescaled moments at further `N`, for the finite-size trend.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ladder: Vec<Deviation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<DensityGrid>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            schema: SCHEMA.to_string(),
            command: command.to_string(),
            graph: None,
            network: None,
            flow: None,
            moments: Vec::new(),
            distribution: None,
            predictions: None,
            exact: Vec::new(),
            estimate: None,
            deviations: Vec::new(),
            ladder: Vec::new(),
            density: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports contain no non-finite floats")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: Report = serde_json::from_str(text).map_err(|e| CliError::Syntax {
            origin: "report".into(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        if report.schema != SCHEMA {
            return Err(CliError::Invalid {
                origin: "report".into(),
                errors: vec![format!("unsupported schema {:?}, expected {SCHEMA:?}", report.schema)],
            });
        }
        Ok(report)
    }

    /// The command's main table as CSV with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if let Some(d) = &self.density {
            out.push_str("x,density\n");
            for &[x, y] in &d.points {
                let _ = writeln!(out, "{},{}", num(x), num(y));
            }
        } else if !self.deviations.is_empty() || !self.ladder.is_empty() {
            out.push_str("role,n,p,coefficient,rescaled_mean,rescaled_stderr,sigma,flagged\n");
            let rows = self.deviations.iter().map(|d| ("check", d)).chain(self.ladder.iter().map(|d| ("ladder", d)));
            for (role, d) in rows {
                let sigma = d.sigma.map(num).unwrap_or_default();
                let _ = writeln!(
                    out,
                    "{role},{},{},{},{},{},{sigma},{}",
                    d.n,
                    d.p,
                    num(d.coefficient),
                    num(d.rescaled_mean),
                    num(d.rescaled_stderr),
                    d.flagged
                );
            }
        } else if let Some(e) = &self.estimate {
            out.push_str("p,mean,stderr\n");
            for m in &e.moments {
                let _ = writeln!(out, "{},{},{}", m.p, num(m.estimate.mean), num(m.estimate.stderr));
            }
        } else if !self.exact.is_empty() {
            out.push_str("p,n,value,approx,rescaled\n");
            for e in &self.exact {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    e.p,
                    e.n,
                    rational::format(&e.value),
                    num(e.approx),
                    num(e.rescaled)
                );
            }
        } else {
            out.push_str("p,exponent,coefficient\n");
            for m in &self.moments {
                let _ = writeln!(out, "{},{},{}", m.p, m.exponent, rational::format(&m.coefficient));
            }
        }
        out
    }
}

/// Shortest round-tripping form, in exponent notation for small magnitudes.
fn num(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-4 {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub dims: Vec<u64>,
    pub vertices: Vec<Vec<usize>>,
    pub bonds: Vec<[usize; 2]>,
    pub traced: Vec<usize>,
    /// `T`, `S` or `mixed` per vertex.
    pub vertex_types: Vec<String>,
}

impl GraphSummary {
    pub fn of(m: &MarginalSpec) -> Self {
        let g = m.graph();
        Self {
            n: g.n(),
            m: g.m(),
            k: g.k(),
            dims: g.dims().to_vec(),
            vertices: g.vertices().to_vec(),
            bonds: g.bonds().iter().map(|&(a, b)| [a, b]).collect(),
            traced: m.traced().to_vec(),
            vertex_types: m.views().types().iter().map(ToString::to_string).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkEdge {
    pub from: String,
    pub to: String,
    pub capacity: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkSummary {
    pub nodes: Vec<String>,
    pub edges: Vec<NetworkEdge>,
    pub max_flow: u64,
}

impl NetworkSummary {
    pub fn of(m: &MarginalSpec) -> Self {
        let net = build_network(m);
        Self {
            nodes: (0..net.node_count()).map(FlowNetwork::node_label).collect(),
            edges: net
                .edges()
                .into_iter()
                .map(|e| NetworkEdge {
                    from: FlowNetwork::node_label(e.from),
                    to: FlowNetwork::node_label(e.to),
                    capacity: e.capacity,
                })
                .collect(),
            max_flow: max_flow(&net).value,
        }
    }
}

/// What the limit law implies at leading order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Predictions {
    /// `δ` in the effective dimension `δ N^X`.
    #[serde(with = "rational::serde_string")]
    pub scale: Rational,
    /// Leading coefficient of the purity, when the law's moments are known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub purity_coefficient: Option<String>,
    /// `E H ≈ X ln N + entropy_offset`, in nats.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entropy_offset: Option<f64>,
    /// Values at a specific `N`, when one was given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub purity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entropy: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactMoment {
    pub p: usize,
    pub n: u64,
    #[serde(with = "rational::serde_string")]
    pub value: Rational,
    pub approx: f64,
    /// `N^{X(p−1)} · value`.
    pub rescaled: f64,
}

/// A rescaled Monte Carlo moment `N^{X(p−1)} E tr ρ^p` against its limit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub n: u64,
    pub p: usize,
    pub coefficient: f64,
    pub rescaled_mean: f64,
    pub rescaled_stderr: f64,
    /// `(rescaled_mean − coefficient)/rescaled_stderr`; absent when the
    /// sample has no spread.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    pub family: String,
    pub parameter: String,
    pub support: [f64; 2],
    /// Mass at 0 not covered by the density.
    pub atom: f64,
    pub points: Vec<[f64; 2]>,
}
