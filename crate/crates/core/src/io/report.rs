//! Reports and their JSON / CSV renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bottleneck::{CutResult, HealResult, Method, Protocol};
use crate::dynamics::{Classification, EpidemicReport, Signal};
use crate::error::{Error, Result};
use crate::io::scenario::{Band, Command, Params};
use crate::linalg::Matrix;
use crate::spectral::Candidate;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

impl From<(usize, usize, f64)> for Edge {
    fn from((u, v, w): (usize, usize, f64)) -> Self {
        Edge { u, v, w }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolutionMode {
    Discrete,
    Continuous,
}

/// Command results. Matrices are nested arrays, cuts index lists, spectra value lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outputs {
    Operator {
        operator: String,
        basis: Option<f64>,
        lambda_max: Option<f64>,
        matrix: Matrix,
    },
    Graph {
        operator: String,
        n: usize,
        directed: bool,
        traffic: f64,
        edges: Vec<Edge>,
    },
    Trajectory {
        mode: EvolutionMode,
        growth: Option<f64>,
        classification: Option<Classification>,
        signals: Vec<Signal>,
    },
    Spectrum {
        candidate: Candidate,
        eigenvalues: Vec<f64>,
    },
    Filter {
        candidate: Candidate,
        band: Band,
        k: usize,
        eigenvalues: Vec<f64>,
        reconstruction: Matrix,
        top_edges: Option<Vec<Edge>>,
    },
    Bottleneck {
        protocol: Protocol,
        method: Method,
        traffic: f64,
        cut: CutResult,
    },
    Heal {
        protocol: Protocol,
        method: Method,
        bandwidth: f64,
        delay_update: bool,
        baseline: CutResult,
        ranked: Vec<HealResult>,
    },
    Epidemic {
        #[serde(flatten)]
        summary: EpidemicReport,
        mass: Option<Vec<f64>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    pub graph: String,
    pub graph_sha256: String,
    pub directed: bool,
    pub n: usize,
    pub params: Params,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub command: Command,
    pub version: String,
    pub inputs: Inputs,
    pub outputs: Outputs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Renders a report. JSON is canonical: fixed key order and shortest
/// round-trip floats, so equal reports always produce equal bytes.
pub fn emit_report(report: &Report, format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).map_err(|e| Error::Io(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => csv(&report.outputs),
    }
}

fn edge_rows(out: &mut String, edges: &[Edge]) {
    out.push_str("u,v,w\n");
    for e in edges {
        writeln!(out, "{},{},{:?}", e.u, e.v, e.w).unwrap();
    }
}

fn vector_rows(out: &mut String, label: &str, values: &[f64]) {
    writeln!(out, "index,{label}").unwrap();
    for (i, x) in values.iter().enumerate() {
        writeln!(out, "{i},{x:?}").unwrap();
    }
}

fn csv(outputs: &Outputs) -> Result<String> {
    let mut out = String::new();
    match outputs {
        Outputs::Graph { edges, .. } => edge_rows(&mut out, edges),
        Outputs::Filter {
            top_edges: Some(edges), ..
        } => edge_rows(&mut out, edges),
        Outputs::Filter { top_edges: None, .. } => return Err(Error::CsvUnsupported("a reconstructed matrix")),
        Outputs::Operator { .. } => return Err(Error::CsvUnsupported("an operator matrix")),
        Outputs::Trajectory { signals, .. } => match signals.as_slice() {
            [one] => vector_rows(&mut out, "value", &one.values),
            _ => return Err(Error::CsvUnsupported("a multi-step trajectory")),
        },
        Outputs::Spectrum { eigenvalues, .. } => vector_rows(&mut out, "eigenvalue", eigenvalues),
        Outputs::Bottleneck { cut, .. } => {
            out.push_str("vertex\n");
            for v in &cut.subset {
                writeln!(out, "{v}").unwrap();
            }
        }
        Outputs::Heal { ranked, .. } => {
            out.push_str("u,v,conductance\n");
            for r in ranked {
                writeln!(out, "{},{},{:?}", r.edge.0, r.edge.1, r.conductance).unwrap();
            }
        }
        Outputs::Epidemic { mass: Some(mass), .. } => vector_rows(&mut out, "mass", mass),
        Outputs::Epidemic { mass: None, .. } => return Err(Error::CsvUnsupported("an epidemic summary")),
    }
    Ok(out)
}
