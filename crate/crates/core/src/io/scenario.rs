//! Scenario files and command dispatch.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bottleneck::{heal_rank, min_conductance, protocol_model, HealOptions, Method, Protocol};
use crate::dynamics::{
    classify_epidemic, discrete_approximation, evolve_continuous, evolve_discrete, ContinuousOptions, Signal,
    DEFAULT_EPSILON,
};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::io::edge_list::parse_edge_list;
use crate::io::report::{EvolutionMode, Inputs, Outputs, Report};
use crate::operators::{
    bias_transform, consensus_operator, delay_transform, dual_consensus_filter, nonnegative_filter,
    parameterized_laplacian, random_walk_operator, replicator_operator, similarity_transform, sis_filter, z_laplacian,
    ShiftOperator,
};
use crate::params::{Bias, DelayFloor, Delays, Replication};
use crate::spectral::{
    band_reconstruct, candidate_laplacian, high_pass_mask, low_pass_mask, sym_eig, top_percent_edges, Candidate,
};

/// Graphs up to this size default to the exhaustive minimum-conductance search.
pub const DEFAULT_BRUTE_LIMIT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Transform,
    Evolve,
    Spectrum,
    Filter,
    Bottleneck,
    Heal,
    Epidemic,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Transform => "transform",
            Command::Evolve => "evolve",
            Command::Spectrum => "spectrum",
            Command::Filter => "filter",
            Command::Bottleneck => "bottleneck",
            Command::Heal => "heal",
            Command::Epidemic => "epidemic",
        }
    }
}

/// Operators the `transform` and `evolve` commands can build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    RandomWalk,
    Consensus,
    Replicator,
    Sis,
    Nonnegative,
    Dual,
    BiasTransform,
    DelayTransform,
    ZLaplacian,
    ParameterizedLaplacian,
    Similarity,
    DiscreteApproximation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    #[default]
    Low,
    High,
}

/// A per-vertex vector, or one scalar broadcast to every vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VecOrScalar {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl VecOrScalar {
    pub fn expand(&self, n: usize) -> Result<Vec<f64>> {
        match self {
            VecOrScalar::Scalar(x) => Ok(vec![*x; n]),
            VecOrScalar::Vector(v) if v.len() == n => Ok(v.clone()),
            VecOrScalar::Vector(v) => Err(Error::DimensionMismatch {
                expected: n,
                found: v.len(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<OperatorKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bias: Option<VecOrScalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delay: Option<VecOrScalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delay_floor: Option<DelayFloor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicate: Option<VecOrScalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signal: Option<VecOrScalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate: Option<Candidate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<Band>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub percent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<Protocol>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<Vec<(usize, usize)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delay_update: Option<bool>,
}

fn missing(name: &str, command: Command) -> Error {
    Error::Scenario(format!("`{}` needs parameter `{name}`", command.name()))
}

impl Params {
    pub fn from_json(text: &str) -> Result<Params> {
        serde_json::from_str(text).map_err(|e| Error::Scenario(e.to_string()))
    }

    fn bias(&self, n: usize) -> Result<Bias> {
        match &self.bias {
            Some(b) => Bias::new(b.expand(n)?),
            None => Ok(Bias::ones(n)),
        }
    }

    fn delays(&self, n: usize) -> Result<Delays> {
        match &self.delay {
            Some(t) => Delays::with_floor(t.expand(n)?, self.delay_floor.unwrap_or_default()),
            None => Ok(Delays::ones(n)),
        }
    }

    fn replication(&self, n: usize) -> Result<Replication> {
        match &self.replicate {
            Some(z) => Replication::new(z.expand(n)?),
            None => Ok(Replication::ones(n)),
        }
    }

    fn signal(&self, n: usize) -> Result<Signal> {
        match &self.signal {
            Some(s) => Signal::new(s.expand(n)?),
            None => Signal::new(vec![1.0 / n as f64; n]),
        }
    }

    fn method(&self, n: usize) -> Method {
        self.method.unwrap_or(if n <= DEFAULT_BRUTE_LIMIT {
            Method::Brute
        } else {
            Method::Sweep
        })
    }
}

/// A complete run description: graph file, command and parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Edge-list path, relative to the scenario file.
    pub graph: String,
    #[serde(default)]
    pub directed: bool,
    pub command: Command,
    #[serde(default)]
    pub params: Params,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Scenario> {
        serde_json::from_str(text).map_err(|e| Error::Scenario(e.to_string()))
    }
}

/// A parsed graph together with where it came from.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub label: String,
    pub sha256: String,
    pub graph: Graph,
}

/// Reads and parses an edge-list file, hashing its raw bytes.
pub fn load_graph(path: &Path, label: &str, directed: bool) -> Result<LoadedGraph> {
    let bytes = std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let graph = parse_edge_list(&text, directed).map_err(|e| e.context(path.display().to_string()))?;
    Ok(LoadedGraph {
        label: label.to_string(),
        sha256: hex::encode(Sha256::digest(&bytes)),
        graph,
    })
}

/// Runs a scenario file; the graph path is resolved against `base_dir`.
pub fn run_scenario(s: &Scenario, base_dir: &Path) -> Result<Report> {
    let path: PathBuf = base_dir.join(&s.graph);
    let loaded = load_graph(&path, &s.graph, s.directed)?;
    run_command(s.command, &loaded, &s.params)
}

/// Dispatches one command on an already loaded graph.
pub fn run_command(command: Command, loaded: &LoadedGraph, params: &Params) -> Result<Report> {
    let outputs = dispatch(command, &loaded.graph, params).map_err(|e| e.context(command.name()))?;
    Ok(Report {
        command,
        version: env!("CARGO_PKG_VERSION").to_string(),
        inputs: Inputs {
            graph: loaded.label.clone(),
            graph_sha256: loaded.sha256.clone(),
            directed: loaded.graph.is_directed(),
            n: loaded.graph.n(),
            params: params.clone(),
        },
        outputs,
    })
}

fn dispatch(command: Command, g: &Graph, p: &Params) -> Result<Outputs> {
    match command {
        Command::Transform => transform(g, p),
        Command::Evolve => evolve(g, p),
        Command::Spectrum => {
            let candidate = p.candidate.unwrap_or(Candidate::L0);
            let cand = candidate_laplacian(g, candidate, Some(&p.replication(g.n())?))?;
            Ok(Outputs::Spectrum {
                candidate,
                eigenvalues: sym_eig(&cand.matrix)?.eigenvalues,
            })
        }
        Command::Filter => filter(g, p),
        Command::Bottleneck => {
            let protocol = p.protocol.unwrap_or(Protocol::Base);
            let method = p.method(g.n());
            let model = protocol_model(g, protocol)?;
            Ok(Outputs::Bottleneck {
                protocol,
                method,
                traffic: model.traffic,
                cut: min_conductance(&model.graph, method)?,
            })
        }
        Command::Heal => heal(g, p),
        Command::Epidemic => {
            let mu = p.mu.ok_or_else(|| missing("mu", command))?;
            let beta = p.beta.ok_or_else(|| missing("beta", command))?;
            let summary = classify_epidemic(g, mu, beta, p.z)?;
            let mass = match p.steps {
                Some(steps) => {
                    let h = sis_filter(g, mu, beta)?;
                    let report = evolve_discrete(&p.signal(g.n())?, &h, steps)?;
                    Some(report.trajectory.iter().map(Signal::sum).collect())
                }
                None => None,
            };
            Ok(Outputs::Epidemic { summary, mass })
        }
    }
}

fn build_shift(g: &Graph, p: &Params, kind: OperatorKind, command: Command) -> Result<ShiftOperator> {
    let n = g.n();
    match kind {
        OperatorKind::RandomWalk => random_walk_operator(g),
        OperatorKind::Consensus => consensus_operator(g),
        OperatorKind::Sis => sis_filter(
            g,
            p.mu.ok_or_else(|| missing("mu", command))?,
            p.beta.ok_or_else(|| missing("beta", command))?,
        ),
        OperatorKind::Nonnegative => nonnegative_filter(g, &p.replication(n)?),
        OperatorKind::Dual => dual_consensus_filter(g, &p.replication(n)?),
        OperatorKind::Replicator => {
            let r = replicator_operator(g)?;
            Ok(if p.rho == Some(0.0) { r.random_walk } else { r.symmetric })
        }
        OperatorKind::DiscreteApproximation => {
            let l = z_laplacian(g, &p.replication(n)?, &p.delays(n)?)?;
            discrete_approximation(&l, p.delta.ok_or_else(|| missing("delta", command))?)
        }
        other => Err(Error::Scenario(format!(
            "`{}` cannot use operator {other:?} as a shift operator",
            command.name()
        ))),
    }
}

fn transform(g: &Graph, p: &Params) -> Result<Outputs> {
    let n = g.n();
    let kind = p.operator.ok_or_else(|| missing("operator", Command::Transform))?;
    let label = serde_json::to_value(kind)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    let graph_output = |w: Graph| Outputs::Graph {
        operator: label.clone(),
        n: w.n(),
        directed: w.is_directed(),
        traffic: w.total_traffic(),
        edges: w.edges().into_iter().map(Into::into).collect(),
    };
    let laplacian_output = |matrix, basis| Outputs::Operator {
        operator: label.clone(),
        basis: Some(basis),
        lambda_max: None,
        matrix,
    };
    match kind {
        OperatorKind::BiasTransform => Ok(graph_output(bias_transform(g, &p.bias(n)?)?)),
        OperatorKind::DelayTransform => Ok(graph_output(delay_transform(g, &p.delays(n)?)?)),
        OperatorKind::ZLaplacian => {
            let l = z_laplacian(g, &p.replication(n)?, &p.delays(n)?)?;
            Ok(laplacian_output(l.into_matrix(), 0.0))
        }
        OperatorKind::ParameterizedLaplacian => {
            let l = parameterized_laplacian(g, &p.bias(n)?, &p.delays(n)?)?;
            Ok(laplacian_output(l.into_matrix(), 0.0))
        }
        OperatorKind::Similarity => {
            let rho = p.rho.unwrap_or(0.5);
            let l = similarity_transform(&bias_transform(g, &p.bias(n)?)?, &p.delays(n)?, rho)?;
            Ok(laplacian_output(l.into_matrix(), rho))
        }
        OperatorKind::Replicator => {
            let r = replicator_operator(g)?;
            let op = if p.rho == Some(0.0) { r.random_walk } else { r.symmetric };
            Ok(Outputs::Operator {
                operator: label.clone(),
                basis: op.basis,
                lambda_max: Some(r.eigenpair.lambda),
                matrix: op.matrix,
            })
        }
        shift => {
            let op = build_shift(g, p, shift, Command::Transform)?;
            Ok(Outputs::Operator {
                operator: label.clone(),
                basis: op.basis,
                lambda_max: None,
                matrix: op.matrix,
            })
        }
    }
}

fn evolve(g: &Graph, p: &Params) -> Result<Outputs> {
    let n = g.n();
    let theta = p.signal(n)?;
    let times = match (&p.times, p.t) {
        (Some(_), Some(_)) => return Err(Error::Scenario("give either `t` or `times`, not both".into())),
        (Some(ts), None) => Some(ts.clone()),
        (None, Some(t)) => Some(vec![t]),
        (None, None) => None,
    };
    match (times, p.steps) {
        (Some(_), Some(_)) => Err(Error::Scenario(
            "`evolve` is continuous with `t`/`times` or discrete with `steps`, not both".into(),
        )),
        (Some(times), None) => {
            if times.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::Scenario("`times` must be strictly increasing".into()));
            }
            let l = z_laplacian(g, &p.replication(n)?, &p.delays(n)?)?;
            let opts = ContinuousOptions {
                epsilon: p.epsilon.unwrap_or(DEFAULT_EPSILON),
                rate: p.rate,
            };
            let signals = times
                .iter()
                .map(|&t| evolve_continuous(&theta, &l, t, &opts))
                .collect::<Result<Vec<_>>>()?;
            Ok(Outputs::Trajectory {
                mode: EvolutionMode::Continuous,
                growth: None,
                classification: None,
                signals,
            })
        }
        (None, Some(steps)) => {
            let kind = p.operator.unwrap_or(OperatorKind::Nonnegative);
            let h = build_shift(g, p, kind, Command::Evolve)?;
            let report = evolve_discrete(&theta, &h, steps)?;
            Ok(Outputs::Trajectory {
                mode: EvolutionMode::Discrete,
                growth: report.growth,
                classification: report.classification,
                signals: report.trajectory,
            })
        }
        (None, None) => Err(missing("steps` or `t", Command::Evolve)),
    }
}

fn filter(g: &Graph, p: &Params) -> Result<Outputs> {
    let candidate = p.candidate.unwrap_or(Candidate::L0);
    let band = p.band.unwrap_or_default();
    let k = p.k.ok_or_else(|| missing("k", Command::Filter))?;
    let cand = candidate_laplacian(g, candidate, Some(&p.replication(g.n())?))?;
    let decomp = sym_eig(&cand.matrix)?;
    let mask = match band {
        Band::Low => low_pass_mask(&decomp, k)?,
        Band::High => high_pass_mask(&decomp, k)?,
    };
    let reconstruction = band_reconstruct(&cand, &decomp, &mask)?;
    let top_edges = match p.percent {
        Some(x) => Some(
            top_percent_edges(&reconstruction, x)?
                .into_iter()
                .map(Into::into)
                .collect(),
        ),
        None => None,
    };
    Ok(Outputs::Filter {
        candidate,
        band,
        k,
        eigenvalues: decomp.eigenvalues,
        reconstruction,
        top_edges,
    })
}

fn heal(g: &Graph, p: &Params) -> Result<Outputs> {
    let n = g.n();
    let protocol = p.protocol.unwrap_or(Protocol::Base);
    let method = p.method(n);
    let candidates = match &p.candidates {
        Some(c) => c.clone(),
        None => {
            let a = g.weights();
            let mut all = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if a[(u, v)] == 0.0 && a[(v, u)] == 0.0 {
                        all.push((u, v));
                    }
                }
            }
            all
        }
    };
    let opts = HealOptions {
        protocol,
        bandwidth: p.bandwidth.unwrap_or(1.0),
        delay_update: p.delay_update.unwrap_or(false),
        method,
    };
    let baseline = min_conductance(&protocol_model(g, protocol)?.graph, method)?;
    Ok(Outputs::Heal {
        protocol,
        method,
        bandwidth: opts.bandwidth,
        delay_update: opts.delay_update,
        baseline,
        ranked: heal_rank(g, &candidates, &opts)?,
    })
}
