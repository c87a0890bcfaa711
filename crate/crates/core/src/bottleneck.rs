//! Conductance, minimum-conductance bipartitions, communication protocol
//! models and edge-insertion healing.
//!
//! The cut between `S` and its complement sums both directions,
//! `sum_{i in S, j not in S} (w_ij + w_ji)`, so conductances are twice the
//! single-counted textbook value on undirected graphs.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::Matrix;
use crate::operators::{delay_transform, similarity_transform, z_laplacian, ZLaplacian};
use crate::params::{Delays, Replication};
use crate::spectral::sym_eig;

/// Largest graph the exhaustive search accepts.
pub const BRUTE_FORCE_MAX: usize = 24;

const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutResult {
    /// Sorted vertex indices of `S`.
    pub subset: Vec<usize>,
    pub cut: f64,
    pub vol_s: f64,
    pub vol_complement: f64,
    pub conductance: f64,
}

fn symmetrized(w: &Graph) -> Matrix {
    let a = w.weights();
    Matrix::symmetric_from_fn(w.n(), |i, j| if i == j { 0.0 } else { a[(i, j)] + a[(j, i)] })
}

fn evaluate(c: &Matrix, degrees: &[f64], in_s: &[bool]) -> (f64, f64, f64) {
    let n = in_s.len();
    let mut cut = 0.0;
    let mut vol_s = 0.0;
    let mut vol_c = 0.0;
    for i in 0..n {
        if in_s[i] {
            vol_s += degrees[i];
            for j in 0..n {
                if !in_s[j] {
                    cut += c[(i, j)];
                }
            }
        } else {
            vol_c += degrees[i];
        }
    }
    (cut, vol_s, vol_c)
}

/// `phi(S) = cut(S, S') / min(vol S, vol S')` with volumes taken from out-degrees.
pub fn conductance(w: &Graph, subset: &[usize]) -> Result<CutResult> {
    let n = w.n();
    let mut in_s = vec![false; n];
    for &v in subset {
        if v >= n {
            return Err(Error::IndexOutOfRange { index: v, n });
        }
        if in_s[v] {
            return Err(Error::InvalidSubset(format!("vertex {v} listed twice")));
        }
        in_s[v] = true;
    }
    if subset.is_empty() || subset.len() == n {
        return Err(Error::InvalidSubset(format!(
            "S must be a nonempty proper subset, got {} of {n} vertices",
            subset.len()
        )));
    }
    cut_result(&symmetrized(w), &w.out_degrees().values, &in_s)
}

fn cut_result(c: &Matrix, degrees: &[f64], in_s: &[bool]) -> Result<CutResult> {
    let (cut, vol_s, vol_complement) = evaluate(c, degrees, in_s);
    let smaller = vol_s.min(vol_complement);
    if smaller <= 0.0 {
        return Err(Error::InvalidSubset("one side has zero volume".into()));
    }
    Ok(CutResult {
        subset: (0..in_s.len()).filter(|&i| in_s[i]).collect(),
        cut,
        vol_s,
        vol_complement,
        conductance: cut / smaller,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Brute,
    Sweep,
}

/// The side of a bipartition that gets reported: the smaller one, or the
/// lexicographically smaller one when sizes match.
fn reported_side(in_s: &[bool]) -> Vec<bool> {
    let size = in_s.iter().filter(|&&x| x).count();
    let n = in_s.len();
    let flip = match (2 * size).cmp(&n) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => {
            let first_s = in_s.iter().position(|&x| x);
            let first_c = in_s.iter().position(|&x| !x);
            first_c < first_s
        }
    };
    if flip {
        in_s.iter().map(|x| !x).collect()
    } else {
        in_s.to_vec()
    }
}

/// Total order on tied minimizers: smaller reported side, then lexicographic.
fn tie_key(in_s: &[bool]) -> (usize, Vec<usize>) {
    let side = reported_side(in_s);
    let members: Vec<usize> = (0..side.len()).filter(|&i| side[i]).collect();
    (members.len(), members)
}

fn is_tied(phi: f64, best: f64) -> bool {
    phi - best <= TIE_TOL * best.abs()
}

/// Minimum-conductance bipartition, exact (`Brute`) or by a spectral sweep cut.
pub fn min_conductance(w: &Graph, method: Method) -> Result<CutResult> {
    let n = w.n();
    if n < 2 {
        return Err(Error::InvalidSubset("a bipartition needs at least two vertices".into()));
    }
    w.require_connected()?;
    match method {
        Method::Brute => brute_force(w),
        Method::Sweep => sweep(w),
    }
}

fn mask_to_side(mask: u32, n: usize) -> Vec<bool> {
    (0..n).map(|i| mask >> i & 1 == 1).collect()
}

fn brute_force(w: &Graph) -> Result<CutResult> {
    let n = w.n();
    if n > BRUTE_FORCE_MAX {
        return Err(Error::TooLarge {
            n,
            max: BRUTE_FORCE_MAX,
        });
    }
    let c = symmetrized(w);
    let degrees = w.out_degrees().values;
    let full: u32 = (1u32 << n) - 1;
    // vertex 0 always sits in S, so each bipartition is visited once
    let masks = || {
        (0..1u32 << (n - 1))
            .into_par_iter()
            .map(|m| (m << 1) | 1)
            .filter(|&m| m != full)
    };
    let phi = |mask: u32| {
        let side = mask_to_side(mask, n);
        let (cut, a, b) = evaluate(&c, &degrees, &side);
        cut / a.min(b)
    };
    let best = masks().map(phi).reduce(|| f64::INFINITY, f64::min);
    let winner = masks()
        .filter(|&m| is_tied(phi(m), best))
        .map(|m| tie_key(&mask_to_side(m, n)))
        .min()
        .expect("at least one bipartition");
    let mut in_s = vec![false; n];
    winner.1.iter().for_each(|&i| in_s[i] = true);
    cut_result(&c, &degrees, &in_s)
}

fn sweep(w: &Graph) -> Result<CutResult> {
    w.require_undirected("sweep cut")?;
    let n = w.n();
    let l = similarity_transform(w, &Delays::ones(n), 0.5)?;
    let fiedler = sym_eig(l.matrix())?.eigenvectors.col(1);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| fiedler[i].total_cmp(&fiedler[j]).then(i.cmp(&j)));

    let c = symmetrized(w);
    let degrees = w.out_degrees().values;
    let mut prefixes = Vec::with_capacity(n - 1);
    let mut in_s = vec![false; n];
    for &v in &order[..n - 1] {
        in_s[v] = true;
        let (cut, a, b) = evaluate(&c, &degrees, &in_s);
        prefixes.push((cut / a.min(b), in_s.clone()));
    }
    let best = prefixes.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let winner = prefixes
        .iter()
        .filter(|p| is_tied(p.0, best))
        .map(|p| tie_key(&p.1))
        .min()
        .expect("at least one prefix");
    let mut in_s = vec![false; n];
    winner.1.iter().for_each(|&i| in_s[i] = true);
    cut_result(&c, &degrees, &in_s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    /// One unit of traffic per edge, unit delays.
    Base,
    /// Random access: each vertex waits for its degree, `T = D`.
    RandomAccess,
    /// TDMA with the time-divided bandwidth saturated and leftover traffic as self-loops.
    TdmaSaturated,
    /// TDMA with traffic matched to the divided bandwidth, `W = D^-1 A D^-1`.
    TdmaMatched,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolModel {
    pub protocol: Protocol,
    /// Transformed graph with delays absorbed into self-loops.
    pub graph: Graph,
    pub delay: Delays,
    /// `T^-1 (I - D^-1 A)` on the pre-delay graph, equal to `I - D_W^-1 W`.
    pub laplacian: ZLaplacian,
    pub traffic: f64,
}

pub fn protocol_model(g: &Graph, protocol: Protocol) -> Result<ProtocolModel> {
    g.require_undirected("protocol_model")?;
    let n = g.n();
    let d = g.out_degrees();
    let d = d.require_positive()?.to_vec();
    let tdma_graph = || {
        let a = g.weights();
        Graph::from_matrix(Matrix::symmetric_from_fn(n, |u, v| a[(u, v)] / (d[u] * d[v])), false)
    };
    let (pre, delay) = match protocol {
        Protocol::Base => (g.clone(), Delays::ones(n)),
        Protocol::RandomAccess => (g.clone(), Delays::new(d.clone())?),
        Protocol::TdmaSaturated => {
            let w = tdma_graph()?;
            let tau: Vec<f64> = d.iter().zip(w.out_degrees().values).map(|(da, dw)| da / dw).collect();
            (w, Delays::new(tau)?)
        }
        Protocol::TdmaMatched => (tdma_graph()?, Delays::ones(n)),
    };
    let graph = delay_transform(&pre, &delay)?;
    let laplacian = z_laplacian(&pre, &Replication::ones(n), &delay)?;
    let traffic = graph.total_traffic();
    Ok(ProtocolModel {
        protocol,
        graph,
        delay,
        laplacian,
        traffic,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HealResult {
    pub edge: (usize, usize),
    pub conductance: f64,
    pub cut: CutResult,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HealOptions {
    pub protocol: Protocol,
    /// Weight of every inserted edge.
    pub bandwidth: f64,
    /// Recompute delays from the increased degrees; otherwise the old
    /// transformed graph keeps its self-loops and only gains the new edge.
    pub delay_update: bool,
    pub method: Method,
}

/// Scores each candidate edge by the minimum conductance after inserting it,
/// best (highest) first. Ties fall back to edge order.
pub fn heal_rank(g: &Graph, candidates: &[(usize, usize)], opts: &HealOptions) -> Result<Vec<HealResult>> {
    if !(opts.bandwidth.is_finite() && opts.bandwidth >= 0.0) {
        return Err(Error::OutOfRange {
            name: "bandwidth",
            value: opts.bandwidth,
            reason: "must be finite and non-negative",
        });
    }
    let base = protocol_model(g, opts.protocol)?;
    let mut ranked = candidates
        .par_iter()
        .map(|&(u, v)| {
            let healed = if opts.delay_update {
                protocol_model(&g.add_edge(u, v, opts.bandwidth)?, opts.protocol)?.graph
            } else {
                base.graph.add_edge(u, v, opts.bandwidth)?
            };
            let cut = min_conductance(&healed, opts.method).map_err(|e| e.context(format!("candidate ({u}, {v})")))?;
            Ok(HealResult {
                edge: (u, v),
                conductance: cut.conductance,
                cut,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|a, b| b.conductance.total_cmp(&a.conductance).then(a.edge.cmp(&b.edge)));
    Ok(ranked)
}
