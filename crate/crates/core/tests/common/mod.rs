#![allow(dead_code, clippy::needless_range_loop)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zlap_core::{Graph, Matrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn positive_vec(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}

/// Random connected graph: a random spanning tree (or, when directed, a
/// random Hamiltonian cycle so every vertex has in- and out-edges) plus
/// extra edges with probability `p`. Weights are 1 when `weighted` is false.
pub fn random_connected(rng: &mut ChaCha8Rng, n: usize, p: f64, directed: bool, weighted: bool) -> Graph {
    let weight = |rng: &mut ChaCha8Rng| if weighted { rng.gen_range(0.2..3.0) } else { 1.0 };
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut present = vec![vec![false; n]; n];
    let mut edges = Vec::new();
    if directed {
        for i in 0..n {
            let (u, v) = (order[i], order[(i + 1) % n]);
            if u != v && !present[u][v] {
                present[u][v] = true;
                edges.push((u, v, weight(rng)));
            }
        }
    } else {
        for i in 1..n {
            let u = order[i];
            let v = order[rng.gen_range(0..i)];
            present[u][v] = true;
            present[v][u] = true;
            edges.push((u, v, weight(rng)));
        }
    }
    for u in 0..n {
        for v in 0..n {
            if u == v || present[u][v] || (!directed && v < u) {
                continue;
            }
            if rng.gen_bool(p) {
                present[u][v] = true;
                if !directed {
                    present[v][u] = true;
                }
                edges.push((u, v, weight(rng)));
            }
        }
    }
    Graph::new(n, &edges, directed).expect("valid random graph")
}

/// Random probability vector.
pub fn probability_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let v = positive_vec(rng, n, 0.0, 1.0);
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

/// Biased transition law computed directly from its definition:
/// `P_uv = b_v a_uv / sum_k b_k a_uk`.
pub fn biased_walk_law(g: &Graph, b: &[f64]) -> Matrix {
    let a = g.weights();
    let n = g.n();
    Matrix::from_fn(n, n, |u, v| {
        let norm: f64 = (0..n).map(|k| b[k] * a[(u, k)]).sum();
        b[v] * a[(u, v)] / norm
    })
}

/// Mean number of steps the chain with transition matrix `phi` stays at
/// `start` per visit, measured over `visits` simulated sojourns.
pub fn mean_sojourn(phi: &Matrix, start: usize, visits: usize, rng: &mut ChaCha8Rng) -> f64 {
    let row = phi.row(start);
    let mut total = 0u64;
    for _ in 0..visits {
        loop {
            total += 1;
            let r: f64 = rng.gen();
            let mut acc = 0.0;
            let mut next = row.len() - 1;
            for (j, &p) in row.iter().enumerate() {
                acc += p;
                if r < acc {
                    next = j;
                    break;
                }
            }
            if next != start {
                break;
            }
        }
    }
    total as f64 / visits as f64
}

pub fn to_nalgebra(m: &Matrix) -> nalgebra::DMatrix<f64> {
    nalgebra::DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

/// Eigenvalues of a general real matrix with a real spectrum, ascending.
/// Fails if any eigenvalue has a non-negligible imaginary part.
pub fn real_spectrum(m: &Matrix) -> Vec<f64> {
    let eig = to_nalgebra(m).complex_eigenvalues();
    let mut out: Vec<f64> = eig
        .iter()
        .map(|c| {
            assert!(c.im.abs() < 1e-9, "complex eigenvalue {c}");
            c.re
        })
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
