//! Symmetric eigendecomposition and spectral band filtering of graph Laplacians.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::Matrix;
use crate::params::Replication;

const SYMMETRY_TOL: f64 = 1e-10;
const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the unit eigenvector for `eigenvalues[k]`.
    pub eigenvectors: Matrix,
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V diag(lambda) V^T`.
    pub fn reconstruct(&self) -> Matrix {
        let v = &self.eigenvectors;
        let n = self.n();
        Matrix::symmetric_from_fn(n, |i, j| {
            (0..n).map(|k| v[(i, k)] * self.eigenvalues[k] * v[(j, k)]).sum()
        })
    }
}

fn check_symmetric(m: &Matrix) -> Result<usize> {
    let n = m.check_square()?;
    m.check_finite()?;
    for i in 0..n {
        for j in i + 1..n {
            if (m[(i, j)] - m[(j, i)]).abs() >= SYMMETRY_TOL {
                return Err(Error::Asymmetric { u: i, v: j });
            }
        }
    }
    Ok(n)
}

/// Cyclic Jacobi eigensolver for symmetric matrices.
///
/// Sweeps rotate every off-diagonal pair in row order until the off-diagonal
/// Frobenius mass drops below `1e-12 * ||M||_F`. Eigenpairs come back sorted
/// ascending (ties by original index) and each eigenvector has its
/// largest-magnitude entry positive.
pub fn sym_eig(m: &Matrix) -> Result<SpectralDecomposition> {
    let n = check_symmetric(m)?;
    let mut a = Matrix::symmetric_from_fn(n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
    let mut v = Matrix::identity(n);
    let target = JACOBI_TOL * a.frobenius();
    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > target {
        return Err(Error::NotConverged {
            what: "Jacobi eigensolver",
            iterations: JACOBI_MAX_SWEEPS,
        });
    }

    let diag = a.diag();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&k| diag[k]).collect();
    let mut eigenvectors = Matrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let mut x = v.col(k);
        let peak = x.iter().fold(0.0_f64, |acc, e| acc.max(e.abs()));
        let lead = x.iter().position(|e| e.abs() >= peak * (1.0 - 1e-10)).unwrap_or(0);
        if x[lead] < 0.0 {
            x.iter_mut().for_each(|e| *e = -*e);
        }
        for (row, e) in x.into_iter().enumerate() {
            eigenvectors[(row, col)] = e;
        }
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)] * a[(i, j)];
            }
        }
    }
    sum.sqrt()
}

/// One Jacobi rotation zeroing `a[p][q]`, accumulated into the columns of `v`.
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    if apq == 0.0 {
        return;
    }
    let n = a.rows();
    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Candidate {
    /// Symmetric normalized Laplacian `D^-1/2 (D - A) D^-1/2`.
    L0,
    /// Normalized Laplacian of `W' = D^-1 A D^-1`.
    L1,
    /// `Z^1/2 D^-1/2 (Z^-1 D - A) D^-1/2 Z^1/2`.
    L2,
}

/// A candidate Laplacian with the normalizers it was built from. The band
/// reconstruction uses the same normalizers, so the full spectrum gives back
/// `base` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateLaplacian {
    pub which: Candidate,
    pub matrix: Matrix,
    /// The adjacency this Laplacian normalizes (`A`, or `W'` for L1).
    pub base: Matrix,
    pub degrees: Vec<f64>,
    pub replicate: Vec<f64>,
}

/// Builds L0, L1 or L2. `replicate` is only read for L2, where it defaults to ones.
pub fn candidate_laplacian(g: &Graph, which: Candidate, replicate: Option<&Replication>) -> Result<CandidateLaplacian> {
    g.require_undirected("candidate_laplacian")?;
    let n = g.n();
    let degrees = g.out_degrees();
    let d = degrees.require_positive()?.to_vec();
    let (base, degrees, replicate) = match which {
        Candidate::L0 => (g.weights().clone(), d, vec![1.0; n]),
        Candidate::L1 => {
            let a = g.weights();
            let w = Matrix::symmetric_from_fn(n, |u, v| a[(u, v)] / (d[u] * d[v]));
            let dw = w.row_sums();
            (w, dw, vec![1.0; n])
        }
        Candidate::L2 => {
            let z = match replicate {
                Some(z) => z.check_len(n)?.to_vec(),
                None => vec![1.0; n],
            };
            (g.weights().clone(), d, z)
        }
    };
    let s: Vec<f64> = replicate.iter().zip(&degrees).map(|(z, d)| (z / d).sqrt()).collect();
    let matrix = Matrix::symmetric_from_fn(n, |u, v| {
        if u == v {
            s[u] * (degrees[u] / replicate[u] - base[(u, u)]) * s[u]
        } else if base[(u, v)] == 0.0 {
            0.0
        } else {
            -(s[u] * base[(u, v)] * s[v])
        }
    });
    Ok(CandidateLaplacian {
        which,
        matrix,
        base,
        degrees,
        replicate,
    })
}

/// Eigen-indices (by ascending-eigenvalue rank) kept by a band filter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BandMask {
    pub n: usize,
    pub keep: Vec<usize>,
}

impl BandMask {
    pub fn new(n: usize, mut keep: Vec<usize>) -> Result<Self> {
        if let Some(&index) = keep.iter().find(|&&k| k >= n) {
            return Err(Error::IndexOutOfRange { index, n });
        }
        keep.sort_unstable();
        keep.dedup();
        Ok(BandMask { n, keep })
    }

    pub fn all(n: usize) -> Self {
        BandMask {
            n,
            keep: (0..n).collect(),
        }
    }

    pub fn complement(&self) -> Self {
        BandMask {
            n: self.n,
            keep: (0..self.n).filter(|k| self.keep.binary_search(k).is_err()).collect(),
        }
    }

    pub fn contains(&self, k: usize) -> bool {
        self.keep.binary_search(&k).is_ok()
    }
}

fn check_k(decomp: &SpectralDecomposition, k: usize) -> Result<usize> {
    let n = decomp.n();
    if k > n {
        return Err(Error::OutOfRange {
            name: "k",
            value: k as f64,
            reason: "must not exceed the number of eigenvalues",
        });
    }
    Ok(n)
}

/// Keeps the `k` smallest eigenvalues.
pub fn low_pass_mask(decomp: &SpectralDecomposition, k: usize) -> Result<BandMask> {
    let n = check_k(decomp, k)?;
    Ok(BandMask {
        n,
        keep: (0..k).collect(),
    })
}

/// Keeps all but the `k` smallest eigenvalues.
pub fn high_pass_mask(decomp: &SpectralDecomposition, k: usize) -> Result<BandMask> {
    let n = check_k(decomp, k)?;
    Ok(BandMask {
        n,
        keep: (k..n).collect(),
    })
}

/// `A' = s (I - V Lambda' V^T) s` with `s = (D / Z)^1/2`, where `Lambda'`
/// zeroes every eigenvalue outside the mask.
pub fn band_reconstruct(cand: &CandidateLaplacian, decomp: &SpectralDecomposition, mask: &BandMask) -> Result<Matrix> {
    let n = cand.matrix.rows();
    for found in [decomp.n(), mask.n] {
        if found != n {
            return Err(Error::DimensionMismatch { expected: n, found });
        }
    }
    let s: Vec<f64> = cand
        .degrees
        .iter()
        .zip(&cand.replicate)
        .map(|(d, z)| (d / z).sqrt())
        .collect();
    let v = &decomp.eigenvectors;
    let lambda = &decomp.eigenvalues;
    Ok(Matrix::symmetric_from_fn(n, |i, j| {
        let filtered: f64 = mask.keep.iter().map(|&k| v[(i, k)] * lambda[k] * v[(j, k)]).sum();
        let identity = if i == j { 1.0 } else { 0.0 };
        s[i] * (identity - filtered) * s[j]
    }))
}

/// The top `floor(x / 100 * n(n-1)/2)` unordered off-diagonal pairs by weight,
/// zero-weight pairs included. Ties go to the lexicographically smaller pair.
pub fn top_percent_edges(a: &Matrix, percent: f64) -> Result<Vec<(usize, usize, f64)>> {
    let n = check_symmetric(a)?;
    if !(percent > 0.0 && percent <= 100.0) {
        return Err(Error::OutOfRange {
            name: "percent",
            value: percent,
            reason: "must lie in (0, 100]",
        });
    }
    let pairs = n * (n - 1) / 2;
    let count = ((percent * pairs as f64) / 100.0).floor() as usize;
    let mut all = Vec::with_capacity(pairs);
    for u in 0..n {
        for v in u + 1..n {
            all.push((u, v, a[(u, v)]));
        }
    }
    all.sort_by(|x, y| match y.2.total_cmp(&x.2) {
        Ordering::Equal => (x.0, x.1).cmp(&(y.0, y.1)),
        other => other,
    });
    all.truncate(count.min(pairs));
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::*;
    use approx::assert_abs_diff_eq;

    fn assert_vec(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn diagonal_input() {
        let e = sym_eig(&Matrix::from_diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 2.0, 3.0]);
        assert_eq!(e.eigenvectors.col(0), vec![0.0, 1.0, 0.0]);
        assert_eq!(e.eigenvectors.col(1), vec![0.0, 0.0, 1.0]);
        assert_eq!(e.eigenvectors.col(2), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn laplacian_spectra() {
        let l0 = candidate_laplacian(&path(3), Candidate::L0, None).unwrap();
        assert_vec(&sym_eig(&l0.matrix).unwrap().eigenvalues, &[0.0, 1.0, 2.0], 1e-12);

        let k3 = Matrix::identity(3).sub(&complete(3).weights().scale(0.5));
        let e = sym_eig(&k3).unwrap();
        assert_vec(&e.eigenvalues, &[0.0, 1.5, 1.5], 1e-12);
        assert!(e.reconstruct().max_abs_diff(&k3) < 1e-12);
        let vtv = e.eigenvectors.transpose().matmul(&e.eigenvectors);
        assert!(vtv.max_abs_diff(&Matrix::identity(3)) < 1e-12);
    }

    #[test]
    fn asymmetric_rejected() {
        let m = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.1, 0.0]]).unwrap();
        assert!(matches!(sym_eig(&m), Err(Error::Asymmetric { .. })));
    }

    #[test]
    fn candidate_examples() {
        let g = dumbbell(4).add_edge(2, 6, 0.5).unwrap();
        let l0 = candidate_laplacian(&g, Candidate::L0, None).unwrap();
        let l2 = candidate_laplacian(&g, Candidate::L2, Some(&Replication::ones(8))).unwrap();
        assert!(l2.matrix.max_abs_diff(&l0.matrix) == 0.0);
        assert!(l0.matrix.is_symmetric(0.0));

        let c = cycle(6);
        let l0 = candidate_laplacian(&c, Candidate::L0, None).unwrap();
        let l1 = candidate_laplacian(&c, Candidate::L1, None).unwrap();
        assert!(l1.matrix.max_abs_diff(&l0.matrix) < 1e-12);

        let directed = Graph::new(2, &[(0, 1, 1.0), (1, 0, 1.0)], true).unwrap();
        assert!(candidate_laplacian(&directed, Candidate::L0, None).is_err());
    }

    #[test]
    fn reconstruction_identities() {
        let g = dumbbell(3).add_edge(0, 5, 2.0).unwrap();
        let z = Replication::new(vec![1.0, 2.0, 0.5, 1.5, 3.0, 0.8]).unwrap();
        let cand = candidate_laplacian(&g, Candidate::L2, Some(&z)).unwrap();
        let e = sym_eig(&cand.matrix).unwrap();
        let full = band_reconstruct(&cand, &e, &BandMask::all(6)).unwrap();
        assert!(full.max_abs_diff(g.weights()) < 1e-8);

        let empty = band_reconstruct(&cand, &e, &BandMask::new(6, vec![]).unwrap()).unwrap();
        let d = g.out_degrees().values;
        for i in 0..6 {
            assert_abs_diff_eq!(empty[(i, i)], d[i] / z.as_slice()[i], epsilon = 1e-12);
        }

        let low = low_pass_mask(&e, 2).unwrap();
        let sum = band_reconstruct(&cand, &e, &low)
            .unwrap()
            .add(&band_reconstruct(&cand, &e, &low.complement()).unwrap());
        let expected = g.weights().add(&Matrix::from_diag(
            &d.iter().zip(z.as_slice()).map(|(d, z)| d / z).collect::<Vec<_>>(),
        ));
        assert!(sum.max_abs_diff(&expected) < 1e-8);
    }

    #[test]
    fn masks() {
        let e = sym_eig(&Matrix::from_diag(&(0..10).map(f64::from).collect::<Vec<_>>())).unwrap();
        assert_eq!(low_pass_mask(&e, 4).unwrap().keep, vec![0, 1, 2, 3]);
        assert!(low_pass_mask(&e, 0).unwrap().keep.is_empty());
        assert_eq!(low_pass_mask(&e, 10).unwrap().keep.len(), 10);
        assert_eq!(high_pass_mask(&e, 4).unwrap().keep, (4..10).collect::<Vec<_>>());
        assert!(low_pass_mask(&e, 11).is_err());
        assert!(BandMask::new(3, vec![3]).is_err());
    }

    #[test]
    fn top_percent_examples() {
        let five = complete(5);
        assert_eq!(top_percent_edges(five.weights(), 20.0).unwrap().len(), 2);
        assert_eq!(top_percent_edges(five.weights(), 100.0).unwrap().len(), 10);

        let p4 = Graph::new(4, &[(0, 1, 3.0), (1, 2, 2.0), (2, 3, 1.0)], false).unwrap();
        assert_eq!(top_percent_edges(p4.weights(), 25.0).unwrap(), vec![(0, 1, 3.0)]);
        assert_eq!(
            top_percent_edges(p4.weights(), 50.0).unwrap(),
            vec![(0, 1, 3.0), (1, 2, 2.0), (2, 3, 1.0)]
        );
        let all = top_percent_edges(p4.weights(), 100.0).unwrap();
        assert_eq!(all[3], (0, 2, 0.0));

        assert!(top_percent_edges(p4.weights(), 0.0).is_err());
        let asym = Matrix::from_rows(vec![vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(top_percent_edges(&asym, 50.0).is_err());
    }
}
