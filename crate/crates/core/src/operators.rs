//! Shift operators and Z-Laplacians built from graphs and diagonal parameters,
//! together with the inverse constructions that recover a graph from an
//! arbitrary nonnegative matrix or Z-matrix.
//!
//! Signals are row vectors, so every operator acts from the right:
//! `theta(n + 1) = theta(n) * H`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{check_len, diag_pow, Matrix};
use crate::params::{Bias, Delays, Replication};

/// Row-sum tolerance for stochastic matrices.
pub const STOCHASTIC_TOL: f64 = 1e-10;

const PERRON_TOL: f64 = 1e-12;
const PERRON_VECTOR_TOL: f64 = 1e-13;
const PERRON_MAX_ITER: usize = 100_000;

/// How a shift operator was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Recipe {
    RandomWalk,
    Consensus,
    Replicator,
    Sis,
    Nonnegative,
    Dual,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftOperator {
    pub matrix: Matrix,
    pub recipe: Recipe,
    /// Basis parameter `rho` in `[0, 1]`, when the recipe has one.
    pub basis: Option<f64>,
}

impl ShiftOperator {
    pub fn custom(matrix: Matrix) -> Result<Self> {
        matrix.check_square()?;
        matrix.check_finite()?;
        Ok(ShiftOperator {
            matrix,
            recipe: Recipe::Custom,
            basis: None,
        })
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    /// Checks the recipe-specific invariants: row-stochastic random walks,
    /// column-stochastic consensus, entrywise nonnegative filters.
    pub fn check_invariants(&self) -> Result<()> {
        match self.recipe {
            Recipe::RandomWalk => {
                check_nonnegative(&self.matrix)?;
                check_row_stochastic(&self.matrix, 1e-12)
            }
            Recipe::Consensus => {
                check_nonnegative(&self.matrix)?;
                check_row_stochastic(&self.matrix.transpose(), 1e-12)
            }
            Recipe::Nonnegative | Recipe::Replicator | Recipe::Dual => check_nonnegative(&self.matrix),
            Recipe::Sis | Recipe::Custom => Ok(()),
        }
    }
}

/// The graph and parameters a Z-Laplacian was generated from.
#[derive(Debug, Clone, PartialEq)]
pub struct ZComponents {
    pub graph: Graph,
    pub replicate: Replication,
    pub delay: Delays,
}

/// A Z-matrix `T^-1 (I - Z D_out^-1 A)`, possibly expressed in another basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ZLaplacian {
    matrix: Matrix,
    components: Option<ZComponents>,
    basis: f64,
}

impl ZLaplacian {
    /// Wraps an arbitrary Z-matrix with no generating graph attached.
    pub fn from_matrix(matrix: Matrix) -> Result<Self> {
        check_z_matrix(&matrix)?;
        Ok(ZLaplacian {
            matrix,
            components: None,
            basis: 0.0,
        })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn components(&self) -> Option<&ZComponents> {
        self.components.as_ref()
    }

    pub fn basis(&self) -> f64 {
        self.basis
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    /// Z-matrix sign condition, plus vanishing row sums for conservative
    /// processes written in the random-walk basis.
    pub fn check_invariants(&self) -> Result<()> {
        check_z_matrix(&self.matrix)?;
        let conservative = self
            .components
            .as_ref()
            .is_some_and(|c| c.replicate.as_slice().iter().all(|&z| z == 1.0));
        if conservative && self.basis == 0.0 {
            for (row, sum) in self.matrix.row_sums().into_iter().enumerate() {
                let scale = self.matrix.row(row).iter().fold(1.0_f64, |m, x| m.max(x.abs()));
                if sum.abs() > 1e-12 * scale {
                    return Err(Error::NotStochastic { row, sum });
                }
            }
        }
        Ok(())
    }
}

fn check_nonnegative(m: &Matrix) -> Result<()> {
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let value = m[(i, j)];
            if value < 0.0 {
                return Err(Error::NegativeEntry { row: i, col: j, value });
            }
        }
    }
    Ok(())
}

fn check_row_stochastic(m: &Matrix, tol: f64) -> Result<()> {
    for (row, sum) in m.row_sums().into_iter().enumerate() {
        if (sum - 1.0).abs() > tol {
            return Err(Error::NotStochastic { row, sum });
        }
    }
    Ok(())
}

fn check_z_matrix(m: &Matrix) -> Result<()> {
    let n = m.check_square()?;
    m.check_finite()?;
    for i in 0..n {
        for j in 0..n {
            if i != j && m[(i, j)] > 0.0 {
                return Err(Error::NotZMatrix {
                    row: i,
                    col: j,
                    value: m[(i, j)],
                });
            }
        }
    }
    Ok(())
}

fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::OutOfRange {
            name,
            value,
            reason: "must lie in [0, 1]",
        });
    }
    Ok(())
}

/// `-x` without producing a negative zero.
fn neg(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        -x
    }
}

/// Random walk `P = D_out^-1 A`.
pub fn random_walk_operator(g: &Graph) -> Result<ShiftOperator> {
    let d = g.out_degrees();
    let d = d.require_positive()?;
    let a = g.weights();
    Ok(ShiftOperator {
        matrix: Matrix::from_fn(g.n(), g.n(), |u, v| a[(u, v)] / d[u]),
        recipe: Recipe::RandomWalk,
        basis: Some(0.0),
    })
}

/// Consensus `P_con = A D_in^-1`, the column-stochastic dual of the random walk.
pub fn consensus_operator(g: &Graph) -> Result<ShiftOperator> {
    let d = g.in_degrees();
    let d = d.require_positive()?;
    let a = g.weights();
    Ok(ShiftOperator {
        matrix: Matrix::from_fn(g.n(), g.n(), |u, v| a[(u, v)] / d[v]),
        recipe: Recipe::Consensus,
        basis: Some(1.0),
    })
}

/// Re-expresses a walk biased towards targets `b_v` as an unbiased walk on
/// `W = A B` (directed) or `W = B A B` (undirected, keeps symmetry).
pub fn bias_transform(g: &Graph, bias: &Bias) -> Result<Graph> {
    let b = bias.check_len(g.n())?;
    let a = g.weights();
    let w = if g.is_directed() {
        Matrix::from_fn(g.n(), g.n(), |u, v| a[(u, v)] * b[v])
    } else {
        Matrix::symmetric_from_fn(g.n(), |u, v| b[u] * a[(u, v)] * b[v])
    };
    Graph::from_matrix(w, g.is_directed())
}

/// Absorbs delays into self-loops: `W = D_out (T - I) + A`.
pub fn delay_transform(g: &Graph, delay: &Delays) -> Result<Graph> {
    let tau = delay.check_len(g.n())?;
    delay.require_at_least_one()?;
    let d = g.out_degrees().values;
    let mut w = g.weights().clone();
    for u in 0..g.n() {
        w[(u, u)] += d[u] * (tau[u] - 1.0);
    }
    Graph::from_matrix(w, g.is_directed())
}

/// Builds `T^-1 (I - Z D_out^-1 A)` entry by entry, with off-diagonals
/// negated products so the sign condition holds exactly.
fn build_z_laplacian(g: &Graph, z: &[f64], tau: &[f64]) -> Result<Matrix> {
    let d = g.out_degrees();
    let d = d.require_positive()?;
    let a = g.weights();
    Ok(Matrix::from_fn(g.n(), g.n(), |u, v| {
        let flow = z[u] * (a[(u, v)] / d[u]);
        if u == v {
            (1.0 - flow) / tau[u]
        } else {
            neg(flow / tau[u])
        }
    }))
}

/// Parameterized Laplacian `T^-1 (I - D_W^-1 W)` with `W` the bias transform of `g`.
pub fn parameterized_laplacian(g: &Graph, bias: &Bias, delay: &Delays) -> Result<ZLaplacian> {
    let tau = delay.check_len(g.n())?;
    let w = bias_transform(g, bias)?;
    let ones = Replication::ones(g.n());
    let matrix = build_z_laplacian(&w, ones.as_slice(), tau)?;
    Ok(ZLaplacian {
        matrix,
        components: Some(ZComponents {
            graph: w,
            replicate: ones,
            delay: delay.clone(),
        }),
        basis: 0.0,
    })
}

/// Z-Laplacian `T^-1 (I - Z D_out^-1 A)`.
pub fn z_laplacian(g: &Graph, replicate: &Replication, delay: &Delays) -> Result<ZLaplacian> {
    let z = replicate.check_len(g.n())?;
    let tau = delay.check_len(g.n())?;
    let matrix = build_z_laplacian(g, z, tau)?;
    Ok(ZLaplacian {
        matrix,
        components: Some(ZComponents {
            graph: g.clone(),
            replicate: replicate.clone(),
            delay: delay.clone(),
        }),
        basis: 0.0,
    })
}

/// Plain random-walk Laplacian `I - D_out^-1 A`.
pub fn random_walk_laplacian(g: &Graph) -> Result<ZLaplacian> {
    z_laplacian(g, &Replication::ones(g.n()), &Delays::ones(g.n()))
}

/// Dominant eigenvalue of a nonnegative adjacency matrix with its positive
/// left eigenvector, `v A = lambda v`, normalized to unit Euclidean norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerronPair {
    pub lambda: f64,
    pub vector: Vec<f64>,
}

/// Power iteration from the all-ones vector.
///
/// Iterates with `A + I` rather than `A`: the shift leaves the Perron pair in
/// place but makes it strictly dominant, so bipartite graphs (paths, stars)
/// converge instead of oscillating between `+lambda` and `-lambda`.
pub fn perron_eigenpair(g: &Graph) -> Result<PerronPair> {
    g.require_connected()?;
    let a = g.weights();
    let n = g.n();
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut rayleigh = f64::NAN;
    for _ in 0..PERRON_MAX_ITER {
        let ax = a.left_mul(&x);
        let next_rayleigh: f64 = ax.iter().zip(&x).map(|(p, q)| p * q).sum();
        let mut y: Vec<f64> = ax.iter().zip(&x).map(|(p, q)| p + q).collect();
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        y.iter_mut().for_each(|v| *v /= norm);
        let moved = y.iter().zip(&x).fold(0.0_f64, |m, (p, q)| m.max((p - q).abs()));
        let settled = (next_rayleigh - rayleigh).abs() < PERRON_TOL * next_rayleigh.abs().max(1.0);
        x = y;
        rayleigh = next_rayleigh;
        if settled && moved < PERRON_VECTOR_TOL {
            if x.iter().any(|&v| v <= 0.0) {
                return Err(Error::Reducible);
            }
            let ax = a.left_mul(&x);
            let lambda = ax.iter().zip(&x).map(|(p, q)| p * q).sum();
            return Ok(PerronPair { lambda, vector: x });
        }
    }
    Err(Error::NotConverged {
        what: "Perron power iteration",
        iterations: PERRON_MAX_ITER,
    })
}

/// The replicator in its two bases.
#[derive(Debug, Clone, PartialEq)]
pub struct Replicator {
    pub eigenpair: PerronPair,
    /// `A / lambda_max`, the symmetric-basis form.
    pub symmetric: ShiftOperator,
    /// `D_W^-1 V_A A V_A`, the maximum-entropy walk in the random-walk basis.
    pub random_walk: ShiftOperator,
}

pub fn replicator_operator(g: &Graph) -> Result<Replicator> {
    g.require_undirected("replicator_operator")?;
    let eigenpair = perron_eigenpair(g)?;
    if eigenpair.lambda <= 0.0 {
        return Err(Error::ZeroDegree { vertex: 0, kind: "out" });
    }
    let symmetric = ShiftOperator {
        matrix: g.weights().scale(1.0 / eigenpair.lambda),
        recipe: Recipe::Replicator,
        basis: Some(0.5),
    };
    let biased = bias_transform(g, &Bias::new(eigenpair.vector.clone())?)?;
    let random_walk = random_walk_operator(&biased)?;
    Ok(Replicator {
        eigenpair,
        symmetric,
        random_walk,
    })
}

/// Change of basis `(T D_W)^(rho - 1) (D_W - W) (T D_W)^(-rho)`.
///
/// `rho = 0` is the random-walk basis, `0.5` the symmetric basis and `1` the
/// consensus basis; all share one spectrum.
pub fn similarity_transform(w: &Graph, delay: &Delays, rho: f64) -> Result<ZLaplacian> {
    w.require_undirected("similarity_transform")?;
    check_unit_interval("rho", rho)?;
    let tau = delay.check_len(w.n())?;
    let d = w.out_degrees();
    let d = d.require_positive()?;
    let s: Vec<f64> = d.iter().zip(tau).map(|(d, t)| t * d).collect();
    let left: Vec<f64> = s.iter().map(|&x| diag_pow(x, rho - 1.0)).collect();
    let right: Vec<f64> = s.iter().map(|&x| diag_pow(x, -rho)).collect();
    let a = w.weights();
    let matrix = Matrix::from_fn(w.n(), w.n(), |u, v| {
        if u == v {
            left[u] * (d[u] - a[(u, u)]) * right[u]
        } else {
            neg(left[u] * a[(u, v)] * right[v])
        }
    });
    Ok(ZLaplacian {
        matrix,
        components: Some(ZComponents {
            graph: w.clone(),
            replicate: Replication::ones(w.n()),
            delay: delay.clone(),
        }),
        basis: rho,
    })
}

/// Linearized SIS filter `H = mu A + (1 - beta) I`.
pub fn sis_filter(g: &Graph, mu: f64, beta: f64) -> Result<ShiftOperator> {
    check_unit_interval("mu", mu)?;
    check_unit_interval("beta", beta)?;
    let a = g.weights();
    let matrix = Matrix::from_fn(g.n(), g.n(), |u, v| {
        let infect = mu * a[(u, v)];
        if u == v {
            infect + (1.0 - beta)
        } else {
            infect
        }
    });
    Ok(ShiftOperator {
        matrix,
        recipe: Recipe::Sis,
        basis: None,
    })
}

/// General nonnegative filter `H = Z D_out^-1 A`.
pub fn nonnegative_filter(g: &Graph, replicate: &Replication) -> Result<ShiftOperator> {
    let z = replicate.check_len(g.n())?;
    let p = random_walk_operator(g)?.matrix;
    Ok(ShiftOperator {
        matrix: Matrix::from_fn(g.n(), g.n(), |u, v| z[u] * p[(u, v)]),
        recipe: Recipe::Nonnegative,
        basis: Some(0.0),
    })
}

/// Consensus-side dual `H = A D_in^-1 Z`; the factor depends only on the target vertex.
pub fn dual_consensus_filter(g: &Graph, replicate: &Replication) -> Result<ShiftOperator> {
    let z = replicate.check_len(g.n())?;
    let p = consensus_operator(g)?.matrix;
    Ok(ShiftOperator {
        matrix: Matrix::from_fn(g.n(), g.n(), |u, v| p[(u, v)] * z[v]),
        recipe: Recipe::Dual,
        basis: Some(1.0),
    })
}

/// One member `A = diag(gamma) P` of the family of graphs whose random walk is `P`.
pub fn adjacency_family_member(p: &Matrix, gamma: &[f64]) -> Result<Graph> {
    let n = p.check_square()?;
    p.check_finite()?;
    check_len(gamma, n)?;
    check_nonnegative(p)?;
    check_row_stochastic(p, STOCHASTIC_TOL)?;
    Replication::new(gamma.to_vec()).map_err(|e| match e {
        Error::InvalidParameter {
            index, value, reason, ..
        } => Error::InvalidParameter {
            name: "gamma",
            index,
            value,
            reason,
        },
        other => other,
    })?;
    Graph::from_matrix(Matrix::from_fn(n, n, |u, v| gamma[u] * p[(u, v)]), true)
}

/// Dual graph and filter of a nonnegative filter under basis `rho`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualFilter {
    /// `A' = Z P_A`.
    pub graph: Graph,
    /// `Z' = D'`, the out-degrees of `A'`.
    pub replicate: Vec<f64>,
    /// `(D'^-1 Z')^(1 - rho) A' (D'^-1 Z')^rho`.
    pub filter: Matrix,
}

pub fn basis_unify(g: &Graph, replicate: &Replication, rho: f64) -> Result<DualFilter> {
    check_unit_interval("rho", rho)?;
    let z = replicate.check_len(g.n())?;
    let p = random_walk_operator(g)?.matrix;
    let n = g.n();
    let dual = Graph::from_matrix(Matrix::from_fn(n, n, |u, v| z[u] * p[(u, v)]), true)?;
    let d_dual = dual.out_degrees().values;
    let z_dual = d_dual.clone();
    let ratio: Vec<f64> = z_dual.iter().zip(&d_dual).map(|(z, d)| z / d).collect();
    let left: Vec<f64> = ratio.iter().map(|&r| diag_pow(r, 1.0 - rho)).collect();
    let right: Vec<f64> = ratio.iter().map(|&r| diag_pow(r, rho)).collect();
    let filter = dual.weights().scale_rows_cols(&left, &right);
    Ok(DualFilter {
        graph: dual,
        replicate: z_dual,
        filter,
    })
}

/// Reads an arbitrary nonnegative matrix as `Z D_out^-1 A` with `A = H` and
/// `Z` the row sums of `H`.
pub fn decompose_nonnegative(h: &Matrix) -> Result<(Graph, Replication)> {
    h.check_square()?;
    h.check_finite()?;
    check_nonnegative(h)?;
    let sums = h.row_sums();
    if let Some(row) = sums.iter().position(|&s| s <= 0.0) {
        return Err(Error::ZeroRow { row });
    }
    Ok((Graph::from_matrix(h.clone(), true)?, Replication::new(sums)?))
}

/// A Z-matrix read back as a Z-Laplacian on a graph with self-loops.
#[derive(Debug, Clone, PartialEq)]
pub struct ZMatrixDecomposition {
    /// `A = I - delta L`.
    pub graph: Graph,
    /// Row sums of `A`.
    pub replicate: Replication,
    /// Uniform delay `T = delta I`.
    pub delta: f64,
}

impl ZMatrixDecomposition {
    pub fn delay(&self) -> Delays {
        Delays::relaxed(vec![self.delta; self.graph.n()]).expect("delta is positive")
    }

    /// `(1/delta) (I - Z D_out^-1 A)`, which should give back the input matrix.
    pub fn reconstruct(&self) -> Result<Matrix> {
        build_z_laplacian(
            &self.graph,
            self.replicate.as_slice(),
            &vec![self.delta; self.graph.n()],
        )
    }
}

/// Decomposes an arbitrary Z-matrix. Uses `delta = 1` when `I - L` is already
/// nonnegative with a nonnegative diagonal in `L`, otherwise `1 / max|L_ii|`.
pub fn decompose_z_matrix(l: &Matrix) -> Result<ZMatrixDecomposition> {
    check_z_matrix(l)?;
    let n = l.rows();
    let diag = l.diag();
    let unit_ok = diag.iter().all(|&x| (0.0..=1.0).contains(&x));
    let delta = if unit_ok {
        1.0
    } else {
        1.0 / diag.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    };
    let a = Matrix::from_fn(n, n, |u, v| {
        if u == v {
            let x = 1.0 - delta * l[(u, u)];
            // 1 - (1/m) * m can land one ulp below zero
            if x < 0.0 && x > -1e-12 {
                0.0
            } else {
                x
            }
        } else {
            neg(delta * l[(u, v)])
        }
    });
    let sums = a.row_sums();
    if let Some(row) = sums.iter().position(|&s| s <= 0.0) {
        return Err(Error::ZeroRow { row });
    }
    Ok(ZMatrixDecomposition {
        graph: Graph::from_matrix(a, true)?,
        replicate: Replication::new(sums)?,
        delta,
    })
}
