//! Signal evolution: discrete filtering, uniformized continuous-time evolution
//! under a Z-Laplacian, a matrix-exponential oracle, and SIS threshold analysis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{check_len, Matrix};
use crate::operators::{perron_eigenpair, sis_filter, Recipe, ShiftOperator, ZLaplacian};
use crate::params::Delays;

/// Default right-tail mass dropped from the Poisson series.
pub const DEFAULT_EPSILON: f64 = 1e-12;

const GROWTH_TOL: f64 = 1e-9;
const GROWTH_MAX_ITER: usize = 100_000;
const TAYLOR_TOL: f64 = 1e-18;

/// A row-vector graph signal at a point in time (or a step count).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Signal {
    pub values: Vec<f64>,
    pub time: f64,
}

impl Signal {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::at(values, 0.0)
    }

    pub fn at(values: Vec<f64>, time: f64) -> Result<Self> {
        if let Some(col) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { row: 0, col });
        }
        Ok(Signal { values, time })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Expanding,
    Conservative,
    Shrinking,
}

impl Classification {
    /// Trichotomy on a dominant eigenvalue, with a `1e-9` band around 1.
    pub fn from_growth(growth: f64) -> Self {
        if growth > 1.0 + GROWTH_TOL {
            Classification::Expanding
        } else if growth < 1.0 - GROWTH_TOL {
            Classification::Shrinking
        } else {
            Classification::Conservative
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionReport {
    pub trajectory: Vec<Signal>,
    /// Dominant eigenvalue of the filter; `None` when it has negative entries.
    pub growth: Option<f64>,
    pub classification: Option<Classification>,
}

/// Spectral radius of a nonnegative square matrix.
///
/// Power iteration on `M + I` acting on row vectors, measured in the 1-norm.
/// The shift keeps periodic matrices from oscillating.
pub fn nonnegative_spectral_radius(m: &Matrix) -> Result<f64> {
    let n = m.check_square()?;
    let mut x = vec![1.0 / n as f64; n];
    let mut estimate = f64::NAN;
    for _ in 0..GROWTH_MAX_ITER {
        let mut y = m.left_mul(&x);
        y.iter_mut().zip(&x).for_each(|(a, b)| *a += b);
        let norm: f64 = y.iter().sum();
        y.iter_mut().for_each(|v| *v /= norm);
        let next = norm - 1.0;
        let moved = y.iter().zip(&x).fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()));
        x = y;
        if (next - estimate).abs() <= 1e-14 * norm && moved < 1e-13 {
            return Ok(next);
        }
        estimate = next;
    }
    Err(Error::NotConverged {
        what: "growth power iteration",
        iterations: GROWTH_MAX_ITER,
    })
}

/// `theta(n + 1) = theta(n) * H`, recording every step.
pub fn evolve_discrete(theta0: &Signal, h: &ShiftOperator, steps: usize) -> Result<EvolutionReport> {
    check_len(&theta0.values, h.n())?;
    let mut trajectory = Vec::with_capacity(steps + 1);
    trajectory.push(Signal {
        values: theta0.values.clone(),
        time: 0.0,
    });
    let mut current = theta0.values.clone();
    for step in 1..=steps {
        current = h.matrix.left_mul(&current);
        trajectory.push(Signal {
            values: current.clone(),
            time: step as f64,
        });
    }
    let nonnegative = h.matrix.as_slice().iter().all(|&x| x >= 0.0);
    let growth = if h.recipe == Recipe::RandomWalk {
        Some(1.0)
    } else if nonnegative {
        Some(nonnegative_spectral_radius(&h.matrix)?)
    } else {
        None
    };
    Ok(EvolutionReport {
        trajectory,
        growth,
        classification: growth.map(Classification::from_growth),
    })
}

/// `theta0 * (h_0 I + h_1 S + ... + h_l S^l)` by Horner's rule on the vector.
pub fn apply_polynomial_filter(theta0: &Signal, s: &ShiftOperator, coeffs: &[f64]) -> Result<Signal> {
    check_len(&theta0.values, s.n())?;
    let (last, rest) = coeffs
        .split_last()
        .ok_or(Error::DimensionMismatch { expected: 1, found: 0 })?;
    let mut acc: Vec<f64> = theta0.values.iter().map(|x| last * x).collect();
    for h in rest.iter().rev() {
        acc = s.matrix.left_mul(&acc);
        acc.iter_mut().zip(&theta0.values).for_each(|(a, x)| *a += h * x);
    }
    Signal::at(acc, theta0.time)
}

fn max_abs_diag(m: &Matrix) -> f64 {
    m.diag().iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// First-order step `Phi = I - delta L`, nonnegative when `delta <= 1 / max|L_ii|`.
pub fn discrete_approximation(l: &ZLaplacian, delta: f64) -> Result<ShiftOperator> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::OutOfRange {
            name: "delta",
            value: delta,
            reason: "must be positive and finite",
        });
    }
    let max_diag = max_abs_diag(l.matrix());
    if delta * max_diag > 1.0 {
        return Err(Error::StepTooLarge {
            delta,
            limit: 1.0 / max_diag,
        });
    }
    Ok(ShiftOperator {
        matrix: uniformized(l.matrix(), delta),
        recipe: Recipe::Nonnegative,
        basis: Some(l.basis()),
    })
}

/// `I - delta L` with off-diagonals written as `-delta * L_uv` (never negative zero).
fn uniformized(l: &Matrix, delta: f64) -> Matrix {
    let n = l.rows();
    Matrix::from_fn(n, n, |u, v| {
        if u == v {
            1.0 - delta * l[(u, u)]
        } else if l[(u, v)] == 0.0 {
            0.0
        } else {
            -(delta * l[(u, v)])
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuousOptions {
    /// Poisson right-tail mass that may be dropped, in `(0, 1e-6]`.
    pub epsilon: f64,
    /// Uniformization rate; must be at least `max|L_ii|`. Defaults to that minimum.
    pub rate: Option<f64>,
}

impl Default for ContinuousOptions {
    fn default() -> Self {
        ContinuousOptions {
            epsilon: DEFAULT_EPSILON,
            rate: None,
        }
    }
}

/// Smallest feasible uniformization rate for `L`: `max|L_ii|`, or 1 when the diagonal vanishes.
pub fn minimal_rate(l: &Matrix) -> f64 {
    let m = max_abs_diag(l);
    if m == 0.0 {
        1.0
    } else {
        m
    }
}

/// Normalized Poisson(`mean`) weights from 0 up to a point where the
/// remaining tail is negligible next to `eps`. Built outward from the mode so
/// nothing overflows.
fn poisson_table(mean: f64, eps: f64) -> Vec<f64> {
    let mode = mean.floor() as usize;
    let mut w = vec![0.0; mode + 1];
    w[mode] = 1.0;
    for k in (0..mode).rev() {
        w[k] = w[k + 1] * (k + 1) as f64 / mean;
    }
    let mut total: f64 = w.iter().sum();
    let mut k = mode;
    loop {
        let r = mean / (k + 1) as f64;
        // geometric bound on everything past k once the ratio drops below 1
        if r < 1.0 && w[k] * r / (1.0 - r) < eps * 1e-6 * total {
            break;
        }
        let next = w[k] * r;
        w.push(next);
        total += next;
        k += 1;
    }
    w.iter_mut().for_each(|x| *x /= total);
    w
}

/// Smallest `K` with cumulative mass `>= 1 - eps`.
fn truncation_index(w: &[f64], eps: f64) -> usize {
    let mut cumulative = 0.0;
    for (k, x) in w.iter().enumerate() {
        cumulative += x;
        if cumulative >= 1.0 - eps {
            return k;
        }
    }
    w.len() - 1
}

/// Truncated, renormalized uniformization weights for rate `rate`, horizon `t` and a chain
/// whose one-step 1-norm gain is at most `gain`.
///
/// When `gain > 1` the series terms grow like `gain^k`, so the cut-off is the
/// larger of the plain Poisson quantile and the quantile of the tilted
/// Poisson(`rate * t * gain`) distribution.
pub fn uniformization_weights(rate: f64, t: f64, eps: f64, gain: f64) -> Vec<f64> {
    let mean = rate * t;
    let mut w = poisson_table(mean, eps);
    let mut k_max = truncation_index(&w, eps);
    if gain > 1.0 {
        let tilted = poisson_table(mean * gain, eps);
        k_max = k_max.max(truncation_index(&tilted, eps));
    }
    while w.len() <= k_max {
        let k = w.len() - 1;
        let next = w[k] * mean / (k + 1) as f64;
        w.push(next);
    }
    w.truncate(k_max + 1);
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    w
}

/// `theta0 * exp(-L t)` by uniformization:
/// `sum_k Poisson(k; lambda t) theta0 Phi^k` with `Phi = I - L / lambda`.
pub fn evolve_continuous(theta0: &Signal, l: &ZLaplacian, t: f64, opts: &ContinuousOptions) -> Result<Signal> {
    evolve_continuous_matrix(theta0, l.matrix(), t, opts)
}

/// As [`evolve_continuous`], for any Z-matrix.
pub fn evolve_continuous_matrix(theta0: &Signal, l: &Matrix, t: f64, opts: &ContinuousOptions) -> Result<Signal> {
    let n = l.check_square()?;
    check_len(&theta0.values, n)?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::OutOfRange {
            name: "t",
            value: t,
            reason: "must be finite and non-negative",
        });
    }
    let eps = opts.epsilon;
    if !(eps > 0.0 && eps <= 1e-6) {
        return Err(Error::OutOfRange {
            name: "epsilon",
            value: eps,
            reason: "must lie in (0, 1e-6]",
        });
    }
    let minimum = minimal_rate(l);
    let rate = match opts.rate {
        None => minimum,
        Some(r) if r.is_finite() && r >= minimum => r,
        Some(r) => {
            return Err(Error::OutOfRange {
                name: "rate",
                value: r,
                reason: "must be finite and at least max|L_ii|",
            })
        }
    };
    if t == 0.0 {
        return Signal::at(theta0.values.clone(), 0.0);
    }
    let phi = uniformized(l, 1.0 / rate);
    let weights = uniformization_weights(rate, t, eps, phi.inf_norm().max(1.0));
    let mut term = theta0.values.clone();
    let mut acc: Vec<f64> = term.iter().map(|x| weights[0] * x).collect();
    for &w in &weights[1..] {
        term = phi.left_mul(&term);
        acc.iter_mut().zip(&term).for_each(|(a, x)| *a += w * x);
    }
    Signal::at(acc, t)
}

/// `exp(M t)` by scaling and squaring a Taylor series. The scaled matrix has
/// induced infinity-norm at most 0.5.
pub fn matrix_exp_oracle(m: &Matrix, t: f64) -> Result<Matrix> {
    let n = m.check_square()?;
    m.check_finite()?;
    let a = m.scale(t);
    let norm = a.inf_norm();
    let mut squarings = 0u32;
    while norm / 2f64.powi(squarings as i32) > 0.5 {
        squarings += 1;
    }
    let b = a.scale(1.0 / 2f64.powi(squarings as i32));
    let mut term = Matrix::identity(n);
    let mut sum = Matrix::identity(n);
    for k in 1..=200 {
        term = term.matmul(&b).scale(1.0 / k as f64);
        sum = sum.add(&term);
        if term.inf_norm() < TAYLOR_TOL {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum);
    }
    Ok(sum)
}

/// Expected waiting steps `tau_v / min tau` of the uniformized chain.
pub fn waiting_steps(delay: &Delays) -> Vec<f64> {
    let tau = delay.as_slice();
    let min = tau.iter().copied().fold(f64::INFINITY, f64::min);
    tau.iter().map(|t| t / min).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Supercritical,
    Critical,
    Subcritical,
}

/// Threshold quantities of the replicator read as an SIS model with replication `z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicatorThreshold {
    pub z: f64,
    /// `z / ((z + beta - 1) lambda_max)`; `None` when the denominator is not positive.
    pub threshold: Option<f64>,
    /// `z / (lambda_max beta)`; `None` when `beta = 0`.
    pub transmissibility: Option<f64>,
    pub process: Classification,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpidemicReport {
    pub regime: Regime,
    pub lambda_max: f64,
    /// Epidemic threshold `1 / lambda_max`.
    pub threshold: f64,
    /// Effective transmissibility `mu / beta`; `None` when `beta = 0`.
    pub transmissibility: Option<f64>,
    /// Spectral radius `mu lambda_max + 1 - beta` of the SIS filter.
    pub spectral_radius: f64,
    pub replicator: Option<ReplicatorThreshold>,
}

/// Compares `mu / beta` against `1 / lambda_max(A)`, i.e. `mu lambda_max` against `beta`,
/// at relative tolerance `1e-9`.
pub fn classify_epidemic(g: &Graph, mu: f64, beta: f64, z: Option<f64>) -> Result<EpidemicReport> {
    sis_filter(g, mu, beta)?;
    let lambda = perron_eigenpair(g)?.lambda;
    let spread = mu * lambda;
    let regime = if (spread - beta).abs() <= 1e-9 * spread.max(beta) {
        Regime::Critical
    } else if spread > beta {
        Regime::Supercritical
    } else {
        Regime::Subcritical
    };
    let replicator = match z {
        None => None,
        Some(z) if z.is_finite() && z > 0.0 => {
            let denom = (z + beta - 1.0) * lambda;
            Some(ReplicatorThreshold {
                z,
                threshold: (denom > 0.0).then(|| z / denom),
                transmissibility: (beta > 0.0).then(|| z / (lambda * beta)),
                process: Classification::from_growth(z),
            })
        }
        Some(z) => {
            return Err(Error::OutOfRange {
                name: "z",
                value: z,
                reason: "must be positive and finite",
            })
        }
    };
    Ok(EpidemicReport {
        regime,
        lambda_max: lambda,
        threshold: 1.0 / lambda,
        transmissibility: (beta > 0.0).then(|| mu / beta),
        spectral_radius: spread + 1.0 - beta,
        replicator,
    })
}
