//! Chebyshev (L∞) affine regression over an index set.
//!
//! Each output row is fitted independently by solving the dual of
//! `min t  s.t.  |y_k - a·x_k - b| ≤ t`, namely
//!
//! ```text
//! max Σ_k y_k λ_k   s.t.  Σ_k λ_k [x_k; 1] = 0,  Σ_k |λ_k| ≤ 1
//! ```
//!
//! with `λ = u - v`, `u, v ≥ 0`. The dual has only `d + 2` rows, and the
//! primal `(a, b, t)` is read off the simplex multipliers.

use crate::certificate::significant;
use crate::data::{DataSet, IndexSet};
use crate::error::{Result, TpwaError};
use crate::lp::{DenseSimplex, LpOutcome, LpSolver, StandardLp};

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// `e × d`, row-major.
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    /// Largest residual `max_{k∈I} ‖y_k - A x_k - b‖∞` of the returned fit.
    pub t_min: f64,
    /// Per-output-row optima; `t_min` is their maximum.
    pub row_t: Vec<f64>,
}

/// Fit of one output row together with its optimal dual weights.
#[derive(Debug, Clone)]
pub(crate) struct RowFit {
    pub a: Vec<f64>,
    pub b: f64,
    pub t: f64,
    /// Nonzero `λ_k` of the optimal dual vertex, keyed by data index.
    pub weights: Vec<(usize, f64)>,
}

/// Centering and a single isotropic scale for the inputs of an index set, so
/// the LPs are well conditioned. A single scale keeps Euclidean distances
/// proportional.
#[derive(Debug, Clone)]
pub(crate) struct InputFrame {
    pub mean: Vec<f64>,
    pub scale: f64,
}

impl InputFrame {
    pub(crate) fn new(data: &DataSet, indices: &IndexSet) -> Self {
        let d = data.d();
        let n = indices.len() as f64;
        let mut mean = vec![0.0; d];
        for k in indices.iter() {
            for (m, v) in mean.iter_mut().zip(data.x(k)) {
                *m += v / n;
            }
        }
        let mut scale = 0.0f64;
        for k in indices.iter() {
            for (m, v) in mean.iter().zip(data.x(k)) {
                scale = scale.max((v - m).abs());
            }
        }
        InputFrame {
            mean,
            scale: if scale > 0.0 { scale } else { 1.0 },
        }
    }

    pub(crate) fn map<'a>(&'a self, x: &'a [f64]) -> impl Iterator<Item = f64> + 'a {
        x.iter()
            .zip(&self.mean)
            .map(move |(v, m)| (v - m) / self.scale)
    }
}

pub fn chebyshev_fit(data: &DataSet, indices: &IndexSet) -> Result<FitResult> {
    chebyshev_fit_with(&DenseSimplex::default(), data, indices)
}

pub fn chebyshev_fit_with(
    solver: &dyn LpSolver,
    data: &DataSet,
    indices: &IndexSet,
) -> Result<FitResult> {
    Ok(FitResult::from_rows(&fit_rows(solver, data, indices)?))
}

impl FitResult {
    pub(crate) fn from_rows(rows: &[RowFit]) -> Self {
        FitResult {
            a: rows.iter().map(|r| r.a.clone()).collect(),
            b: rows.iter().map(|r| r.b).collect(),
            row_t: rows.iter().map(|r| r.t).collect(),
            t_min: rows.iter().map(|r| r.t).fold(0.0, f64::max),
        }
    }
}

/// `t_min(I) ≤ ε + tol`.
pub fn is_compatible(data: &DataSet, indices: &IndexSet, epsilon: f64, tol: f64) -> Result<bool> {
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(TpwaError::InvalidInput(
            "epsilon must be nonnegative".into(),
        ));
    }
    Ok(chebyshev_fit(data, indices)?.t_min <= epsilon + tol)
}

pub(crate) fn fit_rows(
    solver: &dyn LpSolver,
    data: &DataSet,
    indices: &IndexSet,
) -> Result<Vec<RowFit>> {
    data.check_indices(indices)?;
    let first = indices.iter().next().ok_or(TpwaError::EmptyIndexSet)?;
    if indices.len() == 1 {
        return Ok(data
            .y(first)
            .iter()
            .map(|&y| RowFit {
                a: vec![0.0; data.d()],
                b: y,
                t: 0.0,
                weights: Vec::new(),
            })
            .collect());
    }
    let frame = InputFrame::new(data, indices);
    (0..data.e())
        .map(|j| fit_row(solver, data, indices, &frame, j))
        .collect()
}

fn fit_row(
    solver: &dyn LpSolver,
    data: &DataSet,
    indices: &IndexSet,
    frame: &InputFrame,
    row: usize,
) -> Result<RowFit> {
    let d = data.d();
    let n = indices.len();
    let yscale = indices
        .iter()
        .map(|k| data.y(k)[row].abs())
        .fold(0.0, f64::max);
    let yscale = if yscale > 0.0 { yscale } else { 1.0 };

    let mut lp = StandardLp::new(d + 2, 2 * n);
    for (p, k) in indices.iter().enumerate() {
        let (u, v) = (2 * p, 2 * p + 1);
        for (r, xv) in frame.map(data.x(k)).enumerate() {
            lp.set(r, u, xv);
            lp.set(r, v, -xv);
        }
        lp.set(d, u, 1.0);
        lp.set(d, v, -1.0);
        lp.set(d + 1, u, 1.0);
        lp.set(d + 1, v, 1.0);
        let y = data.y(k)[row] / yscale;
        lp.set_cost(u, -y);
        lp.set_cost(v, y);
    }
    lp.set_rhs(d + 1, 1.0);

    let sol = match solver.solve(&lp)? {
        LpOutcome::Optimal(s) => s,
        LpOutcome::Infeasible => {
            return Err(TpwaError::SolverFailure(
                "Chebyshev dual reported infeasible".into(),
            ))
        }
        LpOutcome::Unbounded => {
            return Err(TpwaError::SolverFailure(
                "Chebyshev dual reported unbounded".into(),
            ))
        }
    };

    // a' = -π_x, b' = -π_1 in the scaled frame; undo the scalings.
    let a: Vec<f64> = sol.duals[..d]
        .iter()
        .map(|p| -p * yscale / frame.scale)
        .collect();
    let b = -sol.duals[d] * yscale - a.iter().zip(&frame.mean).map(|(u, m)| u * m).sum::<f64>();
    let t = indices
        .iter()
        .map(|k| (data.y(k)[row] - affine(&a, b, data.x(k))).abs())
        .fold(0.0, f64::max);
    let weights = significant(
        indices
            .iter()
            .enumerate()
            .map(|(p, k)| (k, sol.x[2 * p] - sol.x[2 * p + 1]))
            .collect(),
    );
    Ok(RowFit { a, b, t, weights })
}

pub(crate) fn affine(a: &[f64], b: f64, x: &[f64]) -> f64 {
    a.iter().zip(x).map(|(u, v)| u * v).sum::<f64>() + b
}
