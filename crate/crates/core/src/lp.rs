//! Linear programs in standard form, `min c·x  s.t.  A x = b, x ≥ 0`.
//!
//! The fitting and certificate LPs in this crate have only `d + 2` equality
//! rows, so a dense tableau is the right tool. The solver returns basic
//! (vertex) solutions together with the simplex multipliers of every row.

use crate::error::{Result, TpwaError};

/// A standard-form LP with a dense row-major constraint matrix.
#[derive(Debug, Clone)]
pub struct StandardLp {
    rows: usize,
    cols: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
}

impl StandardLp {
    pub fn new(rows: usize, cols: usize) -> Self {
        StandardLp {
            rows,
            cols,
            a: vec![0.0; rows * cols],
            b: vec![0.0; rows],
            c: vec![0.0; cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn set(&mut self, row: usize, col: usize, v: f64) {
        self.a[row * self.cols + col] = v;
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.a[row * self.cols + col]
    }

    pub fn set_rhs(&mut self, row: usize, v: f64) {
        self.b[row] = v;
    }

    pub fn set_cost(&mut self, col: usize, v: f64) {
        self.c[col] = v;
    }

    /// The same LP restricted to a subset of its columns, in the given order.
    pub fn restrict_columns(&self, keep: &[usize]) -> StandardLp {
        let mut out = StandardLp::new(self.rows, keep.len());
        for (new, &old) in keep.iter().enumerate() {
            for r in 0..self.rows {
                out.set(r, new, self.get(r, old));
            }
            out.c[new] = self.c[old];
        }
        out.b.clone_from(&self.b);
        out
    }
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    /// Primal values; nonbasic variables are exactly zero.
    pub x: Vec<f64>,
    /// Simplex multipliers `π` with `c_j - π·A_j ≥ 0` at optimality. Rows found
    /// redundant during phase one get `π = 0`.
    pub duals: Vec<f64>,
    pub objective: f64,
    /// Basic structural columns.
    pub basis: Vec<usize>,
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

/// Any backend able to return optimal vertex solutions with row multipliers.
pub trait LpSolver: Sync {
    fn solve(&self, lp: &StandardLp) -> Result<LpOutcome>;
}

/// Two-phase dense tableau simplex. Dantzig pricing, switching permanently to
/// Bland's rule after a run of degenerate pivots, so it cannot cycle.
#[derive(Debug, Clone, Copy)]
pub struct DenseSimplex {
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for DenseSimplex {
    fn default() -> Self {
        DenseSimplex {
            tol: 1e-10,
            max_iterations: 50_000,
        }
    }
}

const DEGENERATE_RUN: usize = 30;

struct Tableau {
    m: usize,
    width: usize, // structural + artificial columns, rhs stored separately
    n: usize,
    t: Vec<f64>,
    rhs: Vec<f64>,
    d: Vec<f64>,
    neg_obj: f64,
    basis: Vec<usize>,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.width + j]
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let w = self.width;
        let p = self.t[r * w + q];
        for j in 0..w {
            self.t[r * w + j] /= p;
        }
        self.rhs[r] /= p;
        self.t[r * w + q] = 1.0;
        let prhs = self.rhs[r];
        let (before, rest) = self.t.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        let others = before.chunks_exact_mut(w).chain(after.chunks_exact_mut(w));
        let other_rhs = (0..self.m).filter(|&i| i != r);
        for (row, i) in others.zip(other_rhs) {
            let f = row[q];
            if f != 0.0 {
                for (x, pv) in row.iter_mut().zip(prow.iter()) {
                    *x -= f * pv;
                }
                row[q] = 0.0;
                self.rhs[i] -= f * prhs;
            }
        }
        let f = self.d[q];
        if f != 0.0 {
            for (x, pv) in self.d.iter_mut().zip(prow.iter()) {
                *x -= f * pv;
            }
            self.d[q] = 0.0;
            self.neg_obj -= f * prhs;
        }
        self.basis[r] = q;
    }

    /// Runs simplex iterations over structural columns. Returns false if
    /// unbounded.
    fn optimize(&mut self, tol: f64, budget: &mut usize) -> Result<bool> {
        let mut bland = false;
        let mut degenerate = 0usize;
        loop {
            if *budget == 0 {
                return Err(TpwaError::SolverFailure(
                    "simplex iteration limit reached".into(),
                ));
            }
            *budget -= 1;

            let entering = if bland {
                (0..self.n).find(|&j| self.d[j] < -tol)
            } else {
                let (mut best, mut best_v) = (usize::MAX, -tol);
                for (j, &v) in self.d[..self.n].iter().enumerate() {
                    if v < best_v {
                        best = j;
                        best_v = v;
                    }
                }
                (best != usize::MAX).then_some(best)
            };
            let Some(q) = entering else { return Ok(true) };

            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.t.chunks_exact(self.width).enumerate() {
                let a = row[q];
                if a > tol {
                    let ratio = self.rhs[i].max(0.0) / a;
                    let better = match leave {
                        None => true,
                        Some((r, best)) => {
                            ratio < best - 1e-12 * (1.0 + best.abs())
                                || (ratio <= best + 1e-12 * (1.0 + best.abs())
                                    && self.basis[i] < self.basis[r])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, ratio)) = leave else {
                return Ok(false);
            };
            if ratio <= tol {
                degenerate += 1;
                if degenerate > DEGENERATE_RUN {
                    bland = true;
                }
            } else {
                degenerate = 0;
            }
            self.pivot(r, q);
        }
    }
}

impl LpSolver for DenseSimplex {
    fn solve(&self, lp: &StandardLp) -> Result<LpOutcome> {
        let (m, n) = (lp.rows, lp.cols);
        let width = n + m;
        let mut t = vec![0.0; m * width];
        let mut rhs = lp.b.clone();
        let mut flipped = vec![false; m];
        let mut d = vec![0.0; width];
        for (i, row) in t.chunks_exact_mut(width).enumerate() {
            let src = &lp.a[i * n..(i + 1) * n];
            let sign = if lp.b[i] < 0.0 { -1.0 } else { 1.0 };
            flipped[i] = sign < 0.0;
            rhs[i] *= sign;
            for ((x, &a), dj) in row[..n].iter_mut().zip(src).zip(&mut d[..n]) {
                *x = sign * a;
                *dj -= *x;
            }
            row[n + i] = 1.0;
        }
        if t.iter().chain(&rhs).chain(&lp.c).any(|v| !v.is_finite()) {
            return Err(TpwaError::SolverFailure(
                "non-finite LP coefficients".into(),
            ));
        }

        // Phase one: minimize the sum of artificials.
        let neg_obj = -rhs.iter().sum::<f64>();
        let mut tab = Tableau {
            m,
            width,
            n,
            t,
            rhs,
            d,
            neg_obj,
            basis: (n..n + m).collect(),
        };
        let mut budget = self.max_iterations;
        tab.optimize(self.tol, &mut budget)?;

        let scale = 1.0 + lp.b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if -tab.neg_obj > 1e-9 * scale {
            return Ok(LpOutcome::Infeasible);
        }

        // Pivot remaining artificials out of the basis where possible; rows
        // where that fails are linearly dependent on the others.
        for i in 0..m {
            if tab.basis[i] >= n {
                let mut best: Option<(usize, f64)> = None;
                for j in 0..n {
                    let v = tab.at(i, j).abs();
                    if v > 1e-9 && best.is_none_or(|(_, b)| v > b) {
                        best = Some((j, v));
                    }
                }
                if let Some((j, _)) = best {
                    tab.pivot(i, j);
                }
            }
        }

        // Phase two.
        tab.d[..n].copy_from_slice(&lp.c);
        tab.d[n..].fill(0.0);
        for (row, &b) in tab.t.chunks_exact(width).zip(&tab.basis) {
            let cb = if b < n { lp.c[b] } else { 0.0 };
            if cb != 0.0 {
                for (dj, &a) in tab.d.iter_mut().zip(row) {
                    *dj -= cb * a;
                }
            }
        }
        tab.neg_obj = -(0..m)
            .map(|i| {
                let b = tab.basis[i];
                if b < n {
                    lp.c[b] * tab.rhs[i]
                } else {
                    0.0
                }
            })
            .sum::<f64>();
        if !tab.optimize(self.tol, &mut budget)? {
            return Ok(LpOutcome::Unbounded);
        }

        let mut x = vec![0.0; n];
        let mut basis = Vec::with_capacity(m);
        for i in 0..m {
            let b = tab.basis[i];
            if b < n {
                x[b] = tab.rhs[i].max(0.0);
                basis.push(b);
            }
        }
        basis.sort_unstable();
        // Artificial column n+i is the unit vector of row i with zero cost, so
        // its reduced cost is -π_i of the (possibly sign-flipped) row.
        let duals = (0..m)
            .map(|i| {
                let pi = -tab.d[n + i];
                if flipped[i] {
                    -pi
                } else {
                    pi
                }
            })
            .collect();
        let objective = x.iter().zip(&lp.c).map(|(a, b)| a * b).sum();
        Ok(LpOutcome::Optimal(LpSolution {
            x,
            duals,
            objective,
            basis,
        }))
    }
}
