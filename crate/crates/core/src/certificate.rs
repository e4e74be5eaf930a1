//! Small, spatially concentrated infeasibility certificates.
//!
//! For an incompatible index set `I` and one violating output row, the
//! certificate LP looks for Farkas multipliers `λ` with
//!
//! ```text
//! Σ_k λ_k [x_k; 1] = 0,   Σ_k λ_k y_k - ε Σ_k |λ_k| ≥ 1
//! ```
//!
//! minimizing `Σ_k |λ_k| ‖x_k - x̄‖²` around the centroid `x̄` of `I`. A vertex
//! optimum has at most `d + 2` nonzero multipliers, and their indices form an
//! index set on which no affine function fits within `ε`.

use crate::affine_fit::{chebyshev_fit, fit_rows, InputFrame, RowFit};
use crate::data::{DataSet, IndexSet};
use crate::error::{Result, TpwaError};
use crate::lp::{DenseSimplex, LpOutcome, LpSolver, StandardLp};

/// Distance used to weight the multipliers in the certificate objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceNorm {
    #[default]
    SquaredEuclidean,
    Max,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub indices: IndexSet,
    /// 1-based output row whose scalar system is infeasible.
    pub row: usize,
    /// Nonzero Farkas multipliers keyed by data index.
    pub weights: Vec<(usize, f64)>,
    pub center: Vec<f64>,
}

pub fn extract_certificate(
    data: &DataSet,
    indices: &IndexSet,
    epsilon: f64,
    tol: f64,
) -> Result<Certificate> {
    extract_certificate_with(
        &DenseSimplex::default(),
        data,
        indices,
        epsilon,
        tol,
        DistanceNorm::default(),
    )
}

pub fn extract_certificate_with(
    solver: &dyn LpSolver,
    data: &DataSet,
    indices: &IndexSet,
    epsilon: f64,
    tol: f64,
    norm: DistanceNorm,
) -> Result<Certificate> {
    let rows = fit_rows(solver, data, indices)?;
    certificate_from_rows(solver, data, indices, &rows, epsilon, tol, norm)
}

/// Same as [`extract_certificate_with`] with the Chebyshev row fits of
/// `indices` already computed.
pub(crate) fn certificate_from_rows(
    solver: &dyn LpSolver,
    data: &DataSet,
    indices: &IndexSet,
    rows: &[RowFit],
    epsilon: f64,
    tol: f64,
    norm: DistanceNorm,
) -> Result<Certificate> {
    let (row, worst) = rows
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (j, r)| {
            if r.t > acc.1 {
                (j, r.t)
            } else {
                acc
            }
        });
    if worst <= epsilon + tol {
        return Err(TpwaError::NotIncompatible);
    }

    let frame = InputFrame::new(data, indices);
    let center = frame.mean.clone();
    // Certify against ε + tol so the certificate is also incompatible under
    // the tolerant compatibility test used by the search.
    let problem = CertificateLp::new(data, indices, &frame, row, epsilon + tol, norm);

    let mut support = match problem.solve(solver, &problem.all_columns())? {
        Some(s) => s,
        None => return fallback(data, &rows[row].weights, row, center, epsilon, tol),
    };
    if support.len() > data.d() + 2 {
        support = problem.reduce_support(solver, support)?;
    }

    let cert = Certificate {
        indices: IndexSet::new(support.iter().map(|(k, _)| *k))?,
        row: row + 1,
        weights: support,
        center: center.clone(),
    };
    if verify_certificate(data, &cert, epsilon, tol) {
        Ok(cert)
    } else {
        log::debug!("certificate LP solution failed verification, using Chebyshev dual vertex");
        fallback(data, &rows[row].weights, row, center, epsilon, tol)
    }
}

/// The optimal Chebyshev dual vertex is itself a certificate with at most
/// `d + 2` points, though not a concentrated one.
fn fallback(
    data: &DataSet,
    weights: &[(usize, f64)],
    row: usize,
    center: Vec<f64>,
    epsilon: f64,
    tol: f64,
) -> Result<Certificate> {
    let cert = Certificate {
        indices: IndexSet::new(weights.iter().map(|(k, _)| *k))?,
        row: row + 1,
        weights: weights.to_vec(),
        center,
    };
    if !cert.indices.is_empty() && verify_certificate(data, &cert, epsilon, tol) {
        Ok(cert)
    } else {
        Err(TpwaError::SolverFailure(
            "could not extract a valid certificate".into(),
        ))
    }
}

/// Checks incompatibility of `C` and both Farkas identities of the weights.
pub fn verify_certificate(data: &DataSet, cert: &Certificate, epsilon: f64, tol: f64) -> bool {
    if cert.indices.is_empty()
        || data.check_indices(&cert.indices).is_err()
        || cert.row == 0
        || cert.row > data.e()
    {
        return false;
    }
    match chebyshev_fit(data, &cert.indices) {
        Ok(fit) if fit.t_min > epsilon + tol => {}
        _ => return false,
    }
    if cert.weights.iter().any(|(k, _)| !cert.indices.contains(*k)) {
        return false;
    }
    let mass: f64 = cert.weights.iter().map(|(_, w)| w.abs()).sum();
    if mass.is_nan() || mass <= 0.0 {
        return false;
    }
    let xmax = cert
        .indices
        .iter()
        .flat_map(|k| data.x(k).iter())
        .fold(1.0f64, |a, v| a.max(v.abs()));
    let slack = tol * mass * xmax;
    let mut balance = vec![0.0; data.d() + 1];
    let mut violation = 0.0;
    for &(k, w) in &cert.weights {
        for (b, xv) in balance.iter_mut().zip(data.x(k)) {
            *b += w * xv;
        }
        balance[data.d()] += w;
        violation += w * data.y(k)[cert.row - 1];
    }
    balance.iter().all(|b| b.abs() <= slack) && violation - epsilon * mass > 0.0
}

/// Drops multipliers that are round-off relative to the largest one.
pub(crate) fn significant(weights: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    let top = weights.iter().fold(0.0f64, |a, (_, w)| a.max(w.abs()));
    weights
        .into_iter()
        .filter(|(_, w)| w.abs() > 1e-9 * top)
        .collect()
}

struct CertificateLp {
    lp: StandardLp,
    indices: Vec<usize>,
}

impl CertificateLp {
    fn new(
        data: &DataSet,
        indices: &IndexSet,
        frame: &InputFrame,
        row: usize,
        epsilon: f64,
        norm: DistanceNorm,
    ) -> Self {
        let d = data.d();
        let n = indices.len();
        let yscale = indices
            .iter()
            .map(|k| data.y(k)[row].abs())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let eps = epsilon / yscale;
        // Columns: λ⁺_p, λ⁻_p for each point p, then the surplus s.
        let mut lp = StandardLp::new(d + 2, 2 * n + 1);
        for (p, k) in indices.iter().enumerate() {
            let (pos, neg) = (2 * p, 2 * p + 1);
            let xs: Vec<f64> = frame.map(data.x(k)).collect();
            for (r, xv) in xs.iter().enumerate() {
                lp.set(r, pos, *xv);
                lp.set(r, neg, -xv);
            }
            lp.set(d, pos, 1.0);
            lp.set(d, neg, -1.0);
            let y = data.y(k)[row] / yscale;
            lp.set(d + 1, pos, y - eps);
            lp.set(d + 1, neg, -y - eps);
            let dist = match norm {
                DistanceNorm::SquaredEuclidean => xs.iter().map(|v| v * v).sum(),
                DistanceNorm::Max => xs.iter().fold(0.0f64, |a, v| a.max(v.abs())),
            };
            lp.set_cost(pos, dist);
            lp.set_cost(neg, dist);
        }
        lp.set(d + 1, 2 * n, -1.0);
        lp.set_rhs(d + 1, 1.0);
        CertificateLp {
            lp,
            indices: indices.iter().collect(),
        }
    }

    fn all_columns(&self) -> Vec<usize> {
        (0..self.indices.len()).collect()
    }

    /// Solves with only the multipliers of the given point positions; returns
    /// the nonzero `λ_k` keyed by data index, or `None` if infeasible.
    fn solve(
        &self,
        solver: &dyn LpSolver,
        positions: &[usize],
    ) -> Result<Option<Vec<(usize, f64)>>> {
        let mut cols: Vec<usize> = positions.iter().flat_map(|&p| [2 * p, 2 * p + 1]).collect();
        cols.push(2 * self.indices.len());
        let restricted;
        let lp = if positions.len() == self.indices.len() {
            &self.lp
        } else {
            restricted = self.lp.restrict_columns(&cols);
            &restricted
        };
        match solver.solve(lp)? {
            LpOutcome::Optimal(sol) => Ok(Some(significant(
                positions
                    .iter()
                    .enumerate()
                    .map(|(i, &p)| (self.indices[p], sol.x[2 * i] - sol.x[2 * i + 1]))
                    .collect(),
            ))),
            LpOutcome::Infeasible => Ok(None),
            LpOutcome::Unbounded => Err(TpwaError::SolverFailure(
                "certificate LP reported unbounded".into(),
            )),
        }
    }

    /// Drops support points one at a time while the LP stays feasible.
    fn reduce_support(
        &self,
        solver: &dyn LpSolver,
        mut support: Vec<(usize, f64)>,
    ) -> Result<Vec<(usize, f64)>> {
        let position = |k: usize| self.indices.binary_search(&k).expect("support within I");
        'outer: loop {
            for drop in 0..support.len() {
                let positions: Vec<usize> = support
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != drop)
                    .map(|(_, (k, _))| position(*k))
                    .collect();
                if let Some(smaller) = self.solve(solver, &positions)? {
                    support = smaller;
                    continue 'outer;
                }
            }
            return Ok(support);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-7;

    fn tent() -> DataSet {
        DataSet::from_scalar(&[0.0, 1.0, 2.0], &[0.0, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn tent_certificate_uses_all_three_points() {
        let data = tent();
        let cert = extract_certificate(&data, &IndexSet::full(3), 0.4, TOL).unwrap();
        assert_eq!(cert.indices, IndexSet::full(3));
        assert_eq!(cert.row, 1);
        // Multipliers proportional to (-1, 2, -1).
        let w: Vec<f64> = cert.weights.iter().map(|(_, w)| *w).collect();
        assert!((w[1] / w[0] + 2.0).abs() < 1e-9 && (w[2] / w[0] - 1.0).abs() < 1e-9);
        assert!(w[1] > 0.0);
        assert!(verify_certificate(&data, &cert, 0.4, TOL));
        assert_eq!(cert.center, vec![1.0]);
    }

    #[test]
    fn compatible_set_has_no_certificate() {
        let r = extract_certificate(&tent(), &IndexSet::full(3), 0.5, TOL);
        assert_eq!(r, Err(TpwaError::NotIncompatible));
    }

    #[test]
    fn verification_rejects_bad_certificates() {
        let data = tent();
        let good = extract_certificate(&data, &IndexSet::full(3), 0.4, TOL).unwrap();

        let pair = Certificate {
            indices: IndexSet::new([1, 2]).unwrap(),
            row: 1,
            weights: vec![(1, 1.0), (2, -1.0)],
            center: vec![0.5],
        };
        assert!(!verify_certificate(&data, &pair, 0.4, TOL));

        let mut zeroed = good.clone();
        for w in &mut zeroed.weights {
            w.1 = 0.0;
        }
        assert!(!verify_certificate(&data, &zeroed, 0.4, TOL));

        let mut skewed = good.clone();
        skewed.weights[0].1 *= 2.0;
        assert!(!verify_certificate(&data, &skewed, 0.4, TOL));

        let mut bad_row = good;
        bad_row.row = 2;
        assert!(!verify_certificate(&data, &bad_row, 0.4, TOL));
    }

    #[test]
    fn duplicated_conflicting_inputs() {
        let data = DataSet::from_scalar(&[0.0, 1.0, 1.0, 2.0], &[0.0, 0.0, 1.0, 0.0]).unwrap();
        let cert = extract_certificate(&data, &IndexSet::full(4), 0.01, TOL).unwrap();
        assert_eq!(cert.indices.as_slice(), &[2, 3]);
        assert!(verify_certificate(&data, &cert, 0.01, TOL));
    }

    #[test]
    fn max_norm_variant_is_valid() {
        let data = DataSet::from_scalar(
            &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0],
            &[0.0, 1.0, 0.0, 1.0, 0.0, 1.0],
        )
        .unwrap();
        let cert = extract_certificate_with(
            &DenseSimplex::default(),
            &data,
            &IndexSet::full(6),
            0.1,
            TOL,
            DistanceNorm::Max,
        )
        .unwrap();
        assert!(cert.indices.len() <= 3);
        assert!(verify_certificate(&data, &cert, 0.1, TOL));
    }
}
