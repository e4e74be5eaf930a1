//! Piecewise affine models over template regions.

use crate::data::{DataSet, IndexSet};
use crate::error::{Result, TpwaError};
use crate::template::{Offset, TemplateSpec};

/// Slack for every "≤ ε" and region-membership comparison.
pub const DEFAULT_TOL: f64 = 1e-7;

/// What [`evaluate_model`] does with a point outside every piece region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutOfDomainPolicy {
    #[default]
    Error,
    /// Use the piece whose region is violated the least, measured by the
    /// largest template-constraint violation.
    Nearest,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub epsilon: f64,
    pub tol: f64,
    /// Run the early-stopping test every `cover_period` iterations.
    pub cover_period: usize,
    pub out_of_domain: OutOfDomainPolicy,
}

impl FitConfig {
    pub fn new(epsilon: f64) -> Self {
        FitConfig {
            epsilon,
            tol: DEFAULT_TOL,
            cover_period: 1,
            out_of_domain: OutOfDomainPolicy::Error,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.epsilon.is_finite() || self.epsilon < 0.0 {
            return Err(TpwaError::InvalidInput(
                "epsilon must be finite and nonnegative".into(),
            ));
        }
        if !self.tol.is_finite() || self.tol <= 0.0 {
            return Err(TpwaError::InvalidInput(
                "tolerance must be finite and positive".into(),
            ));
        }
        if self.cover_period == 0 {
            return Err(TpwaError::InvalidInput(
                "cover period must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// One affine map `A x + b` on the region `p(x) ≤ c`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinePiece {
    /// `e × d`, row-major.
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub offset: Offset,
    /// Data indices the piece was fitted on.
    pub support: IndexSet,
}

impl AffinePiece {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(row, b)| row.iter().zip(x).map(|(u, v)| u * v).sum::<f64>() + b)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PwaModel {
    pub pieces: Vec<AffinePiece>,
    pub template: TemplateSpec,
    pub epsilon: f64,
    pub tol: f64,
    pub d: usize,
    pub e: usize,
}

impl PwaModel {
    pub fn new(
        pieces: Vec<AffinePiece>,
        template: TemplateSpec,
        epsilon: f64,
        tol: f64,
    ) -> Result<Self> {
        let first = pieces
            .first()
            .ok_or_else(|| TpwaError::InvalidInput("a model needs at least one piece".into()))?;
        let d = template.d();
        let e = first.b.len();
        for p in &pieces {
            if p.b.len() != e || p.a.len() != e {
                return Err(TpwaError::DimensionMismatch {
                    expected: e,
                    got: p.b.len(),
                });
            }
            if let Some(row) = p.a.iter().find(|r| r.len() != d) {
                return Err(TpwaError::DimensionMismatch {
                    expected: d,
                    got: row.len(),
                });
            }
            if p.offset.len() != template.h() {
                return Err(TpwaError::DimensionMismatch {
                    expected: template.h(),
                    got: p.offset.len(),
                });
            }
        }
        Ok(PwaModel {
            pieces,
            template,
            epsilon,
            tol,
            d,
            e,
        })
    }

    /// Number of pieces `q`.
    pub fn q(&self) -> usize {
        self.pieces.len()
    }

    /// 0-based index of the piece used at `x`: the first piece whose region
    /// contains `x`, or the fallback dictated by `policy`.
    pub fn select_piece(&self, x: &[f64], policy: OutOfDomainPolicy) -> Result<usize> {
        let p = self.template.eval(x)?;
        if let Some(i) = self
            .pieces
            .iter()
            .position(|pc| pc.offset.contains(&p, self.tol))
        {
            return Ok(i);
        }
        match policy {
            OutOfDomainPolicy::Error => Err(TpwaError::OutOfDomain),
            OutOfDomainPolicy::Nearest => {
                let mut best = (0, f64::INFINITY);
                for (i, pc) in self.pieces.iter().enumerate() {
                    let v = pc.offset.violation(&p);
                    if v < best.1 {
                        best = (i, v);
                    }
                }
                Ok(best.0)
            }
        }
    }
}

/// `f(x) = A_i x + b_i` for the smallest `i` whose region contains `x`.
pub fn evaluate_model(model: &PwaModel, x: &[f64], policy: OutOfDomainPolicy) -> Result<Vec<f64>> {
    let i = model.select_piece(x, policy)?;
    Ok(model.pieces[i].apply(x))
}

/// `max_k ‖y_k - f(x_k)‖∞`.
pub fn max_residual(model: &PwaModel, data: &DataSet, policy: OutOfDomainPolicy) -> Result<f64> {
    if data.d() != model.d {
        return Err(TpwaError::DimensionMismatch {
            expected: model.d,
            got: data.d(),
        });
    }
    if data.e() != model.e {
        return Err(TpwaError::DimensionMismatch {
            expected: model.e,
            got: data.e(),
        });
    }
    let mut worst = 0.0f64;
    for p in data.points() {
        let f = evaluate_model(model, &p.x, policy)?;
        for (y, v) in p.y.iter().zip(&f) {
            worst = worst.max((y - v).abs());
        }
    }
    Ok(worst)
}
