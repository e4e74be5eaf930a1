//! Template-based piecewise affine regression.
//!
//! Given data `(x_k, y_k)` and a tolerance `ε`, find a piecewise affine
//! function with the fewest pieces whose regions are template polyhedra
//! `{x : p(x) ≤ c}` and whose error on every data point is at most `ε`.
//! The search walks the lattice of index sets top-down, splitting
//! incompatible sets with small Farkas certificates, and stops early once an
//! exact set-cover bound proves optimality.

pub mod affine_fit;
pub mod certificate;
pub mod cli;
pub mod data;
pub mod datagen;
pub mod error;
pub mod io;
pub mod lp;
pub mod model;
pub mod oracle;
pub mod setcover;
pub mod template;
pub mod topdown;

pub use affine_fit::{chebyshev_fit, is_compatible, FitResult};
pub use certificate::{extract_certificate, verify_certificate, Certificate, DistanceNorm};
pub use data::{DataPoint, DataSet, IndexSet};
pub use error::{Result, TpwaError};
pub use model::{
    evaluate_model, max_residual, AffinePiece, FitConfig, OutOfDomainPolicy, PwaModel, DEFAULT_TOL,
};
pub use setcover::{early_stop_check, min_cover, CoverProblem, CoverResult, EarlyStop};
pub use template::{
    canonical_offset, eval_template, induced_index_set, is_inducible, Offset, TemplateKind,
    TemplateSpec,
};
pub use topdown::{
    enumerate_maximal_compatible, find_subsets, fit_maximal, fit_optimal,
    fit_optimal_with_progress, FitOutcome, Progress, SearchStats,
};
