//! Synthetic data sets: the arctan curve, the insulin-dependent glucose
//! utilization term, and random piecewise affine functions on a grid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{DataPoint, DataSet, IndexSet};
use crate::error::{Result, TpwaError};
use crate::model::{AffinePiece, OutOfDomainPolicy, PwaModel, DEFAULT_TOL};
use crate::template::{Offset, TemplateSpec};

/// `K` points with `x` evenly spaced on `[-1, 1]` and
/// `y = atan(10 x) e^{-|x|}`.
pub fn gen_arctan_1d(k: usize) -> Result<DataSet> {
    if k < 2 {
        return Err(TpwaError::InvalidInput(
            "arctan data needs at least 2 points".into(),
        ));
    }
    let xs = linspace(-1.0, 1.0, k);
    let ys: Vec<f64> = xs
        .iter()
        .map(|&x| (10.0 * x).atan() * (-x.abs()).exp())
        .collect();
    DataSet::from_scalar(&xs, &ys)
}

const UID_HALF_SATURATION: f64 = 253.52;

/// Insulin-dependent glucose utilization.
pub fn uid(x1: f64, x2: f64) -> f64 {
    (3.2667 + 0.0313 * x1) * x2 / (UID_HALF_SATURATION + x2)
}

/// `n × n` grid over `x1_range × x2_range`, `x1` varying slowest.
pub fn gen_uid_grid(
    n_per_axis: usize,
    x1_range: (f64, f64),
    x2_range: (f64, f64),
) -> Result<DataSet> {
    if n_per_axis < 2 {
        return Err(TpwaError::InvalidInput(
            "grid needs at least 2 points per axis".into(),
        ));
    }
    for (lo, hi) in [x1_range, x2_range] {
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(TpwaError::InvalidInput("invalid range".into()));
        }
    }
    if x2_range.0 <= -UID_HALF_SATURATION && -UID_HALF_SATURATION <= x2_range.1 {
        return Err(TpwaError::SingularDenominator);
    }
    let g1 = linspace(x1_range.0, x1_range.1, n_per_axis);
    let g2 = linspace(x2_range.0, x2_range.1, n_per_axis);
    let mut points = Vec::with_capacity(n_per_axis * n_per_axis);
    for &a in &g1 {
        for &b in &g2 {
            points.push(DataPoint::new(vec![a, b], vec![uid(a, b)]));
        }
    }
    DataSet::new(points)
}

/// Grid resolution used by [`gen_grid_pwa`].
pub const DEFAULT_POINTS_PER_AXIS: usize = 7;

pub fn gen_grid_pwa(
    d: usize,
    cells_per_axis: usize,
    noise: f64,
    seed: u64,
) -> Result<(DataSet, PwaModel)> {
    gen_grid_pwa_with(d, cells_per_axis, DEFAULT_POINTS_PER_AXIS, noise, seed)
}

/// Random piecewise affine function on `[0,1]^d` with one piece per cell of
/// a `cells_per_axis^d` box grid, sampled on a `points_per_axis^d` grid.
/// Points on shared cell faces take the value of the first containing
/// piece, and each piece's support lists the points it evaluates.
pub fn gen_grid_pwa_with(
    d: usize,
    cells_per_axis: usize,
    points_per_axis: usize,
    noise: f64,
    seed: u64,
) -> Result<(DataSet, PwaModel)> {
    if !(1..=3).contains(&d) {
        return Err(TpwaError::InvalidInput(
            "grid PWA supports d in 1..=3".into(),
        ));
    }
    if cells_per_axis == 0 || points_per_axis < 2 {
        return Err(TpwaError::InvalidInput(
            "need at least 1 cell and 2 points per axis".into(),
        ));
    }
    if !noise.is_finite() || noise < 0.0 {
        return Err(TpwaError::InvalidInput(
            "noise must be finite and nonnegative".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let template = TemplateSpec::rectangular(d);
    let m = cells_per_axis as f64;

    let mut pieces = Vec::new();
    for cell in grid_indices(d, cells_per_axis) {
        let a = vec![(0..d)
            .map(|_| rng.gen_range(-1.0..=1.0))
            .collect::<Vec<f64>>()];
        let b = vec![rng.gen_range(-1.0..=1.0)];
        let upper = cell.iter().map(|&j| (j + 1) as f64 / m);
        let lower = cell.iter().map(|&j| -(j as f64) / m);
        let offset = Offset(upper.chain(lower).collect());
        pieces.push(AffinePiece {
            a,
            b,
            offset,
            support: IndexSet::empty(),
        });
    }
    let mut truth = PwaModel::new(pieces, template, noise, DEFAULT_TOL)?;

    let mut supports = vec![Vec::new(); truth.q()];
    let mut points = Vec::new();
    for (k, idx) in grid_indices(d, points_per_axis).into_iter().enumerate() {
        let x: Vec<f64> = idx
            .iter()
            .map(|&j| j as f64 / (points_per_axis - 1) as f64)
            .collect();
        let i = truth.select_piece(&x, OutOfDomainPolicy::Error)?;
        supports[i].push(k + 1);
        let mut y = truth.pieces[i].apply(&x);
        if noise > 0.0 {
            for v in &mut y {
                *v += rng.gen_range(-noise..=noise);
            }
        }
        points.push(DataPoint::new(x, y));
    }
    for (piece, s) in truth.pieces.iter_mut().zip(supports) {
        piece.support = IndexSet::new(s)?;
    }
    Ok((DataSet::new(points)?, truth))
}

/// All multi-indices in `{0..n}^d`, first coordinate varying slowest.
fn grid_indices(d: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..n).map(move |j| {
                    let mut q = p.clone();
                    q.push(j);
                    q
                })
            })
            .collect();
    }
    out
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect()
}
