//! Observations and index sets over them.
//!
//! Data indices are 1-based everywhere in the public API: index `k` refers to
//! `points[k - 1]`.

use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Result, TpwaError};

#[derive(Debug, Clone, PartialEq)]
pub struct DataPoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl DataPoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        DataPoint { x, y }
    }
}

/// An ordered collection of input/output pairs with fixed dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSet {
    points: Vec<DataPoint>,
    d: usize,
    e: usize,
}

impl DataSet {
    /// Builds a data set, checking that it is nonempty, that all points share
    /// the dimensions of the first one and that every entry is finite.
    pub fn new(points: Vec<DataPoint>) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| TpwaError::InvalidInput("data set has no points".into()))?;
        let (d, e) = (first.x.len(), first.y.len());
        if d == 0 || e == 0 {
            return Err(TpwaError::InvalidInput(
                "input and output dimensions must be at least 1".into(),
            ));
        }
        for (i, p) in points.iter().enumerate() {
            if p.x.len() != d {
                return Err(TpwaError::DimensionMismatch {
                    expected: d,
                    got: p.x.len(),
                });
            }
            if p.y.len() != e {
                return Err(TpwaError::DimensionMismatch {
                    expected: e,
                    got: p.y.len(),
                });
            }
            if p.x.iter().chain(&p.y).any(|v| !v.is_finite()) {
                return Err(TpwaError::InvalidInput(format!(
                    "point {} has a non-finite entry",
                    i + 1
                )));
            }
        }
        Ok(DataSet { points, d, e })
    }

    pub fn from_xy(xs: Vec<Vec<f64>>, ys: Vec<Vec<f64>>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(TpwaError::DimensionMismatch {
                expected: xs.len(),
                got: ys.len(),
            });
        }
        DataSet::new(
            xs.into_iter()
                .zip(ys)
                .map(|(x, y)| DataPoint { x, y })
                .collect(),
        )
    }

    /// Scalar inputs and outputs.
    pub fn from_scalar(xs: &[f64], ys: &[f64]) -> Result<Self> {
        DataSet::from_xy(
            xs.iter().map(|&v| vec![v]).collect(),
            ys.iter().map(|&v| vec![v]).collect(),
        )
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn e(&self) -> usize {
        self.e
    }

    /// Number of points `K`.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[DataPoint] {
        &self.points
    }

    /// Input of point `k` (1-based).
    pub fn x(&self, k: usize) -> &[f64] {
        &self.points[k - 1].x
    }

    /// Output of point `k` (1-based).
    pub fn y(&self, k: usize) -> &[f64] {
        &self.points[k - 1].y
    }

    /// The sub-dataset made of the given indices, in order.
    pub fn subset(&self, indices: &IndexSet) -> Result<DataSet> {
        self.check_indices(indices)?;
        DataSet::new(indices.iter().map(|k| self.points[k - 1].clone()).collect())
    }

    pub(crate) fn check_indices(&self, indices: &IndexSet) -> Result<()> {
        match indices.last() {
            Some(k) if k > self.len() => Err(TpwaError::IndexOutOfRange {
                index: k,
                len: self.len(),
            }),
            _ => Ok(()),
        }
    }
}

/// A canonical subset of `{1, …, K}`: strictly increasing, duplicate-free.
///
/// The derived ordering is lexicographic on the sorted indices, which is the
/// canonical key order used for deterministic tie-breaking.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    /// Sorts and deduplicates the given indices. Index 0 is rejected since
    /// indices are 1-based.
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut v: Vec<usize> = indices.into_iter().collect();
        if v.contains(&0) {
            return Err(TpwaError::InvalidInput("indices are 1-based".into()));
        }
        v.sort_unstable();
        v.dedup();
        Ok(IndexSet(v))
    }

    /// Builds from indices already known to be sorted, unique and nonzero.
    pub(crate) fn from_sorted(v: Vec<usize>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(v.first().is_none_or(|&k| k >= 1));
        IndexSet(v)
    }

    pub fn empty() -> Self {
        IndexSet(Vec::new())
    }

    /// `{1, …, k}`.
    pub fn full(k: usize) -> Self {
        IndexSet((1..=k).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn contains(&self, k: usize) -> bool {
        self.0.binary_search(&k).is_ok()
    }

    pub fn is_subset_of(&self, other: &IndexSet) -> bool {
        if self.len() > other.len() {
            return false;
        }
        let mut it = other.0.iter();
        'outer: for a in &self.0 {
            for b in it.by_ref() {
                if b == a {
                    continue 'outer;
                }
                if b > a {
                    return false;
                }
            }
            return false;
        }
        true
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        let mut v: Vec<usize> = self.0.iter().chain(&other.0).copied().collect();
        v.sort_unstable();
        v.dedup();
        IndexSet(v)
    }

    pub fn difference(&self, other: &IndexSet) -> IndexSet {
        IndexSet(
            self.0
                .iter()
                .copied()
                .filter(|&k| !other.contains(k))
                .collect(),
        )
    }

    /// Bit representation over `0..=universe`; bit `k` is set for index `k`.
    pub(crate) fn to_bits(&self, universe: usize) -> FixedBitSet {
        let mut bits = FixedBitSet::with_capacity(universe + 1);
        for &k in &self.0 {
            bits.insert(k);
        }
        bits
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, "}}")
    }
}
