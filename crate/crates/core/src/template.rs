//! Polyhedral templates `p(x) ≤ c` and the index sets they induce on data.

use crate::data::{DataSet, IndexSet};
use crate::error::{Result, TpwaError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemplateKind {
    Rectangular,
    Octagon,
    Custom,
}

impl TemplateKind {
    pub fn name(self) -> &'static str {
        match self {
            TemplateKind::Rectangular => "rectangular",
            TemplateKind::Octagon => "octagon",
            TemplateKind::Custom => "custom",
        }
    }
}

/// A linear template: `h` functionals `p^s(x) = w_s · x` on `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct TemplateSpec {
    kind: TemplateKind,
    components: Vec<Vec<f64>>,
    d: usize,
}

impl TemplateSpec {
    /// Boxes: `p(x) = [x; -x]`, `h = 2d`.
    pub fn rectangular(d: usize) -> Self {
        assert!(d >= 1, "template dimension must be at least 1");
        let mut components = Vec::with_capacity(2 * d);
        for sign in [1.0, -1.0] {
            for i in 0..d {
                let mut w = vec![0.0; d];
                w[i] = sign;
                components.push(w);
            }
        }
        TemplateSpec {
            kind: TemplateKind::Rectangular,
            components,
            d,
        }
    }

    /// Boxes plus `±x_i ± x_j` for every pair `i < j`.
    ///
    /// Component order: `x`, `-x`, then per pair `(i, j)` in lexicographic
    /// order `x_i + x_j`, `x_i - x_j`, `-x_i + x_j`, `-x_i - x_j`.
    pub fn octagon(d: usize) -> Self {
        let mut t = TemplateSpec::rectangular(d);
        for i in 0..d {
            for j in (i + 1)..d {
                for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                    let mut w = vec![0.0; d];
                    w[i] = si;
                    w[j] = sj;
                    t.components.push(w);
                }
            }
        }
        t.kind = TemplateKind::Octagon;
        t
    }

    /// Arbitrary linear functionals given as an `h × d` weight matrix.
    pub fn custom(components: Vec<Vec<f64>>) -> Result<Self> {
        let d = components.first().map(Vec::len).ok_or_else(|| {
            TpwaError::InvalidInput("template needs at least one component".into())
        })?;
        if d == 0 {
            return Err(TpwaError::InvalidInput(
                "template dimension must be at least 1".into(),
            ));
        }
        for w in &components {
            if w.len() != d {
                return Err(TpwaError::DimensionMismatch {
                    expected: d,
                    got: w.len(),
                });
            }
            if w.iter().any(|v| !v.is_finite()) {
                return Err(TpwaError::InvalidInput(
                    "template weights must be finite".into(),
                ));
            }
        }
        Ok(TemplateSpec {
            kind: TemplateKind::Custom,
            components,
            d,
        })
    }

    pub fn kind(&self) -> TemplateKind {
        self.kind
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of components `h`.
    pub fn h(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.d {
            return Err(TpwaError::DimensionMismatch {
                expected: self.d,
                got: x.len(),
            });
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> Vec<f64> {
        self.components.iter().map(|w| dot(w, x)).collect()
    }

    pub(crate) fn check_data(&self, data: &DataSet) -> Result<()> {
        if data.d() != self.d {
            return Err(TpwaError::DimensionMismatch {
                expected: self.d,
                got: data.d(),
            });
        }
        Ok(())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

/// Template offset `c ∈ (R ∪ {+∞})^h`; `+∞` leaves a component unconstrained.
#[derive(Debug, Clone, PartialEq)]
pub struct Offset(pub Vec<f64>);

impl Offset {
    /// The root region: every component unconstrained.
    pub fn unbounded(h: usize) -> Self {
        Offset(vec![f64::INFINITY; h])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `p ≤ c` component-wise, with slack `tol` on every comparison.
    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        p.iter().zip(&self.0).all(|(v, c)| *v <= c + tol)
    }

    /// Largest template-constraint violation `max_s (p^s - c^s)`.
    pub fn violation(&self, p: &[f64]) -> f64 {
        p.iter()
            .zip(&self.0)
            .map(|(v, c)| v - c)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn eval_template(t: &TemplateSpec, x: &[f64]) -> Result<Vec<f64>> {
    t.eval(x)
}

/// `I(c)`: all `k` with `p(x_k) ≤ c` (within `tol`).
pub fn induced_index_set(
    t: &TemplateSpec,
    data: &DataSet,
    c: &Offset,
    tol: f64,
) -> Result<IndexSet> {
    t.check_data(data)?;
    check_offset(t, c)?;
    Ok(TemplateValues::new(t, data).induced(c, tol))
}

/// Tightest offset inducing a superset of `indices`: `ĉ^s = max_{k∈I} p^s(x_k)`.
pub fn canonical_offset(t: &TemplateSpec, data: &DataSet, indices: &IndexSet) -> Result<Offset> {
    t.check_data(data)?;
    data.check_indices(indices)?;
    if indices.is_empty() {
        return Err(TpwaError::EmptyIndexSet);
    }
    Ok(TemplateValues::new(t, data).canonical(indices))
}

/// Whether `indices` is exactly `I(c)` for some offset `c`.
pub fn is_inducible(
    t: &TemplateSpec,
    data: &DataSet,
    indices: &IndexSet,
    tol: f64,
) -> Result<bool> {
    t.check_data(data)?;
    data.check_indices(indices)?;
    if indices.is_empty() {
        return Err(TpwaError::EmptyIndexSet);
    }
    let tv = TemplateValues::new(t, data);
    Ok(tv.induced(&tv.canonical(indices), tol) == *indices)
}

fn check_offset(t: &TemplateSpec, c: &Offset) -> Result<()> {
    if c.len() != t.h() {
        return Err(TpwaError::DimensionMismatch {
            expected: t.h(),
            got: c.len(),
        });
    }
    if c.0.iter().any(|v| v.is_nan()) {
        return Err(TpwaError::InvalidInput("offset contains NaN".into()));
    }
    Ok(())
}

/// Template values `p(x_k)` precomputed for every point of a data set.
#[derive(Debug, Clone)]
pub(crate) struct TemplateValues {
    values: Vec<f64>,
    h: usize,
    k: usize,
}

impl TemplateValues {
    pub(crate) fn new(t: &TemplateSpec, data: &DataSet) -> Self {
        let h = t.h();
        let mut values = Vec::with_capacity(h * data.len());
        for p in data.points() {
            values.extend(t.eval_unchecked(&p.x));
        }
        TemplateValues {
            values,
            h,
            k: data.len(),
        }
    }

    pub(crate) fn h(&self) -> usize {
        self.h
    }

    /// `p(x_k)` for 1-based `k`.
    pub(crate) fn at(&self, k: usize) -> &[f64] {
        &self.values[(k - 1) * self.h..k * self.h]
    }

    pub(crate) fn induced(&self, c: &Offset, tol: f64) -> IndexSet {
        IndexSet::from_sorted(
            (1..=self.k)
                .filter(|&k| c.contains(self.at(k), tol))
                .collect(),
        )
    }

    /// Nonempty `indices` assumed.
    pub(crate) fn canonical(&self, indices: &IndexSet) -> Offset {
        let mut c = vec![f64::NEG_INFINITY; self.h];
        for k in indices.iter() {
            for (cs, v) in c.iter_mut().zip(self.at(k)) {
                *cs = cs.max(*v);
            }
        }
        Offset(c)
    }

    /// Sorted distinct values of component `s` over all points.
    pub(crate) fn distinct_component_values(&self, s: usize) -> Vec<f64> {
        let mut v: Vec<f64> = (1..=self.k).map(|k| self.at(k)[s]).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}
