//! Python bindings: data sets, templates, models, the fitting entry points,
//! certificates and the synthetic generators.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use tpwa::oracle;
use tpwa::{datagen, io};

create_exception!(tpwa_py, TpwaError, PyException);
create_exception!(tpwa_py, InfeasibleInstance, TpwaError);
create_exception!(tpwa_py, OutOfDomain, TpwaError);
create_exception!(tpwa_py, SolverFailure, TpwaError);
create_exception!(tpwa_py, BudgetExceeded, TpwaError);

fn err(e: tpwa::TpwaError) -> PyErr {
    let msg = e.to_string();
    match e {
        tpwa::TpwaError::InfeasibleInstance { uncovered } => {
            InfeasibleInstance::new_err((msg, uncovered))
        }
        tpwa::TpwaError::OutOfDomain => OutOfDomain::new_err(msg),
        tpwa::TpwaError::SolverFailure(_) => SolverFailure::new_err(msg),
        tpwa::TpwaError::BudgetExceeded { .. } => BudgetExceeded::new_err(msg),
        _ => TpwaError::new_err(msg),
    }
}

fn index_set(v: Vec<usize>) -> PyResult<tpwa::IndexSet> {
    tpwa::IndexSet::new(v).map_err(err)
}

fn policy(oob: &str) -> PyResult<tpwa::OutOfDomainPolicy> {
    match oob {
        "error" => Ok(tpwa::OutOfDomainPolicy::Error),
        "nearest" => Ok(tpwa::OutOfDomainPolicy::Nearest),
        _ => Err(TpwaError::new_err(format!(
            "unknown out-of-domain policy \"{oob}\""
        ))),
    }
}

/// Points `(x_k, y_k)`, indexed from 1.
#[pyclass(name = "DataSet", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyDataSet(tpwa::DataSet);

#[pymethods]
impl PyDataSet {
    #[new]
    fn new(xs: Vec<Vec<f64>>, ys: Vec<Vec<f64>>) -> PyResult<Self> {
        tpwa::DataSet::from_xy(xs, ys).map(PyDataSet).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        io::dataset_from_json(text).map(PyDataSet).map_err(err)
    }

    fn to_json(&self) -> String {
        io::dataset_to_json(&self.0)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    #[getter]
    fn d(&self) -> usize {
        self.0.d()
    }

    #[getter]
    fn e(&self) -> usize {
        self.0.e()
    }

    fn x(&self, k: usize) -> PyResult<Vec<f64>> {
        self.check(k)?;
        Ok(self.0.x(k).to_vec())
    }

    fn y(&self, k: usize) -> PyResult<Vec<f64>> {
        self.check(k)?;
        Ok(self.0.y(k).to_vec())
    }

    fn subset(&self, indices: Vec<usize>) -> PyResult<Self> {
        self.0
            .subset(&index_set(indices)?)
            .map(PyDataSet)
            .map_err(err)
    }
}

impl PyDataSet {
    fn check(&self, k: usize) -> PyResult<()> {
        if k == 0 || k > self.0.len() {
            return Err(err(tpwa::TpwaError::IndexOutOfRange {
                index: k,
                len: self.0.len(),
            }));
        }
        Ok(())
    }
}

/// Template `p(x) = P x`; regions are `{x : P x ≤ c}`.
#[pyclass(name = "Template", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTemplate(tpwa::TemplateSpec);

#[pymethods]
impl PyTemplate {
    #[staticmethod]
    fn rectangular(d: usize) -> Self {
        PyTemplate(tpwa::TemplateSpec::rectangular(d))
    }

    #[staticmethod]
    fn octagon(d: usize) -> Self {
        PyTemplate(tpwa::TemplateSpec::octagon(d))
    }

    #[staticmethod]
    fn custom(components: Vec<Vec<f64>>) -> PyResult<Self> {
        tpwa::TemplateSpec::custom(components)
            .map(PyTemplate)
            .map_err(err)
    }

    #[getter]
    fn d(&self) -> usize {
        self.0.d()
    }

    #[getter]
    fn h(&self) -> usize {
        self.0.h()
    }

    #[getter]
    fn components(&self) -> Vec<Vec<f64>> {
        self.0.components().to_vec()
    }

    fn eval(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        self.0.eval(&x).map_err(err)
    }
}

#[pyclass(name = "Piece", frozen, get_all)]
struct PyPiece {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    /// Region offsets; `inf` for unbounded components.
    c: Vec<f64>,
    support: Vec<usize>,
}

#[pyclass(name = "Model", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyModel(tpwa::PwaModel);

#[pymethods]
impl PyModel {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        io::model_from_json(text).map(PyModel).map_err(err)
    }

    fn to_json(&self) -> String {
        io::model_to_json(&self.0)
    }

    #[getter]
    fn q(&self) -> usize {
        self.0.q()
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.0.epsilon
    }

    #[getter]
    fn template(&self) -> PyTemplate {
        PyTemplate(self.0.template.clone())
    }

    #[getter]
    fn pieces(&self) -> Vec<PyPiece> {
        self.0
            .pieces
            .iter()
            .map(|p| PyPiece {
                a: p.a.clone(),
                b: p.b.clone(),
                c: p.offset.0.clone(),
                support: p.support.as_slice().to_vec(),
            })
            .collect()
    }

    #[pyo3(signature = (x, oob = "error"))]
    fn evaluate(&self, x: Vec<f64>, oob: &str) -> PyResult<Vec<f64>> {
        tpwa::evaluate_model(&self.0, &x, policy(oob)?).map_err(err)
    }

    /// 0-based index of the piece that evaluates `x`.
    #[pyo3(signature = (x, oob = "error"))]
    fn select_piece(&self, x: Vec<f64>, oob: &str) -> PyResult<usize> {
        self.0.select_piece(&x, policy(oob)?).map_err(err)
    }

    #[pyo3(signature = (data, oob = "error"))]
    fn max_residual(&self, data: &PyDataSet, oob: &str) -> PyResult<f64> {
        tpwa::max_residual(&self.0, &data.0, policy(oob)?).map_err(err)
    }
}

#[pyclass(name = "Certificate", frozen, get_all)]
struct PyCertificate {
    indices: Vec<usize>,
    /// 1-based output row.
    row: usize,
    weights: Vec<(usize, f64)>,
    center: Vec<f64>,
}

impl From<tpwa::Certificate> for PyCertificate {
    fn from(c: tpwa::Certificate) -> Self {
        PyCertificate {
            indices: c.indices.into_vec(),
            row: c.row,
            weights: c.weights,
            center: c.center,
        }
    }
}

#[pyclass(name = "SearchStats", frozen, get_all)]
struct PySearchStats {
    iterations: usize,
    certificates: usize,
    reused_certificates: usize,
    cover_checks: usize,
    stopped_early: bool,
}

fn config(epsilon: f64, tol: f64, cover_period: usize) -> tpwa::FitConfig {
    tpwa::FitConfig {
        tol,
        cover_period,
        ..tpwa::FitConfig::new(epsilon)
    }
}

/// Minimum-piece model by top-down search, with its search statistics.
#[pyfunction]
#[pyo3(signature = (template, data, epsilon, tol = tpwa::DEFAULT_TOL, cover_period = 1))]
fn fit_optimal(
    py: Python<'_>,
    template: &PyTemplate,
    data: &PyDataSet,
    epsilon: f64,
    tol: f64,
    cover_period: usize,
) -> PyResult<(PyModel, PySearchStats)> {
    let cfg = config(epsilon, tol, cover_period);
    let out = py
        .detach(|| tpwa::fit_optimal_with_progress(&template.0, &data.0, &cfg, &mut |_| {}))
        .map_err(err)?;
    let s = out.stats;
    let stats = PySearchStats {
        iterations: s.iterations,
        certificates: s.certificates,
        reused_certificates: s.reused_certificates,
        cover_checks: s.cover_checks,
        stopped_early: s.stopped_early,
    };
    Ok((PyModel(out.model), stats))
}

/// Model from the full enumeration of maximal compatible sets.
#[pyfunction]
#[pyo3(signature = (template, data, epsilon, tol = tpwa::DEFAULT_TOL))]
fn fit_maximal(
    py: Python<'_>,
    template: &PyTemplate,
    data: &PyDataSet,
    epsilon: f64,
    tol: f64,
) -> PyResult<PyModel> {
    let cfg = config(epsilon, tol, 1);
    py.detach(|| tpwa::fit_maximal(&template.0, &data.0, &cfg))
        .map(PyModel)
        .map_err(err)
}

/// Brute-force optimum over every inducible set.
#[pyfunction]
fn naive_optimal(
    py: Python<'_>,
    template: &PyTemplate,
    data: &PyDataSet,
    epsilon: f64,
) -> PyResult<PyModel> {
    py.detach(|| oracle::naive_optimal(&template.0, &data.0, epsilon))
        .map(PyModel)
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (template, data, epsilon, tol = tpwa::DEFAULT_TOL))]
fn enumerate_maximal_compatible(
    template: &PyTemplate,
    data: &PyDataSet,
    epsilon: f64,
    tol: f64,
) -> PyResult<Vec<Vec<usize>>> {
    let sets =
        tpwa::enumerate_maximal_compatible(&template.0, &data.0, epsilon, tol).map_err(err)?;
    Ok(sets.into_iter().map(tpwa::IndexSet::into_vec).collect())
}

/// Best uniform affine fit on `indices`: `(A, b, t_min)`.
#[pyfunction]
fn chebyshev_fit(
    data: &PyDataSet,
    indices: Vec<usize>,
) -> PyResult<(Vec<Vec<f64>>, Vec<f64>, f64)> {
    let fit = tpwa::chebyshev_fit(&data.0, &index_set(indices)?).map_err(err)?;
    Ok((fit.a, fit.b, fit.t_min))
}

#[pyfunction]
#[pyo3(signature = (data, indices, epsilon, tol = tpwa::DEFAULT_TOL))]
fn is_compatible(data: &PyDataSet, indices: Vec<usize>, epsilon: f64, tol: f64) -> PyResult<bool> {
    tpwa::is_compatible(&data.0, &index_set(indices)?, epsilon, tol).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (data, indices, epsilon, tol = tpwa::DEFAULT_TOL))]
fn extract_certificate(
    data: &PyDataSet,
    indices: Vec<usize>,
    epsilon: f64,
    tol: f64,
) -> PyResult<PyCertificate> {
    tpwa::extract_certificate(&data.0, &index_set(indices)?, epsilon, tol)
        .map(Into::into)
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (data, certificate, epsilon, tol = tpwa::DEFAULT_TOL))]
fn verify_certificate(
    data: &PyDataSet,
    certificate: &PyCertificate,
    epsilon: f64,
    tol: f64,
) -> PyResult<bool> {
    let cert = tpwa::Certificate {
        indices: index_set(certificate.indices.clone())?,
        row: certificate.row,
        weights: certificate.weights.clone(),
        center: certificate.center.clone(),
    };
    Ok(tpwa::verify_certificate(&data.0, &cert, epsilon, tol))
}

/// Children of the inducible set `indices` (taken at its canonical offset)
/// split along the certificate `cert`.
#[pyfunction]
#[pyo3(signature = (template, data, indices, cert, tol = tpwa::DEFAULT_TOL))]
fn find_subsets(
    template: &PyTemplate,
    data: &PyDataSet,
    indices: Vec<usize>,
    cert: Vec<usize>,
    tol: f64,
) -> PyResult<Vec<Vec<usize>>> {
    let indices = index_set(indices)?;
    let offset = tpwa::canonical_offset(&template.0, &data.0, &indices).map_err(err)?;
    let kids = tpwa::find_subsets(
        &template.0,
        &data.0,
        &indices,
        &offset,
        &index_set(cert)?,
        tol,
    )
    .map_err(err)?;
    Ok(kids.into_iter().map(|(s, _)| s.into_vec()).collect())
}

/// Size and sets of a minimum cover of `{1..universe_size}`, or `None`.
#[pyfunction]
fn min_cover(universe_size: usize, sets: Vec<Vec<usize>>) -> PyResult<Option<Vec<Vec<usize>>>> {
    let sets = sets
        .into_iter()
        .map(index_set)
        .collect::<PyResult<Vec<_>>>()?;
    let r = tpwa::min_cover(&tpwa::CoverProblem {
        universe_size,
        sets,
    });
    Ok(r.is_feasible()
        .then(|| r.chosen.into_iter().map(tpwa::IndexSet::into_vec).collect()))
}

#[pyfunction]
fn gen_arctan_1d(k: usize) -> PyResult<PyDataSet> {
    datagen::gen_arctan_1d(k).map(PyDataSet).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (n_per_axis = 10, x1_range = (0.0, 200.0), x2_range = (0.0, 400.0)))]
fn gen_uid_grid(
    n_per_axis: usize,
    x1_range: (f64, f64),
    x2_range: (f64, f64),
) -> PyResult<PyDataSet> {
    datagen::gen_uid_grid(n_per_axis, x1_range, x2_range)
        .map(PyDataSet)
        .map_err(err)
}

/// Random grid piecewise affine data and its ground-truth model.
#[pyfunction]
#[pyo3(signature = (d, cells, noise = 0.0, seed = 0, points_per_axis = datagen::DEFAULT_POINTS_PER_AXIS))]
fn gen_grid_pwa(
    d: usize,
    cells: usize,
    noise: f64,
    seed: u64,
    points_per_axis: usize,
) -> PyResult<(PyDataSet, PyModel)> {
    let (data, truth) =
        datagen::gen_grid_pwa_with(d, cells, points_per_axis, noise, seed).map_err(err)?;
    Ok((PyDataSet(data), PyModel(truth)))
}

#[pymodule]
pub fn tpwa_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("TpwaError", py.get_type::<TpwaError>())?;
    m.add("InfeasibleInstance", py.get_type::<InfeasibleInstance>())?;
    m.add("OutOfDomain", py.get_type::<OutOfDomain>())?;
    m.add("SolverFailure", py.get_type::<SolverFailure>())?;
    m.add("BudgetExceeded", py.get_type::<BudgetExceeded>())?;
    m.add("DEFAULT_TOL", tpwa::DEFAULT_TOL)?;
    m.add_class::<PyDataSet>()?;
    m.add_class::<PyTemplate>()?;
    m.add_class::<PyModel>()?;
    m.add_class::<PyPiece>()?;
    m.add_class::<PyCertificate>()?;
    m.add_class::<PySearchStats>()?;
    m.add_function(wrap_pyfunction!(fit_optimal, m)?)?;
    m.add_function(wrap_pyfunction!(fit_maximal, m)?)?;
    m.add_function(wrap_pyfunction!(naive_optimal, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_maximal_compatible, m)?)?;
    m.add_function(wrap_pyfunction!(chebyshev_fit, m)?)?;
    m.add_function(wrap_pyfunction!(is_compatible, m)?)?;
    m.add_function(wrap_pyfunction!(extract_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(verify_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(find_subsets, m)?)?;
    m.add_function(wrap_pyfunction!(min_cover, m)?)?;
    m.add_function(wrap_pyfunction!(gen_arctan_1d, m)?)?;
    m.add_function(wrap_pyfunction!(gen_uid_grid, m)?)?;
    m.add_function(wrap_pyfunction!(gen_grid_pwa, m)?)?;
    Ok(())
}
