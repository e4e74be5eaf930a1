use std::ffi::CString;

use pyo3::prelude::*;
use tpwa_py::tpwa_py;

fn run(code: &str) {
    pyo3::append_to_inittab!(tpwa_py);
    Python::initialize();
    Python::attach(|py| {
        let code = CString::new(code).unwrap();
        if let Err(e) = py.run(&code, None, None) {
            e.print(py);
            panic!("python code failed");
        }
    });
}

#[test]
fn module_round_trip() {
    run(r#"
import tpwa_py as tp
data = tp.gen_arctan_1d(11)
rect = tp.Template.rectangular(1)
model, stats = tp.fit_optimal(rect, data, 0.1)
assert model.q == 3
assert stats.iterations == 10
assert model.max_residual(data) <= 0.1 + tp.DEFAULT_TOL
assert tp.Model.from_json(model.to_json()).to_json() == model.to_json()
assert tp.find_subsets(rect, data, list(range(5, 12)), [6, 7, 8]) == [[5, 6, 7], [7, 8, 9, 10, 11]]
try:
    tp.fit_optimal(rect, tp.DataSet([[0.0], [0.0]], [[0.0], [1.0]]), 0.1)
    raise AssertionError("expected InfeasibleInstance")
except tp.InfeasibleInstance as e:
    assert e.args[1] == [1, 2]
assert issubclass(tp.OutOfDomain, tp.TpwaError)
"#);
}
