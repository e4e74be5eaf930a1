"""Smoke test for the tpwa_py extension module.

Build and install first, e.g. `pip install --no-build-isolation ./crates/python`,
then run `python python/smoke_test.py`.
"""

import math

import tpwa_py as tp


def main():
    data = tp.gen_arctan_1d(11)
    assert len(data) == 11 and data.d == 1 and data.e == 1
    assert abs(data.y(1)[0] + 0.5411976267147015) < 1e-12

    rect = tp.Template.rectangular(1)
    model, stats = tp.fit_optimal(rect, data, 0.1)
    assert model.q == 3, model.q
    assert model.max_residual(data) <= 0.1 + tp.DEFAULT_TOL
    assert stats.iterations >= 1
    supports = [p.support for p in model.pieces]
    assert [1, 2, 3, 4, 5] in supports and [5, 6, 7] in supports, supports

    again = tp.Model.from_json(model.to_json())
    assert again.to_json() == model.to_json()
    assert tp.naive_optimal(rect, data, 0.1).q == 3
    assert tp.fit_maximal(rect, data, 0.1).q == 3

    kids = tp.find_subsets(rect, data, list(range(1, 12)), [4, 5, 6])
    assert kids == [[1, 2, 3, 4, 5], list(range(5, 12))], kids

    cert = tp.extract_certificate(data, list(range(1, 12)), 0.1)
    assert len(cert.indices) <= 3
    assert tp.verify_certificate(data, cert, 0.1)
    a, b, t = tp.chebyshev_fit(data, cert.indices)
    assert t > 0.1

    try:
        model.evaluate([5.0])
    except tp.OutOfDomain:
        pass
    else:
        raise AssertionError("expected OutOfDomain")
    assert all(math.isfinite(v) for v in model.evaluate([5.0], oob="nearest"))

    clash = tp.DataSet([[0.0], [0.0]], [[0.0], [1.0]])
    try:
        tp.fit_optimal(rect, clash, 0.1)
    except tp.InfeasibleInstance as e:
        assert e.args[1] == [1, 2], e.args
    else:
        raise AssertionError("expected InfeasibleInstance")

    grid, truth = tp.gen_grid_pwa(2, 2, seed=3)
    fit, _ = tp.fit_optimal(tp.Template.rectangular(2), grid, 0.0)
    assert fit.q <= truth.q
    assert tp.min_cover(3, [[1, 2], [2, 3], [3]]) == [[1, 2], [2, 3]]

    print("smoke test passed: q =", model.q, "iterations =", stats.iterations)


if __name__ == "__main__":
    main()
