"""
Tests for Roter parameter validation, metric assembly and closed forms
"""

import numpy as np
import pytest
from sympy.polys.domains import QQ

from ecslab.conftest import R1, R2, R3, params_of
from ecslab.exact_algebra import coordinate, coordinate_ring, exact_rank
from ecslab.roter_construction import (
    CheckStatus, RoterParams, RoterParamsError, build_metric, closed_forms,
    metric_g11, predicted_rank, random_roter_params, trace_coupling, validate,
)


def statuses(report):
    return {c.name: c.status for c in report.checks}


@pytest.mark.parametrize("data", [R1, R2, R3])
def test_reference_cases_validate(data):
    report = validate(params_of(data))
    assert report.ok
    assert statuses(report)['trace_coupling'] is CheckStatus.PASS
    assert statuses(report)['f_nonconstant'] is CheckStatus.PASS
    assert all(c.status is not CheckStatus.WARN for c in report.checks)


def test_constant_f_warns_but_passes():
    report = validate(params_of(dict(R2, f_coeffs=[3])))
    assert report.ok
    check = next(c for c in report.checks if c.name == 'f_nonconstant')
    assert check.status is CheckStatus.WARN
    assert "nonconstant f required" in check.detail


def test_zero_a_rejected():
    report = validate(params_of(dict(R1, A_rows=[[0] * 3] * 3)))
    assert not report.ok
    assert statuses(report)['A_nonzero'] is CheckStatus.FAIL


def test_trace_coupling_violation_rejected():
    params = params_of(dict(R2, A_rows=[[1, 0, 0], [0, 1, 0], [0, 0, 1]]))
    assert trace_coupling(params) == 3
    report = validate(params)
    assert statuses(report)['trace_coupling'] is CheckStatus.FAIL


def test_rank_one_a_with_definite_g_warns():
    params = params_of(dict(R2, A_rows=[[1, 0, 0], [0, 0, 0], [0, 0, 0]]))
    report = validate(params)
    assert statuses(report)['rank1_needs_indefinite_G'] is CheckStatus.WARN
    assert statuses(report)['trace_coupling'] is CheckStatus.FAIL


def test_dimension_and_shape_failures():
    small = RoterParams.from_data(3, [0, 1], [[1]], [[1]])
    assert statuses(validate(small))['dimension'] is CheckStatus.FAIL

    mismatched = RoterParams.from_data(5, [0, 1], [[1, 0], [0, -1]], R1['A_rows'])
    report = validate(mismatched)
    assert statuses(report)['block_shape'] is CheckStatus.FAIL
    assert not report.ok


def test_g_must_be_symmetric_and_nondegenerate():
    asymmetric = params_of(dict(R3, G_rows=[[1, 1], [0, -1]]))
    assert statuses(validate(asymmetric))['G_symmetric'] is CheckStatus.FAIL

    singular = params_of(dict(R3, G_rows=[[1, 1], [1, 1]]))
    assert statuses(validate(singular))['G_nondegenerate'] is CheckStatus.FAIL


def test_f_must_depend_on_x1_only():
    base = params_of(R1)
    params = RoterParams(n=5, f=coordinate(5, 2), G=base.G, A=base.A)
    assert statuses(validate(params))['f_of_x1'] is CheckStatus.FAIL


def test_build_metric_components(r1_params):
    g = build_metric(r1_params)
    x1, x2, x3, x4, _ = coordinate_ring(5).gens
    assert g[0, 0] == x1 * (x2 ** 2 + x3 ** 2 - x4 ** 2) + (x2 + x4) ** 2
    assert g[0, 4] == 1 and g[4, 0] == 1
    assert [g[k, k] for k in (1, 2, 3)] == [1, 1, -1]
    assert g[4, 4] == 0
    assert g[0, 1] == 0


def test_build_metric_r3_quadratic_f(r3_params):
    g = build_metric(r3_params)
    x1, x2, x3, _ = coordinate_ring(4).gens
    assert g[0, 0] == x1 ** 2 * (x2 ** 2 - x3 ** 2) + 2 * x2 * x3
    assert g[0, 3] == 1
    assert [g[1, 1], g[2, 2]] == [1, -1]


def test_build_metric_refuses_invalid_params():
    with pytest.raises(RoterParamsError) as excinfo:
        build_metric(params_of(dict(R1, A_rows=[[0] * 3] * 3)))
    assert not excinfo.value.report.ok
    assert "A_nonzero" in str(excinfo.value)


def test_closed_forms_r1(r1_params):
    forms = closed_forms(r1_params)
    x1 = coordinate(5, 1)
    assert forms.g11 == metric_g11(r1_params)
    assert forms.ricci == {(0, 0): -3 * x1}
    assert forms.inverse[(4, 4)] == -forms.g11
    assert forms.weyl[(0, 1, 3, 0)] == 1
    assert forms.weyl[(0, 2, 2, 0)] == 0
    assert forms.riemann[(0, 1, 1, 0)] == x1 + 1
    assert forms.christoffel[(4, 0, 0)] == (coordinate(5, 2) ** 2 + coordinate(5, 3) ** 2
                                           - coordinate(5, 4) ** 2) * QQ(1, 2)


def test_closed_forms_r2_christoffel(r2_params):
    forms = closed_forms(r2_params)
    x1, x2 = coordinate(5, 1), coordinate(5, 2)
    assert forms.christoffel[(4, 0, 1)] == (x1 + 1) * x2
    assert forms.christoffel[(4, 1, 0)] == (x1 + 1) * x2
    assert forms.weyl[(0, 3, 3, 0)] == -2


def test_predicted_rank(r1_params, r2_params, r3_params):
    assert predicted_rank(r1_params) == 2
    assert predicted_rank(r2_params) == 1
    assert predicted_rank(r3_params) == 1
    with pytest.raises(RoterParamsError):
        predicted_rank(params_of(dict(R1, A_rows=[[0] * 3] * 3)))


@pytest.mark.parametrize("n", [4, 5, 6, 7])
@pytest.mark.parametrize("rank_a", [1, 2])
def test_random_params_are_valid(n, rank_a):
    rng = np.random.default_rng(100 * n + rank_a)
    for _ in range(3):
        params = random_roter_params(n, rank_a, rng)
        report = validate(params)
        assert report.ok, report.to_dict()
        assert exact_rank(params.A) == rank_a
        assert trace_coupling(params) == 0


def test_random_params_full_rank_and_determinism():
    first = random_roter_params(6, 4, np.random.default_rng(5))
    second = random_roter_params(6, 4, np.random.default_rng(5))
    assert exact_rank(first.A) == 4
    assert first.G == second.G and first.A == second.A and first.f == second.f


def test_random_params_rejects_impossible_rank():
    with pytest.raises(ValueError):
        random_roter_params(5, 4, np.random.default_rng(0))
    with pytest.raises(ValueError):
        random_roter_params(3, 1, np.random.default_rng(0))


def test_rank_one_random_g_is_indefinite():
    params = random_roter_params(5, 1, np.random.default_rng(3))
    report = validate(params)
    assert 'rank1_needs_indefinite_G' not in {c.name for c in report.checks}
