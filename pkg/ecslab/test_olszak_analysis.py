"""
Tests for the wedge-divisibility kernel, the Olszak rank and the ∂_n facts
"""

import numpy as np
import pytest
from sympy.polys.domains import QQ

from ecslab.case_config import default_points
from ecslab.conftest import R1, params_of
from ecslab.exact_algebra import coordinate_ring, exact_rank, rational_matrix
from ecslab.olszak_analysis import (
    CONFORMALLY_FLAT_WARNING, OlszakAnalysisError, assemble_wedge_system,
    dedup_consistency, dx1, kernel_is_dx1_line, null_parallel_check,
    olszak_rank_at, olszak_rank_from_values, rank1_kernel_structure,
    rank_constancy, rescaling_invariance,
)
from ecslab.roter_construction import (
    CheckStatus, build_metric, predicted_rank, random_roter_params,
)
from ecslab.tensor_geometry import Point, compute_curvature, evaluate_at, metric_from_rows

E1 = (1, 0, 0, 0, 0)


def zeros(n):
    return np.full((n,) * 4, QQ.zero, dtype=object)


def test_zero_weyl_gives_full_kernel():
    system = assemble_wedge_system(zeros(5), 5)
    assert system.rows == []
    assert system.raw_row_count == 10 * 10
    assert len(system.kernel()) == 5


def test_zero_weyl_is_degenerate():
    result = olszak_rank_from_values(zeros(4), 4, Point.of([0, 0, 0, 0]))
    assert result.degenerate
    assert result.d == 4
    assert result.warning == CONFORMALLY_FLAT_WARNING


def test_flat_metric_point_is_degenerate():
    R = coordinate_ring(4)
    rows = [[R.ground_new(QQ(d)) if i == j else R.zero for j in range(4)]
            for i, d in enumerate([1, 1, 1, -1])]
    curvature = compute_curvature(metric_from_rows(rows))
    result = olszak_rank_at(curvature, Point.of([1, 2, 3, 4]))
    assert result.degenerate and result.d == 4


def test_r1_wedge_system_kernel(r1_curvature):
    W = evaluate_at(r1_curvature.weyl, Point.of([0, 1, 0, 0, 0]))
    system = assemble_wedge_system(W, 5)
    assert 0 < len(system.rows) < system.raw_row_count
    assert system.kernel() == [E1, (0, 1, 0, 1, 0)]


@pytest.mark.parametrize("point", default_points(5))
def test_r1_rank_two_everywhere(r1_curvature, point):
    result = olszak_rank_at(r1_curvature, point)
    assert result.d == 2
    assert result.kernel_basis == [E1, (0, 1, 0, 1, 0)]


@pytest.mark.parametrize("point", default_points(5))
def test_r2_rank_one_everywhere(r2_curvature, point):
    result = olszak_rank_at(r2_curvature, point)
    assert result.d == 1
    assert result.kernel_basis == [E1]
    assert kernel_is_dx1_line(result)


def test_r3_rank_one(r3_curvature):
    for point in default_points(4):
        assert olszak_rank_at(r3_curvature, point).d == 1


def test_point_dimension_checked(r1_curvature):
    with pytest.raises(OlszakAnalysisError):
        olszak_rank_at(r1_curvature, Point.of([0, 1, 0, 0]))


def test_rank_constancy(r1_curvature, r2_curvature):
    report = rank_constancy(r1_curvature, default_points(5))
    assert report.ok
    assert report.d_values == [2] * 5
    assert rank_constancy(r2_curvature, default_points(5)).d_values == [1] * 5


def test_rank_constancy_needs_two_points(r1_curvature):
    with pytest.raises(OlszakAnalysisError, match="need >= 2 points"):
        rank_constancy(r1_curvature, default_points(5)[:1])


@pytest.mark.parametrize("name", ["r1_curvature", "r3_curvature"])
def test_null_parallel_facts(name, request):
    curvature = request.getfixturevalue(name)
    results = [olszak_rank_at(curvature, p) for p in default_points(curvature.n)]
    report = null_parallel_check(curvature.g, curvature.gamma, results)
    assert report.is_null and report.is_parallel and report.dual_is_dx1
    assert report.dx1_in_kernel is True
    assert report.ok
    assert all(c.status is CheckStatus.PASS for c in report.to_checks())


def test_perturbed_gnn_is_not_null(r1_curvature):
    R = coordinate_ring(5)
    rows = [[r1_curvature.g[i, j] for j in range(5)] for i in range(5)]
    rows[4][4] = R.one
    report = null_parallel_check(metric_from_rows(rows), r1_curvature.gamma)
    assert not report.is_null
    assert report.dx1_in_kernel is None
    assert not report.ok
    assert any("g_{55}" in f for f in report.failures)


def test_rank1_kernel_structure_r1(r1_curvature, r1_params):
    result = olszak_rank_at(r1_curvature, Point.of([0, 1, 0, 0, 0]))
    check = rank1_kernel_structure(r1_params.A, result)
    assert check.status is CheckStatus.PASS


def test_rank1_kernel_structure_skipped_for_full_rank(r2_curvature, r2_params):
    result = olszak_rank_at(r2_curvature, Point.of([0, 1, 0, 0, 0]))
    assert rank1_kernel_structure(r2_params.A, result).status is CheckStatus.SKIP


def test_rank1_kernel_structure_scaled_rows():
    """A = 2 v v^T with v = (1, 0, 1) under G = diag(1, 1, -1)"""
    params = params_of(dict(R1, A_rows=[[2, 0, 2], [0, 0, 0], [2, 0, 2]]))
    curvature = compute_curvature(build_metric(params))
    result = olszak_rank_at(curvature, Point.of([1, 1, 0, 0, 0]))
    assert result.kernel_basis == [E1, (0, 1, 0, 1, 0)]
    assert rank1_kernel_structure(params.A, result).status is CheckStatus.PASS


def test_rank1_kernel_structure_detects_wrong_direction(r1_curvature):
    result = olszak_rank_at(r1_curvature, Point.of([0, 1, 0, 0, 0]))
    other_a = rational_matrix([[0, 0, 0], [0, 1, 0], [0, 0, 0]])
    assert rank1_kernel_structure(other_a, result).status is CheckStatus.FAIL


def test_dedup_and_rescaling_agree(r1_curvature, r2_curvature):
    point = Point.of(["1/2", -1, "3/2", -2, "5/2"])
    for curvature in (r1_curvature, r2_curvature):
        assert dedup_consistency(curvature, point)
        assert rescaling_invariance(curvature, point, "-3/2")
    with pytest.raises(OlszakAnalysisError):
        rescaling_invariance(r1_curvature, point, 0)


def test_result_serialization(r1_curvature):
    data = olszak_rank_at(r1_curvature, Point.of(["1/2", 0, 0, 0, 1])).to_dict()
    assert data == {
        'point': ['1/2', '0', '0', '0', '1'],
        'd': 2,
        'kernel_basis': [['1', '0', '0', '0', '0'], ['0', '1', '0', '1', '0']],
    }


@pytest.mark.slow
def test_rank_dichotomy_on_random_metrics():
    """d = 2 iff rank A = 1, d = 1 iff rank A >= 2, over randomized parameters"""
    rng = np.random.default_rng(2024)
    checked = 0
    for n in (5, 6, 7):
        for rank_a in (1, 2, 1, n - 2, 1, 2, n - 2):
            params = random_roter_params(n, rank_a, rng)
            curvature = compute_curvature(build_metric(params))
            point = Point.of([int(v) for v in rng.integers(-3, 4, size=n)])
            result = olszak_rank_at(curvature, point)
            assert result.d == predicted_rank(params)
            assert result.contains(dx1(n))
            if result.d == 2:
                assert rank1_kernel_structure(params.A, result).status is CheckStatus.PASS
            else:
                assert exact_rank(params.A) >= 2
                assert kernel_is_dx1_line(result)
            checked += 1
    assert checked >= 20
