"""
Shared fixtures: the three reference Roter cases and their curvature
"""

from pathlib import Path

import pytest

from ecslab.case_config import parse_config
from ecslab.roter_construction import RoterParams, build_metric
from ecslab.tensor_geometry import compute_curvature

CASES_FILE = Path(__file__).parent.parent / "cases" / "roter_cases.yaml"

R1 = dict(n=5, f_coeffs=[0, 1],
          G_rows=[[1, 0, 0], [0, 1, 0], [0, 0, -1]],
          A_rows=[[1, 0, 1], [0, 0, 0], [1, 0, 1]])
R2 = dict(n=5, f_coeffs=[0, 1],
          G_rows=[[1, 0, 0], [0, 1, 0], [0, 0, 1]],
          A_rows=[[1, 0, 0], [0, 1, 0], [0, 0, -2]])
R3 = dict(n=4, f_coeffs=[0, 0, 1],
          G_rows=[[1, 0], [0, -1]],
          A_rows=[[0, 1], [1, 0]])


def params_of(data) -> RoterParams:
    return RoterParams.from_data(data['n'], data['f_coeffs'], data['G_rows'], data['A_rows'])


def case_yaml(case_id, data, points=None) -> str:
    """Serialize a case dict in the documented case-file format"""
    lines = ["cases:", f"  - id: {case_id}", f"    n: {data['n']}",
             f"    f_coeffs: {list(data['f_coeffs'])}",
             f"    G_rows: {[list(r) for r in data['G_rows']]}",
             f"    A_rows: {[list(r) for r in data['A_rows']]}"]
    if points is not None:
        lines.append(f"    sample_points: {points}")
    return "\n".join(lines).replace("'", '"') + "\n"


@pytest.fixture(scope="session")
def r1_params():
    return params_of(R1)


@pytest.fixture(scope="session")
def r2_params():
    return params_of(R2)


@pytest.fixture(scope="session")
def r3_params():
    return params_of(R3)


@pytest.fixture(scope="session")
def r1_curvature(r1_params):
    return compute_curvature(build_metric(r1_params))


@pytest.fixture(scope="session")
def r2_curvature(r2_params):
    return compute_curvature(build_metric(r2_params))


@pytest.fixture(scope="session")
def r3_curvature(r3_params):
    return compute_curvature(build_metric(r3_params))


@pytest.fixture(scope="session")
def sample_cases():
    return parse_config(CASES_FILE.read_text(encoding='utf-8'))
