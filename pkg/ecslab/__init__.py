"""
ecslab
Exact tensor calculus for Roter metrics: parallel Weyl verification and the Olszak rank
"""

from .case_config import CaseConfig, ConfigParseError, parse_config
from .roter_construction import RoterParams, build_metric, closed_forms, predicted_rank, validate
from .tensor_geometry import Point, TensorField, compute_curvature
from .verification_pipeline import (
    VerificationReport, create_verification_pipeline, run_rank, run_sweep, run_verify,
)

__version__ = "0.1.0"
