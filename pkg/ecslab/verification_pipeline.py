"""
Verification Pipeline
Runs validation, curvature verification and Olszak rank analysis for each case
and assembles deterministic reports
"""

import json
import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from tqdm import tqdm

from .case_config import CaseConfig
from .config import CONFIG
from .exact_algebra import exact_det, format_rational
from .olszak_analysis import (
    OlszakResult, kernel_is_dx1_line, null_parallel_check, olszak_rank_at,
    rank1_kernel_structure, rank_constancy, rescaling_invariance, dedup_consistency,
)
from .roter_construction import (
    CheckResult, CheckStatus, ClosedForms, RoterParams, ValidationReport,
    build_metric, closed_forms, predicted_rank, validate,
)
from .tensor_geometry import (
    Curvature, TensorField, compute_curvature, is_ricci_recurrent, is_trace_free,
    riemann_symmetry_violations, second_bianchi_holds,
)

logger = logging.getLogger(__name__)

VERIFY_CHECKS = (
    'closed_form_inverse', 'closed_form_christoffel', 'closed_form_riemann',
    'closed_form_ricci', 'closed_form_weyl', 'riemann_symmetries', 'first_bianchi',
    'second_bianchi', 'weyl_symmetries', 'weyl_trace_free', 'metric_compatibility',
    'weyl_parallel', 'scalar_zero', 'det_g', 'dn_null', 'dn_parallel', 'dn_dual_is_dx1',
    'dx1_in_kernel', 'weyl_nonzero', 'not_locally_symmetric', 'ricci_recurrent',
)

RANK_CHECKS = (
    'rank_dichotomy', 'rank_constancy', 'kernel_structure', 'dedup_consistency',
    'rescaling_invariance',
)


@dataclass
class VerificationReport:
    """Structured record of every check run on one case"""
    case_id: str
    command: str
    params: Dict
    checks: List[CheckResult] = field(default_factory=list)
    d_predicted: Optional[int] = None
    d_by_point: List[OlszakResult] = field(default_factory=list)
    validation_failed: bool = False

    def add(self, name: str, status: CheckStatus, detail: str = "") -> CheckResult:
        result = CheckResult(name, status, detail)
        self.checks.append(result)
        return result

    def extend(self, checks: Iterable[CheckResult]):
        self.checks.extend(checks)

    @property
    def overall(self) -> CheckStatus:
        if any(c.status is CheckStatus.FAIL for c in self.checks):
            return CheckStatus.FAIL
        return CheckStatus.PASS

    @property
    def has_warnings(self) -> bool:
        return any(c.status is CheckStatus.WARN for c in self.checks)

    def check(self, name: str) -> Optional[CheckResult]:
        return next((c for c in self.checks if c.name == name), None)

    def to_dict(self) -> Dict:
        return {
            'case': self.case_id,
            'command': self.command,
            'params': self.params,
            'checks': [c.to_dict() for c in self.checks],
            'd_predicted': self.d_predicted,
            'd_by_point': [r.to_dict() for r in self.d_by_point],
            'overall': self.overall.value,
        }


def _status(ok: bool) -> CheckStatus:
    return CheckStatus.PASS if ok else CheckStatus.FAIL


def _label(idx: Tuple[int, ...]) -> str:
    return "(" + ",".join(str(i + 1) for i in idx) + ")"


def compare_with_closed_form(tensor: TensorField, expected: Dict, complete: bool) -> Optional[str]:
    """First disagreement between pipeline components and a closed-form family, or None"""
    for idx, value in sorted(expected.items()):
        if tensor[idx] != value:
            return (f"{tensor.name}{_label(idx)}: pipeline {tensor[idx].as_expr()}, "
                    f"closed form {value.as_expr()}")
    if complete:
        for idx, value in tensor.nonzero_items():
            if idx not in expected:
                return f"{tensor.name}{_label(idx)}: pipeline {value.as_expr()}, closed form 0"
    return None


class VerificationPipeline:
    """Per-case orchestration of validation, curvature verification and rank analysis"""

    def __init__(self, config: Dict = None, show_progress: Optional[bool] = None):
        self.config = config or CONFIG
        sweep_config = self.config['sweep']
        self.workers = max(1, int(self.config.get('env', {}).get('WORKERS', sweep_config['workers'])))
        self.show_progress = sweep_config['show_progress'] if show_progress is None else show_progress

        self.stats = {
            'cases_run': 0,
            'passed': 0,
            'failed': 0,
            'total_time_ms': 0.0,
        }
        self._stats_lock = threading.Lock()

        logger.info("Verification pipeline initialized")

    # -- preparation -------------------------------------------------------

    def _new_report(self, case: CaseConfig, command: str) -> VerificationReport:
        return VerificationReport(case_id=case.id, command=command, params=case.echo())

    def _validated(self, case: CaseConfig, report: VerificationReport,
                   downstream: Sequence[str]) -> Optional[RoterParams]:
        """Record validation checks; on hard failure mark downstream checks SKIP"""
        params = case.to_params()
        validation: ValidationReport = validate(params)
        report.extend(validation.checks)
        if validation.ok:
            return params
        report.validation_failed = True
        for name in downstream:
            report.add(name, CheckStatus.SKIP, "validation failed")
        logger.warning(f"Case {case.id} failed validation: "
                       f"{', '.join(c.name for c in validation.failures)}")
        return None

    def _guarded(self, case: CaseConfig, report: VerificationReport, stage, *args):
        try:
            stage(*args)
        except Exception as e:
            logger.error(f"Case {case.id} raised during {report.command}: {str(e)}")
            report.add('internal_error', CheckStatus.FAIL, f"{type(e).__name__}: {e}")

    # -- verify ------------------------------------------------------------

    def _verify_checks(self, case: CaseConfig, params: RoterParams, curvature: Curvature,
                       report: VerificationReport):
        verify_config = self.config['verify']
        forms: ClosedForms = closed_forms(params)

        families = (
            ('closed_form_inverse', curvature.ginv, forms.inverse, True),
            ('closed_form_christoffel', curvature.gamma, forms.christoffel, True),
            ('closed_form_riemann', curvature.riemann, forms.riemann, False),
            ('closed_form_ricci', curvature.ricci, forms.ricci, True),
            ('closed_form_weyl', curvature.weyl, forms.weyl, False),
        )
        for name, tensor, expected, complete in families:
            mismatch = compare_with_closed_form(tensor, expected, complete)
            report.add(name, _status(mismatch is None), mismatch or f"{len(expected)} components agree")

        violations = riemann_symmetry_violations(curvature.riemann)
        algebraic = [v for v in violations if v != 'first_bianchi']
        report.add('riemann_symmetries', _status(not algebraic), ", ".join(algebraic))
        report.add('first_bianchi', _status('first_bianchi' not in violations))

        nabla_riemann = curvature.nabla('riemann')
        if case.n <= verify_config['bianchi_max_dimension']:
            report.add('second_bianchi', _status(second_bianchi_holds(nabla_riemann)))
        else:
            report.add('second_bianchi', CheckStatus.SKIP,
                       f"n = {case.n} above bianchi_max_dimension")

        weyl_violations = riemann_symmetry_violations(curvature.weyl)
        report.add('weyl_symmetries', _status(not weyl_violations), ", ".join(weyl_violations))
        report.add('weyl_trace_free', _status(is_trace_free(curvature.weyl, curvature.ginv)))
        report.add('metric_compatibility', _status(curvature.nabla('g').is_zero()), "∇g = 0")
        report.add('weyl_parallel', _status(curvature.nabla('weyl').is_zero()), "∇W = 0")
        report.add('scalar_zero', _status(not curvature.scalar),
                   "s = 0" if not curvature.scalar else f"s = {curvature.scalar.as_expr()}")

        det_g = exact_det(curvature.g.components.tolist())
        det_G = exact_det(params.G)
        report.add('det_g', _status(det_g == curvature.g.ring.ground_new(-det_G)),
                   f"det g = {det_g.as_expr()}, -det G = {format_rational(-det_G)}")

        results = [olszak_rank_at(curvature, p, dedup=self.config['rank']['dedup_rows'])
                   for p in case.sample_points]
        report.extend(null_parallel_check(curvature.g, curvature.gamma, results).to_checks())

        report.add('weyl_nonzero', _status(not curvature.weyl.is_zero()))
        if nabla_riemann.is_zero():
            report.add('not_locally_symmetric', CheckStatus.WARN, "∇R = 0: locally symmetric")
        else:
            report.add('not_locally_symmetric', CheckStatus.PASS, "∇R != 0")
        if verify_config['check_recurrence']:
            report.add('ricci_recurrent',
                       _status(is_ricci_recurrent(curvature.ricci, curvature.nabla('ricci'))))
        else:
            report.add('ricci_recurrent', CheckStatus.SKIP, "disabled")

    # -- rank --------------------------------------------------------------

    def _rank_checks(self, case: CaseConfig, params: RoterParams, curvature: Curvature,
                     report: VerificationReport):
        rank_config = self.config['rank']
        dedup = rank_config['dedup_rows']
        report.d_predicted = predicted_rank(params)

        if len(case.sample_points) >= 2:
            constancy = rank_constancy(curvature, case.sample_points, dedup=dedup)
            results = constancy.results
            report.add('rank_constancy', _status(constancy.ok),
                       f"d = {constancy.d_values}" + ("" if constancy.same_kernel else ", kernels differ"))
        else:
            results = [olszak_rank_at(curvature, p, dedup=dedup) for p in case.sample_points]
            report.add('rank_constancy', CheckStatus.SKIP, "need >= 2 points")
        report.d_by_point = results

        degenerate = [r for r in results if r.degenerate]
        if degenerate:
            report.add('rank_dichotomy', CheckStatus.FAIL, f"conformally flat at {len(degenerate)} point(s)")
        else:
            matches = all(r.d == report.d_predicted for r in results)
            report.add('rank_dichotomy', _status(matches),
                       f"predicted d = {report.d_predicted}, computed {[r.d for r in results]}")

        structure = CheckResult('kernel_structure', CheckStatus.PASS, "kernel = span{dx¹}")
        for r in results:
            if r.d == 2:
                outcome = rank1_kernel_structure(params.A, r)
                structure = CheckResult('kernel_structure', outcome.status, outcome.detail)
            elif not kernel_is_dx1_line(r):
                structure = CheckResult('kernel_structure', CheckStatus.FAIL,
                                        f"d = {r.d} kernel is not a rank-1 or rank-2 Roter kernel")
            if structure.status is not CheckStatus.PASS:
                break
        report.checks.append(structure)

        first = case.sample_points[0]
        report.add('dedup_consistency', _status(dedup_consistency(curvature, first)))
        factor = rank_config['rescaling_factor']
        c = format_rational(f"{factor[0]}/{factor[1]}")
        report.add('rescaling_invariance',
                   _status(rescaling_invariance(curvature, first, c)), f"c = {c}")

    # -- entry points ------------------------------------------------------

    def _run(self, case: CaseConfig, command: str) -> VerificationReport:
        start_time = time.time()
        report = self._new_report(case, command)
        downstream = {
            'verify': VERIFY_CHECKS,
            'rank': RANK_CHECKS,
            'sweep': VERIFY_CHECKS + RANK_CHECKS,
            'validate': (),
        }[command]

        def stages():
            params = self._validated(case, report, downstream)
            if params is None or command == 'validate':
                return
            logger.info(f"Building metric for case {case.id} (n={case.n})")
            curvature = compute_curvature(build_metric(params))
            if command in ('verify', 'sweep'):
                self._verify_checks(case, params, curvature, report)
            if command in ('rank', 'sweep'):
                self._rank_checks(case, params, curvature, report)

        self._guarded(case, report, stages)
        self._update_stats(report, (time.time() - start_time) * 1000)
        logger.info(f"Case {case.id} {command}: {report.overall.value}")
        return report

    def validate(self, case: CaseConfig) -> VerificationReport:
        return self._run(case, 'validate')

    def verify(self, case: CaseConfig) -> VerificationReport:
        return self._run(case, 'verify')

    def rank(self, case: CaseConfig) -> VerificationReport:
        return self._run(case, 'rank')

    def run_many(self, cases: Sequence[CaseConfig], command: str = 'sweep') -> List[VerificationReport]:
        """Run a command over cases, optionally concurrently; results keep config order"""
        def one(case):
            return self._run(case, command)

        progress = tqdm(total=len(cases), desc=command, unit="case", disable=not self.show_progress)
        reports: List[VerificationReport] = []
        if self.workers == 1:
            for case in cases:
                reports.append(one(case))
                progress.update(1)
        else:
            with ThreadPoolExecutor(max_workers=self.workers) as executor:
                for report in executor.map(one, cases):
                    reports.append(report)
                    progress.update(1)
        progress.close()
        return reports

    def sweep(self, cases: Sequence[CaseConfig]) -> List[VerificationReport]:
        return self.run_many(cases, 'sweep')

    def _update_stats(self, report: VerificationReport, elapsed_ms: float):
        with self._stats_lock:
            self.stats['cases_run'] += 1
            if report.overall is CheckStatus.PASS:
                self.stats['passed'] += 1
            else:
                self.stats['failed'] += 1
            self.stats['total_time_ms'] += elapsed_ms

    def get_performance_stats(self) -> Dict:
        with self._stats_lock:
            return dict(self.stats)


def summarize(reports: Sequence[VerificationReport]) -> Dict:
    return {
        'pass': sum(1 for r in reports if r.overall is CheckStatus.PASS),
        'fail': sum(1 for r in reports if r.overall is CheckStatus.FAIL),
        'warn': sum(1 for r in reports if r.has_warnings),
    }


def render_report(reports: Sequence[VerificationReport], config: Dict = None) -> str:
    """Deterministic JSON text for a list of case reports"""
    report_config = (config or CONFIG)['report']
    document = {
        'cases': [r.to_dict() for r in reports],
        'summary': summarize(reports),
    }
    return json.dumps(document, indent=report_config['indent'],
                      sort_keys=report_config['sort_keys'], ensure_ascii=False) + "\n"


def exit_code(reports: Sequence[VerificationReport]) -> int:
    """2 on any invariant or rank FAIL, 1 on hard validation failure, 0 otherwise"""
    if any(r.overall is CheckStatus.FAIL and not r.validation_failed for r in reports):
        return 2
    if any(r.validation_failed for r in reports):
        return 1
    return 0


def create_verification_pipeline(config: Dict = None, show_progress: Optional[bool] = None) -> VerificationPipeline:
    """Factory function to create a verification pipeline"""
    return VerificationPipeline(config, show_progress)


def run_verify(case: CaseConfig, config: Dict = None) -> VerificationReport:
    return create_verification_pipeline(config, show_progress=False).verify(case)


def run_rank(case: CaseConfig, config: Dict = None) -> VerificationReport:
    return create_verification_pipeline(config, show_progress=False).rank(case)


def run_sweep(cases: Sequence[CaseConfig], config: Dict = None) -> Dict:
    """Verify and rank every case; aggregate summary plus the per-case reports"""
    pipeline = create_verification_pipeline(config)
    reports = pipeline.sweep(cases)
    return {'reports': reports, 'summary': summarize(reports), 'exit_code': exit_code(reports)}
