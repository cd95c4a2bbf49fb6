"""
Case Configuration
Parses YAML/JSON case files into validated CaseConfig records and supplies the
documented default sample points
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import yaml
from sympy.polys.domains import QQ

from .exact_algebra import ExactAlgebraError, Rational, format_rational, to_rational
from .roter_construction import RoterParams
from .tensor_geometry import Point

logger = logging.getLogger(__name__)

CASE_FIELDS = ('id', 'n', 'f_coeffs', 'G_rows', 'A_rows', 'sample_points')


class ConfigParseError(ValueError):
    """Malformed case file; names the offending case id and field when known"""

    def __init__(self, message: str, case_id: Optional[str] = None, field: Optional[str] = None):
        self.case_id = case_id
        self.field = field
        where = []
        if case_id is not None:
            where.append(f"case {case_id}")
        if field is not None:
            where.append(f"field {field}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(f"{prefix}{message}")


@dataclass
class CaseConfig:
    id: str
    n: int
    f_coeffs: Tuple[Rational, ...]
    G_rows: Tuple[Tuple[Rational, ...], ...]
    A_rows: Tuple[Tuple[Rational, ...], ...]
    sample_points: List[Point] = field(default_factory=list)
    points_defaulted: bool = False

    def to_params(self) -> RoterParams:
        return RoterParams.from_data(self.n, self.f_coeffs, self.G_rows, self.A_rows)

    def echo(self) -> Dict:
        """Canonical rendering of the case parameters for reports"""
        return {
            'n': self.n,
            'f_coeffs': [format_rational(c) for c in self.f_coeffs],
            'G_rows': [[format_rational(v) for v in row] for row in self.G_rows],
            'A_rows': [[format_rational(v) for v in row] for row in self.A_rows],
            'sample_points': [[format_rational(v) for v in p.coords] for p in self.sample_points],
        }


def default_points(n: int) -> List[Point]:
    """The fixed set of five sample points used when a case names none"""
    def unit(*entries):
        coords = [QQ.zero] * n
        for position, value in entries:
            coords[position] = QQ(value)
        return Point(tuple(coords))

    alternating = Point(tuple(QQ((-1) ** i * (i + 1), 2) for i in range(n)))
    last = Point((QQ(-2),) + (QQ.zero,) * (n - 2) + (QQ(1, 3),))
    return [
        unit((1, 1)),
        unit((0, 1), (1, 1)),
        unit((2, 1)),
        alternating,
        last,
    ]


def _rational(value: Any, case_id: Optional[str], field_name: str) -> Rational:
    if isinstance(value, float):
        raise ConfigParseError(f"Floating-point literal {value!r}; write rationals as \"p/q\"",
                               case_id, field_name)
    try:
        return to_rational(value)
    except ExactAlgebraError as e:
        raise ConfigParseError(str(e), case_id, field_name) from e


def _vector(value: Any, length: Optional[int], case_id: Optional[str], field_name: str) -> Tuple[Rational, ...]:
    if not isinstance(value, list):
        raise ConfigParseError(f"Expected a list, got {type(value).__name__}", case_id, field_name)
    if length is not None and len(value) != length:
        raise ConfigParseError(f"Expected {length} entries, got {len(value)}", case_id, field_name)
    return tuple(_rational(v, case_id, field_name) for v in value)


def _square(value: Any, size: int, case_id: str, field_name: str) -> Tuple[Tuple[Rational, ...], ...]:
    if not isinstance(value, list) or len(value) != size:
        got = len(value) if isinstance(value, list) else type(value).__name__
        raise ConfigParseError(f"Expected {size} rows, got {got}", case_id, field_name)
    return tuple(_vector(row, size, case_id, field_name) for row in value)


def _parse_case(raw: Any, position: int) -> CaseConfig:
    if not isinstance(raw, dict):
        raise ConfigParseError(f"Case #{position + 1} is not a mapping")

    if 'id' not in raw:
        raise ConfigParseError(f"Case #{position + 1} has no id", field='id')
    case_id = raw['id']
    if isinstance(case_id, bool) or not isinstance(case_id, (str, int)):
        raise ConfigParseError(f"Case #{position + 1} id must be a string", field='id')
    case_id = str(case_id)

    unknown = sorted(set(raw) - set(CASE_FIELDS))
    if unknown:
        raise ConfigParseError(f"Unknown fields {unknown}", case_id, unknown[0])
    for required in ('n', 'f_coeffs', 'G_rows', 'A_rows'):
        if required not in raw:
            raise ConfigParseError("Missing required field", case_id, required)

    n = raw['n']
    if isinstance(n, bool) or not isinstance(n, int) or n < 3:
        raise ConfigParseError(f"n must be an integer >= 3, got {n!r}", case_id, 'n')

    f_coeffs = _vector(raw['f_coeffs'], None, case_id, 'f_coeffs')
    if not f_coeffs:
        raise ConfigParseError("At least one coefficient required", case_id, 'f_coeffs')

    G_rows = _square(raw['G_rows'], n - 2, case_id, 'G_rows')
    A_rows = _square(raw['A_rows'], n - 2, case_id, 'A_rows')

    points_raw = raw.get('sample_points')
    if points_raw is None:
        points = default_points(n)
        defaulted = True
    else:
        if not isinstance(points_raw, list) or not points_raw:
            raise ConfigParseError("Expected a non-empty list of points", case_id, 'sample_points')
        points = [Point(_vector(p, n, case_id, 'sample_points')) for p in points_raw]
        defaulted = False

    return CaseConfig(case_id, n, f_coeffs, G_rows, A_rows, points, defaulted)


def _load(text: str) -> Any:
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigParseError(f"Malformed document: {e}") from e


def parse_config(text: str) -> List[CaseConfig]:
    """Parse a case document `cases: [{id, n, f_coeffs, G_rows, A_rows, sample_points?}]`"""
    document = _load(text)
    if not isinstance(document, dict) or 'cases' not in document:
        raise ConfigParseError("Document must be a mapping with a 'cases' list", field='cases')
    raw_cases = document['cases']
    if not isinstance(raw_cases, list):
        raise ConfigParseError("'cases' must be a list", field='cases')
    if not raw_cases:
        raise ConfigParseError("no cases", field='cases')

    cases = [_parse_case(raw, position) for position, raw in enumerate(raw_cases)]
    seen = set()
    for case in cases:
        if case.id in seen:
            raise ConfigParseError("Duplicate case id", case.id, 'id')
        seen.add(case.id)

    logger.info(f"Parsed {len(cases)} case(s): {', '.join(c.id for c in cases)}")
    return cases


def parse_points(text: str) -> List[Point]:
    """Parse a points document `points: [[...], ...]`"""
    document = _load(text)
    if not isinstance(document, dict) or not isinstance(document.get('points'), list) or not document['points']:
        raise ConfigParseError("Points document must contain a non-empty 'points' list", field='points')
    return [Point(_vector(p, None, None, 'points')) for p in document['points']]


def apply_points(cases: Sequence[CaseConfig], points: Sequence[Point]) -> List[CaseConfig]:
    """Replace the sample points of every case whose dimension matches some of the given points"""
    dimensions = {c.n for c in cases}
    for p in points:
        if len(p) not in dimensions:
            raise ConfigParseError(f"Point of length {len(p)} matches no case dimension", field='points')

    updated = []
    for case in cases:
        matching = [p for p in points if len(p) == case.n]
        if matching:
            logger.debug(f"Case {case.id}: {len(matching)} sample point(s) from points file")
            case = CaseConfig(case.id, case.n, case.f_coeffs, case.G_rows, case.A_rows, matching, False)
        updated.append(case)
    return updated


def load_cases(config_text: str, points_text: Optional[str] = None) -> List[CaseConfig]:
    cases = parse_config(config_text)
    if points_text is not None:
        cases = apply_points(cases, parse_points(points_text))
    return cases
