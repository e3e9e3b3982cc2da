# ---
# jupyter:
#   jupytext:
#     text_representation:
#       extension: .py
#       format_name: light
#       format_version: '1.5'
#       jupytext_version: 1.16.4
#   kernelspec:
#     display_name: Python (fixsplit-venv)
#     language: python
#     name: fixsplit-venv
# ---

# +
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, List, NamedTuple, Optional

try:
    from .exceptions import InvalidSplitting, SplittingError
    from .numeric import RATIONALS, Scalar, ScalarMode, sign
    from .planar import PlanarLattice, PlanarVector, direction_is_rational, is_primitive, primitive_vector_along
except ImportError:
    from exceptions import InvalidSplitting, SplittingError
    from numeric import RATIONALS, Scalar, ScalarMode, sign
    from planar import PlanarLattice, PlanarVector, direction_is_rational, is_primitive, primitive_vector_along
# -

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CylinderClass:
    """
    Marked cylinder class shared by both cylinders of a fix-splitting.

    Attributes:
        lattice (PlanarLattice): lattice of the cylinder class
        circumference (PlanarVector): distinguished primitive element, the splitting vector
    """
    lattice: PlanarLattice
    circumference: PlanarVector

    @property
    def area(self):
        return self.lattice.covolume


@dataclass
class Violation:
    code: str
    message: str

    def to_json(self) -> dict:
        return {'code': self.code, 'message': self.message}


@dataclass
class ValidationReport:
    """Outcome of every validity check on a splitting; `violations` is empty for a valid one."""
    checks: Dict[str, bool] = field(default_factory=dict)
    violations: List[Violation] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    @property
    def codes(self) -> List[str]:
        return [v.code for v in self.violations]

    def record(self, name: str, passed: bool, code: str = None, message: str = ''):
        self.checks[name] = passed
        if not passed:
            self.violations.append(Violation(code or name, message))

    def to_json(self) -> dict:
        return {
            'valid': self.valid,
            'checks': dict(sorted(self.checks.items())),
            'violations': [v.to_json() for v in self.violations],
        }


class Areas(NamedTuple):
    a1: Any
    a2: Any
    ac: Any
    total: Any


@dataclass(frozen=True)
class FixSplitting:
    """
    Fix-splitting (T1, T2, C, w): two slit tori given by their lattices, the cylinder class
    counted twice, and the common holonomy w of the four boundary saddle connections.

    Construction never validates; call `validate`.
    """
    lat1: PlanarLattice
    lat2: PlanarLattice
    cyl: CylinderClass
    w: PlanarVector

    @cached_property
    def report(self) -> ValidationReport:
        return validate(self)

    @property
    def mode(self) -> ScalarMode:
        return mode_of(self.w.x, self.w.y, self.lat1.b1.x)

    def with_orientation(self, orientation: int) -> 'FixSplitting':
        """The same splitting with w (and the circumference) negated when orientation < 0."""
        if orientation > 0:
            return self
        return FixSplitting(self.lat1, self.lat2, CylinderClass(self.cyl.lattice, -self.cyl.circumference), -self.w)

    def scaled(self, factor) -> 'FixSplitting':
        def scale(lattice):
            return PlanarLattice(factor * lattice.b1, factor * lattice.b2)
        return FixSplitting(
            scale(self.lat1),
            scale(self.lat2),
            CylinderClass(scale(self.cyl.lattice), factor * self.cyl.circumference),
            factor * self.w,
        )


def mode_of(*values) -> ScalarMode:
    """Arithmetic mode implied by a collection of scalars."""
    for value in values:
        if isinstance(value, Scalar):
            return ScalarMode.exact(value.field)
        if isinstance(value, float):
            return ScalarMode.float_mode()
    return ScalarMode.exact(RATIONALS)


def _scalars(s: FixSplitting):
    vectors = [s.lat1.b1, s.lat1.b2, s.lat2.b1, s.lat2.b2, s.cyl.lattice.b1, s.cyl.lattice.b2,
               s.cyl.circumference, s.w]
    for v in vectors:
        yield v.x
        yield v.y


def _field_problem(s: FixSplitting) -> Optional[str]:
    fields = set()
    floats = False
    for value in _scalars(s):
        if isinstance(value, Scalar):
            if not value.is_rational():
                fields.add(value.field)
        elif isinstance(value, float):
            floats = True
    if len(fields) > 1:
        return f"scalars from {len(fields)} different fields"
    if floats and fields:
        return "exact field elements mixed with floats"
    return None


def validate(s: FixSplitting) -> ValidationReport:
    """
    Check every invariant of a fix-splitting and report each violation. Never raises for bad data.
    """
    report = ValidationReport()

    problem = _field_problem(s)
    report.record('FieldMismatch', problem is None, message=problem or '')
    if problem:
        return report

    w = s.w
    w_zero = w.is_zero()
    report.record('ZeroSplittingVector', not w_zero, message='splitting vector is zero' if w_zero else '')

    same = s.cyl.circumference == w
    report.record('CircumferenceMismatch', same,
                  message='' if same else f'circumference {s.cyl.circumference} differs from w = {w}')

    if not w_zero:
        member = s.cyl.lattice.contains(w)
        report.record('CircumferenceNotInLattice', member,
                      message='' if member else f'w = {w} is not in the cylinder lattice {s.cyl.lattice}')
        if member:
            primitive = is_primitive(s.cyl.lattice, w)
            report.record('CircumferenceNotPrimitive', primitive,
                          message='' if primitive else f'w = {w} is not primitive in {s.cyl.lattice}')

        w_norm = w.norm2()
        for tag, lattice in (('T1', s.lat1), ('T2', s.lat2)):
            closing = primitive_vector_along(lattice, w)
            closes = closing is not None and sign(closing.norm2() - w_norm) <= 0
            report.record(f'PeriodicClosure.{tag}', not closes, code='PeriodicClosure',
                          message=f'{tag} closes up along {closing}, not longer than w' if closes else '')

    total = s.lat1.covolume + s.lat2.covolume + 2 * s.cyl.area
    positive = sign(total) > 0
    report.record('NonPositiveArea', positive, message='' if positive else f'total area {total} is not positive')

    if not report.valid:
        logger.debug(f'invalid splitting: {report.codes}')
    return report


def _require_valid(s: FixSplitting):
    try:
        report = s.report
    except SplittingError as e:
        raise InvalidSplitting(f"splitting could not be checked: {e}")
    if not report.valid:
        raise InvalidSplitting(f"invalid splitting: {', '.join(report.codes)}", report=report)


def is_irrational(s: FixSplitting) -> bool:
    """
    True when w is parallel to no lattice vector of either torus.

    Raises:
        InvalidSplitting: s fails validation
    """
    _require_valid(s)
    return not direction_is_rational(s.lat1, s.w) and not direction_is_rational(s.lat2, s.w)


def areas(s: FixSplitting) -> Areas:
    """
    Raises:
        InvalidSplitting: s fails validation
    """
    _require_valid(s)
    a1 = s.lat1.covolume
    a2 = s.lat2.covolume
    ac = s.cyl.area
    return Areas(a1, a2, ac, a1 + a2 + 2 * ac)
