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
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Any, Optional, Sequence, Tuple

import sympy

try:
    from fixsplit.constants import (
        FLOAT_RATIONAL_MAX_DENOMINATOR,
        FLOAT_SIGN_TOLERANCE,
        INITIAL_REFINEMENT,
        MAX_FIELD_DEGREE,
        REFINEMENT_STEP,
    )
    from .exceptions import DivByZero, FieldMismatch, InvalidField
except ImportError:
    from constants import (
        FLOAT_RATIONAL_MAX_DENOMINATOR,
        FLOAT_SIGN_TOLERANCE,
        INITIAL_REFINEMENT,
        MAX_FIELD_DEGREE,
        REFINEMENT_STEP,
    )
    from exceptions import DivByZero, FieldMismatch, InvalidField
# -

logger = logging.getLogger(__name__)

_X = sympy.Symbol('x')
_ZERO = Fraction(0)
_ONE = Fraction(1)


def to_fraction(value: Any) -> Fraction:
    """
    Read an exact rational.

    Accepts ints, Fractions, "p/q" strings and decimal strings. Floats are read through their
    shortest decimal representation, so 0.1 becomes 1/10.

    Raises:
        TypeError: value has no exact rational reading
        ValueError: the string cannot be parsed
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r} has no rational reading")
        return Fraction(repr(value))
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    raise TypeError(f"cannot read {value!r} as an exact rational")


def _poly_eval(coeffs: Sequence, x):
    result = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        result = result * x + c
    return result


def _poly_eval_interval(coeffs: Sequence[Fraction], lo: Fraction, hi: Fraction) -> Tuple[Fraction, Fraction]:
    # Horner on intervals; the result encloses sum c_i x^i for every x in [lo, hi]
    rlo = rhi = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        products = (rlo * lo, rlo * hi, rhi * lo, rhi * hi)
        rlo = min(products) + c
        rhi = max(products) + c
    return rlo, rhi


def _reduce_mod(coeffs: list, min_poly: Tuple[int, ...]) -> list:
    d = len(min_poly) - 1
    coeffs = list(coeffs)
    for i in range(len(coeffs) - 1, d - 1, -1):
        c = coeffs[i]
        if c:
            # x^d = -(p_0 + p_1 x + ... + p_{d-1} x^{d-1})
            for j in range(d):
                if min_poly[j]:
                    coeffs[i - d + j] -= c * min_poly[j]
        coeffs[i] = _ZERO
    return coeffs[:d]


def _to_sympy_rational(value: Fraction) -> sympy.Rational:
    return sympy.Rational(value.numerator, value.denominator)


@dataclass(frozen=True)
class NumberField:
    """
    Real embedded number field Q(theta).

    Attributes:
        min_poly (tuple): integer coefficients c0..cd of the monic minimal polynomial of theta
        root_interval (tuple): rational interval (lo, hi) isolating the real root theta
    """
    min_poly: Tuple[int, ...]
    root_interval: Tuple[Fraction, Fraction]
    _lower_positive: bool = field(default=False, init=False, repr=False, compare=False)
    _refinements: list = field(default_factory=list, init=False, repr=False, compare=False)
    _lock: Any = field(default_factory=threading.Lock, init=False, repr=False, compare=False)
    _sympy_poly: Any = field(default=None, init=False, repr=False, compare=False)
    # (discriminant, root sign) with theta = (-p1 + sign*sqrt(discriminant)) / 2, quadratic fields only
    _quadratic: Any = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        try:
            poly = tuple(to_fraction(c) for c in self.min_poly)
            lo, hi = (to_fraction(v) for v in self.root_interval)
        except (TypeError, ValueError) as e:
            raise InvalidField(f"unreadable field description: {e}")

        if any(c.denominator != 1 for c in poly):
            raise InvalidField(f"min_poly must have integer coefficients, got {self.min_poly}")
        poly = tuple(int(c) for c in poly)
        degree = len(poly) - 1
        if degree < 1 or degree > MAX_FIELD_DEGREE:
            raise InvalidField(f"field degree must be between 1 and {MAX_FIELD_DEGREE}, got {degree}")
        if poly[-1] != 1:
            raise InvalidField(f"min_poly must be monic, leading coefficient is {poly[-1]}")
        if not lo < hi:
            raise InvalidField(f"root interval ({lo}, {hi}) is empty")

        sym = sympy.Poly(list(reversed(poly)), _X, domain='ZZ')
        if degree > 1 and not sym.is_irreducible:
            raise InvalidField(f"min_poly {poly} is reducible over the rationals")

        value_lo = _poly_eval(poly, lo)
        value_hi = _poly_eval(poly, hi)
        if value_lo == 0 or value_hi == 0:
            raise InvalidField("root interval endpoints must not be roots")
        if (value_lo > 0) == (value_hi > 0):
            raise InvalidField("min_poly does not change sign on the root interval")
        roots = sym.count_roots(_to_sympy_rational(lo), _to_sympy_rational(hi))
        if roots != 1:
            raise InvalidField(f"root interval must isolate exactly one root, it holds {roots}")

        object.__setattr__(self, 'min_poly', poly)
        object.__setattr__(self, 'root_interval', (lo, hi))
        object.__setattr__(self, '_lower_positive', value_lo > 0)
        object.__setattr__(self, '_sympy_poly', sympy.Poly(list(reversed(poly)), _X, domain='QQ'))
        if degree == 2:
            # a monic quadratic falls through zero at its smaller root and rises at the larger
            object.__setattr__(self, '_quadratic', (poly[1] * poly[1] - 4 * poly[0], -1 if value_lo > 0 else 1))
        self._refinements.append((lo, hi))
        logger.debug(f'number field {poly} with root in ({lo}, {hi})')

    @property
    def degree(self) -> int:
        return len(self.min_poly) - 1

    @property
    def gen(self) -> 'Scalar':
        """theta as a field element"""
        if self.degree == 1:
            return self(-self.min_poly[0])
        return self.element([0, 1])

    @property
    def zero(self) -> 'Scalar':
        return Scalar._raw(self, (_ZERO,) * self.degree)

    @property
    def one(self) -> 'Scalar':
        return self(1)

    def __call__(self, value) -> 'Scalar':
        """Embed a rational value."""
        if isinstance(value, Scalar):
            if value.field != self:
                raise FieldMismatch(f"{value!r} belongs to another field")
            return value
        coeffs = (to_fraction(value),) + (_ZERO,) * (self.degree - 1)
        return Scalar._raw(self, coeffs)

    def element(self, coeffs: Sequence) -> 'Scalar':
        """Element sum coeffs[i] * theta^i, reduced to canonical form."""
        return Scalar(self, coeffs)

    def isolating_interval(self, level: int) -> Tuple[Fraction, Fraction]:
        """Root interval after `level` bisections."""
        with self._lock:
            while len(self._refinements) <= level:
                lo, hi = self._refinements[-1]
                if lo == hi:
                    self._refinements.append((lo, hi))
                    continue
                mid = (lo + hi) / 2
                value = _poly_eval(self.min_poly, mid)
                if value == 0:
                    self._refinements.append((mid, mid))
                elif (value > 0) == self._lower_positive:
                    self._refinements.append((mid, hi))
                else:
                    self._refinements.append((lo, mid))
            return self._refinements[level]

    def to_json(self) -> dict:
        return {
            'min_poly': list(self.min_poly),
            'root_interval': [str(self.root_interval[0]), str(self.root_interval[1])],
        }

    def __str__(self) -> str:
        terms = ' + '.join(f'{c}*x^{i}' for i, c in enumerate(self.min_poly) if c)
        return f'Q[x]/({terms})'


RATIONALS = NumberField((0, 1), (-1, 1))


def sqrt_field(n: int) -> NumberField:
    """Q(sqrt(n)) for a positive non-square integer n."""
    root = math.isqrt(n)
    if root * root == n:
        raise InvalidField(f"{n} is a perfect square")
    return NumberField((-n, 0, 1), (root, root + 1))


class Scalar:
    """
    Exact element of a NumberField, stored as the canonical coefficient vector of its
    reduction modulo the minimal polynomial.
    """

    __slots__ = ('field', 'coeffs')

    def __init__(self, field: NumberField, coeffs: Sequence):
        values = [to_fraction(c) for c in coeffs] or [_ZERO]
        d = field.degree
        if len(values) > d:
            values = _reduce_mod(values, field.min_poly)
        values = values + [_ZERO] * (d - len(values))
        self.field = field
        self.coeffs = tuple(values)

    @classmethod
    def _raw(cls, field: NumberField, coeffs: Tuple[Fraction, ...]) -> 'Scalar':
        obj = cls.__new__(cls)
        obj.field = field
        obj.coeffs = coeffs
        return obj

    # ---- coercion ----

    def _coerce(self, other):
        if isinstance(other, Scalar):
            if other.field is not self.field and other.field != self.field:
                raise FieldMismatch(f"cannot combine elements of {self.field} and {other.field}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field(other)
        if isinstance(other, float):
            raise FieldMismatch("cannot mix exact scalars with floats")
        return NotImplemented

    # ---- predicates ----

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is irrational")
        return self.coeffs[0]

    # ---- arithmetic ----

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Scalar._raw(self.field, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Scalar._raw(self.field, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        return Scalar._raw(self.field, tuple(-a for a in self.coeffs))

    def __pos__(self):
        return self

    def _scale(self, factor: Fraction) -> 'Scalar':
        return Scalar._raw(self.field, tuple(a * factor for a in self.coeffs))

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_rational():
            return self._scale(other.coeffs[0])
        if self.is_rational():
            return other._scale(self.coeffs[0])
        d = self.field.degree
        product = [_ZERO] * (2 * d - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        product[i + j] += a * b
        return Scalar._raw(self.field, tuple(_reduce_mod(product, self.field.min_poly)))

    __rmul__ = __mul__

    def inverse(self) -> 'Scalar':
        if self.is_zero():
            raise DivByZero(f"{self} has no inverse")
        if self.is_rational():
            return self.field(1 / self.coeffs[0])
        if self.field.degree == 2:
            # conjugate over the norm: theta' = -p1 - theta
            p0, p1 = self.field.min_poly[0], self.field.min_poly[1]
            c0, c1 = self.coeffs
            norm = c0 * c0 - c0 * c1 * p1 + c1 * c1 * p0
            return Scalar._raw(self.field, ((c0 - c1 * p1) / norm, -c1 / norm))
        numerator = sympy.Poly([_to_sympy_rational(c) for c in reversed(self.coeffs)], _X, domain='QQ')
        inv = sympy.invert(numerator, self.field._sympy_poly)
        coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(inv.all_coeffs())]
        return Scalar(self.field, coeffs)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            raise DivByZero(f"{self} / 0")
        if other.is_rational():
            return self._scale(1 / other.coeffs[0])
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = self.field.one
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # ---- real embedding ----

    def _surd(self) -> Tuple[Fraction, Fraction, int]:
        """(X, Y, D) with value = (X + Y*sqrt(D)) / 2, quadratic fields only."""
        disc, root_sign = self.field._quadratic
        a, b = self.coeffs
        return 2 * a - b * self.field.min_poly[1], root_sign * b, disc

    def _surd_enclosure(self, predicate) -> Tuple[Fraction, Fraction]:
        x, y, disc = self._surd()
        # start near the size of y so one integer square root usually suffices
        bits = 64 + max(0, y.numerator.bit_length() - y.denominator.bit_length())
        while True:
            r = math.isqrt(disc << (2 * bits))
            low = (x + y * Fraction(r, 1 << bits)) / 2
            high = (x + y * Fraction(r + 1, 1 << bits)) / 2
            lo, hi = (low, high) if y > 0 else (high, low)
            if predicate is None or predicate(lo, hi):
                return lo, hi
            bits *= 2

    def enclosure(self, predicate=None) -> Tuple[Fraction, Fraction]:
        """
        Rational interval containing the real value, refined until `predicate(lo, hi)` holds.
        Without a predicate the first (coarse) enclosure is returned.
        """
        if self.field._quadratic is not None and not self.is_rational():
            return self._surd_enclosure(predicate)
        level = INITIAL_REFINEMENT
        while True:
            lo, hi = _poly_eval_interval(self.coeffs, *self.field.isolating_interval(level))
            if predicate is None or predicate(lo, hi):
                return lo, hi
            level += REFINEMENT_STEP

    def sign(self) -> int:
        if self.is_rational():
            c = self.coeffs[0]
            return (c > 0) - (c < 0)
        if self.field._quadratic is not None:
            x, y, disc = self._surd()
            sx = (x > 0) - (x < 0)
            sy = (y > 0) - (y < 0)
            if sx == sy or sy == 0:
                return sx
            if sx == 0:
                return sy
            # opposite signs: the larger square wins, equality needs a square discriminant
            return sx if x * x > y * y * disc else sy
        lo, hi = self.enclosure(lambda lo, hi: lo > 0 or hi < 0)
        return 1 if lo > 0 else -1

    def floor(self) -> int:
        if self.is_rational():
            return math.floor(self.coeffs[0])
        lo, _ = self.enclosure(lambda lo, hi: math.floor(lo) == math.floor(hi))
        return math.floor(lo)

    def approx(self) -> float:
        """Nearest double, accurate to the last bits even under heavy cancellation."""
        if self.is_rational():
            return float(self.coeffs[0])

        def tight(lo, hi):
            if lo <= 0 <= hi:
                return False
            return (hi - lo) <= max(abs(lo), abs(hi)) * Fraction(1, 2 ** 56)

        lo, hi = self.enclosure(tight)
        return float((lo + hi) / 2)

    __float__ = approx

    def rational_below(self) -> Fraction:
        """A rational not exceeding the value."""
        if self.is_rational():
            return self.coeffs[0]

        def tight(lo, hi):
            return (hi - lo) <= max(abs(lo), abs(hi)) * Fraction(1, 2 ** 40)

        lo, _ = self.enclosure(tight)
        return lo

    # ---- comparison ----

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except FieldMismatch:
            return False
        if other is NotImplemented:
            return other
        return self.coeffs == other.coeffs

    def __hash__(self):
        if self.is_rational():
            return hash(self.coeffs[0])
        return hash((self.field.min_poly, self.coeffs))

    def _compare(self, other) -> Optional[int]:
        other = self._coerce(other)
        if other is NotImplemented:
            return None
        return (self - other).sign()

    def __lt__(self, other):
        result = self._compare(other)
        return NotImplemented if result is None else result < 0

    def __le__(self, other):
        result = self._compare(other)
        return NotImplemented if result is None else result <= 0

    def __gt__(self, other):
        result = self._compare(other)
        return NotImplemented if result is None else result > 0

    def __ge__(self, other):
        result = self._compare(other)
        return NotImplemented if result is None else result >= 0

    def __bool__(self):
        return not self.is_zero()

    # ---- representation ----

    def to_json(self):
        if self.is_rational():
            return str(self.coeffs[0])
        return {'theta_coeffs': [str(c) for c in self.coeffs]}

    def __str__(self):
        if self.is_rational():
            return str(self.coeffs[0])
        parts = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            if i == 0:
                parts.append(str(c))
            elif i == 1:
                parts.append(f'{c}*t')
            else:
                parts.append(f'{c}*t^{i}')
        return ' + '.join(parts)

    def __repr__(self):
        return f'Scalar({self})'


# ---- mode-generic helpers ----
#
# Geometry code is written against these helpers so that a pipeline can run on exact
# Scalars (and plain rationals) or on machine floats.

def sign(x) -> int:
    if isinstance(x, Scalar):
        return x.sign()
    if isinstance(x, float):
        if abs(x) <= FLOAT_SIGN_TOLERANCE:
            return 0
        return 1 if x > 0 else -1
    if isinstance(x, (int, Fraction)):
        return (x > 0) - (x < 0)
    raise TypeError(f"no sign for {type(x).__name__}")


def is_zero(x) -> bool:
    return sign(x) == 0


def is_rational(x) -> bool:
    """Exact for Scalars and rationals; floats are tested against small-denominator fractions."""
    if isinstance(x, Scalar):
        return x.is_rational()
    if isinstance(x, (int, Fraction)):
        return True
    if isinstance(x, float):
        if not math.isfinite(x):
            return False
        candidate = Fraction(x).limit_denominator(FLOAT_RATIONAL_MAX_DENOMINATOR)
        return abs(float(candidate) - x) <= FLOAT_SIGN_TOLERANCE * max(1.0, abs(x))
    raise TypeError(f"no rationality test for {type(x).__name__}")


def is_integer(x) -> bool:
    if isinstance(x, Scalar):
        return x.is_rational() and x.coeffs[0].denominator == 1
    if isinstance(x, int):
        return True
    if isinstance(x, Fraction):
        return x.denominator == 1
    if isinstance(x, float):
        return abs(x - round(x)) <= FLOAT_SIGN_TOLERANCE
    raise TypeError(f"no integrality test for {type(x).__name__}")


def rational_value(x) -> Fraction:
    """The rational value of a rational scalar; floats snap to a small denominator."""
    if isinstance(x, Scalar):
        return x.rational_value()
    if isinstance(x, float):
        return Fraction(x).limit_denominator(FLOAT_RATIONAL_MAX_DENOMINATOR)
    return to_fraction(x)


def to_integer(x) -> int:
    if not is_integer(x):
        raise ValueError(f"{x} is not an integer")
    if isinstance(x, Scalar):
        return int(x.coeffs[0])
    if isinstance(x, float):
        return int(round(x))
    return int(x)


def floor(x) -> int:
    if isinstance(x, Scalar):
        return x.floor()
    if isinstance(x, float):
        nearest = round(x)
        if abs(x - nearest) <= FLOAT_SIGN_TOLERANCE:
            return int(nearest)
        return math.floor(x)
    return math.floor(x)


def round_nearest(x) -> int:
    """Nearest integer, halves rounded up."""
    return floor(x + Fraction(1, 2)) if not isinstance(x, float) else floor(x + 0.5)


def rational_below(x) -> Fraction:
    if isinstance(x, Scalar):
        return x.rational_below()
    if isinstance(x, float):
        return Fraction(x)
    return to_fraction(x)


def exact_abs(x):
    return -x if sign(x) < 0 else x


def minimum(*values):
    """Minimum under exact comparison."""
    best = values[0]
    for v in values[1:]:
        if sign(v - best) < 0:
            best = v
    return best


def maximum(*values):
    best = values[0]
    for v in values[1:]:
        if sign(v - best) > 0:
            best = v
    return best


@dataclass(frozen=True)
class ScalarMode:
    """
    Arithmetic mode of a pipeline: exact elements of one field, or machine floats.

    The field is kept in float mode too, so that coefficient vectors in input files can still
    be evaluated.
    """
    kind: str = 'exact'
    field: Optional[NumberField] = RATIONALS

    def __post_init__(self):
        if self.kind not in ('exact', 'float'):
            raise ValueError(f"unknown scalar mode {self.kind!r}")
        if self.kind == 'exact' and self.field is None:
            raise ValueError("exact mode needs a number field")

    @classmethod
    def exact(cls, field: NumberField = RATIONALS) -> 'ScalarMode':
        return cls('exact', field)

    @classmethod
    def float_mode(cls, field: Optional[NumberField] = None) -> 'ScalarMode':
        return cls('float', field)

    @property
    def tag(self) -> str:
        return self.kind

    @property
    def is_exact(self) -> bool:
        return self.kind == 'exact'

    def coerce(self, value):
        """
        Read a value into this mode.

        Accepts Scalars, ints, Fractions, rational strings, coefficient lists and
        `{"theta_coeffs": [...]}` mappings.
        """
        if isinstance(value, dict):
            if 'theta_coeffs' not in value:
                raise ValueError(f"scalar mapping without theta_coeffs: {value}")
            value = list(value['theta_coeffs'])
        if isinstance(value, (list, tuple)):
            if self.field is None:
                raise FieldMismatch("coefficient vectors need a number field")
            value = self.field.element(value)
        if self.is_exact:
            return self.field(value)
        if isinstance(value, Scalar):
            return value.approx()
        if isinstance(value, str):
            return float(to_fraction(value))
        return float(value)

    def to_json(self):
        if self.is_exact:
            return self.field.to_json()
        return 'float'
