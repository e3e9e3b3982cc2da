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
from dataclasses import dataclass, field
from typing import Any, List, Optional, Tuple

try:
    from sympy.core.intfunc import igcdex
except ImportError:
    # sympy < 1.13
    from sympy.core.numbers import igcdex

try:
    from fixsplit.constants import MAX_DESCENT_STEPS
    from .exceptions import DegenerateLattice, NotInLattice, ObtuseOrZero, RationalDirection, ZeroDirection, ZeroVector
    from .numeric import exact_abs, floor, is_integer, is_rational, rational_value, round_nearest, sign, to_integer
except ImportError:
    from constants import MAX_DESCENT_STEPS
    from exceptions import DegenerateLattice, NotInLattice, ObtuseOrZero, RationalDirection, ZeroDirection, ZeroVector
    from numeric import exact_abs, floor, is_integer, is_rational, rational_value, round_nearest, sign, to_integer
# -

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PlanarVector:
    """Holonomy vector (x, y) over exact scalars or floats."""
    x: Any
    y: Any

    def __add__(self, other: 'PlanarVector') -> 'PlanarVector':
        return PlanarVector(self.x + other.x, self.y + other.y)

    def __sub__(self, other: 'PlanarVector') -> 'PlanarVector':
        return PlanarVector(self.x - other.x, self.y - other.y)

    def __neg__(self) -> 'PlanarVector':
        return PlanarVector(-self.x, -self.y)

    def __mul__(self, factor) -> 'PlanarVector':
        if isinstance(factor, PlanarVector):
            return NotImplemented
        return PlanarVector(factor * self.x, factor * self.y)

    __rmul__ = __mul__

    def dot(self, other: 'PlanarVector'):
        return self.x * other.x + self.y * other.y

    def norm2(self):
        return self.x * self.x + self.y * self.y

    def is_zero(self) -> bool:
        return sign(self.x) == 0 and sign(self.y) == 0

    def as_floats(self) -> Tuple[float, float]:
        return float(self.x), float(self.y)

    def length(self) -> float:
        """Euclidean length; math.inf once a coordinate leaves the float range."""
        try:
            return math.hypot(*self.as_floats())
        except OverflowError:
            return math.inf

    def __str__(self):
        return f'({self.x}, {self.y})'


def cross(v: PlanarVector, w: PlanarVector):
    """Signed area v.x*w.y - v.y*w.x."""
    return v.x * w.y - v.y * w.x


def dot(v: PlanarVector, w: PlanarVector):
    return v.x * w.x + v.y * w.y


def angle_measure(v: PlanarVector, w: PlanarVector):
    """
    Tangent of the angle between v and w, |cross| / dot, for vectors in an acute sector.

    Raises:
        ObtuseOrZero: dot(v, w) <= 0, which includes zero vectors
    """
    d = dot(v, w)
    if sign(d) <= 0:
        raise ObtuseOrZero(f"angle measure needs dot(v, w) > 0, got {d} for v={v}, w={w}")
    return exact_abs(cross(v, w)) / d


def line_angle_measure(v: PlanarVector, w: PlanarVector):
    """Unoriented angle between the lines through v and w, |cross| / |dot|."""
    d = dot(v, w)
    if sign(d) == 0:
        raise ObtuseOrZero(f"lines through {v} and {w} are perpendicular or degenerate")
    return exact_abs(cross(v, w)) / exact_abs(d)


def perp_component(v: PlanarVector, direction: PlanarVector) -> float:
    """
    Length of the component of v perpendicular to `direction`, as a float.

    Raises:
        ZeroDirection: direction is the zero vector
    """
    if direction.is_zero():
        raise ZeroDirection("perpendicular component against a zero direction")
    # exact quotient first, coordinates of deep holonomies do not fit a float
    return math.sqrt(float(cross(v, direction) ** 2 / direction.norm2()))


def unit_direction(v: PlanarVector) -> Tuple[float, float]:
    if v.is_zero():
        raise ZeroDirection("cannot normalise the zero vector")
    if sign(exact_abs(v.x) - exact_abs(v.y)) >= 0:
        r = float(v.y / v.x)
        x = sign(v.x) / math.sqrt(1 + r * r)
        return x, r * x
    r = float(v.x / v.y)
    y = sign(v.y) / math.sqrt(1 + r * r)
    return r * y, y


@dataclass(frozen=True)
class Shear:
    """Unipotent map (x, y) -> (x + s*y, y)."""
    s: Any


def apply_shear(sh: Shear, v: PlanarVector) -> PlanarVector:
    return PlanarVector(v.x + sh.s * v.y, v.y)


def _in_upper_half_plane(v: PlanarVector) -> bool:
    sx = sign(v.x)
    return sx > 0 or (sx == 0 and sign(v.y) > 0)


def reduce_basis(b1: PlanarVector, b2: PlanarVector) -> Tuple[PlanarVector, PlanarVector]:
    """
    Lagrange-Gauss reduction of a planar basis.

    The result satisfies |b1| <= |b2|, |dot(b1, b2)| <= |b1|^2 / 2, b1 points into the half plane
    x > 0 (or x = 0, y > 0) and cross(b1, b2) > 0.

    Raises:
        DegenerateLattice: the vectors are linearly dependent
    """
    if sign(cross(b1, b2)) == 0:
        raise DegenerateLattice(f"basis {b1}, {b2} is linearly dependent")

    if sign(b1.norm2() - b2.norm2()) > 0:
        b1, b2 = b2, b1
    while True:
        m = round_nearest(dot(b1, b2) / b1.norm2())
        if m:
            b2 = b2 - m * b1
        if sign(b2.norm2() - b1.norm2()) < 0:
            b1, b2 = b2, b1
            continue
        break

    if not _in_upper_half_plane(b1):
        b1 = -b1
    if sign(b1.norm2() - b2.norm2()) == 0:
        if not _in_upper_half_plane(b2):
            b2 = -b2
        if sign(cross(b1, b2)) < 0:
            b1, b2 = b2, b1
    if sign(cross(b1, b2)) < 0:
        b2 = -b2
    return b1, b2


@dataclass(frozen=True, eq=False)
class PlanarLattice:
    """
    Rank-2 lattice; the stored basis is always the reduced normal form of the given one.

    Two lattices compare equal when they generate the same set of vectors.
    """
    b1: PlanarVector
    b2: PlanarVector
    _inv_covolume: Any = field(default=None, init=False, repr=False)

    def __post_init__(self):
        b1, b2 = reduce_basis(self.b1, self.b2)
        object.__setattr__(self, 'b1', b1)
        object.__setattr__(self, 'b2', b2)
        object.__setattr__(self, '_inv_covolume', 1 / cross(b1, b2))

    @property
    def covolume(self):
        return cross(self.b1, self.b2)

    def coordinates(self, v: PlanarVector) -> Tuple[Any, Any]:
        return coordinates_in(self, v)

    def contains(self, v: PlanarVector) -> bool:
        a, b = coordinates_in(self, v)
        return is_integer(a) and is_integer(b)

    def __contains__(self, v: PlanarVector) -> bool:
        return self.contains(v)

    def __eq__(self, other):
        if not isinstance(other, PlanarLattice):
            return NotImplemented
        if sign(self.covolume - other.covolume) != 0:
            return False
        return self.contains(other.b1) and self.contains(other.b2)

    def __hash__(self):
        return hash(self.covolume)

    def __str__(self):
        return f'<{self.b1}, {self.b2}>'


def reduce(lattice: PlanarLattice) -> PlanarLattice:
    """Normal form of the lattice (already stored by PlanarLattice)."""
    return PlanarLattice(lattice.b1, lattice.b2)


def coordinates_in(lattice: PlanarLattice, v: PlanarVector) -> Tuple[Any, Any]:
    """Solve v = a*b1 + b*b2 by Cramer's rule."""
    inv = lattice._inv_covolume
    return cross(v, lattice.b2) * inv, cross(lattice.b1, v) * inv


def lattice_vector(lattice: PlanarLattice, m: int, n: int) -> PlanarVector:
    return m * lattice.b1 + n * lattice.b2


def integer_coordinates(lattice: PlanarLattice, v: PlanarVector) -> Tuple[int, int]:
    """
    Raises:
        NotInLattice: v is not a lattice vector
    """
    a, b = coordinates_in(lattice, v)
    if not (is_integer(a) and is_integer(b)):
        raise NotInLattice(f"{v} is not in {lattice}")
    return to_integer(a), to_integer(b)


def is_primitive(lattice: PlanarLattice, v: PlanarVector) -> bool:
    """
    True when v = m*b1 + n*b2 with gcd(m, n) = 1.

    Raises:
        NotInLattice: v is not a lattice vector
    """
    m, n = integer_coordinates(lattice, v)
    return math.gcd(m, n) == 1


def complete_basis(lattice: PlanarLattice, v: PlanarVector, orientation: int = 1) -> PlanarVector:
    """
    Lattice vector u with orientation * cross(v, u) = covolume, so (v, u) is a basis.

    Raises:
        NotInLattice: v is not a primitive lattice vector
    """
    m, n = integer_coordinates(lattice, v)
    if math.gcd(m, n) != 1:
        raise NotInLattice(f"{v} is not primitive in {lattice}")
    x, y, _ = igcdex(abs(m), abs(n))
    x = int(x) if m >= 0 else -int(x)
    y = int(y) if n >= 0 else -int(y)
    # m*x + n*y = 1, so u = -y*b1 + x*b2 has cross(v, u) = covolume
    u = lattice_vector(lattice, -y, x)
    return u if orientation > 0 else -u


def primitive_vector_along(lattice: PlanarLattice, w: PlanarVector) -> Optional[PlanarVector]:
    """Shortest lattice vector parallel to w with dot > 0, or None for an irrational direction."""
    if w.is_zero():
        raise ZeroVector("direction of the zero vector")
    p = cross(lattice.b1, w)
    q = cross(lattice.b2, w)
    if sign(p) == 0:
        candidate = lattice.b1
    elif sign(q) == 0:
        candidate = lattice.b2
    else:
        ratio = p / q
        if not is_rational(ratio):
            return None
        ratio = rational_value(ratio)
        # a*p + b*q = 0 with p/q = P/Q gives (a, b) = (Q, -P)
        candidate = lattice_vector(lattice, ratio.denominator, -ratio.numerator)
    return candidate if sign(dot(candidate, w)) > 0 else -candidate


def direction_is_rational(lattice: PlanarLattice, w: PlanarVector) -> bool:
    """
    True when some nonzero lattice vector is parallel to w.

    Raises:
        ZeroVector: w is the zero vector
    """
    if w.is_zero():
        raise ZeroVector("rationality of the zero direction")
    p = cross(lattice.b1, w)
    q = cross(lattice.b2, w)
    if sign(p) == 0 or sign(q) == 0:
        return True
    return is_rational(p / q)


def commensurable(l1: PlanarLattice, l2: PlanarLattice) -> bool:
    """True when l2's basis has rational coordinates in l1, i.e. the lattices share a finite-index sublattice."""
    for v in (l2.b1, l2.b2):
        if not all(is_rational(c) for c in coordinates_in(l1, v)):
            return False
    return True


def best_approximations(lattice: PlanarLattice, w: PlanarVector, count: int,
                        below=None) -> List[PlanarVector]:
    """
    Directional convergents of w in the lattice, sorted by strictly decreasing |cross(v, w)|.

    The descent starts from the reduced basis, signed so that w lies in the open cone (e, f),
    and repeatedly replaces the vector with the larger cross product by e + t*f,
    t = floor(|cross(e, w)| / |cross(f, w)|). Intermediate vectors e + j*f with j < t are
    dominated by f and never reported; neither is either basis vector.

    Args:
        lattice (PlanarLattice): lattice to search
        w (PlanarVector): irrational direction
        count (int): number of vectors to return
        below: when given, skip convergents with |cross(v, w)| >= below and return the
            first `count` inside that strip

    Returns:
        list: primitive lattice vectors v with dot(v, w) > 0

    Raises:
        RationalDirection: w is parallel to a lattice vector
    """
    if w.is_zero():
        raise ZeroVector("best approximations of the zero direction")
    if count <= 0:
        return []
    if direction_is_rational(lattice, w):
        raise RationalDirection(f"{w} is a rational direction of {lattice}")

    a, b = coordinates_in(lattice, w)
    e = lattice.b1 if sign(a) > 0 else -lattice.b1
    f = lattice.b2 if sign(b) > 0 else -lattice.b2
    ce = exact_abs(cross(e, w))
    cf = exact_abs(cross(f, w))

    # (cross, norm2, vector), cross strictly decreasing along the list
    found = []
    # found entries inside the strip form a suffix of the list
    inside = 0
    steps = 0
    while True:
        if steps > MAX_DESCENT_STEPS:
            raise RationalDirection(f"descent toward {w} did not separate from a lattice direction")
        steps += 1

        if sign(ce - cf) > 0:
            t = floor(ce / cf)
            e = e + t * f
            # cross(e, w) and cross(f, w) have opposite signs
            ce = ce - t * cf
            new, new_cross = e, ce
        else:
            t = floor(cf / ce)
            f = f + t * e
            cf = cf - t * ce
            new, new_cross = f, cf
        if sign(new_cross) == 0:
            raise RationalDirection(f"{new} is parallel to {w}")

        new_norm = new.norm2()
        while found and sign(new_norm - found[-1][1]) <= 0:
            logger.debug(f'{found[-1][2]} dominated by {new}')
            if below is None or sign(found[-1][0] - below) < 0:
                inside -= 1
            found.pop()
        found.append((new_cross, new_norm, new))
        if below is None or sign(new_cross - below) < 0:
            inside += 1

        # once dot(e, f) >= 0 every later vector is longer than e and f
        settled = sign(dot(e, f)) >= 0
        if settled and inside >= count:
            break

    if below is not None:
        found = found[len(found) - inside:]
    result = []
    for _, _, v in found[:count]:
        result.append(v if sign(dot(v, w)) > 0 else -v)
    logger.debug(f'{len(result)} best approximations toward {w} after {steps} steps')
    return result
