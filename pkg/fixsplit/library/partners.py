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

# # Partner search
#
# Direct enumeration of good partner triples. Torus partners come from the directional
# convergents of w (optionally widened by small primitive combinations of consecutive
# convergents); the cylinder partner is a basis completion of w in the cylinder lattice,
# shifted along w so that it is nearly parallel to the torus partners.

# +
import functools
import logging
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

try:
    from fixsplit.constants import GOOD_PARTNER_RATIO
    from .exceptions import BudgetExhausted, ConfigurationError, GuaranteeViolated, NotInLattice, RationalDirection
    from .numeric import exact_abs, floor, minimum, round_nearest, sign, to_fraction
    from .planar import PlanarLattice, PlanarVector, best_approximations, complete_basis, cross, dot, is_primitive
    from .splitting import FixSplitting, is_irrational
    from .twist import PartnerTriple, good_partners, make_partner_triple
except ImportError:
    from constants import GOOD_PARTNER_RATIO
    from exceptions import BudgetExhausted, ConfigurationError, GuaranteeViolated, NotInLattice, RationalDirection
    from numeric import exact_abs, floor, minimum, round_nearest, sign, to_fraction
    from planar import PlanarLattice, PlanarVector, best_approximations, complete_basis, cross, dot, is_primitive
    from splitting import FixSplitting, is_irrational
    from twist import PartnerTriple, good_partners, make_partner_triple
# -

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchBudget:
    """
    Limits of a partner search.

    Attributes:
        eps_prime (Fraction): strict bound on every cross product of the certificate
        max_convergents (int): directional convergents taken from each torus
        max_circumference_shift (int): largest |m| in vc = t + m*w
        eps_ratio (Fraction): bound on the ratio of partner crosses to their crosses with w;
            defaults to eps_prime
        combination_span (int): largest coefficient in p*e +- q*f combinations of consecutive
            convergents; 1 means convergents only
    """
    eps_prime: Fraction
    max_convergents: int
    max_circumference_shift: int
    eps_ratio: Optional[Fraction] = None
    combination_span: int = 1

    def __post_init__(self):
        object.__setattr__(self, 'eps_prime', to_fraction(self.eps_prime))
        if self.eps_ratio is not None:
            object.__setattr__(self, 'eps_ratio', to_fraction(self.eps_ratio))
        if self.eps_prime <= 0:
            raise ConfigurationError(f"eps_prime must be positive, got {self.eps_prime}")
        if self.eps_ratio is not None and self.eps_ratio <= 0:
            raise ConfigurationError(f"eps_ratio must be positive, got {self.eps_ratio}")
        if self.max_convergents < 0 or self.max_circumference_shift < 0:
            raise ConfigurationError("search limits must not be negative")
        if self.combination_span < 1:
            raise ConfigurationError(f"combination_span must be at least 1, got {self.combination_span}")

    @property
    def ratio(self) -> Fraction:
        return self.eps_prime if self.eps_ratio is None else self.eps_ratio

    def doubled(self) -> 'SearchBudget':
        return replace(
            self,
            max_convergents=max(1, 2 * self.max_convergents),
            max_circumference_shift=max(1, 2 * self.max_circumference_shift),
            # the combination count grows with the square of the span
            combination_span=self.combination_span + 1,
        )

    def with_eps(self, eps_prime, eps_ratio=None) -> 'SearchBudget':
        return replace(self, eps_prime=to_fraction(eps_prime),
                       eps_ratio=None if eps_ratio is None else to_fraction(eps_ratio))

    def to_json(self) -> dict:
        return {
            'eps_prime': str(self.eps_prime),
            'eps_ratio': str(self.ratio),
            'max_convergents': self.max_convergents,
            'max_circumference_shift': self.max_circumference_shift,
            'combination_span': self.combination_span,
        }


@dataclass(frozen=True)
class Candidate:
    level: int
    index: int
    vector: PlanarVector
    w_cross: Any
    offset: Any
    shifts: Tuple[int, int]


def transversal(s: FixSplitting) -> PlanarVector:
    """Basis partner t of w in the cylinder lattice with cross(t, w) = area(C), centred so |dot(t, w)| <= |w|^2 / 2."""
    w = s.w
    t = complete_basis(s.cyl.lattice, w, -1)
    return t - round_nearest(dot(t, w) / w.norm2()) * w


def choose_vc(s: FixSplitting, budget: SearchBudget, toward: Optional[PlanarVector] = None,
              t: Optional[PlanarVector] = None) -> PlanarVector:
    """
    Cylinder partner vc = t + m*w with |m| <= max_circumference_shift.

    Without `toward`, m minimises angle_measure(vc, w) among candidates with dot(vc, w) > 0, which
    is the largest allowed shift. With `toward`, m minimises |cross(toward, vc)|.
    `t` passes a transversal already computed for s.

    Raises:
        BudgetExhausted: no admissible shift
    """
    w = s.w
    if t is None:
        t = transversal(s)
    cap = budget.max_circumference_shift

    if toward is not None and sign(cross(toward, w)) != 0:
        m = round_nearest(-cross(toward, t) / cross(toward, w))
        return t + max(-cap, min(cap, m)) * w

    vc = t + cap * w
    if sign(dot(vc, w)) <= 0:
        raise BudgetExhausted(f"no cylinder partner with dot(vc, w) > 0 within shift {cap}")
    return vc


def _combinations(convergents: List[PlanarVector], span: int):
    """(level, vector) for p*e +- q*f over consecutive convergents e, f with coprime 1 <= p, q <= span."""
    coefficients = [(p, q) for p in range(1, span + 1) for q in range(1, span + 1) if math.gcd(p, q) == 1]
    for n in range(len(convergents) - 1):
        e, f = convergents[n], convergents[n + 1]
        for p, q in coefficients:
            yield n + 2, p * e + q * f
            yield n + 2, p * e - q * f


def _shift_range(offset, radius, cap: int) -> Optional[Tuple[int, int]]:
    # integers m with |offset + m| < radius, clipped to [-cap, cap]
    lo = max(-cap, floor(-offset - radius) + 1)
    hi = min(cap, -floor(offset - radius) - 1)
    return (lo, hi) if lo <= hi else None


def candidate_pool(lattice: PlanarLattice, s: FixSplitting, budget: SearchBudget,
                   t: PlanarVector) -> List[Candidate]:
    """
    Torus partner candidates with 0 < cross(v, w) < eps_prime, each with the shifts m for which
    vc = t + m*w keeps |cross(v, vc)| inside the budget.

    The convergents are the first max_convergents inside the strip |cross(v, w)| < eps_prime,
    so the budget does not shrink as the direction gets harder to approximate.
    """
    w = s.w
    area_c = s.cyl.area
    area = lattice.covolume
    eps = budget.eps_prime
    ratio = budget.ratio

    convergents = best_approximations(lattice, w, budget.max_convergents, below=eps)
    raw = [(n + 1, v) for n, v in enumerate(convergents)]
    if budget.combination_span > 1:
        raw.extend(_combinations(convergents, budget.combination_span))

    pool = []
    seen = set()
    for level, v in raw:
        c = cross(v, w)
        if sign(c) == 0:
            continue
        if sign(c) < 0:
            v, c = -v, -c
        if sign(c - eps) >= 0 or sign(c - area) > 0:
            continue
        key = (v.x, v.y)
        if key in seen:
            continue
        try:
            if not is_primitive(lattice, v):
                continue
        except NotInLattice:
            continue
        seen.add(key)

        offset = cross(v, t) / c
        radius = minimum(ratio * minimum(c, area_c), eps) / c
        shifts = _shift_range(offset, radius, budget.max_circumference_shift)
        if shifts is None:
            continue
        pool.append(Candidate(level, len(pool), v, c, offset, shifts))

    pool.sort(key=lambda cand: (cand.level, cand.index))
    logger.debug(f'{len(pool)} candidates from {len(raw)} vectors in {lattice}')
    return pool


def certificate_checks(s: FixSplitting, p: PartnerTriple, eps_prime, ratio) -> Dict[str, bool]:
    """Every inequality of the partner certificate, evaluated exactly."""
    w = s.w
    c1 = exact_abs(cross(p.v1, w))
    c2 = exact_abs(cross(p.v2, w))
    cc = exact_abs(cross(p.vc, w))
    x12 = exact_abs(cross(p.v1, p.v2))
    x1c = exact_abs(cross(p.v1, p.vc))
    x2c = exact_abs(cross(p.v2, p.vc))

    def below(value, bound):
        return sign(bound - value) > 0

    return {
        'P.v1_w': below(c1, eps_prime),
        'P.v2_w': below(c2, eps_prime),
        'P.v1_vc': below(x1c, eps_prime),
        'P.v2_vc': below(x2c, eps_prime),
        'P.v1_v2': below(x12, eps_prime),
        'Q': below(x12, ratio * minimum(c1, c2)),
        'R.v1': below(x1c, ratio * minimum(c1, cc)),
        'R.v2': below(x2c, ratio * minimum(c2, cc)),
        'embedding': (sign(c1 - s.lat1.covolume) <= 0 and sign(c2 - s.lat2.covolume) <= 0
                      and sign(cc - s.cyl.area) == 0),
    }


def _by_cross(first: Tuple[int, Candidate], second: Tuple[int, Candidate]) -> int:
    difference = sign(first[1].w_cross - second[1].w_cross)
    if difference:
        return difference
    a, b = (first[0], first[1].index), (second[0], second[1].index)
    return (a > b) - (a < b)


def _shifts_overlap(a: Candidate, b: Candidate) -> bool:
    return max(a.shifts[0], b.shifts[0]) <= min(a.shifts[1], b.shifts[1])


def search(s: FixSplitting, budget: SearchBudget, require_good_partners: bool = False) -> PartnerTriple:
    """
    Find a partner triple satisfying the certificate inequalities within the budget.

    Candidates of both tori are merged in increasing order of cross(v, w). Each pair is tested
    when its later member arrives, so the first passing pair has the smallest
    max(cross(v1, w), cross(v2, w)); among pairs with the same maximum the smallest convergent
    indices (v1 first) win. vc comes from choose_vc toward v1 + v2. Raising max_convergents,
    combination_span or max_circumference_shift only adds candidates, so a larger budget never
    returns a worse maximum. The triple is oriented with cross(v, w) > 0 for all three vectors.

    Args:
        s (FixSplitting): irrational splitting
        budget (SearchBudget): search limits
        require_good_partners (bool): insist on a ratio small enough to certify good partners

    Returns:
        PartnerTriple

    Raises:
        ConfigurationError: good partners required with eps_ratio > 1/36
        BudgetExhausted: nothing passes within the budget
        RationalDirection: s is not irrational
        GuaranteeViolated: a certificate with ratio <= 1/36 fails the good partner test
    """
    ratio = budget.ratio
    if require_good_partners and ratio > GOOD_PARTNER_RATIO:
        raise ConfigurationError(f"good partners need eps_ratio <= {GOOD_PARTNER_RATIO}, got {ratio}")
    if budget.max_convergents == 0:
        raise BudgetExhausted("no convergents allowed by the budget")
    if not is_irrational(s):
        raise RationalDirection(f"splitting direction {s.w} is rational")

    t = transversal(s)
    pool1 = candidate_pool(s.lat1, s, budget, t)
    pool2 = candidate_pool(s.lat2, s, budget, t)
    merged = sorted([(1, c) for c in pool1] + [(2, c) for c in pool2], key=functools.cmp_to_key(_by_cross))

    arrived = {1: [], 2: []}
    best = None
    tested = 0
    for side, cand in merged:
        if best is not None and sign(cand.w_cross - best[0]) > 0:
            break
        for other in arrived[3 - side]:
            a, b = (cand, other) if side == 1 else (other, cand)
            if not _shifts_overlap(a, b):
                continue
            tested += 1
            vc = choose_vc(s, budget, toward=a.vector + b.vector, t=t)
            triple = PartnerTriple(a.vector, b.vector, vc, 1)
            if not all(certificate_checks(s, triple, budget.eps_prime, ratio).values()):
                continue
            rank = (a.index, b.index)
            if best is None or rank < best[1]:
                best = (cand.w_cross, rank, a, b, vc)
        arrived[side].append(cand)

    if best is None:
        raise BudgetExhausted(
            f"no partner triple with eps_prime={budget.eps_prime}, ratio={ratio} among "
            f"{len(pool1)} x {len(pool2)} candidates"
        )

    _, _, a, b, vc = best
    triple = make_partner_triple(s, a.vector, b.vector, vc)
    if ratio <= GOOD_PARTNER_RATIO and not good_partners(s, triple):
        raise GuaranteeViolated(f"certificate with ratio {ratio} but not good partners: {triple}", context='partners')
    logger.info(f'partners after {tested} pair tests: v1={a.vector}, v2={b.vector}, vc={vc}')
    return triple
