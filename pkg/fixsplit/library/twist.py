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
from dataclasses import dataclass
from typing import Any, List, Tuple

try:
    from fixsplit.constants import MAX_TWIST
    from .exceptions import (
        DegenerateLattice,
        GuaranteeViolated,
        InvalidPartners,
        NotInLattice,
        RationalDirection,
        ResultInvalid,
        SameSideViolated,
    )
    from .numeric import exact_abs, minimum, sign
    from .planar import PlanarLattice, PlanarVector, complete_basis, cross, is_primitive
    from .splitting import CylinderClass, FixSplitting, is_irrational, validate
except ImportError:
    from constants import MAX_TWIST
    from exceptions import (
        DegenerateLattice,
        GuaranteeViolated,
        InvalidPartners,
        NotInLattice,
        RationalDirection,
        ResultInvalid,
        SameSideViolated,
    )
    from numeric import exact_abs, minimum, sign
    from planar import PlanarLattice, PlanarVector, complete_basis, cross, is_primitive
    from splitting import CylinderClass, FixSplitting, is_irrational, validate
# -

logger = logging.getLogger(__name__)

# result codes that reject a twist outright; every other code is a broken invariant
REJECTION_CODES = frozenset({'PeriodicClosure'})


@dataclass(frozen=True)
class PartnerTriple:
    """
    Primitive vectors v1 in lat1, v2 in lat2 and vc in the cylinder lattice, all on the same side
    of w: orientation * cross(v, w) > 0 for each of them.
    """
    v1: PlanarVector
    v2: PlanarVector
    vc: PlanarVector
    orientation: int

    def vectors(self) -> Tuple[PlanarVector, PlanarVector, PlanarVector]:
        return self.v1, self.v2, self.vc


@dataclass(frozen=True)
class TwistPlan:
    """A partner triple with a twist index, the new splitting vector and both area exchange bounds."""
    partners: PartnerTriple
    k: int
    w_new: PlanarVector
    bounds: Tuple[Any, Any]


def check_partner_triple(s: FixSplitting, p: PartnerTriple):
    """
    Check membership, primitivity, orientation and embedding bounds of a triple against s.

    Raises:
        InvalidPartners: naming the first failing condition
    """
    if p.orientation not in (1, -1):
        raise InvalidPartners(f"orientation must be +1 or -1, got {p.orientation}")

    slots = (
        ('v1', p.v1, s.lat1, s.lat1.covolume),
        ('v2', p.v2, s.lat2, s.lat2.covolume),
        ('vc', p.vc, s.cyl.lattice, s.cyl.area),
    )
    for name, v, lattice, area in slots:
        try:
            primitive = is_primitive(lattice, v)
        except NotInLattice:
            raise InvalidPartners(f"{name} = {v} is not in its lattice {lattice}")
        if not primitive:
            raise InvalidPartners(f"{name} = {v} is not primitive in {lattice}")

        c = cross(v, s.w)
        if sign(c) * p.orientation <= 0:
            raise InvalidPartners(f"{name} = {v} is not on the side {p.orientation:+d} of w = {s.w}")
        if sign(exact_abs(c) - area) > 0:
            raise InvalidPartners(f"|{name} x w| = {exact_abs(c)} exceeds the area {area} it must embed in")


def make_partner_triple(s: FixSplitting, v1: PlanarVector, v2: PlanarVector, vc: PlanarVector) -> PartnerTriple:
    """
    Build a triple with its orientation inferred from cross(v1, w).

    Raises:
        InvalidPartners: v1 is parallel to w, or the triple fails check_partner_triple
    """
    orientation = sign(cross(v1, s.w))
    if orientation == 0:
        raise InvalidPartners(f"v1 = {v1} is parallel to w = {s.w}")
    p = PartnerTriple(v1, v2, vc, orientation)
    check_partner_triple(s, p)
    return p


def _pair_is_good(a: PlanarVector, b: PlanarVector, w: PlanarVector) -> bool:
    # 4|a x b| < min(|a x w|, |b x w|) / 9
    bound = minimum(exact_abs(cross(a, w)), exact_abs(cross(b, w)))
    return sign(bound - 36 * exact_abs(cross(a, b))) > 0


def good_partners(s: FixSplitting, p: PartnerTriple) -> bool:
    """
    Raises:
        InvalidPartners: p is not a valid triple for s
    """
    check_partner_triple(s, p)
    w = s.w
    return (_pair_is_good(p.v1, p.v2, w)
            and _pair_is_good(p.v1, p.vc, w)
            and _pair_is_good(p.v2, p.vc, w))


def twist_vector(w: PlanarVector, p: PartnerTriple, k: int) -> PlanarVector:
    """w + k(v1 + v2 + 2vc)"""
    return w + k * (p.v1 + p.v2 + 2 * p.vc)


def same_side(s: FixSplitting, p: PartnerTriple, k: int) -> bool:
    """True when w and the twisted vector lie strictly on the same side of all three partners."""
    w_k = twist_vector(s.w, p, k)
    signs = {sign(cross(v, target)) for v in p.vectors() for target in (s.w, w_k)}
    return signs == {1} or signs == {-1}


def area_exchange_bound(s: FixSplitting, p: PartnerTriple, k: int) -> Tuple[Any, Any]:
    """Upper bounds on the area each torus exchanges under the k-th twist."""
    w = s.w
    k = abs(k)

    def bound(v, other):
        return 2 * exact_abs(cross(v, w)) + k * (exact_abs(cross(v, other)) + 2 * exact_abs(cross(v, p.vc)))

    return bound(p.v1, p.v2), bound(p.v2, p.v1)


def twist_lattice(lattice: PlanarLattice, v: PlanarVector, carry: PlanarVector, k: int,
                  orientation: int = 1) -> PlanarLattice:
    """The lattice generated by v and u + k*carry, where u completes v to a basis on the given side."""
    u = complete_basis(lattice, v, orientation)
    return PlanarLattice(v, u + k * carry)


def make_plan(s: FixSplitting, p: PartnerTriple, k: int) -> TwistPlan:
    """k = 0 gives an identity plan, kept for realization diagnostics."""
    return TwistPlan(p, k, twist_vector(s.w, p, k), area_exchange_bound(s, p, k))


def apply_twist(s: FixSplitting, p: PartnerTriple, k: int) -> FixSplitting:
    """
    The splitting obtained by twisting s k times along the partner triple.

    Raises:
        InvalidPartners: k = 0 or the triple is not valid for s
        SameSideViolated: the twisted saddle connections are not realized
        ResultInvalid: the result fails validation or total area conservation
    """
    if k == 0:
        raise InvalidPartners("twist index must be nonzero")
    check_partner_triple(s, p)
    if not same_side(s, p, k):
        raise SameSideViolated(f"w^{k} = {twist_vector(s.w, p, k)} is not on the side of all partners")

    sigma = p.orientation
    w_new = twist_vector(s.w, p, k)
    try:
        lat1 = twist_lattice(s.lat1, p.v1, p.v2 + 2 * p.vc, k, sigma)
        lat2 = twist_lattice(s.lat2, p.v2, p.v1 + 2 * p.vc, k, sigma)
        cyl = CylinderClass(PlanarLattice(w_new, p.vc), w_new)
    except DegenerateLattice as e:
        raise ResultInvalid(f"twist k={k} collapses a lattice: {e.message}", failures=['DegenerateLattice'])
    result = FixSplitting(lat1, lat2, cyl, w_new)

    report = validate(result)
    failures = list(report.codes)
    if report.valid:
        before = s.lat1.covolume + s.lat2.covolume + 2 * s.cyl.area
        after = lat1.covolume + lat2.covolume + 2 * cyl.area
        if sign(after - before) != 0:
            failures.append('AreaNotConserved')
    if failures:
        raise ResultInvalid(f"twist k={k} gives an invalid splitting: {', '.join(failures)}", failures=failures)

    logger.debug(f'twist k={k}: w -> {w_new}')
    return result


def twist_order(max_twist: int = MAX_TWIST) -> List[int]:
    return list(range(1, max_twist + 1)) + list(range(-1, -max_twist - 1, -1))


def select_irrational_twists(s: FixSplitting, p: PartnerTriple,
                             smallest_only: bool = False) -> List[Tuple[int, FixSplitting]]:
    """
    Try k = 1..9 then k = -1..-9 and keep every twist whose result is an irrational splitting.

    A twist is skipped only when the twisted direction closes up on a torus; any other
    validation failure of the result is an internal fault.

    Args:
        s (FixSplitting): irrational splitting
        p (PartnerTriple): good partners for s
        smallest_only (bool): stop each sign at its first irrational twist; realization is
            still checked for every |k| <= 9

    Returns:
        list: (k, twisted splitting) pairs, in the order tried

    Raises:
        RationalDirection: s is not irrational
        InvalidPartners: p is not a good partner triple
        GuaranteeViolated: a twist with |k| <= 9 is not realized, a twisted splitting breaks
            an invariant, or one sign has no irrational twist
    """
    if not is_irrational(s):
        raise RationalDirection(f"splitting direction {s.w} is rational")
    if not good_partners(s, p):
        raise InvalidPartners("triple is not a good partner triple")

    order = twist_order()
    if smallest_only:
        for k in order:
            if not same_side(s, p, k):
                raise GuaranteeViolated(f"good partners but twist k={k} not realized")

    selected = []
    for k in order:
        if smallest_only and any((j > 0) == (k > 0) for j, _ in selected):
            continue
        try:
            twisted = apply_twist(s, p, k)
        except SameSideViolated as e:
            raise GuaranteeViolated(f"good partners but twist k={k} not realized: {e.message}")
        except ResultInvalid as e:
            broken = [code for code in e.failures if code not in REJECTION_CODES]
            if broken:
                raise GuaranteeViolated(f"twist k={k} of good partners broke {broken}: {e.message}")
            logger.debug(f'skipping twist k={k}: {e.message}')
            continue
        if is_irrational(twisted):
            selected.append((k, twisted))
        else:
            logger.debug(f'twist k={k} gives a rational direction {twisted.w}')

    if not any(k > 0 for k, _ in selected):
        raise GuaranteeViolated("no irrational twist with k > 0")
    if not any(k < 0 for k, _ in selected):
        raise GuaranteeViolated("no irrational twist with k < 0")
    logger.info(f'irrational twists: {[k for k, _ in selected]}')
    return selected
