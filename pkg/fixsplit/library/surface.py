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

# # Polygon model and flow tracer
#
# A fix-surface is laid out as four parallelogram charts. Points are held in cell
# coordinates (u, v) of a chart, position = origin + u*e1 + v*e2. Torus charts are
# fundamental domains of the torus lattice with u and v periodic, carrying the slit from the
# lattice origin along w as a list of straight pieces. Cylinder charts are spanned by
# e1 = w and a transversal e2 with cross(w, e2) = area(C); u is periodic, v = 0 is the bottom
# boundary and v = 1 the top.
#
# Gluings identify a torus slit side with a cylinder boundary by translation, keeping the
# parameter tau along w. A trajectory with cross(w, d) > 0 reaches a slit from its right
# side ('slit+'), and leaves a cylinder through its top boundary.

# +
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

try:
    from fixsplit.constants import (
        CLOSURE_TOLERANCE,
        MAX_SLIT_PIECES,
        SNAP_TOLERANCE,
        STALL_LIMIT,
        STEP_RESOLUTION,
    )
    from .exceptions import (
        GuaranteeViolated,
        InvalidSplitting,
        NotRealizable,
        NumericalStall,
        SlitWrapsThroughVertex,
        ZeroDirection,
    )
    from .numeric import exact_abs, floor, is_integer, maximum, minimum, round_nearest, sign
    from .planar import PlanarLattice, PlanarVector, complete_basis, coordinates_in, cross, dot, reduce_basis
    from .splitting import FixSplitting, areas, validate
    from .twist import TwistPlan, same_side
except ImportError:
    from constants import (
        CLOSURE_TOLERANCE,
        MAX_SLIT_PIECES,
        SNAP_TOLERANCE,
        STALL_LIMIT,
        STEP_RESOLUTION,
    )
    from exceptions import (
        GuaranteeViolated,
        InvalidSplitting,
        NotRealizable,
        NumericalStall,
        SlitWrapsThroughVertex,
        ZeroDirection,
    )
    from numeric import exact_abs, floor, is_integer, maximum, minimum, round_nearest, sign
    from planar import PlanarLattice, PlanarVector, complete_basis, coordinates_in, cross, dot, reduce_basis
    from splitting import FixSplitting, areas, validate
    from twist import TwistPlan, same_side
# -

logger = logging.getLogger(__name__)

TORUS = 'torus'
CYLINDER = 'cylinder'

FIX_GLUING = {
    ('T1', 'slit+'): ('C1', 'bottom'),
    ('C1', 'top'): ('T2', 'slit-'),
    ('T2', 'slit+'): ('C2', 'bottom'),
    ('C2', 'top'): ('T1', 'slit-'),
}

_TORUS_WRAPS = np.array([(i, j) for i in (-1, 0, 1) for j in (-1, 0, 1)], dtype=float)
_CYLINDER_WRAPS = np.array([(-1, 0), (0, 0), (1, 0)], dtype=float)
# relative size below which two directions count as parallel
_PARALLEL = 1e-13
_TWO_PI = 2 * math.pi


def _involution(pairs: Dict[Tuple[str, str], Tuple[str, str]]) -> Dict[Tuple[str, str], Tuple[str, str]]:
    gluing = dict(pairs)
    gluing.update({b: a for a, b in pairs.items()})
    return gluing


@dataclass
class SlitLayout:
    """The slit origin -> origin + w of a torus chart, cut into pieces inside the unit cell."""
    vector: np.ndarray
    cell_direction: np.ndarray
    starts: np.ndarray
    taus: np.ndarray
    end_cell: np.ndarray

    @property
    def pieces(self) -> int:
        return len(self.starts)


@dataclass
class Chart:
    tag: str
    kind: str
    edges: Tuple[PlanarVector, PlanarVector]
    origin: np.ndarray
    cone_cells: np.ndarray
    slit: Optional[SlitLayout] = None
    matrix: np.ndarray = field(init=False, repr=False)
    inverse: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        e1, e2 = self.edges
        self.matrix = np.array([e1.as_floats(), e2.as_floats()], dtype=float).T
        self.inverse = np.linalg.inv(self.matrix)

    @property
    def area(self):
        return cross(*self.edges)

    @property
    def wraps(self) -> np.ndarray:
        return _TORUS_WRAPS if self.kind == TORUS else _CYLINDER_WRAPS

    def to_cell(self, point) -> np.ndarray:
        cell = self.inverse @ (np.asarray(point, dtype=float) - self.origin)
        if self.kind == TORUS:
            return cell - np.floor(cell)
        v = cell[1]
        if v < -SNAP_TOLERANCE or v > 1 + SNAP_TOLERANCE:
            raise ValueError(f"point {point} lies outside cylinder {self.tag}")
        return np.array([cell[0] - math.floor(cell[0]), min(1.0, max(0.0, v))])

    def to_plane(self, cell) -> Tuple[float, float]:
        x, y = self.origin + self.matrix @ np.asarray(cell, dtype=float)
        return float(x), float(y)

    def corner_angles(self) -> List[float]:
        """Interior angles at the cell corners (0,0), (1,0), (1,1), (0,1)."""
        e1, e2 = self.edges
        alpha = math.atan2(float(cross(e1, e2)), float(dot(e1, e2)))
        return [alpha, math.pi - alpha, alpha, math.pi - alpha]

    def to_json(self) -> dict:
        data = {
            'tag': self.tag,
            'kind': self.kind,
            'origin': [float(c) for c in self.origin],
            'edges': [list(e.as_floats()) for e in self.edges],
            'area': float(self.area),
            'cone_cells': self.cone_cells.tolist(),
        }
        if self.slit is not None:
            data['slit_pieces'] = self.slit.pieces
            data['slit_end_cell'] = self.slit.end_cell.tolist()
        return data


@dataclass
class ConePoint:
    members: List[str]
    angle: float

    @property
    def singular(self) -> bool:
        return abs(self.angle - _TWO_PI) > 1e-9


@dataclass
class PolygonModel:
    charts: Dict[str, Chart]
    gluing: Dict[Tuple[str, str], Tuple[str, str]]
    cone_points: List[ConePoint]
    total_area: Any
    splitting: Optional[FixSplitting] = None

    def chart_area(self, tag: str) -> float:
        return float(self.charts[tag].area)

    def audit(self) -> Dict[str, bool]:
        """Pairing involution, exact area and cone angle checks."""
        involution = all(self.gluing.get(b) == a for a, b in self.gluing.items())
        area = sum((chart.area for chart in self.charts.values()), 0)
        area_ok = sign(area - self.total_area) == 0
        singular = [p for p in self.cone_points if p.singular]
        cones_ok = True
        if self.splitting is not None:
            cones_ok = len(singular) == 2 and all(abs(p.angle - 3 * _TWO_PI) < 1e-9 for p in singular)
        return {'pairing_involution': involution, 'area_exact': area_ok, 'cone_angles': cones_ok}

    def to_json(self) -> dict:
        return {
            'charts': [self.charts[tag].to_json() for tag in sorted(self.charts)],
            'gluing': [[list(a), list(b)] for a, b in sorted(self.gluing.items())],
            'cone_points': [{'members': p.members, 'angle': p.angle} for p in self.cone_points],
            'total_area': str(self.total_area),
            'audit': self.audit(),
        }


# ---- construction ----

def _slit_layout(lattice: PlanarLattice, w: PlanarVector) -> SlitLayout:
    for b in (lattice.b1, lattice.b2):
        if sign(cross(b, w)) == 0:
            raise SlitWrapsThroughVertex(f"slit along {w} runs along the lattice edge {b}")

    wa, wb = (float(c) for c in coordinates_in(lattice, w))
    rate = np.array([wa, wb])
    point = np.zeros(2)
    for i in range(2):
        if rate[i] < 0:
            point[i] = 1.0

    starts, taus = [], []
    tau = 0.0
    while tau < 1.0:
        if len(starts) >= MAX_SLIT_PIECES:
            raise NumericalStall(f"slit along {w} needs more than {MAX_SLIT_PIECES} pieces")
        times = [((1.0 - point[i]) / rate[i]) if rate[i] > 0 else (-point[i] / rate[i])
                 for i in range(2) if rate[i] != 0]
        step = min(times)
        end = min(1.0, tau + step)
        starts.append(point.copy())
        taus.append((tau, end))
        point = point + (end - tau) * rate
        for i in range(2):
            if rate[i] > 0 and point[i] >= 1.0 - STEP_RESOLUTION:
                point[i] = 0.0
            elif rate[i] < 0 and point[i] <= STEP_RESOLUTION:
                point[i] = 1.0
        tau = end

    end_cell = np.array([wa, wb]) - np.floor([wa, wb])
    return SlitLayout(np.array(w.as_floats()), rate, np.array(starts), np.array(taus), end_cell)


def _torus_chart(tag: str, lattice: PlanarLattice, w: PlanarVector) -> Chart:
    slit = _slit_layout(lattice, w)
    cones = np.array([[0.0, 0.0], slit.end_cell])
    return Chart(tag, TORUS, (lattice.b1, lattice.b2), np.zeros(2), cones, slit)


def cylinder_edges(s: FixSplitting) -> Tuple[PlanarVector, PlanarVector]:
    """(w, t) with cross(w, t) = area(C) and t centred against w."""
    w = s.w
    t = complete_basis(s.cyl.lattice, w, 1)
    t = t - round_nearest(dot(t, w) / w.norm2()) * w
    return w, t


def _cylinder_chart(tag: str, edges, origin=(0.0, 0.0), cones=True) -> Chart:
    cone_cells = np.array([[0.0, 0.0], [0.0, 1.0]]) if cones else np.zeros((0, 2))
    return Chart(tag, CYLINDER, edges, np.array(origin, dtype=float), cone_cells)


class _Classes:
    def __init__(self, names):
        self.parent = {name: name for name in names}

    def find(self, name):
        while self.parent[name] != name:
            self.parent[name] = self.parent[self.parent[name]]
            name = self.parent[name]
        return name

    def union(self, a, b):
        self.parent[self.find(a)] = self.find(b)


def _angle_at(chart: Chart, cell) -> float:
    """
    Total angle of a torus chart around the point at `cell`: the corner angles of the four
    cells at a vertex, two straight angles on an edge, a full turn inside.
    """
    on_edge = [min(c - math.floor(c), math.ceil(c) - c) <= SNAP_TOLERANCE for c in cell]
    corners = chart.corner_angles()
    if all(on_edge):
        return sum(corners)
    if any(on_edge):
        # the two cells sharing the edge each see half a turn
        return (corners[0] + corners[1]) + (corners[2] + corners[3])
    return _TWO_PI


def cone_angle_audit(charts: Dict[str, Chart], gluing) -> List[ConePoint]:
    """
    Vertex classes of the glued complex with their total angles. A slit endpoint collects the
    angles of every cell copy meeting at its position in the torus chart; cylinder boundary
    vertices carry the two corner angles of their edge.
    """
    angles = {}
    for tag, chart in charts.items():
        corners = chart.corner_angles()
        if chart.kind == TORUS:
            angles[f'{tag}:start'] = _angle_at(chart, (0.0, 0.0))
            angles[f'{tag}:end'] = _angle_at(chart, chart.slit.end_cell)
        else:
            angles[f'{tag}:bottom'] = corners[0] + corners[1]
            angles[f'{tag}:top'] = corners[2] + corners[3]

    def ends(tag, side):
        if side.startswith('slit'):
            return f'{tag}:start', f'{tag}:end'
        return f'{tag}:{side}', f'{tag}:{side}'

    classes = _Classes(angles)
    for (a_tag, a_side), (b_tag, b_side) in gluing.items():
        for a, b in zip(ends(a_tag, a_side), ends(b_tag, b_side)):
            classes.union(a, b)

    grouped: Dict[str, List[str]] = {}
    for name in angles:
        grouped.setdefault(classes.find(name), []).append(name)
    points = [ConePoint(sorted(members), sum(angles[m] for m in members)) for members in grouped.values()]
    return sorted(points, key=lambda p: p.members)


def build_model(s: FixSplitting) -> PolygonModel:
    """
    Four-chart polygon model of a fix-splitting.

    Raises:
        InvalidSplitting: s fails validation
        SlitWrapsThroughVertex: a slit runs along an edge of its fundamental domain
        GuaranteeViolated: the glued complex fails its area or cone angle audit
    """
    report = validate(s)
    if not report.valid:
        raise InvalidSplitting(f"cannot build a model: {', '.join(report.codes)}", report=report)

    edges = cylinder_edges(s)
    charts = {
        'T1': _torus_chart('T1', s.lat1, s.w),
        'T2': _torus_chart('T2', s.lat2, s.w),
        'C1': _cylinder_chart('C1', edges),
        'C2': _cylinder_chart('C2', edges),
    }
    gluing = _involution(FIX_GLUING)
    model = PolygonModel(charts, gluing, cone_angle_audit(charts, gluing), areas(s).total, s)

    checks = model.audit()
    if not all(checks.values()):
        raise GuaranteeViolated(f"polygon model fails its audit: {checks}", context='surface')
    logger.info(f"model built: slit pieces T1={charts['T1'].slit.pieces}, T2={charts['T2'].slit.pieces}")
    return model


def square_torus_model() -> PolygonModel:
    """
    The unit square torus as two vertical cylinders: C1 covers x in [0, 1/2], C2 covers [1/2, 1].
    No cone points.
    """
    half = Fraction(1, 2)
    edges = (PlanarVector(0, 1), PlanarVector(-half, 0))
    charts = {
        'C1': _cylinder_chart('C1', edges, origin=(0.5, 0.0), cones=False),
        'C2': _cylinder_chart('C2', edges, origin=(1.0, 0.0), cones=False),
    }
    gluing = _involution({('C1', 'bottom'): ('C2', 'top'), ('C2', 'bottom'): ('C1', 'top')})
    return PolygonModel(charts, gluing, [], Fraction(1))


# ---- tracing ----

@dataclass
class Termination:
    kind: str
    time: float
    chart: Optional[str] = None
    position: Optional[Tuple[float, float]] = None

    def to_json(self) -> dict:
        return {'kind': self.kind, 'time': self.time, 'chart': self.chart,
                'position': None if self.position is None else list(self.position)}


@dataclass
class TraceResult:
    elapsed: float
    occupancy: Dict[str, float]
    termination: Termination
    crossings: int
    final: Tuple[str, Tuple[float, float]]
    breakpoints: List[Tuple[float, str, float, float]] = field(default_factory=list)

    def fraction(self, tag: str) -> float:
        return self.occupancy.get(tag, 0.0) / self.elapsed if self.elapsed > 0 else 0.0

    def to_json(self) -> dict:
        return {
            'elapsed': self.elapsed,
            'occupancy': dict(sorted(self.occupancy.items())),
            'termination': self.termination.to_json(),
            'crossings': self.crossings,
            'final': {'chart': self.final[0], 'position': list(self.final[1])},
        }


def _closest(chart: Chart, p: np.ndarray, d: np.ndarray, cells: np.ndarray, tol: float,
             min_along: float) -> Optional[float]:
    """Smallest time at which the ray passes within tol of a copy of one of the given cell points."""
    if not len(cells):
        return None
    copies = (cells[:, None, :] + chart.wraps[None, :, :]).reshape(-1, 2)
    rel = (copies - p) @ chart.matrix.T
    along = rel @ d
    across = np.abs(rel[:, 0] * d[1] - rel[:, 1] * d[0])
    mask = (along > min_along) & (across <= tol)
    if not mask.any():
        return None
    return max(0.0, float(along[mask].min()))


def _wall_exit(p: np.ndarray, dc: np.ndarray) -> Tuple[float, List[int]]:
    times = []
    for i in range(2):
        rate = dc[i]
        if rate > _PARALLEL:
            times.append(((1.0 - p[i]) / rate, i))
        elif rate < -_PARALLEL:
            times.append((-p[i] / rate, i))
    best = max(0.0, min(t for t, _ in times))
    return best, [i for t, i in times if t <= best + STEP_RESOLUTION]


def _slit_hit(slit: SlitLayout, p: np.ndarray, dc: np.ndarray, min_s: float) -> Optional[Tuple[float, float]]:
    wl = slit.cell_direction
    denom = dc[0] * wl[1] - dc[1] * wl[0]
    if abs(denom) <= _PARALLEL * np.linalg.norm(dc) * np.linalg.norm(wl):
        return None
    q = slit.starts - p
    s = (q[:, 0] * wl[1] - q[:, 1] * wl[0]) / denom
    sigma = (q[:, 0] * dc[1] - q[:, 1] * dc[0]) / denom
    lengths = slit.taus[:, 1] - slit.taus[:, 0]
    mask = (s > min_s) & (sigma >= -STEP_RESOLUTION) & (sigma <= lengths + STEP_RESOLUTION)
    if not mask.any():
        return None
    candidates = np.where(mask)[0]
    j = candidates[np.argmin(s[candidates])]
    tau = min(1.0, max(0.0, float(slit.taus[j, 0] + sigma[j])))
    return float(s[j]), tau


def _snap_to_walls(p: np.ndarray, dc: np.ndarray, axes) -> np.ndarray:
    p = p.copy()
    for i in axes:
        p[i] = 0.0 if dc[i] > 0 else 1.0
    return np.clip(p, 0.0, 1.0)


def _enter(chart: Chart, side: str, tau: float, dc: np.ndarray) -> np.ndarray:
    if side == 'bottom':
        return np.array([tau % 1.0, 0.0])
    if side == 'top':
        return np.array([tau % 1.0, 1.0])
    cell = tau * chart.slit.cell_direction
    cell = cell - np.floor(cell)
    for i in range(2):
        if cell[i] <= STEP_RESOLUTION and dc[i] < 0:
            cell[i] = 1.0
        elif cell[i] >= 1.0 - STEP_RESOLUTION and dc[i] > 0:
            cell[i] = 0.0
    return cell


def trace(model: PolygonModel, start: Tuple[str, Tuple[float, float]], direction, horizon: float,
          snap: float = SNAP_TOLERANCE, closure: float = CLOSURE_TOLERANCE, record: bool = False) -> TraceResult:
    """
    Follow the straight-line flow from `start` at unit speed.

    Args:
        model (PolygonModel): surface to trace on
        start (tuple): (chart tag, (x, y)) in the chart's plane coordinates
        direction: nonzero (dx, dy); normalised here
        horizon (float): largest flat time to trace
        snap (float): distance at which a cone point counts as hit
        closure (float): distance at which a return to the start counts as closing
        record (bool): keep (time, chart, x, y) breakpoints at every chart change

    Returns:
        TraceResult, terminated by 'singularity', 'closed' or 'horizon'

    Raises:
        NumericalStall: too many consecutive steps below the resolution
    """
    d = np.asarray(direction, dtype=float)
    length = float(np.hypot(*d))
    if length == 0.0:
        raise ZeroDirection("trace direction is zero")
    if horizon <= 0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    d = d / length

    tag, point = start
    chart = model.charts[tag]
    p = chart.to_cell(point)
    start_tag, start_cell = tag, p.copy()
    cell_rates = {t: c.inverse @ d for t, c in model.charts.items()}
    side_of_slit = {t: (c.slit.vector[0] * d[1] - c.slit.vector[1] * d[0]) for t, c in model.charts.items()
                    if c.slit is not None}

    elapsed = 0.0
    occupancy = Counter({t: 0.0 for t in model.charts})
    crossings = 0
    stalls = 0
    breakpoints = [(0.0, tag, *chart.to_plane(p))] if record else []

    while True:
        chart = model.charts[tag]
        dc = cell_rates[tag]

        wall, axes = _wall_exit(p, dc)
        event, s, payload = 'wall', wall, axes
        if chart.slit is not None:
            hit = _slit_hit(chart.slit, p, dc, STEP_RESOLUTION)
            if hit is not None and hit[0] < s:
                event, s, payload = 'slit', hit[0], hit[1]
        remaining = horizon - elapsed
        if remaining <= s:
            event, s = 'horizon', max(0.0, remaining)

        cone = _closest(chart, p, d, chart.cone_cells, snap, STEP_RESOLUTION)
        if cone is not None and cone <= s + snap:
            event, s = 'singularity', cone
        if tag == start_tag:
            floor_along = -STEP_RESOLUTION if elapsed > STEP_RESOLUTION else STEP_RESOLUTION
            back = _closest(chart, p, d, start_cell[None, :], closure, floor_along)
            if back is not None and back <= s + closure and event != 'singularity':
                event, s = 'closed', back

        elapsed += s
        occupancy[tag] += s
        p = p + s * dc
        stalls = stalls + 1 if s <= STEP_RESOLUTION else 0
        if stalls > STALL_LIMIT:
            raise NumericalStall(f"{stalls} steps below {STEP_RESOLUTION} near {chart.to_plane(p)} in {tag}")

        if event in ('singularity', 'closed', 'horizon'):
            position = chart.to_plane(p)
            termination = Termination(event, elapsed, tag, position)
            if record:
                breakpoints.append((elapsed, tag, *position))
            break

        if event == 'slit':
            side = 'slit+' if side_of_slit[tag] > 0 else 'slit-'
            tau = payload
        else:
            p = _snap_to_walls(p, dc, axes)
            if chart.kind == TORUS or 1 not in axes:
                continue
            side = 'top' if dc[1] > 0 else 'bottom'
            tau = p[0]

        if (tag, side) not in model.gluing:
            raise GuaranteeViolated(f"boundary {tag}:{side} is not glued", context='surface')
        tag, entry = model.gluing[(tag, side)]
        p = _enter(model.charts[tag], entry, tau, cell_rates[tag])
        crossings += 1
        if record:
            breakpoints.append((elapsed, tag, *model.charts[tag].to_plane(p)))

    final = (tag, model.charts[tag].to_plane(p))
    return TraceResult(elapsed, dict(occupancy), termination, crossings, final, breakpoints)


# ---- exact saddle connections ----

@dataclass
class SaddleRun:
    """
    Exact run of the ray from a slit endpoint along `direction`, parametrised by
    s in (0, 1]; `reach` is the exact s where it stopped.
    """
    start: str
    kind: str
    reach: Any
    chart: str
    crossings: int

    @property
    def realized(self) -> bool:
        """First cone point met exactly at the far end of the direction vector."""
        return self.kind == 'singularity' and sign(self.reach - 1) == 0

    def to_json(self) -> dict:
        return {'start': self.start, 'kind': self.kind, 'reach': float(self.reach),
                'chart': self.chart, 'crossings': self.crossings}


def _ceil(x) -> int:
    return -floor(-x)


def _integer_span(base, rate, low, high, open_low: bool = False):
    """
    Integers i with low <= base + i*rate <= high, low excluded when open_low.
    Returns (first, last), (None, None) when every i qualifies, or None.
    """
    if sign(rate) == 0:
        above = sign(base - low) > 0 if open_low else sign(base - low) >= 0
        return (None, None) if above and sign(high - base) >= 0 else None
    at_low = (low - base) / rate
    at_high = (high - base) / rate
    if sign(rate) > 0:
        first = floor(at_low) + 1 if open_low else _ceil(at_low)
        last = floor(at_high)
    else:
        first = _ceil(at_high)
        last = _ceil(at_low) - 1 if open_low else floor(at_low)
    return (first, last) if first <= last else None


def _intersect(a, b):
    if a is None or b is None:
        return None
    first = a[0] if b[0] is None else b[0] if a[0] is None else max(a[0], b[0])
    last = a[1] if b[1] is None else b[1] if a[1] is None else min(a[1], b[1])
    if first is not None and last is not None and first > last:
        return None
    return first, last


class _LatticeWindow:
    """
    Lattice points lam of a slit torus seen from a ray along d, in coordinates (s, sigma) with
    lam + sigma*w = q + s*d. The ray from q meets the slit copy based at lam when
    0 <= sigma <= 1; sigma = 0 and sigma = 1 are its endpoints.
    """

    def __init__(self, lattice: PlanarLattice, w: PlanarVector, d: PlanarVector):
        self.w = w
        self.d = d
        self.scale = cross(d, w)
        self.g1, self.g2 = reduce_basis(self._coordinates(lattice.b1), self._coordinates(lattice.b2))
        self.det = cross(self.g1, self.g2)

    def _coordinates(self, v: PlanarVector) -> PlanarVector:
        return PlanarVector(cross(v, self.w) / self.scale, cross(v, self.d) / self.scale)

    def first_hit(self, q: PlanarVector, limit) -> Optional[PlanarVector]:
        """(s, sigma) of the slit copy met first with 0 < s <= limit, or None."""
        origin = -self._coordinates(q)
        corners = [PlanarVector(a, b) for a in (0, limit) for b in (0, 1)]
        rows = [cross(self.g1, c - origin) / self.det for c in corners]
        first_row, last_row = _ceil(minimum(*rows)), floor(maximum(*rows))
        if last_row - first_row > MAX_SLIT_PIECES:
            raise NumericalStall(f"lattice window along {self.d} spans {last_row - first_row} rows")

        best = None
        for j in range(first_row, last_row + 1):
            base = origin + j * self.g2
            span = _intersect(_integer_span(base.x, self.g1.x, 0, limit, open_low=True),
                              _integer_span(base.y, self.g1.y, 0, 1))
            if span is None:
                continue
            # s is linear in i; both ends are finite because g1 is not zero
            i = span[1] if sign(self.g1.x) < 0 else span[0]
            point = base + i * self.g1
            if best is None or sign(point.x - best.x) < 0:
                best = point
        return best


def follow_saddle(model: PolygonModel, s: FixSplitting, direction: PlanarVector, tag: str,
                  from_end: bool = False) -> SaddleRun:
    """
    Follow the ray from the start (or end) of the slit of torus `tag` along `direction` in
    exact arithmetic until it meets a cone point or has travelled the whole vector.

    Raises:
        ZeroDirection: direction is zero
        NumericalStall: more than MAX_SLIT_PIECES chart crossings
    """
    if direction.is_zero():
        raise ZeroDirection("saddle run along the zero vector")
    w = s.w
    start = f"{tag}:{'end' if from_end else 'start'}"
    rising = sign(cross(w, direction))
    if rising == 0:
        # along the slit line: only the slit end can be met, and only from the start
        reach = dot(w, direction) / direction.norm2()
        if not from_end and sign(reach) > 0 and sign(reach - 1) <= 0:
            return SaddleRun(start, 'singularity', reach, tag, 0)
        return SaddleRun(start, 'end', Fraction(1), tag, 0)

    lattices = {'T1': s.lat1, 'T2': s.lat2}
    _, t = cylinder_edges(s)
    area_c = s.cyl.area
    step = area_c / exact_abs(cross(w, direction))
    drift = step * cross(direction, t) / area_c
    windows = {}

    current = tag
    q = w if from_end else 0 * w
    tau = None
    reach = Fraction(0)
    crossings = 0
    while True:
        if model.charts[current].kind == TORUS:
            if current not in windows:
                windows[current] = _LatticeWindow(lattices[current], w, direction)
            hit = windows[current].first_hit(q, 1 - reach)
            if hit is None:
                return SaddleRun(start, 'end', Fraction(1), current, crossings)
            reach = reach + hit.x
            if sign(hit.y) == 0 or sign(hit.y - 1) == 0:
                return SaddleRun(start, 'singularity', reach, current, crossings)
            tau = hit.y
            side = 'slit+' if rising > 0 else 'slit-'
        else:
            if sign(reach + step - 1) > 0:
                return SaddleRun(start, 'end', Fraction(1), current, crossings)
            reach = reach + step
            tau = tau + drift
            if is_integer(tau):
                return SaddleRun(start, 'singularity', reach, current, crossings)
            tau = tau - floor(tau)
            side = 'top' if rising > 0 else 'bottom'

        if crossings >= MAX_SLIT_PIECES:
            raise NumericalStall(f"saddle run from {start} crosses more than {MAX_SLIT_PIECES} boundaries")
        current, _ = model.gluing[(current, side)]
        crossings += 1
        q = tau * w


def check_saddle_realization(model: PolygonModel, s: FixSplitting, plan: TwistPlan) -> bool:
    """
    Follow the twisted splitting vector exactly from both slit endpoints of each torus and
    require, for each torus, a run whose first cone point is met at exactly its flat length.

    The slit endpoints are one cone point, and two of its three sheets carry realized twisted
    saddle connections, so one of the two torus sheets does.

    Raises:
        NotRealizable: the plan fails the same side criterion
    """
    if plan.k != 0 and not same_side(s, plan.partners, plan.k):
        raise NotRealizable(f"plan k={plan.k} fails the same side criterion")

    for tag in ('T1', 'T2'):
        runs = [follow_saddle(model, s, plan.w_new, tag, from_end) for from_end in (False, True)]
        if not any(run.realized for run in runs):
            for run in runs:
                logger.info(f'saddle w^{plan.k} from {run.start}: {run.kind} at s={float(run.reach)} '
                            f'after {run.crossings} crossings')
            return False
    return True


@dataclass
class OccupancySummary:
    region: str
    samples: int
    horizon: float
    seed: int
    fractions: List[float]
    area_fraction: float
    terminations: Dict[str, int]

    @property
    def mean(self) -> float:
        return float(np.mean(self.fractions)) if self.fractions else 0.0

    def to_json(self) -> dict:
        values = np.array(self.fractions) if self.fractions else np.zeros(1)
        return {
            'region': self.region,
            'samples': self.samples,
            'horizon': self.horizon,
            'seed': self.seed,
            'mean': float(values.mean()),
            'min': float(values.min()),
            'max': float(values.max()),
            'std': float(values.std()),
            'area_fraction': self.area_fraction,
            'deviation': float(values.mean()) - self.area_fraction,
            'terminations': dict(sorted(self.terminations.items())),
        }


def occupancy_experiment(model: PolygonModel, direction, horizon: float, samples: int, seed: int,
                         region: str = 'T1') -> OccupancySummary:
    """
    Time fraction spent in `region` by `samples` trajectories with random starts, charts drawn
    in proportion to their area. Diagnostic only.
    """
    rng = np.random.default_rng(seed)
    tags = sorted(model.charts)
    weights = np.array([model.chart_area(t) for t in tags])
    weights = weights / weights.sum()
    area_fraction = model.chart_area(region) / float(model.total_area) if region in model.charts else 0.0

    fractions = []
    terminations = Counter()
    for i in range(samples):
        tag = tags[rng.choice(len(tags), p=weights)]
        chart = model.charts[tag]
        cell = rng.random(2)
        result = trace(model, (tag, chart.to_plane(cell)), direction, horizon)
        terminations[result.termination.kind] += 1
        if result.elapsed > 0:
            fractions.append(result.fraction(region))
        logger.debug(f'sample {i}: start {tag}, {result.termination.kind} at {result.elapsed}')
    return OccupancySummary(region, samples, horizon, seed, fractions, area_fraction, dict(terminations))
