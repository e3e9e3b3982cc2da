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
from functools import cmp_to_key
from typing import Any, Dict, List, Optional, Tuple

try:
    from fixsplit.constants import GOOD_PARTNER_RATIO, HEIGHT_SLACK
    from .exceptions import (
        BudgetExhausted,
        DuplicateDirections,
        GuaranteeViolated,
        IncompleteTree,
        LeafNotInTree,
        ObtuseOrZero,
        RationalDirection,
    )
    from .numeric import exact_abs, maximum, minimum, rational_below, sign, to_fraction
    from .partners import SearchBudget, search
    from .planar import PlanarVector, angle_measure, cross, dot, line_angle_measure, perp_component, unit_direction
    from .splitting import FixSplitting, areas, is_irrational
    from .twist import TwistPlan, area_exchange_bound, make_plan, select_irrational_twists, twist_vector
except ImportError:
    from constants import GOOD_PARTNER_RATIO, HEIGHT_SLACK
    from exceptions import (
        BudgetExhausted,
        DuplicateDirections,
        GuaranteeViolated,
        IncompleteTree,
        LeafNotInTree,
        ObtuseOrZero,
        RationalDirection,
    )
    from numeric import exact_abs, maximum, minimum, rational_below, sign, to_fraction
    from partners import SearchBudget, search
    from planar import PlanarVector, angle_measure, cross, dot, line_angle_measure, perp_component, unit_direction
    from splitting import FixSplitting, areas, is_irrational
    from twist import TwistPlan, area_exchange_bound, make_plan, select_irrational_twists, twist_vector
# -

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class TreeNode:
    """
    Node of the splitting tree. `plan` is the twist that produced the node from its parent,
    expressed against the parent splitting.
    """
    splitting: FixSplitting
    depth: int
    eps_n: Fraction
    plan: Optional[TwistPlan] = None
    parent: Optional['TreeNode'] = None
    children: List['TreeNode'] = field(default_factory=list)
    node_id: int = 0
    w: PlanarVector = field(init=False)

    def __post_init__(self):
        self.w = self.splitting.w

    def path(self) -> List['TreeNode']:
        nodes = []
        node = self
        while node is not None:
            nodes.append(node)
            node = node.parent
        return nodes[::-1]


@dataclass(eq=False)
class SplittingTree:
    root: TreeNode
    eps0: Fraction
    budget: SearchBudget
    max_refinements: int = 8
    max_budget_doublings: int = 3
    nodes: List[TreeNode] = field(default_factory=list)
    complete: bool = True
    failure: Optional[str] = None
    global_min_angle: Any = None
    _lock: Any = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        if not self.nodes:
            self.nodes.append(self.root)

    @property
    def depth(self) -> int:
        return max(node.depth for node in self.nodes)

    def level(self, depth: int) -> List[TreeNode]:
        return [node for node in self.nodes if node.depth == depth]

    def leaves(self) -> List[TreeNode]:
        return [node for node in self.nodes if not node.children]

    def contains(self, node: TreeNode) -> bool:
        return any(node is n for n in self.nodes)


@dataclass
class PathLevel:
    """One node of a root-to-leaf path; k, a and height_bound describe the edge to the next node."""
    n: int
    w: PlanarVector
    k: Optional[int]
    h: float
    a: Any
    partial_sum: Any
    area1: Any
    area2: Any
    length: float
    height_bound: Optional[float]

    def to_row(self) -> list:
        return [
            self.n,
            '' if self.k is None else self.k,
            repr(self.h),
            '' if self.a is None else repr(float(self.a)),
            repr(float(self.partial_sum)),
            repr(float(self.area1)),
            repr(float(self.area2)),
            repr(self.length),
        ]


@dataclass
class PathReport:
    leaf_id: int
    levels: List[PathLevel]
    theta_estimate: Tuple[float, float]
    theta_uncertainty: float
    min_area: Any
    flags: Dict[str, bool]
    lengths_increasing: bool

    @property
    def partial_sums(self) -> list:
        return [level.partial_sum for level in self.levels]

    @property
    def passed(self) -> bool:
        return all(self.flags.values())


@dataclass
class TreeAudit:
    edges_checked: int
    failures: List[str]
    paths: List[PathReport]

    @property
    def passed(self) -> bool:
        return not self.failures and all(report.passed for report in self.paths)


@dataclass
class DirectionSummary:
    count: int
    min_angle: Any
    directions: List[Tuple[float, float]]


def _children_from(node: TreeNode, budget: SearchBudget, ratio: Fraction,
                   max_refinements: int) -> List[Tuple[FixSplitting, TwistPlan]]:
    """Search partners with shrinking eps' until both chosen twists meet the node budgets."""
    s = node.splitting
    target = node.eps_n / 4
    eps = min(budget.eps_prime, node.eps_n / 40)

    for attempt in range(max_refinements + 1):
        partners = search(s, budget.with_eps(eps, ratio), require_good_partners=True)
        twists = select_irrational_twists(s, partners, smallest_only=True)
        positive = min((k for k, _ in twists if k > 0))
        negative = max((k for k, _ in twists if k < 0))

        chosen = []
        for k in (positive, negative):
            twisted = dict(twists)[k]
            plan = make_plan(s, partners, k)
            orientation = sign(dot(node.w, twisted.w))
            if orientation == 0:
                break
            child = twisted.with_orientation(orientation)
            angle = angle_measure(node.w, child.w)
            if sign(angle - target) >= 0 or any(sign(b - target) >= 0 for b in plan.bounds):
                logger.debug(f'k={k} misses the budget {target} at eps\'={eps}')
                break
            chosen.append((child, plan))
        else:
            return chosen

        eps = eps / 2
        logger.debug(f'refining eps\' to {eps} (attempt {attempt + 1})')

    raise BudgetExhausted(f"twists of node {node.node_id} miss the budget {target} after "
                          f"{max_refinements} refinements", context='tree')


def expand(tree: SplittingTree, node: TreeNode, budget: Optional[SearchBudget] = None) -> Tuple[TreeNode, TreeNode]:
    """
    Two children of `node`, one from a positive and one from a negative twist, each within
    angle eps_n/4 of the node and exchanging area below eps_n/4. Expanding a node twice
    returns the existing children.

    Raises:
        BudgetExhausted: the budget, even after the allowed doublings, found no suitable twists
        GuaranteeViolated: propagated from the twist selection, or coincident directions
    """
    if node.children:
        return tuple(node.children)

    budget = budget or tree.budget
    ratio = min(budget.ratio, GOOD_PARTNER_RATIO)
    doublings = 0
    while True:
        try:
            found = _children_from(node, budget, ratio, tree.max_refinements)
            break
        except BudgetExhausted as e:
            if doublings >= tree.max_budget_doublings:
                raise
            doublings += 1
            budget = budget.doubled()
            logger.warning(f'node {node.node_id}: {e.message}; retrying with doubled budget ({doublings})')

    (first, first_plan), (second, second_plan) = found
    with tree._lock:
        target = node.eps_n / 4
        angles = [angle_measure(node.w, first.w), angle_measure(node.w, second.w)]
        try:
            angles.append(line_angle_measure(first.w, second.w))
        except ObtuseOrZero:
            raise GuaranteeViolated(f"children of node {node.node_id} are perpendicular", context='tree')
        if any(sign(a) == 0 for a in angles):
            raise GuaranteeViolated(f"node {node.node_id} has a child along its own or its sibling direction",
                                    context='tree')
        if any(sign(a - target) >= 0 for a in angles[:2]):
            raise BudgetExhausted(f"children of node {node.node_id} fail the angle budget on commit", context='tree')

        smallest = minimum(*angles)
        if tree.global_min_angle is not None:
            smallest = minimum(tree.global_min_angle, smallest)
        tree.global_min_angle = smallest
        eps_child = min(node.eps_n / 2, rational_below(smallest / 2))

        for splitting, plan in ((first, first_plan), (second, second_plan)):
            child = TreeNode(splitting, node.depth + 1, eps_child, plan, node, node_id=len(tree.nodes))
            node.children.append(child)
            tree.nodes.append(child)

    logger.info(f'node {node.node_id}: children k={first_plan.k}, {second_plan.k}, eps={eps_child}')
    return tuple(node.children)


def build_tree(root: FixSplitting, depth: int, eps0, budget: SearchBudget,
               max_refinements: int = 8, max_budget_doublings: int = 3) -> SplittingTree:
    """
    Breadth-first binary tree of irrational splittings.

    A BudgetExhausted failure stops the build; the partial tree is returned with
    `complete = False` and the failure message recorded.

    Raises:
        ValueError: eps0 <= 0 or depth < 0
        RationalDirection: root is not irrational
    """
    eps0 = to_fraction(eps0)
    if eps0 <= 0:
        raise ValueError(f"eps0 must be positive, got {eps0}")
    if depth < 0:
        raise ValueError(f"depth must not be negative, got {depth}")
    if not is_irrational(root):
        raise RationalDirection(f"root direction {root.w} is rational", context='tree')

    tree = SplittingTree(TreeNode(root, 0, eps0), eps0, budget, max_refinements, max_budget_doublings)
    frontier = [tree.root]
    for level in range(depth):
        logger.info(f'expanding level {level}: {len(frontier)} nodes')
        following = []
        for node in frontier:
            try:
                following.extend(expand(tree, node))
            except BudgetExhausted as e:
                tree.complete = False
                tree.failure = e.message
                logger.error(f'tree build stopped at node {node.node_id}: {e.message}')
                return tree
        frontier = following
    return tree


def _as_length(square) -> float:
    # exact square first, deep holonomies overflow a float
    return math.sqrt(float(square))


def audit_path(tree: SplittingTree, leaf: TreeNode) -> PathReport:
    """
    Recompute the nonergodicity diagnostics along the path from the root to `leaf`.

    Raises:
        LeafNotInTree: leaf belongs to another tree
    """
    if not tree.contains(leaf):
        raise LeafNotInTree(f"node {leaf.node_id} is not part of this tree")

    path = leaf.path()
    theta = unit_direction(leaf.w)
    leaf_norm2 = leaf.w.norm2()
    slack = (1 + Fraction(str(HEIGHT_SLACK))) ** 2

    levels = []
    partial = Fraction(0)
    budget_sum = Fraction(0)
    sums_ok = True
    cross_cap_ok = True
    heights_ok = True
    previous_bound2 = None
    for n, node in enumerate(path):
        s = node.splitting
        a1, a2, _, total = areas(s)
        h2 = cross(node.w, leaf.w) ** 2 / leaf_norm2
        h = perp_component(node.w, leaf.w)
        k = a = bound = None

        if n + 1 < len(path):
            child = path[n + 1]
            k = child.plan.k
            a = maximum(*child.plan.bounds)
            partial = partial + a
            budget_sum += node.eps_n / 4
            sums_ok = sums_ok and sign(partial - budget_sum) <= 0 and sign(partial - tree.eps0 / 2) < 0

            edge_cross = exact_abs(cross(node.w, child.w))
            cross_cap_ok = cross_cap_ok and sign(edge_cross - 9 * total) <= 0
            bound2 = 4 * edge_cross ** 2 / child.w.norm2()
            bound = _as_length(bound2)
            heights_ok = heights_ok and sign(h2 - slack * bound2) <= 0
            if previous_bound2 is not None:
                heights_ok = heights_ok and sign(bound2 - previous_bound2) < 0
            previous_bound2 = bound2

        levels.append(PathLevel(n, node.w, k, h, a, partial, a1, a2, node.w.length(), bound))

    min_area = minimum(*[level.area1 for level in levels], *[level.area2 for level in levels])
    lengths_increasing = all(
        sign(levels[i + 1].w.norm2() - levels[i].w.norm2()) > 0 for i in range(len(levels) - 1)
    )
    uncertainty = 0.0
    if len(path) > 1:
        uncertainty = 2 * float(angle_measure(path[-2].w, path[-1].w))

    flags = {
        'area_exchange_summable': sums_ok,
        'heights_shrink': heights_ok,
        'areas_positive': sign(min_area) > 0,
        'cross_product_capped': cross_cap_ok,
    }
    return PathReport(leaf.node_id, levels, theta, uncertainty, min_area, flags, lengths_increasing)


def audit_tree(tree: SplittingTree) -> TreeAudit:
    """Re-verify every edge budget and every root-to-leaf path from the stored splittings and plans."""
    failures = []
    edges = 0
    for node in tree.nodes:
        if not is_irrational(node.splitting):
            failures.append(f'node {node.node_id}: direction is rational')
        bound = tree.eps0 / 2 ** node.depth
        if node.eps_n > bound:
            failures.append(f'node {node.node_id}: eps {node.eps_n} exceeds {bound}')

        for child in node.children:
            edges += 1
            target = node.eps_n / 4
            plan = child.plan
            if sign(cross(twist_vector(node.w, plan.partners, plan.k), child.w)) != 0:
                failures.append(f'edge {node.node_id}->{child.node_id}: child is not the planned twist')
            try:
                if sign(angle_measure(node.w, child.w) - target) >= 0:
                    failures.append(f'edge {node.node_id}->{child.node_id}: angle budget exceeded')
            except ObtuseOrZero:
                failures.append(f'edge {node.node_id}->{child.node_id}: child points away from parent')
            for b in area_exchange_bound(node.splitting, plan.partners, plan.k):
                if sign(b - target) >= 0:
                    failures.append(f'edge {node.node_id}->{child.node_id}: area bound {b} exceeds {target}')
            if not child.eps_n < node.eps_n:
                failures.append(f'edge {node.node_id}->{child.node_id}: eps does not decrease')

    paths = [audit_path(tree, leaf) for leaf in tree.leaves()]
    for report in paths:
        for name, ok in report.flags.items():
            if not ok:
                failures.append(f'path to {report.leaf_id}: {name} fails')
    if failures:
        logger.warning(f'tree audit found {len(failures)} failures')
    return TreeAudit(edges, failures, paths)


def _counterclockwise(a: PlanarVector, b: PlanarVector) -> int:
    return -sign(cross(a, b))


def distinct_directions(tree: SplittingTree, depth: int) -> DirectionSummary:
    """
    Leaf directions at `depth`, ordered by angle, with the smallest angle between neighbours.

    Raises:
        IncompleteTree: the tree does not have 2**depth nodes at that depth
        DuplicateDirections: two leaves share a direction
    """
    leaves = tree.level(depth)
    if not tree.complete or len(leaves) != 2 ** depth:
        raise IncompleteTree(f"expected {2 ** depth} nodes at depth {depth}, found {len(leaves)}")

    ordered = sorted((leaf.w for leaf in leaves), key=cmp_to_key(_counterclockwise))
    min_angle = None
    for a, b in zip(ordered, ordered[1:]):
        angle = line_angle_measure(a, b)
        if sign(angle) == 0:
            raise DuplicateDirections(f"leaves {a} and {b} share a direction")
        min_angle = angle if min_angle is None else minimum(min_angle, angle)
    return DirectionSummary(len(ordered), min_angle, [unit_direction(w) for w in ordered])
