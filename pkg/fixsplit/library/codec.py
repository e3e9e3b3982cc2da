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
from fractions import Fraction
from typing import Any, Optional, Tuple

try:
    from fixsplit.constants import SCHEMA_SPLITTING, SCHEMA_TREE
    from .numeric import RATIONALS, NumberField, Scalar, ScalarMode, to_fraction
    from .partners import SearchBudget
    from .planar import PlanarLattice, PlanarVector
    from .splitting import CylinderClass, FixSplitting
    from .tree import SplittingTree, TreeNode
    from .twist import PartnerTriple, TwistPlan
except ImportError:
    from constants import SCHEMA_SPLITTING, SCHEMA_TREE
    from numeric import RATIONALS, NumberField, Scalar, ScalarMode, to_fraction
    from partners import SearchBudget
    from planar import PlanarLattice, PlanarVector
    from splitting import CylinderClass, FixSplitting
    from tree import SplittingTree, TreeNode
    from twist import PartnerTriple, TwistPlan
# -

logger = logging.getLogger(__name__)


def scalar_to_json(value) -> Any:
    if isinstance(value, Scalar):
        return value.to_json()
    if isinstance(value, float):
        return value
    return str(to_fraction(value))


def field_to_json(mode: ScalarMode) -> Any:
    return mode.to_json()


def field_from_json(data) -> Optional[NumberField]:
    """None for float mode."""
    if data is None:
        return RATIONALS
    if data == 'float':
        return None
    try:
        return NumberField(tuple(data['min_poly']), tuple(data['root_interval']))
    except (KeyError, TypeError) as e:
        raise ValueError(f"field description needs min_poly and root_interval: {e}")


def vector_to_json(v: PlanarVector) -> dict:
    return {'x': scalar_to_json(v.x), 'y': scalar_to_json(v.y)}


def vector_from_json(data: dict, mode: ScalarMode) -> PlanarVector:
    return PlanarVector(mode.coerce(data['x']), mode.coerce(data['y']))


def lattice_to_json(lattice: PlanarLattice) -> dict:
    return {'b1': vector_to_json(lattice.b1), 'b2': vector_to_json(lattice.b2)}


def lattice_from_json(data: dict, mode: ScalarMode) -> PlanarLattice:
    return PlanarLattice(vector_from_json(data['b1'], mode), vector_from_json(data['b2'], mode))


def splitting_to_json(s: FixSplitting, mode: Optional[ScalarMode] = None) -> dict:
    mode = mode or s.mode
    return {
        'schema': SCHEMA_SPLITTING,
        'field': field_to_json(mode),
        'lat1': lattice_to_json(s.lat1),
        'lat2': lattice_to_json(s.lat2),
        'cyl': {
            'b1': vector_to_json(s.cyl.lattice.b1),
            'b2': vector_to_json(s.cyl.lattice.b2),
            'circumference': vector_to_json(s.cyl.circumference),
        },
        'w': vector_to_json(s.w),
    }


def splitting_from_json(data: dict, kind: Optional[str] = None) -> Tuple[FixSplitting, ScalarMode]:
    """
    Read a splitting document.

    Args:
        data (dict): splitting JSON
        kind (str): 'exact' or 'float' to override the mode implied by the document

    Raises:
        ValueError: malformed document
    """
    schema = data.get('schema', SCHEMA_SPLITTING)
    if schema != SCHEMA_SPLITTING:
        raise ValueError(f"unsupported splitting schema {schema!r}")
    field = field_from_json(data.get('field'))
    if field is None:
        mode = ScalarMode.float_mode()
    elif kind == 'float':
        mode = ScalarMode.float_mode(field)
    else:
        mode = ScalarMode.exact(field)

    try:
        cyl = data['cyl']
        s = FixSplitting(
            lattice_from_json(data['lat1'], mode),
            lattice_from_json(data['lat2'], mode),
            CylinderClass(
                PlanarLattice(vector_from_json(cyl['b1'], mode), vector_from_json(cyl['b2'], mode)),
                vector_from_json(cyl['circumference'], mode),
            ),
            vector_from_json(data['w'], mode),
        )
    except KeyError as e:
        raise ValueError(f"splitting document is missing {e}")
    return s, mode


def partners_to_json(p: PartnerTriple) -> dict:
    return {
        'v1': vector_to_json(p.v1),
        'v2': vector_to_json(p.v2),
        'vc': vector_to_json(p.vc),
        'orientation': p.orientation,
    }


def partners_from_json(data: dict, mode: ScalarMode) -> PartnerTriple:
    return PartnerTriple(
        vector_from_json(data['v1'], mode),
        vector_from_json(data['v2'], mode),
        vector_from_json(data['vc'], mode),
        int(data['orientation']),
    )


def plan_to_json(plan: TwistPlan) -> dict:
    return {
        'partners': partners_to_json(plan.partners),
        'k': plan.k,
        'w_new': vector_to_json(plan.w_new),
        'bounds': [scalar_to_json(b) for b in plan.bounds],
    }


def plan_from_json(data: dict, mode: ScalarMode) -> TwistPlan:
    return TwistPlan(
        partners_from_json(data['partners'], mode),
        int(data['k']),
        vector_from_json(data['w_new'], mode),
        tuple(mode.coerce(b) for b in data['bounds']),
    )


def budget_to_json(budget: SearchBudget) -> dict:
    return budget.to_json()


def budget_from_json(data: dict) -> SearchBudget:
    return SearchBudget(
        eps_prime=data['eps_prime'],
        max_convergents=int(data['max_convergents']),
        max_circumference_shift=int(data['max_circumference_shift']),
        eps_ratio=data.get('eps_ratio'),
        combination_span=int(data.get('combination_span', 1)),
    )


def tree_to_json(tree: SplittingTree, mode: ScalarMode) -> dict:
    nodes = []
    for node in tree.nodes:
        nodes.append({
            'id': node.node_id,
            'parent': None if node.parent is None else node.parent.node_id,
            'depth': node.depth,
            'eps_n': str(node.eps_n),
            'w': vector_to_json(node.w),
            'k': None if node.plan is None else node.plan.k,
            'bounds': None if node.plan is None else [scalar_to_json(b) for b in node.plan.bounds],
            'plan': None if node.plan is None else plan_to_json(node.plan),
            'splitting': splitting_to_json(node.splitting, mode),
        })
    return {
        'schema': SCHEMA_TREE,
        'field': field_to_json(mode),
        'eps0': str(tree.eps0),
        'budget': budget_to_json(tree.budget),
        'max_refinements': tree.max_refinements,
        'max_budget_doublings': tree.max_budget_doublings,
        'complete': tree.complete,
        'failure': tree.failure,
        'global_min_angle': None if tree.global_min_angle is None else scalar_to_json(tree.global_min_angle),
        'nodes': nodes,
    }


def tree_from_json(data: dict, kind: Optional[str] = None) -> Tuple[SplittingTree, ScalarMode]:
    """
    Rebuild a stored tree. Nodes must be listed parents first.

    Raises:
        ValueError: malformed document
    """
    schema = data.get('schema')
    if schema != SCHEMA_TREE:
        raise ValueError(f"unsupported tree schema {schema!r}")
    entries = data.get('nodes') or []
    if not entries:
        raise ValueError("tree document has no nodes")

    mode = None
    by_id = {}
    tree = None
    for entry in entries:
        s, node_mode = splitting_from_json(entry['splitting'], kind)
        mode = mode or node_mode
        plan = None if entry.get('plan') is None else plan_from_json(entry['plan'], mode)
        parent_id = entry.get('parent')
        if parent_id is not None and parent_id not in by_id:
            raise ValueError(f"node {entry['id']} listed before its parent {parent_id}")
        parent = None if parent_id is None else by_id[parent_id]
        node = TreeNode(s, int(entry['depth']), Fraction(entry['eps_n']), plan, parent, node_id=int(entry['id']))
        by_id[node.node_id] = node
        if parent is None:
            tree = SplittingTree(node, Fraction(data['eps0']), budget_from_json(data['budget']),
                                 int(data.get('max_refinements', 8)), int(data.get('max_budget_doublings', 3)))
        else:
            parent.children.append(node)
            tree.nodes.append(node)

    tree.complete = bool(data.get('complete', True))
    tree.failure = data.get('failure')
    if data.get('global_min_angle') is not None:
        tree.global_min_angle = mode.coerce(data['global_min_angle'])
    logger.debug(f'loaded tree with {len(tree.nodes)} nodes')
    return tree, mode
