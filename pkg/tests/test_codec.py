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
import json
import logging
import unittest
from fractions import Fraction

try:
    from fixsplit.library.codec import *
    from fixsplit.library.numeric import sqrt_field
    from fixsplit.library.partners import SearchBudget
    from fixsplit.library.planar import PlanarVector
    from fixsplit.library.presets import demo_sqrt2
    from fixsplit.library.splitting import validate
    from fixsplit.library.tree import audit_tree, build_tree
except ModuleNotFoundError:
    from library.codec import *
    from library.numeric import sqrt_field
    from library.partners import SearchBudget
    from library.planar import PlanarVector
    from library.presets import demo_sqrt2
    from library.splitting import validate
    from library.tree import audit_tree, build_tree
# -

logging.getLogger('fixsplit').setLevel(logging.WARNING)


# -------------------------------------------------------------------
# 1) SPLITTING DOCUMENTS
# -------------------------------------------------------------------
class TestSplittingDocument(unittest.TestCase):

    def setUp(self):
        self.demo = demo_sqrt2()
        self.data = splitting_to_json(self.demo)

    def test_layout(self):
        """Field, lattices, cylinder and splitting vector are all present."""
        self.assertEqual(self.data['schema'], 'splitting-v1')
        self.assertEqual(self.data['field']['min_poly'], [-2, 0, 1])
        self.assertEqual(self.data['w'], {'x': '0', 'y': '1'})
        self.assertEqual(set(self.data['cyl']), {'b1', 'b2', 'circumference'})

    def test_document_is_plain_json(self):
        text = json.dumps(self.data, sort_keys=True)
        self.assertEqual(json.loads(text), self.data)

    def test_reload_exact(self):
        s, mode = splitting_from_json(json.loads(json.dumps(self.data)))
        self.assertTrue(mode.is_exact)
        self.assertEqual(mode.field, sqrt_field(2))
        self.assertEqual(s.lat1, self.demo.lat1)
        self.assertEqual(s.cyl.lattice, self.demo.cyl.lattice)
        self.assertEqual(s.w, self.demo.w)
        self.assertTrue(validate(s).valid)

    def test_reload_as_floats(self):
        s, mode = splitting_from_json(self.data, kind='float')
        self.assertFalse(mode.is_exact)
        self.assertEqual(s.w, PlanarVector(0.0, 1.0))
        self.assertAlmostEqual(float(s.lat1.covolume), 1.0)

    def test_missing_field_means_rationals(self):
        data = {
            'lat1': {'b1': {'x': '1', 'y': '0'}, 'b2': {'x': '0', 'y': '1'}},
            'lat2': {'b1': {'x': '1', 'y': '0'}, 'b2': {'x': '0', 'y': '1'}},
            'cyl': {'b1': {'x': '1/2', 'y': '0'}, 'b2': {'x': '0', 'y': '1'},
                    'circumference': {'x': '1/2', 'y': '0'}},
            'w': {'x': '1/2', 'y': '0'},
        }
        s, mode = splitting_from_json(data)
        self.assertEqual(mode.field.degree, 1)
        self.assertEqual(s.cyl.area, Fraction(1, 2))

    def test_wrong_schema(self):
        with self.assertRaises(ValueError):
            splitting_from_json(dict(self.data, schema='splitting-v0'))

    def test_missing_key(self):
        data = dict(self.data)
        del data['lat2']
        with self.assertRaises(ValueError):
            splitting_from_json(data)

    def test_malformed_field(self):
        with self.assertRaises(ValueError):
            field_from_json({'min_poly': [-2, 0, 1]})


# -------------------------------------------------------------------
# 2) BUDGETS AND TREES
# -------------------------------------------------------------------
class TestBudgetDocument(unittest.TestCase):

    def test_budget(self):
        budget = SearchBudget('1/100', 40, 10 ** 40, '1/36', combination_span=6)
        self.assertEqual(budget_from_json(budget_to_json(budget)), budget)

    def test_budget_defaults(self):
        budget = budget_from_json({'eps_prime': '1/50', 'max_convergents': 5, 'max_circumference_shift': 7})
        self.assertEqual(budget.ratio, Fraction(1, 50))
        self.assertEqual(budget.combination_span, 1)


class TestTreeDocument(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        budget = SearchBudget('1/100', 40, 10 ** 40, '1/36', combination_span=2)
        cls.tree = build_tree(demo_sqrt2(), 1, '1/10', budget)
        cls.mode = cls.tree.root.splitting.mode
        cls.data = json.loads(json.dumps(tree_to_json(cls.tree, cls.mode)))

    def test_nodes_listed_parents_first(self):
        nodes = self.data['nodes']
        self.assertEqual([n['id'] for n in nodes], [0, 1, 2])
        self.assertIsNone(nodes[0]['parent'])
        self.assertEqual({n['parent'] for n in nodes[1:]}, {0})
        self.assertEqual(self.data['eps0'], '1/10')

    def test_reloaded_tree_passes_audit(self):
        tree, mode = tree_from_json(self.data)
        self.assertTrue(mode.is_exact)
        self.assertEqual(len(tree.nodes), 3)
        self.assertEqual([c.plan.k for c in tree.root.children], [c.plan.k for c in self.tree.root.children])
        audit = audit_tree(tree)
        self.assertTrue(audit.passed, msg=audit.failures)

    def test_tampered_plan_fails_audit(self):
        data = json.loads(json.dumps(self.data))
        data['nodes'][1]['plan']['k'] = data['nodes'][1]['plan']['k'] + 1
        tree, _ = tree_from_json(data)
        self.assertFalse(audit_tree(tree).passed)

    def test_child_before_parent(self):
        data = dict(self.data, nodes=[self.data['nodes'][1], self.data['nodes'][0]])
        with self.assertRaises(ValueError):
            tree_from_json(data)

    def test_wrong_schema(self):
        with self.assertRaises(ValueError):
            tree_from_json(dict(self.data, schema='splitting-v1'))


if __name__ == '__main__':
    unittest.main()
