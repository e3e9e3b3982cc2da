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
import random
import unittest
from fractions import Fraction
from unittest import mock
# -

try:
    import fixsplit.library.twist as twist_module
    from fixsplit.library.twist import *
    from fixsplit.library.partners import SearchBudget, search
    from fixsplit.library.planar import PlanarLattice, PlanarVector, complete_basis, cross
    from fixsplit.library.numeric import sign
    from fixsplit.library.presets import demo_sqrt2
    from fixsplit.library.splitting import CylinderClass, FixSplitting, areas, is_irrational, validate
    from fixsplit.library.exceptions import (BudgetExhausted, GuaranteeViolated, InvalidPartners, RationalDirection,
                                           ResultInvalid, SameSideViolated)
except ModuleNotFoundError:
    import library.twist as twist_module
    from library.twist import *
    from library.partners import SearchBudget, search
    from library.planar import PlanarLattice, PlanarVector, complete_basis, cross
    from library.numeric import sign
    from library.presets import demo_sqrt2
    from library.splitting import CylinderClass, FixSplitting, areas, is_irrational, validate
    from library.exceptions import (BudgetExhausted, GuaranteeViolated, InvalidPartners, RationalDirection,
                                  ResultInvalid, SameSideViolated)


F = Fraction


def V(x, y):
    return PlanarVector(F(x), F(y))


Z2 = PlanarLattice(V(1, 0), V(0, 1))


def rational_splitting():
    w = V(F(1, 2), 0)
    return FixSplitting(Z2, Z2, CylinderClass(PlanarLattice(w, V(0, 1)), w), w)


DOWN = V(0, -1)


class TestPartnerTriple(unittest.TestCase):

    def setUp(self):
        self.s = rational_splitting()

    def test_valid_triple(self):
        p = make_partner_triple(self.s, DOWN, DOWN, DOWN)
        self.assertEqual(p.orientation, 1)
        check_partner_triple(self.s, p)
        self.assertTrue(good_partners(self.s, p))

    def test_parallel_to_w(self):
        with self.assertRaises(InvalidPartners):
            make_partner_triple(self.s, V(1, 0), DOWN, DOWN)

    def test_not_primitive(self):
        with self.assertRaises(InvalidPartners):
            make_partner_triple(self.s, V(0, -2), DOWN, DOWN)

    def test_cross_exceeds_area(self):
        # |(1, -3) x (1/2, 0)| = 3/2 is larger than the unit torus
        with self.assertRaises(InvalidPartners):
            make_partner_triple(self.s, V(1, -3), DOWN, DOWN)

    def test_opposite_sides(self):
        with self.assertRaises(InvalidPartners):
            check_partner_triple(self.s, PartnerTriple(DOWN, V(0, 1), DOWN, 1))

    def test_bad_orientation_value(self):
        with self.assertRaises(InvalidPartners):
            check_partner_triple(self.s, PartnerTriple(DOWN, DOWN, DOWN, 0))

    def test_pair_not_good(self):
        # cross((1, -1), (0, -1)) = -1 is far from small
        p = make_partner_triple(self.s, V(1, -1), DOWN, DOWN)
        self.assertFalse(good_partners(self.s, p))


class TestApplyTwist(unittest.TestCase):

    def setUp(self):
        self.s = rational_splitting()
        self.p = make_partner_triple(self.s, DOWN, DOWN, DOWN)

    def test_twist_vector(self):
        self.assertEqual(twist_vector(self.s.w, self.p, 1), V(F(1, 2), -4))
        self.assertEqual(twist_vector(self.s.w, self.p, -2), V(F(1, 2), 8))

    def test_same_side_for_every_index(self):
        for k in twist_order():
            self.assertTrue(same_side(self.s, self.p, k), msg=f'k={k}')

    def test_single_twist(self):
        result = apply_twist(self.s, self.p, 1)
        self.assertEqual(result.w, V(F(1, 2), -4))
        self.assertEqual(result.cyl.circumference, result.w)
        self.assertEqual(result.lat1, Z2)
        self.assertEqual(result.lat2, Z2)
        self.assertEqual(result.cyl.area, F(1, 2))
        self.assertTrue(validate(result).valid)
        self.assertEqual(areas(result).total, areas(self.s).total)

    def test_area_exchange_bound(self):
        self.assertEqual(area_exchange_bound(self.s, self.p, 1), (1, 1))
        self.assertEqual(area_exchange_bound(self.s, self.p, -5), (1, 1))

    def test_zero_twist_rejected(self):
        with self.assertRaises(InvalidPartners):
            apply_twist(self.s, self.p, 0)

    def test_same_side_violated(self):
        bad = make_partner_triple(self.s, V(1, -1), DOWN, DOWN)
        self.assertFalse(same_side(self.s, bad, 1))
        with self.assertRaises(SameSideViolated):
            apply_twist(self.s, bad, 1)
        with self.assertRaises(SameSideViolated):
            apply_twist(self.s, bad, -1)

    def test_plan(self):
        plan = make_plan(self.s, self.p, 1)
        self.assertEqual(plan.k, 1)
        self.assertEqual(plan.w_new, V(F(1, 2), -4))
        self.assertEqual(plan.bounds, (1, 1))
        identity = make_plan(self.s, self.p, 0)
        self.assertEqual(identity.w_new, self.s.w)

    def test_rational_root_refused(self):
        with self.assertRaises(RationalDirection):
            select_irrational_twists(self.s, self.p)

    def test_twist_order(self):
        self.assertEqual(twist_order(3), [1, 2, 3, -1, -2, -3])
        self.assertEqual(len(twist_order()), 18)


class TestDemoTwists(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.s = demo_sqrt2()
        budget = SearchBudget(F(1, 100), 40, 10 ** 40, F(1, 36), combination_span=2)
        cls.p = search(cls.s, budget, require_good_partners=True)

    def test_twist_conserves_area(self):
        total = areas(self.s).total
        for k, twisted in select_irrational_twists(self.s, self.p):
            self.assertEqual(areas(twisted).total, total)
            bound1, bound2 = area_exchange_bound(self.s, self.p, k)
            self.assertTrue(abs(areas(twisted).a1 - areas(self.s).a1) <= bound1)
            self.assertTrue(abs(areas(twisted).a2 - areas(self.s).a2) <= bound2)

    def test_same_side_up_to_nine(self):
        for k in twist_order():
            self.assertTrue(same_side(self.s, self.p, k), msg=f'k={k}')

    def test_select_irrational_twists(self):
        selected = select_irrational_twists(self.s, self.p)
        ks = [k for k, _ in selected]
        self.assertTrue(any(k > 0 for k in ks))
        self.assertTrue(any(k < 0 for k in ks))
        self.assertEqual(ks, [k for k in twist_order() if k in ks])
        for k, twisted in selected:
            self.assertTrue(is_irrational(twisted))
            self.assertEqual(cross(twisted.w, twist_vector(self.s.w, self.p, k)), 0)

    def test_smallest_only(self):
        full = [k for k, _ in select_irrational_twists(self.s, self.p)]
        smallest = [k for k, _ in select_irrational_twists(self.s, self.p, smallest_only=True)]
        self.assertEqual(smallest, [min(k for k in full if k > 0), max(k for k in full if k < 0)])

    def test_broken_invariant_is_not_skipped(self):
        for code in ('AreaNotConserved', 'DegenerateLattice', 'CircumferenceNotPrimitive'):
            broken = ResultInvalid('twist broke', failures=[code])
            with mock.patch.object(twist_module, 'apply_twist', side_effect=broken):
                with self.assertRaises(GuaranteeViolated, msg=code):
                    select_irrational_twists(self.s, self.p)

    def test_periodic_closure_is_skipped(self):
        real = twist_module.apply_twist

        def closing_first(s, p, k):
            if k == 1:
                raise ResultInvalid('closes up', failures=['PeriodicClosure'])
            return real(s, p, k)

        with mock.patch.object(twist_module, 'apply_twist', side_effect=closing_first):
            ks = [k for k, _ in select_irrational_twists(self.s, self.p)]
        self.assertNotIn(1, ks)
        self.assertTrue(any(k > 0 for k in ks))

    def test_basis_completion_does_not_matter(self):
        sigma = self.p.orientation
        carry = self.p.v2 + 2 * self.p.vc
        u = complete_basis(self.s.lat1, self.p.v1, sigma)
        for k in (1, -1, 4, -9):
            expected = twist_lattice(self.s.lat1, self.p.v1, carry, k, sigma)
            for m in range(-3, 4):
                shifted = PlanarLattice(self.p.v1, u + m * self.p.v1 + k * carry)
                self.assertEqual(shifted, expected, msg=f'k={k}, m={m}')


class TestManyTwists(unittest.TestCase):
    """Twists of the demo and its first children under randomly drawn search budgets."""

    BUDGETS_PER_ROOT = 14

    @classmethod
    def setUpClass(cls):
        rng = random.Random(20240917)
        demo = demo_sqrt2()
        p = search(demo, SearchBudget(F(1, 100), 20, 10 ** 40, F(1, 36), combination_span=2))
        roots = [demo] + [child for _, child in select_irrational_twists(demo, p, smallest_only=True)]
        roots += [child for _, child in select_irrational_twists(demo, p)[1:3]]

        cls.runs = []
        for root in roots:
            for _ in range(cls.BUDGETS_PER_ROOT):
                budget = SearchBudget(F(1, rng.randint(50, 2000)), rng.randint(16, 28), 10 ** 40, F(1, 36),
                                      combination_span=rng.choice((2, 3)))
                try:
                    triple = search(root, budget)
                except BudgetExhausted:
                    continue
                cls.runs.append((root, budget, triple))

        cls.twists = {}
        for i, (root, _, triple) in enumerate(cls.runs):
            for k in twist_order():
                try:
                    cls.twists[i, k] = apply_twist(root, triple, k)
                except ResultInvalid as e:
                    cls.twists[i, k] = e

    def test_enough_runs(self):
        self.assertTrue(len(self.runs) >= 50, msg=f'{len(self.runs)} runs')

    def test_twists_conserve_area(self):
        checked = 0
        for (i, k), twisted in self.twists.items():
            root, budget, triple = self.runs[i]
            if isinstance(twisted, ResultInvalid):
                self.assertTrue(set(twisted.failures) <= REJECTION_CODES, msg=twisted.message)
                continue
            before, after = areas(root), areas(twisted)
            self.assertEqual(after.total, before.total)
            bound1, bound2 = area_exchange_bound(root, triple, k)
            self.assertTrue(sign(bound1 - abs(after.a1 - before.a1)) >= 0, msg=f'{budget}, k={k}')
            self.assertTrue(sign(bound2 - abs(after.a2 - before.a2)) >= 0, msg=f'{budget}, k={k}')
            checked += 1
        self.assertTrue(checked >= 500, msg=f'{checked} twists')

    def test_nine_twists_each_way(self):
        for i, (root, budget, triple) in enumerate(self.runs):
            self.assertTrue(good_partners(root, triple), msg=str(budget))
            for k in twist_order():
                self.assertTrue(same_side(root, triple, k), msg=f'{budget}, k={k}')
            irrational = [k for k in twist_order()
                          if not isinstance(self.twists[i, k], ResultInvalid) and is_irrational(self.twists[i, k])]
            self.assertTrue(any(k > 0 for k in irrational), msg=str(budget))
            self.assertTrue(any(k < 0 for k in irrational), msg=str(budget))


if __name__ == '__main__':
    unittest.main()
