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
import unittest
from fractions import Fraction
from unittest import mock
# -

try:
    import fixsplit.library.partners as partners_module
    from fixsplit.library.partners import *
    from fixsplit.library.numeric import sign, sqrt_field
    from fixsplit.library.planar import PlanarLattice, PlanarVector, cross, dot
    from fixsplit.library.presets import demo_sqrt2
    from fixsplit.library.splitting import CylinderClass, FixSplitting
    from fixsplit.library.twist import PartnerTriple, check_partner_triple, good_partners
    from fixsplit.library.exceptions import BudgetExhausted, ConfigurationError, RationalDirection
except ModuleNotFoundError:
    import library.partners as partners_module
    from library.partners import *
    from library.numeric import sign, sqrt_field
    from library.planar import PlanarLattice, PlanarVector, cross, dot
    from library.presets import demo_sqrt2
    from library.splitting import CylinderClass, FixSplitting
    from library.twist import PartnerTriple, check_partner_triple, good_partners
    from library.exceptions import BudgetExhausted, ConfigurationError, RationalDirection


F = Fraction


def budget(span=2, **kwargs):
    values = dict(eps_prime=F(1, 100), max_convergents=40, max_circumference_shift=10 ** 40,
                  eps_ratio=F(1, 36), combination_span=span)
    values.update(kwargs)
    return SearchBudget(**values)


class TestSearchBudget(unittest.TestCase):

    def test_rationals_from_strings(self):
        b = SearchBudget('1/100', 10, 5)
        self.assertEqual(b.eps_prime, F(1, 100))
        self.assertEqual(b.ratio, F(1, 100))

    def test_invalid_limits(self):
        with self.assertRaises(ConfigurationError):
            SearchBudget(0, 10, 5)
        with self.assertRaises(ConfigurationError):
            SearchBudget('1/10', -1, 5)
        with self.assertRaises(ConfigurationError):
            SearchBudget('1/10', 10, 5, combination_span=0)

    def test_doubled(self):
        b = budget(span=3).doubled()
        self.assertEqual(b.max_convergents, 80)
        self.assertEqual(b.combination_span, 4)
        self.assertEqual(SearchBudget('1/10', 0, 0).doubled().max_convergents, 1)

    def test_to_json(self):
        data = budget().to_json()
        self.assertEqual(data['eps_prime'], '1/100')
        self.assertEqual(data['eps_ratio'], '1/36')


class TestCylinderPartner(unittest.TestCase):

    def setUp(self):
        K = sqrt_field(2)
        self.w = PlanarVector(K(0), K(1))
        s = demo_sqrt2()
        # cylinder of area 1/3 with transversal (1/3, 0)
        cyl = CylinderClass(PlanarLattice(self.w, PlanarVector(K(F(1, 3)), K(0))), self.w)
        self.s = FixSplitting(s.lat1, s.lat2, cyl, self.w)

    def test_transversal(self):
        t = transversal(self.s)
        self.assertEqual(cross(t, self.w), self.s.cyl.area)
        self.assertTrue(2 * abs(dot(t, self.w)) <= self.w.norm2())

    def test_choose_vc_largest_shift(self):
        vc = choose_vc(self.s, budget(max_circumference_shift=100))
        self.assertEqual(vc, PlanarVector(F(1, 3), 100))

    def test_choose_vc_toward(self):
        toward = PlanarVector(F(1, 3), F(10, 3))
        vc = choose_vc(self.s, budget(max_circumference_shift=100), toward=toward)
        self.assertEqual(vc, PlanarVector(F(1, 3), 3))

    def test_no_admissible_shift(self):
        with self.assertRaises(BudgetExhausted):
            choose_vc(self.s, budget(max_circumference_shift=0))


class TestSearch(unittest.TestCase):

    def setUp(self):
        self.s = demo_sqrt2()

    def test_demo_certificate(self):
        p = search(self.s, budget(), require_good_partners=True)
        check_partner_triple(self.s, p)
        self.assertTrue(good_partners(self.s, p))
        checks = certificate_checks(self.s, p, F(1, 100), F(1, 36))
        self.assertTrue(all(checks.values()), msg=checks)
        self.assertEqual(cross(p.vc, self.s.w), F(1, 2))
        for v in p.vectors():
            self.assertEqual(sign(cross(v, self.s.w)), 1)

    def test_convergents_alone_never_certify_the_demo(self):
        # every convergent leaves the same residue 1/(4 sqrt 2) mod 1 against the transversal
        with self.assertRaises(BudgetExhausted) as cm:
            search(self.s, budget(span=1))
        self.assertTrue(cm.exception.hint)

    def test_larger_budgets_never_worsen_the_maximum(self):
        def worst(p):
            return max(cross(p.v1, self.s.w), cross(p.v2, self.s.w))

        previous = None
        for n, span in ((20, 2), (30, 2), (30, 3), (40, 3), (60, 4)):
            p = search(self.s, budget(span=span, max_convergents=n))
            if previous is not None:
                self.assertTrue(worst(p) <= previous, msg=f'{n} convergents, span {span}')
            previous = worst(p)

    def test_smallest_maximum_wins(self):
        b = budget(max_convergents=20)
        p = search(self.s, b)
        t = transversal(self.s)
        pool1 = candidate_pool(self.s.lat1, self.s, b, t)
        pool2 = candidate_pool(self.s.lat2, self.s, b, t)
        passing = []
        for a in pool1:
            for c in pool2:
                # a common shift is necessary for both cylinder inequalities
                if max(a.shifts[0], c.shifts[0]) > min(a.shifts[1], c.shifts[1]):
                    continue
                vc = choose_vc(self.s, b, toward=a.vector + c.vector)
                triple = PartnerTriple(a.vector, c.vector, vc, 1)
                if all(certificate_checks(self.s, triple, b.eps_prime, b.ratio).values()):
                    passing.append(max(a.w_cross, c.w_cross))
        self.assertTrue(passing)
        self.assertEqual(max(cross(p.v1, self.s.w), cross(p.v2, self.s.w)), min(passing))

    def test_cylinder_partner_comes_from_choose_vc(self):
        returned = []

        def recording(*args, **kwargs):
            vc = choose_vc(*args, **kwargs)
            returned.append(vc)
            return vc

        with mock.patch.object(partners_module, 'choose_vc', side_effect=recording):
            p = search(self.s, budget())
        self.assertIn(p.vc, returned)

    def test_wider_span_still_succeeds(self):
        p = search(self.s, budget(span=4), require_good_partners=True)
        self.assertTrue(all(certificate_checks(self.s, p, F(1, 100), F(1, 36)).values()))

    def test_deterministic(self):
        self.assertEqual(search(self.s, budget()), search(self.s, budget()))

    def test_zero_convergents(self):
        with self.assertRaises(BudgetExhausted):
            search(self.s, budget(max_convergents=0))

    def test_good_partners_need_small_ratio(self):
        with self.assertRaises(ConfigurationError):
            search(self.s, budget(eps_ratio=F(1, 10)), require_good_partners=True)

    def test_rational_direction(self):
        z2 = PlanarLattice(PlanarVector(F(1), F(0)), PlanarVector(F(0), F(1)))
        w = PlanarVector(F(1, 2), F(0))
        s = FixSplitting(z2, z2, CylinderClass(PlanarLattice(w, PlanarVector(F(0), F(1))), w), w)
        with self.assertRaises(RationalDirection):
            search(s, budget())

    def test_candidate_pool_bounds(self):
        t = transversal(self.s)
        pool = candidate_pool(self.s.lat1, self.s, budget(), t)
        self.assertTrue(pool)
        for cand in pool:
            self.assertTrue(0 < cand.w_cross < F(1, 100))
            lo, hi = cand.shifts
            self.assertLessEqual(lo, hi)
        self.assertEqual([c.level for c in pool], sorted(c.level for c in pool))


if __name__ == '__main__':
    unittest.main()
