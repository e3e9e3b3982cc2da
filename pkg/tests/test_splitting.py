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
# -

try:
    from fixsplit.library.splitting import *
    from fixsplit.library.numeric import sqrt_field
    from fixsplit.library.planar import PlanarLattice, PlanarVector
    from fixsplit.library.presets import demo_sqrt2
    from fixsplit.library.exceptions import InvalidSplitting
except ModuleNotFoundError:
    from library.splitting import *
    from library.numeric import sqrt_field
    from library.planar import PlanarLattice, PlanarVector
    from library.presets import demo_sqrt2
    from library.exceptions import InvalidSplitting


K = sqrt_field(2)
R2 = K.gen


def Q(x, y):
    return PlanarVector(K(x), K(y))


def with_cylinder(s, b1, b2, w, circumference=None):
    return FixSplitting(s.lat1, s.lat2, CylinderClass(PlanarLattice(b1, b2), circumference or w), w)


def rational_splitting():
    """Two unit square tori and a cylinder of area 1/2 with horizontal w = (1/2, 0)."""
    F = Fraction
    z2 = PlanarLattice(PlanarVector(F(1), F(0)), PlanarVector(F(0), F(1)))
    w = PlanarVector(F(1, 2), F(0))
    cyl = CylinderClass(PlanarLattice(w, PlanarVector(F(0), F(1))), w)
    return FixSplitting(z2, z2, cyl, w)


class TestValidate(unittest.TestCase):

    def setUp(self):
        self.demo = demo_sqrt2()

    def test_demo_is_valid(self):
        report = validate(self.demo)
        self.assertTrue(report.valid, msg=report.codes)
        self.assertTrue(all(report.checks.values()))
        self.assertTrue(self.demo.report.valid)

    def test_rational_splitting_is_valid(self):
        self.assertTrue(validate(rational_splitting()).valid)

    def test_circumference_not_in_lattice(self):
        s = with_cylinder(self.demo, Q(0, 2), Q(Fraction(1, 2), Fraction(1, 3)), Q(0, 1))
        self.assertEqual(validate(s).codes, ['CircumferenceNotInLattice'])

    def test_circumference_not_primitive(self):
        s = with_cylinder(self.demo, Q(0, 1), Q(Fraction(1, 2), Fraction(1, 3)), Q(0, 2))
        self.assertEqual(validate(s).codes, ['CircumferenceNotPrimitive'])

    def test_zero_splitting_vector(self):
        s = FixSplitting(self.demo.lat1, self.demo.lat2, CylinderClass(self.demo.cyl.lattice, Q(0, 0)), Q(0, 0))
        self.assertIn('ZeroSplittingVector', validate(s).codes)

    def test_circumference_mismatch(self):
        s = with_cylinder(self.demo, Q(0, 1), Q(Fraction(1, 2), Fraction(1, 3)), Q(0, -1), circumference=Q(0, 1))
        self.assertEqual(validate(s).codes, ['CircumferenceMismatch'])

    def test_periodic_closure(self):
        F = Fraction
        z2 = PlanarLattice(PlanarVector(F(1), F(0)), PlanarVector(F(0), F(1)))
        w = PlanarVector(F(1), F(0))
        s = FixSplitting(z2, z2, CylinderClass(PlanarLattice(w, PlanarVector(F(0), F(1, 2))), w), w)
        report = validate(s)
        self.assertEqual(report.codes, ['PeriodicClosure', 'PeriodicClosure'])
        self.assertFalse(report.checks['PeriodicClosure.T1'])
        self.assertFalse(report.checks['PeriodicClosure.T2'])

    def test_floats_mixed_with_field_elements(self):
        w = PlanarVector(0.0, 1.0)
        s = FixSplitting(self.demo.lat1, self.demo.lat2, CylinderClass(self.demo.cyl.lattice, w), w)
        self.assertEqual(validate(s).codes, ['FieldMismatch'])

    def test_report_json(self):
        data = validate(rational_splitting()).to_json()
        self.assertTrue(data['valid'])
        self.assertEqual(data['violations'], [])
        self.assertEqual(list(data['checks']), sorted(data['checks']))


class TestIrrationality(unittest.TestCase):

    def test_demo_is_irrational(self):
        self.assertTrue(is_irrational(demo_sqrt2()))

    def test_rational_direction(self):
        self.assertFalse(is_irrational(rational_splitting()))

    def test_invalid_splitting_raises(self):
        demo = demo_sqrt2()
        s = with_cylinder(demo, Q(0, 2), Q(Fraction(1, 2), Fraction(1, 3)), Q(0, 1))
        with self.assertRaises(InvalidSplitting) as cm:
            is_irrational(s)
        self.assertEqual(cm.exception.report.codes, ['CircumferenceNotInLattice'])


class TestAreas(unittest.TestCase):

    def test_demo_areas(self):
        a1, a2, ac, total = areas(demo_sqrt2())
        self.assertEqual(a1, 1)
        self.assertEqual(a2, 1)
        self.assertEqual(ac, Fraction(1, 2))
        self.assertEqual(total, 3)

    def test_rational_areas(self):
        self.assertEqual(areas(rational_splitting()).total, 3)

    def test_scaling_multiplies_areas(self):
        scaled = demo_sqrt2().scaled(2)
        self.assertTrue(validate(scaled).valid)
        self.assertEqual(areas(scaled).total, 12)

    def test_orientation_flip(self):
        demo = demo_sqrt2()
        flipped = demo.with_orientation(-1)
        self.assertEqual(flipped.w, Q(0, -1))
        self.assertEqual(flipped.cyl.circumference, Q(0, -1))
        self.assertTrue(validate(flipped).valid)
        self.assertIs(demo.with_orientation(1), demo)


class TestMode(unittest.TestCase):

    def test_exact_mode_of_demo(self):
        mode = demo_sqrt2().mode
        self.assertTrue(mode.is_exact)
        self.assertEqual(mode.field, K)

    def test_float_mode(self):
        self.assertEqual(mode_of(0.5, 1.0).kind, 'float')


if __name__ == '__main__':
    unittest.main()
