"""
Unit tests for residual points, residual cosets and formal degrees
"""
import unittest
import os
import sys
import itertools
from fractions import Fraction
from pathlib import Path

# Add src to path
sys.path.append(str(Path(__file__).parent.parent / "src"))

from core.config import Limits
from core.errors import BoundExceeded
from exactscalars.normalizing import NormalizingElement, expand
from mu.function import build_mu
from residual.central import central_character_image, check_disjointness
from residual.enumerate import enumerate_residual_cosets, enumerate_residual_points
from residual.formal_degree import formal_degree, formal_degree_of
from rootdata.datum import build_root_datum
from rootdata.parameters import ParameterFunction, affine_nodes, node_class
from torus.coset import Coset
from torus.point import TorusPoint

SMALL = Limits(tempered_samples=64)
SLOW = os.getenv("RESIDUA_SLOW", "1") != "0"


class TestResidualPoints(unittest.TestCase):

    def setUp(self):
        """Set up test case"""
        self.a1 = build_root_datum("A1", "Q")

    def test_a1_equal_labels(self):
        """One orbit {v^2, v^-2} of size 2"""
        orbits = enumerate_residual_points(self.a1, ParameterFunction.uniform(self.a1, 1))
        self.assertEqual(len(orbits), 1)
        self.assertEqual(orbits[0].size, 2)
        self.assertEqual(orbits[0].representative, TorusPoint.of([0], [-2]))

    def test_a1_zero_labels(self):
        """m = 0 has no residual points"""
        self.assertEqual(enumerate_residual_points(self.a1, ParameterFunction.uniform(self.a1, 0)), [])

    def test_a1_unequal_labels(self):
        """s1 = 2, s0 = 1 gives alpha = v^-3 and alpha = -v^-1"""
        m = ParameterFunction.from_labels(self.a1, {"s0": 1, "s1": 2})
        representatives = {o.representative for o in enumerate_residual_points(self.a1, m)}
        self.assertEqual(representatives, {TorusPoint.of([0], [-3]), TorusPoint.of([Fraction(1, 2)], [-1])})

    def test_rank_zero(self):
        """A rank 0 datum has the single point of the trivial torus"""
        a2 = build_root_datum("A2")
        restriction = a2.parabolic_restriction([])
        orbits = enumerate_residual_points(restriction.sub, ParameterFunction(restriction.sub, [], []))
        self.assertEqual(len(orbits), 1)

    def test_rank_bound(self):
        """Enumeration refuses ranks beyond the configured bound"""
        b2 = build_root_datum("B2")
        with self.assertRaises(BoundExceeded):
            enumerate_residual_points(b2, ParameterFunction.uniform(b2, 1), Limits(rank_bound=1))

    def test_pole_count_is_exact(self):
        """Every residual point of B2 has exactly rank more poles than zeros"""
        b2 = build_root_datum("B2", "Q")
        catalog = enumerate_residual_cosets(b2, ParameterFunction.uniform(b2, 1))
        self.assertTrue(catalog.points())
        for entry in catalog.entries:
            self.assertEqual(entry.report.lhs, entry.report.codim)


class TestFormalDegree(unittest.TestCase):

    def setUp(self):
        """Set up test case"""
        self.a1 = build_root_datum("A1", "Q")
        self.m = ParameterFunction.uniform(self.a1, 1)

    def test_a1_certificate(self):
        """fdeg = -(v - v^-1)/(v + v^-1), order 1, |fdeg(2)| = 3/5"""
        fd = formal_degree(self.a1, self.m, None, TorusPoint.of([0], [2]))
        self.assertEqual(fd.certificate, NormalizingElement.of(1, 1, {2: -1}))
        self.assertEqual(fd.certificate.render(), "(v-v^-1) * [2]^-1")
        self.assertEqual(fd.order, 1)
        self.assertEqual(abs(fd.at(Fraction(2))), Fraction(3, 5))
        self.assertEqual(fd.at(Fraction(2)), fd.sign * Fraction(3, 5))

    def test_orbit_invariance(self):
        """W0-conjugate points have the same formal degree"""
        mu = build_mu(self.a1, self.m)
        self.assertEqual(formal_degree_of(mu, TorusPoint.of([0], [2])).value,
                         formal_degree_of(mu, TorusPoint.of([0], [-2])).value)

    def test_normalization_shifts_the_order(self):
        """d in M_k raises the vanishing order by k"""
        d = NormalizingElement.of(2, 1, {})
        fd = formal_degree(self.a1, self.m, d, TorusPoint.of([0], [2]))
        self.assertEqual(fd.order, 2)
        self.assertEqual(fd.certificate.constant, 2)

    def test_g2_labels_of_mixed_parity(self):
        """Short label 1, long label 2: the point is odd in v and certified at v -> v^(1/2)"""
        g2 = build_root_datum("G2", "Q")
        mu = build_mu(g2, ParameterFunction.from_labels(g2, {"s1": 1, "s0": 1, "s2": 2}))
        for point in (TorusPoint.of([0, 0], [-3, 4]), TorusPoint.of([0, Fraction(1, 2)], [-2, 1])):
            fd = formal_degree_of(mu, point)
            self.assertTrue(fd.half_variable)
            self.assertIsNone(fd.symmetry["negative"])
            self.assertIsNotNone(fd.symmetry["inverse"])
            self.assertEqual(fd.order, 2)
            self.assertEqual((fd.value.substitute_square() / expand(fd.certificate)).constant_value(), fd.sign)
            self.assertEqual(fd.at(Fraction(4)), fd.sign * expand(fd.certificate).evaluate(Fraction(2)))
            self.assertTrue(fd.render().endswith("at v -> v^(1/2)"))

    def test_g2_equal_labels_stay_in_v(self):
        """With equal labels every G2 degree is certified in v"""
        g2 = build_root_datum("G2", "Q")
        m = ParameterFunction.uniform(g2, 1)
        mu = build_mu(g2, m)
        for orbit in enumerate_residual_points(g2, m):
            fd = formal_degree_of(mu, orbit.representative)
            self.assertFalse(fd.half_variable)
            self.assertIsNotNone(fd.symmetry["negative"])

    def test_to_dict(self):
        """The report carries the rendered certificate"""
        fd = formal_degree(self.a1, self.m, None, TorusPoint.of([0], [2]))
        self.assertEqual(fd.to_dict()["rendered"], fd.render())
        self.assertEqual(fd.to_dict()["order"], 1)
        self.assertFalse(fd.to_dict()["half_variable"])


class TestLabelSuite(unittest.TestCase):
    """Every rank <= 3 type with X = Q and labels in {1, 2}"""

    TYPES = ("A1", "A2", "B2", "C2", "G2", "A3", "B3", "C3")

    @staticmethod
    def label_assignments(datum):
        groups = {}
        for node in affine_nodes(datum):
            groups.setdefault(node_class(datum, node), []).append(node.name)
        classes = list(groups.values())
        for values in itertools.product((1, 2), repeat=len(classes)):
            yield {name: value for names, value in zip(classes, values) for name in names}

    @unittest.skipUnless(SLOW, "exhaustive suite")
    def test_residual_cosets_and_degrees(self):
        """Pole count equals codimension, degrees lie in +-M of order rank with both symmetries"""
        odd = []
        for name in self.TYPES:
            datum = build_root_datum(name, "Q")
            for labels in self.label_assignments(datum):
                m = ParameterFunction.from_labels(datum, labels)
                catalog = enumerate_residual_cosets(datum, m)
                with self.subTest(type=name, labels=labels):
                    self.assertTrue(catalog.points())
                    for entry in catalog.entries:
                        self.assertEqual(entry.report.lhs, entry.report.codim)
                    for entry in catalog.points():
                        fd = formal_degree_of(catalog.mu, entry.coset.base)
                        self.assertEqual(fd.order, datum.rank)
                        for v0 in (Fraction(3, 2), Fraction(2)):
                            self.assertEqual(abs(fd.at(1 / v0)), abs(fd.at(v0)))
                        if fd.half_variable:
                            odd.append((name, tuple(sorted(labels.items())), entry.coset.base))
                        else:
                            self.assertIsNotNone(fd.symmetry["negative"])
                            self.assertEqual((fd.value / expand(fd.certificate)).constant_value(), fd.sign)
        # only G2 with short and long labels of different parity leaves v
        self.assertTrue(odd)
        for name, labels, _ in odd:
            self.assertEqual(name, "G2")
            values = dict(labels)
            self.assertNotEqual(values["s1"] % 2, values["s2"] % 2)
        mixed = [point for _, labels, point in odd if dict(labels)["s1"] == 1]
        self.assertEqual(len(mixed), 2)


class TestResidualCosets(unittest.TestCase):

    def setUp(self):
        """Set up test case"""
        self.a1 = build_root_datum("A1", "Q")
        self.catalog = enumerate_residual_cosets(self.a1, ParameterFunction.uniform(self.a1, 1))

    def test_a1_catalog(self):
        """T itself and the orbit of v^2"""
        self.assertEqual(len(self.catalog.entries), 2)
        self.assertEqual([e.coset.dim for e in self.catalog.entries], [1, 0])
        self.assertEqual(self.catalog.entries[1].orbit_size, 2)
        self.assertTrue(self.catalog.render().startswith("residual cosets of A1 (Q) with s0 = 1, s1 = 1: 2 orbits"))

    def test_find(self):
        """Lookup by any member of an orbit"""
        entry = self.catalog.find(Coset.point(TorusPoint.of([0], [2])))
        self.assertIsNotNone(entry)
        self.assertEqual(entry.coset.dim, 0)
        self.assertIsNone(self.catalog.find(Coset.point(TorusPoint.of([0], [1]))))

    def test_orbits_are_distinct(self):
        """Catalog entries have pairwise different orbit keys"""
        b2 = build_root_datum("B2", "P")
        catalog = enumerate_residual_cosets(b2, ParameterFunction.uniform(b2, 1))
        keys = [e.orbit_key for e in catalog.entries]
        self.assertEqual(len(keys), len(set(keys)))
        self.assertEqual(catalog.entries[0].coset.dim, 2)

    def test_central_characters(self):
        """One component per orbit, the point of A1 has trivial K_L"""
        components = central_character_image(self.catalog)
        self.assertEqual(len(components), 2)
        self.assertEqual(len(components[1].groups.k_l), 1)
        self.assertEqual(len(components[0].groups.normalizer), 2)

    def test_disjointness(self):
        """Tempered forms of distinct orbits stay apart"""
        self.assertTrue(check_disjointness(self.catalog, 2.0, SMALL))

    @unittest.skipUnless(SLOW, "exhaustive suite")
    def test_disjointness_rank_two(self):
        """B2 and C2 with equal labels stay apart at the default sample count"""
        limits = Limits()
        self.assertEqual(limits.tempered_samples, 10000)
        for type_expr in ("B2", "C2"):
            with self.subTest(type=type_expr):
                datum = build_root_datum(type_expr, "Q")
                catalog = enumerate_residual_cosets(datum, ParameterFunction.uniform(datum, 1), None, limits)
                self.assertGreater(len(catalog.entries), 2)
                self.assertTrue(check_disjointness(catalog, 2.0, limits))


if __name__ == '__main__':
    unittest.main()
