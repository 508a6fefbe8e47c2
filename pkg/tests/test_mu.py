"""
Unit tests for mu-functions, regularization, splitting and the pole oracle
"""
import unittest
import os
import sys
from fractions import Fraction
from math import lcm
from pathlib import Path

# Add src to path
sys.path.append(str(Path(__file__).parent.parent / "src"))

from core.config import Limits
from core.errors import ValidationError
from exactscalars.laurent import LaurentPoly, RationalFunctionV
from exactscalars.normalizing import NormalizingElement, q_integer
from mu.function import build_mu, pole_zero_sets, regularize
from mu.oracle import gamma_grid, pole_oracle, specialization_counts, torsion_grid
from mu.split import density_sign, is_weyl_invariant, split_mu
from residual.enumerate import enumerate_residual_cosets, enumerate_residual_points
from rootdata.datum import build_root_datum
from rootdata.parameters import ParameterFunction
from torus.coset import Coset
from torus.point import TorusPoint

SMALL = Limits(tempered_samples=64)
SLOW = os.getenv("RESIDUA_SLOW", "1") != "0"


class TestMuFunction(unittest.TestCase):

    def setUp(self):
        """Set up test case"""
        self.a1 = build_root_datum("A1", "Q")
        self.mu = build_mu(self.a1, ParameterFunction.uniform(self.a1, 1))

    def test_ledger(self):
        """Four factors per root and the v^(-2 m_W(w0)) prefactor"""
        self.assertEqual(len(self.mu.ledger), 4 * len(self.a1.roots))
        self.assertEqual(self.mu.prefactor, -2)
        self.assertIn("v^-2", self.mu.render())
        self.assertEqual(self.mu.to_dict()["d"], NormalizingElement.of().to_dict())

    def test_symmetry(self):
        """mu is W0-invariant and its ledger is stable under alpha -> -alpha"""
        self.assertTrue(self.mu.is_symmetric())
        self.assertTrue(is_weyl_invariant(self.mu))
        b2 = build_root_datum("B2", "Q")
        self.assertTrue(is_weyl_invariant(build_mu(b2, ParameterFunction.from_labels(b2, {"s0": 2, "s1": 1, "s2": 3}))))

    def test_pole_zero_sets(self):
        """alpha = v^2 is a simple pole, t = 1 a double zero"""
        report = pole_zero_sets(self.mu, Coset.point(TorusPoint.of([0], [2])))
        self.assertEqual(len(report.p_plus), 1)
        self.assertEqual(report.lhs, 1)
        self.assertTrue(report.residual)
        identity = pole_zero_sets(self.mu, Coset.point(TorusPoint.identity(1)))
        self.assertEqual(len(identity.z_plus), 2)
        self.assertFalse(identity.residual)

    def test_minus_one_is_not_residual(self):
        """At alpha = -1 the poles of c and c^w0 cancel against the zeros"""
        report = pole_zero_sets(self.mu, Coset.point(TorusPoint.of([Fraction(1, 2)], [0])))
        self.assertEqual(report.lhs, 0)
        self.assertFalse(report.residual)


class TestRegularization(unittest.TestCase):

    def setUp(self):
        """Set up test case"""
        self.a1 = build_root_datum("A1", "Q")
        self.mu = build_mu(self.a1, ParameterFunction.uniform(self.a1, 1))

    def test_residual_point_value(self):
        """mu^({r}) at alpha(r) = v^2 is -(v - v^-1)/(v + v^-1)"""
        regularized = regularize(self.mu, Coset.point(TorusPoint.of([0], [2])))
        self.assertTrue(regularized.is_point)
        expected = RationalFunctionV(LaurentPoly({1: -1, -1: 1}), q_integer(2))
        self.assertEqual(regularized.value(), expected)

    def test_non_residual_rejected(self):
        """Regularization needs a residual coset"""
        with self.assertRaises(ValidationError):
            regularize(self.mu, Coset.point(TorusPoint.identity(1)))

    def test_whole_torus(self):
        """On T nothing is removed and the density is a function"""
        regularized = regularize(self.mu, Coset.whole_torus(1))
        self.assertFalse(regularized.is_point)
        self.assertEqual(regularized.report.excluded(), frozenset())
        with self.assertRaises(ValidationError):
            regularized.value()

    def test_density_sign_on_t(self):
        """mu is real and positive on the unitary torus"""
        sign, imaginary, invariance = density_sign(self.mu, Coset.whole_torus(1), 2.0, 32, SMALL)
        self.assertEqual(sign, 1)
        self.assertLess(imaginary, 1e-9)
        self.assertLess(invariance, 1e-9)


class TestSplitting(unittest.TestCase):

    def test_b2_catalog_splits(self):
        """mu^(L) factors over the parabolic sub-datum for every residual coset of B2"""
        b2 = build_root_datum("B2", "Q")
        catalog = enumerate_residual_cosets(b2, ParameterFunction.uniform(b2, 1))
        for entry in catalog.entries:
            split = split_mu(catalog.mu, entry.coset)
            self.assertTrue(split.point_part.is_point)
            self.assertEqual(split.coset.dim, entry.coset.dim)
            self.assertEqual(len(split.subset), b2.rank - entry.coset.dim)


class TestPoleOracle(unittest.TestCase):

    def test_torsion_grid(self):
        """Points of order at most 2 in (Q/Z)^2"""
        self.assertEqual(len(torsion_grid(2, 2)), 4)
        self.assertEqual(len(torsion_grid(1, 3)), 4)

    def test_gamma_grid(self):
        """A2 with X = Q reaches the W0-images of the principal point"""
        a2 = build_root_datum("A2", "Q")
        radius, denominator = gamma_grid(build_mu(a2, ParameterFunction.uniform(a2, 1)))
        self.assertGreaterEqual(radius, 4)
        self.assertEqual(denominator % 2, 0)
        g2 = build_root_datum("G2", "Q")
        radius, _ = gamma_grid(build_mu(g2, ParameterFunction.from_labels(g2, {"s0": 1, "s1": 1, "s2": 2})))
        self.assertGreaterEqual(radius, 4)

    @unittest.skipUnless(SLOW, "exhaustive suite")
    def test_oracle_agrees_with_enumeration(self):
        """Grid scan at v0 = 2 and exact enumeration find the same points in rank <= 2"""
        cases = [
            ("A1", "Q", {"s0": 1, "s1": 1}),
            ("A1", "Q", {"s0": 1, "s1": 2}),
            ("A1", "P", {"s0": 1, "s1": 1}),
            ("A2", "Q", {"s0": 1, "s1": 1, "s2": 1}),
            ("B2", "Q", {"s0": 1, "s1": 1, "s2": 1}),
            ("C2", "Q", {"s0": 1, "s1": 1, "s2": 1}),
            ("G2", "Q", {"s0": 1, "s1": 1, "s2": 1}),
            ("G2", "Q", {"s0": 1, "s1": 1, "s2": 2}),
        ]
        order = Limits().oracle_torsion_order
        for type_expr, lattice, labels in cases:
            datum = build_root_datum(type_expr, lattice)
            m = ParameterFunction.from_labels(datum, labels)
            with self.subTest(datum=datum.name, labels=labels):
                exact = {p.key for orbit in enumerate_residual_points(datum, m) for p in orbit.points
                         if lcm(*(t.denominator for t in p.torsion)) <= order}
                found = {p.key for p in pole_oracle(build_mu(datum, m), 2.0)}
                self.assertTrue(exact)
                self.assertEqual(found, exact)

    def test_specialization_stability(self):
        """The orbit count of A1 does not depend on the generic v0"""
        a1 = build_root_datum("A1", "Q")
        mu = build_mu(a1, ParameterFunction.uniform(a1, 1))
        self.assertEqual(set(specialization_counts(mu, [1.5, 2.0, 3.0]).values()), {1})
        with self.assertRaises(ValueError):
            specialization_counts(mu, [1.0])


if __name__ == '__main__':
    unittest.main()
