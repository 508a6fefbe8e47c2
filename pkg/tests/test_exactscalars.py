"""
Unit tests for the exact scalar layer
"""
import unittest
import sys
from fractions import Fraction
from pathlib import Path

from hypothesis import given, settings, strategies as st

# Add src to path
sys.path.append(str(Path(__file__).parent.parent / "src"))

from core.errors import CertificationError
from exactscalars.cyclotomic import Cyclotomic
from exactscalars.factored import FactoredFunction
from exactscalars.laurent import LaurentPoly, RationalFunctionV, eval_at, parse_rational_function
from exactscalars.normalizing import NormalizingElement, expand, factor_into_M, parity, q_integer


def rf(num, den=None):
    return RationalFunctionV(LaurentPoly(num), LaurentPoly(den) if den is not None else None)


small_ints = st.integers(min_value=-4, max_value=4)
laurent_terms = st.dictionaries(st.integers(min_value=-3, max_value=3), small_ints, max_size=4)
normalizing = st.builds(
    NormalizingElement.of,
    st.fractions(min_value=Fraction(1, 8), max_value=8, max_denominator=8),
    st.integers(min_value=-2, max_value=2),
    st.dictionaries(st.integers(min_value=2, max_value=5), st.integers(min_value=-2, max_value=2), max_size=3),
)


class TestCyclotomic(unittest.TestCase):

    def setUp(self):
        """Set up test case"""
        self.i = Cyclotomic.root_of_unity(Fraction(1, 4))
        self.z3 = Cyclotomic.root_of_unity(Fraction(1, 3))

    def test_roots_of_unity(self):
        """Powers of a primitive root close up"""
        self.assertEqual(self.i ** 4, 1)
        self.assertEqual(self.i ** 2, -1)
        self.assertTrue((self.z3 ** 2 + self.z3 + 1).is_zero())

    def test_inverse(self):
        """Nonzero elements are invertible"""
        x = self.i + 2
        self.assertEqual(x * x.inverse(), 1)
        self.assertEqual(self.z3 * self.z3.inverse(), 1)

    def test_mixed_conductors(self):
        """Sums over different conductors are aligned"""
        sixth = Cyclotomic.root_of_unity(Fraction(1, 6))
        self.assertEqual(sixth ** 2, self.z3)
        self.assertEqual(-self.z3 ** 2, sixth)

    def test_complex_embedding(self):
        """The complex value of i"""
        self.assertAlmostEqual(self.i.to_complex(), 1j)

    def test_galois(self):
        """Galois automorphisms permute roots of unity"""
        zeta = Cyclotomic.root_of_unity(Fraction(1, 5))
        self.assertEqual(zeta.galois(2), Cyclotomic.root_of_unity(Fraction(2, 5)))

    @given(st.lists(small_ints, min_size=4, max_size=4), st.lists(small_ints, min_size=4, max_size=4),
           st.lists(small_ints, min_size=4, max_size=4))
    @settings(max_examples=40, deadline=None)
    def test_ring_axioms(self, a, b, c):
        """Commutativity and distributivity in Q(zeta_12)"""
        x, y, z = Cyclotomic(12, a), Cyclotomic(12, b), Cyclotomic(12, c)
        self.assertEqual(x * y, y * x)
        self.assertEqual(x * (y + z), x * y + x * z)


class TestLaurent(unittest.TestCase):

    def setUp(self):
        """Set up test case"""
        self.v_minus = LaurentPoly({1: 1, -1: -1})

    def test_q_integer(self):
        """[2] = v + v^-1 and [3] = v^2 + 1 + v^-2"""
        self.assertEqual(q_integer(2), LaurentPoly({1: 1, -1: 1}))
        self.assertEqual(q_integer(3), LaurentPoly({2: 1, 0: 1, -2: 1}))

    def test_cancellation(self):
        """(v^2 - v^-2) / (v - v^-1) reduces to v + v^-1"""
        f = rf({2: 1, -2: -1}, {1: 1, -1: -1})
        self.assertEqual(f, RationalFunctionV(q_integer(2)))

    def test_vanishing_order(self):
        """(v - v^-1)^2 / [2] vanishes to order 2 at v = 1"""
        f = RationalFunctionV(self.v_minus ** 2, q_integer(2))
        self.assertEqual(f.vanishing_order_at_one(), 2)

    def test_exact_evaluation(self):
        """(v - v^-1)/(v + v^-1) at v = 2 is 3/5"""
        f = RationalFunctionV(self.v_minus, q_integer(2))
        self.assertEqual(eval_at(f, Fraction(2)), Fraction(3, 5))

    def test_render_parse(self):
        """The canonical rendering parses back"""
        for f in (RationalFunctionV(self.v_minus, q_integer(2)), rf({3: 2, 0: -1}), rf({-2: 1}, {1: 1, 0: 3})):
            self.assertEqual(parse_rational_function(f.render()), f)

    @given(laurent_terms, laurent_terms, laurent_terms)
    @settings(max_examples=40, deadline=None)
    def test_polynomial_ring(self, a, b, c):
        """Associativity and distributivity of Laurent polynomials"""
        x, y, z = LaurentPoly(a), LaurentPoly(b), LaurentPoly(c)
        self.assertEqual((x * y) * z, x * (y * z))
        self.assertEqual(x * (y + z), x * y + x * z)

    @given(laurent_terms)
    @settings(max_examples=40, deadline=None)
    def test_inverse_substitution_is_involutive(self, a):
        """v -> 1/v applied twice is the identity"""
        x = LaurentPoly(a)
        self.assertEqual(x.substitute_inverse().substitute_inverse(), x)


class TestNormalizing(unittest.TestCase):

    def test_a1_formal_degree_certificate(self):
        """(v - v^-1)/(v + v^-1) is (v-v^-1) * [2]^-1 with sign +"""
        f = RationalFunctionV(LaurentPoly({1: 1, -1: -1}), q_integer(2))
        d, sign = factor_into_M(f)
        self.assertEqual(d, NormalizingElement.of(1, 1, {2: -1}))
        self.assertEqual(sign, 1)
        self.assertEqual(d.order, 1)
        self.assertEqual(d.render(), "(v-v^-1) * [2]^-1")

    def test_sign(self):
        """A negative multiple is certified with sign -1"""
        d, sign = factor_into_M(rf({1: -3, -1: 3}))
        self.assertEqual(sign, -1)
        self.assertEqual(d.constant, 3)

    def test_rejects_non_members(self):
        """v + 1 is not in M"""
        with self.assertRaises(CertificationError):
            factor_into_M(rf({1: 1, 0: 1}))
        with self.assertRaises(CertificationError):
            factor_into_M(RationalFunctionV.constant(0))

    def test_parity(self):
        """v - v^-1 is odd under both substitutions, [2] is even under v -> 1/v"""
        self.assertEqual(parity(rf({1: 1, -1: -1})), {"inverse": -1, "negative": -1})
        self.assertEqual(parity(RationalFunctionV(q_integer(2))), {"inverse": 1, "negative": -1})

    def test_group_law(self):
        """Products and inverses of normalizing elements"""
        d = NormalizingElement.of(Fraction(1, 2), 1, {2: -1})
        self.assertEqual(d * d.inverse(), NormalizingElement.of())
        self.assertEqual(expand(d * d), expand(d) * expand(d))

    @given(normalizing)
    @settings(max_examples=30, deadline=None)
    def test_certificate_recovers_element(self, d):
        """factor_into_M inverts expand on M"""
        self.assertEqual(factor_into_M(expand(d)), (d, 1))


class TestFactored(unittest.TestCase):

    def test_normalizing_conversion(self):
        """A normalizing element survives the factored form"""
        d = NormalizingElement.of(3, 2, {3: 1, 2: -1})
        self.assertEqual(FactoredFunction.from_normalizing(d).to_rational_function(), expand(d))

    def test_canonical_binomials(self):
        """1 - z^-1 = -z^-1 (1 - z)"""
        left = FactoredFunction.binomial(0, 0, (-1,))
        right = FactoredFunction.monomial(0, (-1,), -1) * FactoredFunction.binomial(0, 0, (1,))
        self.assertEqual(left, right)

    def test_ratio_constant(self):
        """Constant quotients are detected, others are not"""
        f = FactoredFunction.binomial(Fraction(1, 2), 1, (1, 0))
        g = FactoredFunction.binomial(0, 0, (0, 1))
        self.assertEqual((f * 3).ratio_constant(f), 3)
        self.assertIsNone(f.ratio_constant(g))

    def test_pullback(self):
        """Restriction along the diagonal z1 = z2 = w"""
        f = FactoredFunction.binomial(0, 0, (1, 0))
        pulled = f.pullback([[1], [1]], (Fraction(0), Fraction(0)), (Fraction(0), Fraction(0)))
        self.assertEqual(pulled, FactoredFunction.binomial(0, 0, (1,)))

    def test_numeric_evaluation(self):
        """(1 - v z) at v = 2, z = 1 is -1"""
        f = FactoredFunction.binomial(0, 1, (1,))
        self.assertAlmostEqual(complex(f.evaluate(2.0)[0]), -1)


if __name__ == '__main__':
    unittest.main()
