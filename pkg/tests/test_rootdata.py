"""
Unit tests for root data, Weyl groups and lattices
"""
import unittest
import sys
from fractions import Fraction
from pathlib import Path

from hypothesis import assume, given, settings, strategies as st

# Add src to path
sys.path.append(str(Path(__file__).parent.parent / "src"))

from core.config import Limits
from core.errors import BoundExceeded, ValidationError
from rootdata import cartan
from rootdata.datum import build_root_datum
from rootdata.lattice import determinant, invariant_factors, lattice_quotient, smith_normal_form
from rootdata.parameters import ParameterFunction
from rootdata.weyl import WeylGroup


class TestBuildRootDatum(unittest.TestCase):

    def test_a1_root_lattice(self):
        """X = Z alpha, so alpha = (1) and alpha^vee = (2)"""
        datum = build_root_datum("A1", "Q")
        self.assertEqual(len(datum.roots), 2)
        self.assertEqual(datum.simple_roots, [(1,)])
        self.assertEqual(datum.simple_coroots, [(2,)])
        self.assertEqual(datum.omega_x().order, 1)
        self.assertEqual(datum.omega_y().order, 2)

    def test_a1_weight_lattice(self):
        """X = Z alpha/2, so alpha = (2) and alpha^vee = (1)"""
        datum = build_root_datum("A1", "P")
        self.assertEqual(datum.simple_roots, [(2,)])
        self.assertEqual(datum.simple_coroots, [(1,)])
        self.assertEqual(datum.omega_x().order, 2)

    def test_b2(self):
        """B2 has 8 roots and 2 simple roots"""
        datum = build_root_datum("B2", "Q")
        self.assertEqual(len(datum.roots), 8)
        self.assertEqual(len(datum.simple_roots), 2)
        self.assertEqual(datum.weyl().order, 8)

    def test_pairings(self):
        """<alpha^vee, alpha> = 2 for every root of G2 x A1"""
        datum = build_root_datum("G2 x A1", "Q")
        for r, c in zip(datum.roots, datum.coroots):
            self.assertEqual(sum(a * b for a, b in zip(r, c)), 2)
        self.assertEqual(datum.type_string, "G2 x A1")
        self.assertEqual(len(datum.component_partition), 2)

    def test_recognizes_product_types(self):
        """Type recognition of each component"""
        datum = build_root_datum("B3 x A2", "P")
        self.assertEqual(sorted(datum.types), [("A", 2), ("B", 3)])

    def test_rejects_lattice_outside_p(self):
        """A basis beyond the weight lattice is rejected"""
        with self.assertRaises(ValidationError):
            build_root_datum("A1", "basis", [[Fraction(1, 2)]])

    def test_rejects_lattice_inside_q(self):
        """A basis missing the root lattice is rejected"""
        with self.assertRaises(ValidationError):
            build_root_datum("A2", "basis", [[1, 0], [0, 2]])

    def test_rejects_unknown_types(self):
        """E5, B1 and garbage are not types"""
        for expression in ("E5", "B1", "Q7"):
            with self.assertRaises(ValidationError):
                build_root_datum(expression)

    def test_rank_zero_torus(self):
        """T0 is the datum with no roots; an empty expression is still rejected"""
        datum = build_root_datum("T0", name="H0")
        self.assertEqual((datum.rank, len(datum.roots), datum.name), (0, 0, "H0"))
        self.assertEqual(ParameterFunction.uniform(datum, 1).labels(), {})
        with self.assertRaises(ValidationError):
            build_root_datum("")
        with self.assertRaises(ValidationError):
            build_root_datum("T0", "basis", [[1]])

    def test_c_n1_components(self):
        """B3 with X = Z^3 has a short coroot in 2Y; with X = P(B3) it does not"""
        self.assertEqual(build_root_datum("B3", "basis", [[1, 0, 0], [0, 1, 0], [0, 0, 1]]).c_n1_components(), [0])
        self.assertEqual(build_root_datum("B3", "P").c_n1_components(), [])


class TestWeylGroup(unittest.TestCase):

    def test_orders_and_longest_elements(self):
        """|W| and l(w0) for A1, A2, B2, G2, A3"""
        expected = {"A1": (2, 1), "A2": (6, 3), "B2": (8, 4), "G2": (12, 6), "A3": (24, 6)}
        for name, (order, length) in expected.items():
            weyl = build_root_datum(name).weyl()
            self.assertEqual(weyl.order, order, name)
            self.assertEqual(weyl.longest.length, length, name)

    def test_longest_element_negates_positive_roots(self):
        """w0 sends R+ to R-"""
        datum = build_root_datum("B2")
        weyl = datum.weyl()
        self.assertEqual(len(weyl.inversions(weyl.longest)), datum.num_positive)

    def test_lengths_are_inversion_counts(self):
        """Stored words are reduced"""
        weyl = build_root_datum("A3").weyl()
        for w in weyl:
            self.assertEqual(len(w.word), len(weyl.inversions(w)))

    def test_m_w(self):
        """m_W(e) = 0, m_W(s) = 1 on A1 and m_W(w0) = 3 on A2 for m = 1"""
        a1 = build_root_datum("A1")
        m1 = ParameterFunction.uniform(a1, 1)
        weyl1 = a1.weyl()
        self.assertEqual(weyl1.m_w(m1, weyl1.identity), 0)
        self.assertEqual(weyl1.m_w(m1, weyl1.longest), 1)
        a2 = build_root_datum("A2")
        self.assertEqual(a2.weyl().m_w(ParameterFunction.uniform(a2, 1), a2.weyl().longest), 3)

    def test_bound(self):
        """The group-size bound is enforced"""
        datum = build_root_datum("B3")
        with self.assertRaises(BoundExceeded):
            WeylGroup(datum, Limits(weyl_order_bound=10))

    def test_standard_subsystem(self):
        """The subsystem of a non-simple root is conjugate to a standard one"""
        datum = build_root_datum("A2")
        highest = datum.highest_root(0)
        w, subset = datum.weyl().standard_subsystem([highest, datum.negative_of(highest)])
        self.assertEqual(len(subset), 1)


class TestParabolic(unittest.TestCase):

    def setUp(self):
        """Set up test case"""
        self.b2 = build_root_datum("B2")

    def test_empty_subset(self):
        """R_empty has rank 0 and T^empty = T"""
        restriction = self.b2.parabolic_restriction([])
        self.assertEqual(restriction.sub.rank, 0)
        self.assertEqual(len(restriction.y_upper_p), 2)

    def test_full_subset(self):
        """R_F0 is the whole system"""
        restriction = self.b2.parabolic_restriction([0, 1])
        self.assertEqual(len(restriction.sub.roots), 8)
        self.assertEqual(len(restriction.y_upper_p), 0)

    def test_long_root(self):
        """P = {long simple root} of B2 gives A1 and |K_P| = 2"""
        long_root = next(j for j in self.b2.simple_indices if self.b2.is_long(j))
        restriction = self.b2.parabolic_restriction([long_root])
        self.assertEqual(restriction.sub.types, [("A", 1)])
        self.assertEqual(restriction.k_p.order, 2)
        self.assertEqual(len(restriction.k_elements), 2)

    def test_rejects_non_simple(self):
        """Subsets must consist of simple roots"""
        with self.assertRaises(ValidationError):
            self.b2.parabolic_restriction([5])


class TestLattice(unittest.TestCase):

    def test_quotient(self):
        """Z^2 / (2Z + 3Z) is cyclic of order 6"""
        quotient = lattice_quotient([[2, 0], [0, 3]])
        self.assertEqual(quotient.order, 6)
        self.assertEqual(quotient.render(), "Z/6")

    def test_rank_defect(self):
        """A sublattice of lower rank has infinite index"""
        with self.assertRaises(ValidationError):
            lattice_quotient([[1, 1], [2, 2]])

    def test_opposition_involution(self):
        """-w0 reverses A3 and fixes B3"""
        self.assertEqual(cartan.opposition_involution(cartan.irreducible_cartan("A", 3), [0, 1, 2]),
                         {0: 2, 1: 1, 2: 0})
        self.assertEqual(cartan.opposition_involution(cartan.irreducible_cartan("B", 3), [0, 1, 2]),
                         {0: 0, 1: 1, 2: 2})

    def test_diagram_automorphisms(self):
        """A3 has the flip, B3 has none"""
        self.assertEqual(len(cartan.diagram_automorphisms(cartan.irreducible_cartan("A", 3))), 2)
        self.assertEqual(len(cartan.diagram_automorphisms(cartan.irreducible_cartan("B", 3))), 1)

    @given(st.lists(st.integers(min_value=-6, max_value=6), min_size=9, max_size=9))
    @settings(max_examples=40, deadline=None)
    def test_smith_form_index(self, entries):
        """The invariant factors multiply to |det|"""
        m = [entries[0:3], entries[3:6], entries[6:9]]
        det = determinant(m)
        assume(det != 0)
        product = 1
        for f in invariant_factors(m):
            product *= f
        self.assertEqual(product, abs(det))
        _, diagonal, _ = smith_normal_form(m)
        total = 1
        for f in diagonal:
            total *= f
        self.assertEqual(abs(total), abs(det))


if __name__ == '__main__':
    unittest.main()
