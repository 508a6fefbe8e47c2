"""
Unit tests for spectral transfer maps, recipes and their analysis
"""
import unittest
import os
import sys
from fractions import Fraction
from pathlib import Path

# Add src to path
sys.path.append(str(Path(__file__).parent.parent / "src"))

from core.config import Limits
from core.errors import AccountingError, ValidationError
from diagrams.diagram import spectral_diagram
from exactscalars.normalizing import NormalizingElement
from rootdata.datum import build_root_datum
from rootdata.parameters import ParameterFunction
from stm.analysis import (
    LOWER,
    check_order_witness,
    correspondence_constants,
    excellence,
    excellent_subset,
    intertwiners,
    residual_correspondence,
)
from stm.recipes import (
    covering_maps,
    eta_map,
    explicit_map,
    identity_map,
    inclusion_map,
    rank0_map,
    rank_zero_algebra,
    search_rank0,
    translation_map,
    weyl_map,
)
from stm.transfer import NormalizedAlgebra, compose, equivalent, morphism, verify_stm
from torus.coset import Coset
from torus.point import TorusPoint

SMALL = Limits(tempered_samples=64)
SLOW = os.getenv("RESIDUA_SLOW", "1") != "0"
Z3 = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
FDEG_A1 = NormalizingElement.of(1, 1, {2: -1})


def algebra(type_expr: str, lattice: str, labels=None, basis=None) -> NormalizedAlgebra:
    datum = build_root_datum(type_expr, lattice, basis)
    m = ParameterFunction.from_labels(datum, labels) if labels else ParameterFunction.uniform(datum, 1)
    return NormalizedAlgebra(datum, m)


class TestSelfMaps(unittest.TestCase):

    def setUp(self):
        """Set up test case"""
        self.b2 = algebra("B2", "Q")
        self.a1p = algebra("A1", "P")

    def test_identity(self):
        """The identity is a covering with a = 1"""
        found = morphism(identity_map(self.b2), SMALL)
        self.assertTrue(found.record.valid)
        self.assertEqual(found.record.a, 1)
        self.assertEqual(found.record.index, 1)
        self.assertEqual((found.rank, found.corank), (2, 0))
        self.assertIsNone(found.record.t4)
        self.assertIn("rk = 2 (dim T1 - 1 = 1), cork = 0", found.render())

    def test_weyl_map(self):
        """mu is W0-invariant, so every w is a spectral transfer map"""
        record = verify_stm(weyl_map(self.b2, [0, 1]), SMALL)
        self.assertTrue(record.valid)
        self.assertEqual(record.a, 1)
        self.assertEqual(record.render(), "VALID, a = 1")

    def test_t4_is_marked_as_sampled(self):
        """Labels of zero leave the data not semi-standard; T4 runs on test points and says so"""
        flat = algebra("A1", "Q", {"s0": 0, "s1": 0})
        record = verify_stm(identity_map(flat), SMALL)
        self.assertTrue(record.t4)
        self.assertTrue(record.heuristic_t4)
        self.assertTrue(record.to_dict()["T4_heuristic"])
        self.assertEqual(record.render(), "VALID, a = 1 (T4 checked on test points)")

    def test_weyl_map_is_equivalent_to_identity(self):
        """w o id and id lie in one W2-class"""
        self.assertTrue(equivalent(identity_map(self.b2), weyl_map(self.b2, [1, 0, 1])))

    def test_central_translation(self):
        """Translation by the central element of A1 (P)"""
        phi = translation_map(self.a1p, TorusPoint.of([Fraction(1, 2)], [0]))
        record = verify_stm(phi, SMALL)
        self.assertTrue(record.valid)
        self.assertEqual(record.a, 1)
        self.assertTrue(equivalent(phi, phi))

    def test_translation_needs_torsion(self):
        """A non-unitary point is not a translation"""
        with self.assertRaises(ValidationError):
            translation_map(self.a1p, TorusPoint.of([0], [1]))

    def test_eta(self):
        """eta on the long class of C2 is a spectral isomorphism"""
        c2 = algebra("C2", "Q")
        phi = eta_map(c2, "s2")
        self.assertEqual(phi.target.parameters.labels()["s2"], -1)
        self.assertTrue(verify_stm(phi, SMALL).valid)

    def test_unequal_labels_fail_t3(self):
        """A map between algebras with different mu fails T3 with a witness"""
        source = algebra("A1", "Q")
        target = algebra("A1", "Q", {"s0": 1, "s1": 2})
        phi = explicit_map(source, target, [[1]], TorusPoint.identity(1), Coset.whole_torus(1))
        record = verify_stm(phi, SMALL)
        self.assertFalse(record.valid)
        self.assertIn("T3", record.failed())
        self.assertIn("T3", record.witnesses)
        self.assertTrue(record.render().startswith("INVALID: T3 failed"))


class TestIsogenies(unittest.TestCase):

    def setUp(self):
        """Set up test case"""
        self.p = algebra("A1", "P")
        self.q = algebra("A1", "Q")

    def test_inclusion(self):
        """X(Q) inside X(P) gives T(P) -> T(Q) of index 2"""
        phi = inclusion_map(self.p, self.q)
        self.assertEqual([list(row) for row in phi.matrix], [[2]])
        found = morphism(phi, SMALL)
        self.assertTrue(found.record.valid)
        self.assertEqual(found.record.index, 2)
        self.assertEqual(found.record.a, 1)

    def test_inclusion_direction(self):
        """X(P) is not inside X(Q)"""
        with self.assertRaises(ValidationError):
            inclusion_map(self.q, self.p)

    def test_covering_search(self):
        """One W2-class of coverings A1 (P) -> A1 (Q), none backwards"""
        found = covering_maps(self.p, self.q, SMALL)
        self.assertEqual(len(found), 1)
        self.assertTrue(equivalent(found[0].representative, inclusion_map(self.p, self.q)))
        self.assertEqual(covering_maps(self.q, self.p, SMALL), [])

    def test_compose_with_weyl(self):
        """s o inclusion is again the inclusion up to W2"""
        incl = inclusion_map(self.p, self.q)
        composite = compose(incl, weyl_map(self.q, [0]), SMALL)
        self.assertTrue(composite.record.valid)
        self.assertTrue(equivalent(composite.representative, incl))

    def test_compose_mismatch(self):
        """Composition needs matching endpoints"""
        incl = inclusion_map(self.p, self.q)
        with self.assertRaises(ValidationError):
            compose(incl, incl, SMALL)

    def test_compose_invalid(self):
        """An invalid factor makes the composite invalid"""
        other = algebra("A1", "Q", {"s0": 1, "s1": 2})
        bad = explicit_map(self.q, other, [[1]], TorusPoint.identity(1), Coset.whole_torus(1))
        with self.assertRaises(AccountingError):
            compose(inclusion_map(self.p, self.q), bad, SMALL)

    def test_order_witness(self):
        """A valid inclusion shows A1 (P) is lower than A1 (Q)"""
        verdict = check_order_witness(self.p, self.q, [inclusion_map(self.p, self.q)], SMALL)
        self.assertEqual(verdict.verdict, LOWER)
        with self.assertRaises(ValidationError):
            check_order_witness(self.q, self.p, [inclusion_map(self.p, self.q)], SMALL)
        with self.assertRaises(ValidationError):
            check_order_witness(self.p, self.q, [], SMALL)

    def test_residual_correspondence(self):
        """Both residual points of A1 (P) land on the point orbit of A1 (Q)"""
        found = morphism(inclusion_map(self.p, self.q), SMALL)
        result = residual_correspondence(found, None, SMALL)
        self.assertEqual(len(result.rows), len(self.p.catalog(SMALL).entries))
        self.assertEqual(result.rows[0].source.coset.dim, 1)
        self.assertEqual(result.rows[0].target.coset.dim, 1)
        self.assertTrue(all(row.target.coset.dim == row.source.coset.dim for row in result.rows))
        self.assertEqual(sorted(len(v) for v in result.fibers().values()), [1, 2])

    def test_intertwiners(self):
        """The reflection of T1 is carried by the reflection of T2"""
        result = intertwiners(morphism(inclusion_map(self.p, self.q), SMALL))
        self.assertEqual(len(result.assignment), 1)
        self.assertTrue(result.consistent)


class TestRankZero(unittest.TestCase):

    def setUp(self):
        """Set up test case"""
        self.q = algebra("A1", "Q")

    def test_rank0_map(self):
        """The residual point with d0 = fdeg is a map of corank 1"""
        found = morphism(rank0_map(self.q, TorusPoint.of([0], [-2]), FDEG_A1), SMALL)
        self.assertTrue(found.record.valid)
        self.assertEqual(abs(found.record.a), 1)
        self.assertEqual((found.rank, found.corank), (0, 1))
        self.assertTrue(found.record.order_consistent)

    def test_rank_zero_is_lower(self):
        """The rank 0 algebra with d = fdeg is lower than A1 (Q)"""
        h0 = rank_zero_algebra(FDEG_A1)
        phi = rank0_map(self.q, TorusPoint.of([0], [-2]), FDEG_A1)
        verdict = check_order_witness(h0, self.q, [phi], SMALL)
        self.assertEqual(verdict.verdict, LOWER)
        self.assertEqual(verdict.morphisms[0].record.a, -1)
        with self.assertRaises(ValidationError):
            check_order_witness(self.q, h0, [phi], SMALL)

    def test_search(self):
        """The single residual orbit of A1 (Q) matches d0 up to a sign"""
        matches = search_rank0(self.q, FDEG_A1, SMALL)
        self.assertEqual(len(matches), 1)
        self.assertEqual(abs(matches[0].lam), 1)
        self.assertTrue(matches[0].morphism.record.valid)

    def test_search_wrong_order(self):
        """A normalization of the wrong shape matches nothing"""
        self.assertEqual(search_rank0(self.q, NormalizingElement.of(1, 2, {}), SMALL), [])

    def test_excellence_needs_positive_dimension(self):
        """A rank 0 map has no facet"""
        found = morphism(rank0_map(self.q, TorusPoint.of([0], [-2]), FDEG_A1), SMALL)
        with self.assertRaises(ValidationError):
            excellent_subset(found)


class TestExcellence(unittest.TestCase):

    def facet(self, type_expr: str, names):
        datum = build_root_datum(type_expr, "P")
        diagram = spectral_diagram(datum, ParameterFunction.uniform(datum, 1))
        index = {node.name: i for i, node in enumerate(diagram.nodes)}
        return diagram, [index[n] for n in names]

    def test_a2_single_node(self):
        """-w0 of A2 moves s1 off {s1}"""
        diagram, facet = self.facet("A2", ["s1"])
        excellent, involutions = excellence(diagram, facet)
        self.assertFalse(excellent)
        self.assertEqual(involutions["s2"], {"s1": "s2"})

    def test_a3_end_nodes(self):
        """{s1, s3} of A3 is stable under every r*"""
        diagram, facet = self.facet("A3", ["s1", "s3"])
        excellent, involutions = excellence(diagram, facet)
        self.assertTrue(excellent)
        self.assertEqual(involutions["s2"], {"s1": "s3", "s3": "s1"})
        self.assertEqual(set(involutions), {"s2", "s0"})


class TestSquare(unittest.TestCase):
    """
    D_ad -> D_Zn -> D_sc
     |       |       |
    B_ad -> C_aff -> C_sc

    Every arrow is the inclusion of character lattices in epsilon-coordinates.
    """

    def setUp(self):
        """Set up test case"""
        short_ends = {"s0": 0, "s1": 1, "s2": 1, "s3": 0}
        self.d_ad = algebra("D3", "P")
        self.d_zn = algebra("D3", "basis", basis=Z3)
        self.d_sc = algebra("D3", "Q")
        self.b_ad = algebra("B3", "P", short_ends)
        self.c_aff = algebra("B3", "basis", short_ends, basis=Z3)
        self.c_sc = algebra("C3", "Q", {"s0": 1, "s1": 1, "s2": 1, "s3": 0})
        self.arrows = {
            "D_ad -> D_Zn": (self.d_ad, self.d_zn),
            "D_Zn -> D_sc": (self.d_zn, self.d_sc),
            "B_ad -> C_aff": (self.b_ad, self.c_aff),
            "C_aff -> C_sc": (self.c_aff, self.c_sc),
            "D_ad -> B_ad": (self.d_ad, self.b_ad),
            "D_Zn -> C_aff": (self.d_zn, self.c_aff),
            "D_sc -> C_sc": (self.d_sc, self.c_sc),
        }

    def test_arrows(self):
        """Each arrow is a valid covering with a = 1"""
        for name, (source, target) in self.arrows.items():
            with self.subTest(arrow=name):
                found = morphism(inclusion_map(source, target), SMALL)
                self.assertTrue(found.record.valid, found.render())
                self.assertEqual(found.record.a, 1)
                self.assertEqual(found.corank, 0)

    def test_vertical_over_zn_is_the_identity(self):
        """D_Zn and C_aff share X = Z^3"""
        phi = inclusion_map(self.d_zn, self.c_aff)
        self.assertEqual([list(row) for row in phi.matrix], Z3)

    def test_composites_agree(self):
        """Top then right equals left then bottom up to W(C3)"""
        top = compose(inclusion_map(self.d_ad, self.d_zn), inclusion_map(self.d_zn, self.d_sc), SMALL)
        top = compose(top.representative, inclusion_map(self.d_sc, self.c_sc), SMALL)
        left = compose(inclusion_map(self.d_ad, self.b_ad), inclusion_map(self.b_ad, self.c_aff), SMALL)
        left = compose(left.representative, inclusion_map(self.c_aff, self.c_sc), SMALL)
        self.assertTrue(top.record.valid)
        self.assertTrue(left.record.valid)
        self.assertEqual(top.record.a, left.record.a)
        self.assertTrue(equivalent(top.representative, left.representative))
        self.assertTrue(equivalent(top.representative, inclusion_map(self.d_ad, self.c_sc)))

    @unittest.skipUnless(SLOW, "exhaustive suite")
    def test_correspondence_constants(self):
        """Every source residual orbit of every arrow has density ratio 1"""
        for name, (source, target) in self.arrows.items():
            with self.subTest(arrow=name):
                found = morphism(inclusion_map(source, target), SMALL)
                constants = correspondence_constants(found, SMALL)
                self.assertEqual(len(constants), len(source.catalog(SMALL).entries))
                for entry, ratio in constants:
                    self.assertIsInstance(ratio, Fraction)
                    self.assertEqual(ratio, 1, entry.coset.render())


if __name__ == '__main__':
    unittest.main()
