"""
Unit tests for input documents, command dispatch and exit codes
"""
import unittest
import io
import json
import os
import sys
import tempfile
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

# Add src to path
sys.path.append(str(Path(__file__).parent.parent / "src"))

from cli.commands import EXIT_ERROR, EXIT_OK, EXIT_REFUTED, SCHEMA, Options, algebra_of, run
from cli.document import load, parse, parse_normalizing, render
from core.config import Limits
from core.errors import DocumentSyntaxError, ValidationError
from exactscalars.normalizing import NormalizingElement
from main import main

ROOT = Path(__file__).parent.parent
DATA = ROOT / "data"
CONFIG = str(ROOT / "config")
SMALL = Limits(tempered_samples=64)

EXPLICIT = """
[datum]
type = A1
lattice = Q

[stm]
recipe = explicit
matrix = [[1]]
point = zeta=(0) gamma=(0)
coset = P:[] base:zeta=(0) gamma=(0)
"""

COVERING = """
[datum]
type = A1
lattice = P

[stm]
recipe = covering
"""

UNEQUAL = """
[datum]
type = A1
lattice = Q

[parameters]
s0 = 1
s1 = 2
"""


class TestDocument(unittest.TestCase):

    def test_parse_minimal(self):
        """Sections land in typed models"""
        document = load(str(DATA / "a1_minimal.residua"))
        self.assertEqual(document.datum.type, "A1")
        self.assertEqual(document.parameters.all, 1)
        self.assertEqual(document.stm.recipe, "identity")
        self.assertEqual(document.build_normalization(), NormalizingElement.of())

    def test_render_is_canonical(self):
        """parse(render(doc)) == doc for every shipped document"""
        for path in sorted(DATA.glob("*.residua")):
            document = parse(path.read_text(encoding="utf-8"))
            self.assertEqual(parse(render(document)), document, path.name)

    def test_unknown_section(self):
        """The error names line and column"""
        with self.assertRaises(DocumentSyntaxError) as ctx:
            parse("[datum]\ntype = A1\n[bogus]\n")
        self.assertEqual((ctx.exception.line, ctx.exception.column), (3, 1))

    def test_unknown_key(self):
        """Indented entries report their own column"""
        with self.assertRaises(DocumentSyntaxError) as ctx:
            parse("[datum]\n  colour = red\n")
        self.assertEqual((ctx.exception.line, ctx.exception.column), (2, 3))

    def test_duplicate_key(self):
        """A key may appear once per section"""
        with self.assertRaises(DocumentSyntaxError):
            parse("[datum]\ntype = A1\ntype = A2\n")

    def test_missing_datum(self):
        """Every document needs a root datum"""
        with self.assertRaises(DocumentSyntaxError):
            parse("[parameters]\nall = 1\n")

    def test_bad_lattice(self):
        """Only Q, P and basis are lattices"""
        with self.assertRaises(ValidationError):
            parse("[datum]\ntype = A1\nlattice = R\n")

    def test_label_mismatch(self):
        """Conjugate nodes of A1 (P) need equal labels"""
        document = parse("[datum]\ntype = A1\nlattice = P\n[parameters]\ns0 = 1\ns1 = 2\n")
        with self.assertRaises(ValidationError):
            document.build_parameters(document.build_datum())

    def test_parse_normalizing(self):
        """Rendered normalizing elements parse back"""
        d = NormalizingElement.of(3, 2, {2: -1, 3: 1})
        self.assertEqual(parse_normalizing(d.render()), d)
        with self.assertRaises(DocumentSyntaxError):
            parse_normalizing("(v+v^-1)")


class TestCommands(unittest.TestCase):

    def test_residual_points(self):
        """One orbit for A1 with equal labels"""
        report = run("residual-points", [load(str(DATA / "a1_minimal.residua"))], Options(limits=SMALL))
        self.assertEqual(report.exit_code, EXIT_OK)
        self.assertEqual(len(report.payload["orbits"]), 1)
        self.assertTrue(report.text().startswith("residual points of A1 (Q) with s0 = 1, s1 = 1: 1 orbits"))

    def test_json_envelope(self):
        """Reports carry the schema tag"""
        report = run("mu", [load(str(DATA / "a1_minimal.residua"))], Options(as_json=True, limits=SMALL))
        body = json.loads(report.json())
        self.assertEqual(body["schema"], SCHEMA)
        self.assertEqual(body["command"], "mu")
        self.assertFalse(body["refuted"])
        self.assertTrue(body["result"]["weyl_invariant"])

    def test_unknown_command(self):
        """Dispatch rejects unknown commands and v0 <= 1"""
        document = load(str(DATA / "a1_minimal.residua"))
        with self.assertRaises(ValidationError):
            run("bogus", [document])
        with self.assertRaises(ValidationError):
            run("mu", [document], Options(v0=1))

    def test_invalid_map_is_refuted(self):
        """An explicit map into different labels fails T3"""
        report = run("verify-stm", [parse(EXPLICIT), parse(UNEQUAL)], Options(limits=SMALL))
        self.assertTrue(report.refuted)
        self.assertEqual(report.exit_code, EXIT_REFUTED)

    def test_compose_needs_three(self):
        """compose-stm takes a chain of at least three documents"""
        document = load(str(DATA / "a1_minimal.residua"))
        with self.assertRaises(ValidationError):
            run("compose-stm", [document, document])


    def test_covering_recipe(self):
        """The covering search picks the inclusion A1 (P) -> A1 (Q)"""
        source = parse(COVERING)
        report = run("verify-stm", [source, load(str(DATA / "a1_minimal.residua"))], Options(limits=SMALL))
        self.assertEqual(report.exit_code, EXIT_OK)
        self.assertTrue(report.text().startswith("covering: A1 (P) -> A1 (Q), matrix [2]"))
        self.assertEqual(report.payload["recipe"], "covering")

    def test_no_covering(self):
        """X(Q) of A1 never covers X(P)"""
        source = parse(COVERING.replace("lattice = P", "lattice = Q"))
        with self.assertRaises(ValidationError):
            run("verify-stm", [source, load(str(DATA / "a1_weight.residua"))], Options(limits=SMALL))

    def test_covering_witnesses_order(self):
        """check-order takes the covering as its witness"""
        report = run("check-order", [parse(COVERING), load(str(DATA / "a1_minimal.residua"))], Options(limits=SMALL))
        self.assertEqual(report.exit_code, EXIT_OK)
        self.assertEqual(report.payload["verdict"], "lower")

    def test_rank_zero_document(self):
        """type = T0 gives the rank 0 algebra with the document's normalization"""
        document = load(str(DATA / "rank0_steinberg.residua"))
        algebra = algebra_of(document)
        self.assertEqual(algebra.rank, 0)
        self.assertEqual(algebra.d, NormalizingElement.of(1, 1, {2: -1}))
        with self.assertRaises(ValidationError):
            run("verify-stm", [document], Options(limits=SMALL))

    def test_rank0_needs_matching_d0(self):
        """A d0 on a rank 0 document must be its normalization"""
        text = (DATA / "rank0_steinberg.residua").read_text(encoding="utf-8") + "d0 = (v-v^-1)\n"
        with self.assertRaises(ValidationError):
            run("verify-stm", [parse(text), load(str(DATA / "a1_rank0.residua"))], Options(limits=SMALL))



class TestMain(unittest.TestCase):

    def setUp(self):
        """Set up test case"""
        os.environ["RESIDUA_NO_LOG_FILE"] = "1"

    def invoke(self, *args):
        out, err = io.StringIO(), io.StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            code = main(list(args) + ["--config", CONFIG])
        return code, out.getvalue()

    def test_success(self):
        """verify-stm on the identity exits 0"""
        code, text = self.invoke("verify-stm", str(DATA / "a1_minimal.residua"))
        self.assertEqual(code, EXIT_OK)
        self.assertIn("VALID, a = 1", text)

    def test_covering(self):
        """The inclusion A1 (P) -> A1 (Q) verifies"""
        code, text = self.invoke("verify-stm", str(DATA / "a1_weight.residua"), str(DATA / "a1_minimal.residua"))
        self.assertEqual(code, EXIT_OK)
        self.assertIn("cork = 0", text)

    def test_json(self):
        """--json writes one residua/1 object"""
        code, text = self.invoke("residual-points", str(DATA / "a1_zero.residua"), "--json")
        self.assertEqual(code, EXIT_OK)
        body = json.loads(text)
        self.assertEqual(body["schema"], SCHEMA)
        self.assertEqual(body["result"]["orbits"], [])

    def test_refutation_exit_code(self):
        """A failed verification exits 2"""
        with tempfile.TemporaryDirectory() as tmp:
            source = Path(tmp) / "source.residua"
            target = Path(tmp) / "target.residua"
            source.write_text(EXPLICIT, encoding="utf-8")
            target.write_text(UNEQUAL, encoding="utf-8")
            code, text = self.invoke("verify-stm", str(source), str(target))
        self.assertEqual(code, EXIT_REFUTED)
        self.assertIn("INVALID", text)

    def test_compose_square(self):
        """Both paths around the D3/B3/C3 square compose to the same map"""
        top = ["cd_d_ad", "cd_d_zn", "cd_d_sc", "cd_c_sc"]
        left = ["cd_d_ad", "cd_b_ad", "cd_c_affine", "cd_c_sc"]
        composites = []
        for chain in (top, left):
            code, text = self.invoke("compose-stm", *[str(DATA / f"{name}.residua") for name in chain], "--json")
            self.assertEqual(code, EXIT_OK, chain)
            body = json.loads(text)
            self.assertFalse(body["refuted"])
            self.assertEqual(len(body["result"]["maps"]), 3)
            composites.append(body["result"]["composite"])
        for key in ("matrix", "base", "coset"):
            self.assertEqual(composites[0][key], composites[1][key])
        self.assertEqual(composites[0]["verification"]["a"], "1")

    def test_compose_rows(self):
        """The rows of the square compose in text mode"""
        for chain in (["cd_d_ad", "cd_d_zn", "cd_d_sc"], ["cd_b_ad", "cd_c_affine", "cd_c_sc"]):
            code, text = self.invoke("compose-stm", *[str(DATA / f"{name}.residua") for name in chain])
            self.assertEqual(code, EXIT_OK, chain)
            self.assertIn("composite:", text)
            self.assertIn("inclusion o inclusion", text)

    def test_check_order_rank_zero(self):
        """H0 with d = (v-v^-1)/[2] is lower than A1 (Q)"""
        code, text = self.invoke("check-order", str(DATA / "rank0_steinberg.residua"),
                                 str(DATA / "a1_rank0.residua"))
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(text.startswith("verdict: lower"))
        self.assertIn("rank0: H0 -> A1 (Q)", text)

    def test_check_order_isogenous(self):
        """Two identity witnesses make A1 (Q) isogenous to itself"""
        minimal = str(DATA / "a1_minimal.residua")
        code, text = self.invoke("check-order", minimal, minimal, "--json")
        self.assertEqual(code, EXIT_OK)
        body = json.loads(text)
        self.assertEqual(body["result"]["verdict"], "isogenous")
        self.assertTrue(body["result"]["coverings"])

    def test_check_order_one_way(self):
        """A map of the second document that does not lead back is not a witness"""
        code, text = self.invoke("check-order", str(DATA / "a1_weight.residua"), str(DATA / "a1_minimal.residua"))
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(text.startswith("verdict: lower"))

    def test_correspondence(self):
        """Every source orbit of D_Zn -> D_sc has density ratio 1"""
        code, text = self.invoke("correspondence", str(DATA / "cd_d_zn.residua"), str(DATA / "cd_d_sc.residua"),
                                 "--json")
        self.assertEqual(code, EXIT_OK)
        result = json.loads(text)["result"]
        self.assertTrue(result["morphism"]["verification"]["valid"])
        self.assertTrue(result["density_ratios"])
        self.assertEqual({row["ratio"] for row in result["density_ratios"]}, {"1"})

    def test_correspondence_text(self):
        """The text report lists ratios and intertwiners"""
        code, text = self.invoke("correspondence", str(DATA / "a1_weight.residua"), str(DATA / "a1_minimal.residua"))
        self.assertEqual(code, EXIT_OK)
        self.assertIn("density ratios:", text)
        self.assertIn("VALID, a = 1", text)

    def test_error_exit_code(self):
        """Malformed documents and missing files exit 1"""
        with tempfile.TemporaryDirectory() as tmp:
            broken = Path(tmp) / "broken.residua"
            broken.write_text("[datum]\ntype A1\n", encoding="utf-8")
            code, _ = self.invoke("mu", str(broken))
            self.assertEqual(code, EXIT_ERROR)
            code, text = self.invoke("mu", str(broken), "--json")
            self.assertEqual(json.loads(text)["error"]["kind"], "DocumentSyntaxError")
        code, _ = self.invoke("mu", str(DATA / "missing.residua"))
        self.assertEqual(code, EXIT_ERROR)


if __name__ == '__main__':
    unittest.main()
