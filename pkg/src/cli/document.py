"""
Input Documents
Parser and canonical renderer for the INI-like .residua format
"""
import re
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, field_validator
from pydantic import ValidationError as PydanticError

from core.errors import DocumentSyntaxError, ValidationError
from exactscalars.normalizing import NormalizingElement
from rootdata.datum import BasedRootDatum, build_root_datum
from rootdata.parameters import ParameterFunction, affine_nodes
from torus.coset import Coset
from torus.point import parse_point

SECTIONS = ("datum", "parameters", "normalization", "stm")

# Allowed keys per section; parameters takes node names instead
KEYS: Dict[str, Tuple[str, ...]] = {
    "datum": ("type", "lattice", "basis", "name"),
    "normalization": ("constant", "vexp", "qints"),
    "stm": ("recipe", "word", "point", "class", "matrix", "coset", "d0"),
}

_SECTION = re.compile(r"^\[\s*([A-Za-z0-9_]+)\s*\]$")
_ENTRY = re.compile(r"^([A-Za-z0-9_.]+)\s*=\s*(.*)$")
_NODE = re.compile(r"^s\d+(?:\.\d+)?$")
_ROW = re.compile(r"\[([^\[\]]*)\]")
_QINT = re.compile(r"^\s*(\d+)\s*:\s*(-?\d+)\s*$")
_COSET = re.compile(r"^\s*P\s*:\s*\[([^\]]*)\]\s+base\s*:\s*(.*)$")
_POWER = re.compile(r"^\(v-v\^-1\)(?:\^(-?\d+))?$")
_BRACKET = re.compile(r"^\[(\d+)\](?:\^(-?\d+))?$")


def _rational(text: str) -> Fraction:
    return Fraction(text.strip())


class DatumSection(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    type: str
    lattice: str = "Q"
    basis: Optional[Tuple[Tuple[str, ...], ...]] = None
    name: Optional[str] = None

    @field_validator("lattice")
    @classmethod
    def _known_lattice(cls, value: str) -> str:
        if value not in ("Q", "P", "basis"):
            raise ValueError(f"lattice must be Q, P or basis, got '{value}'")
        return value


class ParametersSection(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    labels: Tuple[Tuple[str, int], ...] = ()
    all: Optional[int] = None


class NormalizationSection(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    constant: str = "1"
    vexp: int = 0
    qints: Tuple[Tuple[int, int], ...] = ()

    @field_validator("constant")
    @classmethod
    def _positive_rational(cls, value: str) -> str:
        if _rational(value) <= 0:
            raise ValueError(f"constant must be a positive rational, got {value}")
        return str(_rational(value))


class StmSection(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    recipe: str
    word: Optional[Tuple[int, ...]] = None
    point: Optional[str] = None
    class_name: Optional[str] = Field(default=None, alias="class")
    matrix: Optional[Tuple[Tuple[int, ...], ...]] = None
    coset: Optional[str] = None
    d0: Optional[str] = None


class InputDocument(BaseModel):
    """One algebra and at most one transfer map leaving it"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    datum: DatumSection
    parameters: ParametersSection = ParametersSection(all=1)
    normalization: NormalizationSection = NormalizationSection()
    stm: Optional[StmSection] = None
    source: str = Field(default="<text>", exclude=True)

    # semantic layer

    def build_datum(self) -> BasedRootDatum:
        basis = None
        if self.datum.basis is not None:
            basis = [[_rational(x) for x in row] for row in self.datum.basis]
        return build_root_datum(self.datum.type, self.datum.lattice, basis, self.datum.name)

    def build_parameters(self, datum: BasedRootDatum) -> ParameterFunction:
        """
        Raises:
            ValidationError: unknown nodes, or different labels on W-conjugate nodes
        """
        labels = dict(self.parameters.labels)
        if self.parameters.all is not None:
            for node in affine_nodes(datum):
                labels.setdefault(node.name, self.parameters.all)
        return ParameterFunction.from_labels(datum, labels)

    def build_normalization(self) -> NormalizingElement:
        return NormalizingElement.of(_rational(self.normalization.constant), self.normalization.vexp,
                                     dict(self.normalization.qints))


def parse_normalizing(text: str, line: int = 0, column: int = 0) -> NormalizingElement:
    """Inverse of NormalizingElement.render: 'c * (v-v^-1)^k * [n]^e' with every piece optional"""
    constant, vexp, qints = Fraction(1), 0, {}
    if text.strip() != "1":
        for piece in (p.strip() for p in text.split("*")):
            power = _POWER.match(piece)
            bracket = _BRACKET.match(piece)
            if power:
                vexp += int(power.group(1) or 1)
            elif bracket:
                n = int(bracket.group(1))
                qints[n] = qints.get(n, 0) + int(bracket.group(2) or 1)
            else:
                try:
                    constant *= _rational(piece)
                except (ValueError, ZeroDivisionError):
                    raise DocumentSyntaxError(f"bad normalizing factor '{piece}'", line, column)
    try:
        return NormalizingElement.of(constant, vexp, qints)
    except ValidationError as e:
        raise DocumentSyntaxError(str(e), line, column)


def parse_coset(text: str, datum: BasedRootDatum, line: int = 0, column: int = 0) -> Coset:
    """'P:[1,3] base:zeta=(..) gamma=(..)' is base * T^P; P:[] is base * T"""
    match = _COSET.match(text)
    if not match:
        raise DocumentSyntaxError(f"expected 'P:[..] base:zeta=(..) gamma=(..)', got '{text.strip()}'",
                                  line, column)
    try:
        subset = [int(s) - 1 for s in match.group(1).split(",") if s.strip()]
    except ValueError:
        raise DocumentSyntaxError(f"bad subset '{match.group(1)}'", line, column)
    base = parse_point(match.group(2), line, column)
    restriction = datum.parabolic_restriction(subset)
    return Coset(base, restriction.y_upper_p, restriction.subset)


def render_coset(coset: Coset) -> str:
    return f"P:[{','.join(str(j + 1) for j in coset.parabolic)}] base:{coset.base.render()}"


def _matrix(text: str, line: int, column: int) -> List[List[str]]:
    body = text.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise DocumentSyntaxError(f"expected a bracketed matrix, got '{body}'", line, column)
    inner = body[1:-1].strip()
    rows = _ROW.findall(inner)
    if _ROW.sub("", inner).replace(",", "").strip():
        raise DocumentSyntaxError(f"stray text in matrix '{body}'", line, column)
    return [[x.strip() for x in row.split(",") if x.strip()] for row in rows]


def _integer_list(text: str, line: int, column: int) -> List[int]:
    body = text.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise DocumentSyntaxError(f"expected a bracketed list, got '{body}'", line, column)
    try:
        return [int(x) for x in body[1:-1].split(",") if x.strip()]
    except ValueError:
        raise DocumentSyntaxError(f"expected integers in '{body}'", line, column)


def _qints(text: str, line: int, column: int) -> List[Tuple[int, int]]:
    body = text.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise DocumentSyntaxError(f"expected '{{n: e, ...}}', got '{body}'", line, column)
    out = []
    for item in body[1:-1].split(","):
        if not item.strip():
            continue
        match = _QINT.match(item)
        if not match:
            raise DocumentSyntaxError(f"bad q-integer entry '{item.strip()}'", line, column)
        out.append((int(match.group(1)), int(match.group(2))))
    return sorted(out)


def _convert(section: str, key: str, value: str, line: int, column: int):
    """Typed value of one entry; rationals are checked but kept as text"""
    if key == "basis":
        rows = _matrix(value, line, column)
        for row in rows:
            for x in row:
                try:
                    _rational(x)
                except (ValueError, ZeroDivisionError):
                    raise DocumentSyntaxError(f"bad rational '{x}'", line, column)
        return tuple(tuple(row) for row in rows)
    if key == "matrix":
        try:
            return tuple(tuple(int(x) for x in row) for row in _matrix(value, line, column))
        except ValueError:
            raise DocumentSyntaxError(f"expected an integer matrix, got '{value}'", line, column)
    if key == "word":
        return tuple(_integer_list(value, line, column))
    if key == "qints":
        return tuple(_qints(value, line, column))
    if key == "vexp" or section == "parameters":
        try:
            return int(value)
        except ValueError:
            raise DocumentSyntaxError(f"expected an integer, got '{value}'", line, column)
    if key == "constant":
        try:
            _rational(value)
        except (ValueError, ZeroDivisionError):
            raise DocumentSyntaxError(f"bad rational '{value}'", line, column)
    if key == "point":
        parse_point(value, line, column)
    if key == "d0":
        parse_normalizing(value, line, column)
    return value


def parse(text: str, source: str = "<text>") -> InputDocument:
    """
    Parse one document

    Raises:
        DocumentSyntaxError: malformed line, unknown section or key, duplicate entry
        ValidationError: the sections do not form valid inputs
    """
    sections: Dict[str, Dict] = {}
    current: Optional[str] = None
    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].rstrip()
        stripped = content.strip()
        if not stripped:
            continue
        column = len(content) - len(content.lstrip()) + 1
        header = _SECTION.match(stripped)
        if header:
            current = header.group(1)
            if current not in SECTIONS:
                raise DocumentSyntaxError(f"unknown section [{current}]", number, column)
            if current in sections:
                raise DocumentSyntaxError(f"duplicate section [{current}]", number, column)
            sections[current] = {}
            continue
        entry = _ENTRY.match(stripped)
        if not entry:
            raise DocumentSyntaxError(f"expected 'key = value', got '{stripped}'", number, column)
        if current is None:
            raise DocumentSyntaxError("entry before the first section", number, column)
        key, value = entry.group(1), entry.group(2).strip()
        value_column = column + raw.lstrip().index(value) if value else column
        if current == "parameters":
            if key != "all" and not _NODE.match(key):
                raise DocumentSyntaxError(f"'{key}' is not a node name like s1 or s0.2", number, column)
        elif key not in KEYS[current]:
            raise DocumentSyntaxError(f"unknown key '{key}' in [{current}]", number, column)
        if key in sections[current]:
            raise DocumentSyntaxError(f"duplicate key '{key}' in [{current}]", number, column)
        sections[current][key] = _convert(current, key, value, number, value_column)

    if "datum" not in sections:
        raise DocumentSyntaxError("missing [datum] section", 1, 1)

    try:
        fields: Dict = {"datum": DatumSection(**sections["datum"]), "source": source}
        if "parameters" in sections:
            values = dict(sections["parameters"])
            every = values.pop("all", None)
            fields["parameters"] = ParametersSection(labels=tuple(sorted(values.items())), all=every)
        if "normalization" in sections:
            fields["normalization"] = NormalizationSection(**sections["normalization"])
        if "stm" in sections:
            fields["stm"] = StmSection(**sections["stm"])
        document = InputDocument(**fields)
    except PydanticError as e:
        raise ValidationError(f"{source}: {e}")
    logger.debug(f"Parsed {source}: type {document.datum.type}, lattice {document.datum.lattice}")
    return document


def load(path: str) -> InputDocument:
    return parse(Path(path).read_text(encoding="utf-8"), source=str(path))


def render(document: InputDocument) -> str:
    """Canonical text; parse(render(doc)) == doc"""
    lines = ["[datum]", f"type = {document.datum.type}", f"lattice = {document.datum.lattice}"]
    if document.datum.basis is not None:
        lines.append("basis = [" + ", ".join("[" + ", ".join(row) + "]" for row in document.datum.basis) + "]")
    if document.datum.name is not None:
        lines.append(f"name = {document.datum.name}")

    lines += ["", "[parameters]"]
    if document.parameters.all is not None:
        lines.append(f"all = {document.parameters.all}")
    lines += [f"{name} = {value}" for name, value in document.parameters.labels]

    n = document.normalization
    lines += ["", "[normalization]", f"constant = {n.constant}", f"vexp = {n.vexp}",
              "qints = {" + ", ".join(f"{k}: {e}" for k, e in n.qints) + "}"]

    if document.stm is not None:
        s = document.stm
        lines += ["", "[stm]", f"recipe = {s.recipe}"]
        if s.word is not None:
            lines.append("word = [" + ", ".join(str(j) for j in s.word) + "]")
        if s.point is not None:
            lines.append(f"point = {s.point}")
        if s.class_name is not None:
            lines.append(f"class = {s.class_name}")
        if s.matrix is not None:
            lines.append("matrix = [" + ", ".join("[" + ", ".join(str(x) for x in row) + "]" for row in s.matrix) + "]")
        if s.coset is not None:
            lines.append(f"coset = {s.coset}")
        if s.d0 is not None:
            lines.append(f"d0 = {s.d0}")
    return "\n".join(lines) + "\n"