"""
Transfer Map Analysis
Residual correspondences, intertwiners, excellent subsets, density constants and the spectral partial order
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from core.config import Limits, current_limits
from core.errors import AccountingError, CertificationError, Refutation, ValidationError
from diagrams.diagram import LabelledAffineDiagram, spectral_diagram
from mu.function import regularize
from residual.enumerate import CatalogEntry
from rootdata import cartan
from rootdata.datum import BasedRootDatum
from rootdata.lattice import dot, mat_mul, rank, transpose
from rootdata.parameters import ParameterFunction
from rootdata.weyl import WeylElement
from stm.transfer import STMorphism, SpectralTransferMap, morphism
from torus.coset import Coset, image_coset, k_groups, translate
from torus.point import TorusPoint
from torus.tempered import TemperedForm, sample_tempered

LOWER = "lower"
ISOGENOUS = "isogenous"
FAIL = "fail"


@dataclass
class CorrespondenceRow:
    """A source residual orbit and the target orbit containing its image"""
    source: CatalogEntry
    target: CatalogEntry
    image: Coset
    target_index: int = 0
    tempered: Optional[bool] = None

    def to_dict(self) -> Dict:
        out = {"source": self.source.coset.to_dict(), "target": self.target.coset.to_dict(),
               "image": self.image.to_dict()}
        if self.tempered is not None:
            out["tempered"] = self.tempered
        return out


@dataclass
class ResidualCorrespondence:
    rows: List[CorrespondenceRow] = field(default_factory=list)

    def fibers(self) -> Dict[int, List[int]]:
        """Target catalog position -> source catalog positions mapping into it"""
        out: Dict[int, List[int]] = {}
        for i, row in enumerate(self.rows):
            out.setdefault(row.target_index, []).append(i)
        return out

    def render(self) -> str:
        lines = [f"residual correspondence: {len(self.rows)} source orbits"]
        for row in self.rows:
            mark = "" if row.tempered is None else (" tempered ok" if row.tempered else " tempered MISMATCH")
            lines.append(f"  dim {row.source.coset.dim} {row.source.coset.base.render()} -> "
                         f"dim {row.target.coset.dim} {row.target.coset.base.render()}{mark}")
        return "\n".join(lines)

    def to_dict(self) -> Dict:
        return {"rows": [row.to_dict() for row in self.rows],
                "fibers": {str(k): v for k, v in sorted(self.fibers().items())}}


def _shifts(phi: SpectralTransferMap) -> List[TorusPoint]:
    zero = (Fraction(0),) * phi.target.rank
    try:
        kg = k_groups(phi.coset, phi.target.datum)
    except ValidationError:
        return [TorusPoint.identity(phi.target.rank)]
    return [TorusPoint.identity(phi.target.rank)] + [TorusPoint(t, zero) for t in kg.k_l_n]


def _tempered_image(phi: SpectralTransferMap, source: Coset, image: Coset, v0: float, limits: Limits) -> bool:
    """phi maps sampled points of source^temp onto image^temp at v0"""
    rho, theta = sample_tempered(source, phi.source.datum, v0, 32, limits.sample_seed)
    a = np.array([list(row) for row in phi.matrix], dtype=float).reshape(phi.target.rank, phi.source.rank)
    base_rho, base_theta = phi.base.log_coordinates(v0)
    form = TemperedForm.of(image, phi.target.datum, v0)
    distance = form.distance(rho @ a.T + base_rho, theta @ a.T + base_theta)
    return bool(np.max(distance) <= limits.membership_tolerance)


def residual_correspondence(found: STMorphism, v0: Optional[float] = None,
                            limits: Optional[Limits] = None) -> ResidualCorrespondence:
    """
    Image of every source residual orbit, located in the target catalog up to K_L^n

    Raises:
        AccountingError: an image is not a target residual coset
    """
    limits = current_limits(limits)
    phi = found.representative
    source_catalog = phi.source.catalog(limits)
    target_catalog = phi.target.catalog(limits)
    result = ResidualCorrespondence()
    for entry in source_catalog.entries:
        image = image_coset(entry.coset, phi.matrix, phi.base)
        hit = None
        for k in _shifts(phi):
            hit = target_catalog.find(translate(image, k))
            if hit is not None:
                image = translate(image, k)
                break
        if hit is None:
            raise AccountingError(f"image {image.render()} of a residual coset is not residual")
        row = CorrespondenceRow(entry, hit, image, target_catalog.entries.index(hit))
        if v0 is not None:
            row.tempered = _tempered_image(phi, entry.coset, image, v0, limits)
        result.rows.append(row)
    logger.info(f"Residual correspondence {phi.source.name} -> {phi.target.name}: {len(result.rows)} orbits")
    return result


@dataclass
class Intertwiners:
    """s_j of W1 -> w2 in N(L) with phi o s_j = w2 o phi"""
    assignment: Dict[str, str] = field(default_factory=dict)
    consistent: bool = True
    stabilizer: List[str] = field(default_factory=list)

    def render(self) -> str:
        lines = [f"  {s} -> {w}" for s, w in self.assignment.items()]
        if self.stabilizer:
            lines.append(f"  stabilizer of the base point: {', '.join(self.stabilizer)}")
        lines.append(f"  consistent on W1: {self.consistent}")
        return "intertwiners\n" + "\n".join(lines)

    def to_dict(self) -> Dict:
        return {"assignment": self.assignment, "consistent": self.consistent, "stabilizer": self.stabilizer}


def _intertwines(phi: SpectralTransferMap, w1_y: Sequence[Sequence[int]], w2: WeylElement,
                 shifts: List[Tuple]) -> bool:
    a = [list(row) for row in phi.matrix]
    n_w = [[int(x) for x in row] for row in w2.y_matrix]
    if mat_mul(n_w, a) != mat_mul(a, [list(row) for row in w1_y]):
        return False
    return (phi.base.act(w2.y_matrix) / phi.base).key in shifts


def intertwiners(found: STMorphism) -> Intertwiners:
    """
    Raises:
        AccountingError: a simple reflection of W1 has no intertwiner
    """
    phi = found.representative
    weyl1 = phi.source.datum.weyl()
    weyl2 = phi.target.datum.weyl()
    shifts = [k.key for k in _shifts(phi)]
    result = Intertwiners()
    chosen: Dict[int, WeylElement] = {}
    for j in phi.source.datum.simple_indices:
        s = weyl1.from_word([j])
        w2 = next((w for w in weyl2 if _intertwines(phi, [[int(x) for x in row] for row in s.y_matrix], w, shifts)), None)
        if w2 is None:
            raise AccountingError(f"no intertwiner for {s.render()} under {phi.render()}")
        chosen[j] = w2
        result.assignment[s.render()] = w2.render()

    for w1 in weyl1:
        product = weyl2.identity
        for j in w1.word:
            product = weyl2.multiply(product, chosen[j])
        if not _intertwines(phi, [[int(x) for x in row] for row in w1.y_matrix], product, shifts):
            result.consistent = False
            logger.warning(f"intertwiners of {phi.render()} are inconsistent at {w1.render()}")
            break

    if phi.source.rank == 0:
        result.stabilizer = [w.render() for w in weyl2 if w.length and phi.base.act(w.y_matrix) == phi.base]
    return result


@dataclass
class Excellence:
    """The facet J of the fundamental alcove carrying the lifted image, and the involutions r*"""
    diagram: LabelledAffineDiagram
    facet: List[int]
    is_facet: bool
    excellent: bool
    involutions: Dict[str, Dict[str, str]] = field(default_factory=dict)
    facets: List[Tuple[List[str], int]] = field(default_factory=list)

    @property
    def names(self) -> List[str]:
        return [self.diagram.nodes[i].name for i in self.facet]

    @property
    def complement(self) -> int:
        return len(self.diagram.nodes) - len(self.facet)

    def render(self) -> str:
        lines = [f"J = {{{', '.join(self.names)}}}, |F \\ J| = {self.complement}, "
                 f"{'excellent' if self.excellent else 'not excellent'}"]
        for b, perm in self.involutions.items():
            body = " ".join(f"{k}->{v}" for k, v in perm.items()) or "id"
            lines.append(f"  r*({b}): {body}")
        for names, dim in self.facets:
            lines.append(f"  facet {{{', '.join(names)}}}: dim {dim}")
        return "\n".join(lines)

    def to_dict(self) -> Dict:
        return {
            "J": self.names,
            "is_facet": self.is_facet,
            "excellent": self.excellent,
            "complement": self.complement,
            "involutions": self.involutions,
            "facets": [{"I": names, "dim": dim} for names, dim in self.facets],
        }


def _affine_value(node, y: Sequence[Fraction]) -> Fraction:
    return Fraction(dot(node.gradient, y)) + node.constant


def _walk_to_alcove(diagram: LabelledAffineDiagram, point: List[Fraction],
                    directions: List[List[Fraction]]) -> Tuple[List[Fraction], List[List[Fraction]]]:
    """Reflect point and directions together until the point lies in the closed fundamental alcove"""
    while True:
        node = next((nd for nd in diagram.nodes if _affine_value(nd, point) < 0), None)
        if node is None:
            return point, directions
        k = _affine_value(node, point)
        point = [y - k * c for y, c in zip(point, node.cogradient)]
        directions = [[u - dot(node.gradient, d) * c for u, c in zip(d, node.cogradient)] for d in directions]


def facet_subset(coset: Coset, diagram: LabelledAffineDiagram) -> Tuple[List[int], bool]:
    """
    Nodes J whose walls contain the lift of L(1)^temp after conjugation into the fundamental alcove

    Returns:
        (J, is_facet) with is_facet when the lift is the full intersection of its walls
    """
    torsion = [Fraction(t) for t in coset.base.torsion]
    directions = [[Fraction(x) for x in y] for y in coset.subtorus]
    for attempt in range(1, 8):
        eps = [Fraction(1, 101 * attempt + 7 * (i + 1) ** 2) for i in range(len(directions))]
        start = list(torsion)
        for e, d in zip(eps, directions):
            start = [y + e * x for y, x in zip(start, d)]
        point, moved = _walk_to_alcove(diagram, start, directions)
        facet = [i for i, node in enumerate(diagram.nodes) if _affine_value(node, point) == 0]
        if all(dot(diagram.nodes[i].gradient, d) == 0 for i in facet for d in moved):
            gradients = [list(diagram.nodes[i].gradient) for i in facet]
            codim = coset.rank - coset.dim
            return facet, (rank(gradients) if gradients else 0) == codim == len(facet)
    raise CertificationError(f"no generic point found on the lift of {coset.render()}")


def excellence(diagram: LabelledAffineDiagram, facet: Sequence[int]) -> Tuple[bool, Dict[str, Dict[str, str]]]:
    """
    J is excellent when -w_(J+b) maps J to itself for every node b outside J

    The involution r* = w_(J+b) w_J restricted to J is reported per b.
    """
    facet = sorted(facet)
    tau = cartan.opposition_involution(diagram.cartan, facet) if facet else {}
    involutions: Dict[str, Dict[str, str]] = {}
    excellent = True
    for b in range(len(diagram.nodes)):
        if b in facet:
            continue
        sigma = cartan.opposition_involution(diagram.cartan, facet + [b])
        r_star = {j: sigma[tau[j]] for j in facet}
        if set(r_star.values()) != set(facet):
            excellent = False
        names = {diagram.nodes[j].name: diagram.nodes[r_star[j]].name for j in facet}
        involutions[diagram.nodes[b].name] = names
    return excellent, involutions


def _facet_table(diagram: LabelledAffineDiagram, facet: Sequence[int], n: int) -> List[Tuple[List[str], int]]:
    rest = [i for i in range(len(diagram.nodes)) if i not in facet]
    table = []
    for k in range(len(rest)):
        for extra in combinations(rest, k):
            subset = sorted(list(facet) + list(extra))
            gradients = [list(diagram.nodes[i].gradient) for i in subset]
            table.append(([diagram.nodes[i].name for i in subset], n - (rank(gradients) if gradients else 0)))
    return table


def excellent_subset(found: STMorphism) -> Excellence:
    """
    Raises:
        ValidationError: the target is reducible or not semi-standard, or L is a point
        Refutation: the facet of L is not excellent
    """
    phi = found.representative
    datum = phi.target.datum
    if len(datum.component_nodes) != 1:
        raise ValidationError("excellent subsets need an irreducible target")
    if not phi.target.parameters.is_semi_standard():
        raise ValidationError("excellent subsets need a semi-standard target")
    if phi.coset.dim == 0:
        raise ValidationError("excellent subsets need a positive-dimensional image")
    result = coset_excellence(phi.coset, datum, phi.target.parameters)
    if not result.excellent:
        raise Refutation(f"facet {result.names} of {phi.render()} is not excellent", result.to_dict())
    return result


def coset_excellence(coset: Coset, datum: BasedRootDatum, parameters: ParameterFunction) -> Excellence:
    """Facet, excellence and facet table of a coset of a semi-standard irreducible datum"""
    diagram = spectral_diagram(datum, parameters)
    facet, is_facet = facet_subset(coset, diagram)
    excellent, involutions = excellence(diagram, facet)
    result = Excellence(diagram, facet, is_facet, excellent and is_facet, involutions,
                        _facet_table(diagram, facet, datum.rank))
    logger.debug(f"Facet of {coset.render()} in {datum.name}: {result.names}, excellent {result.excellent}")
    return result


def correspondence_constant(found: STMorphism, coset: Coset) -> Fraction:
    """
    r'' with (phi|L1)^* mu2^(phi(L1)) = r'' mu1^(L1)

    Raises:
        AccountingError: the ratio is not constant
        CertificationError: the constant is not rational
    """
    phi = found.representative
    image = image_coset(coset, phi.matrix, phi.base)
    on_target = regularize(phi.target.mu, image).on_torus
    own = regularize(phi.source.mu, coset)
    pulled = on_target.pullback([list(row) for row in phi.matrix], phi.base.torsion, phi.base.gamma,
                                width=phi.source.rank)
    matrix = transpose([list(y) for y in coset.subtorus]) if coset.subtorus else [[] for _ in range(phi.source.rank)]
    restricted = pulled.pullback(matrix, own.base.torsion, own.base.gamma, width=coset.dim)
    ratio = restricted.ratio_constant(own.restricted)
    if ratio is None:
        raise AccountingError(f"density ratio along {coset.render()} is not constant: "
                              f"{(restricted / own.restricted).render()}")
    if not isinstance(ratio, Fraction):
        raise CertificationError(f"density ratio {ratio.render()} along {coset.render()} is not rational")
    return ratio


def correspondence_constants(found: STMorphism, limits: Optional[Limits] = None) -> List[Tuple[CatalogEntry, Fraction]]:
    """The constant r'' for every source residual orbit"""
    catalog = found.representative.source.catalog(limits)
    return [(entry, correspondence_constant(found, entry.coset)) for entry in catalog.entries]


@dataclass
class OrderVerdict:
    verdict: str
    morphisms: List[STMorphism] = field(default_factory=list)
    coverings: bool = False

    def render(self) -> str:
        lines = [f"verdict: {self.verdict}"]
        if self.verdict == ISOGENOUS and self.coverings:
            lines.append("both directions are coverings: essentially strict spectral isomorphisms")
        for m in self.morphisms:
            lines.append(m.render())
        return "\n".join(lines)

    def to_dict(self) -> Dict:
        return {"verdict": self.verdict, "coverings": self.coverings,
                "morphisms": [m.to_dict() for m in self.morphisms]}


def check_order_witness(first, second, witnesses: Sequence[SpectralTransferMap],
                        limits: Optional[Limits] = None) -> OrderVerdict:
    """
    first is lower than second given phi: first ~> second; isogenous given phi and psi: second ~> first

    Raises:
        ValidationError: no witness, or a witness with the wrong endpoints
    """
    if not 1 <= len(witnesses) <= 2:
        raise ValidationError("an order witness is one map or a pair of maps")
    ends = [(first, second), (second, first)]
    checked = []
    for phi, (source, target) in zip(witnesses, ends):
        if not (phi.source.same_as(source) and phi.target.same_as(target)):
            raise ValidationError(f"witness {phi.render()} has the wrong endpoints")
        checked.append(morphism(phi, limits))
    if not all(m.record.valid for m in checked):
        return OrderVerdict(FAIL, checked)
    if len(checked) == 1:
        return OrderVerdict(LOWER, checked)
    coverings = all(m.corank == 0 for m in checked)
    return OrderVerdict(ISOGENOUS, checked, coverings)
