"""
Symmetries of mu
Out_T(mu) = Omega_X* x| Omega_0^Y with exact certificates, and the spectral involutions eta^c
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from loguru import logger

from core.errors import CertificationError, ValidationError
from exactscalars.normalizing import NormalizingElement
from mu.function import MuFunction, build_mu
from rootdata import cartan
from rootdata.datum import BasedRootDatum, torsion_closure
from rootdata.lattice import (
    FiniteAbelianGroupPresentation,
    identity,
    inverse,
    mat_mul,
    mat_vec,
    relative_quotient,
    solve_congruence,
    transpose,
)
from rootdata.parameters import NodeClass, ParameterFunction, affine_nodes, node_class
from torus.point import TorusPoint

TRANSLATION = "translation"
DIAGRAM = "diagram"
COMPOSITE = "composite"

Matrix = Tuple[Tuple[int, ...], ...]


@dataclass(frozen=True)
class TorusAutomorphism:
    """t -> base * matrix(t), matrix acting on cocharacters"""
    kind: str
    matrix: Matrix
    base: TorusPoint
    permutation: Tuple[int, ...] = ()

    def apply(self, p: TorusPoint) -> TorusPoint:
        return self.base * p.image(self.matrix)

    def compose(self, other: "TorusAutomorphism") -> "TorusAutomorphism":
        """self after other"""
        matrix = tuple(tuple(row) for row in mat_mul(self.matrix, other.matrix))
        return TorusAutomorphism(COMPOSITE, matrix, self.apply(other.base))

    def fixes(self, mu: MuFunction) -> bool:
        f = mu.as_function()
        image = f.pullback([list(row) for row in self.matrix], self.base.torsion, self.base.gamma,
                           width=mu.rank)
        return image == f

    def render(self) -> str:
        rows = ";".join(",".join(str(x) for x in row) for row in self.matrix)
        return f"{self.kind} [{rows}] base {self.base.render()}"

    def to_dict(self) -> Dict:
        return {
            "kind": self.kind,
            "matrix": [list(row) for row in self.matrix],
            "base": self.base.to_dict(),
            "permutation": [j + 1 for j in self.permutation],
        }


def _identity_matrix(n: int) -> Matrix:
    return tuple(tuple(row) for row in identity(n))


@dataclass
class OutTMu:
    """Out_T(mu) for standard data: the central translations Omega_X* and the diagram part Omega_0^Y"""
    datum_name: str
    omega_x_star: FiniteAbelianGroupPresentation
    translations: List[TorusAutomorphism] = field(default_factory=list)
    diagram: List[TorusAutomorphism] = field(default_factory=list)
    rejected: List[Tuple[int, ...]] = field(default_factory=list)

    @property
    def order(self) -> int:
        return len(self.translations) * len(self.diagram)

    def elements(self) -> List[TorusAutomorphism]:
        return [t.compose(d) for d in self.diagram for t in self.translations]

    def exact_sequence(self) -> Dict[str, int]:
        """1 -> Omega_X* -> Out_T(mu) -> Omega_0^Y -> 1"""
        return {"kernel": len(self.translations), "quotient": len(self.diagram), "order": self.order}

    def render(self) -> str:
        lines = [f"Out_T(mu) of {self.datum_name}: order {self.order}",
                 f"  Omega_X* = {self.omega_x_star.render()}"]
        for t in self.translations:
            lines.append(f"    translation by {t.base.render()}")
        lines.append(f"  Omega_0^Y: {len(self.diagram)} diagram automorphisms")
        for d in self.diagram:
            lines.append(f"    {'(' + ' '.join(f's{j + 1}' for j in d.permutation) + ')'}")
        if self.rejected:
            lines.append(f"  rejected diagram automorphisms: {len(self.rejected)}")
        return "\n".join(lines)

    def to_dict(self) -> Dict:
        return {
            "datum": self.datum_name,
            "order": self.order,
            "omega_x_star": self.omega_x_star.to_dict(),
            "translations": [t.to_dict() for t in self.translations],
            "diagram": [d.to_dict() for d in self.diagram],
            "rejected": [[j + 1 for j in p] for p in self.rejected],
            "exact_sequence": self.exact_sequence(),
        }


def _coroot_map(datum: BasedRootDatum, perm: Sequence[int]) -> Optional[List[List[int]]]:
    """Integer unimodular N on Y with N alpha_j^vee = alpha_perm(j)^vee, None when N does not normalize Y"""
    source = transpose([list(c) for c in datum.simple_coroots])
    target = transpose([list(datum.simple_coroots[perm[j]]) for j in datum.simple_indices])
    n = mat_mul(target, inverse(source))
    if any(Fraction(x).denominator != 1 for row in n for x in row):
        return None
    if any(Fraction(x).denominator != 1 for row in inverse(n) for x in row):
        return None
    return [[int(x) for x in row] for row in n]


def _moves_labels(datum: BasedRootDatum, m: ParameterFunction, n: Sequence[Sequence[int]]) -> bool:
    x_matrix = [[int(x) for x in row] for row in transpose(inverse(n))]
    for i, r in enumerate(datum.roots):
        j = datum.index[tuple(mat_vec(x_matrix, r))]
        if m.two_m_plus[i] != m.two_m_plus[j] or m.two_m_minus[i] != m.two_m_minus[j]:
            return True
    return False


def out_T_mu(datum: BasedRootDatum, m: ParameterFunction, d: Optional[NormalizingElement] = None) -> OutTMu:
    """
    Generators and elements of Out_T(mu), each certified by exact pullback of mu

    Raises:
        ValidationError: the parameters are not standard
        CertificationError: a generator does not fix mu
    """
    if not m.is_standard():
        raise ValidationError("Out_T(mu) needs standard parameters; standardize first")
    mu = build_mu(datum, m, d)
    n = datum.rank
    if n == 0:
        trivial = TorusAutomorphism(TRANSLATION, (), TorusPoint.identity(0))
        return OutTMu(datum.name, FiniteAbelianGroupPresentation(), [trivial], [trivial])

    # P(R0^vee) is the dual basis of the simple roots
    weights = transpose(inverse([list(r) for r in datum.simple_roots]))
    omega_star = relative_quotient(weights, identity(n))
    zero = (Fraction(0),) * n
    result = OutTMu(datum.name, omega_star)
    for t in torsion_closure(omega_star.generators, n):
        auto = TorusAutomorphism(TRANSLATION, _identity_matrix(n), TorusPoint(t, zero))
        if not auto.fixes(mu):
            raise CertificationError(f"translation by {auto.base.render()} does not fix mu")
        result.translations.append(auto)

    for perm in cartan.diagram_automorphisms(datum.cartan):
        matrix = _coroot_map(datum, perm)
        if matrix is None:
            result.rejected.append(perm)
            continue
        if _moves_labels(datum, m, matrix):
            logger.warning(f"diagram automorphism {[j + 1 for j in perm]} of {datum.name} moves the labels")
            result.rejected.append(perm)
            continue
        auto = TorusAutomorphism(DIAGRAM, tuple(tuple(row) for row in matrix), TorusPoint.identity(n), tuple(perm))
        if not auto.fixes(mu):
            raise CertificationError(f"diagram automorphism {[j + 1 for j in perm]} does not fix mu")
        result.diagram.append(auto)

    logger.info(f"Out_T(mu) of {datum.name}: |Omega_X*| = {len(result.translations)}, "
                f"|Omega_0^Y| = {len(result.diagram)}")
    return result


@dataclass
class EtaIsomorphism:
    """
    eta^c: parameters m -> eta^c(m) with torus part t -> base * t

    base is e when the class meets S0 and the W0-invariant element s_c otherwise.
    """
    class_name: str
    meets_s0: bool
    source: ParameterFunction
    target: ParameterFunction
    base: TorusPoint

    @property
    def matrix(self) -> List[List[int]]:
        return identity(self.base.rank)

    def to_dict(self) -> Dict:
        return {
            "class": self.class_name,
            "meets_S0": self.meets_s0,
            "source": self.source.to_dict(),
            "target": self.target.to_dict(),
            "base": self.base.to_dict(),
        }


def _class_of(datum: BasedRootDatum, class_name: str) -> NodeClass:
    for node in affine_nodes(datum):
        if node.name == class_name:
            return node_class(datum, node)
    raise ValidationError(f"unknown node class '{class_name}'")


def _classes(datum: BasedRootDatum) -> List[NodeClass]:
    return sorted({node_class(datum, node) for node in affine_nodes(datum)})


def _eta_labels(key: NodeClass, values: Dict[NodeClass, int]) -> Dict[NodeClass, int]:
    """eta^c on class labels: (a, b) -> (-b, -a) when c meets S0, b -> -b otherwise"""
    orbit, residue = key
    out = dict(values)
    partner = (orbit, 1 - residue)
    if residue == 1:
        out[key] = -values[key]
    elif partner in values:
        out[key], out[partner] = -values[partner], -values[key]
    else:
        out[key] = -values[key]
    return out


def _class_values(datum: BasedRootDatum, m: ParameterFunction) -> Dict[NodeClass, int]:
    labels = m.labels()
    return {node_class(datum, node): labels[node.name] for node in affine_nodes(datum)}


def _parameters_from_classes(datum: BasedRootDatum, values: Dict[NodeClass, int]) -> ParameterFunction:
    return ParameterFunction.from_labels(datum, {node.name: values[node_class(datum, node)]
                                                 for node in affine_nodes(datum)})


def central_sign_element(datum: BasedRootDatum, orbit: Tuple[int, bool]) -> TorusPoint:
    """
    The W0-invariant s_c with alpha(s_c) = -1 on the given root orbit and 1 elsewhere

    Raises:
        ValidationError: no such element of T exists
    """
    n = datum.rank
    phases = [Fraction(1, 2) if datum.orbit_id(j) == orbit else Fraction(0) for j in datum.simple_indices]
    for torsion in solve_congruence([list(r) for r in datum.simple_roots], phases):
        t = TorusPoint(torsion, (Fraction(0),) * n)
        if all(t.evaluate(r)[0] == (Fraction(1, 2) if datum.orbit_id(i) == orbit else 0)
               for i, r in enumerate(datum.roots)):
            return t
    raise ValidationError(f"no W0-invariant sign element for orbit {orbit} of {datum.name}")


def spectral_isomorphism_eta(datum: BasedRootDatum, m: ParameterFunction, class_name: str) -> EtaIsomorphism:
    """
    The spectral isomorphism eta^c attached to the W-conjugacy class of a node

    Raises:
        ValidationError: the node name is unknown
    """
    key = _class_of(datum, class_name)
    meets_s0 = key[1] == 0
    target = _parameters_from_classes(datum, _eta_labels(key, _class_values(datum, m)))
    base = TorusPoint.identity(datum.rank) if meets_s0 else central_sign_element(datum, key[0])
    logger.debug(f"eta^{class_name} on {datum.name}: {m.render()} -> {target.render()}, base {base.render()}")
    return EtaIsomorphism(class_name, meets_s0, m, target, base)


@dataclass
class EtaGroup:
    """The group of label maps generated by eta^c for the given classes"""
    generators: List[str]
    order: int
    orbit: List[Dict[str, int]]

    def to_dict(self) -> Dict:
        return {"generators": self.generators, "order": self.order, "parameter_orbit": self.orbit}


def eta_group(datum: BasedRootDatum, m: ParameterFunction, class_names: Sequence[str]) -> EtaGroup:
    """Closure of the eta^c as linear maps on the vector of class labels, and the orbit of m"""
    classes = _classes(datum)
    k = len(classes)
    matrices = []
    for name in class_names:
        key = _class_of(datum, name)
        columns = []
        for c in classes:
            unit = {other: int(other == c) for other in classes}
            image = _eta_labels(key, unit)
            columns.append([image[other] for other in classes])
        matrices.append(tuple(tuple(row) for row in transpose(columns)))

    start = tuple(tuple(row) for row in identity(k))
    group = {start}
    frontier = [start]
    while frontier:
        current = frontier.pop()
        for g in matrices:
            product = tuple(tuple(row) for row in mat_mul(g, current))
            if product not in group:
                group.add(product)
                frontier.append(product)

    values = _class_values(datum, m)
    vector = [values[c] for c in classes]
    orbit = set()
    for g in group:
        image = mat_vec(g, vector)
        orbit.add(tuple(image))
    parameters = [_parameters_from_classes(datum, dict(zip(classes, v))).to_dict() for v in sorted(orbit)]
    logger.debug(f"eta group on {datum.name} generated by {list(class_names)}: order {len(group)}")
    return EtaGroup(list(class_names), len(group), parameters)
