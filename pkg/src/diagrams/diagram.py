"""
Affine Diagrams
Arithmetic and spectral diagrams with labels and Omega-actions, standardization and maximal extensions
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from loguru import logger

from core.errors import AccountingError, CertificationError, ValidationError
from mu.function import build_mu
from rootdata import cartan
from rootdata.datum import BasedRootDatum
from rootdata.lattice import (
    FiniteAbelianGroupPresentation,
    as_int_vector,
    dot,
    inverse,
    lattice_quotient,
    mat_mul,
    solve,
    transpose,
    vector_gcd,
)
from rootdata.parameters import ParameterFunction, affine_nodes, node_class
from rootdata.weyl import WeylGroup

Vector = Tuple[int, ...]

ARITHMETIC = "arithmetic"
SPECTRAL = "spectral"


@dataclass(frozen=True)
class DiagramNode:
    """
    A simple affine root gradient + constant

    root is the index of the root of R0 the node is built from; special marks
    the affine node of each component.
    """
    name: str
    gradient: Vector
    cogradient: Vector
    constant: int
    label: int
    component: int
    root: int
    special: bool

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "label": self.label,
            "special": self.special,
            "gradient": list(self.gradient),
            "constant": self.constant,
        }


@dataclass(frozen=True)
class DiagramSymmetry:
    """An element of Omega: node permutation realized by x -> w(x) + translation"""
    permutation: Tuple[int, ...]
    word: Tuple[int, ...]
    translation: Tuple[Fraction, ...]

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.permutation))


@dataclass
class LabelledAffineDiagram:
    """
    A disjoint union of affine Dynkin diagrams with integer labels

    cartan[i][j] = <cogradient_i, gradient_j>; symmetries lists the action of
    the Omega group on the nodes, one permutation per group element.
    """
    kind: str
    datum_name: str
    nodes: List[DiagramNode]
    cartan: List[List[int]]
    omega: FiniteAbelianGroupPresentation
    symmetries: List[DiagramSymmetry] = field(default_factory=list)
    classes: List[List[str]] = field(default_factory=list)

    @property
    def labels(self) -> Dict[str, int]:
        return {node.name: node.label for node in self.nodes}

    def edges(self) -> List[Tuple[int, int, int, int]]:
        """(i, j, cartan[i][j], cartan[j][i]) for i < j joined by a bond"""
        out = []
        for i in range(len(self.nodes)):
            for j in range(i + 1, len(self.nodes)):
                if self.cartan[i][j] != 0:
                    out.append((i, j, self.cartan[i][j], self.cartan[j][i]))
        return out

    def graph(self) -> nx.Graph:
        graph = nx.Graph()
        for i, node in enumerate(self.nodes):
            graph.add_node(i, name=node.name, label=node.label)
        for i, j, a, b in self.edges():
            graph.add_edge(i, j, cartan=(a, b))
        return graph

    def components(self) -> List[List[int]]:
        return sorted((sorted(c) for c in nx.connected_components(self.graph())), key=lambda c: c[0])

    def labels_invariant(self) -> bool:
        """Labels are constant on the orbits of the symmetry group"""
        return all(self.nodes[i].label == self.nodes[s.permutation[i]].label
                   for s in self.symmetries for i in range(len(self.nodes)))

    def same_labelled_graph(self, other: "LabelledAffineDiagram") -> bool:
        return ([n.label for n in self.nodes] == [n.label for n in other.nodes]
                and [n.special for n in self.nodes] == [n.special for n in other.nodes]
                and self.cartan == other.cartan)

    def render(self) -> str:
        lines = [f"{self.kind} diagram of {self.datum_name}"]
        for comp in self.components():
            tokens = [f"{self.nodes[i].name}{'*' if self.nodes[i].special else ''}[{self.nodes[i].label}]" for i in comp]
            lines.append("  nodes: " + " ".join(tokens))
        for i, j, a, b in self.edges():
            lines.append(f"  bond {self.nodes[i].name} -({a},{b})- {self.nodes[j].name}")
        if self.classes:
            lines.append("  classes: " + " | ".join(",".join(c) for c in self.classes))
        lines.append(f"  Omega = {self.omega.render()}")
        for s in self.symmetries:
            if not s.is_identity():
                lines.append(f"    {_cycles(s.permutation, self.nodes)}")
        return "\n".join(lines)

    def to_dict(self) -> Dict:
        return {
            "kind": self.kind,
            "datum": self.datum_name,
            "nodes": [n.to_dict() for n in self.nodes],
            "edges": [{"from": self.nodes[i].name, "to": self.nodes[j].name, "cartan": [a, b]}
                      for i, j, a, b in self.edges()],
            "classes": self.classes,
            "omega": self.omega.to_dict(),
            "symmetries": [[self.nodes[k].name for k in s.permutation] for s in self.symmetries],
        }


def _cycles(permutation: Sequence[int], nodes: Sequence[DiagramNode]) -> str:
    seen = set()
    parts = []
    for start in range(len(permutation)):
        if start in seen or permutation[start] == start:
            continue
        cycle = [start]
        seen.add(start)
        j = permutation[start]
        while j != start:
            cycle.append(j)
            seen.add(j)
            j = permutation[j]
        parts.append("(" + " ".join(nodes[k].name for k in cycle) + ")")
    return "".join(parts) or "()"


def _cartan_between(nodes: Sequence[DiagramNode]) -> List[List[int]]:
    return [[dot(a.cogradient, b.gradient) for b in nodes] for a in nodes]


def _linear_part(nodes: Sequence[DiagramNode], perm: Sequence[int], n: int) -> Optional[List[List[int]]]:
    """The integer matrix sending the gradients of the first n nodes to their images under perm"""
    source = transpose([list(node.gradient) for node in nodes[:n]])
    target = transpose([list(nodes[perm[i]].gradient) for i in range(n)])
    m = mat_mul(target, inverse(source))
    if any(Fraction(x).denominator != 1 for row in m for x in row):
        return None
    return [[int(x) for x in row] for row in m]


def affine_symmetries(nodes: Sequence[DiagramNode], weyl: WeylGroup, on_y: bool) -> List[DiagramSymmetry]:
    """
    Diagram automorphisms realized by the extended affine Weyl group

    Gradients live in Y when on_y (arithmetic diagrams, translations by X)
    and in X otherwise (spectral diagrams, translations by Y). A permutation
    sigma is realized by g = (w, lambda) when w(g_i) = g_sigma(i) and
    <g_sigma(i), lambda> = k_i - k_sigma(i) for all nodes.
    """
    n = weyl.datum.rank
    if not nodes:
        return [DiagramSymmetry((), (), ())]
    matrix = _cartan_between(nodes)
    found = []
    for perm in cartan.diagram_automorphisms(matrix):
        linear = _linear_part(nodes, perm, n)
        if linear is None:
            continue
        x_matrix = transpose(inverse(linear)) if on_y else linear
        if any(Fraction(x).denominator != 1 for row in x_matrix for x in row):
            continue
        w = weyl.from_matrix(np.array([[int(x) for x in row] for row in x_matrix], dtype=np.int64))
        if w is None:
            continue
        act: Callable[[Sequence], Tuple] = w.act_y if on_y else w.act_x
        if any(act(node.gradient) != nodes[perm[i]].gradient for i, node in enumerate(nodes)):
            continue
        rows = [list(nodes[perm[i]].gradient) for i in range(len(nodes))]
        rhs = [node.constant - nodes[perm[i]].constant for i, node in enumerate(nodes)]
        translation = solve(rows, rhs)
        if translation is None or any(x.denominator != 1 for x in translation):
            continue
        found.append(DiagramSymmetry(tuple(perm), w.word, tuple(translation)))
    return found


def _check_omega(symmetries: Sequence[DiagramSymmetry], omega: FiniteAbelianGroupPresentation, kind: str) -> None:
    if len(symmetries) != omega.order:
        raise CertificationError(f"{kind} diagram: {len(symmetries)} realized symmetries but |Omega| = {omega.order}")


def _node_classes(datum: BasedRootDatum) -> List[List[str]]:
    groups: Dict = {}
    for node in affine_nodes(datum):
        groups.setdefault(node_class(datum, node), []).append(node.name)
    return sorted(groups.values(), key=lambda names: names[0])


def arithmetic_diagram(datum: BasedRootDatum, m: ParameterFunction) -> LabelledAffineDiagram:
    """(R0^vee)^(1) with the labels m_R and the action of Omega_X = X / Q(R0)"""
    labels = m.labels()
    nodes = [DiagramNode(a.name, datum.coroots[a.root], datum.roots[a.root], a.constant, labels[a.name],
                         a.component, a.root, a.is_affine)
             for a in affine_nodes(datum)]
    omega = datum.omega_x()
    symmetries = affine_symmetries(nodes, datum.weyl(), on_y=True)
    _check_omega(symmetries, omega, ARITHMETIC)
    diagram = LabelledAffineDiagram(ARITHMETIC, datum.name, nodes, _cartan_between(nodes), omega, symmetries,
                                    _node_classes(datum))
    if not diagram.labels_invariant():
        logger.warning(f"Omega_X moves the labels of {datum.name}")
    logger.debug(f"Arithmetic diagram of {datum.name}: {len(nodes)} nodes, |Omega_X| = {omega.order}")
    return diagram


def _highest_in_r_m(datum: BasedRootDatum, m: ParameterFunction, component: int) -> int:
    """Index of the positive root alpha whose multiple n_m(alpha) alpha is highest in R_m"""
    def height(i: int) -> Fraction:
        n = m.n_m(i)
        return sum((Fraction(n * c, m.n_m(j)) for j, c in enumerate(datum.coefficients[i])), Fraction(0))
    candidates = [i for i in datum.component_partition[component] if datum.is_positive(i)]
    return max(candidates, key=height)


def spectral_diagram(datum: BasedRootDatum, m: ParameterFunction) -> LabelledAffineDiagram:
    """
    R_m^(1) with labels m^vee and the action of Omega^vee_Y = Y / Q(R_m^vee)

    R_m = {n_m(alpha) alpha}; the node a^vee = beta + k over beta = n alpha has
    signature (-1)^(k (n - 1)) and label n * m_eps(alpha).
    """
    nodes = []
    for j in datum.simple_indices:
        n = m.n_m(j)
        label = m.two_m_plus[j] if n == 2 else m.label(j)
        nodes.append(DiagramNode(datum.node_name(j), tuple(n * x for x in datum.roots[j]),
                                 as_int_vector([Fraction(x, n) for x in datum.coroots[j]]), 0, label,
                                 datum.component_of_root[j], j, False))
    for c in range(len(datum.component_nodes)):
        top = _highest_in_r_m(datum, m, c)
        n = m.n_m(top)
        label = m.two_m_minus[top] if n == 2 else m.label(top)
        negative = datum.negative_of(top)
        nodes.append(DiagramNode(datum.affine_node_name(c), tuple(n * x for x in datum.roots[negative]),
                                 as_int_vector([Fraction(x, n) for x in datum.coroots[negative]]), 1, label,
                                 c, negative, True))

    simple_coroots = [list(node.cogradient) for node in nodes[:datum.rank]]
    omega = lattice_quotient(simple_coroots, width=datum.rank)
    symmetries = affine_symmetries(nodes, datum.weyl(), on_y=False)
    _check_omega(symmetries, omega, SPECTRAL)
    diagram = LabelledAffineDiagram(SPECTRAL, datum.name, nodes, _cartan_between(nodes), omega, symmetries)
    if not diagram.labels_invariant():
        logger.warning(f"Omega^vee_Y moves the spectral labels of {datum.name}")
    logger.debug(f"Spectral diagram of {datum.name}: labels {diagram.labels}, |Omega^vee_Y| = {omega.order}")
    return diagram


@dataclass
class Standardization:
    """
    A standard pair with the same mu, and how it was obtained

    doubled lists the root orbits (component, long) whose roots were
    multiplied by 2; root_map sends new root indices to old ones; twist is
    the constant mu_old / mu_new (1 when nothing but the lattice changed).
    """
    datum: BasedRootDatum
    parameters: ParameterFunction
    doubled: List[Tuple[int, bool]]
    root_map: List[int]
    twist: object = 1

    @property
    def is_identity(self) -> bool:
        return not self.doubled

    def to_dict(self) -> Dict:
        return {
            "identity": self.is_identity,
            "doubled_orbits": [{"component": c + 1, "long": long} for c, long in self.doubled],
            "datum": self.datum.to_dict(),
            "parameters": self.parameters.to_dict(),
            "twist": str(self.twist),
        }


def standardize(datum: BasedRootDatum, m: ParameterFunction) -> Standardization:
    """
    Replace a semi-standard pair by a standard one with the same mu

    On a C_n^(1) component whose labels vanish at exactly one end, the roots
    of the orbit with alpha^vee in 2Y are doubled and both new labels become
    the surviving one.

    Raises:
        ValidationError: some orbit has both labels zero
        AccountingError: the two mu-functions differ by a non-constant factor
    """
    orbit_labels = m.orbit_labels()
    bad = [orbit for orbit, (a, b) in orbit_labels.items() if a == 0 and b == 0]
    if bad:
        raise ValidationError(f"parameters are not semi-standard on orbits {sorted(bad)}")
    doubled = sorted(orbit for orbit, (a, b) in orbit_labels.items() if (a == 0) != (b == 0))
    if not doubled:
        return Standardization(datum, m, [], list(range(len(datum.roots))))

    factor = [2 if datum.orbit_id(j) in doubled else 1 for j in datum.simple_indices]
    roots = [tuple(f * x for x in r) for f, r in zip(factor, datum.simple_roots)]
    coroots = [as_int_vector([Fraction(x, f) for x in c]) for f, c in zip(factor, datum.simple_coroots)]
    new = BasedRootDatum(roots, coroots, name=f"{datum.name} standardized")

    root_map = [0] * len(new.roots)
    plus = [0] * len(new.roots)
    minus = [0] * len(new.roots)
    for i, r in enumerate(datum.roots):
        orbit = datum.orbit_id(i)
        image = tuple(2 * x for x in r) if orbit in doubled else r
        j = new.index[image]
        root_map[j] = i
        if orbit in doubled:
            a, b = orbit_labels[orbit]
            plus[j] = 2 * (a or b)
        else:
            plus[j], minus[j] = m.two_m_plus[i], m.two_m_minus[i]
    parameters = ParameterFunction(new, plus, minus)

    twist = build_mu(datum, m).as_function().ratio_constant(build_mu(new, parameters).as_function())
    if twist is None:
        raise AccountingError(f"standardizing {datum.name} changed mu")
    logger.info(f"Standardized {datum.name}: doubled orbits {doubled}, twist {twist}")
    return Standardization(new, parameters, doubled, root_map, twist)


def maximal_extension(datum: BasedRootDatum, m: ParameterFunction) -> Tuple[BasedRootDatum, ParameterFunction]:
    """
    (P(R_m), R0, Q(R_m^vee), R0^vee) with m transported

    X-coordinates are taken in the basis dual to the simple coroots of R_m,
    Y-coordinates in the basis of those coroots.
    """
    n = datum.rank
    scale = [m.n_m(j) for j in datum.simple_indices]
    roots = [[Fraction(dot(datum.coroots[i], datum.simple_roots[j]), scale[i]) for i in range(n)] for j in range(n)]
    simple_roots = [as_int_vector(r) for r in roots]
    simple_coroots = [tuple(scale[j] if k == j else 0 for k in range(n)) for j in range(n)]
    extended = BasedRootDatum(simple_roots, simple_coroots, name=f"{datum.name} maximal extension",
                              rank_hint=n)
    by_coefficients = {c: i for i, c in enumerate(datum.coefficients)}
    root_map = [by_coefficients[c] for c in extended.coefficients]
    logger.debug(f"Maximal extension of {datum.name}: |X/Q| = {extended.omega_x().order}")
    return extended, m.transported(extended, root_map)


@dataclass
class MirrorReport:
    """mu-mirrors on V = Y (x) R found at v0 against the hyperplanes of R_m^(1), both modulo Y"""
    found: List[Tuple[Vector, Fraction]]
    expected: List[Tuple[Vector, Fraction]]

    @property
    def matches(self) -> bool:
        return self.found == self.expected

    def to_dict(self) -> Dict:
        def render(planes):
            return [{"normal": list(p), "offset": str(c)} for p, c in planes]
        return {"found": render(self.found), "expected": render(self.expected), "matches": self.matches}


def _primitive(g: Sequence[int], offset: Fraction) -> Tuple[Vector, Fraction]:
    """{<g, y> = offset} as {<p, y> = c} with p primitive, positive first entry, c in [0, 1)"""
    k = vector_gcd(g)
    p = tuple(int(x) // k for x in g)
    c = Fraction(offset) / k
    if next(x for x in p if x != 0) < 0:
        p = tuple(-x for x in p)
        c = -c
    return p, c % 1


def mu_mirrors(datum: BasedRootDatum, m: ParameterFunction, v0: float = 2.0, samples: int = 16,
               tolerance: float = 1e-9, seed: int = 0) -> MirrorReport:
    """
    Hyperplanes of V on which mu at v0 vanishes identically, modulo Y

    Candidates are {<alpha, y> = j / (2 g)} for the roots alpha, g the content
    of alpha; a candidate counts as a mirror when |mu| stays below the
    tolerance, relative to generic values, at random points of the hyperplane.
    """
    f = build_mu(datum, m).as_function()
    rng = np.random.default_rng(seed)
    n = datum.rank
    generic = np.abs(f.evaluate(v0, np.exp(2j * np.pi * rng.random((samples, n)))))
    scale = float(np.median(generic)) or 1.0

    found = set()
    for i in datum.positive_indices:
        alpha = np.array(datum.roots[i], dtype=float)
        for j in range(2 * vector_gcd(datum.roots[i])):
            offset = Fraction(j, 2)
            y = rng.random((samples, n))
            y = y + np.outer(float(offset) - y @ alpha, alpha) / float(alpha @ alpha)
            values = np.abs(f.evaluate(v0, np.exp(2j * np.pi * y)))
            if np.all(values < tolerance * scale):
                found.add(_primitive(datum.roots[i], offset))

    expected = set()
    for i in datum.positive_indices:
        n_i = m.n_m(i)
        beta = tuple(n_i * x for x in datum.roots[i])
        for k in range(vector_gcd(beta)):
            expected.add(_primitive(beta, Fraction(k)))
    report = MirrorReport(sorted(found), sorted(expected))
    logger.debug(f"mu-mirrors of {datum.name} at v0 = {v0}: {len(found)} found, {len(expected)} expected")
    return report
