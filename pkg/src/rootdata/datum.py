"""
Based Root Data
Roots in X-coordinates, coroots in Y-coordinates, simple systems and parabolic restriction
"""
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

from loguru import logger

from core.errors import ValidationError
from rootdata import cartan
from rootdata.lattice import (
    FiniteAbelianGroupPresentation,
    as_int_vector,
    coordinates_in_sublattice,
    dot,
    inverse,
    kernel,
    lattice_quotient,
    rank,
    saturation,
    solve_left,
    transpose,
    vector_gcd,
)

Vector = Tuple[int, ...]


class BasedRootDatum:
    """
    Semisimple based root datum (X, R0, Y, R0^vee, F0)

    X = Z^n by convention; roots are integer vectors in X-coordinates and
    coroots integer vectors in the dual Y-coordinates, so <y, x> is a dot
    product. Roots are ordered positive first, by height, with the simple
    roots at indices 0..n-1; root i + N/2 is the negative of root i.
    """

    def __init__(self, simple_roots: Sequence[Sequence[int]], simple_coroots: Sequence[Sequence[int]],
                 name: Optional[str] = None, rank_hint: Optional[int] = None):
        self.simple_roots: List[Vector] = [tuple(int(x) for x in r) for r in simple_roots]
        self.simple_coroots: List[Vector] = [tuple(int(x) for x in c) for c in simple_coroots]
        self.rank = len(self.simple_roots[0]) if self.simple_roots else (rank_hint or 0)
        if len(self.simple_roots) != len(self.simple_coroots):
            raise ValidationError("simple roots and coroots differ in number")
        if self.simple_roots and len(self.simple_roots) != self.rank:
            raise ValidationError(f"{len(self.simple_roots)} simple roots do not span a rank {self.rank} lattice")
        if self.simple_roots and rank(self.simple_roots) != self.rank:
            raise ValidationError("simple roots are linearly dependent")

        self.cartan = [[dot(c, r) for r in self.simple_roots] for c in self.simple_coroots]
        for i, row in enumerate(self.cartan):
            if row[i] != 2:
                raise ValidationError(f"<alpha_{i + 1}^vee, alpha_{i + 1}> = {row[i]}, expected 2")
            for j, x in enumerate(row):
                if i != j and (x > 0 or x < -3 or (x == 0) != (self.cartan[j][i] == 0)):
                    raise ValidationError(f"Cartan entry ({i + 1}, {j + 1}) = {x} is not crystallographic")

        self.component_nodes = cartan.components_of(self.cartan) if self.cartan else []
        self.types: List[cartan.IrreducibleType] = []
        for nodes in self.component_nodes:
            kind, _ = cartan.recognize(self.cartan, nodes)
            self.types.append(kind)
        self.name = name or cartan.format_type(self.types)

        self._close_roots()
        logger.debug(f"Root datum {self.name} built: rank {self.rank}, {len(self.roots)} roots")

    # construction

    def _close_roots(self) -> None:
        n = len(self.simple_roots)
        pairs: Dict[Vector, Vector] = {}
        queue = deque(zip(self.simple_roots, self.simple_coroots))
        for r, c in queue:
            pairs[r] = c
        while queue:
            r, c = queue.popleft()
            for i in range(n):
                a, a_vee = self.simple_roots[i], self.simple_coroots[i]
                k = dot(a_vee, r)
                image = tuple(x - k * y for x, y in zip(r, a))
                if image in pairs:
                    continue
                l = dot(c, a)
                pairs[image] = tuple(x - l * y for x, y in zip(c, a_vee))
                queue.append((image, pairs[image]))
            if len(pairs) > 4 * 248:
                raise ValidationError("root closure does not terminate; not a finite root system")

        coefficients = {}
        for r in pairs:
            coeffs = solve_left(self.simple_roots, r)
            coefficients[r] = as_int_vector(coeffs)
            if not (all(x >= 0 for x in coefficients[r]) or all(x <= 0 for x in coefficients[r])):
                raise ValidationError(f"root {r} has mixed-sign simple coordinates")

        positive = [r for r in pairs if all(x >= 0 for x in coefficients[r])]
        positive.sort(key=lambda r: (sum(coefficients[r]), tuple(-x for x in coefficients[r])))
        negative = [tuple(-x for x in r) for r in positive]
        self.roots: List[Vector] = positive + negative
        self.coroots: List[Vector] = [pairs[r] for r in self.roots]
        self.coefficients: List[Vector] = [coefficients[r] for r in self.roots]
        self.index: Dict[Vector, int] = {r: i for i, r in enumerate(self.roots)}
        self.num_positive = len(positive)

    # basic queries

    @property
    def simple_indices(self) -> List[int]:
        return list(range(len(self.simple_roots)))

    @property
    def positive_indices(self) -> List[int]:
        return list(range(self.num_positive))

    def is_positive(self, i: int) -> bool:
        return i < self.num_positive

    def negative_of(self, i: int) -> int:
        return (i + self.num_positive) % len(self.roots)

    def height(self, i: int) -> int:
        return sum(self.coefficients[i])

    def reflect_x(self, i: int, x: Sequence) -> Tuple:
        """s_alpha(x) = x - <alpha^vee, x> alpha for root index i"""
        k = dot(self.coroots[i], x)
        return tuple(a - k * b for a, b in zip(x, self.roots[i]))

    def reflect_y(self, i: int, y: Sequence) -> Tuple:
        k = dot(y, self.roots[i])
        return tuple(a - k * b for a, b in zip(y, self.coroots[i]))

    @cached_property
    def component_of_root(self) -> List[int]:
        owner = {}
        for c, nodes in enumerate(self.component_nodes):
            for j in nodes:
                owner[j] = c
        out = []
        for coeffs in self.coefficients:
            support = [j for j, x in enumerate(coeffs) if x]
            out.append(owner[support[0]])
        return out

    @property
    def component_partition(self) -> List[List[int]]:
        parts: List[List[int]] = [[] for _ in self.component_nodes]
        for i, c in enumerate(self.component_of_root):
            parts[c].append(i)
        return parts

    @cached_property
    def norms(self) -> List[int]:
        """B(alpha, alpha) for the W-invariant form B(x, x') = sum <beta^vee, x><beta^vee, x'>"""
        return [sum(dot(c, r) ** 2 for c in self.coroots) for r in self.roots]

    def is_long(self, i: int) -> bool:
        c = self.component_of_root[i]
        return self.norms[i] == max(self.norms[j] for j in self.component_partition[c])

    def orbit_id(self, i: int) -> Tuple[int, bool]:
        """W0-orbit of a root: (component, long)"""
        return self.component_of_root[i], self.is_long(i)

    def coroot_content(self, i: int) -> int:
        """gcd of the Y-coordinates of alpha^vee, 2 exactly when alpha^vee lies in 2Y"""
        return vector_gcd(self.coroots[i])

    def highest_root(self, component: int) -> int:
        candidates = [i for i in self.component_partition[component] if self.is_positive(i)]
        return max(candidates, key=self.height)

    def highest_short_root(self, component: int) -> int:
        candidates = [i for i in self.component_partition[component] if self.is_positive(i)]
        shortest = min(self.norms[i] for i in candidates)
        return max((i for i in candidates if self.norms[i] == shortest), key=self.height)

    def c_n1_components(self) -> List[int]:
        """Components containing a root whose coroot lies in 2Y"""
        return sorted({self.component_of_root[i] for i in range(len(self.roots)) if self.coroot_content(i) == 2})

    @property
    def type_string(self) -> str:
        return cartan.format_type(self.types)

    def node_name(self, j: int) -> str:
        return f"s{j + 1}"

    def affine_node_name(self, component: int) -> str:
        return "s0" if len(self.component_nodes) == 1 else f"s0.{component + 1}"

    # lattices

    def omega_x(self) -> FiniteAbelianGroupPresentation:
        """X / Q(R0)"""
        return lattice_quotient(self.simple_roots, width=self.rank)

    def omega_y(self) -> FiniteAbelianGroupPresentation:
        """Y / Q(R0^vee)"""
        return lattice_quotient(self.simple_coroots, width=self.rank)

    def dual(self) -> "BasedRootDatum":
        """(Y, R0^vee, X, R0, F0^vee)"""
        return BasedRootDatum(self.simple_coroots, self.simple_roots, name=f"dual of {self.name}",
                              rank_hint=self.rank)

    def weyl(self):
        from rootdata.weyl import WeylGroup
        if not hasattr(self, "_weyl"):
            self._weyl = WeylGroup(self)
        return self._weyl

    def parabolic_restriction(self, subset: Sequence[int]) -> "ParabolicRestriction":
        return parabolic_restriction(self, subset)

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "type": self.type_string,
            "rank": self.rank,
            "simple_roots": [list(r) for r in self.simple_roots],
            "simple_coroots": [list(c) for c in self.simple_coroots],
            "roots": len(self.roots),
        }

    def __repr__(self) -> str:
        return f"BasedRootDatum({self.name}, rank {self.rank})"


def rank_zero_datum(name: str = "rank 0") -> BasedRootDatum:
    return BasedRootDatum([], [], name=name, rank_hint=0)


def build_root_datum(type_expr: str, lattice: str = "Q", basis: Optional[Sequence[Sequence]] = None,
                     name: Optional[str] = None) -> BasedRootDatum:
    """
    Build a validated datum from a type expression and a lattice choice

    Args:
        type_expr: product of irreducible types, e.g. "B3 x A1", or "T0" for the rank 0 torus
        lattice: "Q" (root lattice), "P" (weight lattice) or "basis"
        basis: rows in ambient coordinates when lattice is "basis"

    Raises:
        ValidationError: the lattice is not between Q(R0) and P(R0)
    """
    if type_expr.strip().upper() == cartan.RANK_ZERO:
        if lattice.strip().lower() == "basis" and basis:
            raise ValidationError("the rank 0 torus takes no basis rows")
        return rank_zero_datum(name or "rank 0")
    components = cartan.parse_type(type_expr)
    roots, coroots = cartan.ambient_simple_system(components)
    lattice = lattice.strip()
    if lattice.upper() == "Q":
        rows = [[Fraction(x) for x in r] for r in roots]
    elif lattice.upper() == "P":
        rows = transpose(inverse(coroots))
    elif lattice.lower() == "basis":
        if basis is None:
            raise ValidationError("lattice 'basis' needs a basis matrix")
        rows = [[Fraction(x) for x in r] for r in basis]
    else:
        raise ValidationError(f"unknown lattice choice '{lattice}'")

    n = len(roots)
    if len(rows) != n or any(len(r) != n for r in rows) or rank(rows) != n:
        raise ValidationError(f"basis must be {n} independent rows of length {n}")

    x_coords = []
    for r in roots:
        c = coordinates_in_sublattice(rows, r)
        if any(x.denominator != 1 for x in c):
            raise ValidationError("lattice does not contain the root lattice Q(R0)")
        x_coords.append(tuple(int(x) for x in c))
    y_coords = []
    for c in coroots:
        values = [sum(Fraction(a) * b for a, b in zip(c, row)) for row in rows]
        if any(v.denominator != 1 for v in values):
            raise ValidationError("lattice is not contained in the weight lattice P(R0)")
        y_coords.append(tuple(int(v) for v in values))

    datum = BasedRootDatum(x_coords, y_coords, name=name or f"{cartan.format_type(components)} ({lattice})")
    datum.ambient_basis = rows
    logger.info(f"Root datum {datum.name} built: rank {datum.rank}, {len(datum.roots)} roots, "
                f"|X/Q| = {datum.omega_x().order}")
    return datum


@dataclass
class ParabolicRestriction:
    """
    R_P inside R0 with its own based datum

    y_p and y_upper_p are HNF bases (in Y-coordinates of the ambient datum) of
    Y_P = saturation of the coroots of P and Y^P = annihilator of the roots of P.
    sub.simple_roots[j] corresponds to ambient simple root subset[j];
    root_map sends sub root indices to ambient root indices.
    """
    subset: Tuple[int, ...]
    sub: BasedRootDatum
    y_p: Tuple[Vector, ...]
    y_upper_p: Tuple[Vector, ...]
    root_map: List[int] = field(default_factory=list)
    k_p: FiniteAbelianGroupPresentation = field(default_factory=FiniteAbelianGroupPresentation)
    k_elements: List[Tuple[Fraction, ...]] = field(default_factory=list)

    def project_to_p(self, y: Sequence) -> Tuple[Fraction, ...]:
        """Component of y in Y_P (x) Q along Y^P (x) Q"""
        return project(y, self.y_p, self.y_upper_p)

    def coordinates_in_y_p(self, y: Sequence) -> Optional[List[Fraction]]:
        return coordinates_in_sublattice(self.y_p, y)


def project(y: Sequence, onto: Sequence[Sequence[int]], along: Sequence[Sequence[int]]) -> Tuple[Fraction, ...]:
    rows = [list(v) for v in onto] + [list(v) for v in along]
    if not onto:
        return tuple(Fraction(0) for _ in y)
    coeffs = solve_left(rows, y)
    if coeffs is None:
        raise ValidationError("projection requires complementary subspaces")
    out = [Fraction(0)] * len(y)
    for c, v in zip(coeffs[:len(onto)], onto):
        out = [a + c * b for a, b in zip(out, v)]
    return tuple(out)


def torsion_closure(generators: Sequence[Sequence[Fraction]], width: int) -> List[Tuple[Fraction, ...]]:
    """Subgroup of (Q/Z)^width generated by the vectors, sorted"""
    zero = tuple(Fraction(0) for _ in range(width))
    elements = {zero}
    frontier = [zero]
    gens = [tuple(Fraction(x) % 1 for x in g) for g in generators]
    while frontier:
        current = frontier.pop()
        for g in gens:
            image = tuple((a + b) % 1 for a, b in zip(current, g))
            if image not in elements:
                elements.add(image)
                frontier.append(image)
    return sorted(elements)


def parabolic_restriction(datum: BasedRootDatum, subset: Sequence[int]) -> ParabolicRestriction:
    """
    The based root datum R_P of a standard parabolic subset P of F0

    Returns:
        ParabolicRestriction with the sub-datum, the lattices Y_P and Y^P and
        K_P = T_P intersect T^P, isomorphic to Y / (Y_P + Y^P)
    """
    subset = tuple(sorted(set(subset)))
    if any(j not in datum.simple_indices for j in subset):
        raise ValidationError(f"{list(subset)} is not a subset of the simple roots")
    n = datum.rank
    p_roots = [datum.simple_roots[j] for j in subset]
    p_coroots = [datum.simple_coroots[j] for j in subset]

    y_p = saturation(p_coroots, n) if subset else ()
    y_upper_p = kernel([list(r) for r in p_roots], width=n) if subset else tuple(tuple(row) for row in _identity(n))

    sub_roots = [tuple(dot(c, a) for c in y_p) for a in p_roots]
    sub_coroots = []
    for c in p_coroots:
        coords = coordinates_in_sublattice(y_p, c)
        sub_coroots.append(as_int_vector(coords))
    sub = BasedRootDatum(sub_roots, sub_coroots, name=f"{datum.name} restricted to {[j + 1 for j in subset]}",
                         rank_hint=len(y_p))

    root_map = []
    for r in sub.roots:
        # the ambient root with these Y_P pairings and support in P
        coeffs = sub.coefficients[sub.index[r]]
        ambient = [0] * n
        for j, x in zip(subset, coeffs):
            ambient = [a + x * b for a, b in zip(ambient, datum.simple_roots[j])]
        root_map.append(datum.index[tuple(ambient)])

    combined = [list(v) for v in y_p] + [list(v) for v in y_upper_p]
    quotient = lattice_quotient(combined, width=n) if n else FiniteAbelianGroupPresentation()
    generators = [project(g, y_p, y_upper_p) for g in quotient.generators]
    quotient.generators = [tuple(x % 1 for x in g) for g in generators]
    elements = torsion_closure(quotient.generators, n)
    if len(elements) != quotient.order:
        raise ValidationError(f"K_P has {len(elements)} elements but index {quotient.order}")

    logger.debug(f"Parabolic restriction to {list(subset)}: rank {sub.rank}, |K_P| = {quotient.order}")
    return ParabolicRestriction(subset, sub, y_p, y_upper_p, root_map, quotient, elements)


def _identity(n: int) -> List[List[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]
