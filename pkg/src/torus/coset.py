"""
Cosets of Subtori
L = r * T^L with canonical keys, W0-orbit keys and the finite groups K_L, K_L^n
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

from loguru import logger

from core.errors import ValidationError
from rootdata.datum import BasedRootDatum, ParabolicRestriction, project, torsion_closure
from rootdata.lattice import (
    FiniteAbelianGroupPresentation,
    dot,
    hermite_normal_form,
    hnf_basis,
    identity,
    kernel,
    lattice_quotient,
    mat_vec,
    rank,
    saturation,
)
from rootdata.weyl import WeylElement, WeylGroup
from torus.point import TorusPoint

Vector = Tuple[int, ...]
CosetKey = Tuple[Tuple[Vector, ...], Tuple[Tuple[Fraction, Fraction], ...]]


@dataclass(frozen=True)
class Coset:
    """
    base * T^L where T^L is the subtorus with cocharacter lattice spanned by subtorus

    subtorus is stored as the HNF basis of its saturation. parabolic and
    conjugator record a presentation L = w(r T^P) when one is known.
    """
    base: TorusPoint
    subtorus: Tuple[Vector, ...] = ()
    parabolic: Tuple[int, ...] = ()
    conjugator: Tuple[int, ...] = ()

    def __post_init__(self):
        rows = [tuple(int(x) for x in row) for row in self.subtorus]
        if rows:
            rows = list(saturation(rows, self.base.rank))
        object.__setattr__(self, "subtorus", tuple(hnf_basis(rows)) if rows else ())

    @classmethod
    def whole_torus(cls, n: int) -> "Coset":
        return cls(TorusPoint.identity(n), tuple(tuple(row) for row in identity(n)))

    @classmethod
    def point(cls, p: TorusPoint) -> "Coset":
        return cls(p, ())

    @property
    def rank(self) -> int:
        return self.base.rank

    @property
    def dim(self) -> int:
        return len(self.subtorus)

    @property
    def codim(self) -> int:
        return self.rank - self.dim

    @cached_property
    def annihilator(self) -> Tuple[Vector, ...]:
        """HNF basis of the characters trivial on T^L"""
        if not self.subtorus:
            return tuple(tuple(row) for row in identity(self.rank))
        return kernel([list(y) for y in self.subtorus])

    def constant_roots(self, datum: BasedRootDatum) -> List[int]:
        """R_L: roots constant on L"""
        return [i for i, r in enumerate(datum.roots) if all(dot(y, r) == 0 for y in self.subtorus)]

    def values(self) -> Tuple[Tuple[Fraction, Fraction], ...]:
        return tuple(self.base.evaluate(x) for x in self.annihilator)

    @property
    def key(self) -> CosetKey:
        return self.subtorus, self.values()

    def contains(self, p: TorusPoint) -> bool:
        for x, (phase, exponent) in zip(self.annihilator, self.values()):
            p_phase, p_exponent = p.evaluate(x)
            if p_phase != phase or p_exponent != exponent:
                return False
        return True

    def act(self, w: WeylElement) -> "Coset":
        rows = [w.act_y(y) for y in self.subtorus]
        return Coset(self.base.act(w.y_matrix), tuple(rows), self.parabolic, w.word + self.conjugator)

    def transformed_key(self, w: WeylElement) -> CosetKey:
        """key of w(L) computed from the transported annihilator"""
        subtorus = hnf_basis([w.act_y(y) for y in self.subtorus]) if self.subtorus else ()
        moved = [list(w.act_x(x)) for x in self.annihilator]
        values = self.values()
        if not moved:
            return tuple(subtorus), ()
        h, u = hermite_normal_form(moved)
        new_values = []
        for row in u[:len(h)]:
            phase = sum((c * v[0] for c, v in zip(row, values)), Fraction(0)) % 1
            exponent = sum((c * v[1] for c, v in zip(row, values)), Fraction(0))
            new_values.append((phase, exponent))
        return tuple(subtorus), tuple(new_values)

    def orbit_key(self, weyl: WeylGroup) -> CosetKey:
        """Least key over the W0-orbit"""
        return min(self.transformed_key(w) for w in weyl)

    def y_l(self, datum: BasedRootDatum) -> Tuple[Vector, ...]:
        """Saturation of the coroots of R_L"""
        coroots = [datum.coroots[i] for i in self.constant_roots(datum)]
        return saturation(coroots, self.rank) if coroots else ()

    def normalized_base(self, datum: BasedRootDatum) -> TorusPoint:
        """The point of L lying in T_L"""
        y_l = self.y_l(datum)
        if len(y_l) + self.dim != self.rank or (y_l and rank([list(v) for v in y_l + self.subtorus]) != self.rank):
            raise ValidationError("R_L does not span a complement of T^L")
        return TorusPoint(project(self.base.torsion, y_l, self.subtorus),
                          project(self.base.gamma, y_l, self.subtorus))

    def in_t_l(self, p: TorusPoint, datum: BasedRootDatum) -> bool:
        y_l = self.y_l(datum)
        if not y_l:
            return all(p.evaluate(x) == (0, 0) for x in identity(self.rank))
        for x in kernel([list(v) for v in y_l]):
            if p.evaluate(x) != (0, 0):
                return False
        return True

    def render(self) -> str:
        p = "[" + ",".join(str(j + 1) for j in self.parabolic) + "]"
        return f"P={p} dim={self.dim} base: {self.base.render()}"

    def to_dict(self) -> Dict:
        return {
            "P": [j + 1 for j in self.parabolic],
            "conjugator": [j + 1 for j in self.conjugator],
            "dim": self.dim,
            "subtorus": [list(y) for y in self.subtorus],
            "base": self.base.to_dict(),
        }


def embed_parabolic_point(restriction: ParabolicRestriction, point: TorusPoint, rank_: int) -> Coset:
    """L = r T^P for a point r of the parabolic sub-datum, given in Y_P coordinates"""
    torsion = [Fraction(0)] * rank_
    gamma = [Fraction(0)] * rank_
    for c, t, g in zip(restriction.y_p, point.torsion, point.gamma):
        torsion = [a + t * b for a, b in zip(torsion, c)]
        gamma = [a + g * b for a, b in zip(gamma, c)]
    return Coset(TorusPoint(tuple(torsion), tuple(gamma)), restriction.y_upper_p, restriction.subset, ())


@dataclass
class KGroups:
    """K_L = T_L intersect T^L and the stabilizer data of L in W0"""
    k_l: List[Tuple[Fraction, ...]] = field(default_factory=list)
    presentation: FiniteAbelianGroupPresentation = field(default_factory=FiniteAbelianGroupPresentation)
    normalizer: List[WeylElement] = field(default_factory=list)
    centralizer: List[WeylElement] = field(default_factory=list)
    reflection_subgroup: List[WeylElement] = field(default_factory=list)
    k_l_n: Dict[Tuple[Fraction, ...], WeylElement] = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return {
            "K_L": {"order": len(self.k_l), "elements": [[str(x) for x in t] for t in self.k_l]},
            "K_L^n": {"order": len(self.k_l_n),
                      "elements": [{"zeta": [str(x) for x in t], "w": w.render()} for t, w in sorted(self.k_l_n.items())]},
            "N_W0(L)": len(self.normalizer),
            "Z_W0(L)": len(self.centralizer),
            "W(R_L)": len(self.reflection_subgroup),
        }


def k_groups(coset: Coset, datum: BasedRootDatum, weyl: Optional[WeylGroup] = None) -> KGroups:
    """
    K_L, K_L^n, N_W0(L), Z_W0(L) and W(R_L) for a coset whose R_L spans a complement of T^L

    K_L^n collects w(r)/r for w in W(R_L) intersect N_W0(L), r the normalized
    base; each element is stored with its first representing w.
    """
    weyl = weyl or datum.weyl()
    n = coset.rank
    y_l = coset.y_l(datum)
    combined = [list(v) for v in y_l] + [list(v) for v in coset.subtorus]
    if n and rank(combined) != n:
        raise ValidationError("R_L does not span a complement of T^L")
    presentation = lattice_quotient(combined, width=n) if n else FiniteAbelianGroupPresentation()
    presentation.generators = [tuple(x % 1 for x in project(g, y_l, coset.subtorus)) for g in presentation.generators]
    elements = torsion_closure(presentation.generators, n)

    base = coset.normalized_base(datum)
    key = coset.key
    normalizer, centralizer, reflection_subgroup = [], [], []
    k_l_n: Dict[Tuple[Fraction, ...], WeylElement] = {}
    for w in weyl:
        fixes_subtorus = all(w.act_y(y) == tuple(y) for y in coset.subtorus)
        stabilizes = coset.transformed_key(w) == key
        if stabilizes:
            normalizer.append(w)
        if fixes_subtorus:
            reflection_subgroup.append(w)
            moved = base.act(w.y_matrix)
            if moved == base:
                centralizer.append(w)
            if stabilizes:
                quotient = moved / base
                if not quotient.is_torsion():
                    raise ValidationError(f"w(r)/r = {quotient.render()} is not a torsion point")
                k_l_n.setdefault(quotient.torsion, w)

    logger.debug(f"K groups of {coset.render()}: |K_L| = {len(elements)}, |K_L^n| = {len(k_l_n)}, "
                 f"|N| = {len(normalizer)}, |Z| = {len(centralizer)}")
    return KGroups(elements, presentation, normalizer, centralizer, reflection_subgroup, k_l_n)


def translate(coset: Coset, t: TorusPoint) -> Coset:
    return Coset(coset.base * t, coset.subtorus, coset.parabolic, coset.conjugator)


def image_coset(coset: Coset, matrix: Sequence[Sequence[int]], base: TorusPoint) -> Coset:
    """base * phi(L) for phi with cocharacter map y -> matrix y"""
    rows = [tuple(mat_vec(matrix, y)) for y in coset.subtorus]
    rows = [r for r in rows if any(r)]
    return Coset(base * coset.base.image(matrix), tuple(rows))
