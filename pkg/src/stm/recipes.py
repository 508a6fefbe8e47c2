"""
Transfer Map Recipes
Finite families of candidate maps: identity, Weyl, translations, lattice inclusions, eta, rank 0 and coverings
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from loguru import logger

from core.config import Limits, current_limits
from core.errors import CertificationError, ValidationError
from diagrams.symmetry import spectral_isomorphism_eta
from exactscalars.normalizing import NormalizingElement, factor_into_M
from mu.function import regularize
from residual.enumerate import enumerate_residual_points
from rootdata.datum import rank_zero_datum
from rootdata.lattice import determinant, dot, inverse, mat_mul, transpose
from rootdata.parameters import ParameterFunction
from stm.transfer import (
    NormalizedAlgebra,
    SpectralTransferMap,
    STMorphism,
    as_matrix,
    equivalent,
    identity_matrix,
    morphism,
)
from torus.coset import Coset
from torus.point import TorusPoint

IDENTITY = "identity"
WEYL = "weyl"
TRANSLATION = "translation"
INCLUSION = "inclusion"
RANK0 = "rank0"
ETA = "eta"
EXPLICIT = "explicit"
COVERING = "covering"

RECIPES = (IDENTITY, WEYL, TRANSLATION, INCLUSION, COVERING, RANK0, ETA, EXPLICIT)


def identity_map(algebra: NormalizedAlgebra) -> SpectralTransferMap:
    n = algebra.rank
    return SpectralTransferMap(algebra, algebra, Coset.whole_torus(n), identity_matrix(n),
                               TorusPoint.identity(n), IDENTITY)


def weyl_map(algebra: NormalizedAlgebra, word: Sequence[int]) -> SpectralTransferMap:
    """t -> w(t) for w given by a word in the simple reflections (0-based)"""
    w = algebra.datum.weyl().from_word(word)
    n = algebra.rank
    return SpectralTransferMap(algebra, algebra, Coset.whole_torus(n), as_matrix(w.y_matrix.tolist(), n),
                               TorusPoint.identity(n), WEYL)


def translation_map(algebra: NormalizedAlgebra, point: TorusPoint) -> SpectralTransferMap:
    """
    Raises:
        ValidationError: the point is not a torsion point of T
    """
    if point.rank != algebra.rank or not point.is_torsion():
        raise ValidationError(f"translation needs a torsion point of rank {algebra.rank}, got {point.render()}")
    n = algebra.rank
    return SpectralTransferMap(algebra, algebra, Coset.whole_torus(n), identity_matrix(n), point, TRANSLATION)


def inclusion_map(source: NormalizedAlgebra, target: NormalizedAlgebra) -> SpectralTransferMap:
    """
    T1 -> T2 dual to X2 inside X1, both lattices given in common ambient coordinates

    Raises:
        ValidationError: a datum has no ambient basis, or X2 is not contained in X1
    """
    b1 = getattr(source.datum, "ambient_basis", None)
    b2 = getattr(target.datum, "ambient_basis", None)
    if b1 is None or b2 is None:
        raise ValidationError("inclusion needs data built from a type and a lattice")
    if len(b1) != len(b2):
        raise ValidationError(f"ranks differ: {len(b1)} and {len(b2)}")
    c = mat_mul(b2, inverse(b1))
    if any(Fraction(x).denominator != 1 for row in c for x in row):
        raise ValidationError(f"X of {target.name} is not contained in X of {source.name}")
    n = target.rank
    return SpectralTransferMap(source, target, Coset.whole_torus(n), as_matrix(c, n),
                               TorusPoint.identity(n), INCLUSION)


def rank_zero_algebra(d0: NormalizingElement, name: str = "rank 0") -> NormalizedAlgebra:
    datum = rank_zero_datum(name)
    return NormalizedAlgebra(datum, ParameterFunction(datum, [], []), d0)


def rank0_map(target: NormalizedAlgebra, point: TorusPoint, d0: NormalizingElement,
              source: Optional[NormalizedAlgebra] = None) -> SpectralTransferMap:
    """
    The point r as a map from the rank 0 algebra with normalization d0

    Raises:
        ValidationError: source is given but is not of rank 0 with normalization d0
    """
    if source is None:
        source = rank_zero_algebra(d0)
    elif source.rank != 0 or source.d != d0:
        raise ValidationError(f"{source.name} is not the rank 0 algebra with d = {d0.render()}")
    return SpectralTransferMap(source, target, Coset.point(point), (), point, RANK0)


def eta_map(algebra: NormalizedAlgebra, class_name: str) -> SpectralTransferMap:
    """eta^c from (R, m) to (R, eta^c(m)); the torus part is a central translation or the identity"""
    eta = spectral_isomorphism_eta(algebra.datum, algebra.parameters, class_name)
    target = NormalizedAlgebra(algebra.datum, eta.target, algebra.d)
    n = algebra.rank
    return SpectralTransferMap(algebra, target, Coset.whole_torus(n), identity_matrix(n), eta.base, ETA)


def explicit_map(source: NormalizedAlgebra, target: NormalizedAlgebra, matrix: Sequence[Sequence[int]],
                 base: TorusPoint, coset: Coset) -> SpectralTransferMap:
    return SpectralTransferMap(source, target, coset, as_matrix(matrix, target.rank), base, EXPLICIT)


def _simple_images(source: NormalizedAlgebra, target: NormalizedAlgebra) -> List[List[int]]:
    """Root indices of R1 carrying the simple roots of R2 with the same Cartan integers"""
    d1, d2 = source.datum, target.datum
    n = d2.rank
    found: List[List[int]] = []

    def extend(chosen: List[int]) -> None:
        j = len(chosen)
        if j == n:
            found.append(list(chosen))
            return
        for r in range(len(d1.roots)):
            if r in chosen:
                continue
            if all(dot(d1.coroots[chosen[i]], d1.roots[r]) == d2.cartan[i][j]
                   and dot(d1.coroots[r], d1.roots[chosen[i]]) == d2.cartan[j][i] for i in range(j)):
                extend(chosen + [r])

    extend([])
    return found


def covering_maps(source: NormalizedAlgebra, target: NormalizedAlgebra,
                  limits: Optional[Limits] = None) -> List[STMorphism]:
    """
    Verified coverings T1 -> T2 through the identity, one per W2-class

    Candidates send the simple roots of R2 to a simple system of R1 with the
    same Cartan matrix; the cocharacter map must be integral of index at most
    covering_index_bound.
    """
    limits = current_limits(limits)
    if source.rank != target.rank:
        raise ValidationError("coverings need equal ranks")
    n = target.rank
    simple2 = transpose([list(r) for r in target.datum.simple_roots])
    found: List[STMorphism] = []
    for images in _simple_images(source, target):
        columns = transpose([list(source.datum.roots[i]) for i in images])
        character_map = mat_mul(columns, inverse(simple2))
        if any(Fraction(x).denominator != 1 for row in character_map for x in row):
            continue
        matrix = transpose(character_map)
        index = abs(determinant(matrix))
        if index == 0 or index > limits.covering_index_bound:
            continue
        phi = SpectralTransferMap(source, target, Coset.whole_torus(n), as_matrix(matrix, n),
                                  TorusPoint.identity(n), COVERING)
        if any(equivalent(phi, other.representative) for other in found):
            continue
        candidate = morphism(phi, limits)
        if candidate.record.valid:
            found.append(candidate)
    logger.info(f"Coverings {source.name} -> {target.name}: {len(found)} classes")
    return found


@dataclass
class Rank0Match:
    """A residual orbit W0 r with d0 = lam * mu^({r})"""
    representative: TorusPoint
    lam: Fraction
    morphism: STMorphism

    def render(self) -> str:
        return f"{self.representative.render()}: lambda = {self.lam}, a = {self.morphism.record.a}"

    def to_dict(self) -> Dict:
        return {"point": self.representative.to_dict(), "lambda": str(self.lam),
                "verification": self.morphism.record.to_dict()}


def search_rank0(target: NormalizedAlgebra, d0: NormalizingElement,
                 limits: Optional[Limits] = None) -> List[Rank0Match]:
    """
    All residual point orbits W0 r of the target with d0 / mu^({r}) in Q^x

    The comparison is made on M-certificates: the (v - v^-1) exponents and
    q-integer exponents must agree, and lambda is the quotient of constants.
    """
    limits = current_limits(limits)
    matches: List[Rank0Match] = []
    for orbit in enumerate_residual_points(target.datum, target.parameters, limits):
        r = orbit.representative
        value = regularize(target.mu, Coset.point(r)).value()
        try:
            certificate, sign = factor_into_M(value)
        except CertificationError as e:
            logger.warning(f"mu^({{r}}) at {r.render()} is not in M: {e}")
            continue
        if certificate.vexp != d0.vexp or certificate.qints != d0.qints:
            continue
        lam = sign * d0.constant / certificate.constant
        found = morphism(rank0_map(target, r, d0), limits)
        matches.append(Rank0Match(r, lam, found))
    logger.info(f"Rank 0 search on {target.name} for d0 = {d0.render()}: {len(matches)} orbits")
    return matches
