"""
Spectral Transfer Maps
Normalized algebras, candidate torus maps into residual cosets, the T1-T4 checks, equivalence and composition
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

from loguru import logger

from core.config import Limits, current_limits
from core.errors import AccountingError, CertificationError, ValidationError
from exactscalars.normalizing import NormalizingElement
from mu.function import MuFunction, build_mu, regularize
from mu.oracle import torsion_grid
from residual.enumerate import ResidualCatalog, enumerate_residual_cosets
from rootdata.datum import BasedRootDatum
from rootdata.lattice import coordinates_in_sublattice, determinant, identity, mat_mul, rank, transpose
from rootdata.parameters import ParameterFunction
from torus.coset import Coset, KGroups, image_coset, k_groups
from torus.point import TorusPoint

Matrix = Tuple[Tuple[int, ...], ...]


def as_matrix(rows: Sequence[Sequence[int]], height: int) -> Matrix:
    """Integer matrix as nested tuples; an n x 0 matrix keeps its n empty rows"""
    matrix = tuple(tuple(int(x) for x in row) for row in rows)
    return matrix if matrix else tuple(() for _ in range(height))


@dataclass
class NormalizedAlgebra:
    """(H(R, m), tau^d): a root datum with parameters and a normalizing element"""
    datum: BasedRootDatum
    parameters: ParameterFunction
    d: NormalizingElement = field(default_factory=NormalizingElement.of)

    @property
    def name(self) -> str:
        return self.datum.name

    @property
    def rank(self) -> int:
        return self.datum.rank

    @cached_property
    def mu(self) -> MuFunction:
        return build_mu(self.datum, self.parameters, self.d)

    def catalog(self, limits: Optional[Limits] = None) -> ResidualCatalog:
        if not hasattr(self, "_catalog"):
            self._catalog = enumerate_residual_cosets(self.datum, self.parameters, self.d, limits)
        return self._catalog

    def same_as(self, other: "NormalizedAlgebra") -> bool:
        return (self.datum.simple_roots == other.datum.simple_roots
                and self.datum.simple_coroots == other.datum.simple_coroots
                and self.parameters.two_m_plus == other.parameters.two_m_plus
                and self.parameters.two_m_minus == other.parameters.two_m_minus and self.d == other.d)

    def render(self) -> str:
        return f"{self.name} with {self.parameters.render()}, d = {self.d.render()}"

    def to_dict(self) -> Dict:
        return {"datum": self.datum.to_dict(), "parameters": self.parameters.to_dict(), "d": self.d.to_dict()}


@dataclass
class SpectralTransferMap:
    """
    phi_T: T1 -> L inside T2, t -> base * matrix(t)

    matrix is the n2 x n1 integer matrix of the cocharacter map Y1 -> Y2;
    coset is the residual coset L of the target containing the image.
    """
    source: NormalizedAlgebra
    target: NormalizedAlgebra
    coset: Coset
    matrix: Matrix
    base: TorusPoint
    recipe: str = "explicit"

    def __post_init__(self):
        self.matrix = as_matrix(self.matrix, self.target.rank)
        if len(self.matrix) != self.target.rank or any(len(row) != self.source.rank for row in self.matrix):
            raise ValidationError(f"linear part must be {self.target.rank} x {self.source.rank}")
        if self.base.rank != self.target.rank or self.coset.rank != self.target.rank:
            raise ValidationError("base point and coset must live on the target torus")

    def apply(self, p: TorusPoint) -> TorusPoint:
        return self.base * p.image(self.matrix)

    @property
    def rank(self) -> int:
        """dim T1"""
        return self.source.rank

    @property
    def shifted_rank(self) -> int:
        """dim T1 - 1"""
        return self.source.rank - 1

    @property
    def corank(self) -> int:
        return self.target.rank - self.source.rank

    def image(self) -> Coset:
        return image_coset(Coset.whole_torus(self.source.rank), self.matrix, self.base)

    def render(self) -> str:
        rows = ";".join(",".join(str(x) for x in row) for row in self.matrix)
        return (f"{self.recipe}: {self.source.name} -> {self.target.name}, matrix [{rows}], "
                f"base {self.base.render()}, L: {self.coset.render()}")

    def to_dict(self) -> Dict:
        return {
            "recipe": self.recipe,
            "source": self.source.to_dict(),
            "target": self.target.to_dict(),
            "matrix": [list(row) for row in self.matrix],
            "base": self.base.to_dict(),
            "coset": self.coset.to_dict(),
            "rank": self.rank,
            "rank_minus_one": self.shifted_rank,
            "corank": self.corank,
        }


@dataclass
class VerificationRecord:
    """Per-axiom verdicts of a candidate; t4 is None when the source is semi-standard"""
    t1: bool
    t2: bool
    t3: bool
    t4: Optional[bool] = None
    a: Optional[Fraction] = None
    index: int = 0
    order_consistent: bool = True
    witnesses: Dict[str, str] = field(default_factory=dict)
    density_ratio: str = ""

    @property
    def valid(self) -> bool:
        return self.t1 and self.t2 and self.t3 and self.t4 is not False

    @property
    def heuristic_t4(self) -> bool:
        return self.t4 is not None

    def failed(self) -> List[str]:
        flags = [("T1", self.t1), ("T2", self.t2), ("T3", self.t3), ("T4", self.t4 is not False)]
        return [name for name, ok in flags if not ok]

    def render(self) -> str:
        if self.valid:
            text = f"VALID, a = {self.a}"
            if self.heuristic_t4:
                text += " (T4 checked on test points)"
            return text
        lines = [f"INVALID: {', '.join(self.failed())} failed"]
        for name in self.failed():
            if name in self.witnesses:
                lines.append(f"  {name}: {self.witnesses[name]}")
        return "\n".join(lines)

    def to_dict(self) -> Dict:
        return {
            "valid": self.valid,
            "T1": self.t1,
            "T2": self.t2,
            "T3": self.t3,
            "T4": self.t4,
            "T4_heuristic": self.heuristic_t4,
            "a": None if self.a is None else str(self.a),
            "index": self.index,
            "order_consistent": self.order_consistent,
            "density_ratio": self.density_ratio,
            "witnesses": dict(sorted(self.witnesses.items())),
        }


def _check_finite(phi: SpectralTransferMap) -> Tuple[bool, int, str]:
    """T1: the columns of the matrix span a finite-index sublattice of the cocharacters of T^L"""
    n1 = phi.source.rank
    if phi.coset.dim != n1:
        return False, 0, f"dim T1 = {n1} but dim L = {phi.coset.dim}"
    if n1 == 0:
        return True, 1, ""
    columns = transpose([list(row) for row in phi.matrix])
    if rank(columns) != n1:
        return False, 0, f"linear part has rank {rank(columns)} < {n1}"
    coords = []
    for c in columns:
        x = coordinates_in_sublattice([list(y) for y in phi.coset.subtorus], c)
        if x is None:
            return False, 0, f"column {c} leaves the subtorus of L"
        coords.append(x)
    return True, abs(int(determinant(coords))), ""


def _check_t4(phi: SpectralTransferMap, kg: KGroups) -> Tuple[bool, str]:
    """Images of W1-orbits of small torsion points lie in single N(L) K_L^n orbits"""
    weyl1 = phi.source.datum.weyl()
    weyl2 = phi.target.datum.weyl()
    normalizer = kg.normalizer or [weyl2.identity]
    shifts = [TorusPoint(t, (Fraction(0),) * phi.target.rank) for t in kg.k_l_n] or [TorusPoint.identity(phi.target.rank)]
    bound = max(phi.source.datum.omega_x().order, 2)
    for torsion in torsion_grid(phi.source.rank, bound):
        p = TorusPoint(torsion, (Fraction(0),) * phi.source.rank)
        image = phi.apply(p)
        orbit = {(image.act(w.y_matrix) * k).key for w in normalizer for k in shifts}
        for w1 in weyl1:
            moved = phi.apply(p.act(w1.y_matrix))
            if moved.key not in orbit:
                return False, f"{p.render()} and {w1.render()} of it map to different N(L)-orbits"
    return True, ""


def verify_stm(phi: SpectralTransferMap, limits: Optional[Limits] = None) -> VerificationRecord:
    """
    Check T1-T4 for a candidate; failed axioms are reported, not raised

    Raises:
        ValidationError: L is not residual for the target
        CertificationError: the T3 constant exists but is not rational, or the
            vanishing orders of d1 and d2 contradict a verified T3
    """
    limits = current_limits(limits)
    t1, index, w1 = _check_finite(phi)
    record = VerificationRecord(t1, False, False, index=index)
    if w1:
        record.witnesses["T1"] = w1

    record.t2 = phi.coset.contains(phi.base)
    if not record.t2:
        record.witnesses["T2"] = f"base {phi.base.render()} is not on L"

    regularized = regularize(phi.target.mu, phi.coset)
    pulled = regularized.on_torus.pullback([list(row) for row in phi.matrix], phi.base.torsion,
                                           phi.base.gamma, width=phi.source.rank)
    own = phi.source.mu.as_function()
    quotient = pulled / own
    record.density_ratio = quotient.render()
    if quotient.is_constant():
        a = quotient.constant_value()
        if not isinstance(a, Fraction):
            raise CertificationError(f"T3 constant {a.render()} of {phi.render()} is not rational")
        record.t3 = True
        record.a = a
    else:
        record.witnesses["T3"] = f"pulled-back density / mu1 = {quotient.render()}"

    record.order_consistent = phi.source.d.order == phi.target.d.order + phi.coset.codim
    if record.t3 and not record.order_consistent:
        raise CertificationError(f"T3 holds but ord(d1) = {phi.source.d.order} differs from "
                                 f"ord(d2) + codim L = {phi.target.d.order + phi.coset.codim}")

    if not phi.source.parameters.is_semi_standard() and record.t1 and record.t2:
        logger.warning(f"T4 for {phi.recipe} is checked on test points only")
        record.t4, w4 = _check_t4(phi, k_groups(phi.coset, phi.target.datum))
        if w4:
            record.witnesses["T4"] = w4

    logger.info(f"Verified {phi.recipe} {phi.source.name} -> {phi.target.name}: "
                f"{'valid' if record.valid else 'invalid ' + ','.join(record.failed())}, a = {record.a}")
    return record


@dataclass
class STMorphism:
    """The W2-class of a verified spectral transfer map"""
    representative: SpectralTransferMap
    record: VerificationRecord

    @property
    def rank(self) -> int:
        return self.representative.rank

    @property
    def corank(self) -> int:
        return self.representative.corank

    def image_orbit_key(self):
        return self.representative.image().orbit_key(self.representative.target.datum.weyl())

    def render(self) -> str:
        phi = self.representative
        return "\n".join([phi.render(),
                          f"rk = {phi.rank} (dim T1 - 1 = {phi.shifted_rank}), cork = {phi.corank}",
                          self.record.render()])

    def to_dict(self) -> Dict:
        out = self.representative.to_dict()
        out["verification"] = self.record.to_dict()
        return out


def morphism(phi: SpectralTransferMap, limits: Optional[Limits] = None) -> STMorphism:
    """Verify and wrap; an invalid candidate is still wrapped with its record"""
    return STMorphism(phi, verify_stm(phi, limits))


def _k_shifts(phi: SpectralTransferMap) -> List[TorusPoint]:
    zero = (Fraction(0),) * phi.target.rank
    try:
        kg = k_groups(phi.coset, phi.target.datum)
    except ValidationError:
        return [TorusPoint.identity(phi.target.rank)]
    return [TorusPoint(t, zero) for t in kg.k_l_n] or [TorusPoint.identity(phi.target.rank)]


def equivalent(first: SpectralTransferMap, second: SpectralTransferMap) -> bool:
    """second = w o first modulo K_L^n for some w in W_2,0"""
    if not (first.source.same_as(second.source) and first.target.same_as(second.target)):
        return False
    shifts = {k.key for k in _k_shifts(second)}
    target_key = second.coset.key
    a1 = [list(row) for row in first.matrix]
    a2 = [list(row) for row in second.matrix]
    for w in first.target.datum.weyl():
        n_w = [[int(x) for x in row] for row in w.y_matrix]
        if mat_mul(n_w, a1) != a2:
            continue
        if first.coset.transformed_key(w) != target_key:
            continue
        quotient = first.base.act(w.y_matrix) / second.base
        if quotient.key in shifts:
            return True
    return False


def compose(phi: SpectralTransferMap, psi: SpectralTransferMap, limits: Optional[Limits] = None) -> STMorphism:
    """
    psi o phi for phi: H1 ~> H2 and psi: H2 ~> H3, re-verified end to end

    Raises:
        ValidationError: the target of phi is not the source of psi
        AccountingError: the composite fails verification
    """
    if not phi.target.same_as(psi.source):
        raise ValidationError(f"cannot compose: {phi.target.render()} is not {psi.source.render()}")
    b = [list(row) for row in psi.matrix]
    matrix = mat_mul(b, [list(row) for row in phi.matrix]) if phi.source.rank else []
    base = psi.apply(phi.base)
    coset = image_coset(phi.coset, b, psi.base)
    rho = SpectralTransferMap(phi.source, psi.target, coset, as_matrix(matrix, psi.target.rank), base,
                              recipe=f"{psi.recipe} o {phi.recipe}")
    record = verify_stm(rho, limits)
    if not record.valid:
        raise AccountingError(f"composite {rho.render()} fails {', '.join(record.failed())}")
    return STMorphism(rho, record)


def identity_matrix(n: int) -> Matrix:
    return as_matrix(identity(n), n)
