"""
The mu-function
Macdonald c-factors, the factor ledger of mu, pole/zero sets on cosets and regularization
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Tuple

from loguru import logger

from core.errors import AccountingError, ValidationError
from exactscalars.factored import FactoredFunction, HALF
from exactscalars.normalizing import NormalizingElement
from rootdata.datum import BasedRootDatum
from rootdata.lattice import transpose
from rootdata.parameters import ParameterFunction
from torus.coset import Coset
from torus.point import TorusPoint

NUM_PLUS = "num-plus"
NUM_MINUS = "num-minus"
DEN_PLUS = "den-plus"
DEN_MINUS = "den-minus"
KINDS = (NUM_PLUS, NUM_MINUS, DEN_PLUS, DEN_MINUS)


@dataclass(frozen=True)
class MuFactor:
    """(1 - e(phase) v^k alpha^-1) raised to mult, alpha = roots[root]"""
    root: int
    kind: str
    phase: Fraction
    k: int
    mult: int

    def render(self, datum: BasedRootDatum) -> str:
        sign = "+" if self.phase == HALF else "-"
        coeffs = ",".join(str(c) for c in datum.coefficients[self.root])
        v = "" if self.k == 0 else f"v^{self.k}*"
        body = f"(1 {sign} {v}x[{coeffs}]^-1)"
        return body if self.mult == 1 else f"{body}^{self.mult}"

    def to_dict(self, datum: BasedRootDatum) -> Dict:
        return {"root": list(datum.coefficients[self.root]), "kind": self.kind,
                "sign": "+" if self.phase == HALF else "-", "v": self.k, "mult": self.mult}


def c_factors(datum: BasedRootDatum, m: ParameterFunction, i: int) -> List[MuFactor]:
    """
    c_{m,alpha} = (1 + v^-2m-(alpha) alpha^-1)(1 - v^-2m+(alpha) alpha^-1) / (1 - alpha^-2)

    The denominator is split as (1 - alpha^-1)(1 + alpha^-1); factors are
    labelled by the role they play in mu = 1 / (c c^w0), so the numerator of
    c appears as den-* and the denominator as num-*.
    """
    if not 0 <= i < len(datum.roots):
        raise ValidationError(f"root index {i} out of range")
    return [
        MuFactor(i, DEN_MINUS, HALF, -m.two_m_minus[i], 1),
        MuFactor(i, DEN_PLUS, Fraction(0), -m.two_m_plus[i], 1),
        MuFactor(i, NUM_PLUS, Fraction(0), 0, 1),
        MuFactor(i, NUM_MINUS, HALF, 0, 1),
    ]


class MuFunction:
    """
    mu = v^(-2 m_W(w0)) * d / (c_m c_m^w0) kept as a ledger of factors per root

    Factors are never cancelled against each other: regularization removes
    them by root and kind.
    """

    def __init__(self, datum: BasedRootDatum, parameters: ParameterFunction, d: NormalizingElement):
        self.datum = datum
        self.parameters = parameters
        self.d = d
        weyl = datum.weyl()
        self.prefactor = -2 * weyl.m_w(parameters, weyl.longest)
        self.ledger: List[MuFactor] = []
        for i in range(len(datum.roots)):
            self.ledger.extend(c_factors(datum, parameters, i))
        logger.info(f"mu initialized on {datum.name}: {len(self.ledger)} factors, "
                    f"prefactor v^{self.prefactor}, d = {d.render()}")

    @property
    def rank(self) -> int:
        return self.datum.rank

    def factor(self, entry: MuFactor) -> FactoredFunction:
        u = tuple(-x for x in self.datum.roots[entry.root])
        f = FactoredFunction.binomial(entry.phase, entry.k, u)
        sign = 1 if entry.kind in (NUM_PLUS, NUM_MINUS) else -1
        return f ** (sign * entry.mult)

    def as_function(self, exclude: FrozenSet[Tuple[int, str]] = frozenset()) -> FactoredFunction:
        """mu on T, optionally without the factors (root, kind) in exclude"""
        n = self.rank
        result = FactoredFunction.from_normalizing(self.d, n) * FactoredFunction.monomial(self.prefactor, (0,) * n)
        for entry in self.ledger:
            if (entry.root, entry.kind) in exclude:
                continue
            result = result * self.factor(entry)
        return result

    def is_symmetric(self) -> bool:
        """The ledger is stable under alpha -> -alpha"""
        seen = {(e.root, e.kind, e.phase, e.k, e.mult) for e in self.ledger}
        return all((self.datum.negative_of(e.root), e.kind, e.phase, e.k, e.mult) in seen for e in self.ledger)

    def render(self) -> str:
        pieces = []
        if not self.d.render() == "1":
            pieces.append(f"[{self.d.render()}]")
        if self.prefactor:
            pieces.append(f"v^{self.prefactor}")
        num = [e.render(self.datum) for e in sorted(self.ledger, key=_ledger_order) if e.kind in (NUM_PLUS, NUM_MINUS)]
        den = [e.render(self.datum) for e in sorted(self.ledger, key=_ledger_order) if e.kind in (DEN_PLUS, DEN_MINUS)]
        text = " * ".join(pieces + num) if pieces or num else "1"
        return f"{text} / ({' * '.join(den)})" if den else text

    def to_dict(self) -> Dict:
        return {
            "datum": self.datum.name,
            "parameters": self.parameters.to_dict(),
            "d": self.d.to_dict(),
            "prefactor": self.prefactor,
            "factors": [e.to_dict(self.datum) for e in sorted(self.ledger, key=_ledger_order)],
        }


def _ledger_order(entry: MuFactor) -> Tuple[int, int]:
    return entry.root, KINDS.index(entry.kind)


def build_mu(datum: BasedRootDatum, m: ParameterFunction, d: Optional[NormalizingElement] = None) -> MuFunction:
    return MuFunction(datum, m, d or NormalizingElement.of())


@dataclass
class PoleZeroReport:
    """p+, p-, z+ and z- of mu along a coset, with the residual inequality"""
    p_plus: List[int] = field(default_factory=list)
    p_minus: List[int] = field(default_factory=list)
    z_plus: List[int] = field(default_factory=list)
    z_minus: List[int] = field(default_factory=list)
    codim: int = 0

    @property
    def lhs(self) -> int:
        return len(self.p_plus) + len(self.p_minus) - len(self.z_plus) - len(self.z_minus)

    @property
    def residual(self) -> bool:
        return self.lhs >= self.codim

    def excluded(self) -> FrozenSet[Tuple[int, str]]:
        """Ledger entries removed by regularization"""
        return frozenset([(i, DEN_PLUS) for i in self.p_plus] + [(i, DEN_MINUS) for i in self.p_minus]
                         + [(i, NUM_PLUS) for i in self.z_plus] + [(i, NUM_MINUS) for i in self.z_minus])

    def to_dict(self, datum: BasedRootDatum) -> Dict:
        def roots(indices):
            return [list(datum.coefficients[i]) for i in indices]
        return {"p_plus": roots(self.p_plus), "p_minus": roots(self.p_minus),
                "z_plus": roots(self.z_plus), "z_minus": roots(self.z_minus),
                "lhs": self.lhs, "codim": self.codim, "residual": self.residual}


def pole_zero_sets(mu: MuFunction, coset: Coset) -> PoleZeroReport:
    """
    Roots along which mu has a pole or zero identically on L

    Raises:
        AccountingError: the pole count exceeds codim(L), which cannot
            happen for a correctly assembled mu
    """
    datum = mu.datum
    report = PoleZeroReport(codim=coset.codim)
    for i in coset.constant_roots(datum):
        phase, exponent = coset.base.evaluate(datum.roots[i])
        if phase == 0 and exponent == -mu.parameters.two_m_plus[i]:
            report.p_plus.append(i)
        if phase == HALF and exponent == -mu.parameters.two_m_minus[i]:
            report.p_minus.append(i)
        if phase == 0 and exponent == 0:
            report.z_plus.append(i)
        if phase == HALF and exponent == 0:
            report.z_minus.append(i)
    if report.lhs > report.codim:
        raise AccountingError(f"pole count {report.lhs} exceeds codim {report.codim} on {coset.render()}")
    return report


def is_residual(mu: MuFunction, coset: Coset) -> bool:
    return pole_zero_sets(mu, coset).residual


@dataclass
class RegularizedMu:
    """
    mu^(L): mu without the factors vanishing or blowing up on L

    on_torus is the remaining product as a function on T; restricted is its
    pullback to L along w -> base * prod_j w_j^(subtorus_j), base normalized.
    """
    coset: Coset
    report: PoleZeroReport
    base: TorusPoint
    on_torus: FactoredFunction
    restricted: FactoredFunction

    @property
    def is_point(self) -> bool:
        return self.coset.dim == 0

    def value(self):
        """The element of Q(v) given by mu^({r})"""
        if not self.is_point:
            raise ValidationError("only regularizations at points are scalars")
        return self.restricted.to_rational_function()

    def render(self) -> str:
        names = [f"w{j + 1}" for j in range(self.coset.dim)]
        return self.restricted.render(names)


def regularize(mu: MuFunction, coset: Coset) -> RegularizedMu:
    """
    Raises:
        ValidationError: L is not residual
        AccountingError: a remaining factor vanishes identically on L
    """
    report = pole_zero_sets(mu, coset)
    if not report.residual:
        raise ValidationError(f"{coset.render()} is not residual ({report.lhs} < {report.codim})")
    try:
        base = coset.normalized_base(mu.datum)
    except ValidationError:
        base = coset.base
    on_torus = mu.as_function(report.excluded())
    matrix = transpose([list(y) for y in coset.subtorus]) if coset.subtorus else [[] for _ in range(mu.rank)]
    restricted = on_torus.pullback(matrix, base.torsion, base.gamma, width=coset.dim)
    logger.debug(f"Regularized mu along {coset.render()}: {restricted.render()}")
    return RegularizedMu(coset, report, base, on_torus, restricted)
