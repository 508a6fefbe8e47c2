"""
Formal Degrees
mu^({r}) at residual points as certified elements of Q(v) in +-M
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Union

from loguru import logger

from core.errors import CertificationError
from exactscalars.laurent import RationalFunctionV, eval_at
from exactscalars.normalizing import NormalizingElement, factor_into_M, parity
from mu.function import MuFunction, build_mu, regularize
from rootdata.datum import BasedRootDatum
from rootdata.parameters import ParameterFunction
from torus.coset import Coset
from torus.point import TorusPoint


@dataclass
class FormalDegree:
    """
    fdeg(r) = sign * expand(certificate), vanishing to the given order at v = 1

    When half_variable is set v -> -v does not map the value to +-itself and the
    certificate is taken in u = v^(1/2), i.e. it certifies fdeg(u^2).
    """
    point: TorusPoint
    value: RationalFunctionV
    certificate: NormalizingElement
    sign: int
    order: int
    symmetry: Dict[str, Optional[int]]
    half_variable: bool = False

    def at(self, v0: Union[int, Fraction, float]):
        return eval_at(self.value, v0)

    def render(self) -> str:
        sign = "" if self.sign > 0 else "-"
        text = f"{sign}{self.certificate.render()}"
        if self.half_variable:
            return f"{text} at v -> v^(1/2)"
        return text

    def to_dict(self) -> Dict:
        return {
            "point": self.point.render(),
            "value": self.value.render(),
            "certificate": self.certificate.to_dict(),
            "rendered": self.render(),
            "sign": self.sign,
            "order": self.order,
            "parity": self.symmetry,
            "half_variable": self.half_variable,
        }


def formal_degree_of(mu: MuFunction, point: TorusPoint) -> FormalDegree:
    """
    Certify mu^({r}) in +-M of order k + rank

    Both symmetries are checked first: f(1/v) = +-f(v) always, and
    f(-v) = +-f(v) unless some root takes an odd power of v at r while the
    label classes have odd sum (G2 with unequal labels of different parity).
    In that case f(v^2) is certified instead and the degree is marked.

    Raises:
        CertificationError: the value is not in +-M of the expected order,
            or is not symmetric up to sign under v -> 1/v
    """
    value = regularize(mu, Coset.point(point)).value()
    symmetry = parity(value)
    if symmetry["inverse"] is None:
        raise CertificationError(f"formal degree at {point.render()} is not +-symmetric under v -> 1/v")

    half_variable = symmetry["negative"] is None
    if half_variable:
        logger.warning(f"formal degree at {point.render()} is not +-symmetric under v -> -v, certifying in v^(1/2)")
        certificate, sign = factor_into_M(value.substitute_square())
    else:
        certificate, sign = factor_into_M(value)

    # v = u^2 keeps the vanishing order at 1
    expected = mu.d.order + mu.rank
    if certificate.order != expected:
        raise CertificationError(f"formal degree at {point.render()} vanishes to order {certificate.order}, "
                                 f"expected {expected}")
    logger.debug(f"fdeg at {point.render()}: {'-' if sign < 0 else ''}{certificate.render()}")
    return FormalDegree(point, value, certificate, sign, certificate.order, symmetry, half_variable)


def formal_degree(datum: BasedRootDatum, m: ParameterFunction, d: Optional[NormalizingElement],
                  point: TorusPoint) -> FormalDegree:
    return formal_degree_of(build_mu(datum, m, d), point)
