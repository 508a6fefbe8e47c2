"""
Normalizing Group
Elements c * (v - v^-1)^k * prod [n]_q^e_n, their expansion and certified recognition
"""
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Tuple

from loguru import logger
from sympy import Poly, QQ, cyclotomic_poly, factor_list, totient

from core.errors import CertificationError, ValidationError
from exactscalars.laurent import LaurentPoly, RationalFunctionV, _V


def q_integer(n: int) -> LaurentPoly:
    """[n]_q = (v^n - v^-n)/(v - v^-1) = v^(1-n) + v^(3-n) + ... + v^(n-1)"""
    if n < 1:
        raise ValueError(f"q-integers are indexed by n >= 1, got {n}")
    return LaurentPoly({e: 1 for e in range(1 - n, n, 2)})


V_MINUS_V_INVERSE = LaurentPoly({1: 1, -1: -1})


@dataclass(frozen=True)
class NormalizingElement:
    """
    d = constant * (v - v^-1)^vexp * prod_n [n]_q^qints[n]

    Stored canonically: no zero exponents and no [1]_q entries.
    """
    constant: Fraction = Fraction(1)
    vexp: int = 0
    qints: Tuple[Tuple[int, int], ...] = field(default_factory=tuple)

    def __post_init__(self):
        constant = Fraction(self.constant)
        if constant <= 0:
            raise ValidationError(f"normalizing constant must be positive, got {constant}")
        cleaned = {}
        for n, e in dict(self.qints).items():
            n, e = int(n), int(e)
            if n < 1:
                raise ValidationError(f"q-integer index must be positive, got {n}")
            if n > 1 and e != 0:
                cleaned[n] = cleaned.get(n, 0) + e
        object.__setattr__(self, "constant", constant)
        object.__setattr__(self, "vexp", int(self.vexp))
        object.__setattr__(self, "qints", tuple(sorted((n, e) for n, e in cleaned.items() if e != 0)))

    @classmethod
    def of(cls, constant=1, vexp: int = 0, qints: Optional[Dict[int, int]] = None) -> "NormalizingElement":
        return cls(Fraction(constant), vexp, tuple((qints or {}).items()))

    @property
    def order(self) -> int:
        """Vanishing order at v = 1; q-integers do not vanish there"""
        return self.vexp

    def qint_map(self) -> Dict[int, int]:
        return dict(self.qints)

    def __mul__(self, other: "NormalizingElement") -> "NormalizingElement":
        merged = Counter(self.qint_map())
        merged.update(other.qint_map())
        return NormalizingElement(self.constant * other.constant, self.vexp + other.vexp, tuple(merged.items()))

    def inverse(self) -> "NormalizingElement":
        return NormalizingElement(1 / self.constant, -self.vexp, tuple((n, -e) for n, e in self.qints))

    def __truediv__(self, other: "NormalizingElement") -> "NormalizingElement":
        return self * other.inverse()

    def expand(self) -> RationalFunctionV:
        return expand(self)

    def render(self) -> str:
        pieces = []
        if self.constant != 1:
            pieces.append(str(self.constant))
        if self.vexp == 1:
            pieces.append("(v-v^-1)")
        elif self.vexp != 0:
            pieces.append(f"(v-v^-1)^{self.vexp}")
        for n, e in self.qints:
            pieces.append(f"[{n}]" if e == 1 else f"[{n}]^{e}")
        return " * ".join(pieces) if pieces else "1"

    def to_dict(self) -> Dict:
        return {
            "constant": str(self.constant),
            "vexp": self.vexp,
            "qints": {str(n): e for n, e in self.qints},
        }


def expand(d: NormalizingElement) -> RationalFunctionV:
    """The rational function of v that d denotes"""
    numerator = LaurentPoly.constant(d.constant)
    denominator = LaurentPoly.one()
    if d.vexp >= 0:
        numerator = numerator * V_MINUS_V_INVERSE ** d.vexp
    else:
        denominator = denominator * V_MINUS_V_INVERSE ** (-d.vexp)
    for n, e in d.qints:
        if e > 0:
            numerator = numerator * q_integer(n) ** e
        else:
            denominator = denominator * q_integer(n) ** (-e)
    return RationalFunctionV(numerator, denominator)


def _cyclotomic_index(factor: Poly, search_bound: int) -> Optional[int]:
    """k with factor == Phi_k, or None"""
    degree = factor.degree()
    for k in range(1, search_bound + 1):
        if int(totient(k)) != degree:
            continue
        if Poly(cyclotomic_poly(k, _V), _V, domain=QQ) == factor:
            return k
    return None


def _cyclotomic_exponents(f: RationalFunctionV) -> Dict[int, int]:
    """Exponents E_k with f = c * v^s * prod Phi_k^E_k; raises when a factor is not cyclotomic"""
    exponents: Dict[int, int] = Counter()
    for poly, sign in ((f.numerator, 1), (f.denominator, -1)):
        _, sym = poly.to_sympy()
        _, factors = factor_list(sym.as_expr(), _V)
        for factor, multiplicity in factors:
            monic = Poly(factor, _V, domain=QQ).monic()
            bound = 2 * monic.degree() ** 2 + 2
            k = _cyclotomic_index(monic, bound)
            if k is None:
                raise CertificationError(f"not in M: factor {monic.as_expr()} is not cyclotomic")
            exponents[k] += sign * multiplicity
    return {k: e for k, e in exponents.items() if e != 0}


def factor_into_M(f: RationalFunctionV) -> Tuple[NormalizingElement, int]:
    """
    Certify f = sign * expand(d) with d in M

    Args:
        f: nonzero rational function of v

    Returns:
        (d, sign) with sign in {+1, -1}

    Raises:
        CertificationError: "not in M" when no such d exists
    """
    if f.is_zero():
        raise CertificationError("not in M: zero function")

    exponents = _cyclotomic_exponents(f)
    vexp = exponents.pop(1, 0)
    if exponents.pop(2, 0) != vexp:
        raise CertificationError("not in M: orders at v = 1 and v = -1 differ")

    qints: Dict[int, int] = {}
    while exponents:
        k = max(exponents)
        if k % 2 == 1:
            raise CertificationError(f"not in M: Phi_{k} cannot come from a q-integer")
        n = k // 2
        b = exponents[k]
        qints[n] = b
        for j in range(3, k + 1):
            if k % j == 0:
                remaining = exponents.get(j, 0) - b
                if remaining:
                    exponents[j] = remaining
                else:
                    exponents.pop(j, None)

    d = NormalizingElement.of(1, vexp, qints)
    ratio = f / expand(d)
    if not ratio.is_constant():
        raise CertificationError(f"not in M: residual factor {ratio.render()}")
    c = ratio.constant_value()
    sign = 1 if c > 0 else -1
    d = NormalizingElement.of(abs(c), vexp, qints)
    logger.debug(f"Certified {f.render()} = {'+' if sign > 0 else '-'}{d.render()}")
    return d, sign


def parity(f: RationalFunctionV) -> Dict[str, Optional[int]]:
    """
    Symmetry signs of f under v -> 1/v and v -> -v

    Each entry is +1 or -1 when f maps to +-f, and None otherwise.
    """
    result: Dict[str, Optional[int]] = {}
    for name, image in (("inverse", f.substitute_inverse()), ("negative", f.substitute_negative())):
        if image == f:
            result[name] = 1
        elif image == -f:
            result[name] = -1
        else:
            result[name] = None
    return result
