"""
Laurent Polynomials and Rational Functions in v
Exact arithmetic over Q, with cyclotomic coefficients where torsion demands it
"""
import re
from fractions import Fraction
from typing import Dict, Iterable, Optional, Tuple, Union

from sympy import Poly, QQ, Rational, Symbol

from exactscalars.cyclotomic import Cyclotomic

_V = Symbol("v")

Coefficient = Union[Fraction, Cyclotomic]


def _clean(value) -> Coefficient:
    if isinstance(value, Cyclotomic):
        return value.coeffs[0] if value.is_rational() else value
    return Fraction(value)


def _is_zero(value: Coefficient) -> bool:
    if isinstance(value, Cyclotomic):
        return value.is_zero()
    return value == 0


class LaurentPoly:
    """Finitely supported map exponent -> coefficient, no stored zeros"""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[int, Union[int, Coefficient]]] = None):
        cleaned: Dict[int, Coefficient] = {}
        for exponent, coefficient in (terms or {}).items():
            coefficient = _clean(coefficient)
            if not _is_zero(coefficient):
                cleaned[int(exponent)] = coefficient
        self.terms = cleaned

    @classmethod
    def constant(cls, value: Union[int, Coefficient]) -> "LaurentPoly":
        return cls({0: value})

    @classmethod
    def monomial(cls, exponent: int, value: Union[int, Coefficient] = 1) -> "LaurentPoly":
        return cls({exponent: value})

    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls()

    @classmethod
    def one(cls) -> "LaurentPoly":
        return cls({0: 1})

    def is_zero(self) -> bool:
        return not self.terms

    def is_rational(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.terms.values())

    def is_constant(self) -> bool:
        return not self.terms or set(self.terms) == {0}

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    @property
    def min_exponent(self) -> int:
        return min(self.terms) if self.terms else 0

    @property
    def max_exponent(self) -> int:
        return max(self.terms) if self.terms else 0

    def coefficient(self, exponent: int) -> Coefficient:
        return self.terms.get(exponent, Fraction(0))

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by v^k"""
        return LaurentPoly({e + k: c for e, c in self.terms.items()})

    def scale(self, factor: Union[int, Coefficient]) -> "LaurentPoly":
        return LaurentPoly({e: c * factor for e, c in self.terms.items()})

    def substitute_inverse(self) -> "LaurentPoly":
        """v -> v^-1"""
        return LaurentPoly({-e: c for e, c in self.terms.items()})

    def substitute_negative(self) -> "LaurentPoly":
        """v -> -v"""
        return LaurentPoly({e: (c if e % 2 == 0 else -c) for e, c in self.terms.items()})

    def substitute_square(self) -> "LaurentPoly":
        """v -> v^2"""
        return LaurentPoly({2 * e: c for e, c in self.terms.items()})

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms[e] + c if e in terms else c
        return LaurentPoly(terms)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(other)
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            return self.scale(other)
        terms: Dict[int, Coefficient] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                product = c1 * c2
                terms[e] = terms[e] + product if e in terms else product
        return LaurentPoly(terms)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "LaurentPoly":
        if exponent < 0:
            raise ValueError("negative powers of a Laurent polynomial are rational functions")
        result = LaurentPoly.one()
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentPoly):
            if isinstance(other, (int, Fraction)):
                other = LaurentPoly.constant(other)
            else:
                return NotImplemented
        if set(self.terms) != set(other.terms):
            return False
        return all(self.terms[e] == other.terms[e] for e in self.terms)

    def __hash__(self) -> int:
        return hash(tuple(sorted((e, hash(c)) for e, c in self.terms.items())))

    def evaluate(self, v0):
        """Exact value for rational v0 (Fraction or Cyclotomic), complex or float otherwise"""
        if isinstance(v0, (int, Fraction)):
            v0 = Fraction(v0)
            total = Fraction(0)
            for e, c in self.terms.items():
                total = c * v0 ** e + total
            return _clean(total) if isinstance(total, Cyclotomic) else total
        total = 0j
        for e, c in self.terms.items():
            value = c.to_complex() if isinstance(c, Cyclotomic) else float(c)
            total += value * v0 ** e
        if self.is_rational():
            return total.real
        return total

    def to_sympy(self) -> Tuple[int, Poly]:
        """(shift, P) with self = v^shift * P(v) and P(0) != 0; rational coefficients only"""
        if not self.is_rational():
            raise ValueError("sympy conversion needs rational coefficients")
        if self.is_zero():
            return 0, Poly(0, _V, domain=QQ)
        low = self.min_exponent
        rep = [Rational(0)] * (self.max_exponent - low + 1)
        for e, c in self.terms.items():
            rep[self.max_exponent - e] = Rational(c.numerator, c.denominator)
        return low, Poly.from_list(rep, _V, domain=QQ)

    @classmethod
    def from_sympy(cls, poly: Poly, shift: int = 0) -> "LaurentPoly":
        coeffs = poly.all_coeffs()
        degree = len(coeffs) - 1
        return cls({degree - i + shift: Fraction(int(c.p), int(c.q)) for i, c in enumerate(coeffs)})

    def render(self) -> str:
        if self.is_zero():
            return "0"
        pieces = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            pieces.append(_render_term(c, e))
        text = pieces[0]
        for piece in pieces[1:]:
            if piece.startswith("-"):
                text += " - " + piece[1:]
            else:
                text += " + " + piece
        return text

    def __repr__(self) -> str:
        return f"LaurentPoly({self.render()})"


def _render_power(e: int) -> str:
    if e == 1:
        return "v"
    return f"v^{e}"


def _render_term(c: Coefficient, e: int) -> str:
    if isinstance(c, Cyclotomic):
        coefficient = c.render()
        return coefficient if e == 0 else f"{coefficient}*{_render_power(e)}"
    if e == 0:
        return str(c)
    if c == 1:
        return _render_power(e)
    if c == -1:
        return "-" + _render_power(e)
    return f"{c}*{_render_power(e)}"


class RationalFunctionV:
    """
    Element of Q(v) in reduced form

    The denominator is a monic polynomial with nonzero constant term and the
    numerator a Laurent polynomial sharing no factor with it.
    """

    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator: LaurentPoly, denominator: Optional[LaurentPoly] = None):
        denominator = denominator if denominator is not None else LaurentPoly.one()
        if denominator.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not (numerator.is_rational() and denominator.is_rational()):
            raise ValueError("rational functions carry rational coefficients")
        self.numerator, self.denominator = self._normalize(numerator, denominator)

    @staticmethod
    def _normalize(num: LaurentPoly, den: LaurentPoly) -> Tuple[LaurentPoly, LaurentPoly]:
        if num.is_zero():
            return LaurentPoly.zero(), LaurentPoly.one()
        num_shift, num_poly = num.to_sympy()
        den_shift, den_poly = den.to_sympy()
        common = num_poly.gcd(den_poly)
        num_poly = num_poly.quo(common)
        den_poly = den_poly.quo(common)
        lead = den_poly.LC()
        num_poly = num_poly.quo_ground(lead)
        den_poly = den_poly.quo_ground(lead)
        return (LaurentPoly.from_sympy(num_poly, num_shift - den_shift),
                LaurentPoly.from_sympy(den_poly))

    @classmethod
    def constant(cls, value: Union[int, Fraction]) -> "RationalFunctionV":
        return cls(LaurentPoly.constant(value))

    @classmethod
    def monomial(cls, exponent: int, value: Union[int, Fraction] = 1) -> "RationalFunctionV":
        return cls(LaurentPoly.monomial(exponent, value))

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def is_constant(self) -> bool:
        return self.denominator.is_constant() and self.numerator.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self.render()} is not constant")
        return self.numerator.coefficient(0)

    def __mul__(self, other) -> "RationalFunctionV":
        other = _coerce(other)
        return RationalFunctionV(self.numerator * other.numerator, self.denominator * other.denominator)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalFunctionV":
        other = _coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunctionV(self.numerator * other.denominator, self.denominator * other.numerator)

    def __rtruediv__(self, other) -> "RationalFunctionV":
        return _coerce(other) / self

    def __add__(self, other) -> "RationalFunctionV":
        other = _coerce(other)
        return RationalFunctionV(self.numerator * other.denominator + other.numerator * self.denominator,
                                 self.denominator * other.denominator)

    __radd__ = __add__

    def __neg__(self) -> "RationalFunctionV":
        return RationalFunctionV(-self.numerator, self.denominator)

    def __sub__(self, other) -> "RationalFunctionV":
        return self + (-_coerce(other))

    def __pow__(self, exponent: int) -> "RationalFunctionV":
        if exponent < 0:
            return RationalFunctionV(self.denominator ** (-exponent), self.numerator ** (-exponent))
        return RationalFunctionV(self.numerator ** exponent, self.denominator ** exponent)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = RationalFunctionV.constant(other)
        if not isinstance(other, RationalFunctionV):
            return NotImplemented
        return self.numerator == other.numerator and self.denominator == other.denominator

    def __hash__(self) -> int:
        return hash((self.numerator, self.denominator))

    def substitute_inverse(self) -> "RationalFunctionV":
        return RationalFunctionV(self.numerator.substitute_inverse(), self.denominator.substitute_inverse())

    def substitute_negative(self) -> "RationalFunctionV":
        return RationalFunctionV(self.numerator.substitute_negative(), self.denominator.substitute_negative())

    def substitute_square(self) -> "RationalFunctionV":
        return RationalFunctionV(self.numerator.substitute_square(), self.denominator.substitute_square())

    def vanishing_order_at_one(self) -> int:
        """Order of zero (negative for a pole) at v = 1"""
        return _order_at_one(self.numerator) - _order_at_one(self.denominator)

    def evaluate(self, v0):
        denominator = self.denominator.evaluate(v0)
        if denominator == 0:
            raise ZeroDivisionError(f"pole at v = {v0}")
        return self.numerator.evaluate(v0) / denominator

    def render(self) -> str:
        """Centred text form, e.g. (v - v^-1)/(v + v^-1)"""
        if self.denominator.is_constant():
            return self.numerator.render()
        num, num_centre = _centred(self.numerator)
        den, den_centre = _centred(self.denominator)
        prefix = num_centre - den_centre
        body = f"{_wrap(num)}/{_wrap(den)}"
        if prefix == 0:
            return body
        return f"{_render_power(prefix)} * {body}"

    def __repr__(self) -> str:
        return f"RationalFunctionV({self.render()})"


def _coerce(value) -> RationalFunctionV:
    if isinstance(value, RationalFunctionV):
        return value
    if isinstance(value, LaurentPoly):
        return RationalFunctionV(value)
    return RationalFunctionV.constant(Fraction(value))


def _order_at_one(poly: LaurentPoly) -> int:
    if poly.is_zero():
        raise ValueError("order of the zero polynomial")
    _, sym = poly.to_sympy()
    order = 0
    root = Poly(_V - 1, _V, domain=QQ)
    while sym.rem(root).is_zero:
        sym = sym.quo(root)
        order += 1
    return order


def _centred(poly: LaurentPoly) -> Tuple[LaurentPoly, int]:
    span = poly.min_exponent + poly.max_exponent
    centre = span // 2 if span % 2 == 0 else poly.min_exponent
    return poly.shift(-centre), centre


def _wrap(poly: LaurentPoly) -> str:
    text = poly.render()
    return f"({text})" if len(poly.terms) > 1 or text.startswith("-") else text


def eval_at(f: Union[RationalFunctionV, LaurentPoly], v0):
    """Value of f at v0; exact for rational v0, float or complex otherwise"""
    if isinstance(v0, (float, complex)):
        return f.evaluate(v0)
    return f.evaluate(Fraction(v0))


def product(items: Iterable[RationalFunctionV]) -> RationalFunctionV:
    result = RationalFunctionV.constant(1)
    for item in items:
        result = result * item
    return result


_TERM = re.compile(r"^(?:(?P<coeff>\d+(?:/\d+)?)(?:\*(?=v))?)?(?P<power>v(?:\^(?P<exp>-?\d+))?)?$")


def parse_laurent(text: str) -> LaurentPoly:
    """Inverse of LaurentPoly.render for rational coefficients"""
    body = text.strip()
    if body.startswith("(") and body.endswith(")"):
        body = body[1:-1].strip()
    if not body:
        raise ValueError("empty polynomial")
    terms: Dict[int, Fraction] = {}
    sign = 1
    if body.startswith("-"):
        sign, body = -1, body[1:].strip()
    for i, chunk in enumerate(re.split(r"\s+([+-])\s+", body)):
        if i % 2 == 1:
            sign = 1 if chunk == "+" else -1
            continue
        match = _TERM.match(chunk.strip())
        if not match or not (match.group("coeff") or match.group("power")):
            raise ValueError(f"cannot parse term '{chunk}'")
        c = Fraction(match.group("coeff")) if match.group("coeff") else Fraction(1)
        e = 0
        if match.group("power"):
            e = int(match.group("exp")) if match.group("exp") else 1
        terms[e] = terms.get(e, Fraction(0)) + sign * c
    return LaurentPoly(terms)


def parse_rational_function(text: str) -> RationalFunctionV:
    """Inverse of RationalFunctionV.render"""
    body = text.strip()
    shift = 0
    prefix = re.match(r"^v(?:\^(-?\d+))? \* ", body)
    if prefix:
        shift = int(prefix.group(1)) if prefix.group(1) else 1
        body = body[prefix.end():]
    depth = 0
    split = None
    for i, ch in enumerate(body):
        depth += ch == "("
        depth -= ch == ")"
        if ch == "/" and depth == 0:
            split = i
    if split is None:
        return RationalFunctionV(parse_laurent(body).shift(shift))
    numerator = parse_laurent(body[:split]).shift(shift)
    return RationalFunctionV(numerator, parse_laurent(body[split + 1:]))
