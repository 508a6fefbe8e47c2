"""
Cyclotomic Numbers
Exact elements of Q(zeta_N) stored in the power basis modulo the N-th cyclotomic polynomial
"""
import cmath
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import List, Sequence, Tuple, Union

from sympy import Matrix, Poly, QQ, Rational, Symbol, cyclotomic_poly, divisors, totient

_X = Symbol("x")

Scalar = Union[int, Fraction, "Cyclotomic"]


@lru_cache(maxsize=None)
def _modulus(n: int) -> Poly:
    return Poly(cyclotomic_poly(n, _X), _X, domain=QQ)


@lru_cache(maxsize=None)
def _degree(n: int) -> int:
    return int(totient(n))


def _to_fraction(value) -> Fraction:
    return Fraction(int(value.p), int(value.q))


def _to_poly(coeffs: Sequence[Fraction]) -> Poly:
    rep = [Rational(c.numerator, c.denominator) for c in reversed(coeffs)] or [Rational(0)]
    return Poly.from_list(rep, _X, domain=QQ)


def _from_poly(poly: Poly, n: int) -> Tuple[Fraction, ...]:
    coeffs = [_to_fraction(c) for c in reversed(poly.all_coeffs())]
    size = _degree(n)
    coeffs = coeffs[:size] + [Fraction(0)] * (size - len(coeffs))
    return tuple(coeffs)


def _reduce(n: int, coeffs: Sequence[Fraction]) -> Tuple[Fraction, ...]:
    if len(coeffs) <= _degree(n):
        padded = list(coeffs) + [Fraction(0)] * (_degree(n) - len(coeffs))
        return tuple(padded)
    return _from_poly(_to_poly(coeffs).rem(_modulus(n)), n)


class Cyclotomic:
    """
    Element of the cyclotomic field Q(zeta_N), zeta_N = exp(2 pi i / N)

    Equality is decided exactly by lifting both sides to a common conductor.
    """

    __slots__ = ("conductor", "coeffs")

    def __init__(self, conductor: int, coeffs: Sequence[Union[int, Fraction]]):
        if conductor < 1:
            raise ValueError(f"conductor must be positive, got {conductor}")
        self.conductor = conductor
        self.coeffs = _reduce(conductor, [Fraction(c) for c in coeffs])

    @classmethod
    def rational(cls, value: Union[int, Fraction]) -> "Cyclotomic":
        return cls(1, [Fraction(value)])

    @classmethod
    def root_of_unity(cls, phase: Fraction) -> "Cyclotomic":
        """exp(2 pi i * phase) for a rational phase"""
        phase = Fraction(phase) % 1
        n = phase.denominator
        if n == 1:
            return cls.rational(1)
        coeffs = [0] * phase.numerator + [1]
        return cls(n, coeffs)

    @staticmethod
    def coerce(value: Scalar) -> "Cyclotomic":
        if isinstance(value, Cyclotomic):
            return value
        return Cyclotomic.rational(Fraction(value))

    def lift(self, conductor: int) -> "Cyclotomic":
        """Same number written over a multiple of the conductor"""
        if conductor == self.conductor:
            return self
        if conductor % self.conductor != 0:
            raise ValueError(f"cannot lift conductor {self.conductor} to {conductor}")
        step = conductor // self.conductor
        spread: List[Fraction] = [Fraction(0)] * ((len(self.coeffs) - 1) * step + 1)
        for j, c in enumerate(self.coeffs):
            spread[j * step] = c
        return Cyclotomic(conductor, spread)

    def _align(self, other: "Cyclotomic") -> Tuple[int, Tuple[Fraction, ...], Tuple[Fraction, ...]]:
        n = self.conductor * other.conductor // gcd(self.conductor, other.conductor)
        return n, self.lift(n).coeffs, other.lift(n).coeffs

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self.render()} is not rational")
        return self.coeffs[0]

    def to_complex(self) -> complex:
        base = cmath.exp(2j * cmath.pi / self.conductor)
        return sum(float(c) * base ** j for j, c in enumerate(self.coeffs) if c != 0) + 0j

    def galois(self, a: int) -> "Cyclotomic":
        """Image under zeta_N -> zeta_N^a, a coprime to N"""
        if gcd(a, self.conductor) != 1:
            raise ValueError(f"{a} is not a unit modulo {self.conductor}")
        a %= self.conductor
        spread = [Fraction(0)] * ((len(self.coeffs) - 1) * a + 1)
        for j, c in enumerate(self.coeffs):
            spread[j * a] += c
        return Cyclotomic(self.conductor, spread)

    def reduced(self) -> "Cyclotomic":
        """The same number over its minimal conductor"""
        if self.is_rational():
            return Cyclotomic.rational(self.coeffs[0])
        n = self.conductor
        for d in divisors(n)[:-1]:
            units = [a for a in range(1, n) if gcd(a, n) == 1 and a % d == 1 % d]
            if all(self.galois(a) == self for a in units):
                return self._descend(d)
        return self

    def _descend(self, d: int) -> "Cyclotomic":
        size = _degree(d)
        columns = [Cyclotomic.root_of_unity(Fraction(j, d)).lift(self.conductor).coeffs for j in range(size)]
        system = Matrix([[Rational(col[i].numerator, col[i].denominator) for col in columns]
                         for i in range(len(self.coeffs))])
        rhs = Matrix([Rational(c.numerator, c.denominator) for c in self.coeffs])
        solution, _ = system.gauss_jordan_solve(rhs)
        return Cyclotomic(d, [_to_fraction(solution[j]) for j in range(size)])

    def inverse(self) -> "Cyclotomic":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero cyclotomic number")
        if self.is_rational():
            return Cyclotomic.rational(1 / self.coeffs[0])
        inverted = _to_poly(self.coeffs).invert(_modulus(self.conductor))
        return Cyclotomic(self.conductor, _from_poly(inverted, self.conductor))

    def __add__(self, other: Scalar) -> "Cyclotomic":
        other = Cyclotomic.coerce(other)
        n, a, b = self._align(other)
        return Cyclotomic(n, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self) -> "Cyclotomic":
        return Cyclotomic(self.conductor, [-c for c in self.coeffs])

    def __sub__(self, other: Scalar) -> "Cyclotomic":
        return self + (-Cyclotomic.coerce(other))

    def __rsub__(self, other: Scalar) -> "Cyclotomic":
        return Cyclotomic.coerce(other) - self

    def __mul__(self, other: Scalar) -> "Cyclotomic":
        if not isinstance(other, Cyclotomic):
            factor = Fraction(other)
            return Cyclotomic(self.conductor, [c * factor for c in self.coeffs])
        if other.is_rational():
            return self * other.coeffs[0]
        if self.is_rational():
            return other * self.coeffs[0]
        n, a, b = self._align(other)
        product = (_to_poly(a) * _to_poly(b)).rem(_modulus(n))
        return Cyclotomic(n, _from_poly(product, n))

    __rmul__ = __mul__

    def __truediv__(self, other: Scalar) -> "Cyclotomic":
        return self * Cyclotomic.coerce(other).inverse()

    def __rtruediv__(self, other: Scalar) -> "Cyclotomic":
        return Cyclotomic.coerce(other) * self.inverse()

    def __pow__(self, exponent: int) -> "Cyclotomic":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = Cyclotomic.rational(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        _, a, b = self._align(other)
        return a == b

    def __hash__(self) -> int:
        if self.is_rational():
            return hash(self.coeffs[0])
        reduced = self.reduced()
        return hash((reduced.conductor, reduced.coeffs))

    def render(self) -> str:
        if self.is_rational():
            return str(self.coeffs[0])
        reduced = self.reduced()
        terms = []
        for j, c in enumerate(reduced.coeffs):
            if c == 0:
                continue
            if j == 0:
                terms.append(str(c))
                continue
            unit = f"e({Fraction(j, reduced.conductor)})"
            terms.append(unit if c == 1 else f"{c}*{unit}")
        return "(" + " + ".join(terms) + ")"

    def __repr__(self) -> str:
        return f"Cyclotomic({self.render()})"
