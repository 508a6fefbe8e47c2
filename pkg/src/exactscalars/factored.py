"""
Factored Functions on a Torus
Exact products of binomials (1 - zeta v^k z^u) in a canonical multiplicative normal form
"""
from collections import Counter
from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from sympy import cyclotomic_poly, Poly, QQ

from core.errors import AccountingError, CertificationError
from exactscalars.cyclotomic import Cyclotomic
from exactscalars.laurent import LaurentPoly, RationalFunctionV, _V
from exactscalars.normalizing import NormalizingElement

# (phase in [0, 1), v-exponent, z-exponent vector)
FactorKey = Tuple[Fraction, Fraction, Tuple[int, ...]]

HALF = Fraction(1, 2)


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _vector_gcd(u: Sequence[int]) -> int:
    g = 0
    for x in u:
        g = gcd(g, abs(x))
    return g


class FactoredFunction:
    """
    const * v^vexp * z^mono * prod (1 - e(phase) v^k z^u)^mult on a torus of dimension dim

    e(x) stands for exp(2 pi i x). Canonical form:
      - factors with u != 0 have primitive u whose first nonzero entry is positive
      - factors with u == 0 are linear in w = v^(1/Q), Q the scalar denominator
    Two functions are equal iff their canonical data agree.
    """

    __slots__ = ("dim", "const", "vexp", "mono", "factors", "scalar_q")

    def __init__(self, dim: int):
        self.dim = dim
        self.const = Cyclotomic.rational(1)
        self.vexp = Fraction(0)
        self.mono: Tuple[int, ...] = (0,) * dim
        self.factors: Counter = Counter()
        self.scalar_q = 1

    # construction

    @classmethod
    def one(cls, dim: int = 0) -> "FactoredFunction":
        return cls(dim)

    @classmethod
    def constant(cls, value, dim: int = 0) -> "FactoredFunction":
        f = cls(dim)
        f.const = Cyclotomic.coerce(value)
        if f.const.is_zero():
            raise ZeroDivisionError("factored functions are nonzero")
        return f

    @classmethod
    def binomial(cls, phase: Fraction, k, u: Sequence[int], mult: int = 1) -> "FactoredFunction":
        """(1 - e(phase) v^k z^u)^mult"""
        f = cls(len(u))
        f._insert(Fraction(phase), Fraction(k), tuple(int(x) for x in u), mult)
        return f

    @classmethod
    def monomial(cls, vexp, mono: Sequence[int], const=1) -> "FactoredFunction":
        f = cls.constant(const, len(mono))
        f.vexp = Fraction(vexp)
        f.mono = tuple(int(x) for x in mono)
        return f

    @classmethod
    def from_normalizing(cls, d: NormalizingElement, dim: int = 0) -> "FactoredFunction":
        """(v - v^-1) = -v^-1 (1 - v^2);  [n] = v^(1-n) (1 - v^2n) / (1 - v^2)"""
        zero = (0,) * dim
        f = cls.constant(d.constant, dim)
        f = f * (cls.monomial(-1, zero, -1) * cls.binomial(0, 2, zero)) ** d.vexp
        for n, e in d.qints:
            q = cls.monomial(1 - n, zero) * cls.binomial(0, 2 * n, zero) / cls.binomial(0, 2, zero)
            f = f * q ** e
        return f

    def copy(self) -> "FactoredFunction":
        f = FactoredFunction(self.dim)
        f.const = self.const
        f.vexp = self.vexp
        f.mono = self.mono
        f.factors = Counter(self.factors)
        f.scalar_q = self.scalar_q
        return f

    # canonicalization

    def _absorb_unit(self, phase: Fraction, k: Fraction, u: Tuple[int, ...], mult: int) -> None:
        """Multiply by (-e(phase) v^k z^u)^mult"""
        self.const = self.const * Cyclotomic.root_of_unity((phase + HALF) * mult)
        self.vexp += k * mult
        self.mono = tuple(m + x * mult for m, x in zip(self.mono, u))

    def _insert(self, phase: Fraction, k: Fraction, u: Tuple[int, ...], mult: int) -> None:
        if mult == 0:
            return
        if len(u) != self.dim:
            raise ValueError(f"factor of dimension {len(u)} inserted into dimension {self.dim}")
        phase %= 1
        first = next((x for x in u if x != 0), 0)
        if first < 0 or (first == 0 and k < 0):
            # 1 - c y = -c y (1 - c^-1 y^-1)
            self._absorb_unit(phase, k, u, mult)
            phase, k, u = (-phase) % 1, -k, tuple(-x for x in u)

        if first != 0:
            g = _vector_gcd(u)
            reduced = tuple(x // g for x in u)
            for j in range(g):
                self._add((phase + j) / g % 1, k / g, reduced, mult)
            return

        if k == 0:
            if phase == 0:
                raise AccountingError("factor (1 - 1) vanishes identically")
            self.const = self.const * (Cyclotomic.rational(1) - Cyclotomic.root_of_unity(phase)) ** mult
            return

        if (k * self.scalar_q).denominator != 1:
            self._refine(_lcm(self.scalar_q, k.denominator))
        pieces = int(k * self.scalar_q)
        zero = (0,) * self.dim
        for j in range(pieces):
            self._add((phase + j) / pieces % 1, Fraction(1, self.scalar_q), zero, mult)

    def _add(self, phase: Fraction, k: Fraction, u: Tuple[int, ...], mult: int) -> None:
        key = (phase, k, u)
        total = self.factors.get(key, 0) + mult
        if total:
            self.factors[key] = total
        else:
            self.factors.pop(key, None)

    def _refine(self, q: int) -> None:
        """Rewrite the scalar factors as linear factors in v^(1/q)"""
        if q == self.scalar_q:
            return
        if q % self.scalar_q:
            raise ValueError(f"cannot refine scalar denominator {self.scalar_q} to {q}")
        step = q // self.scalar_q
        zero = (0,) * self.dim
        scalars = [(key, m) for key, m in self.factors.items() if key[2] == zero]
        for key, _ in scalars:
            del self.factors[key]
        self.scalar_q = q
        for (phase, _, _), m in scalars:
            for j in range(step):
                self._add((phase + j) / step % 1, Fraction(1, q), zero, m)

    def _aligned(self, other: "FactoredFunction") -> Tuple["FactoredFunction", "FactoredFunction"]:
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        q = _lcm(self.scalar_q, other.scalar_q)
        a, b = self, other
        if a.scalar_q != q:
            a = a.copy()
            a._refine(q)
        if b.scalar_q != q:
            b = b.copy()
            b._refine(q)
        return a, b

    # algebra

    def __mul__(self, other: "FactoredFunction") -> "FactoredFunction":
        if not isinstance(other, FactoredFunction):
            result = self.copy()
            result.const = result.const * Cyclotomic.coerce(other)
            return result
        a, b = self._aligned(other)
        result = a.copy()
        result.const = a.const * b.const
        result.vexp = a.vexp + b.vexp
        result.mono = tuple(x + y for x, y in zip(a.mono, b.mono))
        for key, m in b.factors.items():
            result._add(*key, m)
        return result

    __rmul__ = __mul__

    def inverse(self) -> "FactoredFunction":
        result = FactoredFunction(self.dim)
        result.const = self.const.inverse()
        result.vexp = -self.vexp
        result.mono = tuple(-x for x in self.mono)
        result.factors = Counter({key: -m for key, m in self.factors.items()})
        result.scalar_q = self.scalar_q
        return result

    def __truediv__(self, other: "FactoredFunction") -> "FactoredFunction":
        if not isinstance(other, FactoredFunction):
            return self * Cyclotomic.coerce(other).inverse()
        return self * other.inverse()

    def __pow__(self, exponent: int) -> "FactoredFunction":
        base = self if exponent >= 0 else self.inverse()
        result = FactoredFunction(self.dim)
        for _ in range(abs(exponent)):
            result = result * base
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, FactoredFunction):
            return NotImplemented
        if self.dim != other.dim:
            return False
        a, b = self._aligned(other)
        return (a.vexp == b.vexp and a.mono == b.mono and a.const == b.const
                and dict(a.factors) == dict(b.factors))

    def __hash__(self) -> int:
        return hash((self.dim, self.vexp, self.mono))

    # queries

    def is_constant(self) -> bool:
        return not self.factors and self.vexp == 0 and not any(self.mono)

    def is_scalar(self) -> bool:
        """No dependence on the torus coordinates"""
        zero = (0,) * self.dim
        return not any(self.mono) and all(key[2] == zero for key in self.factors)

    def constant_value(self):
        """The value of a constant function, a Fraction when rational"""
        if not self.is_constant():
            raise ValueError("function is not constant")
        return self.const.to_fraction() if self.const.is_rational() else self.const

    def ratio_constant(self, other: "FactoredFunction"):
        """self / other when that quotient is constant, else None"""
        quotient = self / other
        if not quotient.is_constant():
            return None
        return quotient.constant_value()

    def with_dim(self, dim: int) -> "FactoredFunction":
        """The same scalar function regarded on a torus of another dimension"""
        if not self.is_scalar():
            raise ValueError("only scalar functions change dimension")
        result = FactoredFunction(dim)
        result.const = self.const
        result.vexp = self.vexp
        result.scalar_q = self.scalar_q
        zero = (0,) * dim
        for (phase, k, _), m in self.factors.items():
            result.factors[(phase, k, zero)] = m
        return result

    def pullback(self, matrix: Sequence[Sequence[int]], torsion: Sequence[Fraction],
                 gamma: Sequence[Fraction], width: Optional[int] = None) -> "FactoredFunction":
        """
        Compose with the affine torus map z_i = e(torsion_i) v^gamma_i prod_j w_j^matrix[i][j]

        Args:
            matrix: dim x n integer matrix
            torsion: phases of the base point coordinates
            gamma: v-exponents of the base point coordinates
            width: n, needed only when dim is 0

        Returns:
            Function of the n coordinates w
        """
        rows = [[int(x) for x in row] for row in matrix]
        n = len(rows[0]) if rows else (width or 0)

        def image(u: Sequence[int]) -> Tuple[Fraction, Fraction, Tuple[int, ...]]:
            phase = sum((Fraction(t) * x for t, x in zip(torsion, u)), Fraction(0))
            k = sum((Fraction(g) * x for g, x in zip(gamma, u)), Fraction(0))
            w = tuple(sum(rows[i][j] * u[i] for i in range(self.dim)) for j in range(n))
            return phase % 1, k, w

        result = FactoredFunction(n)
        result.const = self.const
        result.vexp = self.vexp
        phase, k, w = image(self.mono)
        result.const = result.const * Cyclotomic.root_of_unity(phase)
        result.vexp += k
        result.mono = w
        for (p, kk, u), m in self.factors.items():
            shift, extra, w = image(u)
            result._insert(p + shift, kk + extra, w, m)
        return result

    def evaluate(self, v0: float, z: Optional[np.ndarray] = None) -> np.ndarray:
        """
        Complex values at v = v0 and torus points z

        Args:
            v0: positive real specialization of v
            z: complex array of shape (N, dim) or (dim,)
        """
        if z is None:
            z = np.ones((1, self.dim), dtype=complex)
        z = np.atleast_2d(np.asarray(z, dtype=complex))
        values = np.full(z.shape[0], self.const.to_complex() * v0 ** float(self.vexp), dtype=complex)
        values = values * np.prod(z ** np.array(self.mono, dtype=float), axis=1)
        for (phase, k, u), m in self.factors.items():
            term = 1 - np.exp(2j * np.pi * float(phase)) * v0 ** float(k) * np.prod(z ** np.array(u, dtype=float), axis=1)
            values = values * term ** m
        return values

    def to_rational_function(self) -> RationalFunctionV:
        """The element of Q(v) this scalar function denotes"""
        if not self.is_scalar():
            raise CertificationError("function depends on torus coordinates")
        q = self.scalar_q
        if (self.vexp * q).denominator != 1:
            raise CertificationError(f"v-exponent {self.vexp} is not a multiple of 1/{q}")

        by_phase: Dict[Fraction, int] = {key[0]: m for key, m in self.factors.items()}
        numerator = LaurentPoly.one()
        denominator = LaurentPoly.one()
        sign = 1

        # full Galois orbits of phases give cyclotomic polynomials in w
        conductors = sorted({p.denominator for p in by_phase})
        for n in conductors:
            orbit = [Fraction(j, n) for j in range(n) if gcd(j, n) == 1]
            common = min((by_phase.get(p, 0) for p in orbit), key=abs)
            if common == 0 or any((by_phase.get(p, 0) > 0) != (common > 0) for p in orbit):
                continue
            phi = LaurentPoly.from_sympy(Poly(cyclotomic_poly(n, _V), _V, domain=QQ))
            if n == 1:
                # prod over the single phase 0 is 1 - w = -Phi_1
                sign *= (-1) ** (abs(common) % 2)
            if common > 0:
                numerator = numerator * phi ** common
            else:
                denominator = denominator * phi ** (-common)
            for p in orbit:
                by_phase[p] -= common

        for phase, m in by_phase.items():
            if m == 0:
                continue
            linear = LaurentPoly({0: 1, 1: -Cyclotomic.root_of_unity(phase)})
            if m > 0:
                numerator = numerator * linear ** m
            else:
                denominator = denominator * linear ** (-m)

        numerator = numerator * Cyclotomic.coerce(self.const) * sign
        if not (numerator.is_rational() and denominator.is_rational()):
            raise CertificationError("function does not have rational coefficients")
        numerator = _compress(numerator, q)
        denominator = _compress(denominator, q)
        shift = int(self.vexp)
        if shift != self.vexp:
            raise CertificationError(f"v-exponent {self.vexp} is not integral")
        return RationalFunctionV(numerator.shift(shift), denominator)

    # rendering

    def render(self, names: Optional[Sequence[str]] = None) -> str:
        names = list(names) if names else [f"z{j + 1}" for j in range(self.dim)]
        pieces: List[str] = []
        const = self.const
        if not const == 1:
            pieces.append(const.render())
        if self.vexp:
            pieces.append(f"v^{self.vexp}")
        for name, e in zip(names, self.mono):
            if e:
                pieces.append(name if e == 1 else f"{name}^{e}")
        for (phase, k, u), m in sorted(self.factors.items(), key=lambda item: (item[0][2], item[0][1], item[0][0])):
            pieces.append(_render_binomial(phase, k, u, names, m))
        return " * ".join(pieces) if pieces else "1"

    def __repr__(self) -> str:
        return f"FactoredFunction({self.render()})"


def _compress(poly: LaurentPoly, q: int) -> LaurentPoly:
    """Substitute w = v^(1/q) back to v"""
    if q == 1:
        return poly
    terms = {}
    for e, c in poly.terms.items():
        if e % q:
            raise CertificationError(f"term w^{e} is not a power of v")
        terms[e // q] = c
    return LaurentPoly(terms)


def _render_binomial(phase: Fraction, k: Fraction, u: Tuple[int, ...], names: Sequence[str], m: int) -> str:
    parts = []
    if phase == HALF:
        sign = "+"
    else:
        sign = "-"
        if phase != 0:
            parts.append(f"e({phase})")
    if k:
        parts.append("v" if k == 1 else f"v^{k}")
    for name, e in zip(names, u):
        if e:
            parts.append(name if e == 1 else f"{name}^{e}")
    body = f"(1 {sign} {'*'.join(parts) or '1'})"
    return body if m == 1 else f"{body}^{m}"


def product(functions: Iterable[FactoredFunction], dim: int) -> FactoredFunction:
    result = FactoredFunction.one(dim)
    for f in functions:
        result = result * f
    return result
