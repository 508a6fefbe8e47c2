"""
Torus Points
L-points s * v^gamma of T = Hom(X, C*) with exact torsion and exponent parts
"""
import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence, Tuple

import numpy as np

from core.errors import DocumentSyntaxError
from exactscalars.cyclotomic import Cyclotomic
from rootdata.lattice import dot, mat_vec

_POINT = re.compile(r"\s*zeta\s*=\s*\(([^)]*)\)\s*gamma\s*=\s*\(([^)]*)\)\s*$")


def _fractions(values: Sequence) -> Tuple[Fraction, ...]:
    return tuple(Fraction(x) for x in values)


@dataclass(frozen=True)
class TorusPoint:
    """
    x(p) = e(<torsion, x>) * v^<gamma, x> for x in X

    torsion lies in [0, 1)^n and gamma in Q^n, both in Y-coordinates.
    """
    torsion: Tuple[Fraction, ...]
    gamma: Tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.torsion) != len(self.gamma):
            raise ValueError("torsion and gamma have different lengths")
        object.__setattr__(self, "torsion", tuple(Fraction(x) % 1 for x in self.torsion))
        object.__setattr__(self, "gamma", _fractions(self.gamma))

    @classmethod
    def identity(cls, n: int) -> "TorusPoint":
        zero = (Fraction(0),) * n
        return cls(zero, zero)

    @classmethod
    def of(cls, torsion: Sequence, gamma: Sequence) -> "TorusPoint":
        return cls(_fractions(torsion), _fractions(gamma))

    @property
    def rank(self) -> int:
        return len(self.torsion)

    def evaluate(self, x: Sequence[int]) -> Tuple[Fraction, Fraction]:
        """(phase, exponent) with x(p) = e(phase) v^exponent"""
        return Fraction(dot(self.torsion, x)) % 1, Fraction(dot(self.gamma, x))

    def __mul__(self, other: "TorusPoint") -> "TorusPoint":
        return TorusPoint(tuple(a + b for a, b in zip(self.torsion, other.torsion)),
                          tuple(a + b for a, b in zip(self.gamma, other.gamma)))

    def inverse(self) -> "TorusPoint":
        return TorusPoint(tuple(-a for a in self.torsion), tuple(-a for a in self.gamma))

    def __truediv__(self, other: "TorusPoint") -> "TorusPoint":
        return self * other.inverse()

    def act(self, y_matrix) -> "TorusPoint":
        """w(p) for w acting on Y by the given matrix"""
        m = [[int(x) for x in row] for row in np.asarray(y_matrix)]
        return TorusPoint(tuple(mat_vec(m, self.torsion)), tuple(mat_vec(m, self.gamma)))

    def image(self, matrix: Sequence[Sequence[int]]) -> "TorusPoint":
        """Image under the homomorphism of tori whose cocharacter map is y -> matrix y"""
        return TorusPoint(tuple(mat_vec(matrix, self.torsion)), tuple(mat_vec(matrix, self.gamma)))

    def is_l_point(self) -> bool:
        """gamma in Y, so that every character takes values in e(Q) v^Z"""
        return all(g.denominator == 1 for g in self.gamma)

    def is_torsion(self) -> bool:
        return all(g == 0 for g in self.gamma)

    def order(self) -> int:
        """Order of the torsion part"""
        n = 1
        for t in self.torsion:
            n = n * t.denominator // gcd(n, t.denominator)
        return n

    @property
    def key(self) -> Tuple[Tuple[Fraction, ...], Tuple[Fraction, ...]]:
        return self.torsion, self.gamma

    def log_coordinates(self, v0: float) -> Tuple[np.ndarray, np.ndarray]:
        """(rho, theta) with x(p(v0)) = exp(<rho, x> + 2 pi i <theta, x>)"""
        return (np.array([float(g) for g in self.gamma]) * np.log(v0),
                np.array([float(t) for t in self.torsion]))

    def render(self) -> str:
        return f"zeta=({','.join(str(t) for t in self.torsion)}) gamma=({','.join(str(g) for g in self.gamma)})"

    def to_dict(self):
        return {"zeta": [str(t) for t in self.torsion], "gamma": [str(g) for g in self.gamma]}

    def __lt__(self, other: "TorusPoint") -> bool:
        return self.key < other.key


def evaluate_character(x: Sequence[int], p: TorusPoint) -> Tuple[Cyclotomic, Fraction]:
    """(zeta, n) with x(p) = zeta * v^n"""
    phase, exponent = p.evaluate(x)
    return Cyclotomic.root_of_unity(phase), exponent


def parse_point(text: str, line: int = 0, column: int = 0) -> TorusPoint:
    """Inverse of TorusPoint.render"""
    match = _POINT.match(text)
    if not match:
        raise DocumentSyntaxError(f"expected 'zeta=(..) gamma=(..)', got '{text.strip()}'", line, column)
    try:
        torsion = [Fraction(s.strip()) for s in match.group(1).split(",") if s.strip()]
        gamma = [Fraction(s.strip()) for s in match.group(2).split(",") if s.strip()]
    except (ValueError, ZeroDivisionError) as e:
        raise DocumentSyntaxError(f"bad rational in point: {e}", line, column)
    if len(torsion) != len(gamma):
        raise DocumentSyntaxError("zeta and gamma have different lengths", line, column)
    return TorusPoint.of(torsion, gamma)
