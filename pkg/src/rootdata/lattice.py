"""
Integer Lattices
Hermite and Smith normal forms, kernels, saturations, congruences and finite quotients
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import gcd
from typing import List, Optional, Sequence, Tuple

from sympy import Matrix as SympyMatrix, ZZ
from sympy.matrices.normalforms import smith_normal_form as sympy_smith_normal_form

from core.errors import ValidationError

IntMatrix = List[List[int]]
Vector = Tuple[int, ...]


# basic matrix helpers (row-major lists of Python ints or Fractions)

def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(m: Sequence[Sequence]) -> List[List]:
    return [list(col) for col in zip(*m)] if m else []


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> List[List]:
    if not a:
        return []
    if not b:
        return [[] for _ in a]
    cols = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in cols] for row in a]


def mat_vec(a: Sequence[Sequence], v: Sequence) -> List:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def vec_mat(v: Sequence, a: Sequence[Sequence]) -> List:
    """Row vector times matrix"""
    if not a:
        return []
    return [sum(x * a[i][j] for i, x in enumerate(v)) for j in range(len(a[0]))]


def dot(u: Sequence, v: Sequence):
    return sum(x * y for x, y in zip(u, v))


def as_int_vector(v: Sequence) -> Vector:
    out = []
    for x in v:
        x = Fraction(x)
        if x.denominator != 1:
            raise ValidationError(f"vector {list(map(str, v))} is not integral")
        out.append(int(x))
    return tuple(out)


# rational Gaussian elimination

def row_reduce(m: Sequence[Sequence]) -> Tuple[List[List[Fraction]], List[int]]:
    """Reduced row echelon form over Q and the pivot columns"""
    rows = [[Fraction(x) for x in row] for row in m]
    pivots: List[int] = []
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        lead = rows[r][c]
        rows[r] = [x / lead for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [x - factor * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(m: Sequence[Sequence]) -> int:
    if not m or not m[0]:
        return 0
    return len(row_reduce(m)[1])


def inverse(m: Sequence[Sequence]) -> List[List[Fraction]]:
    n = len(m)
    augmented = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    reduced, pivots = row_reduce(augmented)
    if pivots[:n] != list(range(n)):
        raise ValidationError("matrix is singular")
    return [row[n:] for row in reduced[:n]]


def determinant(m: Sequence[Sequence]) -> Fraction:
    rows = [[Fraction(x) for x in row] for row in m]
    n = len(rows)
    det = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            rows[c], rows[pivot] = rows[pivot], rows[c]
            det = -det
        det *= rows[c][c]
        for i in range(c + 1, n):
            factor = rows[i][c] / rows[c][c]
            rows[i] = [x - factor * y for x, y in zip(rows[i], rows[c])]
    return det


def solve(a: Sequence[Sequence], b: Sequence) -> Optional[List[Fraction]]:
    """Unique solution x of a x = b over Q, None when inconsistent or underdetermined"""
    n = len(a[0]) if a else 0
    augmented = [list(row) + [y] for row, y in zip(a, b)]
    reduced, pivots = row_reduce(augmented)
    if n in pivots or len(pivots) < n:
        return None
    x = [Fraction(0)] * n
    for row, c in zip(reduced, pivots):
        x[c] = row[n]
    return x


def solve_left(rows: Sequence[Sequence], v: Sequence) -> Optional[List[Fraction]]:
    """Coefficients c with sum c_i rows_i = v, None if v is outside the span"""
    if not rows:
        return [] if all(x == 0 for x in v) else None
    return solve(transpose(rows), v)


# integer normal forms

def hermite_normal_form(m: Sequence[Sequence[int]]) -> Tuple[IntMatrix, IntMatrix]:
    """
    Row-style Hermite normal form

    Returns:
        (H, U) with U unimodular and U m = H; H is in echelon form with
        positive pivots and entries above each pivot reduced into [0, pivot).
        Zero rows of H sit at the bottom.
    """
    h = [[int(x) for x in row] for row in m]
    nrows = len(h)
    u = identity(nrows)
    if nrows == 0:
        return h, u
    ncols = len(h[0])
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        while True:
            nonzero = [i for i in range(r, nrows) if h[i][c] != 0]
            if not nonzero:
                break
            pivot = min(nonzero, key=lambda i: abs(h[i][c]))
            h[r], h[pivot] = h[pivot], h[r]
            u[r], u[pivot] = u[pivot], u[r]
            done = True
            for i in range(r + 1, nrows):
                q = h[i][c] // h[r][c]
                if q:
                    h[i] = [x - q * y for x, y in zip(h[i], h[r])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[r])]
                if h[i][c] != 0:
                    done = False
            if done:
                break
        if all(h[i][c] == 0 for i in range(r, nrows)):
            continue
        if h[r][c] < 0:
            h[r] = [-x for x in h[r]]
            u[r] = [-x for x in u[r]]
        for i in range(r):
            q = h[i][c] // h[r][c]
            if q:
                h[i] = [x - q * y for x, y in zip(h[i], h[r])]
                u[i] = [x - q * y for x, y in zip(u[i], u[r])]
        r += 1
    return h, u


def hnf_basis(vectors: Sequence[Sequence[int]], width: Optional[int] = None) -> Tuple[Vector, ...]:
    """Canonical basis of the lattice spanned by the vectors"""
    rows = [list(v) for v in vectors]
    if not rows:
        return ()
    h, _ = hermite_normal_form(rows)
    return tuple(tuple(row) for row in h if any(row))


def smith_normal_form(m: Sequence[Sequence[int]]) -> Tuple[IntMatrix, List[int], IntMatrix]:
    """
    Smith normal form with transforms

    Returns:
        (U, diagonal, V) with U m V = D, U and V unimodular and the diagonal
        d_1 | d_2 | ... nonnegative (zeros last); the diagonal has length
        min(rows, cols).
    """
    d = [[int(x) for x in row] for row in m]
    nrows = len(d)
    ncols = len(d[0]) if nrows else 0
    u = identity(nrows)
    v = identity(ncols)

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(target, source, q):
        d[target] = [x + q * y for x, y in zip(d[target], d[source])]
        u[target] = [x + q * y for x, y in zip(u[target], u[source])]

    def add_col(target, source, q):
        for row in d:
            row[target] += q * row[source]
        for row in v:
            row[target] += q * row[source]

    for t in range(min(nrows, ncols)):
        entries = [(abs(d[i][j]), i, j) for i in range(t, nrows) for j in range(t, ncols) if d[i][j] != 0]
        if not entries:
            break
        _, i, j = min(entries)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            changed = False
            for i in range(t + 1, nrows):
                if d[i][t]:
                    q = d[i][t] // d[t][t]
                    add_row(i, t, -q)
                    if d[i][t]:
                        swap_rows(t, i)
                        changed = True
            for j in range(t + 1, ncols):
                if d[t][j]:
                    q = d[t][j] // d[t][t]
                    add_col(j, t, -q)
                    if d[t][j]:
                        swap_cols(t, j)
                        changed = True
            if changed:
                continue
            # divisibility of the remaining block
            bad = next(((i, j) for i in range(t + 1, nrows) for j in range(t + 1, ncols)
                        if d[i][j] % d[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]

    diagonal = [d[i][i] for i in range(min(nrows, ncols))]
    return u, diagonal, v


def invariant_factors(m: Sequence[Sequence[int]]) -> List[int]:
    """Nonzero invariant factors, computed by sympy as an independent check of our own form"""
    if not m or not m[0]:
        return []
    snf = sympy_smith_normal_form(SympyMatrix(m), domain=ZZ)
    factors = [abs(int(snf[i, i])) for i in range(min(snf.shape))]
    return [f for f in factors if f != 0]


def unimodular_inverse(m: Sequence[Sequence[int]]) -> IntMatrix:
    return [[int(x) for x in row] for row in inverse(m)]


def kernel(m: Sequence[Sequence[int]], width: Optional[int] = None) -> Tuple[Vector, ...]:
    """HNF basis of {x in Z^n : m x = 0}"""
    n = len(m[0]) if m and m[0] else (width or 0)
    if not m:
        return tuple(tuple(row) for row in identity(n))
    _, diagonal, v = smith_normal_form(m)
    r = sum(1 for x in diagonal if x != 0)
    vectors = [tuple(v[i][j] for i in range(n)) for j in range(r, n)]
    return hnf_basis(vectors)


def saturation(vectors: Sequence[Sequence[int]], width: int) -> Tuple[Vector, ...]:
    """(Q-span of the vectors) intersected with Z^width"""
    if not vectors:
        return ()
    annihilator = kernel([list(v) for v in vectors])
    if not annihilator:
        return tuple(tuple(row) for row in identity(width))
    return kernel([list(a) for a in annihilator])


def is_saturated(vectors: Sequence[Sequence[int]], width: int) -> bool:
    return hnf_basis(vectors) == saturation(vectors, width)


def solve_congruence(b: Sequence[Sequence[int]], c: Sequence[Fraction]) -> List[Tuple[Fraction, ...]]:
    """
    All tau in (Q/Z)^n with b tau = c mod Z

    Args:
        b: m x n integer matrix of rank n
        c: right-hand side in Q^m

    Returns:
        Solutions with entries in [0, 1), sorted; empty if inconsistent
    """
    n = len(b[0])
    u, diagonal, v = smith_normal_form(b)
    uc = mat_vec(u, [Fraction(x) for x in c])
    if sum(1 for x in diagonal if x) < n:
        raise ValidationError("congruence system does not determine a finite set")
    for extra in uc[n:]:
        if extra.denominator != 1:
            return []
    choices = [[(uc[i] + j) / diagonal[i] for j in range(diagonal[i])] for i in range(n)]
    solutions = set()
    for sigma in product(*choices):
        tau = tuple(x % 1 for x in mat_vec(v, sigma))
        solutions.add(tau)
    return sorted(solutions)


def coordinates_in_sublattice(basis: Sequence[Sequence[int]], vector: Sequence) -> Optional[List[Fraction]]:
    """Rational coordinates of the vector in the given basis, None outside the span"""
    return solve_left(basis, vector)


@dataclass
class FiniteAbelianGroupPresentation:
    """
    Finite abelian group Z^n / relations

    generators are elements of the ambient lattice (rational coordinates
    allowed when the group is realized inside a larger rational space);
    invariant_factors lists the orders of the cyclic factors (all > 1).
    """
    invariant_factors: List[int] = field(default_factory=list)
    generators: List[Tuple[Fraction, ...]] = field(default_factory=list)
    relations: IntMatrix = field(default_factory=list)

    @property
    def order(self) -> int:
        total = 1
        for f in self.invariant_factors:
            total *= f
        return total

    def is_trivial(self) -> bool:
        return self.order == 1

    def elements(self) -> List[Tuple[int, ...]]:
        """Exponent vectors of all elements with respect to the generators"""
        return list(product(*[range(f) for f in self.invariant_factors]))

    def render(self) -> str:
        if not self.invariant_factors:
            return "1"
        return " x ".join(f"Z/{f}" for f in self.invariant_factors)

    def to_dict(self):
        return {
            "order": self.order,
            "invariant_factors": self.invariant_factors,
            "generators": [[str(x) for x in g] for g in self.generators],
        }


def lattice_quotient(sub: Sequence[Sequence[int]], width: Optional[int] = None) -> FiniteAbelianGroupPresentation:
    """
    Z^n / span(sub) for a full-rank sublattice given by integer rows

    Raises:
        ValidationError: sub does not have full rank
    """
    rows = [[int(x) for x in row] for row in sub]
    n = len(rows[0]) if rows else (width or 0)
    if n == 0:
        return FiniteAbelianGroupPresentation()
    if not rows or rank(rows) < n:
        raise ValidationError("sublattice has a rank defect")
    _, diagonal, v = smith_normal_form(rows)
    v_inverse = unimodular_inverse(v)
    factors = invariant_factors(rows)
    if sorted(f for f in diagonal if f > 1) != sorted(f for f in factors if f > 1):
        raise ValidationError(f"Smith form mismatch: {diagonal} vs {factors}")
    generators = [tuple(Fraction(x) for x in v_inverse[i]) for i, f in enumerate(diagonal) if f > 1]
    return FiniteAbelianGroupPresentation(
        invariant_factors=[f for f in diagonal if f > 1],
        generators=generators,
        relations=rows,
    )


def relative_quotient(super_basis: Sequence[Sequence], sub_vectors: Sequence[Sequence]) -> FiniteAbelianGroupPresentation:
    """
    super / sub for lattices given in common (possibly rational) ambient coordinates

    Generators are returned in ambient coordinates.
    """
    coords = []
    for vec in sub_vectors:
        c = coordinates_in_sublattice(super_basis, vec)
        if c is None:
            raise ValidationError("sublattice is not contained in the lattice")
        coords.append(as_int_vector(c))
    quotient = lattice_quotient(coords, width=len(super_basis))
    quotient.generators = [tuple(vec_mat(g, [[Fraction(x) for x in row] for row in super_basis]))
                           for g in quotient.generators]
    return quotient


def vector_gcd(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, abs(int(x)))
    return g
