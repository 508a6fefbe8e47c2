"""
Finite Weyl Groups
Full enumeration with reduced words, inversion sets, stabilizers and parabolic conjugation
"""
from collections import deque
from dataclasses import dataclass
from typing import TYPE_CHECKING, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from core.config import Limits, current_limits
from core.errors import BoundExceeded, ValidationError

if TYPE_CHECKING:
    from rootdata.datum import BasedRootDatum
    from rootdata.parameters import ParameterFunction


@dataclass(frozen=True)
class WeylElement:
    """
    Element of W0 acting on X by matrix (x -> matrix @ x) and on Y by
    the inverse transpose; word is a reduced word in simple reflections
    """
    index: int
    word: Tuple[int, ...]
    matrix: np.ndarray
    y_matrix: np.ndarray

    @property
    def length(self) -> int:
        return len(self.word)

    def act_x(self, x: Sequence) -> Tuple:
        return tuple(sum(int(self.matrix[i, j]) * x[j] for j in range(len(x))) for i in range(len(x)))

    def act_y(self, y: Sequence) -> Tuple:
        return tuple(sum(int(self.y_matrix[i, j]) * y[j] for j in range(len(y))) for i in range(len(y)))

    def render(self) -> str:
        return "e" if not self.word else "s" + ".s".join(str(j + 1) for j in self.word)

    def __hash__(self) -> int:
        return self.index

    def __eq__(self, other) -> bool:
        return isinstance(other, WeylElement) and self.index == other.index


class WeylGroup:
    """
    The finite Weyl group W0 of a based root datum, fully enumerated

    Elements are produced breadth first under right multiplication by simple
    reflections, so every stored word is reduced and element 0 is e.
    """

    def __init__(self, datum: "BasedRootDatum", limits: Optional[Limits] = None):
        self.datum = datum
        self.limits = current_limits(limits)
        n = datum.rank
        self.simple_x = []
        self.simple_y = []
        for a, a_vee in zip(datum.simple_roots, datum.simple_coroots):
            m = np.eye(n, dtype=np.int64) - np.outer(np.array(a, dtype=np.int64), np.array(a_vee, dtype=np.int64))
            self.simple_x.append(m)
            self.simple_y.append(m.T.copy())

        self.elements: List[WeylElement] = []
        self._lookup: Dict[bytes, int] = {}
        self._enumerate()
        self._root_images: Dict[int, Tuple[int, ...]] = {}
        self.longest = max(self.elements, key=lambda w: w.length)
        logger.info(f"Weyl group of {datum.name} initialized: {len(self.elements)} elements, "
                    f"l(w0) = {self.longest.length}")

    def _enumerate(self) -> None:
        n = self.datum.rank
        identity = np.eye(n, dtype=np.int64)
        self._add((), identity, identity)
        queue = deque([0])
        while queue:
            w = self.elements[queue.popleft()]
            for i, (sx, sy) in enumerate(zip(self.simple_x, self.simple_y)):
                mx = w.matrix @ sx
                key = mx.tobytes()
                if key in self._lookup:
                    continue
                if len(self.elements) >= self.limits.weyl_order_bound:
                    raise BoundExceeded(f"Weyl group of {self.datum.name} exceeds "
                                        f"{self.limits.weyl_order_bound} elements")
                self._add(w.word + (i,), mx, w.y_matrix @ sy)
                queue.append(len(self.elements) - 1)

    def _add(self, word: Tuple[int, ...], mx: np.ndarray, my: np.ndarray) -> None:
        mx.setflags(write=False)
        my.setflags(write=False)
        element = WeylElement(len(self.elements), word, mx, my)
        self._lookup[mx.tobytes()] = element.index
        self.elements.append(element)

    # group structure

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def identity(self) -> WeylElement:
        return self.elements[0]

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def from_matrix(self, matrix: np.ndarray) -> Optional[WeylElement]:
        idx = self._lookup.get(np.asarray(matrix, dtype=np.int64).tobytes())
        return None if idx is None else self.elements[idx]

    def from_word(self, word: Iterable[int]) -> WeylElement:
        m = np.eye(self.datum.rank, dtype=np.int64)
        for i in word:
            if not 0 <= i < len(self.simple_x):
                raise ValidationError(f"simple reflection index {i + 1} out of range")
            m = m @ self.simple_x[i]
        return self.from_matrix(m)

    def multiply(self, a: WeylElement, b: WeylElement) -> WeylElement:
        return self.from_matrix(a.matrix @ b.matrix)

    def inverse(self, w: WeylElement) -> WeylElement:
        return self.from_word(reversed(w.word))

    # roots

    def root_permutation(self, w: WeylElement) -> Tuple[int, ...]:
        """perm[i] = index of w(root_i)"""
        if w.index not in self._root_images:
            index = self.datum.index
            self._root_images[w.index] = tuple(index[w.act_x(r)] for r in self.datum.roots)
        return self._root_images[w.index]

    def inversions(self, w: WeylElement) -> List[int]:
        """Positive roots sent to negative roots by w"""
        perm = self.root_permutation(w)
        return [i for i in self.datum.positive_indices if not self.datum.is_positive(perm[i])]

    def m_w(self, parameters: "ParameterFunction", w: WeylElement) -> int:
        """Sum of the labels m_R over the inversions of w"""
        return sum(parameters.label(i) for i in self.inversions(w))

    def longest_in(self, subset: Sequence[int]) -> WeylElement:
        """Longest element of the parabolic subgroup generated by the subset"""
        w = self.identity
        while True:
            perm = self.root_permutation(w)
            step = next((j for j in subset if self.datum.is_positive(perm[j])), None)
            if step is None:
                return w
            w = self.multiply(w, self.from_word([step]))

    # orbits and stabilizers

    def orbit_x(self, x: Sequence) -> List[Tuple]:
        return sorted({w.act_x(x) for w in self.elements})

    def orbit_y(self, y: Sequence) -> List[Tuple]:
        return sorted({w.act_y(y) for w in self.elements})

    def stabilizer_x(self, x: Sequence) -> List[WeylElement]:
        x = tuple(x)
        return [w for w in self.elements if w.act_x(x) == x]

    def stabilizer_y(self, y: Sequence) -> List[WeylElement]:
        y = tuple(y)
        return [w for w in self.elements if w.act_y(y) == y]

    def standard_subsystem(self, roots: Sequence[int]) -> Tuple[WeylElement, Tuple[int, ...]]:
        """
        Conjugate a parabolic subsystem to a standard one

        Args:
            roots: indices of a subsystem R0 intersect V

        Returns:
            (w, P) with w of minimal length such that w maps the subsystem
            onto the roots spanned by the simple roots in P
        """
        target = set(roots)
        for w in self.elements:
            perm = self.root_permutation(w)
            image = {perm[i] for i in target}
            subset = tuple(sorted(j for j in self.datum.simple_indices if j in image))
            spanned = {i for i, coeffs in enumerate(self.datum.coefficients)
                       if all(x == 0 for j, x in enumerate(coeffs) if j not in subset)}
            if image == spanned:
                return w, subset
        raise ValidationError("root subset is not a parabolic subsystem")
