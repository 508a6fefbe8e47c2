"""
Parameter Functions
W-invariant labels on affine simple reflections and the derived half-integral m+ and m-
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from loguru import logger

from core.errors import ValidationError
from rootdata.datum import BasedRootDatum

# A W-conjugacy class of affine simple reflections: (root orbit, residue mod coroot content)
NodeClass = Tuple[Tuple[int, bool], int]


@dataclass(frozen=True)
class AffineNode:
    """A node of the arithmetic diagram: gradient alpha^vee, constant term"""
    name: str
    root: int
    constant: int
    component: int

    @property
    def is_affine(self) -> bool:
        return self.constant != 0


def affine_nodes(datum: BasedRootDatum) -> List[AffineNode]:
    """
    Simple affine roots of (R0^vee)^(1): alpha_i^vee for i in F0 and
    1 - theta^vee per component, theta the highest short root
    """
    nodes = [AffineNode(datum.node_name(j), j, 0, datum.component_of_root[j]) for j in datum.simple_indices]
    for c in range(len(datum.component_nodes)):
        theta = datum.highest_short_root(c)
        nodes.append(AffineNode(datum.affine_node_name(c), datum.negative_of(theta), 1, c))
    return nodes


def node_class(datum: BasedRootDatum, node: AffineNode) -> NodeClass:
    g = datum.coroot_content(node.root)
    return datum.orbit_id(node.root), node.constant % g


class ParameterFunction:
    """
    Parameters m on the roots of R0, stored as the integers 2m+(alpha) and 2m-(alpha)

    With a = m_R(alpha^vee) and b = m_R(1 - alpha^vee):  m+ = (a + b)/2, m- = (a - b)/2.
    When alpha^vee is not in 2Y the two affine roots are conjugate and m- = 0.
    """

    def __init__(self, datum: BasedRootDatum, two_m_plus: Sequence[int], two_m_minus: Sequence[int]):
        if len(two_m_plus) != len(datum.roots) or len(two_m_minus) != len(datum.roots):
            raise ValidationError("parameter vectors must have one entry per root")
        self.datum = datum
        self.two_m_plus: Tuple[int, ...] = tuple(int(x) for x in two_m_plus)
        self.two_m_minus: Tuple[int, ...] = tuple(int(x) for x in two_m_minus)
        for i in range(len(datum.roots)):
            if (self.two_m_plus[i] - self.two_m_minus[i]) % 2:
                raise ValidationError(f"m+ and m- of root {i} do not come from integer labels")
            if datum.coroot_content(i) == 1 and self.two_m_minus[i] != 0:
                raise ValidationError(f"root {i} has m- != 0 although its coroot is not in 2Y")

    # construction

    @classmethod
    def from_labels(cls, datum: BasedRootDatum, labels: Dict[str, int]) -> "ParameterFunction":
        """
        Labels per arithmetic-diagram node name (s1..sn, s0 or s0.k)

        Raises:
            ValidationError: unknown or missing node names, or labels that
                differ on W-conjugate nodes (the offending names are reported)
        """
        nodes = affine_nodes(datum)
        names = {node.name for node in nodes}
        unknown = sorted(set(labels) - names)
        if unknown:
            raise ValidationError(f"unknown parameter nodes: {', '.join(unknown)}")
        missing = sorted(names - set(labels))
        if missing:
            raise ValidationError(f"missing parameter nodes: {', '.join(missing)}")

        by_class: Dict[NodeClass, Tuple[str, int]] = {}
        for node in nodes:
            key = node_class(datum, node)
            value = int(labels[node.name])
            if key in by_class and by_class[key][1] != value:
                other, other_value = by_class[key]
                raise ValidationError(f"labels of W-conjugate nodes {other} = {other_value} and "
                                      f"{node.name} = {value} differ")
            by_class.setdefault(key, (node.name, value))

        plus, minus = [], []
        for i in range(len(datum.roots)):
            orbit = datum.orbit_id(i)
            a = by_class[(orbit, 0)][1]
            b = by_class[(orbit, 1)][1] if datum.coroot_content(i) == 2 else a
            plus.append(a + b)
            minus.append(a - b)
        logger.debug(f"Parameters on {datum.name}: {dict(sorted(labels.items()))}")
        return cls(datum, plus, minus)

    @classmethod
    def uniform(cls, datum: BasedRootDatum, value: int) -> "ParameterFunction":
        return cls.from_labels(datum, {node.name: value for node in affine_nodes(datum)})

    def restrict(self, sub: BasedRootDatum, root_map: Sequence[int]) -> "ParameterFunction":
        """m_P on a parabolic sub-datum whose roots map to ours via root_map"""
        return ParameterFunction(sub, [self.two_m_plus[i] for i in root_map],
                                 [self.two_m_minus[i] for i in root_map])

    def transported(self, datum: BasedRootDatum, root_map: Sequence[int]) -> "ParameterFunction":
        return ParameterFunction(datum, [self.two_m_plus[i] for i in root_map],
                                 [self.two_m_minus[i] for i in root_map])

    # queries

    def m_plus(self, i: int) -> Fraction:
        return Fraction(self.two_m_plus[i], 2)

    def m_minus(self, i: int) -> Fraction:
        return Fraction(self.two_m_minus[i], 2)

    def label(self, i: int) -> int:
        """a = m_R(alpha^vee) = m+ + m-"""
        return (self.two_m_plus[i] + self.two_m_minus[i]) // 2

    def affine_label(self, i: int) -> int:
        """b = m_R(1 - alpha^vee) = m+ - m-"""
        return (self.two_m_plus[i] - self.two_m_minus[i]) // 2

    def n_m(self, i: int) -> int:
        """2 exactly when the two affine classes above alpha carry different labels"""
        return 2 if self.two_m_minus[i] != 0 else 1

    def labels(self) -> Dict[str, int]:
        out = {}
        for node in affine_nodes(self.datum):
            out[node.name] = self.affine_label(node.root) if node.constant % 2 and \
                self.datum.coroot_content(node.root) == 2 else self.label(node.root)
        return out

    def orbit_labels(self) -> Dict[Tuple[int, bool], Tuple[int, int]]:
        """(a, b) per W0-orbit of roots"""
        out = {}
        for i in self.datum.positive_indices:
            out.setdefault(self.datum.orbit_id(i), (self.label(i), self.affine_label(i)))
        return out

    def is_standard(self) -> bool:
        return all(a != 0 and b != 0 for a, b in self.orbit_labels().values())

    def is_semi_standard(self) -> bool:
        return all(a != 0 or b != 0 for a, b in self.orbit_labels().values())

    def is_zero(self) -> bool:
        return not any(self.two_m_plus) and not any(self.two_m_minus)

    def max_label(self) -> int:
        return max([abs(x) for x in self.labels().values()], default=0)

    def __eq__(self, other) -> bool:
        return (isinstance(other, ParameterFunction) and self.datum is other.datum
                and self.two_m_plus == other.two_m_plus and self.two_m_minus == other.two_m_minus)

    def __hash__(self) -> int:
        return hash((self.two_m_plus, self.two_m_minus))

    def render(self) -> str:
        return ", ".join(f"{name} = {value}" for name, value in sorted(self.labels().items(),
                                                                       key=lambda item: _node_order(item[0])))

    def to_dict(self) -> Dict[str, int]:
        return dict(sorted(self.labels().items(), key=lambda item: _node_order(item[0])))


def _node_order(name: str) -> Tuple[int, int]:
    body = name[1:]
    if "." in body:
        head, tail = body.split(".")
        return int(head), int(tail)
    return int(body), 0
