"""
Cartan Data
Dynkin type expressions, Cartan matrices, ambient simple roots and type recognition
"""
import re
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
from networkx.algorithms.isomorphism import DiGraphMatcher, categorical_edge_match

from core.errors import ValidationError

IrreducibleType = Tuple[str, int]

_TYPE_TOKEN = re.compile(r"([A-Ga-g])\s*(\d+)")
_SEPARATORS = re.compile(r"\s*(?:x|×|\*|\+|,)\s*|\s+")

# Candidate order used when several names fit one diagram (D3 -> A3, C2 -> B2)
RECOGNITION_ORDER = "ABCDEFG"

# The rank 0 torus: no roots and X = 0
RANK_ZERO = "T0"


def parse_type(expression: str) -> List[IrreducibleType]:
    """Split "B3 x A1" into [("B", 3), ("A", 1)]"""
    components = []
    for token in _SEPARATORS.split(expression.strip()):
        if not token:
            continue
        match = _TYPE_TOKEN.fullmatch(token)
        if not match:
            raise ValidationError(f"unknown Dynkin type '{token}'")
        letter, n = match.group(1).upper(), int(match.group(2))
        validate_type(letter, n)
        components.append((letter, n))
    if not components:
        raise ValidationError("empty type expression")
    return components


def validate_type(letter: str, n: int) -> None:
    minimum = {"A": 1, "B": 2, "C": 2, "D": 3}
    if letter in minimum and n < minimum[letter]:
        raise ValidationError(f"type {letter}{n} needs rank at least {minimum[letter]}")
    if letter == "E" and n not in (6, 7, 8):
        raise ValidationError(f"type E{n} does not exist")
    if letter == "F" and n != 4:
        raise ValidationError(f"type F{n} does not exist")
    if letter == "G" and n != 2:
        raise ValidationError(f"type G{n} does not exist")


def format_type(components: Sequence[IrreducibleType]) -> str:
    return " x ".join(f"{letter}{n}" for letter, n in components) if components else "rank 0"


def _bond(c: List[List[int]], i: int, j: int, long_to_short: int = 1) -> None:
    """Join nodes i and j; node j short when long_to_short > 1"""
    c[i][j] = -long_to_short
    c[j][i] = -1


def irreducible_cartan(letter: str, n: int) -> List[List[int]]:
    """C[i][j] = <alpha_i^vee, alpha_j> in Bourbaki numbering"""
    validate_type(letter, n)
    c = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    if letter in "ABC":
        for i in range(n - 1):
            _bond(c, i, i + 1)
        if letter == "B":
            # alpha_n short
            c[n - 1][n - 2] = -2
        elif letter == "C":
            # alpha_n long
            c[n - 2][n - 1] = -2
    elif letter == "D":
        for i in range(n - 2):
            _bond(c, i, i + 1)
        _bond(c, n - 3, n - 1)
    elif letter == "E":
        for i, j in ((0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)):
            if j < n:
                _bond(c, i, j)
        _bond(c, 1, 3)
    elif letter == "F":
        _bond(c, 0, 1)
        _bond(c, 1, 2)
        c[2][1] = -2
        _bond(c, 2, 3)
    elif letter == "G":
        c[0][1] = -3
        c[1][0] = -1
    return c


def cartan_matrix(components: Sequence[IrreducibleType]) -> List[List[int]]:
    """Block-diagonal Cartan matrix of a product type"""
    blocks = [irreducible_cartan(letter, n) for letter, n in components]
    size = sum(len(b) for b in blocks)
    c = [[0] * size for _ in range(size)]
    offset = 0
    for block in blocks:
        for i, row in enumerate(block):
            for j, x in enumerate(row):
                c[offset + i][offset + j] = x
        offset += len(block)
    return c


def _ambient_irreducible(letter: str, n: int) -> Tuple[List[List[int]], List[List[int]]]:
    """
    Simple roots and coroots (as rows) in ambient coordinates

    Classical B, C, D use the epsilon basis so that Z^n is a valid lattice;
    every other type uses fundamental-weight coordinates, in which the roots
    are the columns of the Cartan matrix and the coroots the unit vectors.
    """
    if letter in "BCD":
        roots, coroots = [], []
        for i in range(n - 1):
            e = [0] * n
            e[i], e[i + 1] = 1, -1
            roots.append(list(e))
            coroots.append(list(e))
        last_root, last_coroot = [0] * n, [0] * n
        if letter == "B":
            last_root[n - 1], last_coroot[n - 1] = 1, 2
        elif letter == "C":
            last_root[n - 1], last_coroot[n - 1] = 2, 1
        else:
            last_root[n - 2] = last_root[n - 1] = 1
            last_coroot[n - 2] = last_coroot[n - 1] = 1
        roots.append(last_root)
        coroots.append(last_coroot)
        return roots, coroots

    c = irreducible_cartan(letter, n)
    roots = [[c[i][j] for i in range(n)] for j in range(n)]
    coroots = [[int(i == j) for i in range(n)] for j in range(n)]
    return roots, coroots


def ambient_simple_system(components: Sequence[IrreducibleType]) -> Tuple[List[List[int]], List[List[int]]]:
    """Block-diagonal simple roots and coroots of a product type in ambient coordinates"""
    blocks = [_ambient_irreducible(letter, n) for letter, n in components]
    size = sum(len(r) for r, _ in blocks)
    roots, coroots = [], []
    offset = 0
    for block_roots, block_coroots in blocks:
        width = len(block_roots)
        for r, cr in zip(block_roots, block_coroots):
            roots.append([0] * offset + r + [0] * (size - offset - width))
            coroots.append([0] * offset + cr + [0] * (size - offset - width))
        offset += width
    return roots, coroots


def _cartan_graph(c: Sequence[Sequence[int]], nodes: Optional[Sequence[int]] = None) -> nx.DiGraph:
    nodes = list(range(len(c))) if nodes is None else list(nodes)
    graph = nx.DiGraph()
    graph.add_nodes_from(nodes)
    for i in nodes:
        for j in nodes:
            if i != j and c[i][j] != 0:
                graph.add_edge(i, j, cartan=c[i][j])
    return graph


def components_of(c: Sequence[Sequence[int]]) -> List[List[int]]:
    """Connected components of the Dynkin diagram, each sorted, ordered by least node"""
    graph = _cartan_graph(c).to_undirected()
    return sorted((sorted(comp) for comp in nx.connected_components(graph)), key=lambda comp: comp[0])


def recognize(c: Sequence[Sequence[int]], nodes: Sequence[int]) -> Tuple[IrreducibleType, Dict[int, int]]:
    """
    Dynkin type of one connected component

    Returns:
        ((letter, n), mapping) where mapping sends each node to its Bourbaki
        index 0..n-1 in the standard diagram

    Raises:
        ValidationError: the component is not a finite crystallographic type
    """
    graph = _cartan_graph(c, nodes)
    n = len(nodes)
    for letter in RECOGNITION_ORDER:
        try:
            validate_type(letter, n)
        except ValidationError:
            continue
        standard = _cartan_graph(irreducible_cartan(letter, n))
        matcher = DiGraphMatcher(graph, standard, edge_match=categorical_edge_match("cartan", 0))
        for mapping in matcher.isomorphisms_iter():
            return (letter, n), dict(mapping)
    raise ValidationError(f"Cartan matrix on nodes {list(nodes)} is not of finite type")


def diagram_automorphisms(c: Sequence[Sequence[int]], labels: Optional[Sequence] = None) -> List[Tuple[int, ...]]:
    """All permutations of the nodes preserving the Cartan matrix (and labels, when given)"""
    graph = _cartan_graph(c)
    if labels is not None:
        for i, label in enumerate(labels):
            graph.nodes[i]["label"] = label
    node_match = (lambda a, b: a.get("label") == b.get("label")) if labels is not None else None
    matcher = DiGraphMatcher(graph, graph, node_match=node_match,
                             edge_match=categorical_edge_match("cartan", 0))
    perms = {tuple(mapping[i] for i in range(len(c))) for mapping in matcher.isomorphisms_iter()}
    return sorted(perms)


def fraction_matrix(m: Sequence[Sequence]) -> List[List[Fraction]]:
    return [[Fraction(x) for x in row] for row in m]


def _opposite(letter: str, n: int, i: int) -> int:
    """-w0 on Bourbaki index i of an irreducible type"""
    if letter == "A":
        return n - 1 - i
    if letter == "D" and n % 2 == 1 and i >= n - 2:
        return 2 * n - 3 - i
    if letter == "E" and n == 6:
        return {0: 5, 5: 0, 2: 4, 4: 2}.get(i, i)
    return i


def opposition_involution(c: Sequence[Sequence[int]], nodes: Sequence[int]) -> Dict[int, int]:
    """
    The permutation -w_K of a finite-type node subset K, componentwise

    Raises:
        ValidationError: some component of K is not of finite type
    """
    graph = _cartan_graph(c, nodes).to_undirected()
    result: Dict[int, int] = {}
    for comp in nx.connected_components(graph):
        (letter, n), mapping = recognize(c, sorted(comp))
        back = {b: node for node, b in mapping.items()}
        for node, b in mapping.items():
            result[node] = back[_opposite(letter, n, b)]
    return result
