"""
Numeric Pole Oracle
Scans a grid of candidate points zeta * v0^gamma for residual points of mu specialized at v0
"""
from fractions import Fraction
from itertools import combinations, product
from math import ceil, lcm
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np
from loguru import logger

from core.config import Limits, current_limits
from mu.function import MuFunction
from rootdata.datum import BasedRootDatum
from torus.point import TorusPoint

PointKey = Tuple[Tuple[Fraction, ...], Tuple[Fraction, ...]]


def torsion_grid(rank: int, max_order: int) -> List[Tuple[Fraction, ...]]:
    """All points of (Q/Z)^rank of order at most max_order"""
    points: Set[Tuple[Fraction, ...]] = set()
    for n in range(1, max_order + 1):
        for numerators in product(range(n), repeat=rank):
            points.add(tuple(Fraction(a, n) for a in numerators))
    return sorted(points)


def _pole_bases(datum: BasedRootDatum) -> List[Tuple[int, np.ndarray]]:
    """(|det B|, B^-1) for every basis B of n independent positive roots in X-coordinates"""
    roots = np.array([[float(x) for x in datum.roots[i]] for i in datum.positive_indices])
    bases = []
    for subset in combinations(range(len(roots)), datum.rank):
        b = roots[list(subset)]
        det = np.linalg.det(b)
        if abs(det) < 0.5:
            continue
        bases.append((int(round(abs(det))), np.linalg.inv(b)))
    return bases


def gamma_grid(mu: MuFunction) -> Tuple[int, int]:
    """
    Radius and denominator of an exponent grid holding every residual point

    A residual point has n independent pole roots beta_j with <beta_j, gamma>
    = -2m(beta_j), so gamma = B^-1 e with |e_j| <= max |2m|. Its coordinates
    are bounded by the row sums of |B^-1| and lie in (1/|det B|) Z.
    """
    datum = mu.datum
    largest = max([abs(x) for x in mu.parameters.two_m_plus + mu.parameters.two_m_minus], default=0)
    radius, denominator = 0.0, 2
    for det, inverse in _pole_bases(datum):
        radius = max(radius, float(np.abs(inverse).sum(axis=1).max()) * largest)
        denominator = lcm(denominator, det)
    return ceil(radius - 1e-9), denominator


def pole_oracle(mu: MuFunction, v0: float = 2.0, grid: Optional[Tuple[int, int]] = None,
                limits: Optional[Limits] = None) -> List[TorusPoint]:
    """
    Grid points where the specialization of mu at v0 has a residual pole

    A candidate t is reported when the numerically counted poles minus zeros
    along the roots reach the rank; comparisons use the membership tolerance.
    """
    limits = current_limits(limits)
    datum = mu.datum
    n = datum.rank
    if n == 0:
        return [TorusPoint.identity(0)]
    radius, denominator = gamma_grid(mu) if grid is None else grid
    torsions = torsion_grid(n, limits.oracle_torsion_order)
    steps = [Fraction(k, denominator) for k in range(-radius * denominator, radius * denominator + 1)]
    gammas = list(product(steps, repeat=n))

    roots = np.array(datum.roots, dtype=float)
    tau = np.array([[float(x) for x in t] for t in torsions])
    gam = np.array([[float(x) for x in g] for g in gammas])
    phase = np.exp(2j * np.pi * (tau @ roots.T))
    modulus = v0 ** (gam @ roots.T)
    plus = v0 ** (-np.array(mu.parameters.two_m_plus, dtype=float))
    minus = -v0 ** (-np.array(mu.parameters.two_m_minus, dtype=float))
    tol = limits.membership_tolerance

    found: List[TorusPoint] = []
    for i, t in enumerate(torsions):
        values = phase[i][None, :] * modulus
        count = (np.abs(values - plus) < tol).sum(axis=1) + (np.abs(values - minus) < tol).sum(axis=1) \
            - (np.abs(values - 1) < tol).sum(axis=1) - (np.abs(values + 1) < tol).sum(axis=1)
        for j in np.nonzero(count >= n)[0]:
            found.append(TorusPoint(t, gammas[j]))
    logger.info(f"Pole oracle at v0 = {v0}: {len(torsions)} x {len(gammas)} candidates, {len(found)} residual")
    return sorted(found)


def oracle_orbit_count(mu: MuFunction, v0: float = 2.0, limits: Optional[Limits] = None) -> int:
    """Number of W0-orbits among the oracle's residual points"""
    weyl = mu.datum.weyl()
    remaining = {p.key for p in pole_oracle(mu, v0, limits=limits)}
    orbits = 0
    while remaining:
        torsion, gamma = min(remaining)
        p = TorusPoint(torsion, gamma)
        for w in weyl:
            remaining.discard(p.act(w.y_matrix).key)
        orbits += 1
    return orbits


def specialization_counts(mu: MuFunction, values: Sequence[float],
                          limits: Optional[Limits] = None) -> Dict[float, int]:
    """
    Oracle orbit counts at several v0; generic specializations agree

    Raises:
        ValueError: some v0 is not larger than 1
    """
    if any(v0 <= 1 for v0 in values):
        raise ValueError("every v0 must exceed 1")
    counts = {v0: oracle_orbit_count(mu, v0, limits) for v0 in values}
    if len(set(counts.values())) > 1:
        logger.warning(f"Orbit counts of {mu.datum.name} vary with v0: {counts}")
    return counts
