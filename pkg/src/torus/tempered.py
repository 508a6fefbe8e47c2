"""
Tempered Forms
Fixed-v0 slices r(v0) * T^L_u of cosets, membership distances and sampled separation
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from core.config import Limits, current_limits
from rootdata.datum import BasedRootDatum
from rootdata.weyl import WeylGroup
from torus.coset import Coset


def _distance_to_integers(values: np.ndarray) -> np.ndarray:
    return np.abs(values - np.round(values))


@dataclass
class TemperedForm:
    """
    L^temp at v = v0 for a coset L = r T^L

    A point t of T is given by log coordinates (rho, theta) in Y (x) R with
    x(t) = exp(<rho, x> + 2 pi i <theta, x>). The center is rho of the
    normalized base, so the slice does not depend on how L was presented.
    """
    coset: Coset
    v0: float
    center: np.ndarray
    torsion: np.ndarray
    annihilator: np.ndarray
    directions: np.ndarray

    @classmethod
    def of(cls, coset: Coset, datum: BasedRootDatum, v0: float) -> "TemperedForm":
        if v0 <= 1:
            raise ValueError(f"tempered forms need v0 > 1, got {v0}")
        base = coset.normalized_base(datum)
        rho, theta = base.log_coordinates(v0)
        n = coset.rank
        annihilator = np.array(coset.annihilator, dtype=float).reshape(-1, n)
        directions = np.array(coset.subtorus, dtype=float).reshape(-1, n)
        return cls(coset, v0, rho, theta, annihilator, directions)

    def distance(self, rho: np.ndarray, theta: np.ndarray) -> np.ndarray:
        """
        Sup-norm distance of points (rows of rho, theta) to the slice

        Zero exactly on L^temp; the unitary part is measured modulo Z on the
        characters trivial on T^L.
        """
        rho = np.atleast_2d(rho)
        theta = np.atleast_2d(theta)
        real = np.max(np.abs(rho - self.center), axis=1) if rho.shape[1] else np.zeros(rho.shape[0])
        if self.annihilator.shape[0] == 0:
            return real
        pairing = (theta - self.torsion) @ self.annihilator.T
        unitary = np.max(_distance_to_integers(pairing), axis=1)
        return np.maximum(real, unitary)

    def sample(self, count: int, seed: int) -> Tuple[np.ndarray, np.ndarray]:
        """count points of L^temp as (rho, theta) rows"""
        rng = np.random.default_rng(seed)
        n = self.center.shape[0]
        rho = np.tile(self.center, (count, 1))
        theta = np.tile(self.torsion, (count, 1))
        if self.directions.shape[0]:
            u = rng.random((count, self.directions.shape[0]))
            theta = theta + u @ self.directions
        return rho.reshape(count, n), np.mod(theta, 1.0).reshape(count, n)


def tempered_membership(coset: Coset, datum: BasedRootDatum, v0: float, rho: Sequence[float],
                        theta: Sequence[float], limits: Optional[Limits] = None) -> Tuple[bool, float]:
    """
    Whether the point exp(rho + 2 pi i theta) lies on L^temp at v0

    Returns:
        (member, distance) with member decided at the membership tolerance
    """
    limits = current_limits(limits)
    form = TemperedForm.of(coset, datum, v0)
    distance = float(form.distance(np.asarray(rho, dtype=float), np.asarray(theta, dtype=float))[0])
    return distance <= limits.membership_tolerance, distance


def sample_tempered(coset: Coset, datum: BasedRootDatum, v0: float, count: int, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    return TemperedForm.of(coset, datum, v0).sample(count, seed)


def orbit_separation(first: Coset, second: Coset, datum: BasedRootDatum, v0: float,
                     weyl: Optional[WeylGroup] = None, limits: Optional[Limits] = None) -> float:
    """
    Least distance from the sampled W0-orbit of first^temp to second^temp

    Positive for cosets in distinct W0-orbits, zero when the tempered forms meet.
    """
    limits = current_limits(limits)
    weyl = weyl or datum.weyl()
    target = TemperedForm.of(second, datum, v0)
    rho, theta = sample_tempered(first, datum, v0, limits.tempered_samples, limits.sample_seed)
    best = np.inf
    for w in weyl:
        n_w = np.asarray(w.y_matrix, dtype=float)
        d = target.distance(rho @ n_w.T, theta @ n_w.T)
        best = min(best, float(np.min(d)))
    logger.debug(f"Separation of {first.render()} and {second.render()} at v0 = {v0}: {best:.3e}")
    return best


def disjointness_report(cosets: Sequence[Coset], datum: BasedRootDatum, v0: float,
                        limits: Optional[Limits] = None) -> List[Tuple[int, int, float, bool]]:
    """
    Pairwise separations of orbit representatives at v0

    Returns:
        (i, j, distance, separated) for i < j, separated meaning the distance
        exceeds the disjointness margin
    """
    limits = current_limits(limits)
    weyl = datum.weyl()
    report = []
    for i in range(len(cosets)):
        for j in range(i + 1, len(cosets)):
            d = orbit_separation(cosets[i], cosets[j], datum, v0, weyl, limits)
            report.append((i, j, d, d > limits.disjointness_margin))
    failures = [r for r in report if not r[3]]
    if failures:
        logger.warning(f"{len(failures)} pairs of tempered forms closer than {limits.disjointness_margin}")
    return report


def specialize(coset: Coset, v0: float) -> Tuple[Tuple[int, ...], Tuple[complex, ...]]:
    """Complex values of the characters trivial on T^L at v = v0, used to test injectivity"""
    values = []
    for phase, exponent in coset.values():
        values.append(complex(np.exp(2j * np.pi * float(phase)) * v0 ** float(exponent)))
    return coset.subtorus, tuple(values)
