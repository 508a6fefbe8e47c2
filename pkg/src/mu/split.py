"""
Splitting and Symmetries of mu
Product decomposition along standard parabolic cosets, pullback invariance and density signs
"""
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from core.config import Limits, current_limits
from core.errors import AccountingError
from exactscalars.factored import FactoredFunction
from mu.function import MuFunction, RegularizedMu, build_mu, regularize
from rootdata.lattice import transpose
from rootdata.weyl import WeylElement
from torus.coset import Coset, k_groups
from torus.point import TorusPoint
from torus.tempered import TemperedForm


@dataclass
class SplitMu:
    """
    mu^(L) = mu_P^({r}) * v^(-2 m_W(w^P)) / prod_{alpha in R0+ - R_P+} (c_alpha c_alpha^(w^P))

    conjugator moves L to the standard coset that was split.
    """
    coset: Coset
    conjugator: WeylElement
    subset: Tuple[int, ...]
    point_part: RegularizedMu
    coset_part: FactoredFunction
    regularized: RegularizedMu

    def to_dict(self, datum) -> Dict:
        return {
            "P": [j + 1 for j in self.subset],
            "conjugator": self.conjugator.render(),
            "point_part": self.point_part.restricted.render(),
            "coset_part": self.coset_part.render([f"w{j + 1}" for j in range(self.coset.dim)]),
            "regularized": self.regularized.render(),
        }


def split_mu(mu: MuFunction, coset: Coset) -> SplitMu:
    """
    Split mu^(L) into the formal degree of the parabolic sub-datum and the rest

    L is first conjugated so that R_L is a standard parabolic subsystem R_P.

    Raises:
        AccountingError: the two sides differ as factored functions
    """
    datum = mu.datum
    weyl = datum.weyl()
    w, subset = weyl.standard_subsystem(coset.constant_roots(datum))
    standard = coset.act(w)
    regularized = regularize(mu, standard)
    base = regularized.base

    restriction = datum.parabolic_restriction(subset)
    # the torsion is only known mod Y; projecting moves it by an element of K_P, on which R_P is trivial
    sub_point = TorusPoint(tuple(restriction.coordinates_in_y_p(restriction.project_to_p(base.torsion))),
                           tuple(restriction.coordinates_in_y_p(base.gamma)))
    m_p = mu.parameters.restrict(restriction.sub, restriction.root_map)
    mu_p = build_mu(restriction.sub, m_p, mu.d)
    point_part = regularize(mu_p, Coset.point(sub_point))

    in_p = set(restriction.root_map)
    w_p = weyl.longest_in(subset)
    exponent = mu.prefactor + 2 * weyl.m_w(mu.parameters, w_p)
    n = datum.rank
    outer = FactoredFunction.monomial(exponent, (0,) * n)
    for entry in mu.ledger:
        if entry.root not in in_p:
            outer = outer * mu.factor(entry)
    matrix = transpose([list(y) for y in standard.subtorus]) if standard.subtorus else [[] for _ in range(n)]
    coset_part = outer.pullback(matrix, base.torsion, base.gamma, width=standard.dim)

    assembled = point_part.restricted.with_dim(standard.dim) * coset_part
    if not assembled == regularized.restricted:
        raise AccountingError(f"splitting mismatch on {coset.render()}: {assembled.render()} vs "
                              f"{regularized.restricted.render()}")
    logger.debug(f"Split mu along {standard.render()} over P = {[j + 1 for j in subset]}")
    return SplitMu(standard, w, subset, point_part, coset_part, regularized)


def pullback_mu(mu: MuFunction, matrix: Sequence[Sequence[int]], base: TorusPoint, width: int) -> FactoredFunction:
    """mu composed with t -> base * matrix(t), matrix acting on cocharacters"""
    return mu.as_function().pullback(matrix, base.torsion, base.gamma, width=width)


def is_weyl_invariant(mu: MuFunction) -> bool:
    """mu(s t) = mu(t) for every simple reflection s"""
    f = mu.as_function()
    n = mu.rank
    weyl = mu.datum.weyl()
    for j in mu.datum.simple_indices:
        s = weyl.from_word([j])
        image = f.pullback(s.y_matrix.tolist(), (0,) * n, (0,) * n, width=n)
        if not image == f:
            logger.warning(f"mu is not invariant under s{j + 1}")
            return False
    return True


def density_sign(mu: MuFunction, coset: Coset, v0: float = 2.0, count: int = 64,
                 limits: Optional[Limits] = None) -> Tuple[int, float, float]:
    """
    Sign of mu^(L) on L^temp at v0 and the invariance defect of |mu^(L)| under N_W0(L)

    Returns:
        (sign, imaginary defect, invariance defect); sign is that of the first
        sample and the defects are relative sup-norms over all samples
    """
    limits = current_limits(limits)
    datum = mu.datum
    regularized = regularize(mu, coset)
    form = TemperedForm.of(coset, datum, v0)
    rho, theta = form.sample(count, limits.sample_seed)
    values = _evaluate(regularized.on_torus, v0, rho, theta)
    scale = np.maximum(np.abs(values), 1e-300)
    imaginary = float(np.max(np.abs(values.imag) / scale))
    signs = np.sign(values.real)
    sign = int(signs[0]) if len(signs) else 1
    if np.any(signs != sign):
        logger.warning(f"mu^(L) changes sign on the tempered form of {coset.render()}")
        sign = 0

    invariance = 0.0
    for w in k_groups(coset, datum).normalizer:
        n_w = np.asarray(w.y_matrix, dtype=float)
        moved = _evaluate(regularized.on_torus, v0, rho @ n_w.T, theta @ n_w.T)
        invariance = max(invariance, float(np.max(np.abs(np.abs(moved) - np.abs(values)) / scale)))
    return sign, imaginary, invariance


def _evaluate(f: FactoredFunction, v0: float, rho: np.ndarray, theta: np.ndarray) -> np.ndarray:
    z = np.exp(rho + 2j * np.pi * theta)
    return f.evaluate(v0, z)
