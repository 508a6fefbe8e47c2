"""
Residual Enumeration
Residual points from pole conditions on independent roots, and residual cosets by parabolic induction
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Dict, List, Optional, Tuple

from loguru import logger

from core.config import Limits, current_limits
from core.errors import AccountingError, BoundExceeded
from core.parallel import ordered_map
from exactscalars.normalizing import NormalizingElement
from mu.function import MuFunction, PoleZeroReport, RegularizedMu, build_mu, pole_zero_sets, regularize
from rootdata.datum import BasedRootDatum
from rootdata.lattice import rank, solve, solve_congruence
from rootdata.parameters import ParameterFunction
from rootdata.weyl import WeylGroup
from torus.coset import Coset, CosetKey, embed_parabolic_point
from torus.point import TorusPoint

HALF = Fraction(1, 2)


@dataclass
class PointOrbit:
    """A W0-orbit of residual points with its least member as representative"""
    representative: TorusPoint
    points: List[TorusPoint] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.points)

    def to_dict(self) -> Dict:
        return {"representative": self.representative.render(), "size": self.size}


def _check_rank(datum: BasedRootDatum, limits: Limits) -> None:
    if datum.rank > limits.rank_bound:
        raise BoundExceeded(f"rank {datum.rank} exceeds the enumeration bound {limits.rank_bound}")


def _candidates(datum: BasedRootDatum, m: ParameterFunction, first: int) -> List[TorusPoint]:
    """Solutions of beta_i(r) = eps_i v^(-2 m_eps_i(beta_i)) for systems starting with root first"""
    n = datum.rank
    found = set()
    for rest in combinations(range(first + 1, len(datum.roots)), n - 1):
        chosen = (first,) + rest
        rows = [list(datum.roots[i]) for i in chosen]
        if rank(rows) < n:
            continue
        for signs in product((0, 1), repeat=n):
            exponents = [-(m.two_m_minus[i] if s else m.two_m_plus[i]) for i, s in zip(chosen, signs)]
            phases = [HALF if s else Fraction(0) for s in signs]
            gamma = solve(rows, exponents)
            for torsion in solve_congruence(rows, phases):
                found.add(TorusPoint(torsion, tuple(gamma)))
    return sorted(found)


def orbit_of(point: TorusPoint, weyl: WeylGroup) -> List[TorusPoint]:
    return sorted({point.act(w.y_matrix) for w in weyl})


def enumerate_residual_points(datum: BasedRootDatum, m: ParameterFunction,
                              limits: Optional[Limits] = None) -> List[PointOrbit]:
    """
    W0-orbits of residual points of (datum, m)

    Raises:
        BoundExceeded: rank or Weyl group beyond the configured limits
    """
    limits = current_limits(limits)
    _check_rank(datum, limits)
    n = datum.rank
    if n == 0:
        point = TorusPoint.identity(0)
        return [PointOrbit(point, [point])]

    mu = build_mu(datum, m)
    weyl = datum.weyl()
    batches = ordered_map(lambda first: _candidates(datum, m, first), range(len(datum.roots)),
                          workers=limits.parallel_workers)
    candidates = sorted({p for batch in batches for p in batch})

    residual = [p for p in candidates if pole_zero_sets(mu, Coset.point(p)).residual]
    orbits: List[PointOrbit] = []
    seen = set()
    for p in residual:
        if p in seen:
            continue
        members = orbit_of(p, weyl)
        seen.update(members)
        orbits.append(PointOrbit(members[0], members))
        if not all(members[0].evaluate(r)[1].denominator == 1 for r in datum.roots):
            logger.warning(f"residual point {members[0].render()} has non-integral root exponents")
    orbits.sort(key=lambda o: o.representative.key)
    logger.info(f"Residual points of {datum.name} ({m.render()}): {len(candidates)} candidates, "
                f"{len(orbits)} orbits")
    return orbits


@dataclass
class CatalogEntry:
    """One W0-orbit of residual cosets"""
    coset: Coset
    orbit_key: CosetKey
    orbit_size: int
    report: PoleZeroReport
    density: RegularizedMu

    @property
    def subset(self) -> Tuple[int, ...]:
        return self.coset.parabolic

    def to_dict(self, datum: BasedRootDatum) -> Dict:
        return {
            "coset": self.coset.to_dict(),
            "orbit_size": self.orbit_size,
            "poles_zeros": self.report.to_dict(datum),
            "density": self.density.render(),
        }


@dataclass
class ResidualCatalog:
    """W0-orbit representatives of residual cosets grouped by parabolic class"""
    datum: BasedRootDatum
    parameters: ParameterFunction
    mu: MuFunction
    entries: List[CatalogEntry] = field(default_factory=list)

    def by_subset(self) -> Dict[Tuple[int, ...], List[CatalogEntry]]:
        groups: Dict[Tuple[int, ...], List[CatalogEntry]] = {}
        for entry in self.entries:
            groups.setdefault(entry.subset, []).append(entry)
        return groups

    def points(self) -> List[CatalogEntry]:
        return [e for e in self.entries if e.coset.dim == 0]

    def find(self, coset: Coset) -> Optional[CatalogEntry]:
        """The entry whose orbit contains the coset"""
        key = coset.orbit_key(self.datum.weyl())
        return next((e for e in self.entries if e.orbit_key == key), None)

    def render(self) -> str:
        lines = [f"residual cosets of {self.datum.name} with {self.parameters.render()}: {len(self.entries)} orbits"]
        for subset, entries in self.by_subset().items():
            lines.append(f"P = [{','.join(str(j + 1) for j in subset)}]")
            for e in entries:
                lines.append(f"  dim {e.coset.dim}, orbit size {e.orbit_size}: {e.coset.base.render()}")
                lines.append(f"    mu^(L) = {e.density.render()}")
        return "\n".join(lines)

    def to_dict(self) -> Dict:
        return {
            "datum": self.datum.name,
            "parameters": self.parameters.to_dict(),
            "orbits": [e.to_dict(self.datum) for e in self.entries],
        }


def _subsets(n: int) -> List[Tuple[int, ...]]:
    return [s for k in range(n + 1) for s in combinations(range(n), k)]


def enumerate_residual_cosets(datum: BasedRootDatum, m: ParameterFunction,
                              d: Optional[NormalizingElement] = None,
                              limits: Optional[Limits] = None) -> ResidualCatalog:
    """
    All W0-orbits of residual cosets L = r T^P, r a residual point of (R_P, m_P)

    Orbits are keyed by their least coset key; each orbit is represented by
    the first standard parabolic subset producing it and the least base point.
    """
    limits = current_limits(limits)
    _check_rank(datum, limits)
    mu = build_mu(datum, m, d)
    weyl = datum.weyl()
    found: Dict[CosetKey, Tuple[Tuple[int, Tuple], Coset]] = {}
    order: List[CosetKey] = []
    for position, subset in enumerate(_subsets(datum.rank)):
        restriction = datum.parabolic_restriction(subset)
        m_p = m.restrict(restriction.sub, restriction.root_map)
        for orbit in enumerate_residual_points(restriction.sub, m_p, limits):
            for point in orbit.points:
                coset = embed_parabolic_point(restriction, point, datum.rank)
                key = coset.orbit_key(weyl)
                rank_key = (position, coset.base.key)
                if key not in found:
                    order.append(key)
                    found[key] = (rank_key, coset)
                elif rank_key < found[key][0]:
                    found[key] = (rank_key, coset)

    catalog = ResidualCatalog(datum, m, mu)
    for key in order:
        coset = found[key][1]
        report = pole_zero_sets(mu, coset)
        if report.lhs != report.codim:
            raise AccountingError(f"induced coset {coset.render()} has {report.lhs} poles, codim {report.codim}")
        size = len({coset.transformed_key(w) for w in weyl})
        catalog.entries.append(CatalogEntry(coset, key, size, report, regularize(mu, coset)))
    positions = {s: i for i, s in enumerate(_subsets(datum.rank))}
    catalog.entries.sort(key=lambda e: (-e.coset.dim, positions[e.subset], e.coset.base.key))
    logger.info(f"Residual catalog of {datum.name}: {len(catalog.entries)} orbits")
    return catalog
