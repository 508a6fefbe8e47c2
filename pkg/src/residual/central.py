"""
Tempered Central Characters
One component of the image S per W0-orbit of residual cosets
"""
from dataclasses import dataclass
from typing import Dict, List, Optional

from loguru import logger

from core.config import Limits, current_limits
from residual.enumerate import CatalogEntry, ResidualCatalog
from torus.coset import KGroups, k_groups
from torus.tempered import disjointness_report


@dataclass
class CentralCharacterComponent:
    """N_W0(L) \\ L^temp for one residual orbit, with the density mu^(L)"""
    entry: CatalogEntry
    groups: KGroups

    @property
    def dim(self) -> int:
        return self.entry.coset.dim

    def render(self) -> str:
        g = self.groups
        return (f"dim {self.dim}: {self.entry.coset.render()} |N| = {len(g.normalizer)} |Z| = {len(g.centralizer)} "
                f"|K_L^n| = {len(g.k_l_n)} density {self.entry.density.render()}")

    def to_dict(self) -> Dict:
        return {
            "coset": self.entry.coset.to_dict(),
            "groups": self.groups.to_dict(),
            "density": self.entry.density.render(),
        }


def central_character_image(catalog: ResidualCatalog) -> List[CentralCharacterComponent]:
    datum = catalog.datum
    weyl = datum.weyl()
    components = [CentralCharacterComponent(entry, k_groups(entry.coset, datum, weyl)) for entry in catalog.entries]
    logger.info(f"Central character image of {datum.name}: {len(components)} components")
    return components


def check_disjointness(catalog: ResidualCatalog, v0: float = 2.0, limits: Optional[Limits] = None) -> bool:
    """Sampled tempered forms of distinct orbits stay apart at v0"""
    limits = current_limits(limits)
    report = disjointness_report([e.coset for e in catalog.entries], catalog.datum, v0, limits)
    return all(separated for _, _, _, separated in report)
