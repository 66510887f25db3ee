"""Catalog entries: a divisorial polytope plus the invariants recorded for it."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..geometry.divisorial import DivisorialPolytope


@dataclass(frozen=True)
class Expected:
    degree: Fraction | None = None
    singularity: str | None = None
    rho: int | None = None
    kstable: bool | None = None
    xi_reference: tuple | None = None
    toric: bool | None = None


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    dp: DivisorialPolytope
    expected: Expected = Expected()
    meta: tuple = ()  # sorted (key, value) string pairs

    @property
    def meta_dict(self) -> dict:
        return dict(self.meta)

    @property
    def is_threefold(self) -> bool:
        return self.dp.dim == 2
