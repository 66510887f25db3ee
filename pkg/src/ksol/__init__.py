"""Certified K-stability checks for Fano T-varieties of complexity one."""

__version__ = "0.1.0"

from .catalog import CatalogEntry, get, load_builtin
from .classify import CoxPresentation, cox_ring, match_catalog
from .geometry import DivisorialPolytope, degree, validate
from .stability import CertifyConfig, Status, StabilityVerdict, certify

__all__ = [
    "CatalogEntry",
    "CertifyConfig",
    "CoxPresentation",
    "DivisorialPolytope",
    "StabilityVerdict",
    "Status",
    "certify",
    "cox_ring",
    "degree",
    "get",
    "load_builtin",
    "match_catalog",
    "validate",
]
