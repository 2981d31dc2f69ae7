"""Proper holomorphic maps between Fock-Bargmann-Hartogs domains D_{n,1}(mu)."""

from .domain import DomainParams, DomainPoint, Region
from .errors import FBHError
from .fbhaut import FbhAut
from .mapsys import MapDescriptor
from .normalizer import normalize_ballfit, normalize_nonequidim, normalize_self, verify_proper

__all__ = [
    "DomainParams",
    "DomainPoint",
    "Region",
    "FBHError",
    "FbhAut",
    "MapDescriptor",
    "normalize_ballfit",
    "normalize_nonequidim",
    "normalize_self",
    "verify_proper",
]

__version__ = "0.1.0"
