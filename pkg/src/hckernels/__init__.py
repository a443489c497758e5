"""Spherical functions, Harish-Chandra c-functions and spectral multiplier
kernels on noncompact symmetric spaces of rank one and two."""

from .root_system import (
    ChamberPoint,
    RootDatum,
    RootSystemError,
    build_root_datum,
    from_name,
    pairing,
)

__version__ = "0.1.0"
