"""Exact finite-horizon shadowing and weak-shadowing verification for IFS on the circle and the interval."""

from __future__ import annotations

from .ifs import IFSystem, MapSpec, OrbitSegment, PseudoOrbit, SymbolWord, orbit, pseudo_orbit, validate_pseudo_orbit
from .shadowing import (
    Verdict,
    VerificationOutcome,
    check_shadowing,
    check_weak_shadowing,
    distinct_perturbation,
    rotation_dp_shadowing,
    truncation_cover,
)
from .space import ArcSet, Point, SpaceDescriptor

__version__ = "0.1.0"

__all__ = [
    "ArcSet",
    "IFSystem",
    "MapSpec",
    "OrbitSegment",
    "Point",
    "PseudoOrbit",
    "SpaceDescriptor",
    "SymbolWord",
    "Verdict",
    "VerificationOutcome",
    "check_shadowing",
    "check_weak_shadowing",
    "distinct_perturbation",
    "orbit",
    "pseudo_orbit",
    "rotation_dp_shadowing",
    "truncation_cover",
    "validate_pseudo_orbit",
]
