"""Spherical buildings, projectivities, apartment complexes, metric trees and cones."""

from .building import (
    Apartment,
    Building,
    BuildingError,
    SimplexRef,
    building_from_incidence,
    building_from_json,
    check_morphism,
    coxeter_complex,
    join,
    rank_one_building,
    thickness_report,
)
from .coxeter import (
    CoxeterError,
    CoxeterSystem,
    enumerate_elements,
    is_spherical,
    new_coxeter_system,
    opposition_involution,
    spherical_chart,
)

__version__ = "0.1.0"

__all__ = [
    "Apartment",
    "Building",
    "BuildingError",
    "CoxeterError",
    "CoxeterSystem",
    "SimplexRef",
    "building_from_incidence",
    "building_from_json",
    "check_morphism",
    "coxeter_complex",
    "enumerate_elements",
    "is_spherical",
    "join",
    "new_coxeter_system",
    "opposition_involution",
    "rank_one_building",
    "spherical_chart",
    "thickness_report",
]
