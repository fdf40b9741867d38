"""Cover object model shared by terrain generation, the world, and perception."""

from __future__ import annotations

import enum
from dataclasses import dataclass


class CoverClass(enum.Enum):
    """Semantic classes an object can carry. All but OTHER can conceal the robot."""

    TREE = "tree"
    BUSH = "bush"
    ROCK = "rock"
    COTTAGE = "cottage"
    BUILDING = "building"
    HOUSE = "house"
    DISABLED_VEHICLE = "disabled_vehicle"
    OTHER = "other"


# Classes that qualify as cover in the detection decision.
COVER_CLASSES = frozenset(
    {
        CoverClass.TREE,
        CoverClass.BUSH,
        CoverClass.ROCK,
        CoverClass.COTTAGE,
        CoverClass.BUILDING,
        CoverClass.HOUSE,
        CoverClass.DISABLED_VEHICLE,
    }
)

_ALIASES: dict[str, CoverClass] = {}
for _cls, _names in {
    CoverClass.TREE: ("tree", "trees"),
    CoverClass.BUSH: ("bush", "bushes"),
    CoverClass.ROCK: ("rock", "rocks"),
    CoverClass.COTTAGE: ("cottage", "cottages"),
    CoverClass.BUILDING: ("building", "buildings"),
    CoverClass.HOUSE: ("house", "houses"),
    CoverClass.DISABLED_VEHICLE: (
        "disabledvehicle",
        "disabledvehicles",
        "disabled vehicle",
        "disabled vehicles",
        "disabled_vehicle",
        "disabled_vehicles",
    ),
    CoverClass.OTHER: ("other",),
}.items():
    for _n in _names:
        _ALIASES[_n] = _cls


def canonical_class(name: str | CoverClass) -> CoverClass:
    """Map a free-form class name ("Rock", "bushes", ...) to its canonical class.

    Matching is case-insensitive and tolerant of singular/plural forms.
    Unknown names fall through to OTHER, which never qualifies as cover.
    """
    if isinstance(name, CoverClass):
        return name
    return _ALIASES.get(name.strip().lower(), CoverClass.OTHER)


@dataclass(frozen=True)
class CoverObject:
    """A static world object modeled as a vertical cylinder."""

    object_id: int
    class_name: CoverClass
    position: tuple[float, float, float]  # (x, y, z) meters, z at the base
    footprint_radius: float
    obj_height: float

    def __post_init__(self) -> None:
        if not self.footprint_radius > 0:
            raise ValueError("footprint_radius must be positive")
        if not self.obj_height > 0:
            raise ValueError("obj_height must be positive")
