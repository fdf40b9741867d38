"""Elevation height fields: bilinear interpolation, gradients, scenario generation.

A grid stores node heights on a regular lattice; queries anywhere inside the
lattice hull interpolate bilinearly. Scenario generation produces a seeded
height field (a sum of smooth Gaussian bumps rescaled to the scenario's
relief band) plus a set of non-overlapping cover objects.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpecError, OutOfBoundsError
from .objects import CoverClass, CoverObject

# Half-width of the square start zone kept free of objects, centered on the grid.
START_ZONE_HALF_WIDTH = 1.5

_NODE_SNAP = 1e-12  # fractional offsets below this collapse onto the node


@dataclass(frozen=True, eq=False)
class ElevationGrid:
    """Uniform height field. Node (col, row) sits at origin + (col, row) * cell_size."""

    width_cells: int
    height_cells: int
    cell_size: float
    origin: tuple[float, float]
    heights: np.ndarray  # row-major, length width_cells * height_cells

    def __post_init__(self) -> None:
        if not self.cell_size > 0:
            raise ValueError("cell_size must be positive")
        if self.width_cells < 2 or self.height_cells < 2:
            raise ValueError("grid needs at least 2 nodes per side")
        heights = np.asarray(self.heights, dtype=float)
        if heights.shape != (self.width_cells * self.height_cells,):
            raise ValueError("heights must be row-major with width*height entries")
        if not np.all(np.isfinite(heights)):
            raise ValueError("all heights must be finite")
        object.__setattr__(self, "heights", heights)

    @property
    def height_map(self) -> np.ndarray:
        """Heights as a (height_cells, width_cells) array; [row, col] indexes (y, x)."""
        return self.heights.reshape(self.height_cells, self.width_cells)

    @property
    def x_max(self) -> float:
        return self.origin[0] + (self.width_cells - 1) * self.cell_size

    @property
    def y_max(self) -> float:
        return self.origin[1] + (self.height_cells - 1) * self.cell_size

    def contains(self, x: float, y: float) -> bool:
        return (
            self.origin[0] <= x <= self.x_max and self.origin[1] <= y <= self.y_max
        )


def _fractional_nodes(grid: ElevationGrid, x, y):
    gx = (np.asarray(x, dtype=float) - grid.origin[0]) / grid.cell_size
    gy = (np.asarray(y, dtype=float) - grid.origin[1]) / grid.cell_size
    return gx, gy


def elevation_at(grid: ElevationGrid, x, y):
    """Bilinearly interpolated elevation at (x, y); exact at lattice nodes.

    Accepts scalars or equal-shaped arrays. Raises OutOfBoundsError when any
    query point lies outside the lattice hull.
    """
    gx, gy = _fractional_nodes(grid, x, y)
    if (
        np.any(gx < 0)
        or np.any(gx > grid.width_cells - 1)
        or np.any(gy < 0)
        or np.any(gy > grid.height_cells - 1)
    ):
        raise OutOfBoundsError(f"query ({x}, {y}) outside grid extent")
    i0 = np.clip(np.floor(gx).astype(int), 0, grid.width_cells - 2)
    j0 = np.clip(np.floor(gy).astype(int), 0, grid.height_cells - 2)
    tx = gx - i0
    ty = gy - j0
    # Snap to nodes so cell-center queries reproduce stored heights bit-exactly.
    tx = np.where(np.abs(tx) < _NODE_SNAP, 0.0, np.where(np.abs(tx - 1.0) < _NODE_SNAP, 1.0, tx))
    ty = np.where(np.abs(ty) < _NODE_SNAP, 0.0, np.where(np.abs(ty - 1.0) < _NODE_SNAP, 1.0, ty))
    h = grid.height_map
    z00 = h[j0, i0]
    z10 = h[j0, i0 + 1]
    z01 = h[j0 + 1, i0]
    z11 = h[j0 + 1, i0 + 1]
    z = (1 - tx) * (1 - ty) * z00 + tx * (1 - ty) * z10 + (1 - tx) * ty * z01 + tx * ty * z11
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(z)
    return z


def gradient_at(grid: ElevationGrid, x: float, y: float) -> tuple[float, float]:
    """Terrain slope (dz/dx, dz/dy) by central differences over one cell size.

    Requires (x, y) to be at least one cell from the boundary so both stencil
    points stay inside the grid.
    """
    step = grid.cell_size
    if not (
        grid.contains(x - step, y - step) and grid.contains(x + step, y + step)
    ):
        raise OutOfBoundsError(f"gradient stencil at ({x}, {y}) leaves the grid")
    dz_dx = (elevation_at(grid, x + step, y) - elevation_at(grid, x - step, y)) / (2 * step)
    dz_dy = (elevation_at(grid, x, y + step) - elevation_at(grid, x, y - step)) / (2 * step)
    return dz_dx, dz_dy


def delta_h(grid: ElevationGrid, cur: tuple[float, float], prev: tuple[float, float]) -> float:
    """Elevation change between two positions: elevation(cur) - elevation(prev)."""
    return elevation_at(grid, cur[0], cur[1]) - elevation_at(grid, prev[0], prev[1])


class ScenarioKind(enum.Enum):
    NORMAL_ELEVATION = "normal_elevation"
    LOW_ELEVATION = "low_elevation"
    LOW_HIGH_ELEVATION = "low_high_elevation"
    FOREST_JUNGLE = "forest_jungle"


# Relief (max height minus min height) is drawn uniformly from these bands,
# chosen strictly inside each scenario's contract so the rescaled field always
# satisfies it: normal < 0.3 m, low <= 1 m, low-high within [1, 3] m,
# forest/jungle >= 4 m.
_RELIEF_BANDS: dict[ScenarioKind, tuple[float, float]] = {
    ScenarioKind.NORMAL_ELEVATION: (0.10, 0.25),
    ScenarioKind.LOW_ELEVATION: (0.50, 0.95),
    ScenarioKind.LOW_HIGH_ELEVATION: (1.20, 2.80),
    ScenarioKind.FOREST_JUNGLE: (4.00, 6.00),
}

_CLASS_MIX: dict[ScenarioKind, list[tuple[CoverClass, float]]] = {
    kind: [
        (CoverClass.BUSH, 0.30),
        (CoverClass.TREE, 0.25),
        (CoverClass.ROCK, 0.20),
        (CoverClass.HOUSE, 0.10),
        (CoverClass.COTTAGE, 0.05),
        (CoverClass.BUILDING, 0.05),
        (CoverClass.DISABLED_VEHICLE, 0.05),
    ]
    for kind in (
        ScenarioKind.NORMAL_ELEVATION,
        ScenarioKind.LOW_ELEVATION,
        ScenarioKind.LOW_HIGH_ELEVATION,
    )
}
_CLASS_MIX[ScenarioKind.FOREST_JUNGLE] = [
    (CoverClass.TREE, 0.50),
    (CoverClass.BUSH, 0.35),
    (CoverClass.ROCK, 0.15),
]

# (footprint radius range, height range) per class, meters.
_CLASS_GEOMETRY: dict[CoverClass, tuple[tuple[float, float], tuple[float, float]]] = {
    CoverClass.TREE: ((0.3, 0.7), (4.0, 8.0)),
    CoverClass.BUSH: ((0.3, 0.6), (0.8, 1.6)),
    CoverClass.ROCK: ((0.3, 0.9), (0.5, 2.0)),
    CoverClass.COTTAGE: ((1.5, 2.5), (2.5, 4.0)),
    CoverClass.BUILDING: ((2.0, 3.0), (4.0, 8.0)),
    CoverClass.HOUSE: ((1.5, 2.5), (3.0, 5.0)),
    CoverClass.DISABLED_VEHICLE: ((0.8, 1.3), (1.2, 2.0)),
    CoverClass.OTHER: ((0.3, 0.8), (1.0, 2.0)),
}


@dataclass(frozen=True)
class ScenarioSpec:
    """Parameters that deterministically define one generated scenario."""

    kind: ScenarioKind
    seed: int
    extent_m: float = 40.0
    object_density: float = 0.5  # objects per 100 m^2
    cell_size: float = 0.5

    def __post_init__(self) -> None:
        if not isinstance(self.kind, ScenarioKind):
            raise InvalidSpecError(f"unknown scenario kind: {self.kind!r}")
        if not 0 <= self.seed < 2**64:
            raise InvalidSpecError("seed must fit in an unsigned 64-bit integer")
        if self.extent_m < 30.0:
            raise InvalidSpecError("extent must be at least 30 m to hold the goal radius")
        if self.object_density < 0:
            raise InvalidSpecError("object_density must be non-negative")
        if not self.cell_size > 0:
            raise InvalidSpecError("cell_size must be positive")


def default_start_zone(extent_m: float) -> tuple[float, float, float, float]:
    """Axis-aligned (x_min, y_min, x_max, y_max) start zone at the grid center."""
    c = extent_m / 2.0
    return (
        c - START_ZONE_HALF_WIDTH,
        c - START_ZONE_HALF_WIDTH,
        c + START_ZONE_HALF_WIDTH,
        c + START_ZONE_HALF_WIDTH,
    )


def _bump_field(rng: np.random.Generator, extent: float, nodes: int) -> np.ndarray:
    coords = np.linspace(0.0, extent, nodes)
    xs, ys = np.meshgrid(coords, coords)  # ys varies along rows
    n_bumps = max(6, int((extent / 8.0) ** 2))
    centers = rng.uniform(0.0, extent, size=(n_bumps, 2))
    sigmas = rng.uniform(extent / 12.0, extent / 4.0, size=n_bumps)
    amps = rng.uniform(-1.0, 1.0, size=n_bumps)
    field = np.zeros_like(xs)
    for (cx, cy), sigma, amp in zip(centers, sigmas, amps):
        field += amp * np.exp(-((xs - cx) ** 2 + (ys - cy) ** 2) / (2.0 * sigma**2))
    return field


def _rect_clearance(x: float, y: float, rect: tuple[float, float, float, float]) -> float:
    """Distance from a point to an axis-aligned rectangle (0 inside)."""
    dx = max(rect[0] - x, 0.0, x - rect[2])
    dy = max(rect[1] - y, 0.0, y - rect[3])
    return float(np.hypot(dx, dy))


def generate_scenario(spec: ScenarioSpec) -> tuple[ElevationGrid, tuple[CoverObject, ...]]:
    """Generate the height field and cover objects for a scenario.

    Deterministic under the spec's seed. Object placement rejects overlaps
    with other objects, the central start zone, and the grid margin; the
    density is therefore a target, not a guarantee, on crowded settings.
    """
    terrain_seq, object_seq = np.random.SeedSequence(spec.seed).spawn(2)
    terrain_rng = np.random.default_rng(terrain_seq)
    object_rng = np.random.default_rng(object_seq)

    nodes = int(round(spec.extent_m / spec.cell_size)) + 1
    raw = _bump_field(terrain_rng, spec.extent_m, nodes)
    span = float(raw.max() - raw.min())
    lo, hi = _RELIEF_BANDS[spec.kind]
    relief = terrain_rng.uniform(lo, hi)
    if span < 1e-12:
        heights = np.zeros_like(raw)
    else:
        heights = (raw - raw.min()) / span * relief
    grid = ElevationGrid(
        width_cells=nodes,
        height_cells=nodes,
        cell_size=spec.cell_size,
        origin=(0.0, 0.0),
        heights=heights.reshape(-1),
    )

    density = spec.object_density
    if spec.kind is ScenarioKind.FOREST_JUNGLE:
        density = max(density * 4.0, 2.0)
    count = int(round(density * spec.extent_m**2 / 100.0))

    start_zone = default_start_zone(spec.extent_m)
    mix = _CLASS_MIX[spec.kind]
    classes = [cls for cls, _ in mix]
    probs = np.array([w for _, w in mix])
    probs = probs / probs.sum()

    objects: list[CoverObject] = []
    for k in range(count):
        cls = classes[int(object_rng.choice(len(classes), p=probs))]
        (r_lo, r_hi), (h_lo, h_hi) = _CLASS_GEOMETRY[cls]
        radius = float(object_rng.uniform(r_lo, r_hi))
        height = float(object_rng.uniform(h_lo, h_hi))
        for _ in range(200):
            margin = radius + 1.0 + spec.cell_size
            x = float(object_rng.uniform(margin, spec.extent_m - margin))
            y = float(object_rng.uniform(margin, spec.extent_m - margin))
            if _rect_clearance(x, y, start_zone) < radius + 2.0:
                continue
            if any(
                np.hypot(x - o.position[0], y - o.position[1])
                < radius + o.footprint_radius + 0.2
                for o in objects
            ):
                continue
            z = elevation_at(grid, x, y)
            objects.append(
                CoverObject(
                    object_id=k + 1,
                    class_name=cls,
                    position=(x, y, z),
                    footprint_radius=radius,
                    obj_height=height,
                )
            )
            break
    return grid, tuple(objects)
