"""Square-grid tessellation and the spatial joins that hang off it.

The landscape is cut into fixed-size square cells laid out row-major from the
region's lower-left corner. A cell belongs to the region iff its center does
(closed test), so partial cells along the top/right edges survive exactly when
their centers still fall inside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .landscape.types import Compartment, GridCell, Region, Village

#: Side length of one grid cell in meters (7.0225 ha per full cell).
DEFAULT_CELL_SIZE_M = 265.0

#: Sample lattice resolution for the cell-to-compartment overlap estimate.
JOIN_LATTICE_N = 8

#: Radius for the "villages nearby" count, in km.
NEARBY_VILLAGE_RADIUS_KM = 1.0


@dataclass(frozen=True)
class GridSpec:
    """Tessellation parameters. Cells anchor at the region's min corner."""

    cell_size_m: float = DEFAULT_CELL_SIZE_M

    def __post_init__(self) -> None:
        if not (self.cell_size_m > 0):
            raise ValueError(f"cell size {self.cell_size_m} must be positive")


def grid_shape(region: Region, spec: GridSpec) -> tuple[int, int]:
    """(n_cols, n_rows): how many cell centers fit inside the region per axis.

    Column k's center sits at x_min + k*size + size/2 and is kept while it
    stays <= x_max. Counted with the same closed comparison and the same
    floating-point expression the origin path uses, so the two can never
    disagree at a boundary.
    """
    size = spec.cell_size_m
    half = size / 2.0

    def center(k: int, lo: float) -> float:
        return lo + k * size + half

    n_cols = int(math.floor(region.width / size + 0.5)) + 1
    while n_cols > 0 and not (center(n_cols - 1, region.x_min) <= region.x_max):
        n_cols -= 1
    n_rows = int(math.floor(region.height / size + 0.5)) + 1
    while n_rows > 0 and not (center(n_rows - 1, region.y_min) <= region.y_max):
        n_rows -= 1
    return n_cols, n_rows


def generate_grids(region: Region, spec: GridSpec) -> list[tuple[int, tuple[float, float]]]:
    """(grid_id, origin) for every cell whose center lies in the region.

    Ids are row-major from the min corner: id = row * n_cols + col, row 0 at
    y_min. Every candidate inside the grid_shape bound is re-checked against
    the region explicitly so the inclusion rule stays auditable.
    """
    n_cols, n_rows = grid_shape(region, spec)
    size = spec.cell_size_m
    half = size / 2.0
    out = []
    for row in range(n_rows):
        for col in range(n_cols):
            ox = region.x_min + col * size
            oy = region.y_min + row * size
            if region.contains(ox + half, oy + half):
                out.append((row * n_cols + col, (ox, oy)))
    return out


def cell_center(cell: GridCell, cell_size_m: float = DEFAULT_CELL_SIZE_M) -> tuple[float, float]:
    return (cell.origin[0] + cell_size_m / 2.0, cell.origin[1] + cell_size_m / 2.0)


# ---------------------------------------------------------------------------
# Point-in-polygon and the compartment join
# ---------------------------------------------------------------------------

def point_in_polygon(x: float, y: float, polygon: Sequence[tuple[float, float]]) -> bool:
    """Ray-casting crossing test (even-odd rule), O(vertices)."""
    inside = False
    n = len(polygon)
    j = n - 1
    for i in range(n):
        xi, yi = polygon[i]
        xj, yj = polygon[j]
        if (yi > y) != (yj > y):
            x_cross = (xj - xi) * (y - yi) / (yj - yi) + xi
            if x < x_cross:
                inside = not inside
        j = i
    return inside


def lattice_points(origin: tuple[float, float], cell_size_m: float) -> list[tuple[float, float]]:
    """The 8x8 interior sample points used to estimate cell/polygon overlap."""
    step = cell_size_m / JOIN_LATTICE_N
    ox, oy = origin
    return [
        (ox + (i + 0.5) * step, oy + (j + 0.5) * step)
        for j in range(JOIN_LATTICE_N)
        for i in range(JOIN_LATTICE_N)
    ]


def assign_compartment(
    cell: GridCell,
    compartments: Sequence[Compartment],
    cell_size_m: float = DEFAULT_CELL_SIZE_M,
) -> Optional[int]:
    """Compartment holding the most of the cell's 8x8 sample lattice.

    Ties break to the lowest compartment_id; a cell none of whose sample
    points land in any polygon stays unassigned (None).
    """
    points = lattice_points(cell.origin, cell_size_m)
    best_id: Optional[int] = None
    best_count = 0
    for comp in sorted(compartments, key=lambda c: c.compartment_id):
        bx0, by0, bx1, by1 = comp.bounding_box()
        count = 0
        for px, py in points:
            if bx0 <= px <= bx1 and by0 <= py <= by1 and point_in_polygon(px, py, comp.polygon):
                count += 1
        if count > best_count:
            best_count = count
            best_id = comp.compartment_id
    return best_id


# ---------------------------------------------------------------------------
# Village proximity features
# ---------------------------------------------------------------------------

def village_features(
    center: tuple[float, float], villages: Sequence[Village]
) -> tuple[float, int]:
    """(distance to nearest village in km, count within 1 km) from a cell center.

    No villages at all -> (+inf, 0); the serializer turns the inf into 9999.
    """
    cx, cy = center
    nearest = math.inf
    nearby = 0
    for v in villages:
        vx, vy = v.location
        d_km = math.hypot(vx - cx, vy - cy) / 1000.0
        if d_km < nearest:
            nearest = d_km
        if d_km <= NEARBY_VILLAGE_RADIUS_KM:
            nearby += 1
    return nearest, nearby
