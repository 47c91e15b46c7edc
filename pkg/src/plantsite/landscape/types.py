"""Domain types for the scored landscape: grid cells, compartments, villages.

All types are immutable after construction and validate their own invariants,
so they can be shared freely across threads. Coordinates are planar meters;
distances derived from them are reported in kilometers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Iterable, Optional


class ValidationError(ValueError):
    """Raised when a domain value violates a type invariant."""


#: Cover snapshot years consumed by the scoring rubric, ascending.
SNAPSHOT_YEARS: tuple[int, ...] = (2001, 2003, 2005, 2009, 2013, 2015, 2019)

#: Cover classes per snapshot, in serialization order.
COVER_CLASSES: tuple[str, ...] = ("of", "mdf", "vdf", "nf", "scrub", "water")

#: Tolerance for the per-snapshot cover-percentage sum.
COVER_SUM_TOLERANCE = 0.01

#: Recognized land-use flags, in canonical order.
LANDUSE_FLAGS: tuple[str, ...] = (
    "grassland",
    "alpine_pasture",
    "trans_himalayan",
    "snow",
    "agriculture",
    "road",
)

#: Sentinel written to files when a cell has no village anywhere near it.
VILLAGE_DIST_SENTINEL_KM = 9999.0

#: The 31 compartment predictors, in model feature order.
FEATURE_NAMES: tuple[str, ...] = (
    "households",
    "population",
    "farmers",
    "sc_population",
    "literates",
    "marginal_workers",
    "nightlights",
    "road_density",
    "small_holdings",
    "grazing_density",
    "area_ha",
    "crop_area_ha",
    "grass_area_ha",
    "bare_area_ha",
    "soil_depth_cm",
    "awc_code",
    "topsoil_c",
    "subsoil_c",
    "topsoil_oc",
    "subsoil_oc",
    "ph_topsoil",
    "bulk_density",
    "cec_topsoil",
    "cec_subsoil",
    "elevation_m",
    "slope_deg",
    "fc_2003_ha",
    "fire_count",
    "temperature_c",
    "precipitation_mm",
    "lst_k",
)


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ValidationError(message)


@dataclass(frozen=True)
class Region:
    """Axis-aligned rectangular extent in planar meters."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self) -> None:
        _require(
            math.isfinite(self.x_min) and math.isfinite(self.x_max)
            and math.isfinite(self.y_min) and math.isfinite(self.y_max),
            "region coordinates must be finite",
        )
        _require(self.x_max > self.x_min, f"region x_max {self.x_max} must exceed x_min {self.x_min}")
        _require(self.y_max > self.y_min, f"region y_max {self.y_max} must exceed y_min {self.y_min}")

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    def contains(self, x: float, y: float) -> bool:
        """Closed-rectangle containment test."""
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max


@dataclass(frozen=True)
class CoverSnapshot:
    """Cover-class percentages for one cell in one year; the six classes sum to 100."""

    year: int
    of_pct: float
    mdf_pct: float
    vdf_pct: float
    nf_pct: float
    scrub_pct: float
    water_pct: float

    def __post_init__(self) -> None:
        _require(self.year in SNAPSHOT_YEARS, f"unexpected snapshot year {self.year}")
        total = 0.0
        for name in COVER_CLASSES:
            value = getattr(self, f"{name}_pct")
            _require(
                0.0 <= value <= 100.0,
                f"cover {name}_pct={value} out of [0,100] for year {self.year}",
            )
            total += value
        _require(
            abs(total - 100.0) <= COVER_SUM_TOLERANCE,
            f"cover percentages for year {self.year} sum to {total}, expected 100 +/- {COVER_SUM_TOLERANCE}",
        )

    def fraction(self, cover_class: str) -> float:
        """Percentage for one of the six cover classes."""
        if cover_class not in COVER_CLASSES:
            raise ValidationError(f"unknown cover class {cover_class!r}")
        return getattr(self, f"{cover_class}_pct")


@dataclass(frozen=True)
class Terrain:
    elevation_m: float
    slope_deg: float
    aspect_deg: float

    def __post_init__(self) -> None:
        _require(math.isfinite(self.elevation_m), "elevation must be finite")
        _require(0.0 <= self.slope_deg <= 90.0, f"slope {self.slope_deg} out of [0,90]")
        _require(0.0 <= self.aspect_deg < 360.0, f"aspect {self.aspect_deg} out of [0,360)")


@dataclass(frozen=True)
class Soil:
    """Soil depth in cm; carbon contents in dimensionless rubric units."""

    depth_cm: float
    org_c: float
    inorg_c: float

    def __post_init__(self) -> None:
        _require(self.depth_cm >= 0.0, f"soil depth {self.depth_cm} must be >= 0")
        _require(self.org_c >= 0.0, f"organic carbon {self.org_c} must be >= 0")
        _require(self.inorg_c >= 0.0, f"inorganic carbon {self.inorg_c} must be >= 0")


@dataclass(frozen=True)
class GridCell:
    """One square tile of the tessellated landscape with its scoring inputs.

    `covers` holds exactly one snapshot per year in SNAPSHOT_YEARS, ascending.
    `village_dist_km` may be +inf when no village exists; it serializes as 9999.
    `compartment_id` is a derived spatial join result, not a stored input.
    """

    grid_id: int
    origin: tuple[float, float]
    covers: tuple[CoverSnapshot, ...]
    terrain: Terrain
    soil: Soil
    village_dist_km: float
    villages_within_1km: int
    landuse_flags: frozenset[str]
    compartment_id: Optional[int] = None

    def __post_init__(self) -> None:
        years = tuple(c.year for c in self.covers)
        _require(
            years == SNAPSHOT_YEARS,
            f"cell {self.grid_id}: snapshot years {years} must be exactly {SNAPSHOT_YEARS}",
        )
        _require(
            self.village_dist_km >= 0.0,
            f"cell {self.grid_id}: village distance {self.village_dist_km} must be >= 0",
        )
        _require(
            self.villages_within_1km >= 0,
            f"cell {self.grid_id}: village count {self.villages_within_1km} must be >= 0",
        )
        unknown = set(self.landuse_flags) - set(LANDUSE_FLAGS)
        _require(not unknown, f"cell {self.grid_id}: unknown land-use flags {sorted(unknown)}")

    def cover(self, year: int) -> CoverSnapshot:
        """Snapshot for one of the seven rubric years."""
        for snap in self.covers:
            if snap.year == year:
                return snap
        raise ValidationError(f"cell {self.grid_id} has no snapshot for year {year}")


@dataclass(frozen=True)
class Village:
    village_id: int
    location: tuple[float, float]

    def __post_init__(self) -> None:
        x, y = self.location
        _require(math.isfinite(x) and math.isfinite(y), f"village {self.village_id}: non-finite location")


@dataclass(frozen=True)
class CompartmentFeatures:
    """The 31 compartment-level predictors, one field per feature name."""

    households: float
    population: float
    farmers: float
    sc_population: float
    literates: float
    marginal_workers: float
    nightlights: float
    road_density: float
    small_holdings: float
    grazing_density: float
    area_ha: float
    crop_area_ha: float
    grass_area_ha: float
    bare_area_ha: float
    soil_depth_cm: float
    awc_code: int
    topsoil_c: float
    subsoil_c: float
    topsoil_oc: float
    subsoil_oc: float
    ph_topsoil: float
    bulk_density: float
    cec_topsoil: float
    cec_subsoil: float
    elevation_m: float
    slope_deg: float
    fc_2003_ha: float
    fire_count: float
    temperature_c: float
    precipitation_mm: float
    lst_k: float

    def __post_init__(self) -> None:
        _require(self.awc_code in range(1, 8), f"awc_code {self.awc_code} out of 1..7")

    def as_vector(self) -> list[float]:
        """Feature values in FEATURE_NAMES order."""
        return [float(getattr(self, name)) for name in FEATURE_NAMES]

    @classmethod
    def from_mapping(cls, values: dict) -> "CompartmentFeatures":
        missing = [n for n in FEATURE_NAMES if n not in values]
        if missing:
            raise ValidationError(f"missing compartment features: {missing}")
        extra = sorted(set(values) - set(FEATURE_NAMES))
        if extra:
            raise ValidationError(f"unknown compartment features: {extra}")
        kwargs = {n: (int(values[n]) if n == "awc_code" else float(values[n])) for n in FEATURE_NAMES}
        return cls(**kwargs)

    def to_mapping(self) -> dict:
        return {n: getattr(self, n) for n in FEATURE_NAMES}


assert len(FEATURE_NAMES) == 31
assert tuple(f.name for f in fields(CompartmentFeatures)) == FEATURE_NAMES


def polygon_area(vertices: Iterable[tuple[float, float]]) -> float:
    """Signed shoelace area; positive for counter-clockwise vertex order."""
    pts = list(vertices)
    total = 0.0
    n = len(pts)
    for i in range(n):
        x1, y1 = pts[i]
        x2, y2 = pts[(i + 1) % n]
        total += x1 * y2 - x2 * y1
    return total / 2.0


@dataclass(frozen=True)
class Compartment:
    """Smallest management unit: a simple polygon with the 31-feature vector.

    `label` is the tree-cover-loss outcome when known; `fc_2015_ha` is the
    follow-up cover figure used to derive it (carried with the compartment
    because the labeling rule differences it against `features.fc_2003_ha`).
    """

    compartment_id: int
    polygon: tuple[tuple[float, float], ...]
    features: CompartmentFeatures
    label: Optional[int] = None
    fc_2015_ha: Optional[float] = None

    def __post_init__(self) -> None:
        _require(
            len(self.polygon) >= 3,
            f"compartment {self.compartment_id}: polygon needs >= 3 vertices",
        )
        area = abs(polygon_area(self.polygon))
        _require(area > 0.0, f"compartment {self.compartment_id}: polygon area must be positive")
        _require(
            self.label in (None, 0, 1),
            f"compartment {self.compartment_id}: label must be 0, 1 or absent",
        )

    def bounding_box(self) -> tuple[float, float, float, float]:
        xs = [p[0] for p in self.polygon]
        ys = [p[1] for p in self.polygon]
        return min(xs), min(ys), max(xs), max(ys)
