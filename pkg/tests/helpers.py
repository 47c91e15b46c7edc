"""Hand-rolled fixture builders shared across the test modules.

`build_cell` produces a valid, non-excluded cell whose rubric inputs are easy
to reason about; tests override exactly the fields they exercise. The default
cover history is flat, so every change-window rule scores 0.
"""

from __future__ import annotations

import math
from typing import Optional

from plantsite.landscape.types import (
    FEATURE_NAMES,
    SNAPSHOT_YEARS,
    Compartment,
    CompartmentFeatures,
    CoverSnapshot,
    GridCell,
    Soil,
    Terrain,
)

#: (of, mdf, vdf, nf, scrub, water); sums to 100, clears every exclusion rule.
BASE_COVER = (30.0, 30.0, 10.0, 10.0, 10.0, 10.0)


def make_snapshot(year: int, pct: tuple = BASE_COVER) -> CoverSnapshot:
    of, mdf, vdf, nf, scrub, water = pct
    return CoverSnapshot(
        year=year, of_pct=of, mdf_pct=mdf, vdf_pct=vdf,
        nf_pct=nf, scrub_pct=scrub, water_pct=water,
    )


def build_cell(
    grid_id: int = 0,
    origin: tuple = (0.0, 0.0),
    covers: Optional[dict] = None,
    elevation: float = 1500.0,
    slope: float = 20.0,
    aspect: float = 0.0,
    depth: float = 120.0,
    org_c: float = 20.0,
    inorg_c: float = 5.0,
    village_dist_km: float = 5.0,
    villages_within_1km: int = 0,
    flags: tuple = (),
    compartment_id: Optional[int] = None,
) -> GridCell:
    """A valid cell; `covers` maps year -> 6-tuple to override BASE_COVER."""
    per_year = {year: BASE_COVER for year in SNAPSHOT_YEARS}
    if covers:
        per_year.update(covers)
    return GridCell(
        grid_id=grid_id,
        origin=origin,
        covers=tuple(make_snapshot(y, per_year[y]) for y in SNAPSHOT_YEARS),
        terrain=Terrain(elevation_m=elevation, slope_deg=slope, aspect_deg=aspect),
        soil=Soil(depth_cm=depth, org_c=org_c, inorg_c=inorg_c),
        village_dist_km=village_dist_km,
        villages_within_1km=villages_within_1km,
        landuse_flags=frozenset(flags),
        compartment_id=compartment_id,
    )


#: Flat feature sheet; individual tests override the features they test.
FEATURE_DEFAULTS = {
    "households": 100.0,
    "population": 600.0,
    "farmers": 80.0,
    "sc_population": 50.0,
    "literates": 400.0,
    "marginal_workers": 30.0,
    "nightlights": 12.0,
    "road_density": 1.0,
    "small_holdings": 40.0,
    "grazing_density": 2.0,
    "area_ha": 250.0,
    "crop_area_ha": 60.0,
    "grass_area_ha": 20.0,
    "bare_area_ha": 10.0,
    "soil_depth_cm": 90.0,
    "awc_code": 3,
    "topsoil_c": 1.5,
    "subsoil_c": 1.0,
    "topsoil_oc": 0.8,
    "subsoil_oc": 0.4,
    "ph_topsoil": 6.5,
    "bulk_density": 1.3,
    "cec_topsoil": 18.0,
    "cec_subsoil": 15.0,
    "elevation_m": 1400.0,
    "slope_deg": 15.0,
    "fc_2003_ha": 200.0,
    "fire_count": 3.0,
    "temperature_c": 14.0,
    "precipitation_mm": 1100.0,
    "lst_k": 290.0,
}

assert set(FEATURE_DEFAULTS) == set(FEATURE_NAMES)


def build_features(**overrides) -> CompartmentFeatures:
    values = dict(FEATURE_DEFAULTS)
    values.update(overrides)
    return CompartmentFeatures(**values)


def unit_square(x0: float, y0: float, side: float) -> tuple:
    return ((x0, y0), (x0 + side, y0), (x0 + side, y0 + side), (x0, y0 + side))


def build_compartment(
    compartment_id: int = 1,
    polygon: Optional[tuple] = None,
    fc_2015_ha: Optional[float] = 210.0,
    label: Optional[int] = None,
    **feature_overrides,
) -> Compartment:
    if polygon is None:
        polygon = unit_square(0.0, 0.0, 1000.0)
    return Compartment(
        compartment_id=compartment_id,
        polygon=polygon,
        features=build_features(**feature_overrides),
        label=label,
        fc_2015_ha=fc_2015_ha,
    )


def euclid_km(a: tuple, b: tuple) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1]) / 1000.0
