"""Deterministic synthetic landscape generator.

Stands in for the real census/forest-survey/soil data sources, which are not
shippable. Three scenario profiles:

  uniform            iid cells, moderate exclusion mix
  himalayan-gradient elevation and exclusion flags trend with northing
  separable-loss     compartment labels follow a known threshold rule so the
                     loss model has something it can provably learn

Everything is driven by one random.Random(seed); draw order is fixed
(compartments, then villages, then cells in grid_id order), so output is a
pure function of the arguments.
"""

from __future__ import annotations

import math
import random
from dataclasses import replace

from ..gridgen import (
    DEFAULT_CELL_SIZE_M,
    GridSpec,
    assign_compartment,
    generate_grids,
    village_features,
)
from .io import Landscape
from .types import (
    FEATURE_NAMES,
    LANDUSE_FLAGS,
    SNAPSHOT_YEARS,
    Compartment,
    CompartmentFeatures,
    CoverSnapshot,
    GridCell,
    Region,
    Soil,
    Terrain,
    ValidationError,
    Village,
)

PROFILES = ("uniform", "himalayan-gradient", "separable-loss")

# separable-loss decision rule: a compartment loses tree cover iff BOTH hold.
# Feature values are drawn with a margin around each threshold so the rule is
# learnable from modest samples.
LOSS_RULE_FEATURES = ("grazing_density", "slope_deg")
LOSS_GRAZING_THRESHOLD = 3.0
LOSS_SLOPE_THRESHOLD = 25.0


def separable_loss_rule(grazing_density: float, slope_deg: float) -> int:
    """The designated threshold function behind the separable-loss profile."""
    return int(grazing_density >= LOSS_GRAZING_THRESHOLD and slope_deg >= LOSS_SLOPE_THRESHOLD)


# ---------------------------------------------------------------------------
# Compartments
# ---------------------------------------------------------------------------

def _margin_draw(rng: random.Random, lo: float, gap_lo: float, gap_hi: float, hi: float) -> float:
    """Uniform over [lo,gap_lo] or [gap_hi,hi], half chance each side."""
    if rng.random() < 0.5:
        return rng.uniform(lo, gap_lo)
    return rng.uniform(gap_hi, hi)


def _draw_features(rng: random.Random, profile: str) -> CompartmentFeatures:
    # Ranges are loosely plausible for the source tables; only grazing and
    # slope carry signal in the separable-loss profile.
    if profile == "separable-loss":
        grazing = _margin_draw(rng, 0.0, 2.75, 3.25, 6.0)
        slope = _margin_draw(rng, 0.0, 22.5, 27.5, 50.0)
    else:
        grazing = rng.uniform(0.0, 6.0)
        slope = rng.uniform(0.0, 60.0)
    values = {
        "households": float(rng.randint(10, 2000)),
        "population": float(rng.randint(50, 12000)),
        "farmers": float(rng.randint(5, 4000)),
        "sc_population": float(rng.randint(0, 3000)),
        "literates": float(rng.randint(20, 9000)),
        "marginal_workers": float(rng.randint(0, 2500)),
        "nightlights": float(rng.randint(1, 63)),
        "road_density": rng.uniform(0.0, 3.5),
        "small_holdings": float(rng.randint(0, 1500)),
        "grazing_density": grazing,
        "area_ha": rng.uniform(40.0, 900.0),
        "crop_area_ha": rng.uniform(0.0, 300.0),
        "grass_area_ha": rng.uniform(0.0, 200.0),
        "bare_area_ha": rng.uniform(0.0, 150.0),
        "soil_depth_cm": rng.uniform(10.0, 180.0),
        "awc_code": rng.randint(1, 7),
        "topsoil_c": rng.uniform(0.1, 6.0),
        "subsoil_c": rng.uniform(0.1, 4.0),
        "topsoil_oc": rng.uniform(0.1, 3.0),
        "subsoil_oc": rng.uniform(0.05, 2.0),
        "ph_topsoil": rng.uniform(4.5, 8.5),
        "bulk_density": rng.uniform(1.0, 1.8),
        "cec_topsoil": rng.uniform(5.0, 40.0),
        "cec_subsoil": rng.uniform(5.0, 35.0),
        "elevation_m": rng.uniform(300.0, 4500.0),
        "slope_deg": slope,
        "fc_2003_ha": rng.uniform(50.0, 500.0),
        "fire_count": float(rng.randint(0, 40)),
        "temperature_c": rng.uniform(2.0, 25.0),
        "precipitation_mm": rng.uniform(400.0, 2500.0),
        "lst_k": rng.uniform(270.0, 310.0),
    }
    return CompartmentFeatures(**{n: values[n] for n in FEATURE_NAMES})


def _make_compartments(
    rng: random.Random, region: Region, n_compartments: int, profile: str
) -> list[Compartment]:
    """Rectangle partition of the region, row-major; the first n rectangles.

    When the partition has more slots than compartments, the tail of the
    region stays uncovered, which exercises the no-compartment scoring path.
    """
    if n_compartments <= 0:
        return []
    cols = math.ceil(math.sqrt(n_compartments))
    rows = math.ceil(n_compartments / cols)
    dx = region.width / cols
    dy = region.height / rows
    comps = []
    for k in range(n_compartments):
        row, col = divmod(k, cols)
        x0 = region.x_min + col * dx
        y0 = region.y_min + row * dy
        x1, y1 = x0 + dx, y0 + dy
        polygon = ((x0, y0), (x1, y0), (x1, y1), (x0, y1))
        features = _draw_features(rng, profile)

        if profile == "separable-loss":
            label = separable_loss_rule(features.grazing_density, features.slope_deg)
            if label:
                fc_2015 = features.fc_2003_ha - rng.uniform(1.0, 30.0)
            else:
                fc_2015 = features.fc_2003_ha + rng.uniform(0.5, 30.0)
        else:
            fc_2015 = features.fc_2003_ha + rng.uniform(-30.0, 30.0)
        # Label re-derived from the stored floats, so it always agrees with
        # the hectare-difference rule used downstream.
        label = 1 if (fc_2015 - features.fc_2003_ha) < 0.0 else 0

        comps.append(
            Compartment(
                compartment_id=k + 1,
                polygon=polygon,
                features=features,
                label=label,
                fc_2015_ha=fc_2015,
            )
        )
    return comps


# ---------------------------------------------------------------------------
# Per-cell environment
# ---------------------------------------------------------------------------

def _normalized_cover(weights: dict[str, float], year: int) -> CoverSnapshot:
    total = sum(weights.values())
    return CoverSnapshot(
        year=year,
        **{f"{cls}_pct": 100.0 * w / total for cls, w in weights.items()},
    )


def _draw_covers(rng: random.Random) -> tuple[CoverSnapshot, ...]:
    """Random-walked cover history with occasional degenerate regimes."""
    regime = rng.random()
    snaps = []
    if regime < 0.08:
        # persistently treeless: of+mdf+vdf stays under 1% in every year
        for year in SNAPSHOT_YEARS:
            weights = {
                "of": 0.002,
                "mdf": 0.002,
                "vdf": 0.002,
                "nf": rng.uniform(0.3, 1.0),
                "scrub": rng.uniform(0.3, 1.0),
                "water": rng.uniform(0.3, 1.0),
            }
            snaps.append(_normalized_cover(weights, year))
        return tuple(snaps)

    weights = {cls: rng.uniform(0.05, 1.0) for cls in ("of", "mdf", "vdf", "nf", "scrub", "water")}
    for year in SNAPSHOT_YEARS:
        if year != SNAPSHOT_YEARS[0]:
            for cls in weights:
                weights[cls] *= math.exp(rng.uniform(-0.3, 0.3))
        current = dict(weights)
        if year == 2019:
            # weight 100 vs walked weights <= ~6 guarantees the dominance
            # thresholds (70% vdf / 50% scrub) are actually crossed
            if regime < 0.15:
                current["vdf"] = 100.0  # canopy closed over by 2019
            elif regime < 0.22:
                current["scrub"] = 100.0  # degraded to scrub by 2019
        snaps.append(_normalized_cover(current, year))
    return tuple(snaps)


def _draw_flags(rng: random.Random, profile: str, y_frac: float, elevation: float) -> frozenset[str]:
    flags = set()
    if profile == "himalayan-gradient":
        if y_frac > 0.9 and rng.random() < 0.8:
            flags.add("trans_himalayan")
        if elevation > 4000.0 and rng.random() < 0.5:
            flags.add("snow")
        if elevation > 3000.0 and rng.random() < 0.2:
            flags.add("alpine_pasture")
        if elevation < 1200.0 and rng.random() < 0.15:
            flags.add("agriculture")
        if rng.random() < 0.05:
            flags.add("road")
        if rng.random() < 0.05:
            flags.add("grassland")
    else:
        for name in LANDUSE_FLAGS:
            if rng.random() < 0.05:
                flags.add(name)
    return frozenset(flags)


def _draw_terrain(rng: random.Random, profile: str, y_frac: float) -> Terrain:
    if profile == "himalayan-gradient":
        elevation = 300.0 + 4200.0 * y_frac + rng.uniform(-200.0, 200.0)
        slope = min(90.0, max(0.0, 10.0 + 50.0 * y_frac + rng.uniform(-10.0, 10.0)))
    else:
        elevation = rng.uniform(400.0, 4200.0)
        slope = rng.uniform(0.0, 60.0)
    return Terrain(
        elevation_m=max(0.0, elevation),
        slope_deg=slope,
        aspect_deg=rng.uniform(0.0, 360.0),
    )


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def synthesize_landscape(
    seed: int,
    region: Region,
    n_compartments: int,
    n_villages: int,
    profile: str = "uniform",
    cell_size_m: float = DEFAULT_CELL_SIZE_M,
) -> Landscape:
    if profile not in PROFILES:
        raise ValidationError(f"unknown profile {profile!r}; expected one of {PROFILES}")
    frames = generate_grids(region, GridSpec(cell_size_m=cell_size_m))
    if not frames:
        raise ValidationError(
            f"degenerate region: {region.width} x {region.height} m holds no "
            f"{cell_size_m} m cell center"
        )

    rng = random.Random(seed)
    compartments = _make_compartments(rng, region, n_compartments, profile)
    villages = [
        Village(
            village_id=i + 1,
            location=(rng.uniform(region.x_min, region.x_max), rng.uniform(region.y_min, region.y_max)),
        )
        for i in range(n_villages)
    ]

    cells = []
    for grid_id, origin in frames:
        y_frac = (origin[1] + cell_size_m / 2.0 - region.y_min) / region.height
        terrain = _draw_terrain(rng, profile, y_frac)
        soil = Soil(
            depth_cm=rng.uniform(20.0, 150.0),
            org_c=rng.uniform(0.0, 25.0),
            inorg_c=rng.uniform(0.0, 6.0),
        )
        covers = _draw_covers(rng)
        flags = _draw_flags(rng, profile, y_frac, terrain.elevation_m)
        center = (origin[0] + cell_size_m / 2.0, origin[1] + cell_size_m / 2.0)
        dist, nearby = village_features(center, villages)
        cell = GridCell(
            grid_id=grid_id,
            origin=origin,
            covers=covers,
            terrain=terrain,
            soil=soil,
            village_dist_km=dist,
            villages_within_1km=nearby,
            landuse_flags=flags,
        )
        comp_id = assign_compartment(cell, compartments, cell_size_m=cell_size_m)
        cells.append(replace(cell, compartment_id=comp_id))
    return Landscape(cells=cells, compartments=compartments, villages=villages)
