"""Load/save for the three landscape files: grids.csv, compartments.json, villages.csv.

Numbers are written with repr() so a save/load/save cycle is byte-identical.
Loaders report the offending row number and value in every error message.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from .types import (
    COVER_CLASSES,
    COVER_SUM_TOLERANCE,
    LANDUSE_FLAGS,
    SNAPSHOT_YEARS,
    VILLAGE_DIST_SENTINEL_KM,
    Compartment,
    CompartmentFeatures,
    CoverSnapshot,
    GridCell,
    Soil,
    Terrain,
    ValidationError,
    Village,
)

GRID_BASE_COLUMNS = (
    "grid_id",
    "x_min",
    "y_min",
    "elevation_m",
    "slope_deg",
    "aspect_deg",
    "soil_depth_cm",
    "org_c",
    "inorg_c",
    "villages_within_1km",
    "village_dist_km",
    "flags",
)


def _cover_columns() -> list[str]:
    return [f"{cls}_{year}" for year in SNAPSHOT_YEARS for cls in COVER_CLASSES]


GRID_COLUMNS = list(GRID_BASE_COLUMNS) + _cover_columns()


@dataclass
class Landscape:
    """A loaded landscape: cells plus the compartment and village layers."""

    cells: list[GridCell]
    compartments: list[Compartment]
    villages: list[Village]

    def compartment_by_id(self) -> dict[int, Compartment]:
        return {c.compartment_id: c for c in self.compartments}


def _fmt(value: float) -> str:
    """repr-format a float; integers-valued floats keep their '.0'."""
    return repr(float(value))


def _parse_float(raw: str, column: str, row: int) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ValidationError(f"grids.csv row {row}: column {column} has non-numeric value {raw!r}") from None


# ---------------------------------------------------------------------------
# grids.csv
# ---------------------------------------------------------------------------

def save_grids(cells: list[GridCell], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(GRID_COLUMNS)
        for cell in cells:
            dist = cell.village_dist_km
            if math.isinf(dist):
                dist = VILLAGE_DIST_SENTINEL_KM
            # canonical flag order, so output is deterministic
            flags = "|".join(f for f in LANDUSE_FLAGS if f in cell.landuse_flags)
            row = [
                str(cell.grid_id),
                _fmt(cell.origin[0]),
                _fmt(cell.origin[1]),
                _fmt(cell.terrain.elevation_m),
                _fmt(cell.terrain.slope_deg),
                _fmt(cell.terrain.aspect_deg),
                _fmt(cell.soil.depth_cm),
                _fmt(cell.soil.org_c),
                _fmt(cell.soil.inorg_c),
                str(cell.villages_within_1km),
                _fmt(dist),
                flags,
            ]
            for year in SNAPSHOT_YEARS:
                snap = cell.cover(year)
                row.extend(_fmt(snap.fraction(cls)) for cls in COVER_CLASSES)
            writer.writerow(row)


def load_grids(path: str | Path) -> list[GridCell]:
    cells: list[GridCell] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError("grids.csv is empty") from None
        if header != GRID_COLUMNS:
            # a cover column for a year outside the rubric set gets a precise
            # error; anything else is a generic header mismatch
            for name in header:
                cls, _, year_text = name.partition("_")
                if cls in COVER_CLASSES and year_text.isdigit() and int(year_text) not in SNAPSHOT_YEARS:
                    raise ValidationError(
                        f"grids.csv: unexpected snapshot year {year_text} in column {name!r}"
                    )
            raise ValidationError(
                f"grids.csv header mismatch: expected {len(GRID_COLUMNS)} columns starting "
                f"{GRID_COLUMNS[:3]}, got {header[:3]}"
            )
        col = {name: i for i, name in enumerate(header)}
        for row_num, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(GRID_COLUMNS):
                raise ValidationError(
                    f"grids.csv row {row_num}: expected {len(GRID_COLUMNS)} fields, got {len(row)}"
                )

            def get(name: str) -> str:
                return row[col[name]]

            covers = []
            for year in SNAPSHOT_YEARS:
                pcts = {
                    f"{cls}_pct": _parse_float(get(f"{cls}_{year}"), f"{cls}_{year}", row_num)
                    for cls in COVER_CLASSES
                }
                total = sum(pcts.values())
                if abs(total - 100.0) > COVER_SUM_TOLERANCE:
                    raise ValidationError(
                        f"grids.csv row {row_num}: cover percentages for year {year} "
                        f"sum to {total}, expected 100 +/- {COVER_SUM_TOLERANCE}"
                    )
                covers.append(CoverSnapshot(year=year, **pcts))

            dist = _parse_float(get("village_dist_km"), "village_dist_km", row_num)
            if dist >= VILLAGE_DIST_SENTINEL_KM:
                dist = math.inf
            flags_raw = get("flags")
            flags = frozenset(f for f in flags_raw.split("|") if f)
            try:
                cell = GridCell(
                    grid_id=int(get("grid_id")),
                    origin=(
                        _parse_float(get("x_min"), "x_min", row_num),
                        _parse_float(get("y_min"), "y_min", row_num),
                    ),
                    covers=tuple(covers),
                    terrain=Terrain(
                        elevation_m=_parse_float(get("elevation_m"), "elevation_m", row_num),
                        slope_deg=_parse_float(get("slope_deg"), "slope_deg", row_num),
                        aspect_deg=_parse_float(get("aspect_deg"), "aspect_deg", row_num),
                    ),
                    soil=Soil(
                        depth_cm=_parse_float(get("soil_depth_cm"), "soil_depth_cm", row_num),
                        org_c=_parse_float(get("org_c"), "org_c", row_num),
                        inorg_c=_parse_float(get("inorg_c"), "inorg_c", row_num),
                    ),
                    village_dist_km=dist,
                    villages_within_1km=int(get("villages_within_1km")),
                    landuse_flags=flags,
                )
            except ValidationError as exc:
                raise ValidationError(f"grids.csv row {row_num}: {exc}") from None
            cells.append(cell)
    return cells


# ---------------------------------------------------------------------------
# compartments.json
# ---------------------------------------------------------------------------

def save_compartments(compartments: list[Compartment], path: str | Path) -> None:
    records = []
    for comp in compartments:
        rec: dict = {
            "compartment_id": comp.compartment_id,
            "polygon": [[x, y] for x, y in comp.polygon],
            "features": comp.features.to_mapping(),
            "label": comp.label,
        }
        if comp.fc_2015_ha is not None:
            rec["fc_2015_ha"] = comp.fc_2015_ha
        records.append(rec)
    with open(path, "w") as fh:
        json.dump(records, fh, indent=1)
        fh.write("\n")


def load_compartments(path: str | Path) -> list[Compartment]:
    with open(path) as fh:
        try:
            records = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"compartments.json: invalid JSON ({exc})") from None
    if not isinstance(records, list):
        raise ValidationError("compartments.json: top-level value must be a list")
    compartments = []
    for idx, rec in enumerate(records):
        where = f"compartments.json entry {idx}"
        try:
            features = CompartmentFeatures.from_mapping(rec["features"])
            comp = Compartment(
                compartment_id=int(rec["compartment_id"]),
                polygon=tuple((float(x), float(y)) for x, y in rec["polygon"]),
                features=features,
                label=rec.get("label"),
                fc_2015_ha=rec.get("fc_2015_ha"),
            )
        except KeyError as exc:
            raise ValidationError(f"{where}: missing key {exc}") from None
        except ValidationError as exc:
            raise ValidationError(f"{where}: {exc}") from None
        compartments.append(comp)
    return compartments


# ---------------------------------------------------------------------------
# villages.csv
# ---------------------------------------------------------------------------

def save_villages(villages: list[Village], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["village_id", "x", "y"])
        for v in villages:
            writer.writerow([str(v.village_id), _fmt(v.location[0]), _fmt(v.location[1])])


def load_villages(path: str | Path) -> list[Village]:
    villages = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["village_id", "x", "y"]:
            raise ValidationError(f"villages.csv header mismatch: got {header}")
        for row_num, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ValidationError(f"villages.csv row {row_num}: expected 3 fields, got {len(row)}")
            try:
                villages.append(Village(village_id=int(row[0]), location=(float(row[1]), float(row[2]))))
            except (ValueError, ValidationError) as exc:
                raise ValidationError(f"villages.csv row {row_num}: {exc}") from None
    return villages


# ---------------------------------------------------------------------------
# Whole-landscape convenience
# ---------------------------------------------------------------------------

def save_landscape(landscape: Landscape, directory: str | Path) -> None:
    """Write grids.csv, compartments.json and villages.csv into a directory."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    save_grids(landscape.cells, directory / "grids.csv")
    save_compartments(landscape.compartments, directory / "compartments.json")
    save_villages(landscape.villages, directory / "villages.csv")


def load_landscape(
    grid_file: str | Path,
    compartment_file: str | Path,
    village_file: str | Path,
    cell_size_m: Optional[float] = None,
) -> Landscape:
    """Load and validate the three files; re-derives the compartment join."""
    from ..gridgen import DEFAULT_CELL_SIZE_M, assign_compartment

    cells = load_grids(grid_file)
    compartments = load_compartments(compartment_file)
    villages = load_villages(village_file)
    size = DEFAULT_CELL_SIZE_M if cell_size_m is None else cell_size_m
    joined = [
        replace(cell, compartment_id=assign_compartment(cell, compartments, cell_size_m=size))
        for cell in cells
    ]
    return Landscape(cells=joined, compartments=compartments, villages=villages)


def load_landscape_dir(directory: str | Path, cell_size_m: Optional[float] = None) -> Landscape:
    directory = Path(directory)
    return load_landscape(
        directory / "grids.csv",
        directory / "compartments.json",
        directory / "villages.csv",
        cell_size_m=cell_size_m,
    )
