"""Result tables: per-class descriptives, proposed-site bucketing, exports.

Descriptive columns are the same in both tables: mean 2019 cover shares by
class, mean elevation, and how many member cells have a village within 1 km.
Site bucketing maps each proposed site to the cell containing it and rolls
sites up by that cell's suitability class.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .fusion import CLASS_ORDER, SuitabilityClass, SuitabilityRecord
from .gridgen import DEFAULT_CELL_SIZE_M
from .landscape.types import GridCell, ValidationError


@dataclass(frozen=True)
class ClassRow:
    """Descriptive statistics over one class's member cells.

    Means are None when the class has no members.
    """

    suitability: SuitabilityClass
    n_cells: int
    mean_of_pct: Optional[float]
    mean_mdf_pct: Optional[float]
    mean_vdf_pct: Optional[float]
    mean_nf_pct: Optional[float]
    mean_elevation_m: Optional[float]
    cells_with_village_within_1km: int


@dataclass(frozen=True)
class ClassDescriptives:
    rows: tuple[ClassRow, ...]  # one per class, CLASS_ORDER

    def row(self, cls: SuitabilityClass) -> ClassRow:
        for r in self.rows:
            if r.suitability is cls:
                return r
        raise ValidationError(f"no row for class {cls}")


@dataclass(frozen=True)
class SiteBucket:
    suitability: SuitabilityClass
    site_count: int
    share_pct: float  # of mapped sites
    mean_of_pct: Optional[float]
    mean_mdf_pct: Optional[float]
    mean_vdf_pct: Optional[float]
    mean_nf_pct: Optional[float]
    mean_elevation_m: Optional[float]


@dataclass(frozen=True)
class SiteEvaluation:
    buckets: tuple[SiteBucket, ...]  # one per class, CLASS_ORDER
    mapped: int
    unmapped: int

    def bucket(self, cls: SuitabilityClass) -> SiteBucket:
        for b in self.buckets:
            if b.suitability is cls:
                return b
        raise ValidationError(f"no bucket for class {cls}")


def _descriptive_means(cells: Sequence[GridCell]) -> tuple[Optional[float], ...]:
    """(mean of, mdf, vdf, nf in 2019, mean elevation); all None when empty."""
    if not cells:
        return (None, None, None, None, None)
    n = len(cells)
    sums = [0.0] * 5
    for cell in cells:
        latest = cell.cover(2019)
        sums[0] += latest.of_pct
        sums[1] += latest.mdf_pct
        sums[2] += latest.vdf_pct
        sums[3] += latest.nf_pct
        sums[4] += cell.terrain.elevation_m
    return tuple(s / n for s in sums)


def class_descriptives(
    records: Sequence[SuitabilityRecord], cells: Sequence[GridCell]
) -> ClassDescriptives:
    by_id = {c.grid_id: c for c in cells}
    members: dict[SuitabilityClass, list[GridCell]] = {cls: [] for cls in CLASS_ORDER}
    for record in records:
        cell = by_id.get(record.grid_id)
        if cell is None:
            raise ValidationError(f"record for grid {record.grid_id} has no matching cell")
        members[record.suitability].append(cell)
    rows = []
    for cls in CLASS_ORDER:
        cells_in = members[cls]
        means = _descriptive_means(cells_in)
        rows.append(
            ClassRow(
                suitability=cls,
                n_cells=len(cells_in),
                mean_of_pct=means[0],
                mean_mdf_pct=means[1],
                mean_vdf_pct=means[2],
                mean_nf_pct=means[3],
                mean_elevation_m=means[4],
                cells_with_village_within_1km=sum(
                    1 for c in cells_in if c.villages_within_1km >= 1
                ),
            )
        )
    return ClassDescriptives(rows=tuple(rows))


# ---------------------------------------------------------------------------
# Proposed plantation sites
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Site:
    site_id: int
    x: float
    y: float


def load_sites(path: str | Path) -> list[Site]:
    sites = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["site_id", "x", "y"]:
            raise ValidationError(f"sites.csv header mismatch: got {header}")
        for row_num, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                sites.append(Site(site_id=int(row[0]), x=float(row[1]), y=float(row[2])))
            except (ValueError, IndexError) as exc:
                raise ValidationError(f"sites.csv row {row_num}: {exc}") from None
    return sites


def _containing_cell(
    x: float, y: float, cells: Sequence[GridCell], cell_size_m: float
) -> Optional[GridCell]:
    # half-open squares, so a site on a shared edge lands in exactly one cell
    for cell in cells:
        ox, oy = cell.origin
        if ox <= x < ox + cell_size_m and oy <= y < oy + cell_size_m:
            return cell
    return None


def evaluate_proposed_sites(
    sites: Sequence[Site],
    records: Sequence[SuitabilityRecord],
    cells: Sequence[GridCell],
    cell_size_m: float = DEFAULT_CELL_SIZE_M,
) -> SiteEvaluation:
    """Bucket each site by the class of the cell containing it.

    A cell hosting several sites contributes once per site to that class's
    descriptives; sites outside every cell are only counted as unmapped.
    """
    class_by_id = {r.grid_id: r.suitability for r in records}
    host_cells: dict[SuitabilityClass, list[GridCell]] = {cls: [] for cls in CLASS_ORDER}
    unmapped = 0
    for site in sites:
        cell = _containing_cell(site.x, site.y, cells, cell_size_m)
        if cell is None:
            unmapped += 1
            continue
        suitability = class_by_id.get(cell.grid_id)
        if suitability is None:
            raise ValidationError(f"cell {cell.grid_id} has no suitability record")
        host_cells[suitability].append(cell)
    mapped = sum(len(v) for v in host_cells.values())
    buckets = []
    for cls in CLASS_ORDER:
        hosts = host_cells[cls]
        means = _descriptive_means(hosts)
        buckets.append(
            SiteBucket(
                suitability=cls,
                site_count=len(hosts),
                share_pct=100.0 * len(hosts) / mapped if mapped else 0.0,
                mean_of_pct=means[0],
                mean_mdf_pct=means[1],
                mean_vdf_pct=means[2],
                mean_nf_pct=means[3],
                mean_elevation_m=means[4],
            )
        )
    return SiteEvaluation(buckets=tuple(buckets), mapped=mapped, unmapped=unmapped)


# ---------------------------------------------------------------------------
# Exports
# ---------------------------------------------------------------------------

SUMMARY_COLUMNS = ["grid_id", "s", "m", "x", "class", "exclusion_reasons"]


def export_summary(records: Sequence[SuitabilityRecord], path: str | Path, fmt: str = "csv") -> None:
    """Full per-cell dump, stable column order; csv or json."""
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(SUMMARY_COLUMNS)
            for r in records:
                writer.writerow(
                    [
                        str(r.grid_id),
                        repr(r.s),
                        repr(r.m),
                        repr(r.x),
                        r.suitability.value,
                        "|".join(r.exclusion.reasons),
                    ]
                )
    elif fmt == "json":
        payload = [
            {
                "grid_id": r.grid_id,
                "s": r.s,
                "m": r.m,
                "x": r.x,
                "class": r.suitability.value,
                "exclusion_reasons": list(r.exclusion.reasons),
            }
            for r in records
        ]
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1)
            fh.write("\n")
    else:
        raise ValidationError(f"unknown summary format {fmt!r}; expected csv or json")


def load_summary_json(path: str | Path) -> list[SuitabilityRecord]:
    from .exclusion import ExclusionResult

    with open(path) as fh:
        payload = json.load(fh)
    records = []
    for item in payload:
        reasons = tuple(item["exclusion_reasons"])
        records.append(
            SuitabilityRecord(
                grid_id=int(item["grid_id"]),
                s=float(item["s"]),
                m=float(item["m"]),
                x=float(item["x"]),
                suitability=SuitabilityClass(item["class"]),
                exclusion=ExclusionResult(excluded=bool(reasons), reasons=reasons),
            )
        )
    return records


def score_histogram(
    records: Sequence[SuitabilityRecord], bin_width: float = 10.0
) -> dict[str, list[int]]:
    """Counts of fused scores per class in [0,bin_width,...,100] bins.

    The top bin is closed at 100. Bin edges are a documented choice; the
    figure this feeds never published its binning.
    """
    n_bins = int(round(100.0 / bin_width))
    out = {cls.value: [0] * n_bins for cls in CLASS_ORDER}
    for r in records:
        k = min(int(r.x / bin_width), n_bins - 1)
        out[r.suitability.value][k] += 1
    return out
