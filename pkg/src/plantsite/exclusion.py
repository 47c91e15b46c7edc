"""Guardrail rules that remove cells from consideration before scoring.

Each rule contributes a machine-readable reason string; a cell is excluded
iff at least one reason fires. Downstream, an excluded cell's fused score is
pinned to 0 regardless of the fusion weight.
"""

from __future__ import annotations

from dataclasses import dataclass

from .landscape.types import LANDUSE_FLAGS, SNAPSHOT_YEARS, GridCell

#: Non-flag reasons, in report order (flags come first, in LANDUSE_FLAGS order).
REASON_ABOVE_TREELINE = "above_treeline"
REASON_NATURAL_BLANK = "natural_blank"
REASON_VERY_DENSE = "very_dense"
REASON_SCRUB_DOMINATED = "scrub_dominated"
REASON_HIGH_RESOURCE_USE = "high_resource_use"


@dataclass(frozen=True)
class ExclusionPolicy:
    """Thresholds for the guardrail rules; all configurable via the run config."""

    treeline_m: float = 3800.0
    blank_threshold_pct: float = 5.0
    vdf_threshold: float = 70.0
    scrub_threshold: float = 50.0
    resource_threshold: int = 3


DEFAULT_POLICY = ExclusionPolicy()


@dataclass(frozen=True)
class ExclusionResult:
    excluded: bool
    reasons: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.excluded != bool(self.reasons):
            raise ValueError("excluded flag must mirror non-empty reasons")


def apply_exclusions(cell: GridCell, policy: ExclusionPolicy = DEFAULT_POLICY) -> ExclusionResult:
    """Evaluate every guardrail; reasons are reported in canonical order."""
    reasons: list[str] = []

    for flag in LANDUSE_FLAGS:
        if flag in cell.landuse_flags:
            reasons.append(f"landuse_flag:{flag}")

    if cell.terrain.elevation_m > policy.treeline_m:
        reasons.append(REASON_ABOVE_TREELINE)

    # blank means persistently treeless: the tree share must stay under the
    # threshold in EVERY snapshot, not just the latest
    if all(
        (snap.of_pct + snap.mdf_pct + snap.vdf_pct) < policy.blank_threshold_pct
        for snap in (cell.cover(y) for y in SNAPSHOT_YEARS)
    ):
        reasons.append(REASON_NATURAL_BLANK)

    latest = cell.cover(SNAPSHOT_YEARS[-1])
    if latest.vdf_pct >= policy.vdf_threshold:
        reasons.append(REASON_VERY_DENSE)
    if latest.scrub_pct >= policy.scrub_threshold:
        reasons.append(REASON_SCRUB_DOMINATED)

    if cell.villages_within_1km >= policy.resource_threshold:
        reasons.append(REASON_HIGH_RESOURCE_USE)

    return ExclusionResult(excluded=bool(reasons), reasons=tuple(reasons))
