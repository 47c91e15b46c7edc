"""The 14-rule expert suitability rubric.

Each rule yields raw points on its own scale; the raw points are rescaled to
the rule's nominal weight (contribution = weight * clamp(raw, 0, max_raw) /
max_raw). The weights sum to 90, so the normalized score s = s_raw * 100/90
spans [0, 100]. Current forest cover carries half the nominal weight; six
change-window rules compare each historical snapshot against 2019.
"""

from __future__ import annotations

from dataclasses import dataclass

from .landscape.types import GridCell, ValidationError

#: Change-window rules, newest first, with (weight_pct, per_sub_rule_points).
CHANGE_WINDOWS: tuple[tuple[str, int, float, float], ...] = (
    ("chg_2015", 2015, 5.0, 0.3),
    ("chg_2013", 2013, 4.0, 0.26),
    ("chg_2009", 2009, 3.0, 0.2),
    ("chg_2005", 2005, 2.0, 0.13),
    ("chg_2003", 2003, 1.0, 0.06),
    ("chg_2001", 2001, 1.0, 0.06),
)

#: rule_id -> (weight_pct, max_raw), static rules first, then change windows.
RULE_TABLE: dict[str, tuple[float, float]] = {
    "cover_now": (50.0, 50.0),
    "slope": (3.0, 1.5),
    "aspect": (3.0, 1.5),
    "elevation": (3.0, 1.2),
    "inorg_c": (2.0, 1.0),
    "org_c": (2.0, 1.0),
    "soil_depth": (6.0, 3.0),
    "village": (5.0, 3.0),
    **{rule_id: (weight, 6.0 * p) for rule_id, _, weight, p in CHANGE_WINDOWS},
}

RULE_IDS: tuple[str, ...] = tuple(RULE_TABLE)

#: Weight budget the normalization divides by; the nominal weights sum here.
TOTAL_WEIGHT_PCT = 90.0

assert sum(w for w, _ in RULE_TABLE.values()) == TOTAL_WEIGHT_PCT
assert len(RULE_IDS) == 14


@dataclass(frozen=True)
class RuleContribution:
    rule_id: str
    raw_points: float
    max_raw: float
    weight_pct: float
    contribution: float


@dataclass(frozen=True)
class ExpertScore:
    per_rule: tuple[RuleContribution, ...]
    s_raw: float
    s: float


# ---------------------------------------------------------------------------
# Per-rule point schedules
# ---------------------------------------------------------------------------

def _points_cover_now(cell: GridCell) -> float:
    latest = cell.cover(2019)
    return 0.5 * (latest.mdf_pct + latest.of_pct)


def _points_slope(cell: GridCell) -> float:
    slope = cell.terrain.slope_deg
    if slope <= 30.0:
        return 1.5
    if slope <= 50.0:
        return 1.0
    return 0.5


def _points_aspect(cell: GridCell) -> float:
    # North-facing slopes hold moisture in this climate; south is driest.
    a = cell.terrain.aspect_deg
    if a >= 315.0 or a < 45.0:
        return 1.5
    if a < 135.0:
        return 1.0
    if a < 225.0:
        return 0.5
    return 1.0


def _points_elevation(cell: GridCell) -> float:
    e = cell.terrain.elevation_m
    if e <= 1000.0:
        return 1.2
    if e <= 2000.0:
        return 0.8
    if e <= 2500.0:
        return 0.6
    return 0.4


def _points_inorg_c(cell: GridCell) -> float:
    v = cell.soil.inorg_c
    if v <= 1.5:
        return 0.4
    if v <= 4.5:
        return 0.6
    return 1.0


def _points_org_c(cell: GridCell) -> float:
    v = cell.soil.org_c
    if v <= 5.0:
        return 0.4
    if v <= 15.0:
        return 0.6
    return 1.0


def _points_soil_depth(cell: GridCell) -> float:
    d = cell.soil.depth_cm
    if d < 50.0:
        return 1.0
    if d < 100.0:
        return 2.0
    return 3.0


def _points_village(cell: GridCell) -> float:
    # farther from settlements = less biotic pressure; +inf lands here too
    d = cell.village_dist_km
    if d < 1.0:
        return 1.0
    if d < 3.0:
        return 2.0
    return 3.0


def _points_change(cell: GridCell, year: int, p: float) -> float:
    """Signed sub-rule sum for the cover shift from `year` to 2019.

    Six favorable sub-rules add p each, three unfavorable subtract p; the
    total is clamped to [0, 6p].
    """
    now = cell.cover(2019)
    then = cell.cover(year)
    d_of = now.of_pct - then.of_pct
    d_mdf = now.mdf_pct - then.mdf_pct
    d_vdf = now.vdf_pct - then.vdf_pct
    d_nf = now.nf_pct - then.nf_pct
    d_scrub = now.scrub_pct - then.scrub_pct
    d_water = now.water_pct - then.water_pct

    gain = d_of + d_mdf
    dense_side = d_vdf + d_water + d_scrub

    # tally first, multiply once: six fired sub-rules yield exactly 6*p, so
    # the cap below is actually reachable instead of one ulp away
    fired = 0
    if d_mdf > 0.0:
        fired += 1
    if d_of > 0.0:
        fired += 1
    if d_vdf > 0.0:
        fired += 1
    if gain > dense_side:
        fired += 1
    if d_nf > gain:
        fired += 1
    if d_vdf > gain:
        fired += 1
    if d_water > 0.0:
        fired -= 1
    if d_scrub > 0.0:
        fired -= 1
    if dense_side > gain:
        fired -= 1
    return min(max(fired * p, 0.0), 6.0 * p)


_STATIC_RULES = {
    "cover_now": _points_cover_now,
    "slope": _points_slope,
    "aspect": _points_aspect,
    "elevation": _points_elevation,
    "inorg_c": _points_inorg_c,
    "org_c": _points_org_c,
    "soil_depth": _points_soil_depth,
    "village": _points_village,
}

_CHANGE_RULES = {rule_id: (year, p) for rule_id, year, _, p in CHANGE_WINDOWS}


def rule_points(rule_id: str, cell: GridCell) -> float:
    """Raw points for one rule, on that rule's own point scale."""
    if rule_id in _STATIC_RULES:
        return _STATIC_RULES[rule_id](cell)
    if rule_id in _CHANGE_RULES:
        year, p = _CHANGE_RULES[rule_id]
        return _points_change(cell, year, p)
    raise ValidationError(f"unknown rule_id {rule_id!r}")


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------

def expert_score(cell: GridCell) -> ExpertScore:
    """All 14 rules evaluated, normalized, and summed."""
    per_rule = []
    s_raw = 0.0
    for rule_id in RULE_IDS:
        weight, max_raw = RULE_TABLE[rule_id]
        raw = rule_points(rule_id, cell)
        # ratio first: a rule at its cap contributes exactly its weight, and
        # no rule can ever contribute more, so s stays within [0, 100]
        contribution = weight * (min(max(raw, 0.0), max_raw) / max_raw)
        per_rule.append(
            RuleContribution(
                rule_id=rule_id,
                raw_points=raw,
                max_raw=max_raw,
                weight_pct=weight,
                contribution=contribution,
            )
        )
        s_raw += contribution
    # multiply before dividing so a full 90-point sheet lands on exactly 100.0
    return ExpertScore(per_rule=tuple(per_rule), s_raw=s_raw, s=s_raw * 100.0 / TOTAL_WEIGHT_PCT)


def breakdown_payload(grid_id: int, score: ExpertScore) -> dict:
    """JSON-ready per-cell breakdown in the documented shape."""
    return {
        "grid_id": grid_id,
        "rules": [
            {
                "rule_id": r.rule_id,
                "raw": r.raw_points,
                "max_raw": r.max_raw,
                "weight": r.weight_pct,
                "contribution": r.contribution,
            }
            for r in score.per_rule
        ],
        "s_raw": score.s_raw,
        "s": score.s,
    }
