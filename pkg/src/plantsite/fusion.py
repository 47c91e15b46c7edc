"""Score fusion, classification, weight sweep and distribution-matching tuner.

The fused score is x = alpha*s + (1-alpha)*m over the expert score s and the
ML score m, except that excluded cells are pinned to x = 0 for every alpha.
Class boundaries are fixed: high > 70 >= medium > 40 >= low > 0 = largely
unsuitable.

The expensive per-cell inputs (s, m, exclusion) do not depend on alpha, so
they are computed once into PreparedCell rows; fuse/classify over those rows
is O(cells) per alpha, which is what the sweep and the what-if endpoint lean
on.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional, Sequence

from .exclusion import DEFAULT_POLICY, ExclusionPolicy, ExclusionResult, apply_exclusions
from .landscape.types import Compartment, GridCell, ValidationError
from .loss_model import NEUTRAL_ML_SCORE, GbdtModel, predict_proba
from .rubric import expert_score

HIGH_GT = 70.0
MEDIUM_GT = 40.0

DEFAULT_ALPHA = 0.9

#: Sweep grid matching the published 10%-jump table, descending.
DEFAULT_SWEEP_ALPHAS: tuple[float, ...] = tuple(k / 10.0 for k in range(10, -1, -1))


class SuitabilityClass(str, Enum):
    LARGELY_UNSUITABLE = "largely_unsuitable"
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"


CLASS_ORDER: tuple[SuitabilityClass, ...] = (
    SuitabilityClass.LARGELY_UNSUITABLE,
    SuitabilityClass.LOW,
    SuitabilityClass.MEDIUM,
    SuitabilityClass.HIGH,
)


@dataclass(frozen=True)
class FusionConfig:
    alpha: float = DEFAULT_ALPHA
    exclusion_policy: ExclusionPolicy = DEFAULT_POLICY

    def __post_init__(self) -> None:
        if not (0.0 <= self.alpha <= 1.0):
            raise ValidationError(f"alpha {self.alpha} out of [0,1]")


@dataclass(frozen=True)
class SuitabilityRecord:
    grid_id: int
    s: float
    m: float
    x: float
    suitability: SuitabilityClass
    exclusion: ExclusionResult


@dataclass(frozen=True)
class ClassDistribution:
    """Class shares as percentages of all cells (excluded ones included)."""

    largely_unsuitable_pct: float
    low_pct: float
    medium_pct: float
    high_pct: float

    def share(self, cls: SuitabilityClass) -> float:
        return getattr(self, f"{cls.value}_pct")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.largely_unsuitable_pct, self.low_pct, self.medium_pct, self.high_pct)


# ---------------------------------------------------------------------------
# Core algebra
# ---------------------------------------------------------------------------

def fuse(s: float, m: float, alpha: float) -> float:
    if not (0.0 <= s <= 100.0):
        raise ValidationError(f"expert score {s} out of [0,100]")
    if not (0.0 <= m <= 100.0):
        raise ValidationError(f"ml score {m} out of [0,100]")
    if not (0.0 <= alpha <= 1.0):
        raise ValidationError(f"alpha {alpha} out of [0,1]")
    return alpha * s + (1.0 - alpha) * m


def classify(x: float, excluded: bool) -> SuitabilityClass:
    if excluded or x == 0.0:
        return SuitabilityClass.LARGELY_UNSUITABLE
    if x > HIGH_GT:
        return SuitabilityClass.HIGH
    if x > MEDIUM_GT:
        return SuitabilityClass.MEDIUM
    return SuitabilityClass.LOW


# ---------------------------------------------------------------------------
# Per-cell preparation (alpha-independent work)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PreparedCell:
    cell: GridCell
    s: float
    m: float
    ml_neutral: bool
    exclusion: ExclusionResult


def prepare_cells(
    cells: Sequence[GridCell],
    model: GbdtModel,
    compartments: Sequence[Compartment],
    policy: ExclusionPolicy = DEFAULT_POLICY,
    threads: int = 1,
) -> list[PreparedCell]:
    """Rubric, ML score and exclusions per cell; p_loss cached per compartment."""
    by_id = {c.compartment_id: c for c in compartments}
    p_cache: dict[int, float] = {}

    def ml_score(cell: GridCell) -> tuple[float, bool]:
        if cell.compartment_id is None:
            return NEUTRAL_ML_SCORE, True
        p = p_cache.get(cell.compartment_id)
        if p is None:
            comp = by_id.get(cell.compartment_id)
            if comp is None:
                raise ValidationError(
                    f"cell {cell.grid_id}: unknown compartment {cell.compartment_id}"
                )
            p = predict_proba(model, comp.features)
            p_cache[cell.compartment_id] = p
        return 100.0 * (1.0 - p), False

    def prepare(cell: GridCell) -> PreparedCell:
        m, neutral = ml_score(cell)
        return PreparedCell(
            cell=cell,
            s=expert_score(cell).s,
            m=m,
            ml_neutral=neutral,
            exclusion=apply_exclusions(cell, policy),
        )

    if threads <= 1 or len(cells) < 2:
        return [prepare(c) for c in cells]
    # warm the compartment cache serially so workers only read it
    for cell in cells:
        ml_score(cell)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(prepare, cells))


def record_for(prepared: PreparedCell, alpha: float) -> SuitabilityRecord:
    if prepared.exclusion.excluded:
        x = 0.0
    else:
        x = fuse(prepared.s, prepared.m, alpha)
    return SuitabilityRecord(
        grid_id=prepared.cell.grid_id,
        s=prepared.s,
        m=prepared.m,
        x=x,
        suitability=classify(x, prepared.exclusion.excluded),
        exclusion=prepared.exclusion,
    )


# ---------------------------------------------------------------------------
# Landscape-level operations
# ---------------------------------------------------------------------------

def score_all(
    cells: Sequence[GridCell],
    model: GbdtModel,
    compartments: Sequence[Compartment],
    config: FusionConfig = FusionConfig(),
    threads: int = 1,
) -> list[SuitabilityRecord]:
    prepared = prepare_cells(cells, model, compartments, config.exclusion_policy, threads=threads)
    return [record_for(pc, config.alpha) for pc in prepared]


def distribution_of(records: Sequence[SuitabilityRecord]) -> ClassDistribution:
    return distribution_of_classes([r.suitability for r in records])


def distribution_of_classes(classes: Sequence[SuitabilityClass]) -> ClassDistribution:
    if not classes:
        raise ValidationError("cannot form a class distribution over zero cells")
    total = len(classes)
    counts = {cls: 0 for cls in CLASS_ORDER}
    for c in classes:
        counts[c] += 1
    return ClassDistribution(
        largely_unsuitable_pct=100.0 * counts[SuitabilityClass.LARGELY_UNSUITABLE] / total,
        low_pct=100.0 * counts[SuitabilityClass.LOW] / total,
        medium_pct=100.0 * counts[SuitabilityClass.MEDIUM] / total,
        high_pct=100.0 * counts[SuitabilityClass.HIGH] / total,
    )


def sweep_prepared(
    prepared: Sequence[PreparedCell], alphas: Sequence[float] = DEFAULT_SWEEP_ALPHAS
) -> list[tuple[float, ClassDistribution]]:
    rows = []
    for alpha in alphas:
        classes = [record_for(pc, alpha).suitability for pc in prepared]
        rows.append((alpha, distribution_of_classes(classes)))
    return rows


def sweep_weights(
    cells: Sequence[GridCell],
    model: GbdtModel,
    compartments: Sequence[Compartment],
    alphas: Sequence[float] = DEFAULT_SWEEP_ALPHAS,
    policy: ExclusionPolicy = DEFAULT_POLICY,
    threads: int = 1,
) -> list[tuple[float, ClassDistribution]]:
    prepared = prepare_cells(cells, model, compartments, policy, threads=threads)
    return sweep_prepared(prepared, alphas)


def l1_distance(a: ClassDistribution, b: ClassDistribution) -> float:
    return sum(abs(x - y) for x, y in zip(a.as_tuple(), b.as_tuple()))


def tune_weight(
    sweep_rows: Sequence[tuple[float, ClassDistribution]], reference: ClassDistribution
) -> float:
    """Alpha whose class shares sit closest (L1) to the reference.

    Equidistant rows resolve to the larger alpha: when the data cannot
    distinguish, lean on the expert rules.
    """
    if not sweep_rows:
        raise ValidationError("empty sweep")
    best_alpha: Optional[float] = None
    best_dist = 0.0
    for alpha, dist in sweep_rows:
        d = l1_distance(dist, reference)
        if best_alpha is None or d < best_dist or (d == best_dist and alpha > best_alpha):
            best_alpha, best_dist = alpha, d
    return best_alpha


# ---------------------------------------------------------------------------
# CSV formats
# ---------------------------------------------------------------------------

SCORES_HEADER = ["grid_id", "s", "m", "x", "class", "exclusion_reasons"]
SWEEP_HEADER = ["alpha", "largely_unsuitable_pct", "low_pct", "medium_pct", "high_pct"]


def save_scores(records: Sequence[SuitabilityRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SCORES_HEADER)
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


def load_scores(path: str | Path) -> list[SuitabilityRecord]:
    records = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != SCORES_HEADER:
            raise ValidationError(f"scores csv header mismatch: got {header}")
        for row_num, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(SCORES_HEADER):
                raise ValidationError(f"scores csv row {row_num}: expected 6 fields")
            reasons = tuple(p for p in row[5].split("|") if p)
            records.append(
                SuitabilityRecord(
                    grid_id=int(row[0]),
                    s=float(row[1]),
                    m=float(row[2]),
                    x=float(row[3]),
                    suitability=SuitabilityClass(row[4]),
                    exclusion=ExclusionResult(excluded=bool(reasons), reasons=reasons),
                )
            )
    return records


def save_sweep(rows: Sequence[tuple[float, ClassDistribution]], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_HEADER)
        for alpha, dist in rows:
            writer.writerow([repr(alpha)] + [repr(v) for v in dist.as_tuple()])


def load_sweep(path: str | Path) -> list[tuple[float, ClassDistribution]]:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != SWEEP_HEADER:
            raise ValidationError(f"sweep csv header mismatch: got {header}")
        for row in reader:
            if not row:
                continue
            rows.append(
                (
                    float(row[0]),
                    ClassDistribution(
                        largely_unsuitable_pct=float(row[1]),
                        low_pct=float(row[2]),
                        medium_pct=float(row[3]),
                        high_pct=float(row[4]),
                    ),
                )
            )
    return rows
