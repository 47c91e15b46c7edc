"""Run configuration: a flat `key = value` text file shared by CLI and service.

Unknown keys are rejected so typos fail loudly instead of silently falling
back to defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from .exclusion import ExclusionPolicy
from .fusion import DEFAULT_ALPHA, FusionConfig
from .landscape.types import ValidationError
from .loss_model import GbdtConfig


@dataclass(frozen=True)
class RunConfig:
    alpha: float = DEFAULT_ALPHA
    treeline_m: float = 3800.0
    blank_threshold_pct: float = 5.0
    vdf_threshold: float = 70.0
    scrub_threshold: float = 50.0
    resource_threshold: int = 3
    seed: int = 42
    n_rounds: int = 100
    max_depth: int = 4
    learning_rate: float = 0.1
    min_leaf: int = 5
    feature_subsample: float = 1.0

    def exclusion_policy(self) -> ExclusionPolicy:
        return ExclusionPolicy(
            treeline_m=self.treeline_m,
            blank_threshold_pct=self.blank_threshold_pct,
            vdf_threshold=self.vdf_threshold,
            scrub_threshold=self.scrub_threshold,
            resource_threshold=self.resource_threshold,
        )

    def fusion_config(self) -> FusionConfig:
        return FusionConfig(alpha=self.alpha, exclusion_policy=self.exclusion_policy())

    def gbdt_config(self) -> GbdtConfig:
        return GbdtConfig(
            n_rounds=self.n_rounds,
            max_depth=self.max_depth,
            learning_rate=self.learning_rate,
            min_leaf=self.min_leaf,
            feature_subsample=self.feature_subsample,
        )


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}
_INT_KEYS = {"resource_threshold", "seed", "n_rounds", "max_depth", "min_leaf"}


def parse_config_text(text: str) -> dict:
    """`key = value` lines into typed values; '#' starts a comment."""
    values: dict = {}
    for line_num, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"config line {line_num}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _FIELD_TYPES:
            raise ValidationError(f"config line {line_num}: unknown key {key!r}")
        try:
            values[key] = int(value) if key in _INT_KEYS else float(value)
        except ValueError:
            raise ValidationError(
                f"config line {line_num}: bad value {value!r} for {key}"
            ) from None
    return values


def load_config(path: str | Path, overrides: dict | None = None) -> RunConfig:
    """Config file plus overrides (CLI flags); overrides win."""
    values = parse_config_text(Path(path).read_text()) if path is not None else {}
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return RunConfig(**values)
    except TypeError as exc:
        raise ValidationError(f"bad config: {exc}") from None


def default_config(overrides: dict | None = None) -> RunConfig:
    values = {k: v for k, v in (overrides or {}).items() if v is not None}
    return RunConfig(**values)
