"""Landscape domain model: grid cells, compartments, villages, plus I/O and synthesis."""

from .io import (
    Landscape,
    load_compartments,
    load_grids,
    load_landscape,
    load_landscape_dir,
    load_villages,
    save_compartments,
    save_grids,
    save_landscape,
    save_villages,
)
from .synth import PROFILES, separable_loss_rule, synthesize_landscape
from .types import (
    COVER_CLASSES,
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

__all__ = [
    "COVER_CLASSES",
    "FEATURE_NAMES",
    "LANDUSE_FLAGS",
    "PROFILES",
    "SNAPSHOT_YEARS",
    "Compartment",
    "CompartmentFeatures",
    "CoverSnapshot",
    "GridCell",
    "Landscape",
    "Region",
    "Soil",
    "Terrain",
    "ValidationError",
    "Village",
    "load_compartments",
    "load_grids",
    "load_landscape",
    "load_landscape_dir",
    "load_villages",
    "save_compartments",
    "save_grids",
    "save_landscape",
    "save_villages",
    "separable_loss_rule",
    "synthesize_landscape",
]
