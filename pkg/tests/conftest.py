import pathlib

import pytest

from plantsite.config import RunConfig
from plantsite.fusion import prepare_cells, record_for
from plantsite.landscape.synth import synthesize_landscape
from plantsite.landscape.types import Region
from plantsite.loss_model import labeled_pairs, split_train_test, train

# The golden run: everything the end-to-end fixture files were generated from.
GOLDEN_SEED = 42
GOLDEN_REGION = Region(0.0, 0.0, 5300.0, 2650.0)
GOLDEN_COMPARTMENTS = 24
GOLDEN_VILLAGES = 6
GOLDEN_PROFILE = "separable-loss"

DATA_DIR = pathlib.Path(__file__).parent / "data"
GOLDEN_SCORES_CSV = DATA_DIR / "golden_scores.csv"
GOLDEN_SWEEP_CSV = DATA_DIR / "golden_sweep.csv"


@pytest.fixture(scope="session")
def golden_landscape():
    return synthesize_landscape(
        seed=GOLDEN_SEED,
        region=GOLDEN_REGION,
        n_compartments=GOLDEN_COMPARTMENTS,
        n_villages=GOLDEN_VILLAGES,
        profile=GOLDEN_PROFILE,
    )


@pytest.fixture(scope="session")
def golden_model(golden_landscape):
    # mirrors the train subcommand so fixtures match the golden CSVs
    config = RunConfig()
    pairs = labeled_pairs(golden_landscape.compartments)
    train_rows, _ = split_train_test(pairs, seed=config.seed)
    return train(train_rows, config.gbdt_config(), seed=config.seed)


@pytest.fixture(scope="session")
def golden_prepared(golden_landscape, golden_model):
    return prepare_cells(
        golden_landscape.cells, golden_model, golden_landscape.compartments
    )


@pytest.fixture(scope="session")
def golden_records(golden_prepared):
    return [record_for(p, 0.9) for p in golden_prepared]
