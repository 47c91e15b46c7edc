import math
import random
from collections import Counter

import pytest

from plantsite.landscape.types import FEATURE_NAMES, ValidationError
from plantsite.loss_model import (
    NEUTRAL_ML_SCORE,
    GbdtConfig,
    evaluate,
    grid_ml_score,
    label_compartments,
    labeled_pairs,
    load_model,
    model_from_json,
    model_to_json,
    predict_proba,
    save_model,
    split_train_test,
    train,
)

from helpers import FEATURE_DEFAULTS, build_cell, build_compartment, build_features

GRAZING_IDX = FEATURE_NAMES.index("grazing_density")


def separable_rows(n, low=1.0, high=5.0):
    """n compartments, half losing cover, separable on grazing_density alone."""
    rows = []
    for i in range(n):
        label = 1 if i >= n // 2 else 0
        grazing = (high if label else low) + 0.01 * i
        rows.append((build_compartment(compartment_id=i, grazing_density=grazing), label))
    return rows


def constant_model(labels, **config_kwargs):
    """Zero-round model: predicts the prevalence of `labels` for every row."""
    rows = [(build_compartment(compartment_id=i), y) for i, y in enumerate(labels)]
    return train(rows, GbdtConfig(n_rounds=0, **config_kwargs), seed=0)


class TestLabels:
    def test_label_rule(self):
        lost = build_compartment(compartment_id=1, fc_2015_ha=90.0, fc_2003_ha=100.0)
        flat = build_compartment(compartment_id=2, fc_2015_ha=100.0, fc_2003_ha=100.0)
        gained = build_compartment(compartment_id=3, fc_2015_ha=80.0, fc_2003_ha=50.0)
        labels = label_compartments([lost, flat, gained])
        assert [(l.compartment_id, l.label) for l in labels] == [(1, 1), (2, 0), (3, 0)]

    def test_missing_recent_cover(self):
        comp = build_compartment(compartment_id=7, fc_2015_ha=None)
        with pytest.raises(ValidationError, match="compartment 7: fc_2015_ha missing"):
            label_compartments([comp])

    def test_labeled_pairs_align(self):
        comps = [
            build_compartment(compartment_id=1, fc_2015_ha=90.0, fc_2003_ha=100.0),
            build_compartment(compartment_id=2, fc_2015_ha=300.0, fc_2003_ha=100.0),
        ]
        pairs = labeled_pairs(comps)
        assert pairs[0] == (comps[0], 1)
        assert pairs[1] == (comps[1], 0)


class TestSplit:
    def test_sizes(self):
        train_set, test_set = split_train_test(list(range(10)), seed=0)
        assert len(train_set) == 8 and len(test_set) == 2

    def test_sizes_large(self):
        train_set, test_set = split_train_test(list(range(16674)), seed=0)
        assert len(train_set) == 13339 and len(test_set) == 3335

    def test_deterministic(self):
        rows = list(range(50))
        assert split_train_test(rows, seed=5) == split_train_test(rows, seed=5)

    def test_multiset_preserved(self):
        rows = list(range(30))
        train_set, test_set = split_train_test(rows, seed=9)
        assert Counter(train_set) + Counter(test_set) == Counter(rows)

    def test_too_few(self):
        with pytest.raises(ValidationError, match="need at least 5 labeled compartments, got 4"):
            split_train_test(list(range(4)), seed=0)


class TestConfig:
    def test_defaults(self):
        config = GbdtConfig()
        assert config.n_rounds == 100
        assert config.max_depth == 4
        assert config.learning_rate == 0.1
        assert config.min_leaf == 5
        assert config.feature_subsample == 1.0

    @pytest.mark.parametrize("kwargs", [
        {"n_rounds": -1}, {"max_depth": 0}, {"min_leaf": 0},
    ])
    def test_bad_counts(self, kwargs):
        with pytest.raises(ValidationError, match="n_rounds >= 0"):
            GbdtConfig(**kwargs)

    def test_bad_learning_rate(self):
        with pytest.raises(ValidationError, match="learning_rate 0.0 out of"):
            GbdtConfig(learning_rate=0.0)
        with pytest.raises(ValidationError, match="learning_rate 1.5 out of"):
            GbdtConfig(learning_rate=1.5)

    def test_bad_subsample(self):
        with pytest.raises(ValidationError, match="feature_subsample 0.0 out of"):
            GbdtConfig(feature_subsample=0.0)


class TestTrain:
    def test_empty(self):
        with pytest.raises(ValidationError, match="empty training set"):
            train([], GbdtConfig(n_rounds=0))

    def test_single_class(self):
        rows = [(build_compartment(compartment_id=i), 0) for i in range(6)]
        with pytest.raises(ValidationError, match="single class; cannot fit log-odds"):
            train(rows, GbdtConfig(n_rounds=0))

    def test_stump_recovers_split(self):
        rows = [
            (build_compartment(compartment_id=0, grazing_density=1.0), 0),
            (build_compartment(compartment_id=1, grazing_density=1.1), 0),
            (build_compartment(compartment_id=2, grazing_density=1.2), 0),
            (build_compartment(compartment_id=3, grazing_density=5.0), 1),
            (build_compartment(compartment_id=4, grazing_density=5.1), 1),
            (build_compartment(compartment_id=5, grazing_density=5.2), 1),
        ]
        model = train(rows, GbdtConfig(n_rounds=1, max_depth=1, min_leaf=1), seed=0)
        assert model.base_score == 0.0
        assert len(model.trees) == 1
        root = model.trees[0].nodes[0]
        assert root.feature == GRAZING_IDX
        # midpoint between the closest values across the gap
        assert root.threshold == (1.2 + 5.0) / 2.0
        # balanced labels: p=0.5 everywhere, so leaves are +-0.5*3 / (0.25*3)
        assert model.trees[0].nodes[root.left].leaf_value == -2.0
        assert model.trees[0].nodes[root.right].leaf_value == 2.0

    def test_row_order_invariance(self):
        rows = separable_rows(20)
        shuffled = list(rows)
        random.Random(3).shuffle(shuffled)
        config = GbdtConfig(n_rounds=5, min_leaf=2)
        assert train(rows, config, seed=0) == train(shuffled, config, seed=0)

    def test_same_seed_same_model_under_subsample(self):
        rows = separable_rows(20)
        config = GbdtConfig(n_rounds=5, min_leaf=2, feature_subsample=0.5)
        assert train(rows, config, seed=4) == train(rows, config, seed=4)

    def test_loss_history(self):
        rows = separable_rows(20)
        model = train(rows, GbdtConfig(n_rounds=30, min_leaf=2), seed=0)
        history = model.train_loss_history
        assert len(history) == 31
        # balanced prevalence: base raw score 0 puts the initial loss at ln 2
        assert history[0] == pytest.approx(math.log(2.0))
        assert all(b <= a for a, b in zip(history, history[1:]))
        assert history[-1] < 0.1

    def test_zero_rounds_predicts_prevalence(self):
        model = constant_model([1, 0, 0, 0])
        assert predict_proba(model, build_features()) == pytest.approx(0.25)


class TestSerialization:
    def test_round_trip_equals(self, tmp_path):
        model = train(separable_rows(20), GbdtConfig(n_rounds=5, min_leaf=2), seed=0)
        text = model_to_json(model)
        assert text.endswith("\n")
        loaded = model_from_json(text)
        assert loaded == model
        assert model_to_json(loaded) == text

    def test_file_round_trip(self, tmp_path):
        model = train(separable_rows(20), GbdtConfig(n_rounds=3, min_leaf=2), seed=0)
        path = tmp_path / "model.json"
        save_model(model, path)
        assert load_model(path) == model

    def test_history_not_serialized(self):
        model = train(separable_rows(20), GbdtConfig(n_rounds=2, min_leaf=2), seed=0)
        loaded = model_from_json(model_to_json(model))
        assert loaded.train_loss_history == ()

    def test_wrong_feature_names(self):
        model = constant_model([1, 0, 0, 0])
        text = model_to_json(model).replace('"grazing_density"', '"goat_density"')
        with pytest.raises(ValidationError, match="feature names do not match"):
            model_from_json(text)


class TestEvaluate:
    def test_constant_positive(self):
        # prevalence 0.7 > threshold: every prediction is positive
        model = constant_model([1, 1, 1, 1, 1, 1, 1, 0, 0, 0])
        test_rows = [
            (build_compartment(compartment_id=100 + i), 1 if i < 3 else 0) for i in range(10)
        ]
        report = evaluate(model, test_rows)
        assert report.tp == 3 and report.fp == 7 and report.tn == 0 and report.fn == 0
        assert report.precision == 0.3
        assert report.recall == 1.0
        assert report.precision_defined and report.recall_defined

    def test_constant_negative(self):
        model = constant_model([1, 0, 0, 0, 0])
        test_rows = [(build_compartment(compartment_id=200 + i), i % 2) for i in range(4)]
        report = evaluate(model, test_rows)
        assert report.tp == 0 and report.fp == 0
        assert report.precision == 0.0 and not report.precision_defined
        assert report.recall == 0.0 and report.recall_defined

    def test_threshold_shifts_cut(self):
        model = constant_model([1, 0, 0, 0, 0])  # predicts 0.2
        test_rows = [(build_compartment(compartment_id=300), 1)]
        assert evaluate(model, test_rows, threshold=0.2).tp == 1
        assert evaluate(model, test_rows, threshold=0.5).tp == 0

    def test_empty(self):
        model = constant_model([1, 0, 0, 0])
        with pytest.raises(ValidationError, match="empty test set"):
            evaluate(model, [])


class TestGridScore:
    def test_from_compartment_probability(self):
        model = constant_model([1, 0, 0, 0])
        comp = build_compartment(compartment_id=5)
        cell = build_cell(compartment_id=5)
        score, neutral = grid_ml_score(cell, model, [comp])
        assert score == pytest.approx(75.0, rel=1e-12)
        assert not neutral

    def test_neutral_without_compartment(self):
        model = constant_model([1, 0, 0, 0])
        score, neutral = grid_ml_score(build_cell(), model, [])
        assert score == NEUTRAL_ML_SCORE == 50.0
        assert neutral

    def test_unknown_compartment(self):
        model = constant_model([1, 0, 0, 0])
        cell = build_cell(grid_id=4, compartment_id=99)
        with pytest.raises(ValidationError, match="cell 4: unknown compartment 99"):
            grid_ml_score(cell, model, [build_compartment(compartment_id=1)])

    def test_same_compartment_same_score(self):
        model = constant_model([1, 0, 0, 0])
        comp = build_compartment(compartment_id=5)
        a = grid_ml_score(build_cell(grid_id=0, compartment_id=5), model, [comp])
        b = grid_ml_score(build_cell(grid_id=9, compartment_id=5), model, [comp])
        assert a == b


class TestPredictProba:
    def test_mapping_input_matches_features(self):
        model = train(separable_rows(20), GbdtConfig(n_rounds=3, min_leaf=2), seed=0)
        features = build_features(grazing_density=4.2)
        mapping = dict(FEATURE_DEFAULTS, grazing_density=4.2)
        assert predict_proba(model, mapping) == predict_proba(model, features)

    def test_probability_range(self):
        model = train(separable_rows(20), GbdtConfig(n_rounds=10, min_leaf=2), seed=0)
        for grazing in (0.5, 3.0, 8.0):
            p = predict_proba(model, build_features(grazing_density=grazing))
            assert 0.0 < p < 1.0
