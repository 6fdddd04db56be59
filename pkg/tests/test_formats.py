import json

import numpy as np
import pytest

from fairsample.errors import FormatError
from fairsample.formats import (
    behavior_from_json,
    behavior_to_json,
    model_from_json,
    model_to_json,
)
from fairsample.lhv import postselect, pr_box
from fairsample.sampling import child_rng, random_lhv_model


def test_behavior_round_trip_exact():
    original = pr_box()
    obj = behavior_to_json(original)
    assert obj["format_version"] == 1
    assert isinstance(obj["probabilities"][0][0][0][0], str)
    loaded = behavior_from_json(json.loads(json.dumps(obj)))
    assert np.array_equal(loaded.tensor, original.tensor)


def test_behavior_normalization_revalidated():
    obj = behavior_to_json(pr_box())
    obj["probabilities"][0][0][0][0] = "0.9"
    with pytest.raises(FormatError):
        behavior_from_json(obj)


def test_behavior_negative_rejected():
    obj = behavior_to_json(pr_box())
    obj["probabilities"][0][0][0][0] = "-0.5"
    obj["probabilities"][0][0][0][1] = "1.0"
    with pytest.raises(FormatError):
        behavior_from_json(obj)


def test_behavior_shape_checked():
    obj = behavior_to_json(pr_box())
    obj["probabilities"] = obj["probabilities"][0]
    with pytest.raises(FormatError):
        behavior_from_json(obj)


def test_version_and_kind_checked():
    obj = behavior_to_json(pr_box())
    bad = dict(obj, format_version=2)
    with pytest.raises(FormatError):
        behavior_from_json(bad)
    bad = dict(obj, kind="lhv")
    with pytest.raises(FormatError):
        behavior_from_json(bad)


def test_model_round_trip():
    model = random_lhv_model(child_rng(61, 0), n_lambda=3)
    obj = model_to_json(model)
    loaded, joint = model_from_json(json.loads(json.dumps(obj)))
    assert joint is None
    assert np.array_equal(loaded.weights, model.weights)
    for a, b in zip(loaded.responses, model.responses):
        assert np.array_equal(a, b)


def test_model_with_postselection_table():
    model = random_lhv_model(child_rng(61, 1), n_lambda=2)
    k_table = np.full((2, 2, 2, 2, 2), 0.5)
    k_table[:, :, :, 0, 0] = 1.0
    obj = model_to_json(model, k_table=k_table)
    loaded, joint = model_from_json(obj)
    assert joint is not None
    direct = joint.k_tensor()
    assert np.array_equal(direct, k_table)
    behavior = postselect(joint)
    assert behavior.normalization_defect() <= 1e-12


def test_model_weight_tolerance_revalidated():
    model = random_lhv_model(child_rng(61, 2), n_lambda=2)
    obj = model_to_json(model)
    obj["lambda_weights"] = ["0.6", "0.6"]
    with pytest.raises(FormatError):
        model_from_json(obj)


def test_malformed_probability_strings():
    obj = behavior_to_json(pr_box())
    obj["probabilities"][0][0][0][0] = "zero point five"
    with pytest.raises(FormatError):
        behavior_from_json(obj)
