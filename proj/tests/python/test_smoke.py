"""Smoke tests for the pybind11 module."""

import math
import os
import sys

import pytest

module_dir = os.environ.get("REQGRID_MODULE_DIR")
if module_dir:
    sys.path.insert(0, module_dir)

rq = pytest.importorskip("_reqgrid")


def test_sigmoid_softmax_cosine():
    assert rq.sigmoid(0.0) == pytest.approx(0.5)
    assert rq.sigmoid(math.log(3.0)) == pytest.approx(0.75)
    probs = rq.softmax([math.log(1), math.log(2), math.log(3)])
    assert probs == pytest.approx([1 / 6, 1 / 3, 1 / 2])
    assert rq.cosine([1, 1], [1, 0]) == pytest.approx(1 / math.sqrt(2))


def test_predict_inference_binary():
    out = rq.predict_inference("binary", ["pos", "neg"], [0.0, -math.log(3.0)], 0)
    assert out["predicted"] == "pos"
    assert out["probabilities"][0] == pytest.approx(0.75)


def test_metrics_roundtrip():
    report = rq.score_predictions(["A", "B", "B"], ["A", "A", "B"], ["A", "B"])
    assert report["per_class"]["A"]["P"] == pytest.approx(1.0)
    assert report["per_class"]["B"]["R"] == pytest.approx(1.0)
    assert report["wF1"] == pytest.approx((2 / 3 * 2 + 2 / 3) / 3)
    assert rq.f1_score(0.5916, 0.2246) == pytest.approx(0.3256, abs=5e-5)
    assert rq.weighted_mean([0.3256, 0.7716], [187, 323]) == pytest.approx(0.6081, abs=5e-4)


def test_stats():
    res = rq.friedman_test([[0.1, 0.2, 0.3], [0.2, 0.5, 0.6], [0.3, 0.4, 0.9]])
    assert res["statistic"] == pytest.approx(6.0)
    assert res["p_value"] == pytest.approx(math.exp(-3.0), abs=1e-8)
    assert res["df"] == 2

    w = rq.wilcoxon_signed_rank([1, 2, 3, 4, 5], [0.5, 1.5, 2.4, 3.2, 4.1])
    assert w["statistic"] == 0.0
    assert w["p_value"] == pytest.approx(0.0625)

    assert rq.partition_groups(10) == [4, 3, 3]
    with pytest.raises(Exception):
        rq.partition_groups(5)

    assert rq.chi_square_sf(6.0, 2) == pytest.approx(math.exp(-3.0), abs=1e-8)


def test_group_wf1():
    golds = ["A", "A", "B", "B", "A", "B", "B"]
    preds = ["A", "B", "B", "B", "A", "B", "A"]
    scores = rq.group_wf1(preds, golds, [4, 3], ["A", "B"])
    assert scores == pytest.approx([11 / 15, 2 / 3])


def test_prompts_and_variations():
    assert len(rq.pattern_ids()) == 6
    r = rq.render_prompt("is-about-assertion", "The UI shall be simple", "usability")
    assert r["context"].endswith("is about ")
    assert r["continuation"] == "usability."
    assert r["answer_mode"] == "span"

    qa = rq.render_prompt("belongs-to-qa", "The UI shall be simple", "usability")
    assert qa["continuation"] == "Yes"
    assert "belong to usability?" in qa["context"]

    assert (
        rq.apply_text_variation("The system shall respond, quickly.", "punct-strip")
        == "The system shall respond quickly"
    )
    assert rq.apply_label_variation("look & feel", "label-capitalized") == "Look & Feel"


def test_mock_backend_functions():
    score = rq.mock_score("The system shall encrypt records", "sec.")
    assert score >= 1.0
    assert score == rq.mock_score("The system shall encrypt records", "sec.")

    vec = rq.mock_embed("alpha beta gamma", 128)
    assert len(vec) == 128
    assert sum(c * c for c in vec) == pytest.approx(1.0)
