"""Python bindings for the reqgrid C++ core."""

from ._reqgrid import (  # noqa: F401
    apply_label_variation,
    apply_text_variation,
    chi_square_sf,
    cosine,
    f1_score,
    friedman_test,
    group_wf1,
    mock_embed,
    mock_score,
    partition_groups,
    pattern_ids,
    predict_inference,
    rank_rows,
    render_prompt,
    score_predictions,
    sigmoid,
    softmax,
    weighted_mean,
    wilcoxon_signed_rank,
)

__all__ = [
    "apply_label_variation",
    "apply_text_variation",
    "chi_square_sf",
    "cosine",
    "f1_score",
    "friedman_test",
    "group_wf1",
    "mock_embed",
    "mock_score",
    "partition_groups",
    "pattern_ids",
    "predict_inference",
    "rank_rows",
    "render_prompt",
    "score_predictions",
    "sigmoid",
    "softmax",
    "weighted_mean",
    "wilcoxon_signed_rank",
]
