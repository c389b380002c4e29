"""Aggregate ranked annotations into plausibility posteriors and score
predictions with uncertainty-adjusted metrics."""

from ._core import (
    PartialRanking,
    RunConfig,
    UaevalError,
    annotation_certainty,
    dirichlet_from_counts,
    gibbs_run,
    irn_aggregate,
    loo_agreement,
    mean_average_overlap,
    pl_log_likelihood,
    pl_log_prob,
    prirn_sample,
    risk_metrics,
    run,
    score_threshold_certainty,
    selfcheck,
    top1_label,
    ua_average_overlap,
    ua_set_accuracy,
    ua_topk_accuracy,
)

__all__ = [
    "PartialRanking",
    "RunConfig",
    "UaevalError",
    "annotation_certainty",
    "dirichlet_from_counts",
    "gibbs_run",
    "irn_aggregate",
    "loo_agreement",
    "mean_average_overlap",
    "pl_log_likelihood",
    "pl_log_prob",
    "prirn_sample",
    "risk_metrics",
    "run",
    "score_threshold_certainty",
    "selfcheck",
    "top1_label",
    "ua_average_overlap",
    "ua_set_accuracy",
    "ua_topk_accuracy",
]
