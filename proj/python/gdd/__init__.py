"""Python bindings for the gdd group deception-detection library."""

import json

from ._gdd import (
    GameDataset,
    GddError,
    GddInputError,
    GmmModel,
    auc,
    classification_metrics,
    fisher_vector,
    fit_gmm,
    generate_synthetic,
    load_manifest,
    render_report,
    schedule_clips,
    validate_dataset,
)
from ._gdd import run_experiment as _run_experiment

__all__ = [
    "GameDataset",
    "GddError",
    "GddInputError",
    "GmmModel",
    "auc",
    "classification_metrics",
    "evaluate",
    "fisher_vector",
    "fit_gmm",
    "generate_synthetic",
    "load_manifest",
    "render_report",
    "schedule_clips",
    "validate_dataset",
]


def evaluate(dataset, folds=10, seed=0, jobs=1, ablate=False, config=None):
    """Cross-validate the full pipeline; returns the report as a dict."""
    config_json = json.dumps(config) if isinstance(config, dict) else config
    text = _run_experiment(dataset, folds, seed, jobs, ablate, config_json)
    return json.loads(text)
