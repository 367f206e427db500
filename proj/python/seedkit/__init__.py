"""Python bindings for the seedkit reconstruction-evaluation toolkit."""

import json as _json

from ._core import (
    ParseError,
    SeedkitError,
    UndefinedError,
    ValidationError,
    bootstrap_delta,
    correlation_distance,
    cosine_similarity,
    human_scores,
    icc_2k,
    kendall_tau_b,
    load_ratings,
    object_recall_precision,
    pairwise_accuracy,
    parse_ratings,
    pearson,
    pixcorr,
    relaxed_recall,
    seed_score,
    ssim,
    two_way_identification,
    version,
)
from ._core import run as _run

__version__ = version()


def run(subcommand, **options):
    """Run a CLI subcommand in-process.

    Keyword names follow the CLI flags with dashes replaced by underscores,
    e.g. ``run("score", detections="d.jsonl", metrics="seed")``. Returns a
    ``(files, summary)`` tuple where ``files`` maps output names to contents.
    """
    config = {k.replace("_", "-"): v for k, v in options.items()}
    return _run(subcommand, _json.dumps(config))
