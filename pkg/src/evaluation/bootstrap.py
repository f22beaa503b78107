"""
Record-grouped percentile bootstrap.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional

import numpy as np

from src.evaluation.schemas import MetricEstimate, PredictionSet
from src.utils.errors import CIUndefined, ContractViolation, MetricUndefined

logger = logging.getLogger(__name__)

MetricFn = Callable[[PredictionSet], float]


def _safe(metric_fn: MetricFn, predictions: PredictionSet) -> Optional[float]:
    try:
        value = float(metric_fn(predictions))
    except MetricUndefined:
        return None
    return value if math.isfinite(value) else None


def draw_indices(predictions: PredictionSet, seed: int, draw: int) -> np.ndarray:
    """Example indices of bootstrap draw ``draw``: |records| record ids sampled with replacement."""
    groups = predictions.groups
    ids = list(groups)
    rng = np.random.default_rng([seed, draw])
    picks = rng.integers(0, len(ids), size=len(ids))
    return np.concatenate([groups[ids[k]] for k in picks])


def grouped_bootstrap(predictions: PredictionSet, metric_fn: MetricFn, n_bootstrap: int = 1000,
                      seed: int = 0, metric: str = "", workers: int = 1) -> MetricEstimate:
    """
    Percentile CI of ``metric_fn`` under resampling of record ids.

    Draw ``b`` uses its own generator seeded from ``(seed, b)``, so results do
    not depend on ``workers``. Draws where the metric is undefined are skipped;
    the interval is the 2.5th/97.5th percentile (linear interpolation) of the
    valid draws.

    Args:
        predictions: Per-example predictions with record ids
        metric_fn: Maps a PredictionSet to a float, raising MetricUndefined when undefined
        n_bootstrap: Number of draws B
        seed: Bootstrap seed
        metric: Name stored on the returned estimate
        workers: Threads used for the draws

    Returns:
        MetricEstimate with point, ci_low, ci_high and the count of valid draws

    Raises:
        MetricUndefined: the metric is undefined on the full set
        CIUndefined: every draw is undefined
    """
    if len(predictions) == 0 or not predictions.groups:
        raise ContractViolation("grouped_bootstrap needs at least one record")
    if n_bootstrap < 1:
        raise ContractViolation(f"n_bootstrap must be >= 1, got {n_bootstrap}")

    point = float(metric_fn(predictions))

    def one_draw(b: int) -> Optional[float]:
        return _safe(metric_fn, predictions.take(draw_indices(predictions, seed, b)))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(one_draw, range(n_bootstrap)))
    else:
        values = [one_draw(b) for b in range(n_bootstrap)]

    valid = np.array([v for v in values if v is not None], dtype=np.float64)
    n_skipped = n_bootstrap - valid.size
    if valid.size == 0:
        raise CIUndefined(f"{metric or 'metric'}: all {n_bootstrap} bootstrap draws are undefined")
    if n_skipped:
        logger.debug(f"{metric or 'metric'}: skipped {n_skipped}/{n_bootstrap} undefined bootstrap draws")

    ci_low, ci_high = np.percentile(valid, [2.5, 97.5])
    return MetricEstimate(
        metric=metric,
        point=point,
        ci_low=float(ci_low),
        ci_high=float(ci_high),
        n_valid_draws=int(valid.size),
        n_bootstrap=n_bootstrap,
    )


def estimate(predictions: PredictionSet, metric_fn: MetricFn, metric: str,
             n_bootstrap: int = 1000, seed: int = 0, workers: int = 1) -> MetricEstimate:
    """``grouped_bootstrap`` that records an undefined metric as missing instead of raising."""
    try:
        return grouped_bootstrap(predictions, metric_fn, n_bootstrap, seed, metric, workers)
    except MetricUndefined as exc:
        logger.info(f"{metric} undefined: {exc}")
        return MetricEstimate(metric=metric, n_bootstrap=n_bootstrap)
    except CIUndefined as exc:
        logger.warning(str(exc))
        return MetricEstimate(metric=metric, point=_safe(metric_fn, predictions), n_bootstrap=n_bootstrap)
