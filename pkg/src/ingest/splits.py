"""
Record-level train/validation/test splits with a positive-record stratifier.
"""

import logging
from typing import List, Mapping, Sequence, Tuple

import numpy as np

from src.ingest.schemas import SPLIT_NAMES, SplitAssignment
from src.utils.errors import ContractViolation, SplitInfeasible

logger = logging.getLogger(__name__)


def _apportion(n: int, ratios: Sequence[float]) -> List[int]:
    """Largest-remainder apportionment of n items; ties go to the earlier split."""
    quotas = [n * r for r in ratios]
    counts = [int(np.floor(q)) for q in quotas]
    order = sorted(range(len(ratios)), key=lambda k: (-(quotas[k] - counts[k]), k))
    for k in order[:n - sum(counts)]:
        counts[k] += 1
    return counts


def _fill_empty(counts: List[int], minimum: int = 1) -> List[int]:
    """Move single items from the largest bucket into buckets below ``minimum``."""
    counts = list(counts)
    for k in range(len(counts)):
        while counts[k] < minimum:
            donor = max(range(len(counts)), key=lambda j: (counts[j], -j))
            if counts[donor] <= minimum:
                break
            counts[donor] -= 1
            counts[k] += 1
    return counts


def split_records(records: Mapping[str, bool], ratios: Tuple[float, float, float] = (0.70, 0.15, 0.15),
                  seed: int = 0) -> SplitAssignment:
    """
    Assign records to train/val/test, stratified on record positivity.

    Positive and negative records are shuffled separately with a generator
    seeded by ``seed`` and apportioned by ``ratios``. With three or more
    positive records every split receives at least one; every split always
    receives at least one record.

    Args:
        records: record_id -> True if the record has any positive window
        ratios: (train, val, test) fractions summing to 1
        seed: Shuffle seed

    Returns:
        SplitAssignment covering every record exactly once

    Raises:
        SplitInfeasible: fewer than three records
    """
    if len(ratios) != 3 or abs(sum(ratios) - 1.0) > 1e-9 or min(ratios) < 0:
        raise ContractViolation(f"split ratios must be three non-negative numbers summing to 1, got {ratios}")
    if len(records) < 3:
        raise SplitInfeasible(f"need at least 3 records to split, got {len(records)}")

    rng = np.random.default_rng(seed)
    positives = sorted(r for r, flag in records.items() if flag)
    negatives = sorted(r for r, flag in records.items() if not flag)
    positives = [positives[i] for i in rng.permutation(len(positives))]
    negatives = [negatives[i] for i in rng.permutation(len(negatives))]

    pos_counts = _apportion(len(positives), ratios)
    if len(positives) >= 3:
        pos_counts = _fill_empty(pos_counts)
    neg_counts = _apportion(len(negatives), ratios)

    # Every split needs at least one record; prefer moving negatives.
    for k in range(3):
        if pos_counts[k] + neg_counts[k] > 0:
            continue
        donor = max(range(3), key=lambda j: (neg_counts[j], -j))
        if neg_counts[donor] > 1 or (neg_counts[donor] == 1 and pos_counts[donor] > 0):
            neg_counts[donor] -= 1
            neg_counts[k] += 1
        else:
            donor = max(range(3), key=lambda j: (pos_counts[j], -j))
            pos_counts[donor] -= 1
            pos_counts[k] += 1

    assignment = {}
    for pool, counts in ((positives, pos_counts), (negatives, neg_counts)):
        cursor = 0
        for name, count in zip(SPLIT_NAMES, counts):
            for record_id in pool[cursor:cursor + count]:
                assignment[record_id] = name
            cursor += count

    result = SplitAssignment(assignment=assignment)
    for name in SPLIT_NAMES:
        members = result.records(name)
        n_pos = sum(1 for r in members if records[r])
        logger.info(f"Split {name}: {len(members)} records ({n_pos} positive)")
    return result
