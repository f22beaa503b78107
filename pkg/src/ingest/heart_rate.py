"""
Per-second heart rate from R-peak times.
"""

import logging
import math

import numpy as np

from src.ingest.schemas import HR_MAX, HR_MIN, HrSeries, RPeakRecord
from src.utils.errors import EmptySignal

logger = logging.getLogger(__name__)


def derive_hr(record: RPeakRecord) -> HrSeries:
    """
    Convert R-peak times into a 1 Hz heart-rate series.

    Every integer second t with t_0 <= t < t_last takes the rate of the RR
    interval [t_i, t_{i+1}) containing it, 60 / (t_{i+1} - t_i), clipped to
    [20, 220] bpm. Seconds before the first peak or at/after the last peak
    are not covered by any interval and are omitted.

    Args:
        record: R-peak times of one record

    Returns:
        HrSeries whose index 0 corresponds to second ceil(t_0)

    Raises:
        EmptySignal: fewer than two peaks
    """
    peaks = record.peak_times
    if peaks.size < 2:
        raise EmptySignal(f"record {record.record_id!r} has {peaks.size} R-peak(s); need at least 2")

    first = math.ceil(peaks[0])
    last = peaks[-1]
    seconds = np.arange(first, math.ceil(last), dtype=np.float64)
    seconds = seconds[seconds < last]
    if seconds.size == 0:
        logger.debug(f"Record {record.record_id}: no whole second inside peak coverage")
        return HrSeries(record_id=record.record_id, hr=np.empty(0), start_second=first)

    rr = np.diff(peaks)
    interval = np.searchsorted(peaks, seconds, side="right") - 1
    hr = np.clip(60.0 / rr[interval], HR_MIN, HR_MAX)
    return HrSeries(record_id=record.record_id, hr=hr, start_second=int(first))


def hr_to_peaks(hr: np.ndarray, start_time: float = 0.0) -> np.ndarray:
    """
    Inverse of ``derive_hr`` for simulation: lay beats down second by second.

    A beat at time b is followed by one 60 / hr[ceil(b)] seconds later, so the
    interval covering an integer second carries that second's rate (exactly
    whenever the rate is at least 60 bpm).

    Args:
        hr: Per-second heart rate in bpm
        start_time: Time of the first beat (seconds)

    Returns:
        Strictly increasing peak times covering [start_time, start_time + len(hr)]
    """
    hr = np.asarray(hr, dtype=np.float64)
    peaks = [start_time]
    t = start_time
    end = start_time + hr.size
    while t < end:
        second = min(int(math.ceil(t - start_time)), hr.size - 1)
        t = t + 60.0 / hr[second]
        peaks.append(t)
    return np.asarray(peaks)
