"""
Synthetic heart-rate corpus: clipped AR(1) around a resting rate plus
ramped tachycardia episodes, converted to R-peak times.
"""

import logging
from pathlib import Path
from typing import List, Tuple

import numpy as np
import pandas as pd

from src.ingest.heart_rate import hr_to_peaks
from src.ingest.peak_loader import write_peak_files
from src.ingest.schemas import HR_MAX, HR_MIN
from src.synth.schemas import Episode, SyntheticCorpus, SyntheticSpec

logger = logging.getLogger(__name__)

EPISODES_FILE = "episodes.csv"
RESTING_RANGE = (50.0, 95.0)


def episode_profile(episode: Episode, length: int) -> np.ndarray:
    """Elevation (bpm) contributed by one episode over a record of ``length`` seconds."""
    t = np.arange(length, dtype=np.float64) - episode.start
    ramp = max(episode.ramp_seconds, 1)
    rise = np.clip(t / ramp, 0.0, 1.0) if episode.ramp_seconds else (t >= 0).astype(np.float64)
    fall_start = episode.plateau_seconds + episode.ramp_seconds
    fall = np.clip(1.0 - (t - fall_start) / ramp, 0.0, 1.0) if episode.ramp_seconds \
        else (t < fall_start).astype(np.float64)
    return episode.amplitude * np.minimum(rise, fall) * (t >= 0)


def _sample_episodes(spec: SyntheticSpec, record_id: str, rng: np.random.Generator) -> List[Episode]:
    expected = spec.episode_rate * spec.record_seconds / 3600.0
    n = int(rng.poisson(expected)) if spec.episode_amplitude > 0 else 0
    episodes = []
    for _ in range(n):
        plateau = int(rng.integers(spec.episode_min_seconds, spec.episode_max_seconds + 1))
        span = plateau + 2 * spec.ramp_seconds
        if span >= spec.record_seconds:
            continue
        start = int(rng.integers(0, spec.record_seconds - span))
        amplitude = float(rng.uniform(0.75, 1.25) * spec.episode_amplitude)
        episodes.append(Episode(record_id, start, plateau, spec.ramp_seconds, amplitude))
    return sorted(episodes, key=lambda e: e.start)


def simulate_record(spec: SyntheticSpec, index: int) -> Tuple[str, np.ndarray, List[Episode]]:
    """
    Per-second HR of record ``index``; its generator is seeded from (seed, index).

    Returns:
        (record_id, hr, episodes)
    """
    record_id = f"syn{index:03d}"
    rng = np.random.default_rng([spec.seed, index])
    resting = float(np.clip(rng.normal(spec.base_hr, spec.base_hr_spread), *RESTING_RANGE))

    innovations = rng.normal(0.0, spec.noise_std, size=spec.record_seconds)
    deviation = np.empty(spec.record_seconds)
    stationary_std = spec.noise_std / np.sqrt(1.0 - spec.ar_coef ** 2)
    deviation[0] = rng.normal(0.0, stationary_std) if spec.noise_std else 0.0
    for t in range(1, spec.record_seconds):
        deviation[t] = spec.ar_coef * deviation[t - 1] + innovations[t]

    episodes = _sample_episodes(spec, record_id, rng)
    elevation = np.zeros(spec.record_seconds)
    for episode in episodes:
        elevation = np.maximum(elevation, episode_profile(episode, spec.record_seconds))

    hr = np.clip(resting + deviation + elevation, HR_MIN, HR_MAX)
    return record_id, hr, episodes


def generate_corpus(spec: SyntheticSpec) -> SyntheticCorpus:
    """Simulate every record; equal specs give identical corpora."""
    corpus = SyntheticCorpus(spec=spec)
    for index in range(spec.n_records):
        record_id, hr, episodes = simulate_record(spec, index)
        corpus.hr[record_id] = hr
        corpus.peaks[record_id] = hr_to_peaks(hr)
        corpus.episodes.extend(episodes)
    logger.info(f"Simulated {spec.n_records} records x {spec.record_seconds}s "
                f"with {len(corpus.episodes)} tachycardia episodes (seed={spec.seed})")
    return corpus


def write_corpus(corpus: SyntheticCorpus, out_dir: Path) -> Path:
    """
    Write peak files, the manifest and ``episodes.csv``.

    Returns:
        Path of the manifest CSV
    """
    manifest = write_peak_files(corpus.peaks, out_dir)
    rows = [
        {"record_id": e.record_id, "start": e.start, "end": e.end,
         "plateau_seconds": e.plateau_seconds, "amplitude": e.amplitude}
        for e in corpus.episodes
    ]
    columns = ["record_id", "start", "end", "plateau_seconds", "amplitude"]
    pd.DataFrame(rows, columns=columns).to_csv(Path(out_dir) / EPISODES_FILE, index=False, float_format="%.6f")
    with open(Path(out_dir) / "synthetic_spec.json", "w", encoding="utf-8") as f:
        f.write(corpus.spec.model_dump_json(indent=2))
    return manifest
