"""
Tests for R-peak ingestion: HR derivation, windowing, the threshold guard,
record splits, standardization and the prepared-dataset files.
"""

import numpy as np
import pytest

from src.ingest.dataset import standardize
from src.ingest.heart_rate import derive_hr, hr_to_peaks
from src.ingest.peak_loader import (
    PeakLoader,
    read_prepared,
    read_sidecar,
    write_peak_files,
    write_prepared,
)
from src.ingest.schemas import HrSeries, PreparedSidecar, RPeakRecord, SplitAssignment, StandardizationStats
from src.ingest.splits import split_records
from src.ingest.windows import build_windows, count_positives, select_threshold
from src.utils.errors import (
    ConfigError,
    ContractViolation,
    DegenerateScale,
    EmptySignal,
    GuardUnsatisfied,
    MissingSplit,
    NoRecords,
    SplitInfeasible,
)


class TestDeriveHr:
    """Per-second heart rate from RR intervals."""

    def test_hand_example(self):
        series = derive_hr(RPeakRecord("a", np.array([10.0, 10.5, 11.0, 12.0])))
        assert series.start_second == 10
        np.testing.assert_allclose(series.hr, [120.0, 60.0])

    def test_upper_clip(self):
        series = derive_hr(RPeakRecord("fast", np.arange(0.0, 5.0, 0.25)))
        assert len(series) > 0
        np.testing.assert_array_equal(series.hr, 220.0)

    def test_lower_clip(self):
        series = derive_hr(RPeakRecord("slow", np.array([0.0, 4.0, 8.0])))
        assert len(series) == 8
        np.testing.assert_array_equal(series.hr, 20.0)

    def test_fewer_than_two_peaks(self):
        with pytest.raises(EmptySignal):
            derive_hr(RPeakRecord("one", np.array([3.0])))

    def test_non_increasing_peaks_rejected(self):
        with pytest.raises(ValueError):
            RPeakRecord("bad", np.array([1.0, 1.0, 2.0]))

    def test_random_peaks_stay_in_range(self, rng):
        peaks = np.cumsum(rng.uniform(0.1, 4.0, size=500))
        series = derive_hr(RPeakRecord("r", peaks))
        assert series.hr.min() >= 20.0
        assert series.hr.max() <= 220.0

    def test_round_trip_recovers_hr(self):
        """HR -> peaks -> HR within 1 bpm for a slowly varying 40-180 bpm trace."""
        t = np.arange(1200, dtype=np.float64)
        hr = 110.0 + 70.0 * np.sin(2.0 * np.pi * t / 600.0)
        series = derive_hr(RPeakRecord("rt", hr_to_peaks(hr)))
        assert series.start_second == 0
        assert len(series) >= hr.size
        np.testing.assert_allclose(series.hr[:hr.size], hr, atol=1.0)

    def test_round_trip_exact_above_60(self, rng):
        hr = rng.uniform(60.0, 180.0, size=300)
        series = derive_hr(RPeakRecord("rt", hr_to_peaks(hr)))
        np.testing.assert_allclose(series.hr[:hr.size], hr, rtol=1e-9)


class TestBuildWindows:
    """Non-overlapping contexts and horizon labels."""

    def test_two_windows_from_140_samples(self, constant_series):
        windows = build_windows(constant_series(110.0, 140), theta=100.0)
        assert [w.start_index for w in windows] == [0, 60]
        assert all(w.cls_label == 1 for w in windows)
        assert all(w.fc_target == 110.0 for w in windows)
        assert all(w.context.shape == (60,) for w in windows)

    def test_one_negative_window(self, constant_series):
        windows = build_windows(constant_series(80.0, 70), theta=100.0)
        assert len(windows) == 1
        assert windows[0].cls_label == 0
        assert windows[0].fc_target == 80.0

    def test_too_short(self, constant_series):
        assert build_windows(constant_series(80.0, 69), theta=100.0) == []

    def test_label_uses_horizon_mean(self):
        hr = np.concatenate([np.full(60, 70.0), np.full(5, 120.0), np.full(5, 79.0)])
        (window,) = build_windows(HrSeries("r", hr), theta=100.0)
        # horizon mean 99.5 < 100
        assert window.cls_label == 0
        assert window.fc_target == 120.0
        (window,) = build_windows(HrSeries("r", hr), theta=95.0)
        assert window.cls_label == 1

    def test_theta_outside_candidates(self, constant_series):
        with pytest.raises(ContractViolation):
            build_windows(constant_series(80.0, 200), theta=97.0)


def _guard_corpus():
    """theta=100: 2 records / 10 windows; theta=95: 4 records / 50 windows (T=1, H=1)."""
    strong = [70.0] + [105.0] * 5
    mild = [70.0] + [97.0] * 20
    return [
        HrSeries("s0", np.array(strong)),
        HrSeries("s1", np.array(strong)),
        HrSeries("m0", np.array(mild)),
        HrSeries("m1", np.array(mild)),
    ]


class TestSelectThreshold:
    """Positive-support guard over the candidate thresholds."""

    def test_counts_by_enumeration(self):
        corpus = _guard_corpus()
        at_100 = count_positives(corpus, 100.0, T=1, H=1)
        at_95 = count_positives(corpus, 95.0, T=1, H=1)
        assert (at_100["n_positive_records"], at_100["n_positive_windows"]) == (2, 10)
        assert (at_95["n_positive_records"], at_95["n_positive_windows"]) == (4, 50)

    def test_falls_back_to_95(self):
        result = select_threshold(_guard_corpus(), T=1, H=1)
        assert result.theta == 95.0
        assert result.n_positive_records == 4
        assert result.n_positive_windows == 50

    def test_first_candidate_when_satisfied(self, constant_series):
        corpus = [constant_series(110.0, 800, f"r{k}") for k in range(4)]
        result = select_threshold(corpus)
        assert result.theta == 100.0
        assert result.n_positive_windows == 4 * 13

    def test_all_60_bpm_unsatisfied(self, constant_series):
        with pytest.raises(GuardUnsatisfied) as info:
            select_threshold([constant_series(60.0, 600)])
        assert info.value.best_theta == 100.0
        assert info.value.n_positive_windows == 0
        assert info.value.exit_code == 2

    def test_counts_monotone_in_theta(self, rng):
        corpus = [HrSeries(f"r{k}", rng.uniform(60.0, 130.0, size=400)) for k in range(5)]
        counts = [count_positives(corpus, theta)["n_positive_windows"] for theta in (100.0, 95.0, 90.0, 85.0)]
        assert counts == sorted(counts)


class TestSplitRecords:
    """Record-level stratified splits."""

    def test_ten_records_three_positive(self):
        records = {f"r{k}": k < 3 for k in range(10)}
        split = split_records(records, (0.7, 0.15, 0.15), seed=0)
        for name in ("train", "val", "test"):
            assert sum(records[r] for r in split.records(name)) == 1

    def test_three_positive_records(self):
        records = {"a": True, "b": True, "c": True}
        split = split_records(records, (0.34, 0.33, 0.33), seed=0)
        assert [len(split.records(n)) for n in ("train", "val", "test")] == [1, 1, 1]

    def test_deterministic(self):
        records = {f"r{k}": k % 4 == 0 for k in range(17)}
        assert split_records(records, seed=5).assignment == split_records(records, seed=5).assignment

    def test_disjoint_and_complete(self):
        records = {f"r{k}": k % 3 == 0 for k in range(23)}
        split = split_records(records, seed=1)
        members = [r for n in ("train", "val", "test") for r in split.records(n)]
        assert sorted(members) == sorted(records)
        assert all(split.records(n) for n in ("train", "val", "test"))

    def test_too_few_records(self):
        with pytest.raises(SplitInfeasible):
            split_records({"a": True, "b": False})

    def test_bad_ratios(self):
        with pytest.raises(ContractViolation):
            split_records({"a": True, "b": False, "c": False}, (0.5, 0.5, 0.5))


class TestStandardize:
    """Train-split statistics applied to every split."""

    def _windows(self, window_factory):
        return [
            window_factory("a", [60.0, 80.0], fc_target=80.0),
            window_factory("b", [80.0, 60.0], fc_target=70.0),
            window_factory("c", [100.0, 100.0], fc_target=100.0),
        ]

    def test_two_point_statistics(self, window_factory):
        split = SplitAssignment(assignment={"a": "train", "b": "train", "c": "test"})
        dataset, stats = standardize(self._windows(window_factory), split)
        assert stats.mu == pytest.approx(70.0)
        assert stats.sigma == pytest.approx(10.0)
        assert stats.transform(80.0) == pytest.approx(1.0)

        train = dataset.split("train")
        np.testing.assert_allclose(train.x_tilde, [[-1.0, 1.0], [1.0, -1.0]])
        np.testing.assert_allclose(train.residual, train.y_tilde - train.x_tilde[:, -1])
        np.testing.assert_allclose(dataset.split("test").x_tilde, [[3.0, 3.0]])

    def test_residual_definition(self):
        stats = StandardizationStats(mu=70.0, sigma=10.0)
        x_T, y = stats.transform(75.0), stats.transform(77.0)
        assert y - x_T == pytest.approx(0.2)

    def test_inverse(self):
        stats = StandardizationStats(mu=70.0, sigma=10.0)
        assert stats.inverse(1.0) == pytest.approx(80.0)
        assert stats.inverse(0.3) == pytest.approx(73.0)
        assert stats.inverse_scale(0.5) == pytest.approx(5.0)

    def test_constant_train_data(self, window_factory):
        windows = [window_factory("a", [70.0, 70.0]), window_factory("b", [90.0, 95.0])]
        split = SplitAssignment(assignment={"a": "train", "b": "val"})
        with pytest.raises(DegenerateScale):
            standardize(windows, split)

    def test_split_access_is_logged(self, window_factory):
        split = SplitAssignment(assignment={"a": "train", "b": "train", "c": "val"})
        dataset, _ = standardize(self._windows(window_factory), split)
        dataset.split("train")
        assert dataset.touched("train")
        assert not dataset.touched("test")
        with pytest.raises(MissingSplit):
            dataset.split("test")

    def test_one_step_diff_std(self, window_factory):
        split = SplitAssignment(assignment={"a": "train", "b": "train", "c": "test"})
        dataset, _ = standardize(self._windows(window_factory), split)
        # train diffs: 80-80 = 0 and 70-60 = 10
        assert dataset.one_step_diff_std() == pytest.approx(5.0)


class TestPeakFiles:
    """R-peak inputs and prepared dataset files."""

    def test_manifest_round_trip(self, tmp_path):
        peaks = {"r1": np.array([0.5, 1.25, 2.0]), "r2": np.array([0.0, 0.8, 1.6, 2.4])}
        manifest = write_peak_files(peaks, tmp_path)
        loaded = PeakLoader(manifest).load()
        assert list(loaded) == ["r1", "r2"]
        for record_id, times in peaks.items():
            np.testing.assert_allclose(loaded[record_id], times)

    def test_long_table(self, tmp_path):
        path = tmp_path / "peaks.csv"
        path.write_text("record_id,peak_time\n100,0.0\n100,0.9\n101,0.2\n101,1.0\n101,1.7\n")
        loaded = PeakLoader(path).load()
        assert set(loaded) == {"100", "101"}
        np.testing.assert_allclose(loaded["101"], [0.2, 1.0, 1.7])

    def test_exclusions(self, tmp_path):
        manifest = write_peak_files({"a": np.array([0.0, 1.0]), "b": np.array([0.0, 1.0])}, tmp_path)
        assert list(PeakLoader(manifest, exclude=["a"]).load()) == ["b"]

    def test_empty_manifest(self, tmp_path):
        path = tmp_path / "manifest.csv"
        path.write_text("record_id,path\n")
        with pytest.raises(NoRecords, match="no records"):
            PeakLoader(path).load()

    def test_zero_byte_manifest(self, tmp_path):
        path = tmp_path / "manifest.csv"
        path.write_bytes(b"")
        with pytest.raises(NoRecords) as excinfo:
            PeakLoader(path).load()
        assert excinfo.value.exit_code == 2

    def test_missing_input(self, tmp_path):
        with pytest.raises(ConfigError):
            PeakLoader(tmp_path / "absent.csv")

    def test_prepared_round_trip(self, tmp_path, window_factory):
        windows = [
            window_factory("a", [61.25, 80.5, 77.0], cls_label=1, fc_target=81.0),
            window_factory("b", [80.0, 60.0, 65.5], fc_target=66.0, start_index=3),
            window_factory("c", [90.0, 91.0, 92.0], fc_target=93.0),
        ]
        split = SplitAssignment(assignment={"a": "train", "b": "val", "c": "test"})
        _, stats = standardize(windows, split)
        sidecar = PreparedSidecar(mu=stats.mu, sigma=stats.sigma, theta=100.0, T=3, H=10,
                                  split=split.assignment, n_windows=3, fc_diff_std=2.5)
        write_prepared(tmp_path, windows, sidecar)

        dataset = read_prepared(tmp_path)
        assert list(dataset.record_id) == ["a", "b", "c"]
        np.testing.assert_array_equal(dataset.context[0], [61.25, 80.5, 77.0])
        np.testing.assert_array_equal(dataset.cls_label, [1, 0, 0])
        assert dataset.stats.mu == stats.mu
        assert dataset.split("val").start_index.tolist() == [3]
        assert read_sidecar(tmp_path).fc_diff_std == 2.5

    def test_prepared_missing(self, tmp_path):
        with pytest.raises(ConfigError):
            read_prepared(tmp_path)
