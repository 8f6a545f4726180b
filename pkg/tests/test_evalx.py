import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from emgpipe.errors import (EmptyMatrix, LabelOutOfRange, LengthMismatch,
                            TooFew, TooFewReps)
from emgpipe.evalx import (ConfusionMatrix, bench_stage, confusion, metrics,
                           shuffle_split)


class TestShuffleSplit:
    def test_sizes_round_half_up(self):
        for n, want_train in ((10, 8), (11, 9), (12, 10), (13, 10), (97, 78)):
            s = shuffle_split(n, 0.8, seed=0)
            assert len(s.train) == want_train
            assert len(s.test) == n - want_train

    def test_partition(self):
        s = shuffle_split(50, 0.8, seed=3)
        both = np.concatenate([s.train, s.test])
        assert sorted(both.tolist()) == list(range(50))

    def test_deterministic_and_seed_sensitive(self):
        a = shuffle_split(40, 0.8, seed=5)
        b = shuffle_split(40, 0.8, seed=5)
        c = shuffle_split(40, 0.8, seed=6)
        np.testing.assert_array_equal(a.train, b.train)
        assert not np.array_equal(a.train, c.train)

    def test_actually_shuffles(self):
        s = shuffle_split(100, 0.8, seed=0)
        assert not np.array_equal(s.train, np.arange(80))

    def test_too_few(self):
        with pytest.raises(TooFew):
            shuffle_split(4, 0.8, seed=0)
        shuffle_split(5, 0.8, seed=0)


class TestConfusion:
    def test_matches_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            y_true = rng.integers(0, 8, 60)
            y_pred = rng.integers(0, 8, 60)
            cm = confusion(y_true, y_pred, 8)
            want = oracles.confusion(y_true, y_pred, 8)
            np.testing.assert_array_equal(cm.counts, want)

    def test_total_and_orientation(self):
        cm = confusion([0, 0, 1], [0, 1, 1], 2)
        assert cm.total == 3
        # rows are truth, columns are prediction
        assert cm.counts[0, 1] == 1
        assert cm.counts[1, 0] == 0

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            confusion([0, 1], [0], 2)

    def test_label_out_of_range(self):
        with pytest.raises(LabelOutOfRange):
            confusion([0, 2], [0, 1], 2)
        with pytest.raises(LabelOutOfRange):
            confusion([0, 1], [-1, 1], 2)


class TestMetrics:
    def test_worked_example(self):
        # TP=8, FP=2, FN=4 in a 2-class layout
        counts = np.array([[8, 4], [2, 86]])
        rep = metrics(ConfusionMatrix(counts=counts))
        p0, r0, f0 = rep.per_class[0]
        assert p0 == pytest.approx(0.8)
        assert r0 == pytest.approx(8 / 12)
        assert f0 == pytest.approx(8 / 11)

    def test_matches_oracle_random(self):
        rng = np.random.default_rng(1)
        for _ in range(30):
            y_true = rng.integers(0, 5, 80)
            y_pred = rng.integers(0, 5, 80)
            cm = confusion(y_true, y_pred, 5)
            rep = metrics(cm)
            acc, mp, mr, mf, per = oracles.metrics(cm.counts.tolist())
            assert rep.accuracy == pytest.approx(acc, abs=1e-12)
            assert rep.macro_precision == pytest.approx(mp, abs=1e-12)
            assert rep.macro_recall == pytest.approx(mr, abs=1e-12)
            assert rep.macro_f1 == pytest.approx(mf, abs=1e-12)
            for got, want in zip(rep.per_class, per):
                assert got == pytest.approx(want, abs=1e-12)

    def test_perfect_prediction(self):
        y = np.arange(8).repeat(3)
        rep = metrics(confusion(y, y, 8))
        assert rep.accuracy == 1.0
        assert rep.macro_f1 == 1.0

    def test_absent_class_scores_zero(self):
        # class 2 never occurs and is never predicted
        cm = confusion([0, 1, 0, 1], [0, 1, 1, 1], 3)
        rep = metrics(cm)
        p2, r2, f2 = rep.per_class[2]
        assert (p2, r2, f2) == (0.0, 0.0, 0.0)

    def test_empty_matrix(self):
        with pytest.raises(EmptyMatrix):
            metrics(ConfusionMatrix(counts=np.zeros((3, 3), dtype=np.int64)))

    @given(st.integers(0, 10_000))
    @settings(max_examples=40, deadline=None)
    def test_bounds(self, seed):
        rng = np.random.default_rng(seed)
        y_true = rng.integers(0, 4, 30)
        y_pred = rng.integers(0, 4, 30)
        rep = metrics(confusion(y_true, y_pred, 4))
        for v in (rep.accuracy, rep.macro_precision, rep.macro_recall,
                  rep.macro_f1):
            assert 0.0 <= v <= 1.0


class TestBenchStage:
    def test_basic_timing(self):
        calls = []

        def stage():
            calls.append(1)
            time.sleep(0.002)
            return 42

        rep = bench_stage(stage, reps=6, warmup=2, name="sleepy")
        assert rep.stage == "sleepy"
        assert rep.repetitions == 6
        assert len(calls) == 8
        assert rep.mean_ms >= 2.0
        assert rep.std_ms >= 0.0

    def test_std_is_sample_std(self):
        # capture per-rep durations indirectly: a constant-time stage has
        # small spread, and ddof=1 requires at least the 5-rep floor
        rep = bench_stage(lambda: None, reps=5)
        assert rep.std_ms == rep.std_ms  # not NaN

    def test_too_few_reps(self):
        with pytest.raises(TooFewReps):
            bench_stage(lambda: None, reps=4)

    def test_no_warmup_by_default(self):
        calls = []
        bench_stage(lambda: calls.append(1), reps=5)
        assert len(calls) == 5
