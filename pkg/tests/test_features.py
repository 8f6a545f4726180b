import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from emgpipe.dsp import SampleSeries, segment_windows
from emgpipe.errors import (EmptySpectrum, LabelOutOfRange, LengthMismatch,
                            TooShort)
from emgpipe.features import (FREQ_FEATURE_NAMES, TIME_FEATURE_NAMES,
                              assemble_feature_vector, feature_names,
                              freq_features, time_features, welch_psd)


def _series(samples, rate=1000.0, channel="fds"):
    return SampleSeries(np.asarray(samples, dtype=np.float64), rate, channel)


def _rand(n, seed, scale=40.0):
    return np.random.default_rng(seed).normal(0.0, scale, n)


class TestTimeFeatures:
    def test_square_wave_worked_example(self):
        f = time_features(_series([1.0, -1.0, 1.0, -1.0]))
        assert f.iemg == pytest.approx(4.0)
        assert f.mav == pytest.approx(1.0)
        assert f.rms == pytest.approx(1.0)
        assert f.wl == pytest.approx(6.0)
        assert f.zc == 3
        assert f.var == pytest.approx(4.0 / 3.0)
        assert f.iasd == pytest.approx(8.0)
        assert f.iatd == pytest.approx(8.0)

    def test_matches_oracle(self):
        for seed in range(20):
            x = _rand(64, seed)
            got = time_features(_series(x))
            want = oracles.time_features(x)
            for name in TIME_FEATURE_NAMES:
                assert getattr(got, name) == pytest.approx(
                    want[name], rel=1e-12, abs=1e-12), name

    def test_variance_is_uncentered(self):
        x = np.array([10.0, 10.0, 10.0, 10.0])
        f = time_features(_series(x))
        assert f.var == pytest.approx(400.0 / 3.0)

    def test_exponential_clamp(self):
        # values far past the clamp still give finite sums
        x = np.array([1e9, -1e9, 1e9, -1e9])
        f = time_features(_series(x))
        assert f.ieav == pytest.approx(4 * math.exp(30.0))
        assert f.ie == pytest.approx(2 * math.exp(30.0) + 2 * math.exp(-30.0))

    def test_too_short(self):
        with pytest.raises(TooShort):
            time_features(_series([1.0, 2.0, 3.0]))

    def test_accepts_window(self):
        s = _series(_rand(100, 30))
        w = segment_windows(s, 50, 0.0)[1]
        got = time_features(w)
        want = time_features(_series(s.samples[50:]))
        assert got.rms == want.rms

    @given(st.integers(0, 1000))
    @settings(max_examples=30, deadline=None)
    def test_scale_equivariance(self, seed):
        x = _rand(32, seed, scale=0.5)
        a = time_features(_series(x))
        b = time_features(_series(2.0 * x))
        assert b.iemg == pytest.approx(2.0 * a.iemg)
        assert b.mav == pytest.approx(2.0 * a.mav)
        assert b.rms == pytest.approx(2.0 * a.rms)
        assert b.wl == pytest.approx(2.0 * a.wl)
        assert b.var == pytest.approx(4.0 * a.var)
        assert b.zc == a.zc


class TestWelchPsd:
    def test_segment_geometry(self):
        pg = welch_psd(_series(_rand(1000, 40)), 1000.0)
        # 90% segments, 10% hop: two of them; rfft bins of a 900 window
        assert pg.freqs_hz.shape == (451,)
        assert pg.psd.shape == (451,)
        assert pg.bin_width_hz == pytest.approx(1000.0 / 900.0)
        assert pg.freqs_hz[0] == 0.0
        assert pg.freqs_hz[-1] == pytest.approx(450 * 1000.0 / 900.0)

    def test_single_tone_lands_on_exact_bin(self):
        n = 1000
        rate = 1000.0
        t = np.arange(n) / rate
        for hz in (10.0, 50.0, 100.0, 200.0, 450.0):
            pg = welch_psd(_series(np.sin(2 * np.pi * hz * t)), rate)
            peak = int(np.argmax(pg.psd))
            assert pg.freqs_hz[peak] == pytest.approx(hz)

    def test_parseval_on_white_noise(self):
        x = _rand(1000, 41, scale=3.0)
        pg = welch_psd(_series(x), 1000.0)
        total = float(np.sum(pg.psd))
        mean_sq = float(np.mean(x ** 2))
        assert abs(total - mean_sq) / mean_sq < 0.05

    def test_psd_nonnegative(self):
        pg = welch_psd(_series(_rand(500, 42)), 1000.0)
        assert np.all(pg.psd >= 0.0)

    def test_too_short(self):
        with pytest.raises(TooShort):
            welch_psd(_series(_rand(31, 43)), 1000.0)

    def test_deterministic(self):
        x = _rand(600, 44)
        a = welch_psd(_series(x), 1000.0)
        b = welch_psd(_series(x), 1000.0)
        np.testing.assert_array_equal(a.psd, b.psd)


class TestFreqFeatures:
    def _pg(self, n, seed):
        return welch_psd(_series(_rand(n, seed)), 1000.0)

    def test_matches_oracle(self):
        for seed in range(20):
            pg = self._pg(200 + 10 * seed, seed)
            got = freq_features(pg)
            want = oracles.freq_features(pg.freqs_hz, pg.psd)
            for name in FREQ_FEATURE_NAMES:
                assert getattr(got, name) == pytest.approx(
                    want[name], rel=1e-12, abs=1e-12), name

    def test_tone_centric_values(self):
        t = np.arange(1000) / 1000.0
        pg = welch_psd(_series(100.0 * np.sin(2 * np.pi * 100.0 * t)), 1000.0)
        f = freq_features(pg)
        assert f.pf == pytest.approx(100.0)
        assert f.mdf == pytest.approx(100.0, abs=2 * pg.bin_width_hz)
        assert f.mf == pytest.approx(100.0, abs=5.0)
        # all the power sits in the 20-250 band
        assert f.fr > 1e3

    def test_median_before_edge(self):
        pg = self._pg(640, 45)
        f = freq_features(pg)
        assert f.mdf <= f.sef
        assert 0.0 <= f.se <= math.log2(pg.psd.size) + 1e-9
        assert f.tp == pytest.approx(float(np.sum(pg.psd)))

    def test_snr_flat_spectrum(self):
        from emgpipe.features import Periodogram
        pg = Periodogram(freqs_hz=np.arange(10.0), psd=np.ones(10),
                         bin_width_hz=1.0)
        f = freq_features(pg)
        # every bin is signal; empty noise set falls back to total / eps
        assert f.snr == pytest.approx(10.0 / 1e-12)

    def test_empty_spectrum_rejected(self):
        from emgpipe.features import Periodogram
        pg = Periodogram(freqs_hz=np.arange(5.0), psd=np.zeros(5),
                         bin_width_hz=1.0)
        with pytest.raises(EmptySpectrum):
            freq_features(pg)


class TestAssemble:
    def test_default_width_and_order(self):
        fds = _series(_rand(200, 46), channel="fds")
        edc = _series(_rand(200, 47), channel="edc")
        fv = assemble_feature_vector(fds, edc, 1000.0, 3)
        names = feature_names()
        assert fv.values.shape == (36,)
        assert len(names) == 36
        assert names[0] == "fds_iemg"
        assert names[18] == "edc_iemg"
        # first half is the fds channel: check one against direct calls
        tf = time_features(fds)
        assert fv.values[0] == pytest.approx(tf.iemg)
        assert fv.values[18] == pytest.approx(time_features(edc).iemg)
        assert fv.label == 3
        assert fv.window_ms == pytest.approx(200.0)

    def test_duplicate_ie_flag(self):
        fds = _series(_rand(100, 48))
        edc = _series(_rand(100, 49))
        fv = assemble_feature_vector(fds, edc, 1000.0, 0,
                                     include_duplicate_ie=True)
        names = feature_names(include_duplicate_ie=True)
        assert fv.values.shape == (38,)
        assert "fds_ie" in names and "edc_ie" in names
        assert names.index("fds_ie") == names.index("fds_ieav") + 1

    def test_names_match_values_everywhere(self):
        fds = _series(_rand(300, 50))
        edc = _series(_rand(300, 51))
        fv = assemble_feature_vector(fds, edc, 1000.0, 7)
        names = feature_names()
        ff = freq_features(welch_psd(edc, 1000.0))
        assert fv.values[names.index("edc_mdf")] == pytest.approx(ff.mdf)
        assert fv.values[names.index("edc_snr")] == pytest.approx(ff.snr)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            assemble_feature_vector(_series(_rand(100, 52)),
                                    _series(_rand(99, 53)), 1000.0, 0)

    def test_label_out_of_range(self):
        fds = _series(_rand(64, 54))
        edc = _series(_rand(64, 55))
        for bad in (-1, 8):
            with pytest.raises(LabelOutOfRange):
                assemble_feature_vector(fds, edc, 1000.0, bad)

    def test_all_finite(self):
        for seed in range(5):
            fv = assemble_feature_vector(_series(_rand(250, seed)),
                                         _series(_rand(250, seed + 100)),
                                         1000.0, 1)
            assert np.all(np.isfinite(fv.values))
