"""Per-window feature extraction: ten time-domain measures and nine
spectral measures over a Welch periodogram, concatenated per channel
into fixed-order feature vectors.
"""

from dataclasses import dataclass

import numpy as np

from ._util import round_half_up
from .dsp import _as_samples
from .errors import EmptySpectrum, LabelOutOfRange, LengthMismatch, TooShort

EPS = 1e-12

# per-channel ordering; "ie" appears only when the duplicate flag is on
TIME_FEATURE_NAMES = ("iemg", "iasd", "iatd", "ieav", "ie",
                      "mav", "rms", "var", "zc", "wl")
FREQ_FEATURE_NAMES = ("mf", "mdf", "pf", "se", "tp", "mpf", "snr", "sef", "fr")

N_GESTURES = 8


@dataclass
class TimeFeatures:
    iemg: float
    iasd: float
    iatd: float
    ieav: float
    ie: float
    mav: float
    rms: float
    var: float
    zc: float
    wl: float


@dataclass
class Periodogram:
    freqs_hz: np.ndarray
    psd: np.ndarray
    bin_width_hz: float


@dataclass
class FreqFeatures:
    mf: float
    mdf: float
    pf: float
    se: float
    tp: float
    mpf: float
    snr: float
    sef: float
    fr: float


@dataclass
class FeatureVector:
    values: np.ndarray
    label: int
    subject: int = 0
    window_ms: float = 0.0


def time_features(window):
    """The ten time-domain features of one window.

    iemg  sum of absolute values
    iasd  sum of absolute second differences
    iatd  sum of absolute third differences
    ieav  sum of exp(|x|) with x rescaled to millivolts and clamped
    ie    sum of exp(x), same rescale and clamp, signed
    mav   mean absolute value
    rms   root mean square
    var   sum of squares over N-1 (uncentered)
    zc    count of strict sign changes between consecutive samples
    wl    waveform length, sum of absolute first differences
    """
    x = _as_samples(window)
    n = x.shape[0]
    if n < 4:
        raise TooShort("time features need at least 4 samples, got %d" % n)
    d1 = np.diff(x)
    d2 = np.diff(d1)
    d3 = np.diff(d2)
    x_mv = x / 1000.0
    abs_x = np.abs(x)
    return TimeFeatures(
        iemg=float(np.sum(abs_x)),
        iasd=float(np.sum(np.abs(d2))),
        iatd=float(np.sum(np.abs(d3))),
        ieav=float(np.sum(np.exp(np.minimum(np.abs(x_mv), 30.0)))),
        ie=float(np.sum(np.exp(np.clip(x_mv, -30.0, 30.0)))),
        mav=float(np.mean(abs_x)),
        rms=float(np.sqrt(np.mean(x * x))),
        var=float(np.sum(x * x) / (n - 1)),
        zc=float(np.count_nonzero(x[:-1] * x[1:] < 0.0)),
        wl=float(np.sum(np.abs(d1))),
    )


def welch_psd(window, rate_hz):
    """Averaged-segment power spectral density of one window.

    Segments are 90% of the window long with a hop of 10%, so adjacent
    segments overlap by 80% of the window and exactly two segments fit.
    Each is Hann-tapered; taper power is compensated so the one-sided
    psd sums to the mean squared value of the signal.
    """
    x = _as_samples(window)
    n = x.shape[0]
    if n < 32:
        raise TooShort("spectral estimate needs at least 32 samples, got %d" % n)
    seg_len = round_half_up(0.9 * n)
    hop = max(1, round_half_up(0.1 * n))
    taper = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(seg_len) / seg_len)
    power_corr = float(np.mean(taper * taper))
    n_bins = seg_len // 2 + 1
    acc = np.zeros(n_bins)
    n_segs = 0
    start = 0
    while start + seg_len <= n:
        coeffs = np.fft.rfft(x[start:start + seg_len] * taper)
        p = (coeffs.real * coeffs.real + coeffs.imag * coeffs.imag)
        p /= float(seg_len) * float(seg_len) * power_corr
        if seg_len % 2 == 0:
            p[1:-1] *= 2.0
        else:
            p[1:] *= 2.0
        acc += p
        n_segs += 1
        start += hop
    psd = acc / n_segs
    freqs = np.arange(n_bins) * (rate_hz / seg_len)
    return Periodogram(freqs_hz=freqs, psd=psd,
                       bin_width_hz=rate_hz / seg_len)


def freq_features(pg):
    """The nine spectral features of one periodogram.

    mf / mpf  power-weighted mean frequency (identical definitions)
    mdf       first frequency reaching half the cumulative power
    pf        frequency of the strongest bin, first bin on ties
    se        spectral entropy in bits of the normalized psd
    tp        total power
    snr       mean power of bins at or above 10% of the peak over the
              mean power of the bins below that floor
    sef       first frequency reaching 95% of the cumulative power
    fr        power in 20-250 Hz over power in 250 Hz-Nyquist
    """
    freqs = np.asarray(pg.freqs_hz, dtype=np.float64)
    psd = np.asarray(pg.psd, dtype=np.float64)
    total = float(np.sum(psd))
    if total <= 0.0:
        raise EmptySpectrum("periodogram has no power")
    mf = float(np.sum(freqs * psd) / total)
    cum = np.cumsum(psd)
    mdf = float(freqs[np.searchsorted(cum, 0.5 * total, side="left")])
    sef = float(freqs[np.searchsorted(cum, 0.95 * total, side="left")])
    pf = float(freqs[int(np.argmax(psd))])
    p_norm = psd / total
    nz = p_norm[p_norm > 0.0]
    se = float(-np.sum(nz * np.log2(nz)))
    peak = float(np.max(psd))
    floor = 0.1 * peak
    signal_bins = psd[psd >= floor]
    noise_bins = psd[psd < floor]
    if noise_bins.size > 0:
        snr = float(np.mean(signal_bins) / (np.mean(noise_bins) + EPS))
    else:
        snr = float(total / EPS)
    nyquist = float(freqs[-1])
    low = (freqs >= 20.0) & (freqs <= 250.0)
    high = (freqs >= 250.0) & (freqs <= nyquist)
    fr = float(np.sum(psd[low]) / (np.sum(psd[high]) + EPS))
    return FreqFeatures(mf=mf, mdf=mdf, pf=pf, se=se, tp=total,
                        mpf=mf, snr=snr, sef=sef, fr=fr)


def feature_names(include_duplicate_ie=False, channels=("fds", "edc")):
    """The documented, stable vector layout, as channel_feature strings."""
    time_names = [n for n in TIME_FEATURE_NAMES
                  if include_duplicate_ie or n != "ie"]
    names = []
    for ch in channels:
        for n in list(time_names) + list(FREQ_FEATURE_NAMES):
            names.append("%s_%s" % (ch, n))
    return names


def _channel_features(window, rate_hz, include_duplicate_ie):
    tf = time_features(window)
    ff = freq_features(welch_psd(window, rate_hz))
    vals = [tf.iemg, tf.iasd, tf.iatd, tf.ieav]
    if include_duplicate_ie:
        vals.append(tf.ie)
    vals += [tf.mav, tf.rms, tf.var, tf.zc, tf.wl,
             ff.mf, ff.mdf, ff.pf, ff.se, ff.tp, ff.mpf, ff.snr, ff.sef, ff.fr]
    return vals


def assemble_feature_vector(ch1, ch2, rate_hz, label, include_duplicate_ie=False):
    """Concatenated FDS-then-EDC features for one aligned window pair."""
    x1 = _as_samples(ch1)
    x2 = _as_samples(ch2)
    if x1.shape[0] != x2.shape[0]:
        raise LengthMismatch(
            "channel windows differ in length: %d vs %d"
            % (x1.shape[0], x2.shape[0]))
    if not 0 <= int(label) < N_GESTURES:
        raise LabelOutOfRange("gesture label must be 0..7, got %r" % (label,))
    vals = (_channel_features(x1, rate_hz, include_duplicate_ie)
            + _channel_features(x2, rate_hz, include_duplicate_ie))
    window_ms = 1000.0 * x1.shape[0] / rate_hz
    return FeatureVector(values=np.asarray(vals, dtype=np.float64),
                         label=int(label), window_ms=window_ms)
