"""Windowing and wavelet denoising for surface EMG channels.

The denoising chain is a 4-level Daubechies-6 decomposition with
half-sample symmetric boundary extension, a robust noise estimate from
the finest detail subband, an adaptive per-subband threshold, soft
shrinkage of the detail coefficients, and exact-length reconstruction.
"""

from dataclasses import dataclass, field

import numpy as np

from ._util import round_half_up
from .backends import get_backend
from .errors import (InconsistentSubbands, InvalidOverlap, NonFiniteValue,
                     TooShort, WindowTooLong)

# Daubechies-6 scaling filter (reconstruction lowpass), 12 taps.
# Published orthonormal coefficients: sum = sqrt(2), unit energy,
# orthogonal to its own even shifts, six vanishing moments.
DB6_REC_LO = np.array([
    0.11154074335008017, 0.4946238903983854, 0.7511339080215775,
    0.3152503517092432, -0.22626469396516913, -0.12976686756709563,
    0.09750160558707936, 0.02752286553001629, -0.031582039318031156,
    0.0005538422009938016, 0.004777257511010651, -0.00107730108499558,
])
_L = DB6_REC_LO.shape[0]

DB6_DEC_LO = DB6_REC_LO[::-1].copy()
# quadrature mirror: dec_hi[k] = (-1)^k rec_lo[k]
DB6_DEC_HI = ((-1.0) ** np.arange(_L)) * DB6_REC_LO
DB6_REC_HI = DB6_DEC_HI[::-1].copy()

# shortest signal accepted by a 4-level decomposition
MIN_DECOMP_LEN = 32

CHANNELS = ("fds", "edc")


def _as_samples(obj):
    samples = getattr(obj, "samples", obj)
    return np.ascontiguousarray(samples, dtype=np.float64)


@dataclass
class SampleSeries:
    """One channel of EMG samples in microvolts at a fixed rate."""

    samples: np.ndarray
    rate_hz: float = 1000.0
    channel: str = "fds"

    def __post_init__(self):
        self.samples = np.ascontiguousarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1 or self.samples.size == 0:
            raise ValueError("sample series must be a non-empty 1-D array")
        if not self.rate_hz > 0:
            raise ValueError("rate_hz must be positive")
        if not np.all(np.isfinite(self.samples)):
            raise NonFiniteValue("sample series contains NaN or infinity")

    def __len__(self):
        return self.samples.shape[0]


@dataclass
class Window:
    """A contiguous slice of a series, tagged with its start offset."""

    samples: np.ndarray
    start_index: int = 0

    @property
    def length(self):
        return int(np.asarray(self.samples).shape[0])


@dataclass
class WaveletCoeffs:
    """Multi-level decomposition: approximation plus per-level details.

    details are ordered finest (level 1) to coarsest; original_length
    remembers the pre-transform sample count so reconstruction can crop
    exactly.
    """

    approx: np.ndarray
    details: list = field(default_factory=list)
    original_length: int = 0

    @property
    def levels(self):
        return len(self.details)


def _level_lengths(n, levels):
    # expansive transform: each level keeps (len + taps - 1) // 2 samples
    lens = [int(n)]
    for _ in range(levels):
        lens.append((lens[-1] + _L - 1) // 2)
    return lens


def segment_windows(series, window_len, overlap):
    """Slice a series into fixed-length windows at a fractional overlap.

    The hop is round(window_len * (1 - overlap)), at least 1; trailing
    samples that do not fill a whole window are dropped.
    """
    x = _as_samples(series)
    n = x.shape[0]
    window_len = int(window_len)
    if not 0.0 <= overlap < 1.0:
        raise InvalidOverlap("overlap must lie in [0, 1), got %r" % (overlap,))
    if window_len > n:
        raise WindowTooLong(
            "window of %d samples cannot fit a series of %d" % (window_len, n))
    if window_len < 1:
        raise TooShort("window length must be at least 1")
    hop = max(1, round_half_up(window_len * (1.0 - overlap)))
    windows = []
    start = 0
    while start + window_len <= n:
        windows.append(Window(x[start:start + window_len], start_index=start))
        start += hop
    return windows


def dwt_forward(window, levels=4):
    """Cascade analysis with the Daubechies-6 pair.

    Each level splits the running approximation into a new approximation
    and a detail subband, using half-sample symmetric extension at the
    boundaries.
    """
    x = _as_samples(window)
    n = x.shape[0]
    if n < (1 << levels) * 2:
        raise TooShort(
            "%d samples cannot support a %d-level decomposition" % (n, levels))
    kernels = get_backend()
    a = x
    details = []
    for _ in range(levels):
        ext = np.concatenate([a[:_L - 1][::-1], a, a[-(_L - 1):][::-1]])
        out_len = (a.shape[0] + _L - 1) // 2
        ca = kernels.down_convolve(ext, DB6_DEC_LO, out_len)
        cd = kernels.down_convolve(ext, DB6_DEC_HI, out_len)
        details.append(cd)
        a = ca
    return WaveletCoeffs(approx=a, details=details, original_length=n)


def dwt_inverse(coeffs):
    """Synthesis cascade returning exactly original_length samples."""
    levels = coeffs.levels
    if levels < 1:
        raise InconsistentSubbands("no detail subbands to invert")
    lens = _level_lengths(coeffs.original_length, levels)
    for k, d in enumerate(coeffs.details):
        if np.asarray(d).shape[0] != lens[k + 1]:
            raise InconsistentSubbands(
                "level %d detail has %d coefficients, expected %d"
                % (k + 1, np.asarray(d).shape[0], lens[k + 1]))
    if np.asarray(coeffs.approx).shape[0] != lens[levels]:
        raise InconsistentSubbands(
            "approximation has %d coefficients, expected %d"
            % (np.asarray(coeffs.approx).shape[0], lens[levels]))
    kernels = get_backend()
    a = np.ascontiguousarray(coeffs.approx, dtype=np.float64)
    for lvl in range(levels - 1, -1, -1):
        d = np.ascontiguousarray(coeffs.details[lvl], dtype=np.float64)
        a = kernels.up_convolve_add(a, d, DB6_REC_LO, DB6_REC_HI, lens[lvl])
    return a


def estimate_noise_sigma(finest_details):
    """Robust noise scale: median(|finest details|) / 0.6745."""
    d = np.asarray(finest_details, dtype=np.float64)
    if d.size == 0:
        raise TooShort("cannot estimate noise from an empty subband")
    return float(np.median(np.abs(d)) / 0.6745)


def bayes_shrink_threshold(subband, sigma_noise):
    """Adaptive subband threshold sigma_noise^2 / sigma_signal.

    The signal scale comes from the excess of the subband's mean square
    over the noise variance. A subband whose energy does not exceed the
    noise floor is judged pure noise and the threshold is raised to its
    largest coefficient, suppressing it entirely.
    """
    c = np.asarray(subband, dtype=np.float64)
    if c.size == 0:
        raise TooShort("cannot threshold an empty subband")
    if sigma_noise < 0:
        raise ValueError("sigma_noise must be non-negative")
    m2 = float(np.mean(c * c))
    excess = m2 - sigma_noise * sigma_noise
    if excess > 0:
        return float(sigma_noise * sigma_noise / np.sqrt(excess))
    return float(np.max(np.abs(c)))


def soft_threshold(c, threshold):
    """Shrink magnitudes by threshold, zeroing whatever falls below it."""
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    c = np.asarray(c, dtype=np.float64)
    out = np.sign(c) * np.maximum(np.abs(c) - threshold, 0.0)
    if out.ndim == 0:
        return float(out)
    return out


def denoise(series):
    """Wavelet-denoise one channel; same length and rate out.

    Noise sigma is estimated once from the level-1 details and reused
    for every subband's threshold. The approximation passes untouched.
    """
    x = _as_samples(series)
    if x.shape[0] < MIN_DECOMP_LEN:
        raise TooShort(
            "denoising needs at least %d samples, got %d"
            % (MIN_DECOMP_LEN, x.shape[0]))
    coeffs = dwt_forward(x, levels=4)
    sigma = estimate_noise_sigma(coeffs.details[0])
    shrunk = [soft_threshold(d, bayes_shrink_threshold(d, sigma))
              for d in coeffs.details]
    y = dwt_inverse(WaveletCoeffs(coeffs.approx, shrunk, coeffs.original_length))
    rate = getattr(series, "rate_hz", 1000.0)
    channel = getattr(series, "channel", "fds")
    return SampleSeries(y, rate_hz=rate, channel=channel)
