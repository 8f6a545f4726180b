"""Trial CSV ingestion, dataset manifests, the seeded synthetic EMG
corpus, and the end-to-end dataset builder.

The synthetic corpus stands in for unavailable human recordings. Each
of the 8 gesture classes has a documented two-channel signature; see
GESTURE_SIGNATURES.
"""

import os
from dataclasses import dataclass

import numpy as np

from ._util import fmt_float, round_half_up
from .dsp import SampleSeries, denoise, segment_windows
from .errors import (BadHeader, LabelOutOfRange, LengthMismatch, MissingFile,
                     NonFiniteValue, NonUniformSampling)
from .features import N_GESTURES, assemble_feature_vector

TRIAL_HEADER = "t_ms,fds_uv,edc_uv"
MANIFEST_HEADER = "path,label,subject,trial"
MANIFEST_NAME = "manifest.csv"

# label: (fds amplitude uV, edc amplitude uV, burst rate Hz, carrier tilt)
#
# Amplitude pairs separate gestures within a burst-rate group; the burst
# rate and the carrier tilt (moving-average length before differencing,
# which shifts the spectrum) separate the two groups. No single feature
# separates all 8 classes.
GESTURE_SIGNATURES = {
    0: (30.0, 30.0, 2.0, 6),
    1: (60.0, 25.0, 2.0, 6),
    2: (25.0, 60.0, 2.0, 6),
    3: (60.0, 60.0, 2.0, 6),
    4: (30.0, 30.0, 6.0, 3),
    5: (60.0, 25.0, 6.0, 3),
    6: (25.0, 60.0, 6.0, 3),
    7: (60.0, 60.0, 6.0, 3),
}


@dataclass
class TrialRecording:
    """One two-channel trial with its gesture label and provenance ids."""

    fds: SampleSeries
    edc: SampleSeries
    label: int
    subject: int
    trial: int

    def __post_init__(self):
        if len(self.fds) != len(self.edc):
            raise LengthMismatch("channel lengths differ within a trial")
        if not 0 <= int(self.label) < N_GESTURES:
            raise LabelOutOfRange("gesture label must be 0..7, got %r"
                                  % (self.label,))


@dataclass
class ManifestEntry:
    path: str
    label: int
    subject: int
    trial: int


@dataclass
class DatasetManifest:
    entries: list

    def __post_init__(self):
        paths = [e.path for e in self.entries]
        if len(set(paths)) != len(paths):
            raise BadHeader("manifest lists a path twice")
        for e in self.entries:
            if not 0 <= int(e.label) < N_GESTURES:
                raise LabelOutOfRange("manifest label must be 0..7, got %r"
                                      % (e.label,))


@dataclass
class SynthConfig:
    """Knobs for the synthetic corpus generator.

    Noise defaults are tuned so denoising measurably raises spectral
    SNR while the classes stay separable at the smallest window size.
    """

    duration_s: float = 2.0
    rate_hz: float = 1000.0
    n_subjects: int = 5
    trials_per_gesture: int = 10
    white_sigma_uv: float = 30.0
    powerline_uv: float = 4.0
    powerline_hz: float = 50.0
    wander_uv: float = 12.0
    seed: int = 0

    def __post_init__(self):
        if not self.duration_s > 0:
            raise ValueError("duration_s must be positive")
        if not self.rate_hz > 0:
            raise ValueError("rate_hz must be positive")
        if self.powerline_hz not in (50.0, 60.0):
            raise ValueError("powerline_hz must be 50 or 60")


def _carrier(rng, n, tilt):
    """EMG-band noise: moving-average smoothing then differencing shapes
    white noise into a broad 20-250 Hz bump; tilt sets the center."""
    white = rng.standard_normal(n + tilt)
    smoothed = np.convolve(white, np.ones(tilt) / tilt, mode="valid")
    c = np.diff(smoothed)
    std = c.std()
    if std > 1e-12:
        c = c / std
    return c


def gen_synthetic_trial(cfg, label, subject, trial):
    """One deterministic synthetic trial for (seed, label, subject, trial).

    Both channels share a raised-cosine burst envelope at the gesture's
    burst rate; each channel gets its own band-shaped carrier, scaled by
    the signature amplitude and a per-subject gain, plus white noise, a
    powerline tone, and slow baseline wander.
    """
    if not 0 <= int(label) < N_GESTURES:
        raise LabelOutOfRange("gesture label must be 0..7, got %r" % (label,))
    fds_uv, edc_uv, burst_hz, tilt = GESTURE_SIGNATURES[int(label)]
    n = round_half_up(cfg.duration_s * cfg.rate_hz)
    t = np.arange(n) / cfg.rate_hz
    rng = np.random.default_rng(
        np.random.SeedSequence([cfg.seed, int(label), int(subject), int(trial)]))
    gain_rng = np.random.default_rng(
        np.random.SeedSequence([cfg.seed, 7777, int(subject)]))
    gains = gain_rng.uniform(0.93, 1.07, size=2)
    phase = rng.uniform(0.0, 2.0 * np.pi)
    envelope = 0.15 + 0.85 * 0.5 * (1.0 - np.cos(2.0 * np.pi * burst_hz * t + phase))
    channels = []
    for amp, gain, name in ((fds_uv, gains[0], "fds"), (edc_uv, gains[1], "edc")):
        carrier = _carrier(rng, n, tilt)
        wideband = rng.standard_normal(n)
        pl_phase = rng.uniform(0.0, 2.0 * np.pi)
        wander_hz = rng.uniform(0.2, 0.4)
        wander_phase = rng.uniform(0.0, 2.0 * np.pi)
        samples = amp * gain * envelope * carrier
        samples = samples + cfg.white_sigma_uv * wideband
        samples = samples + cfg.powerline_uv * np.sin(
            2.0 * np.pi * cfg.powerline_hz * t + pl_phase)
        samples = samples + cfg.wander_uv * np.sin(
            2.0 * np.pi * wander_hz * t + wander_phase)
        channels.append(SampleSeries(samples, rate_hz=cfg.rate_hz, channel=name))
    return TrialRecording(fds=channels[0], edc=channels[1], label=int(label),
                          subject=int(subject), trial=int(trial))


def gen_corpus(cfg):
    """All trials of a corpus in memory: every gesture times
    trials_per_gesture, subjects assigned round robin."""
    recordings = []
    for label in range(N_GESTURES):
        for trial in range(cfg.trials_per_gesture):
            subject = trial % cfg.n_subjects
            recordings.append(gen_synthetic_trial(cfg, label, subject, trial))
    return recordings


def load_trial_csv(path, label, subject, trial):
    """Read one trial file (header t_ms,fds_uv,edc_uv) into a recording.

    The sample rate is inferred from the median t_ms increment; every
    increment must stay within 1% of 1 ms.
    """
    if not os.path.exists(path):
        raise MissingFile("no such trial file: %s" % path)
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != TRIAL_HEADER:
            raise BadHeader(
                "expected header %r, got %r" % (TRIAL_HEADER, header))
        t_ms = []
        fds = []
        edc = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise BadHeader("expected 3 columns, got %d" % len(parts))
            try:
                row = [float(p) for p in parts]
            except ValueError:
                raise NonFiniteValue("unparsable value in %s: %r" % (path, line))
            t_ms.append(row[0])
            fds.append(row[1])
            edc.append(row[2])
    if len(t_ms) < 2:
        raise NonUniformSampling("need at least 2 rows to infer a rate")
    t_arr = np.asarray(t_ms)
    if not np.all(np.isfinite(t_arr)):
        raise NonFiniteValue("non-finite timestamp in %s" % path)
    dt = np.diff(t_arr)
    if np.any(np.abs(dt - 1.0) > 0.01):
        raise NonUniformSampling(
            "timestamp increments stray more than 1%% from 1 ms in %s" % path)
    rate = 1000.0 / float(np.median(dt))
    fds_arr = np.asarray(fds)
    edc_arr = np.asarray(edc)
    if not (np.all(np.isfinite(fds_arr)) and np.all(np.isfinite(edc_arr))):
        raise NonFiniteValue("non-finite sample in %s" % path)
    return TrialRecording(
        fds=SampleSeries(fds_arr, rate_hz=rate, channel="fds"),
        edc=SampleSeries(edc_arr, rate_hz=rate, channel="edc"),
        label=int(label), subject=int(subject), trial=int(trial))


def write_trial_csv(path, rec):
    """Write one recording in the documented trial layout."""
    n = len(rec.fds)
    step_ms = 1000.0 / rec.fds.rate_hz
    whole_ms = abs(step_ms - round(step_ms)) < 1e-9
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(TRIAL_HEADER + "\n")
        for i in range(n):
            if whole_ms:
                stamp = str(int(round(i * step_ms)))
            else:
                stamp = "%.3f" % (i * step_ms)
            fh.write("%s,%s,%s\n" % (stamp, fmt_float(rec.fds.samples[i]),
                                     fmt_float(rec.edc.samples[i])))


def write_manifest(path, entries):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(MANIFEST_HEADER + "\n")
        for e in entries:
            fh.write("%s,%d,%d,%d\n" % (e.path, e.label, e.subject, e.trial))


def load_manifest(path):
    if not os.path.exists(path):
        raise MissingFile("no such manifest: %s" % path)
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != MANIFEST_HEADER:
            raise BadHeader(
                "expected header %r, got %r" % (MANIFEST_HEADER, header))
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 4:
                raise BadHeader("expected 4 columns, got %d" % len(parts))
            entries.append(ManifestEntry(path=parts[0], label=int(parts[1]),
                                         subject=int(parts[2]),
                                         trial=int(parts[3])))
    return DatasetManifest(entries=entries)


def write_corpus(cfg, out_dir):
    """Generate and write a full corpus; returns the manifest path.

    Trial files are named g<label>_s<subject>_t<trial>.csv; manifest
    paths are relative to the manifest's own directory.
    """
    os.makedirs(out_dir, exist_ok=True)
    entries = []
    for rec in gen_corpus(cfg):
        fname = "g%d_s%d_t%d.csv" % (rec.label, rec.subject, rec.trial)
        write_trial_csv(os.path.join(out_dir, fname), rec)
        entries.append(ManifestEntry(path=fname, label=rec.label,
                                     subject=rec.subject, trial=rec.trial))
    manifest_path = os.path.join(out_dir, MANIFEST_NAME)
    write_manifest(manifest_path, entries)
    return manifest_path


def load_corpus(manifest_path):
    """Load every trial a manifest points to."""
    manifest = load_manifest(manifest_path)
    base = os.path.dirname(os.path.abspath(manifest_path))
    recordings = []
    for e in manifest.entries:
        recordings.append(load_trial_csv(os.path.join(base, e.path),
                                         e.label, e.subject, e.trial))
    return recordings


def build_dataset(recordings, window_ms, overlap=0.9, denoise_on=True,
                  include_duplicate_ie=False):
    """Window every recording and extract features.

    Returns (X, y, groups): the stacked feature matrix, per-row gesture
    labels, and per-row subject ids. Both channels are cut at identical
    sample boundaries so row i's FDS and EDC windows align.
    """
    rows = []
    labels = []
    groups = []
    for rec in recordings:
        fds = denoise(rec.fds) if denoise_on else rec.fds
        edc = denoise(rec.edc) if denoise_on else rec.edc
        rate = rec.fds.rate_hz
        window_len = round_half_up(window_ms * rate / 1000.0)
        wins_f = segment_windows(fds, window_len, overlap)
        wins_e = segment_windows(edc, window_len, overlap)
        for wf, we in zip(wins_f, wins_e):
            fv = assemble_feature_vector(wf, we, rate, rec.label,
                                         include_duplicate_ie)
            rows.append(fv.values)
            labels.append(rec.label)
            groups.append(rec.subject)
    X = np.vstack(rows)
    return X, np.asarray(labels, dtype=np.int64), np.asarray(groups, dtype=np.int64)
