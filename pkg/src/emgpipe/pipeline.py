"""End-to-end orchestration: train/evaluate one configuration, sweep
window sizes, measure denoising uplift, and benchmark the single-window
inference path.
"""

import numpy as np

from ._util import round_half_up
from .data_io import TrialRecording, build_dataset
from .dsp import SampleSeries, denoise, segment_windows
from .evalx import bench_stage, confusion, metrics, shuffle_split
from .features import (N_GESTURES, assemble_feature_vector, feature_names,
                       freq_features, welch_psd)
from .models import (DESK_HIDDEN_DIMS, WIDE_HIDDEN_DIMS, TrainConfig,
                     TrainedBundle, mlp_predict_batch, mlp_train,
                     rf_fit, rf_predict, rf_predict_batch, scaler_apply,
                     scaler_fit, select_n_trees_cv, mlp_predict)

DEFAULT_WINDOWS_MS = (200, 400, 600, 800, 1000)


def denoise_recordings(recordings):
    """Denoise both channels of every recording, once."""
    out = []
    for rec in recordings:
        out.append(TrialRecording(fds=denoise(rec.fds), edc=denoise(rec.edc),
                                  label=rec.label, subject=rec.subject,
                                  trial=rec.trial))
    return out


def train_eval(recordings, window_ms, algo="rf", seed=0, overlap=0.9,
               denoise_on=True, assume_denoised=False, trees="cv",
               wide_nn=False, include_duplicate_ie=False):
    """Train one classifier and score it on the held-out pooled split.

    trees: an integer forest size, or "cv" to pick one by 5-fold
    cross-validation on the training portion. assume_denoised marks
    recordings that were already denoised by the caller, so the work is
    not repeated (the pipeline still counts as denoised in the model's
    metadata).

    Returns (bundle, metrics_report, confusion_matrix).
    """
    if denoise_on and not assume_denoised:
        recordings = denoise_recordings(recordings)
    X, y, _ = build_dataset(recordings, window_ms, overlap=overlap,
                            denoise_on=False,
                            include_duplicate_ie=include_duplicate_ie)
    split = shuffle_split(X.shape[0], 0.8, seed)
    scaler = scaler_fit(X[split.train])
    X_train = scaler_apply(scaler, X[split.train])
    X_test = scaler_apply(scaler, X[split.test])
    y_train = y[split.train]
    y_test = y[split.test]
    meta = {
        "algorithm": algo,
        "window_ms": int(window_ms),
        "overlap": float(overlap),
        "denoise": bool(denoise_on),
        "seed": int(seed),
        "include_duplicate_ie": bool(include_duplicate_ie),
        "feature_names": feature_names(include_duplicate_ie),
    }
    if algo == "rf":
        if trees == "cv":
            n_trees = select_n_trees_cv(X_train, y_train, seed=seed)
        else:
            n_trees = int(trees)
        model = rf_fit(X_train, y_train, n_trees, seed)
        pred = rf_predict_batch(model, X_test)
        meta["n_trees"] = int(n_trees)
        bundle = TrainedBundle(kind="rf", scaler=scaler, model=model, meta=meta)
    elif algo == "nn":
        hidden = WIDE_HIDDEN_DIMS if wide_nn else DESK_HIDDEN_DIMS
        config = TrainConfig(seed=seed, hidden_dims=tuple(hidden),
                             n_classes=N_GESTURES)
        model = mlp_train(X_train, y_train, config)
        pred = mlp_predict_batch(model, X_test)
        meta["hidden_dims"] = list(hidden)
        bundle = TrainedBundle(kind="nn", scaler=scaler, model=model, meta=meta)
    else:
        raise ValueError("algo must be 'rf' or 'nn', got %r" % (algo,))
    cm = confusion(y_test, pred, N_GESTURES)
    return bundle, metrics(cm), cm


def eval_bundle(recordings, bundle, seed=None):
    """Score an already-trained bundle on the held-out pooled split.

    Rebuilds the dataset with the bundle's stored settings, reproduces
    the train/test split (the stored seed unless overridden), and
    predicts with the loaded scaler and model. With the training seed
    this scores exactly the samples the model never saw.

    Returns (metrics_report, confusion_matrix).
    """
    meta = bundle.meta
    if bool(meta.get("denoise", True)):
        recordings = denoise_recordings(recordings)
    X, y, _ = build_dataset(
        recordings, int(meta["window_ms"]), overlap=float(meta["overlap"]),
        denoise_on=False,
        include_duplicate_ie=bool(meta.get("include_duplicate_ie", False)))
    if seed is None:
        seed = int(meta["seed"])
    split = shuffle_split(X.shape[0], 0.8, seed)
    X_test = scaler_apply(bundle.scaler, X[split.test])
    if bundle.kind == "rf":
        pred = rf_predict_batch(bundle.model, X_test)
    else:
        pred = mlp_predict_batch(bundle.model, X_test)
    cm = confusion(y[split.test], pred, N_GESTURES)
    return metrics(cm), cm


def run_sweep(recordings, windows=DEFAULT_WINDOWS_MS, seed=0, overlap=0.9,
              denoise_on=True, trees="cv", wide_nn=False):
    """Both algorithms across the window sizes; denoising runs once.

    Returns rows of {algorithm, window_ms, accuracy, precision, recall,
    f1} ordered rf-then-nn within each window size.
    """
    if denoise_on:
        recordings = denoise_recordings(recordings)
    rows = []
    for window_ms in windows:
        for algo in ("rf", "nn"):
            _, report, _ = train_eval(
                recordings, window_ms, algo=algo, seed=seed, overlap=overlap,
                denoise_on=denoise_on, assume_denoised=True, trees=trees,
                wide_nn=wide_nn)
            rows.append({
                "algorithm": algo,
                "window_ms": int(window_ms),
                "accuracy": report.accuracy,
                "precision": report.macro_precision,
                "recall": report.macro_recall,
                "f1": report.macro_f1,
            })
    return rows


def _window_snrs(series, window_len, overlap):
    out = []
    for w in segment_windows(series, window_len, overlap):
        out.append(freq_features(welch_psd(w, series.rate_hz)).snr)
    return out


def snr_by_window(recordings, windows=DEFAULT_WINDOWS_MS, overlap=0.9):
    """Mean spectral SNR before and after denoising, per window size.

    Returns (rows, improved_fraction): one row per window size with the
    raw and denoised means, and the overall fraction of individual
    windows whose SNR went up.
    """
    denoised = denoise_recordings(recordings)
    rows = []
    improved = 0
    total = 0
    for window_ms in windows:
        raw_vals = []
        den_vals = []
        for rec, den in zip(recordings, denoised):
            rate = rec.fds.rate_hz
            window_len = round_half_up(window_ms * rate / 1000.0)
            for raw_series, den_series in ((rec.fds, den.fds),
                                           (rec.edc, den.edc)):
                r = _window_snrs(raw_series, window_len, overlap)
                d = _window_snrs(den_series, window_len, overlap)
                raw_vals.extend(r)
                den_vals.extend(d)
                improved += sum(1 for a, b in zip(r, d) if b > a)
                total += len(r)
        rows.append({
            "window_ms": int(window_ms),
            "raw_snr_mean": float(np.mean(raw_vals)),
            "denoised_snr_mean": float(np.mean(den_vals)),
        })
    return rows, improved / total


def bench_pipeline(recording, bundle, reps=20, warmup=3):
    """Latency of the single-window inference path, stage by stage.

    Cuts one window of the bundle's configured size from the recording
    and times denoise, feature extraction, and scaled prediction
    separately, then the whole chain. Returns four latency reports.
    """
    window_ms = int(bundle.meta.get("window_ms", 200))
    overlap = float(bundle.meta.get("overlap", 0.9))
    dup_ie = bool(bundle.meta.get("include_duplicate_ie", False))
    denoise_on = bool(bundle.meta.get("denoise", True))
    rate = recording.fds.rate_hz
    window_len = round_half_up(window_ms * rate / 1000.0)
    raw_f = SampleSeries(recording.fds.samples[:window_len], rate, "fds")
    raw_e = SampleSeries(recording.edc.samples[:window_len], rate, "edc")

    def stage_denoise():
        return denoise(raw_f), denoise(raw_e)

    if denoise_on:
        den_f, den_e = stage_denoise()
    else:
        den_f, den_e = raw_f, raw_e

    def stage_features():
        return assemble_feature_vector(den_f, den_e, rate, recording.label,
                                       dup_ie)

    row = stage_features().values

    if bundle.kind == "rf":
        def stage_predict():
            return rf_predict(bundle.model, scaler_apply(bundle.scaler, row))
    else:
        def stage_predict():
            return mlp_predict(bundle.model, scaler_apply(bundle.scaler, row))

    def stage_full():
        if denoise_on:
            f, e = stage_denoise()
        else:
            f, e = raw_f, raw_e
        values = assemble_feature_vector(f, e, rate, recording.label,
                                         dup_ie).values
        scaled = scaler_apply(bundle.scaler, values)
        if bundle.kind == "rf":
            return rf_predict(bundle.model, scaled)
        return mlp_predict(bundle.model, scaled)

    reports = [
        bench_stage(stage_denoise, reps, warmup, name="denoise"),
        bench_stage(stage_features, reps, warmup, name="features"),
        bench_stage(stage_predict, reps, warmup, name="predict"),
        bench_stage(stage_full, reps, warmup, name="pipeline"),
    ]
    return reports
