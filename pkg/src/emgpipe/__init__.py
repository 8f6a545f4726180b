"""Surface-EMG gesture classification pipeline.

Wavelet denoising, overlapped windowing, time/frequency features, a
from-scratch Random Forest and MLP, evaluation metrics, latency
benchmarks, and a seeded synthetic two-channel corpus. Hot kernels run
through numba when available; set EMGPIPE_DISABLE_NUMBA=1 to force the
pure-numpy fallback.
"""

from .backends import backend_name, set_backend
from .data_io import (GESTURE_SIGNATURES, SynthConfig, TrialRecording,
                      build_dataset, gen_synthetic_trial, load_corpus,
                      load_trial_csv, write_corpus)
from .dsp import (SampleSeries, WaveletCoeffs, Window, bayes_shrink_threshold,
                  denoise, dwt_forward, dwt_inverse, estimate_noise_sigma,
                  segment_windows, soft_threshold)
from .errors import EmgPipeError
from .evalx import bench_stage, confusion, metrics, shuffle_split
from .features import (FeatureVector, assemble_feature_vector, feature_names,
                       freq_features, time_features, welch_psd)
from .models import (TrainConfig, TrainedBundle, load_model, mlp_predict,
                     mlp_train, rf_fit, rf_predict, save_model, scaler_apply,
                     scaler_fit, select_n_trees_cv)
from .pipeline import (bench_pipeline, eval_bundle, run_sweep, snr_by_window,
                       train_eval)

__version__ = "0.1.0"

__all__ = [
    "EmgPipeError",
    "GESTURE_SIGNATURES",
    "FeatureVector",
    "SampleSeries",
    "SynthConfig",
    "TrainConfig",
    "TrainedBundle",
    "TrialRecording",
    "WaveletCoeffs",
    "Window",
    "__version__",
    "assemble_feature_vector",
    "backend_name",
    "bayes_shrink_threshold",
    "bench_pipeline",
    "bench_stage",
    "build_dataset",
    "confusion",
    "denoise",
    "dwt_forward",
    "dwt_inverse",
    "estimate_noise_sigma",
    "eval_bundle",
    "feature_names",
    "freq_features",
    "gen_synthetic_trial",
    "load_corpus",
    "load_model",
    "load_trial_csv",
    "metrics",
    "mlp_predict",
    "mlp_train",
    "rf_fit",
    "rf_predict",
    "run_sweep",
    "save_model",
    "scaler_apply",
    "scaler_fit",
    "segment_windows",
    "select_n_trees_cv",
    "set_backend",
    "shuffle_split",
    "snr_by_window",
    "soft_threshold",
    "time_features",
    "train_eval",
    "welch_psd",
]
