"""Compare the numba kernels against the pure-numpy fallback.

Times wavelet denoising on a full two-second channel plus forest fit
and batch prediction on a blob dataset, once per backend, and prints a
table with the speedup. Run from the repo root:

    python3 benchmarks/bench_backends.py
"""

import numpy as np

from emgpipe.backends import set_backend
from emgpipe.data_io import SynthConfig, gen_synthetic_trial
from emgpipe.dsp import denoise
from emgpipe.evalx import bench_stage
from emgpipe.models import rf_fit, rf_predict_batch

REPS = 15
WARMUP = 3


def _blobs(seed=0, n=400, d=36, n_classes=8):
    rng = np.random.default_rng(seed)
    centers = rng.normal(0.0, 2.0, (n_classes, d))
    y = rng.integers(0, n_classes, n)
    X = centers[y] + rng.normal(0.0, 1.0, (n, d))
    return np.ascontiguousarray(X), y.astype(np.int64)


def run_backend(name):
    set_backend(name)
    trial = gen_synthetic_trial(SynthConfig(), 3, 0, 0)
    X, y = _blobs()
    forest = rf_fit(X, y, 50, seed=0)
    jobs = (
        ("denoise 2000 samples", lambda: denoise(trial.fds)),
        ("forest fit 400x36, 50 trees", lambda: rf_fit(X, y, 50, seed=0)),
        ("forest predict 400 rows", lambda: rf_predict_batch(forest, X)),
    )
    return [bench_stage(fn, REPS, warmup=WARMUP, name=label)
            for label, fn in jobs]


def main():
    results = {name: run_backend(name) for name in ("numpy", "numba")}
    width = max(len(r.stage) for r in results["numpy"])
    print("%-*s  %14s  %14s  %s"
          % (width, "operation", "numpy (ms)", "numba (ms)", "speedup"))
    print("-" * (width + 44))
    for np_rep, nb_rep in zip(results["numpy"], results["numba"]):
        print("%-*s  %7.3f +-%5.3f  %7.3f +-%5.3f  %6.1fx"
              % (width, np_rep.stage, np_rep.mean_ms, np_rep.std_ms,
                 nb_rep.mean_ms, nb_rep.std_ms,
                 np_rep.mean_ms / nb_rep.mean_ms))


if __name__ == "__main__":
    main()
