"""Command-line entry point.

Subcommands: synth (generate a corpus), train, eval, bench, sweep,
report. Every command is deterministic given --seed (timing values
excepted). Exit codes: 0 success, 1 data or model error, 2 usage error.
"""

import argparse
import os
import sys

from ._util import fmt_float
from .data_io import SynthConfig, load_corpus, write_corpus
from .errors import EmgPipeError, MissingInput
from .models import load_model, save_model
from .pipeline import (DEFAULT_WINDOWS_MS, bench_pipeline, eval_bundle,
                       run_sweep, snr_by_window, train_eval)

METRICS_HEADER = "algorithm,window_ms,accuracy,precision,recall,f1"
BENCH_HEADER = "stage,mean_ms,std_ms,reps"
SNR_HEADER = "window_ms,raw_snr_mean,denoised_snr_mean"
LATENCY_HEADER = "stage,mean_ms,std_ms"
CONFUSION_HEADER = "true," + ",".join("pred%d" % c for c in range(8))


def _seed_type(text):
    value = int(text)
    if value < 0 or value >= 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit int")
    return value


def _trees_type(text):
    if text == "cv":
        return "cv"
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("tree count must be at least 1")
    return value


def _windows_type(text):
    try:
        values = [int(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError("windows must be comma-separated ints")
    if not values:
        raise argparse.ArgumentTypeError("windows list is empty")
    return values


def _metric_row(algorithm, window_ms, report):
    return "%s,%d,%s,%s,%s,%s" % (
        algorithm, window_ms, fmt_float(report["accuracy"]),
        fmt_float(report["precision"]), fmt_float(report["recall"]),
        fmt_float(report["f1"]))


def _write_lines(path, lines):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line + "\n")


def cmd_synth(args):
    cfg = SynthConfig(seed=args.seed, duration_s=args.duration_s,
                      n_subjects=args.subjects,
                      trials_per_gesture=args.trials_per_gesture)
    manifest = write_corpus(cfg, args.out)
    n_trials = 8 * cfg.trials_per_gesture
    print("wrote %d trials and %s" % (n_trials, manifest))
    return 0


def cmd_train(args):
    recordings = load_corpus(args.manifest)
    bundle, report, _ = train_eval(
        recordings, args.window_ms, algo=args.algo, seed=args.seed,
        overlap=args.overlap, denoise_on=not args.no_denoise,
        trees=args.trees, wide_nn=args.wide_nn)
    save_model(args.out, bundle)
    print("trained %s at %d ms windows, holdout accuracy %s, saved %s"
          % (args.algo, args.window_ms, fmt_float(report.accuracy), args.out))
    return 0


def cmd_eval(args):
    bundle = load_model(args.model)
    recordings = load_corpus(args.manifest)
    report, cm = eval_bundle(recordings, bundle, seed=args.seed)
    os.makedirs(args.out, exist_ok=True)
    metrics_path = os.path.join(args.out, "metrics.csv")
    row = {"accuracy": report.accuracy, "precision": report.macro_precision,
           "recall": report.macro_recall, "f1": report.macro_f1}
    _write_lines(metrics_path, [
        METRICS_HEADER,
        _metric_row(bundle.meta["algorithm"], int(bundle.meta["window_ms"]), row),
    ])
    confusion_path = os.path.join(args.out, "confusion.csv")
    lines = [CONFUSION_HEADER]
    for c in range(cm.counts.shape[0]):
        lines.append("%d,%s" % (c, ",".join(str(int(v)) for v in cm.counts[c])))
    _write_lines(confusion_path, lines)
    print("accuracy %s, wrote %s and %s"
          % (fmt_float(report.accuracy), metrics_path, confusion_path))
    return 0


def cmd_bench(args):
    bundle = load_model(args.model)
    recordings = load_corpus(args.manifest)
    reports = bench_pipeline(recordings[0], bundle, reps=args.reps,
                             warmup=args.warmup)
    lines = [BENCH_HEADER]
    for r in reports:
        lines.append("%s,%s,%s,%d" % (r.stage, fmt_float(r.mean_ms),
                                      fmt_float(r.std_ms), r.repetitions))
    _write_lines(args.out, lines)
    pipeline_mean = next(r.mean_ms for r in reports if r.stage == "pipeline")
    print("pipeline mean %s ms over %d reps, wrote %s"
          % (fmt_float(pipeline_mean), args.reps, args.out))
    return 0


def cmd_sweep(args):
    recordings = load_corpus(args.manifest)
    rows = run_sweep(recordings, windows=args.windows, seed=args.seed,
                     overlap=args.overlap, denoise_on=not args.no_denoise,
                     trees=args.trees, wide_nn=args.wide_nn)
    lines = [METRICS_HEADER]
    for row in rows:
        lines.append(_metric_row(row["algorithm"], row["window_ms"], row))
    _write_lines(args.out, lines)
    print("swept %d configurations, wrote %s" % (len(rows), args.out))
    return 0


def cmd_report(args):
    if not args.manifest and not args.bench:
        raise MissingInput("report needs --manifest and/or --bench")
    os.makedirs(args.out, exist_ok=True)
    written = []
    if args.manifest:
        recordings = load_corpus(args.manifest)
        rows, improved = snr_by_window(recordings, windows=args.windows)
        lines = [SNR_HEADER]
        for row in rows:
            lines.append("%d,%s,%s" % (row["window_ms"],
                                       fmt_float(row["raw_snr_mean"]),
                                       fmt_float(row["denoised_snr_mean"])))
        path = os.path.join(args.out, "snr_by_window.csv")
        _write_lines(path, lines)
        written.append(path)
        print("snr improved for %s of windows" % fmt_float(improved))
    if args.bench:
        if not os.path.exists(args.bench):
            raise MissingInput("no such bench file: %s" % args.bench)
        with open(args.bench, "r", encoding="utf-8") as fh:
            header = fh.readline().strip()
            if header != BENCH_HEADER:
                raise MissingInput(
                    "unexpected bench header %r in %s" % (header, args.bench))
            lines = [LATENCY_HEADER]
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                stage, mean_ms, std_ms, _ = line.split(",")
                lines.append("%s,%s,%s" % (stage, mean_ms, std_ms))
        path = os.path.join(args.out, "latency_summary.csv")
        _write_lines(path, lines)
        written.append(path)
    print("wrote %s" % ", ".join(written))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="emgpipe",
        description="EMG gesture pipeline: synthesize data, train, "
                    "evaluate, benchmark, sweep window sizes, report.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic corpus")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=_seed_type, default=0)
    p.add_argument("--trials-per-gesture", type=int, default=10)
    p.add_argument("--duration-s", type=float, default=2.0)
    p.add_argument("--subjects", type=int, default=5)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="train one classifier")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--algo", choices=("rf", "nn"), default="rf")
    p.add_argument("--window-ms", type=int, default=1000)
    p.add_argument("--overlap", type=float, default=0.9)
    p.add_argument("--seed", type=_seed_type, default=0)
    p.add_argument("--trees", type=_trees_type, default="cv",
                   help="forest size, or 'cv' to select by cross-validation")
    p.add_argument("--wide-nn", action="store_true",
                   help="use the large 60/1000/1000/1000 hidden layout")
    p.add_argument("--no-denoise", action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a trained model on its split")
    p.add_argument("--manifest", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True, help="directory for the CSVs")
    p.add_argument("--seed", type=_seed_type, default=None,
                   help="split seed; defaults to the training seed")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="time the single-window inference path")
    p.add_argument("--manifest", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True, help="bench CSV to write")
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--warmup", type=int, default=3)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("sweep", help="accuracy across window sizes")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="sweep CSV to write")
    p.add_argument("--seed", type=_seed_type, default=0)
    p.add_argument("--windows", type=_windows_type,
                   default=list(DEFAULT_WINDOWS_MS))
    p.add_argument("--overlap", type=float, default=0.9)
    p.add_argument("--trees", type=_trees_type, default="cv")
    p.add_argument("--wide-nn", action="store_true")
    p.add_argument("--no-denoise", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="summary CSVs for plotting")
    p.add_argument("--manifest", default=None,
                   help="corpus manifest for the SNR table")
    p.add_argument("--bench", default=None,
                   help="bench CSV for the latency summary")
    p.add_argument("--out", required=True, help="directory for the CSVs")
    p.add_argument("--windows", type=_windows_type,
                   default=list(DEFAULT_WINDOWS_MS))
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EmgPipeError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
