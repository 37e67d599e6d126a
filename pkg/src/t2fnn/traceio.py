"""Deterministic CSV emission.

All numeric cells are written with 17 significant digits via ``%.17g``,
which is locale-independent and round-trips float64 exactly. The files an
``identify`` run produces (trace, per-epoch RMSE, summary) contain no
timestamps or timing, so identical configurations yield byte-identical
output; wall-clock timing appears only in the learner comparison table.
"""

from __future__ import annotations

import csv
from pathlib import Path

TRACE_HEADER = ["k", "t", "u", "y", "y_n", "e", "alpha", "q"]
EPOCHS_HEADER = ["run", "epoch", "train_rmse"]
SUMMARY_HEADER = ["learner", "runs", "epochs", "samples_per_epoch",
                  "train_rmse_mean", "train_rmse_std",
                  "test_rmse_mean", "test_rmse_std"]
COMPARE_HEADER = ["learner", "train_rmse", "test_rmse",
                  "wall_clock_seconds", "runs"]
PLANT_HEADER = ["k", "t", "u", "y"]


def fmt(value):
    """Full-precision, locale-independent cell formatting."""
    if isinstance(value, float):
        return "%.17g" % value
    return str(value)


def _write_rows(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    return path


def write_trace(trace, path):
    """Per-step identification trace (final epoch of the first run)."""
    rows = zip(trace.k.tolist(), trace.t.tolist(), trace.u.tolist(),
               trace.y.tolist(), trace.y_n.tolist(), trace.e.tolist(),
               trace.alpha.tolist(), trace.q.tolist())
    return _write_rows(path, TRACE_HEADER, rows)


def write_epochs(report, path):
    rows = []
    for run in range(report.epoch_rmse.shape[0]):
        for epoch in range(report.epoch_rmse.shape[1]):
            rows.append((run, epoch, float(report.epoch_rmse[run, epoch])))
    return _write_rows(path, EPOCHS_HEADER, rows)


def write_summary(report, path):
    cfg = report.config
    row = (cfg.learner, len(report.train_rmse), cfg.epochs, cfg.horizon(),
           report.train_rmse_mean, report.train_rmse_std,
           report.test_rmse_mean, report.test_rmse_std)
    return _write_rows(path, SUMMARY_HEADER, [row])


def write_experiment(report, out_dir):
    """Write trace.csv / epochs.csv / summary.csv; returns the paths."""
    out = Path(out_dir)
    paths = []
    if report.trace is not None:
        paths.append(write_trace(report.trace, out / "trace.csv"))
    paths.append(write_epochs(report, out / "epochs.csv"))
    paths.append(write_summary(report, out / "summary.csv"))
    return paths


def write_comparison(reports, out_dir):
    """Side-by-side learner table (one row per learner, five columns)."""
    rows = []
    for name in sorted(reports):
        rp = reports[name]
        rows.append((name,
                     f"{rp.train_rmse_mean:.6g}±{rp.train_rmse_std:.3g}",
                     f"{rp.test_rmse_mean:.6g}±{rp.test_rmse_std:.3g}",
                     rp.wall_clock_seconds,
                     len(rp.train_rmse)))
    return _write_rows(Path(out_dir) / "compare.csv", COMPARE_HEADER, rows)


def write_plant_trace(u, y, dt, path):
    rows = ((k, k * dt, float(u[k]), float(y[k])) for k in range(len(u)))
    return _write_rows(path, PLANT_HEADER, rows)
