"""Forecast scoring: MAE, RMSE, MAPE, peak-restricted MAPE, and windowed reports."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyWindow, InvalidSplit, ValidationFailure
from .features import FeatureMatrix
from .timebase import render_hour

DEFAULT_MAPE_FLOOR = 1.0   # MW; inert on realistic grid loads
DEFAULT_PEAK_FRACTION = 0.05


def _check(y: np.ndarray, yhat: np.ndarray):
    y = np.asarray(y, dtype=np.float64)
    yhat = np.asarray(yhat, dtype=np.float64)
    if y.shape != yhat.shape:
        raise ValidationFailure(f"length mismatch: {y.shape} vs {yhat.shape}")
    if y.size == 0:
        raise ValidationFailure("empty vectors")
    return y, yhat


def mae(y, yhat) -> float:
    y, yhat = _check(y, yhat)
    return float(np.mean(np.abs(y - yhat)))


def rmse(y, yhat) -> float:
    y, yhat = _check(y, yhat)
    return float(np.sqrt(np.mean((y - yhat) ** 2)))


def mape(y, yhat, floor: float = DEFAULT_MAPE_FLOOR) -> float:
    """Percent error against |actual|, with a denominator floor for near-zero
    actuals.  Use `mape_floored_count` to see whether the floor fired."""
    y, yhat = _check(y, yhat)
    denom = np.maximum(np.abs(y), floor)
    return float(100.0 * np.mean(np.abs(y - yhat) / denom))


def mape_floored_count(y, floor: float = DEFAULT_MAPE_FLOOR) -> int:
    return int(np.sum(np.abs(np.asarray(y, dtype=np.float64)) < floor))


def peak_slice(y: np.ndarray, fraction: float = DEFAULT_PEAK_FRACTION) -> np.ndarray:
    """Indices of the ceil(fraction*n) highest values; ties go to earlier rows."""
    if not 0.0 < fraction < 1.0:
        raise ValidationFailure(f"peak fraction must be in (0, 1), got {fraction}")
    y = np.asarray(y, dtype=np.float64)
    k = math.ceil(fraction * len(y))
    order = np.lexsort((np.arange(len(y)), -y))  # primary: value desc, then index asc
    return np.sort(order[:k])


def peak_mape(y, yhat, fraction: float = DEFAULT_PEAK_FRACTION,
              floor: float = DEFAULT_MAPE_FLOOR) -> float:
    y, yhat = _check(y, yhat)
    idx = peak_slice(y, fraction)
    return mape(y[idx], yhat[idx], floor)


@dataclass(frozen=True)
class MetricSet:
    mae: float
    rmse: float
    mape: float
    peak_mape: float
    n: int
    k: int                      # rows in the peak slice
    mape_floored: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def score(y, yhat, fraction: float = DEFAULT_PEAK_FRACTION,
          floor: float = DEFAULT_MAPE_FLOOR) -> MetricSet:
    y, yhat = _check(y, yhat)
    idx = peak_slice(y, fraction)
    return MetricSet(
        mae=mae(y, yhat),
        rmse=rmse(y, yhat),
        mape=mape(y, yhat, floor),
        peak_mape=mape(y[idx], yhat[idx], floor),
        n=len(y),
        k=len(idx),
        mape_floored=mape_floored_count(y, floor),
    )


@dataclass(frozen=True)
class SplitSpec:
    """Chronological split: everything up to train_end trains, test_range tests."""

    train_end: int                     # epoch hour, inclusive
    test_start: int
    test_end: int
    peak_windows: dict[str, tuple[int, int]] = field(default_factory=dict)

    def __post_init__(self):
        if self.test_start <= self.train_end:
            raise InvalidSplit(
                f"test range starts at {render_hour(self.test_start)}, not after "
                f"train_end {render_hour(self.train_end)}"
            )
        if self.test_end < self.test_start:
            raise InvalidSplit("test range ends before it starts")
        for name, (s, e) in self.peak_windows.items():
            if e < s:
                raise InvalidSplit(f"peak window {name!r} ends before it starts")


def chronological_split(fm: FeatureMatrix, spec: SplitSpec
                        ) -> tuple[FeatureMatrix, FeatureMatrix]:
    """Rows assigned by their own timestamp; no shuffling, no duplication."""
    hours = fm.hours()
    train_mask = hours <= spec.train_end
    test_mask = (hours >= spec.test_start) & (hours <= spec.test_end)
    if not train_mask.any():
        raise InvalidSplit("no rows at or before train_end")
    if not test_mask.any():
        raise InvalidSplit("no rows inside the test range")
    train = FeatureMatrix(int(hours[train_mask][0]), fm.names,
                          fm.X[train_mask], fm.y[train_mask], fm.warmup)
    test = FeatureMatrix(int(hours[test_mask][0]), fm.names,
                         fm.X[test_mask], fm.y[test_mask], fm.warmup)
    return train, test


def window_report(hours: np.ndarray, y: np.ndarray, yhat: np.ndarray,
                  windows: dict[str, tuple[int, int]],
                  fraction: float = DEFAULT_PEAK_FRACTION,
                  floor: float = DEFAULT_MAPE_FLOOR) -> dict[str, MetricSet]:
    """Full metric set per named hour range; windows may overlap."""
    out = {}
    for name, (start, end) in windows.items():
        mask = (hours >= start) & (hours <= end)
        if not mask.any():
            raise EmptyWindow(
                f"window {name!r} [{render_hour(start)}..{render_hour(end)}] "
                "contains no rows"
            )
        out[name] = score(y[mask], yhat[mask], fraction, floor)
    return out


def write_metrics_json(path: str | Path, global_metrics: MetricSet,
                       windows: dict[str, MetricSet] | None = None,
                       extra: dict | None = None) -> None:
    doc = {"global": global_metrics.to_dict()}
    if windows:
        doc["windows"] = {k: v.to_dict() for k, v in windows.items()}
    if extra:
        doc.update(extra)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def comparison_table(rows: list[dict]) -> str:
    """Fixed-width text table of per-model scores (RMSE, MAE, MAPE, Peak-MAPE)."""
    header = f"{'Model':<32} {'RMSE':>10} {'MAE':>10} {'MAPE':>8} {'Peak-MAPE':>10}"
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(
            f"{r['model']:<32} {r['rmse']:>10.2f} {r['mae']:>10.2f} "
            f"{r['mape']:>8.2f} {r['peak_mape']:>10.2f}"
        )
    return "\n".join(lines)


def write_comparison_csv(path: str | Path, rows: list[dict]) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["model", "rmse", "mae", "mape", "peak_mape"])
        for r in rows:
            w.writerow([r["model"], repr(r["rmse"]), repr(r["mae"]),
                        repr(r["mape"]), repr(r["peak_mape"])])
