"""Engineered feature construction over an aligned hourly dataset.

Every generated column is defined hour-by-hour from values strictly before
the prediction hour when it derives from the target (lags, rollings, spike
scores), and from same-hour values when it derives from the calendar or from
exogenous weather.  Leading rows where any operand is undefined are counted
as warmup and dropped from the finished matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import LeakageError, SpecOrderError, UnknownColumn, ValidationFailure
from .holidays import HolidayCalendar
from .series import AlignedDataset
from .timebase import hour_range, local_fields

KINDS = (
    "raw", "calendar", "holiday", "lag", "rolling",
    "degree_day", "spike", "interaction", "flag", "cyclical",
)

CALENDAR_FIELDS = (
    "hour", "dayofweek", "month", "is_weekend",
    "is_monday", "is_tuesday", "is_wednesday", "is_thursday",
    "is_friday", "is_saturday", "is_sunday",
)

ZSCORE_EPS = 1e-6


@dataclass(frozen=True)
class FeatureSpec:
    """One named feature recipe; `params` are kind-specific."""

    name: str
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationFailure(f"spec {self.name!r}: unknown kind {self.kind!r}")


@dataclass(frozen=True)
class FeatureMatrix:
    """Row-per-hour matrix of named features plus the target vector."""

    start: int              # epoch hour of the first retained row
    names: list[str]
    X: np.ndarray           # (n_rows, n_features)
    y: np.ndarray
    warmup: int             # leading rows dropped before `start`

    def __post_init__(self):
        if self.X.shape != (len(self.y), len(self.names)):
            raise ValidationFailure("feature matrix shape does not match names/target")

    def __len__(self) -> int:
        return len(self.y)

    def hours(self) -> np.ndarray:
        return hour_range(self.start, len(self))

    def column(self, name: str) -> np.ndarray:
        try:
            return self.X[:, self.names.index(name)]
        except ValueError:
            raise UnknownColumn(f"no feature column named {name!r}") from None

    def take(self, idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(X, y) restricted to the given row indices."""
        return self.X[idx], self.y[idx]

    def slice_hours(self, start: int, end: int) -> "FeatureMatrix":
        """Rows whose hour falls in [start, end]; both inclusive."""
        h = self.hours()
        mask = (h >= start) & (h <= end)
        first = int(np.argmax(mask)) if mask.any() else 0
        return FeatureMatrix(int(h[first]) if mask.any() else start,
                             self.names, self.X[mask], self.y[mask], self.warmup)

    def drop_columns(self, drop: set[str]) -> "FeatureMatrix":
        keep = [i for i, n in enumerate(self.names) if n not in drop]
        names = [self.names[i] for i in keep]
        return FeatureMatrix(self.start, names, self.X[:, keep], self.y, self.warmup)


# --- column math ------------------------------------------------------------
# Each helper returns (values over the full axis, undefined-prefix length).
# NaN is the in-band marker for undefined rows; reductions propagate it.

def lag_column(values: np.ndarray, k: int, undef: int = 0):
    if k < 1:
        raise ValidationFailure(f"lag must be >= 1 hour, got {k}")
    out = np.full_like(values, np.nan)
    out[k:] = values[:-k]
    return out, undef + k


def rolling_column(values: np.ndarray, window: int, stat: str, shift: int = 1,
                   undef: int = 0):
    """Windowed statistic over values[t-shift-window+1 .. t-shift].

    std is the population form (divide by window), which stays defined for
    window 2.
    """
    if window < 1:
        raise ValidationFailure(f"rolling window must be >= 1 hour, got {window}")
    if shift < 0:
        raise ValidationFailure(f"rolling shift must be >= 0, got {shift}")
    reducers: dict[str, Callable] = {
        "mean": lambda w: np.mean(w, axis=1),
        "std": lambda w: np.std(w, axis=1),
        "max": lambda w: np.max(w, axis=1),
        "min": lambda w: np.min(w, axis=1),
    }
    if stat not in reducers:
        raise ValidationFailure(f"unknown rolling stat {stat!r}")
    n = len(values)
    head = window + shift - 1
    out = np.full(n, np.nan)
    if n > head:
        windows = sliding_window_view(values, window)
        reduced = reducers[stat](windows)
        out[head:] = reduced[: n - head]
    return out, undef + head


def degree_day_columns(tavg: np.ndarray, baseline: float, undef: int = 0):
    if not np.isfinite(baseline):
        raise ValidationFailure("degree-day baseline must be finite")
    cdd = np.maximum(0.0, tavg - baseline)
    hdd = np.maximum(0.0, baseline - tavg)
    return (cdd, undef), (hdd, undef)


def spike_ratio_column(values: np.ndarray, window: int, shift: int, undef: int = 0):
    """Deviation of the hour's level from its recent mean, as a ratio."""
    mean, head = rolling_column(values, window, "mean", shift, undef)
    num = values if shift == 0 else lag_column(values, shift, undef)[0]
    return (num - mean) / (mean + 1.0), head


def spike_zscore_column(values: np.ndarray, window: int, shift: int, undef: int = 0):
    """Deviation of the hour's level from its recent mean, in recent-std units."""
    mean, head = rolling_column(values, window, "mean", shift, undef)
    std, _ = rolling_column(values, window, "std", shift, undef)
    num = values if shift == 0 else lag_column(values, shift, undef)[0]
    return (num - mean) / (std + ZSCORE_EPS), head


def temp_spike_column(hi: np.ndarray, lo: np.ndarray, mode: str):
    if mode == "ratio":
        return (hi - lo) / (lo + 1.0)
    if mode == "diff":
        return hi - lo
    raise ValidationFailure(f"unknown temp spike mode {mode!r}")


def cyclical_columns(values: np.ndarray, period: float):
    if period <= 0:
        raise ValidationFailure(f"cyclical period must be positive, got {period}")
    phase = 2.0 * np.pi * values / period
    return np.sin(phase), np.cos(phase)


def quantile_threshold(values: np.ndarray, q: float, train_mask: np.ndarray) -> float:
    """Linear-interpolation quantile over defined train rows only."""
    rows = values[train_mask & np.isfinite(values)]
    if rows.size == 0:
        raise ValidationFailure("quantile threshold: empty train range")
    return float(np.quantile(rows, q, method="linear"))


# --- matrix builder ---------------------------------------------------------

class _Builder:
    def __init__(self, dataset: AlignedDataset, train_mask: np.ndarray,
                 allow_leakage: bool, calendar: HolidayCalendar):
        self.dataset = dataset
        self.train_mask = train_mask
        self.allow_leakage = allow_leakage
        self.calendar = calendar
        self.fields = local_fields(dataset.axis())
        self.source = dict(dataset.columns())          # load + weather
        self.columns: dict[str, tuple[np.ndarray, int]] = {}
        self.order: list[str] = []

    def operand(self, name: str, spec: FeatureSpec, later: set[str]):
        if name in self.columns:
            return self.columns[name]
        if name in self.source:
            return self.source[name].astype(np.float64), 0
        if name in later:
            raise SpecOrderError(
                f"spec {spec.name!r} references {name!r}, which is defined by a "
                "later spec; order specs so operands come first"
            )
        raise UnknownColumn(f"spec {spec.name!r} references unknown column {name!r}")

    def leak_guard(self, spec: FeatureSpec, operands: tuple[str, ...]):
        # Reading the target at the prediction hour is only legitimate in the
        # diagnostic leakage mode.
        if "load" in operands and not self.allow_leakage:
            raise LeakageError(
                f"spec {spec.name!r} ({spec.kind}) reads the target at the current "
                "hour; use a lag/rolling/spike form or enable the leakage mode"
            )

    def add(self, name: str, values: np.ndarray, undef: int):
        if name in self.columns or name in self.source:
            raise ValidationFailure(f"duplicate feature column {name!r}")
        self.columns[name] = (np.asarray(values, dtype=np.float64), undef)
        self.order.append(name)


def _emit(spec: FeatureSpec, b: _Builder, later: set[str]) -> None:
    p = dict(spec.params)
    kind = spec.kind

    if kind == "raw":
        col = p.get("col", spec.name)
        b.leak_guard(spec, (col,))
        values, undef = b.operand(col, spec, later)
        b.add(spec.name, values.copy(), undef)

    elif kind == "calendar":
        fields = p.get("fields", ["hour", "dayofweek", "month", "is_weekend"])
        dow = b.fields["dayofweek"]
        for f in fields:
            if f not in CALENDAR_FIELDS:
                raise ValidationFailure(f"spec {spec.name!r}: unknown calendar field {f!r}")
            if f in ("hour", "dayofweek", "month"):
                vals = b.fields[f].astype(np.float64)
            elif f == "is_weekend":
                vals = (dow >= 5).astype(np.float64)
            else:
                idx = ("is_monday", "is_tuesday", "is_wednesday", "is_thursday",
                       "is_friday", "is_saturday", "is_sunday").index(f)
                vals = (dow == idx).astype(np.float64)
            b.add(f, vals, 0)

    elif kind == "holiday":
        parts = p.get("parts", ["is_holiday", "holiday_x_hour", "is_holiday_and_cold"])
        ind = b.calendar.indicator(b.fields["ordinal"])
        if "is_holiday" in parts:
            b.add("is_holiday", ind, 0)
        if "holiday_x_hour" in parts:
            b.add("holiday_x_hour", ind * b.fields["hour"], 0)
        if "is_holiday_and_cold" in parts:
            tmin, undef = b.operand(p.get("tmin_col", "tmin"), spec, later)
            thr = p.get("cold_threshold")
            if thr is None:
                thr = quantile_threshold(tmin, p.get("cold_quantile", 0.05), b.train_mask)
            b.add("is_holiday_and_cold", ind * (tmin < thr).astype(np.float64), undef)

    elif kind == "lag":
        values, undef = b.operand(p["col"], spec, later)
        b.add(spec.name, *lag_column(values, int(p["hours"]), undef))

    elif kind == "rolling":
        shift = int(p.get("shift", 1))
        if shift < 1 and not b.allow_leakage:
            raise LeakageError(
                f"spec {spec.name!r}: rolling shift {shift} touches the current hour"
            )
        values, undef = b.operand(p["col"], spec, later)
        b.add(spec.name, *rolling_column(values, int(p["window"]), p["stat"], shift, undef))

    elif kind == "degree_day":
        tavg, undef = b.operand(p.get("col", "tavg"), spec, later)
        (cdd, cu), (hdd, hu) = degree_day_columns(tavg, float(p.get("baseline", 65.0)), undef)
        parts = p.get("parts", ["cdd", "hdd"])
        if "cdd" in parts:
            b.add(p.get("cdd_name", "CDD"), cdd, cu)
        if "hdd" in parts:
            b.add(p.get("hdd_name", "HDD"), hdd, hu)

    elif kind == "spike":
        mode = p.get("mode", "ratio")
        if mode in ("ratio", "zscore"):
            shift = int(p.get("shift", 1))
            if shift < 1 and not b.allow_leakage:
                raise LeakageError(
                    f"spec {spec.name!r}: spike shift {shift} touches the current hour"
                )
            values, undef = b.operand(p.get("col", "load"), spec, later)
            window = int(p.get("window", 24 if mode == "ratio" else 168))
            fn = spike_ratio_column if mode == "ratio" else spike_zscore_column
            b.add(spec.name, *fn(values, window, shift, undef))
        elif mode in ("temp_ratio", "temp_diff"):
            hi, hu = b.operand(p.get("hi_col", "tmax"), spec, later)
            lo, lu = b.operand(p.get("lo_col", "tavg"), spec, later)
            vals = temp_spike_column(hi, lo, mode.removeprefix("temp_"))
            b.add(spec.name, vals, max(hu, lu))
        else:
            raise ValidationFailure(f"spec {spec.name!r}: unknown spike mode {mode!r}")

    elif kind == "interaction":
        a, au = b.operand(p["a"], spec, later)
        bb, bu = b.operand(p["b"], spec, later)
        b.leak_guard(spec, (p["a"], p["b"]))
        if len(a) != len(bb):
            raise ValidationFailure(f"spec {spec.name!r}: operand length mismatch")
        b.add(spec.name, a * bb, max(au, bu))

    elif kind == "flag":
        q = float(p.get("q", 0.95))
        parts = p.get("parts", ["heat", "cold"])
        if "heat" in parts:
            hi, hu = b.operand(p.get("hi_col", "tmax"), spec, later)
            thr = quantile_threshold(hi, q, b.train_mask)
            b.add(p.get("heat_name", "is_extreme_heat_event"),
                  (hi > thr).astype(np.float64), hu)
        if "cold" in parts:
            lo, lu = b.operand(p.get("lo_col", "tmin"), spec, later)
            thr = quantile_threshold(lo, 1.0 - q, b.train_mask)
            b.add(p.get("cold_name", "is_extreme_cold_event"),
                  (lo < thr).astype(np.float64), lu)

    elif kind == "cyclical":
        col = p["col"]
        b.leak_guard(spec, (col,))
        values, undef = b.operand(col, spec, later)
        sin, cos = cyclical_columns(values, float(p.get("period", 24)))
        base = p.get("base", col)
        parts = p.get("parts", ["sin", "cos"])
        if "sin" in parts:
            b.add(f"{base}_sin", sin, undef)
        if "cos" in parts:
            b.add(f"{base}_cos", cos, undef)


def build_matrix(dataset: AlignedDataset, specs: list[FeatureSpec],
                 train_range: tuple[int, int] | None = None,
                 allow_leakage: bool = False,
                 calendar: HolidayCalendar | None = None) -> FeatureMatrix:
    """Evaluate the spec list in order and assemble the feature matrix.

    `train_range` (inclusive epoch hours) bounds every quantile-derived
    threshold so test rows can never move them; omitting it treats the whole
    axis as train, which is only appropriate in exploratory use.
    """
    seen = set()
    for s in specs:
        if s.name in seen:
            raise ValidationFailure(f"duplicate spec name {s.name!r}")
        seen.add(s.name)

    axis = dataset.axis()
    if train_range is None:
        train_mask = np.ones(len(axis), dtype=bool)
    else:
        train_mask = (axis >= train_range[0]) & (axis <= train_range[1])

    b = _Builder(dataset, train_mask, allow_leakage, calendar or HolidayCalendar())
    for i, spec in enumerate(specs):
        later = {s.name for s in specs[i + 1:]}
        _emit(spec, b, later)

    warmup = max((undef for _, undef in b.columns.values()), default=0)
    names = list(b.order)
    n = len(axis) - warmup
    if n <= 0:
        raise ValidationFailure(
            f"warmup of {warmup} rows consumes the whole {len(axis)}-row axis"
        )
    X = np.empty((n, len(names)), dtype=np.float64)
    for j, name in enumerate(names):
        X[:, j] = b.columns[name][0][warmup:]
    if not np.all(np.isfinite(X)):
        j = int(np.argwhere(~np.isfinite(X))[0][1])
        raise ValidationFailure(f"feature {names[j]!r} still undefined after warmup")
    y = dataset.load.values[warmup:].copy()
    return FeatureMatrix(dataset.start + warmup, names, X, y, warmup)


# --- stock spec sets ---------------------------------------------------------

def baseline_specs() -> list[FeatureSpec]:
    """Plain calendar, holiday, weather, and daily/weekly lag features."""
    return [
        FeatureSpec("calendar", "calendar",
                    {"fields": ["hour", "dayofweek", "month", "is_weekend"]}),
        FeatureSpec("holiday", "holiday", {"parts": ["is_holiday"]}),
        FeatureSpec("tavg", "raw", {"col": "tavg"}),
        FeatureSpec("tmin", "raw", {"col": "tmin"}),
        FeatureSpec("tmax", "raw", {"col": "tmax"}),
        FeatureSpec("prcp", "raw", {"col": "prcp"}),
        FeatureSpec("load_lag_24", "lag", {"col": "load", "hours": 24}),
        FeatureSpec("load_lag_168", "lag", {"col": "load", "hours": 168}),
    ]


def refined_specs(cdd_baseline: float = 65.0, extreme_q: float = 0.95) -> list[FeatureSpec]:
    """Baseline plus the peak-sensitive engineered features."""
    return baseline_specs() + [
        FeatureSpec("weekday_flags", "calendar", {"fields": ["is_monday"]}),
        FeatureSpec("holiday_interactions", "holiday",
                    {"parts": ["holiday_x_hour", "is_holiday_and_cold"]}),
        FeatureSpec("load_lag_48", "lag", {"col": "load", "hours": 48}),
        FeatureSpec("load_roll_mean_24", "rolling",
                    {"col": "load", "window": 24, "stat": "mean", "shift": 1}),
        FeatureSpec("load_roll_max_24", "rolling",
                    {"col": "load", "window": 24, "stat": "max", "shift": 1}),
        FeatureSpec("load_roll_std_24", "rolling",
                    {"col": "load", "window": 24, "stat": "std", "shift": 1}),
        FeatureSpec("load_roll_mean_168", "rolling",
                    {"col": "load", "window": 168, "stat": "mean", "shift": 1}),
        FeatureSpec("load_roll_std_168", "rolling",
                    {"col": "load", "window": 168, "stat": "std", "shift": 1}),
        FeatureSpec("load_roll_mean_336", "rolling",
                    {"col": "load", "window": 336, "stat": "mean", "shift": 1}),
        FeatureSpec("tavg_lag_24", "lag", {"col": "tavg", "hours": 24}),
        FeatureSpec("tmax_lag_24", "lag", {"col": "tmax", "hours": 24}),
        FeatureSpec("tmin_lag_24", "lag", {"col": "tmin", "hours": 24}),
        FeatureSpec("degree_days", "degree_day",
                    {"col": "tavg", "baseline": cdd_baseline}),
        FeatureSpec("CDD_lag_24", "lag", {"col": "CDD", "hours": 24}),
        FeatureSpec("HDD_lag_24", "lag", {"col": "HDD", "hours": 24}),
        FeatureSpec("tmax_roll_max_72", "rolling",
                    {"col": "tmax", "window": 72, "stat": "max", "shift": 1}),
        FeatureSpec("tmin_roll_min_72", "rolling",
                    {"col": "tmin", "window": 72, "stat": "min", "shift": 1}),
        FeatureSpec("load_spike_vs_mean", "spike",
                    {"mode": "ratio", "col": "load", "window": 24, "shift": 1}),
        FeatureSpec("temp_spike_vs_mean", "spike",
                    {"mode": "temp_ratio", "hi_col": "tmax", "lo_col": "tavg"}),
        FeatureSpec("CDD_x_hour", "interaction", {"a": "CDD", "b": "hour"}),
        FeatureSpec("lag_24_x_hour", "interaction", {"a": "load_lag_24", "b": "hour"}),
        FeatureSpec("extreme_events", "flag", {"q": extreme_q}),
        FeatureSpec("hour_cyc", "cyclical", {"col": "hour", "period": 24, "base": "hour"}),
        FeatureSpec("dayofweek_cyc", "cyclical",
                    {"col": "dayofweek", "period": 7, "base": "dayofweek"}),
    ]
