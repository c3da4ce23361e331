"""CSV ingestion: parse, gap-fill, population-weight, and align hourly series.

Gap filling happens per city before any cross-city weighting, so one city's
sensor outage cannot contaminate the regional aggregate.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import (
    AxisMismatch,
    ConflictingDuplicate,
    EmptyIntersection,
    EmptySeries,
    LeadingGap,
    ParseError,
    TimestampError,
    ValidationFailure,
)
from .series import AlignedDataset, CityWeather, FillFlag, HourlySeries, SparseSeries
from .timebase import parse_hour, render_hour

DEFAULT_MAX_INTERP_GAP = 3  # hours; longer gaps are forward-filled


def _parse_rows(path: str | Path, timestamp_col: str, value_cols: list[str]):
    """Yield (hour, values) per row with 1-based line numbers in errors."""
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise EmptySeries(f"{path}: file is empty")
        missing = [c for c in [timestamp_col, *value_cols] if c not in reader.fieldnames]
        if missing:
            raise ParseError(f"{path}: missing column(s) {missing}; header is {reader.fieldnames}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            try:
                hour = parse_hour(row[timestamp_col])
            except TimestampError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from None
            values = []
            for col in value_cols:
                cell = (row[col] or "").strip()
                if cell == "":
                    values.append(np.nan)  # empty cell = missing observation
                    continue
                try:
                    values.append(float(cell))
                except ValueError:
                    raise ParseError(
                        f"{path}:{lineno}: column {col!r} has non-numeric value {cell!r}"
                    ) from None
            rows.append((hour, values))
    if not rows:
        raise EmptySeries(f"{path}: no data rows")
    return rows


def _dedupe(rows, label: str):
    """Sort by hour; collapse equal duplicates, reject conflicting ones."""
    rows.sort(key=lambda r: r[0])
    out = [rows[0]]
    for hour, values in rows[1:]:
        prev_hour, prev_values = out[-1]
        if hour != prev_hour:
            out.append((hour, values))
            continue
        same = all(
            (np.isnan(a) and np.isnan(b)) or a == b
            for a, b in zip(prev_values, values)
        )
        if not same:
            raise ConflictingDuplicate(
                f"{label}: duplicate rows at {render_hour(hour)} disagree "
                f"({prev_values} vs {values})"
            )
    return out


def parse_load_csv(path: str | Path, timestamp_col: str = "timestamp",
                   value_col: str = "load") -> SparseSeries:
    """Read an hourly load CSV into a time-sorted, deduplicated series."""
    rows = _dedupe(_parse_rows(path, timestamp_col, [value_col]), str(path))
    hours = np.array([h for h, _ in rows], dtype=np.int64)
    values = np.array([v[0] for _, v in rows], dtype=np.float64)
    return SparseSeries("load", hours, values)


def parse_weather_csv(path: str | Path, timestamp_col: str = "timestamp",
                      variable_cols: tuple[str, ...] = ("tavg", "tmin", "tmax", "prcp", "snow"),
                      ) -> dict[str, SparseSeries]:
    """Read a per-city weather CSV; one sparse series per variable column."""
    rows = _dedupe(_parse_rows(path, timestamp_col, list(variable_cols)), str(path))
    hours = np.array([h for h, _ in rows], dtype=np.int64)
    table = np.array([v for _, v in rows], dtype=np.float64)
    return {
        var: SparseSeries(var, hours, table[:, i].copy())
        for i, var in enumerate(variable_cols)
    }


def regularize(series: SparseSeries | HourlySeries,
               max_interp_gap: int = DEFAULT_MAX_INTERP_GAP) -> HourlySeries:
    """Fill a sparse series into a gap-free hourly one.

    Gaps of at most `max_interp_gap` hours are linearly interpolated between
    their bounding observations; longer gaps (and trailing gaps) are
    forward-filled.  Already-regular series pass through unchanged, which
    makes the operation idempotent including its fill flags.
    """
    if isinstance(series, HourlySeries):
        return series

    finite = np.isfinite(series.values)
    if finite.sum() < 2:
        raise EmptySeries(
            f"series {series.name!r}: need at least 2 observed points, have {int(finite.sum())}"
        )
    if not finite[0]:
        raise LeadingGap(
            f"series {series.name!r}: first row at {render_hour(int(series.hours[0]))} "
            "is missing; nothing to fill from"
        )

    start = int(series.hours[0])
    n = int(series.hours[-1]) - start + 1
    values = np.full(n, np.nan)
    flags = np.full(n, FillFlag.FORWARD_FILLED, dtype=np.uint8)
    obs_idx = (series.hours - start).astype(np.int64)[finite]
    values[obs_idx] = series.values[finite]
    flags[obs_idx] = FillFlag.OBSERVED

    # Walk gap runs between consecutive observations.
    for left, right in zip(obs_idx[:-1], obs_idx[1:]):
        gap = right - left - 1
        if gap == 0:
            continue
        sl = slice(left + 1, right)
        if gap <= max_interp_gap:
            values[sl] = np.interp(
                np.arange(left + 1, right), [left, right], [values[left], values[right]]
            )
            flags[sl] = FillFlag.INTERPOLATED
        else:
            values[sl] = values[left]
            flags[sl] = FillFlag.FORWARD_FILLED
    # Trailing gap has no right anchor: forward-fill unconditionally.
    last = obs_idx[-1]
    if last < n - 1:
        values[last + 1:] = values[last]
        flags[last + 1:] = FillFlag.FORWARD_FILLED

    return HourlySeries(series.name, start, values, flags)


def weight_weather(cities: list[CityWeather]) -> dict[str, HourlySeries]:
    """Population-weighted average of each weather variable across cities.

    Weights are normalized to sum to one.  The output keeps the shared axis;
    a fill flag is only "observed" where every contributing city observed.
    """
    if not cities:
        raise EmptySeries("weight_weather: no cities given")
    total = sum(c.population_weight for c in cities)
    if total <= 0:
        raise ValidationFailure("weight_weather: city weights sum to zero")
    weights = np.array([c.population_weight / total for c in cities])

    variables = list(cities[0].series)
    for c in cities[1:]:
        if list(c.series) != variables:
            raise AxisMismatch(
                f"city {c.city!r} has variables {sorted(c.series)}, "
                f"expected {sorted(variables)}"
            )

    out: dict[str, HourlySeries] = {}
    for var in variables:
        base = cities[0].series[var]
        for c in cities[1:]:
            s = c.series[var]
            if s.start != base.start or len(s) != len(base):
                raise AxisMismatch(
                    f"city {c.city!r} variable {var!r} axis differs from {cities[0].city!r}"
                )
        stacked = np.stack([c.series[var].values for c in cities])
        combined = weights @ stacked
        # Worst-case flag across cities: forward-filled > interpolated > observed.
        flags = np.max(np.stack([c.series[var].fill_flags for c in cities]), axis=0)
        out[var] = HourlySeries(var, base.start, combined, flags.astype(np.uint8))
    return out


def align(load: HourlySeries, weather: dict[str, HourlySeries]) -> AlignedDataset:
    """Trim load and weather to their common hourly range and validate."""
    series = [load, *weather.values()]
    start = max(s.start for s in series)
    end = min(s.end for s in series)
    if end < start:
        raise EmptyIntersection(
            "load and weather ranges do not overlap: "
            + ", ".join(f"{s.name}=[{render_hour(s.start)}..{render_hour(s.end)}]" for s in series)
        )

    trimmed = {"load": load.slice_hours(start, end)}
    trimmed.update({name: s.slice_hours(start, end) for name, s in weather.items()})

    provenance = {
        "start": render_hour(start),
        "end": render_hour(end),
        "rows": end - start + 1,
        "trimmed": {s.name: (len(s) - (end - start + 1)) for s in series},
        "fill_counts": {name: s.fill_counts() for name, s in trimmed.items()},
    }
    # HourlySeries construction already rejects NaN; re-check to report the
    # offending series and hour if an upstream step produced a bad array.
    for name, s in trimmed.items():
        bad = np.flatnonzero(~np.isfinite(s.values))
        if bad.size:
            raise ValidationFailure(
                f"series {name!r} has a non-finite value at "
                f"{render_hour(start + int(bad[0]))}"
            )
    return AlignedDataset(start, trimmed["load"],
                          {k: v for k, v in trimmed.items() if k != "load"},
                          provenance)
