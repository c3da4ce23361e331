"""Core data containers shared by ingestion and feature construction."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path

import numpy as np

from .errors import AxisMismatch, ValidationFailure
from .timebase import hour_range, render_hour


class FillFlag(IntEnum):
    OBSERVED = 0
    INTERPOLATED = 1
    FORWARD_FILLED = 2


@dataclass(frozen=True)
class SparseSeries:
    """Raw parse result: strictly increasing hours, values may contain NaN."""

    name: str
    hours: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if len(self.hours) != len(self.values):
            raise ValidationFailure(f"series {self.name!r}: hours/values length mismatch")
        if len(self.hours) > 1 and not np.all(np.diff(self.hours) > 0):
            raise ValidationFailure(f"series {self.name!r}: hours not strictly increasing")

    def __len__(self) -> int:
        return len(self.hours)


@dataclass(frozen=True)
class HourlySeries:
    """Gap-free hourly series: one value per hour from `start`, no NaN."""

    name: str
    start: int
    values: np.ndarray
    fill_flags: np.ndarray

    def __post_init__(self):
        if len(self.values) != len(self.fill_flags):
            raise ValidationFailure(
                f"series {self.name!r}: values/fill_flags length mismatch"
            )
        bad = np.flatnonzero(~np.isfinite(self.values))
        if bad.size:
            raise ValidationFailure(
                f"series {self.name!r}: non-finite value at "
                f"{render_hour(self.start + int(bad[0]))}"
            )

    def __len__(self) -> int:
        return len(self.values)

    @property
    def end(self) -> int:
        """Last covered hour (inclusive)."""
        return self.start + len(self.values) - 1

    def axis(self) -> np.ndarray:
        return hour_range(self.start, len(self.values))

    def slice_hours(self, start: int, end: int) -> "HourlySeries":
        """Sub-series covering [start, end], both inclusive."""
        if start < self.start or end > self.end or end < start:
            raise AxisMismatch(
                f"series {self.name!r}: slice [{render_hour(start)}, {render_hour(end)}] "
                "outside covered range"
            )
        i, j = start - self.start, end - self.start + 1
        return HourlySeries(self.name, start, self.values[i:j], self.fill_flags[i:j])

    def fill_counts(self) -> dict[str, int]:
        return {
            "observed": int(np.sum(self.fill_flags == FillFlag.OBSERVED)),
            "interpolated": int(np.sum(self.fill_flags == FillFlag.INTERPOLATED)),
            "forward_filled": int(np.sum(self.fill_flags == FillFlag.FORWARD_FILLED)),
        }


@dataclass(frozen=True)
class CityWeather:
    """One city's regularized weather series plus its population weight."""

    city: str
    population_weight: float
    series: dict[str, HourlySeries]

    def __post_init__(self):
        if self.population_weight < 0:
            raise ValidationFailure(
                f"city {self.city!r}: population_weight must be nonnegative"
            )


@dataclass(frozen=True)
class AlignedDataset:
    """Load plus region-weighted weather on one contiguous hourly axis."""

    start: int
    load: HourlySeries
    weather: dict[str, HourlySeries]
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.load)
        if self.load.start != self.start:
            raise ValidationFailure("load series does not start on the dataset axis")
        for name, s in self.weather.items():
            if s.start != self.start or len(s) != n:
                raise ValidationFailure(
                    f"weather series {name!r} does not share the dataset axis"
                )

    def __len__(self) -> int:
        return len(self.load)

    def axis(self) -> np.ndarray:
        return hour_range(self.start, len(self))

    def columns(self) -> dict[str, np.ndarray]:
        """All variables (load first) as plain arrays."""
        out = {"load": self.load.values}
        for name, s in self.weather.items():
            out[name] = s.values
        return out

    # --- persistence -------------------------------------------------------

    def write_csv(self, path: str | Path) -> None:
        cols = self.columns()
        names = list(cols)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["timestamp", *names])
            for i, h in enumerate(self.axis()):
                w.writerow([render_hour(int(h))] + [repr(float(cols[c][i])) for c in names])

    def write_provenance(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            json.dump(self.provenance, fh, indent=2, sort_keys=True)
            fh.write("\n")


def read_dataset_csv(path: str | Path) -> AlignedDataset:
    """Load a dataset written by :meth:`AlignedDataset.write_csv`.

    Fill flags are not stored in the CSV; everything reads back as observed
    (the provenance report keeps the original fill counts).
    """
    from .timebase import parse_hour  # local import to avoid cycle at module load

    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        names = header[1:]
        hours, rows = [], []
        for row in reader:
            hours.append(parse_hour(row[0]))
            rows.append([float(v) for v in row[1:]])
    hours = np.asarray(hours, dtype=np.int64)
    data = np.asarray(rows, dtype=np.float64)
    if len(hours) == 0:
        raise ValidationFailure(f"dataset file {path} is empty")
    if not np.all(np.diff(hours) == 1):
        raise ValidationFailure(f"dataset file {path} does not have a contiguous hourly axis")
    start = int(hours[0])
    flags = np.zeros(len(hours), dtype=np.uint8)

    def series(idx: int, name: str) -> HourlySeries:
        return HourlySeries(name, start, data[:, idx].copy(), flags.copy())

    load = series(names.index("load"), "load")
    weather = {n: series(i, n) for i, n in enumerate(names) if n != "load"}
    return AlignedDataset(start, load, weather, {"source": str(path)})
