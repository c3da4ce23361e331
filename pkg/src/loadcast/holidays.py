"""US federal holiday calendar with observed-day shifting.

Fixed-date holidays falling on Saturday are observed the preceding Friday,
Sunday ones the following Monday.  The rule set is the post-2021 one (eleven
holidays including Juneteenth), so every year from 2022 on yields exactly
eleven observed dates; New Year's Day observed on Dec 31 of the prior year
still counts toward the generating year.
"""

from __future__ import annotations

import calendar
from dataclasses import dataclass
from datetime import date, timedelta

import numpy as np


@dataclass(frozen=True)
class FixedDate:
    name: str
    month: int
    day: int
    first_year: int | None = None

    def observed(self, year: int) -> date | None:
        if self.first_year is not None and year < self.first_year:
            return None
        d = date(year, self.month, self.day)
        if d.weekday() == 5:  # Saturday -> Friday
            return d - timedelta(days=1)
        if d.weekday() == 6:  # Sunday -> Monday
            return d + timedelta(days=1)
        return d


@dataclass(frozen=True)
class NthWeekday:
    name: str
    month: int
    weekday: int  # 0=Monday
    n: int        # 1-based; -1 means last

    def observed(self, year: int) -> date:
        days = [
            date(year, self.month, d)
            for d in range(1, calendar.monthrange(year, self.month)[1] + 1)
            if date(year, self.month, d).weekday() == self.weekday
        ]
        return days[self.n - 1] if self.n > 0 else days[-1]


US_FEDERAL_RULES = (
    FixedDate("new_years_day", 1, 1),
    NthWeekday("mlk_day", 1, 0, 3),
    NthWeekday("washingtons_birthday", 2, 0, 3),
    NthWeekday("memorial_day", 5, 0, -1),
    FixedDate("juneteenth", 6, 19, first_year=2021),
    FixedDate("independence_day", 7, 4),
    NthWeekday("labor_day", 9, 0, 1),
    NthWeekday("columbus_day", 10, 0, 2),
    FixedDate("veterans_day", 11, 11),
    NthWeekday("thanksgiving", 11, 3, 4),
    FixedDate("christmas", 12, 25),
)


class HolidayCalendar:
    """Observed-date lookup over a set of holiday rules."""

    def __init__(self, rules=US_FEDERAL_RULES):
        self.rules = tuple(rules)
        self._cache: dict[int, dict[date, str]] = {}

    def holidays_for_year(self, year: int) -> dict[date, str]:
        """Observed dates generated by `year`'s holidays (may spill into year-1)."""
        if year not in self._cache:
            out = {}
            for rule in self.rules:
                d = rule.observed(year)
                if d is not None:
                    out[d] = rule.name
            self._cache[year] = out
        return self._cache[year]

    def is_holiday(self, d: date) -> bool:
        for year in (d.year, d.year + 1):  # Jan 1 can be observed on Dec 31
            if d in self.holidays_for_year(year):
                return True
        return False

    def indicator(self, ordinals: np.ndarray) -> np.ndarray:
        """0/1 vector over local-date ordinals (one entry per axis hour)."""
        uniq = np.unique(ordinals)
        lookup = {o: float(self.is_holiday(date.fromordinal(int(o)))) for o in uniq}
        return np.array([lookup[o] for o in ordinals], dtype=np.float64)
