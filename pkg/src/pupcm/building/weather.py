"""Hourly outdoor dry-bulb temperature series: CSV I/O and a seeded synthesizer."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from ..errors import MalformedWeather
from .model import HOURS_PER_YEAR

T_MIN, T_MAX = -60.0, 60.0

# first day-of-year index of each month (non-leap)
MONTH_START = np.cumsum([0, 31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31])


@dataclass(frozen=True)
class WeatherSeries:
    temps: np.ndarray  # deg C, index = hour of year

    def __post_init__(self):
        t = np.asarray(self.temps, dtype=float)
        if t.shape != (HOURS_PER_YEAR,):
            raise MalformedWeather(f"expected {HOURS_PER_YEAR} hourly values, got {t.size}")
        if not np.all(np.isfinite(t)):
            raise MalformedWeather("non-finite temperature")
        if t.min() < T_MIN or t.max() > T_MAX:
            raise MalformedWeather(f"temperatures must lie within [{T_MIN}, {T_MAX}] C")
        object.__setattr__(self, "temps", t)

    @property
    def hours(self) -> np.ndarray:
        return np.arange(HOURS_PER_YEAR)

    def monthly_means(self) -> np.ndarray:
        return np.array([self.temps[24 * a:24 * b].mean()
                         for a, b in zip(MONTH_START[:-1], MONTH_START[1:])])

    @classmethod
    def constant(cls, value: float) -> "WeatherSeries":
        return cls(np.full(HOURS_PER_YEAR, float(value)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("hour,temp_c\n")
        for h, t in enumerate(self.temps):
            buf.write(f"{h},{t:.4f}\n")
        return buf.getvalue()


def load_weather(path) -> WeatherSeries:
    """Read a ``hour,temp_c`` CSV with exactly 8760 data rows."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip().lower() for c in rows[0]] != ["hour", "temp_c"]:
        raise MalformedWeather("weather CSV needs the header 'hour,temp_c'")
    data = [r for r in rows[1:] if r]
    if len(data) != HOURS_PER_YEAR:
        raise MalformedWeather(f"expected {HOURS_PER_YEAR} data rows, got {len(data)}")
    temps = np.empty(HOURS_PER_YEAR)
    for n, row in enumerate(data):
        try:
            hour, temp = int(row[0]), float(row[1])
        except (ValueError, IndexError):
            raise MalformedWeather(f"row {n + 2}: non-numeric entry {row!r}") from None
        if hour != n:
            raise MalformedWeather(f"row {n + 2}: hour {hour} out of sequence")
        temps[n] = temp
    return WeatherSeries(temps)


def synthesize_weather(mean: float = 4.5, annual_amplitude: float = 11.5,
                       diurnal_amplitude: float = 4.0, noise_std: float = 2.0,
                       seed: int = 0, peak_day: float = 196.0,
                       peak_hour: float = 9.0) -> WeatherSeries:
    """Annual + diurnal sinusoids plus white noise.

    Defaults give a subarctic coastal climate with January near -7 C and July
    near +16 C monthly means. The diurnal term peaks six hours after
    ``peak_hour``.
    """
    hours = np.arange(HOURS_PER_YEAR, dtype=float)
    day = hours / 24.0
    hod = hours % 24.0
    t = (mean
         + annual_amplitude * np.cos(2 * np.pi * (day - peak_day) / 365.0)
         + diurnal_amplitude * np.sin(2 * np.pi * (hod - peak_hour) / 24.0))
    if noise_std > 0:
        t = t + np.random.default_rng(seed).normal(0.0, noise_std, HOURS_PER_YEAR)
    return WeatherSeries(np.clip(t, T_MIN, T_MAX))
