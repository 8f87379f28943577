"""Classic fixed-step RK4: a generic driver and the annual building run."""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .. import _backend
from ..errors import NonFiniteState
from .model import HOURS_PER_YEAR
from .network import NetworkSystem
from .weather import WeatherSeries

YEAR_S = HOURS_PER_YEAR * 3600.0


def rk4_step(f: Callable, t: float, y: np.ndarray, dt: float) -> np.ndarray:
    k1 = f(t, y)
    k2 = f(t + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = f(t + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = f(t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_solve(f: Callable, y0, t0: float, dt: float, n_steps: int,
              sample_every: int = 1):
    """Integrate ``y' = f(t, y)``; returns sample times and states (incl. t0)."""
    y = np.atleast_1d(np.asarray(y0, dtype=float)).copy()
    times, states = [t0], [y.copy()]
    for k in range(1, n_steps + 1):
        y = rk4_step(f, t0 + (k - 1) * dt, y, dt)
        if not np.all(np.isfinite(y)):
            raise NonFiniteState(t0 + k * dt)
        if k % sample_every == 0:
            times.append(t0 + k * dt)
            states.append(y.copy())
    return np.array(times), np.array(states)


@dataclass
class SimulationTrace:
    """Hourly samples of an annual run.

    Row ``h`` holds the state at the end of hour ``h`` and the mean heating
    power delivered during that hour.
    """
    zone_names: list
    zone_temp: np.ndarray  # (hours, zones) deg C
    heat_w: np.ndarray  # (hours, zones) W, hour-averaged
    outdoor: np.ndarray  # (hours,) deg C at the sample instant
    states: np.ndarray = field(repr=False)  # (hours, nodes)
    dt: float = 60.0
    backend: str = field(default="", compare=False)

    @property
    def n_hours(self) -> int:
        return self.zone_temp.shape[0]

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def zone_index(self, zone: str) -> int:
        return self.zone_names.index(zone)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("hour,zone,temp_c,heat_w,outdoor_c\n")
        for h in range(self.n_hours):
            for z, name in enumerate(self.zone_names):
                buf.write(f"{h},{name},{self.zone_temp[h, z]:.6f},"
                          f"{self.heat_w[h, z]:.6f},{self.outdoor[h]:.4f}\n")
        return buf.getvalue()


def rk4_integrate(system: NetworkSystem, weather: WeatherSeries, dt: float = 60.0,
                  horizon: float = YEAR_S, y0: Optional[np.ndarray] = None,
                  backend: Optional[str] = None) -> SimulationTrace:
    """Advance the building network with fixed-step RK4, sampling hourly."""
    if dt <= 0 or abs(3600.0 / dt - round(3600.0 / dt)) > 1e-12:
        raise ValueError("dt must divide 3600 s")
    steps_per_hour = int(round(3600.0 / dt))
    n_hours = int(round(horizon / 3600.0))
    if n_hours < 1 or abs(n_hours * 3600.0 - horizon) > 1e-9:
        raise ValueError("horizon must be a positive whole number of hours")
    y0 = system.initial_state() if y0 is None else np.asarray(y0, dtype=float)
    kernel = _backend.get(backend)
    outdoor = weather.temps
    samples, energy, _ = kernel.rk4_network(
        y0, *system.kernel_args(), outdoor, float(dt), n_hours * steps_per_hour,
        steps_per_hour)
    sample_hours = np.arange(1, n_hours + 1) % outdoor.size
    return SimulationTrace(
        zone_names=list(system.zone_names),
        zone_temp=samples[:, system.zone_node],
        heat_w=energy / 3600.0,
        outdoor=outdoor[sample_hours],
        states=samples,
        dt=float(dt),
        backend="compiled" if kernel.__name__.endswith("_core") else "python",
    )
