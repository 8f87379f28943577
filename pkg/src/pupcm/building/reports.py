"""Reductions of a simulation trace: energy ledger, comfort hours, scenario deltas."""
from __future__ import annotations

import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .integrate import SimulationTrace, rk4_integrate
from .model import BuildingModel
from .network import assemble_ode
from .weather import WeatherSeries

J_PER_KWH = 3.6e6

# Row order of the purchased-energy table
LEDGER_ROWS = (
    "lighting_facility", "electric_cooling", "hvac_aux", "fuel_heating",
    "total_facility_electric", "total_facility_fuel", "total",
    "equipment_tenant", "total_tenant_electric", "grand_total",
)

COMFORT_BINS = ("optimal", "good", "acceptable", "unacceptable")

SUMMER_DAYS = (151, 243)  # 1 June .. 31 August, day-of-year indices


@dataclass(frozen=True)
class EnergyLedger:
    kwh: dict
    floor_area: Optional[float] = None

    def __getitem__(self, key):
        return self.kwh[key]

    def to_dict(self) -> dict:
        out = {"kwh": {r: self.kwh[r] for r in LEDGER_ROWS}}
        if self.floor_area:
            out["kwh_per_m2"] = {r: self.kwh[r] / self.floor_area for r in LEDGER_ROWS}
            out["floor_area_m2"] = self.floor_area
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("category,kwh,kwh_per_m2\n")
        for r in LEDGER_ROWS:
            per = f"{self.kwh[r] / self.floor_area:.3f}" if self.floor_area else ""
            buf.write(f"{r},{self.kwh[r]:.3f},{per}\n")
        return buf.getvalue()


def build_ledger(fuel_heating_kwh: float, exogenous: dict,
                 floor_area: Optional[float] = None) -> EnergyLedger:
    k = {
        "lighting_facility": float(exogenous.get("lighting_facility", 0.0)),
        "electric_cooling": float(exogenous.get("electric_cooling", 0.0)),
        "hvac_aux": float(exogenous.get("hvac_aux", 0.0)),
        "equipment_tenant": float(exogenous.get("equipment_tenant", 0.0)),
        "fuel_heating": float(fuel_heating_kwh),
    }
    k["total_facility_electric"] = k["lighting_facility"] + k["electric_cooling"] + k["hvac_aux"]
    k["total_facility_fuel"] = k["fuel_heating"]
    k["total"] = k["total_facility_electric"] + k["total_facility_fuel"]
    k["total_tenant_electric"] = k["equipment_tenant"]
    k["grand_total"] = k["total"] + k["total_tenant_electric"]
    return EnergyLedger(k, floor_area)


def fuel_heating_kwh(trace: SimulationTrace, efficiency) -> float:
    eff = np.broadcast_to(np.asarray(efficiency, dtype=float), (trace.heat_w.shape[1],))
    return float(np.sum(trace.heat_w.sum(axis=0) * 3600.0 / eff) / J_PER_KWH)


def energy_ledger(trace: SimulationTrace, model: BuildingModel) -> EnergyLedger:
    eff = [model.zone(name).heating.efficiency for name in trace.zone_names]
    return build_ledger(fuel_heating_kwh(trace, eff), model.exogenous_kwh, model.floor_area)


def comfort_bins(temps) -> np.ndarray:
    """Bin index per temperature: 0 optimal [21, 25], 1 good [20, 21) or (25, 26],
    2 acceptable [18, 20), 3 unacceptable below 18 or above 26."""
    t = np.asarray(temps, dtype=float)
    out = np.full(t.shape, 3, dtype=np.int8)
    out[(t >= 18.0) & (t < 20.0)] = 2
    out[((t >= 20.0) & (t < 21.0)) | ((t > 25.0) & (t <= 26.0))] = 1
    out[(t >= 21.0) & (t <= 25.0)] = 0
    return out


@dataclass(frozen=True)
class ComfortReport:
    zone: str
    optimal: int
    good: int
    acceptable: int
    unacceptable: int

    @property
    def total(self) -> int:
        return self.optimal + self.good + self.acceptable + self.unacceptable

    def as_dict(self) -> dict:
        return {"zone": self.zone, **{b: getattr(self, b) for b in COMFORT_BINS}}


def comfort_report(trace: SimulationTrace, zone: str) -> ComfortReport:
    counts = np.bincount(comfort_bins(trace.zone_temp[:, trace.zone_index(zone)]),
                         minlength=4)
    return ComfortReport(zone, *(int(c) for c in counts))


def daily_swing(temps: np.ndarray, days: Optional[tuple] = None) -> float:
    """Mean daily peak-to-peak of an hourly series over ``days`` = (first, stop)."""
    t = np.asarray(temps, dtype=float)
    n_days = t.size // 24
    daily = t[:n_days * 24].reshape(n_days, 24)
    if days is not None:
        daily = daily[days[0]:days[1]]
    return float(np.mean(daily.max(axis=1) - daily.min(axis=1)))


@dataclass
class ScenarioResult:
    model: BuildingModel
    trace: SimulationTrace
    ledger: EnergyLedger
    comfort: ComfortReport

    def summary(self) -> dict:
        z = self.trace.zone_index(self.comfort.zone)
        temps = self.trace.zone_temp[:, z]
        return {
            "ledger": self.ledger.to_dict(),
            "comfort": self.comfort.as_dict(),
            "summer_daily_swing_c": daily_swing(temps, SUMMER_DAYS),
            "annual_peak_to_peak_c": float(temps.max() - temps.min()),
        }


def run_scenario(model: BuildingModel, weather: WeatherSeries, dt: float = 60.0,
                 backend: Optional[str] = None) -> ScenarioResult:
    trace = rk4_integrate(assemble_ode(model), weather, dt=dt, backend=backend)
    zone = model.comfort_zone or model.zone_names[0]
    return ScenarioResult(model, trace, energy_ledger(trace, model),
                          comfort_report(trace, zone))


def _run_job(args):
    return run_scenario(*args)


def _pct(new, old):
    return 0.0 if old == 0 else 100.0 * (new - old) / old


@dataclass
class ScenarioComparison:
    base: ScenarioResult
    pcm: ScenarioResult

    def to_dict(self) -> dict:
        sb, sp_ = self.base.summary(), self.pcm.summary()
        fb, fp = self.base.ledger["fuel_heating"], self.pcm.ledger["fuel_heating"]
        gb, gp = self.base.ledger["grand_total"], self.pcm.ledger["grand_total"]
        return {
            "base": sb,
            "pcm": sp_,
            "delta": {
                "fuel_heating_kwh": fp - fb,
                "fuel_heating_pct": _pct(fp, fb),
                "grand_total_kwh": gp - gb,
                "grand_total_pct": _pct(gp, gb),
                "comfort_hours": {b: sp_["comfort"][b] - sb["comfort"][b]
                                  for b in COMFORT_BINS},
                "summer_daily_swing_c":
                    sp_["summer_daily_swing_c"] - sb["summer_daily_swing_c"],
                "annual_peak_to_peak_c":
                    sp_["annual_peak_to_peak_c"] - sb["annual_peak_to_peak_c"],
            },
        }

    @property
    def delta(self) -> dict:
        return self.to_dict()["delta"]

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def compare_scenarios(model_base: BuildingModel, model_pcm: BuildingModel,
                      weather: WeatherSeries, dt: float = 60.0,
                      backend: Optional[str] = None,
                      workers: int = 1) -> ScenarioComparison:
    """Run both models on the same weather; deltas are pcm minus base."""
    jobs = [(model_base, weather, dt, backend), (model_pcm, weather, dt, backend)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=2) as ex:
            base, pcm = ex.map(_run_job, jobs)
    else:
        base, pcm = (_run_job(j) for j in jobs)
    return ScenarioComparison(base, pcm)
