"""Lumped RC building model with optional PCM layers, annual RK4 runs and reports."""
from .integrate import SimulationTrace, rk4_integrate, rk4_solve, rk4_step
from .model import (BuildingModel, Heating, Layer, PcmProperties, WallAssembly, Zone,
                    effective_heat_capacity, fuel_power, load_model, model_from_dict,
                    specific_enthalpy, thermostat, with_pcm_layer)
from .network import NetworkSystem, assemble_ode, discretize_wall, steady_ua_to_exterior
from .reports import (ComfortReport, EnergyLedger, ScenarioComparison, ScenarioResult,
                      build_ledger, comfort_bins, comfort_report, compare_scenarios,
                      daily_swing, energy_ledger, run_scenario)
from .weather import WeatherSeries, load_weather, synthesize_weather

__all__ = [
    "BuildingModel", "ComfortReport", "EnergyLedger", "Heating", "Layer", "NetworkSystem",
    "PcmProperties", "ScenarioComparison", "ScenarioResult", "SimulationTrace",
    "WallAssembly", "WeatherSeries", "Zone", "assemble_ode", "build_ledger", "comfort_bins",
    "comfort_report", "compare_scenarios", "daily_swing", "discretize_wall",
    "effective_heat_capacity", "energy_ledger", "fuel_power", "load_model", "load_weather",
    "model_from_dict", "rk4_integrate", "rk4_solve", "rk4_step", "run_scenario",
    "specific_enthalpy", "steady_ua_to_exterior", "synthesize_weather", "thermostat",
    "with_pcm_layer",
]
