"""Building description: layers, wall assemblies, zones and the thermostat."""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from ..errors import ConfigError

EXTERIOR = "exterior"
HOURS_PER_YEAR = 8760

# Annual exogenous purchased energy, kWh (lighting, cooling, HVAC aux, tenant equipment)
DEFAULT_EXOGENOUS_KWH = {
    "lighting_facility": 32199.0,
    "electric_cooling": 16062.0,
    "hvac_aux": 7258.0,
    "equipment_tenant": 24149.0,
}


@dataclass(frozen=True)
class PcmProperties:
    latent_heat: float  # J/kg
    melt_low: float  # deg C
    melt_high: float  # deg C

    def __post_init__(self):
        if self.latent_heat <= 0:
            raise ConfigError("latent_heat must be positive")
        if not self.melt_low < self.melt_high:
            raise ConfigError("melt range must satisfy melt_low < melt_high")


@dataclass(frozen=True)
class Layer:
    name: str
    thickness: float  # m
    conductivity: float  # W/(m K)
    density: float  # kg/m^3
    specific_heat: float  # J/(kg K), sensible part
    pcm: Optional[PcmProperties] = None

    def __post_init__(self):
        for attr in ("thickness", "conductivity", "density", "specific_heat"):
            if not getattr(self, attr) > 0:
                raise ConfigError(f"layer {self.name!r}: {attr} must be positive")

    @property
    def resistance(self) -> float:
        return self.thickness / self.conductivity


def effective_heat_capacity(T: float, layer: Layer) -> float:
    """Specific heat with latent heat spread uniformly over the melt range."""
    c = layer.specific_heat
    pcm = layer.pcm
    if pcm is not None and pcm.melt_low <= T <= pcm.melt_high:
        c += pcm.latent_heat / (pcm.melt_high - pcm.melt_low)
    return c


def specific_enthalpy(T: float, layer: Layer, T_ref: float = 0.0) -> float:
    """Integral of the effective heat capacity from ``T_ref`` to ``T``, J/kg."""
    h = layer.specific_heat * (T - T_ref)
    pcm = layer.pcm
    if pcm is not None:
        width = pcm.melt_high - pcm.melt_low

        def melted(x):
            return min(max(x - pcm.melt_low, 0.0), width) / width

        h += pcm.latent_heat * (melted(T) - melted(T_ref))
    return h


@dataclass(frozen=True)
class WallAssembly:
    name: str
    side_a: str  # EXTERIOR or a zone name; first layer faces this side
    side_b: str  # zone name; last layer faces this side
    layers: tuple
    area: float  # m^2
    nodes_per_layer: int = 1
    h_ext: float = 25.0  # film coefficient on side_a, W/(m^2 K)
    h_int: float = 7.7  # film coefficient on side_b, W/(m^2 K)

    def __post_init__(self):
        if not self.layers:
            raise ConfigError(f"wall {self.name!r} needs at least one layer")
        if not self.area > 0:
            raise ConfigError(f"wall {self.name!r}: area must be positive")
        if self.nodes_per_layer < 1:
            raise ConfigError(f"wall {self.name!r}: nodes_per_layer must be >= 1")
        if self.h_ext <= 0 or self.h_int <= 0:
            raise ConfigError(f"wall {self.name!r}: film coefficients must be positive")

    @property
    def u_value(self) -> float:
        r = 1.0 / self.h_ext + sum(l.resistance for l in self.layers) + 1.0 / self.h_int
        return 1.0 / r

    @property
    def ua(self) -> float:
        return self.u_value * self.area

    @property
    def has_pcm(self) -> bool:
        return any(l.pcm is not None for l in self.layers)


@dataclass(frozen=True)
class Heating:
    setpoint: float = 21.0  # deg C
    max_power: float = 5000.0  # W
    efficiency: float = 1.0
    kp: float = 500.0  # W/K

    def __post_init__(self):
        if not 0 < self.efficiency <= 1:
            raise ConfigError("heating efficiency must lie in (0, 1]")
        if self.max_power < 0 or self.kp < 0:
            raise ConfigError("max_power and kp must be non-negative")


@dataclass(frozen=True)
class Zone:
    name: str
    capacitance: float  # J/K, air plus furnishings
    gains: object = 0.0  # W: constant, 24-hour profile, or 8760 hourly values
    heating: Heating = field(default_factory=Heating)
    infiltration_ua: float = 0.0  # W/K
    window_ua: float = 0.0  # W/K

    def __post_init__(self):
        if not self.capacitance > 0:
            raise ConfigError(f"zone {self.name!r}: capacitance must be positive")
        self.gain_schedule()  # validates shape

    def gain_schedule(self) -> np.ndarray:
        g = np.atleast_1d(np.asarray(self.gains, dtype=float))
        if g.size == 1:
            return np.full(HOURS_PER_YEAR, g[0])
        if g.size == 24:
            return np.tile(g, HOURS_PER_YEAR // 24)
        if g.size == HOURS_PER_YEAR:
            return g.copy()
        raise ConfigError(f"zone {self.name!r}: gains must have 1, 24 or 8760 entries")


def thermostat(T_zone: float, zone: Zone) -> float:
    """Proportional heating power, clamped to [0, max_power], W."""
    h = zone.heating
    return min(max(h.kp * (h.setpoint - T_zone), 0.0), h.max_power)


def fuel_power(T_zone: float, zone: Zone) -> float:
    return thermostat(T_zone, zone) / zone.heating.efficiency


@dataclass(frozen=True)
class BuildingModel:
    zones: tuple
    walls: tuple
    floor_area: float = 120.0
    exogenous_kwh: dict = field(default_factory=lambda: dict(DEFAULT_EXOGENOUS_KWH))
    comfort_zone: Optional[str] = None
    initial_temperature: float = 20.0
    name: str = "building"

    def __post_init__(self):
        names = [z.name for z in self.zones]
        if not names:
            raise ConfigError("model needs at least one zone")
        if len(set(names)) != len(names) or EXTERIOR in names:
            raise ConfigError("zone names must be unique and not 'exterior'")
        for w in self.walls:
            if w.side_a != EXTERIOR and w.side_a not in names:
                raise ConfigError(f"wall {w.name!r}: unknown zone {w.side_a!r}")
            if w.side_b not in names:
                raise ConfigError(f"wall {w.name!r}: unknown zone {w.side_b!r}")
            if w.side_a == w.side_b:
                raise ConfigError(f"wall {w.name!r} connects a zone to itself")
        if self.comfort_zone is not None and self.comfort_zone not in names:
            raise ConfigError(f"comfort_zone {self.comfort_zone!r} is not a zone")
        if not self._connected_to_exterior():
            raise ConfigError("every zone must be thermally connected to the exterior")

    def _connected_to_exterior(self) -> bool:
        reach = {z.name for z in self.zones if z.window_ua > 0 or z.infiltration_ua > 0}
        reach |= {w.side_b for w in self.walls if w.side_a == EXTERIOR}
        links = [(w.side_a, w.side_b) for w in self.walls if w.side_a != EXTERIOR]
        changed = True
        while changed:
            changed = False
            for a, b in links:
                if (a in reach) != (b in reach):
                    reach |= {a, b}
                    changed = True
        return reach == {z.name for z in self.zones}

    @property
    def zone_names(self) -> list[str]:
        return [z.name for z in self.zones]

    def zone(self, name: str) -> Zone:
        for z in self.zones:
            if z.name == name:
                return z
        raise KeyError(name)


def with_pcm_layer(model: BuildingModel, layer: Layer,
                   wall_names: Sequence[str]) -> BuildingModel:
    """Copy of ``model`` with ``layer`` added on the zone side of the named walls."""
    missing = set(wall_names) - {w.name for w in model.walls}
    if missing:
        raise ConfigError(f"unknown walls {sorted(missing)}")
    walls = tuple(
        replace(w, layers=tuple(w.layers) + (layer,)) if w.name in wall_names else w
        for w in model.walls
    )
    return replace(model, walls=walls, name=model.name + "+pcm")


# -- config documents ---------------------------------------------------------

def _layer_from(d: dict) -> Layer:
    pcm = d.get("pcm")
    return Layer(
        name=d.get("name", "layer"),
        thickness=float(d["thickness"]),
        conductivity=float(d["conductivity"]),
        density=float(d["density"]),
        specific_heat=float(d["specific_heat"]),
        pcm=None if pcm is None else PcmProperties(
            latent_heat=float(pcm["latent_heat"]),
            melt_low=float(pcm["melt_range"][0]),
            melt_high=float(pcm["melt_range"][1]),
        ),
    )


def layer_to_dict(l: Layer) -> dict:
    d = {"name": l.name, "thickness": l.thickness, "conductivity": l.conductivity,
         "density": l.density, "specific_heat": l.specific_heat}
    if l.pcm is not None:
        d["pcm"] = {"latent_heat": l.pcm.latent_heat,
                    "melt_range": [l.pcm.melt_low, l.pcm.melt_high]}
    return d


def model_from_dict(doc: dict) -> BuildingModel:
    try:
        zones = tuple(
            Zone(
                name=z["name"],
                capacitance=float(z["capacitance"]),
                gains=z.get("gains", 0.0),
                heating=Heating(**z.get("heating", {})),
                infiltration_ua=float(z.get("infiltration_ua", 0.0)),
                window_ua=float(z.get("window_ua", 0.0)),
            )
            for z in doc["zones"]
        )
        walls = tuple(
            WallAssembly(
                name=w["name"],
                side_a=w.get("side_a", EXTERIOR),
                side_b=w["side_b"],
                layers=tuple(_layer_from(l) for l in w["layers"]),
                area=float(w["area"]),
                nodes_per_layer=int(w.get("nodes_per_layer", 1)),
                h_ext=float(w.get("h_ext", 25.0)),
                h_int=float(w.get("h_int", 7.7)),
            )
            for w in doc.get("walls", [])
        )
        exo = dict(DEFAULT_EXOGENOUS_KWH)
        exo.update(doc.get("exogenous_kwh", {}))
        return BuildingModel(
            zones=zones,
            walls=walls,
            floor_area=float(doc.get("floor_area", 120.0)),
            exogenous_kwh=exo,
            comfort_zone=doc.get("comfort_zone"),
            initial_temperature=float(doc.get("initial_temperature", 20.0)),
            name=doc.get("name", "building"),
        )
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed building document: {exc!r}") from exc


def layer_from_dict(d: dict) -> Layer:
    try:
        return _layer_from(d)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed layer: {exc!r}") from exc


def load_model(path) -> BuildingModel:
    with open(path) as fh:
        return model_from_dict(json.load(fh))


def model_to_dict(m: BuildingModel) -> dict:
    def gains(g):
        a = np.atleast_1d(np.asarray(g, dtype=float))
        return float(a[0]) if a.size == 1 else a.tolist()

    return copy.deepcopy({
        "name": m.name,
        "floor_area": m.floor_area,
        "initial_temperature": m.initial_temperature,
        "comfort_zone": m.comfort_zone,
        "exogenous_kwh": m.exogenous_kwh,
        "zones": [
            {"name": z.name, "capacitance": z.capacitance, "gains": gains(z.gains),
             "heating": {"setpoint": z.heating.setpoint, "max_power": z.heating.max_power,
                         "efficiency": z.heating.efficiency, "kp": z.heating.kp},
             "infiltration_ua": z.infiltration_ua, "window_ua": z.window_ua}
            for z in m.zones
        ],
        "walls": [
            {"name": w.name, "side_a": w.side_a, "side_b": w.side_b, "area": w.area,
             "nodes_per_layer": w.nodes_per_layer, "h_ext": w.h_ext, "h_int": w.h_int,
             "layers": [layer_to_dict(l) for l in w.layers]}
            for w in m.walls
        ],
    })
