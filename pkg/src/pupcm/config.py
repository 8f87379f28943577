"""Pipeline configuration: one JSON document validated up front."""
from __future__ import annotations

import importlib.resources
import json
import os
from dataclasses import dataclass, field, replace
from typing import Optional

from .building.model import (BuildingModel, Layer, layer_from_dict, model_from_dict,
                             with_pcm_layer)
from .building.weather import WeatherSeries, load_weather, synthesize_weather
from .errors import ConfigError
from .fem import MaterialTable
from .mixing import WEIGHTINGS
from .params import (INTERFACE_CONDUCTANCE, K_INCLUSION, K_MATRIX, pu_pcm_materials)
from .rve import RveSpec

SYNTH_KEYS = ("mean", "annual_amplitude", "diurnal_amplitude", "noise_std", "seed",
              "peak_day", "peak_hour")


def reference_building_document() -> dict:
    text = (importlib.resources.files("pupcm") / "data" / "reference_building.json").read_text()
    return json.loads(text)


@dataclass
class PipelineConfig:
    rve: RveSpec
    materials: MaterialTable
    n_per_axis: int = 48
    tol: float = 1e-8
    bc: str = "flux"
    q_bar: float = 1.0
    axis: str = "x"
    seeds: list = field(default_factory=lambda: [1, 2, 3])
    weighting: str = "uniform"
    building_doc: dict = field(default_factory=reference_building_document)
    include_pcm: bool = False
    pcm_walls: Optional[list] = None
    pcm_layer: Optional[Layer] = None
    dt: float = 60.0
    weather: dict = field(default_factory=lambda: {"source": "synthetic", "seed": 7})
    output_dir: Optional[str] = None
    raw: dict = field(default_factory=dict, repr=False)

    # -- building side -------------------------------------------------------
    def base_model(self) -> BuildingModel:
        return model_from_dict(self.building_doc)

    def pcm_model(self) -> BuildingModel:
        walls = self.pcm_walls if self.pcm_walls is not None else self.building_doc.get(
            "pcm_walls", [])
        if self.pcm_layer is None:
            raise ConfigError("no PCM layer configured")
        return with_pcm_layer(self.base_model(), self.pcm_layer, walls)

    def run_model(self) -> BuildingModel:
        return self.pcm_model() if self.include_pcm else self.base_model()

    def load_weather(self) -> WeatherSeries:
        w = self.weather
        if w.get("source", "synthetic") == "file":
            return load_weather(w["path"])
        return synthesize_weather(**{k: w[k] for k in SYNTH_KEYS if k in w})


def _get(d, key, typ, default):
    v = d.get(key, default)
    try:
        return typ(v) if v is not None else None
    except (TypeError, ValueError):
        raise ConfigError(f"{key!r}: cannot interpret {v!r}") from None


def config_from_dict(doc: dict, base_dir: str = ".", seed_override: Optional[int] = None,
                     k_macro: Optional[float] = None) -> PipelineConfig:
    """Build and fully validate a :class:`PipelineConfig`. Raises ConfigError."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")

    def path(p):
        return p if os.path.isabs(p) else os.path.join(base_dir, p)

    r = doc.get("rve", {})
    try:
        rve = RveSpec(
            edge_length=_get(r, "edge_length", float, 100.0),
            sphere_radius=_get(r, "sphere_radius", float, 10.0),
            target_volume_fraction=_get(r, "target_volume_fraction", float, 0.2),
            min_gap=_get(r, "min_gap", float, None),
            rng_seed=_get(r, "rng_seed", int, 0) if seed_override is None else seed_override,
            max_attempts=_get(r, "max_attempts", int, None),
        )
    except ValueError as exc:
        raise ConfigError(f"rve: {exc}") from None

    m = doc.get("materials", {})
    try:
        materials = pu_pcm_materials(
            k_matrix=_get(m, "matrix_conductivity", float, K_MATRIX),
            k_inclusion=_get(m, "inclusion_conductivity", float, K_INCLUSION),
            # explicit null means a perfect interface
            interface_conductance=_get(m, "interface_conductance", float,
                                       INTERFACE_CONDUCTANCE),
            radius_um=rve.sphere_radius,
        )
    except ValueError as exc:
        raise ConfigError(f"materials: {exc}") from None

    s = doc.get("solver", {})
    n_per_axis = _get(s, "n_per_axis", int, 48)
    tol = _get(s, "tol", float, 1e-8)
    bc = s.get("bc", "flux")
    axis = s.get("axis", "x")
    q_bar = _get(s, "q_bar", float, 1.0)
    if n_per_axis < 2:
        raise ConfigError("solver.n_per_axis must be >= 2")
    if not tol > 0:
        raise ConfigError("solver.tol must be positive")
    if bc not in ("flux", "temperature"):
        raise ConfigError("solver.bc must be 'flux' or 'temperature'")
    if axis not in ("x", "y", "z"):
        raise ConfigError("solver.axis must be x, y or z")

    seeds = doc.get("ensemble", {}).get("seeds", [1, 2, 3])
    if seed_override is not None:
        seeds = [seed_override]
    if not isinstance(seeds, list) or not seeds or not all(isinstance(x, int) for x in seeds):
        raise ConfigError("ensemble.seeds must be a non-empty list of integers")

    weighting = doc.get("macro", {}).get("weighting", "uniform")
    if weighting not in WEIGHTINGS:
        raise ConfigError(f"macro.weighting must be one of {WEIGHTINGS}")

    b = doc.get("building", {})
    if b.get("model"):
        p = path(b["model"])
        if not os.path.exists(p):
            raise ConfigError(f"building.model: {p} does not exist")
        with open(p) as fh:
            try:
                building_doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"building.model: {exc}") from None
    else:
        building_doc = reference_building_document()
    layer_doc = b.get("pcm_layer", building_doc.get("pcm_layer"))
    pcm_layer = layer_from_dict(layer_doc) if layer_doc else None
    if b.get("k_macro"):
        p = path(b["k_macro"])
        if not os.path.exists(p):
            raise ConfigError(f"building.k_macro: {p} does not exist")
        with open(p) as fh:
            km = json.load(fh)["k_macro"]
        k_macro = (km["kxx"] + km["kyy"] + km["kzz"]) / 3.0
    if k_macro is not None and pcm_layer is not None:
        pcm_layer = replace(pcm_layer, conductivity=float(k_macro))
    dt = _get(b, "dt", float, 60.0)
    if not dt > 0 or abs(3600.0 / dt - round(3600.0 / dt)) > 1e-12:
        raise ConfigError("building.dt must divide 3600 s")

    w = dict(doc.get("weather", {"source": "synthetic", "seed": 7}))
    if w.get("source", "synthetic") == "file":
        if "path" not in w:
            raise ConfigError("weather.path is required for source 'file'")
        w["path"] = path(w["path"])
        if not os.path.exists(w["path"]):
            raise ConfigError(f"weather.path: {w['path']} does not exist")
    elif w.get("source", "synthetic") != "synthetic":
        raise ConfigError("weather.source must be 'synthetic' or 'file'")
    else:
        unknown = set(w) - set(SYNTH_KEYS) - {"source"}
        if unknown:
            raise ConfigError(f"weather: unknown keys {sorted(unknown)}")
        if seed_override is not None:
            w["seed"] = seed_override

    cfg = PipelineConfig(
        rve=rve, materials=materials, n_per_axis=n_per_axis, tol=tol, bc=bc, q_bar=q_bar,
        axis=axis, seeds=seeds, weighting=weighting, building_doc=building_doc,
        include_pcm=bool(b.get("include_pcm", False)), pcm_walls=b.get("pcm_walls"),
        pcm_layer=pcm_layer, dt=dt, weather=w, output_dir=doc.get("output_dir"), raw=doc,
    )
    # building documents are validated eagerly too
    cfg.base_model()
    if pcm_layer is not None:
        cfg.pcm_model()
    elif cfg.include_pcm:
        raise ConfigError("building.include_pcm set but no pcm_layer given")
    return cfg


def load_config(path: str, **kw) -> PipelineConfig:
    if not os.path.exists(path):
        raise ConfigError(f"config file {path} does not exist")
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    return config_from_dict(doc, base_dir=os.path.dirname(os.path.abspath(path)), **kw)
