"""Macro-scale upscaling by the weighted rule of mixtures."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptySamples, NegativeWeight, ZeroWeightSum
from .homogenize import ConductivityTensor, EnsembleReport

WEIGHTINGS = ("uniform", "volume_fraction")


@dataclass(frozen=True)
class WeightedSamples:
    values: tuple
    weights: tuple

    def __init__(self, values: Sequence[float], weights: Sequence[float] | None = None):
        values = tuple(float(v) for v in values)
        if weights is None:
            weights = (1.0,) * len(values)
        weights = tuple(float(w) for w in weights)
        if not values:
            raise EmptySamples("need at least one sample")
        if len(weights) != len(values):
            raise ValueError("values and weights differ in length")
        if any(w < 0 for w in weights):
            raise NegativeWeight("weights must be non-negative")
        if not sum(weights) > 0:
            raise ZeroWeightSum("weights sum to zero")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "weights", weights)


def rule_of_mixtures(s: WeightedSamples) -> float:
    """sum(X_i P_i) / sum(P_i), clamped to [min X, max X] against rounding."""
    num = math.fsum(x * p for x, p in zip(s.values, s.weights))
    den = math.fsum(s.weights)
    return min(max(num / den, min(s.values)), max(s.values))


def upscale_ensemble(report: EnsembleReport, weighting: str = "uniform") -> ConductivityTensor:
    if weighting not in WEIGHTINGS:
        raise ValueError(f"weighting must be one of {WEIGHTINGS}")
    rows = report.per_seed
    if not rows:
        raise EmptySamples("ensemble report has no realizations")
    if weighting == "uniform":
        weights = [1.0] * len(rows)
    else:
        weights = [r["volume_fraction"] for r in rows]
    comps = [rule_of_mixtures(WeightedSamples([r[c] for r in rows], weights))
             for c in ("kxx", "kyy", "kzz")]
    return ConductivityTensor(*comps)


def macro_json(t: ConductivityTensor, weighting: str) -> str:
    return json.dumps({"k_macro": t.to_dict(), "weighting": weighting}, indent=2,
                      sort_keys=True)


def macro_scalar(t: ConductivityTensor) -> float:
    """Isotropic scalar used downstream as the layer conductivity."""
    return float(np.mean(t.as_array()))
