"""Multiscale thermal modelling of PCM-filled polyurethane and its use in buildings.

Micro scale: random sphere packings, voxel FEM heat conduction, effective
conductivity tensors and ensemble upscaling. Building scale: see
:mod:`pupcm.building`.
"""
from ._backend import active_name as active_backend
from .errors import (ConfigError, DegenerateGradient, EmptySamples, MalformedWeather,
                     MissingPhaseEntry, NegativeWeight, NonConvergence, NonFiniteState,
                     NonPositiveInput, PackingInfeasible, PupcmError, ZeroWeightSum)
from .fem import (BoundarySpec, Material, MaterialTable, TemperatureField, assemble,
                  average_gradient_and_flux, solve_steady)
from .homogenize import (BoundViolation, ConductivityTensor, EnsembleReport,
                         convergence_study, effective_component, effective_tensor,
                         reuss_voigt_bounds, run_ensemble, tensor_for_grid)
from .mixing import WeightedSamples, macro_json, rule_of_mixtures, upscale_ensemble
from .params import pu_pcm_materials
from .rve import (RveSpec, SphereSet, VoxelGrid, achieved_volume_fraction,
                  equivalent_inclusion_conductivity, generate_packing, voxelize)

__version__ = "0.1.0"

__all__ = [
    "BoundViolation", "BoundarySpec", "ConductivityTensor", "ConfigError",
    "DegenerateGradient", "EmptySamples", "EnsembleReport", "MalformedWeather", "Material",
    "MaterialTable", "MissingPhaseEntry", "NegativeWeight", "NonConvergence",
    "NonFiniteState", "NonPositiveInput", "PackingInfeasible", "PupcmError", "RveSpec",
    "SphereSet", "TemperatureField", "VoxelGrid", "WeightedSamples", "ZeroWeightSum",
    "achieved_volume_fraction", "active_backend", "assemble", "average_gradient_and_flux",
    "convergence_study", "effective_component", "effective_tensor",
    "equivalent_inclusion_conductivity", "generate_packing", "macro_json",
    "pu_pcm_materials", "reuss_voigt_bounds", "rule_of_mixtures", "run_ensemble",
    "solve_steady", "tensor_for_grid", "upscale_ensemble", "voxelize",
]
