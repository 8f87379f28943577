"""Effective conductivity tensors from per-axis RVE solves, plus ensembles."""
from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateGradient, PupcmError
from .fem import (AXES, BoundarySpec, MaterialTable, StiffnessOperator, assemble,
                  average_gradient_and_flux, solve_steady)
from .rve import RveSpec, VoxelGrid, generate_packing, voxelize

log = logging.getLogger(__name__)

BOUND_SLACK = 1e-9


class BoundViolation(PupcmError, AssertionError):
    """Homogenized value outside the Reuss-Voigt mixture bounds."""


@dataclass(frozen=True)
class ConductivityTensor:
    kxx: float
    kyy: float
    kzz: float
    iterations: tuple = field(default=(0, 0, 0), compare=False)

    def __post_init__(self):
        if min(self.kxx, self.kyy, self.kzz) <= 0:
            raise ValueError("tensor components must be positive")

    def as_array(self) -> np.ndarray:
        return np.array([self.kxx, self.kyy, self.kzz])

    def matrix(self) -> np.ndarray:
        return np.diag(self.as_array())

    @property
    def mean(self) -> float:
        return float(self.as_array().mean())

    def to_dict(self) -> dict:
        return {"kxx": self.kxx, "kyy": self.kyy, "kzz": self.kzz}


def isotropy_deviation(t: ConductivityTensor) -> float:
    """(max - min) / mean of the diagonal components."""
    a = t.as_array()
    return float((a.max() - a.min()) / a.mean())


def reuss_voigt_bounds(k_values: Sequence[float], fractions: Sequence[float]):
    k = np.asarray(k_values, dtype=float)
    f = np.asarray(fractions, dtype=float)
    return float(1.0 / np.sum(f / k)), float(np.sum(f * k))


def grid_bounds(grid: VoxelGrid, materials: MaterialTable):
    k = materials.cell_conductivity(grid.phase)
    return float(1.0 / np.mean(1.0 / k)), float(np.mean(k))


def effective_component(grid: VoxelGrid, materials: MaterialTable, axis: str,
                        bc_kind: str = "flux", q_bar: float = 1.0,
                        tol: float = 1e-8,
                        operator: Optional[StiffnessOperator] = None,
                        return_info: bool = False):
    """-<q_axis> / <d theta / d axis> from one steady solve along ``axis``."""
    if bc_kind == "flux":
        bc = BoundarySpec.flux_pair(axis, q_bar)
    else:
        bc = BoundarySpec.temperature_pair(axis, 0.0, 1.0)
    field_ = solve_steady(grid, materials, bc, tol=tol, operator=operator)
    grad, flux = average_gradient_and_flux(field_, grid, materials)
    a = AXES[axis]
    if abs(grad[a]) < 1e-14:
        raise DegenerateGradient(f"mean gradient along {axis} is {grad[a]:.3e}")
    k = float(-flux[a] / grad[a])
    return (k, field_.info) if return_info else k


def tensor_for_grid(grid: VoxelGrid, materials: MaterialTable, bc_kind: str = "flux",
                    q_bar: float = 1.0, tol: float = 1e-8,
                    check_bounds: bool = True) -> ConductivityTensor:
    op = assemble(grid, materials)
    ks, iters = [], []
    for axis in "xyz":
        k, info = effective_component(grid, materials, axis, bc_kind, q_bar, tol,
                                      operator=op, return_info=True)
        ks.append(k)
        iters.append(info.iterations)
    t = ConductivityTensor(*ks, iterations=tuple(iters))
    if check_bounds:
        lo, hi = grid_bounds(grid, materials)
        for k in ks:
            if not lo * (1 - BOUND_SLACK) <= k <= hi * (1 + BOUND_SLACK):
                raise BoundViolation(f"k = {k!r} outside [{lo!r}, {hi!r}]")
    return t


def effective_tensor(spec: RveSpec, materials: MaterialTable, n_per_axis: int = 48,
                     bc_kind: str = "flux", q_bar: float = 1.0,
                     tol: float = 1e-8) -> ConductivityTensor:
    """Generate, voxelize and solve along x, y and z on the same geometry."""
    grid = voxelize(generate_packing(spec), n_per_axis)
    return tensor_for_grid(grid, materials, bc_kind, q_bar, tol)


@dataclass
class EnsembleReport:
    spec: RveSpec
    materials: MaterialTable
    n_per_axis: int
    per_seed: list  # dicts: seed, kxx, kyy, kzz, iters, volume_fraction

    @property
    def tensors(self) -> list[ConductivityTensor]:
        return [ConductivityTensor(r["kxx"], r["kyy"], r["kzz"]) for r in self.per_seed]

    @property
    def single_sample(self) -> bool:
        return len(self.per_seed) == 1

    @property
    def mean(self) -> np.ndarray:
        return np.mean([t.as_array() for t in self.tensors], axis=0)

    @property
    def std(self) -> np.ndarray:
        if self.single_sample:
            return np.zeros(3)
        return np.std([t.as_array() for t in self.tensors], axis=0, ddof=1)

    @property
    def isotropy_deviation(self) -> float:
        return isotropy_deviation(ConductivityTensor(*self.mean))

    @property
    def mean_seed_isotropy_deviation(self) -> float:
        return float(np.mean([isotropy_deviation(t) for t in self.tensors]))

    def accepted(self, max_isotropy=0.05, max_rel_std=0.05, min_seeds=3) -> bool:
        """RVE size rule: isotropic within 5 % and seed scatter within 5 %."""
        if len(self.per_seed) < min_seeds:
            return False
        rel_std = self.std / self.mean
        worst_iso = max(isotropy_deviation(t) for t in self.tensors)
        return worst_iso <= max_isotropy and bool(np.all(rel_std <= max_rel_std))

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "materials": self.materials.to_dict(),
            "n_per_axis": self.n_per_axis,
            "per_seed": self.per_seed,
            "mean": dict(zip(("kxx", "kyy", "kzz"), self.mean.tolist())),
            "std": dict(zip(("kxx", "kyy", "kzz"), self.std.tolist())),
            "single_sample": self.single_sample,
            "isotropy_deviation": self.isotropy_deviation,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["seed", "sphere_count", "volume_fraction", "kxx", "kyy", "kzz",
                    "iters_x", "iters_y", "iters_z"])
        for r in self.per_seed:
            w.writerow([r["seed"], r["sphere_count"], repr(r["volume_fraction"]),
                        repr(r["kxx"]), repr(r["kyy"]), repr(r["kzz"]), *r["iters"]])
        return buf.getvalue()

    @classmethod
    def from_dict(cls, d: dict) -> "EnsembleReport":
        from .fem import Material

        s = d["spec"]
        spec = RveSpec(edge_length=s["edge_length"], sphere_radius=s["sphere_radius"],
                       target_volume_fraction=s["target_volume_fraction"],
                       min_gap=s["min_gap"], rng_seed=s["rng_seed"],
                       max_attempts=s["max_attempts"])
        mats = MaterialTable({int(p): Material(m["conductivity"], m["heat_capacity"])
                              for p, m in d["materials"].items()})
        return cls(spec=spec, materials=mats, n_per_axis=d["n_per_axis"],
                   per_seed=list(d["per_seed"]))


def _seed_job(args):
    spec, materials, n_per_axis, bc_kind, q_bar, tol = args
    spheres = generate_packing(spec)
    grid = voxelize(spheres, n_per_axis)
    t = tensor_for_grid(grid, materials, bc_kind, q_bar, tol)
    return {
        "seed": spec.rng_seed,
        "sphere_count": len(spheres),
        "volume_fraction": grid.volume_fraction(1),
        "kxx": t.kxx, "kyy": t.kyy, "kzz": t.kzz,
        "iters": list(t.iterations),
    }


def run_ensemble(spec: RveSpec, materials: MaterialTable, seeds: Sequence[int],
                 n_per_axis: int = 48, bc_kind: str = "flux", q_bar: float = 1.0,
                 tol: float = 1e-8, workers: int = 1) -> EnsembleReport:
    if not seeds:
        raise ValueError("need at least one seed")
    jobs = [(spec.replace(rng_seed=int(s)), materials, n_per_axis, bc_kind, q_bar, tol)
            for s in seeds]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_seed_job, jobs))
    else:
        rows = [_seed_job(j) for j in jobs]
    return EnsembleReport(spec=spec, materials=materials, n_per_axis=n_per_axis,
                          per_seed=rows)


def convergence_study(spec: RveSpec, materials: MaterialTable, sizes: Sequence[int],
                      seeds: Sequence[int], n_per_axis: int = 48,
                      bc_kind: str = "flux", workers: int = 1) -> list[EnsembleReport]:
    """Ensembles at increasing sphere counts with the voxel size held fixed.

    The cell size is taken from ``spec.edge_length / n_per_axis``; each size
    rescales the cube edge so that it holds exactly that many spheres at the
    target fraction.
    """
    cell = spec.edge_length / n_per_axis
    reports = []
    for n_spheres in sizes:
        sized = RveSpec.for_sphere_count(
            n_spheres, spec.sphere_radius, spec.target_volume_fraction,
            min_gap=spec.min_gap, rng_seed=spec.rng_seed,
            max_attempts=spec.max_attempts)
        n_vox = max(2, int(round(sized.edge_length / cell)))
        log.info("size %d spheres: L=%.2f, %d^3 voxels", n_spheres, sized.edge_length, n_vox)
        reports.append(run_ensemble(sized, materials, seeds, n_vox, bc_kind,
                                    workers=workers))
    return reports
