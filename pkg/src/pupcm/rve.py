"""Periodic sphere packings, voxelization and interface-corrected inclusions.

Lengths inside an RVE are in micrometres by convention; nothing here depends
on the unit except :func:`equivalent_inclusion_conductivity`, which is SI.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _backend
from .errors import NonPositiveInput, PackingInfeasible

log = logging.getLogger(__name__)

MAX_SUPPORTED_FRACTION = 0.35
_BATCH = 4096


@dataclass(frozen=True)
class RveSpec:
    edge_length: float = 100.0
    sphere_radius: float = 10.0
    target_volume_fraction: float = 0.2
    min_gap: Optional[float] = None  # None -> 0.02 * sphere_radius
    rng_seed: int = 0
    max_attempts: Optional[int] = None  # None -> 1e5 * sphere count

    def __post_init__(self):
        if not self.edge_length > 0:
            raise ValueError("edge_length must be positive")
        if not 0 < self.sphere_radius < self.edge_length / 2:
            raise ValueError("sphere_radius must lie in (0, edge_length/2)")
        if not 0 <= self.target_volume_fraction < 1:
            raise ValueError("target_volume_fraction must lie in [0, 1)")
        if self.min_gap is not None and self.min_gap < 0:
            raise ValueError("min_gap must be >= 0")

    @property
    def gap(self) -> float:
        return 0.02 * self.sphere_radius if self.min_gap is None else self.min_gap

    @property
    def sphere_count(self) -> int:
        v_sphere = 4.0 / 3.0 * math.pi * self.sphere_radius**3
        return int(round(self.target_volume_fraction * self.edge_length**3 / v_sphere))

    @property
    def attempt_budget(self) -> int:
        if self.max_attempts is not None:
            return int(self.max_attempts)
        return 100_000 * self.sphere_count

    def replace(self, **changes) -> "RveSpec":
        from dataclasses import replace

        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "edge_length": self.edge_length,
            "sphere_radius": self.sphere_radius,
            "target_volume_fraction": self.target_volume_fraction,
            "min_gap": self.gap,
            "rng_seed": self.rng_seed,
            "max_attempts": self.attempt_budget,
        }

    @classmethod
    def for_sphere_count(cls, n_spheres: int, sphere_radius: float,
                         volume_fraction: float, **kw) -> "RveSpec":
        """Spec whose edge length makes ``sphere_count == n_spheres`` exactly."""
        v_sphere = 4.0 / 3.0 * math.pi * sphere_radius**3
        edge = (n_spheres * v_sphere / volume_fraction) ** (1.0 / 3.0)
        return cls(edge_length=edge, sphere_radius=sphere_radius,
                   target_volume_fraction=volume_fraction, **kw)


@dataclass(frozen=True)
class SphereSet:
    centers: np.ndarray  # (N, 3), each coordinate in [0, edge_length)
    radius: float
    edge_length: float

    def __len__(self):
        return self.centers.shape[0]

    def to_json(self) -> str:
        return json.dumps({
            "edge_length": self.edge_length,
            "radius": self.radius,
            "centers": self.centers.tolist(),
        })

    @classmethod
    def from_json(cls, text: str) -> "SphereSet":
        d = json.loads(text)
        centers = np.asarray(d["centers"], dtype=float).reshape(-1, 3)
        return cls(centers=centers, radius=float(d["radius"]),
                   edge_length=float(d["edge_length"]))


@dataclass(frozen=True)
class VoxelGrid:
    n_per_axis: int
    cell_size: float
    phase: np.ndarray = field(repr=False)  # (n, n, n) uint8, indexed [ix, iy, iz]

    @property
    def edge_length(self) -> float:
        return self.cell_size * self.n_per_axis

    def volume_fraction(self, label: int = 1) -> float:
        return float(np.count_nonzero(self.phase == label)) / self.phase.size

    def to_bytes(self) -> tuple[dict, bytes]:
        header = {"n_per_axis": self.n_per_axis, "cell_size": self.cell_size}
        return header, np.ascontiguousarray(self.phase, dtype=np.uint8).tobytes()

    @classmethod
    def from_bytes(cls, header: dict, payload: bytes) -> "VoxelGrid":
        n = int(header["n_per_axis"])
        phase = np.frombuffer(payload, dtype=np.uint8).reshape(n, n, n).copy()
        return cls(n_per_axis=n, cell_size=float(header["cell_size"]), phase=phase)


def min_image(delta: np.ndarray, edge_length: float) -> np.ndarray:
    """Wrap coordinate differences into [-L/2, L/2)."""
    return delta - edge_length * np.floor(delta / edge_length + 0.5)


def generate_packing(spec: RveSpec, backend: Optional[str] = None) -> SphereSet:
    """Random sequential addition of equal spheres in a periodic cube.

    Candidates are drawn in fixed-size batches from a seeded PCG64 stream, so
    the result depends only on ``spec`` (and not on the kernel backend).
    """
    if spec.target_volume_fraction > MAX_SUPPORTED_FRACTION:
        log.warning("volume fraction %.3f is above the supported RSA range (%.2f)",
                    spec.target_volume_fraction, MAX_SUPPORTED_FRACTION)
    n = spec.sphere_count
    L = spec.edge_length
    centers = np.zeros((n, 3))
    if n == 0:
        return SphereSet(centers=centers, radius=spec.sphere_radius, edge_length=L)

    kernel = _backend.get(backend)
    rng = np.random.default_rng(spec.rng_seed)
    min_dist = 2.0 * spec.sphere_radius + spec.gap
    budget = spec.attempt_budget
    placed = attempts = 0
    while placed < n and attempts < budget:
        m = min(_BATCH, budget - attempts)
        cand = rng.random((_BATCH, 3))[:m] * L
        placed, used = kernel.rsa_consume(centers, placed, cand, L, min_dist)
        attempts += used
    if placed < n:
        raise PackingInfeasible(n, placed, attempts)
    return SphereSet(centers=centers, radius=spec.sphere_radius, edge_length=L)


def achieved_volume_fraction(s: SphereSet) -> float:
    return len(s) * (4.0 / 3.0) * math.pi * s.radius**3 / s.edge_length**3


def pairwise_min_image_distances(s: SphereSet) -> np.ndarray:
    """Condensed vector of all pairwise periodic centre distances."""
    c = s.centers
    iu, ju = np.triu_indices(len(c), k=1)
    d = min_image(c[iu] - c[ju], s.edge_length)
    return np.sqrt((d * d).sum(axis=1))


def voxelize(s: SphereSet, n_per_axis: int) -> VoxelGrid:
    """Label each cell 1 if its centre lies within ``radius`` of any sphere
    centre under the minimum-image convention, else 0."""
    if n_per_axis < 2:
        raise ValueError("n_per_axis must be >= 2")
    L = s.edge_length
    h = L / n_per_axis
    coords = (np.arange(n_per_axis) + 0.5) * h
    phase = np.zeros((n_per_axis,) * 3, dtype=np.uint8)
    r2 = s.radius**2
    for c in s.centers:
        dx = min_image(coords - c[0], L) ** 2
        dy = min_image(coords - c[1], L) ** 2
        dz = min_image(coords - c[2], L) ** 2
        # restrict to the slab of rows that can be inside
        ix = np.nonzero(dx <= r2)[0]
        iy = np.nonzero(dy <= r2)[0]
        iz = np.nonzero(dz <= r2)[0]
        inside = (dx[ix, None, None] + dy[None, iy, None] + dz[None, None, iz]) <= r2
        sub = phase[np.ix_(ix, iy, iz)]
        sub[inside] = 1
        phase[np.ix_(ix, iy, iz)] = sub
    return VoxelGrid(n_per_axis=n_per_axis, cell_size=h, phase=phase)


def equivalent_inclusion_conductivity(k_inclusion: float, conductance: float,
                                      radius_m: float) -> float:
    """Fold a finite interfacial conductance into the inclusion conductivity.

    ``k_eq = k_i / (1 + k_i / (h r))``, with ``h`` in W/(m^2 K) and ``r`` in m.
    """
    if k_inclusion <= 0 or conductance <= 0 or radius_m <= 0:
        raise NonPositiveInput(
            "k_inclusion, conductance and radius_m must all be positive"
        )
    return k_inclusion / (1.0 + k_inclusion / (conductance * radius_m))
