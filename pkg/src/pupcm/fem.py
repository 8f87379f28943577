"""Steady heat conduction on a voxel grid with trilinear hexahedra.

Nodes live on the ``(n+1)^3`` lattice; node ``(i, j, k)`` has flat index
``(i*(n+1) + j)*(n+1) + k``, matching the C-ordered phase array of
:class:`~pupcm.rve.VoxelGrid`. The driven axis gets either a flux pair
(inflow on the low face, outflow on the high face) or a temperature pair;
the four lateral faces are insulated.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

import numpy as np
import scipy.sparse as sp

from .errors import MissingPhaseEntry, NonConvergence
from .rve import VoxelGrid

AXES = {"x": 0, "y": 1, "z": 2}

# 1D linear-element stiffness and mass on the unit interval
_D1 = np.array([[1.0, -1.0], [-1.0, 1.0]])
_M1 = np.array([[1.0 / 3.0, 1.0 / 6.0], [1.0 / 6.0, 1.0 / 3.0]])

# local corner a = (ax, ay, az) has index 4*ax + 2*ay + az
_CORNERS = np.array([(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)])

UNIT_CUBE_STIFFNESS = (
    np.kron(np.kron(_D1, _M1), _M1)
    + np.kron(np.kron(_M1, _D1), _M1)
    + np.kron(np.kron(_M1, _M1), _D1)
)


@dataclass(frozen=True)
class Material:
    conductivity: float  # W/(m K)
    heat_capacity: float = 1.0e6  # J/(m^3 K), unused by steady solves

    def __post_init__(self):
        if self.conductivity <= 0 or self.heat_capacity <= 0:
            raise ValueError("conductivity and heat_capacity must be positive")


@dataclass(frozen=True)
class MaterialTable:
    phases: Mapping[int, Material]

    @classmethod
    def from_conductivities(cls, **kw) -> "MaterialTable":
        """``MaterialTable.from_conductivities(matrix=0.036, inclusion=0.56)``"""
        labels = {"matrix": 0, "inclusion": 1}
        return cls({labels[name]: Material(k) for name, k in kw.items()})

    def scaled(self, factor: float) -> "MaterialTable":
        return MaterialTable({p: Material(m.conductivity * factor, m.heat_capacity)
                              for p, m in self.phases.items()})

    def cell_conductivity(self, phase: np.ndarray) -> np.ndarray:
        labels = np.unique(phase)
        missing = [int(p) for p in labels if int(p) not in self.phases]
        if missing:
            raise MissingPhaseEntry(f"no material entry for phase label(s) {missing}")
        lut = np.zeros(int(labels.max()) + 1)
        for p in labels:
            lut[p] = self.phases[int(p)].conductivity
        return lut[phase]

    def to_dict(self) -> dict:
        return {str(p): {"conductivity": m.conductivity, "heat_capacity": m.heat_capacity}
                for p, m in sorted(self.phases.items())}


@dataclass(frozen=True)
class BoundarySpec:
    axis: str = "x"
    kind: str = "flux"  # "flux" | "temperature"
    value: Union[float, tuple] = 1.0  # q_bar in W/m^2, or (theta_low, theta_high)
    source: float = 0.0  # body heat source Q, W/m^3

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {sorted(AXES)}")
        if self.kind not in ("flux", "temperature"):
            raise ValueError("kind must be 'flux' or 'temperature'")
        if self.kind == "temperature" and len(self.value) != 2:
            raise ValueError("temperature BC needs (theta_low, theta_high)")

    @classmethod
    def flux_pair(cls, axis="x", q_bar=1.0, source=0.0):
        return cls(axis=axis, kind="flux", value=float(q_bar), source=source)

    @classmethod
    def temperature_pair(cls, axis="x", low=0.0, high=1.0, source=0.0):
        return cls(axis=axis, kind="temperature", value=(float(low), float(high)),
                   source=source)


@dataclass
class SolveInfo:
    iterations: int
    residual: float  # relative to the load norm
    converged: bool = True

    def to_json(self) -> str:
        return json.dumps({"iterations": self.iterations, "residual": self.residual,
                           "converged": self.converged})


@dataclass
class TemperatureField:
    theta: np.ndarray  # (n+1, n+1, n+1) nodal temperature change, K
    cell_size: float
    info: Optional[SolveInfo] = field(default=None, compare=False)

    @property
    def n_per_axis(self) -> int:
        return self.theta.shape[0] - 1

    def to_bytes(self) -> tuple[dict, bytes]:
        header = {"n_per_axis": self.n_per_axis, "cell_size": self.cell_size,
                  "lattice": "nodal", "dtype": "<f8"}
        return header, np.ascontiguousarray(self.theta, dtype="<f8").tobytes()

    @classmethod
    def from_bytes(cls, header: dict, payload: bytes) -> "TemperatureField":
        m = int(header["n_per_axis"]) + 1
        theta = np.frombuffer(payload, dtype="<f8").reshape(m, m, m).copy()
        return cls(theta=theta, cell_size=float(header["cell_size"]))


@dataclass
class StiffnessOperator:
    matrix: sp.csr_matrix
    n_per_axis: int
    cell_size: float

    @property
    def n_nodes(self) -> int:
        return self.matrix.shape[0]


def node_index(n_per_axis: int) -> np.ndarray:
    m = n_per_axis + 1
    return np.arange(m**3).reshape(m, m, m)


def assemble(grid: VoxelGrid, materials: MaterialTable) -> StiffnessOperator:
    """Global stiffness ``K_ij = sum_e k_e * integral(grad N_i . grad N_j)``.

    Assembled stencil-wise: for each of the 64 local corner pairs the element
    contribution is added to the row node's coefficient for that lattice
    offset, then the 27 offset diagonals are emitted as CSR.
    """
    n = grid.n_per_axis
    m = n + 1
    h = grid.cell_size
    ke = materials.cell_conductivity(grid.phase) * h  # k * h scales the unit-cube matrix

    coef = {}
    for a, ca in enumerate(_CORNERS):
        for b, cb in enumerate(_CORNERS):
            off = tuple(cb - ca)
            arr = coef.get(off)
            if arr is None:
                arr = coef[off] = np.zeros((m, m, m))
            arr[ca[0]:ca[0] + n, ca[1]:ca[1] + n, ca[2]:ca[2] + n] += (
                UNIT_CUBE_STIFFNESS[a, b] * ke
            )

    idx = node_index(n)
    rows, cols, vals = [], [], []
    for (dx, dy, dz), arr in sorted(coef.items()):
        sx = slice(max(0, -dx), m - max(0, dx))
        sy = slice(max(0, -dy), m - max(0, dy))
        sz = slice(max(0, -dz), m - max(0, dz))
        r = idx[sx, sy, sz].ravel()
        rows.append(r)
        cols.append(r + (dx * m + dy) * m + dz)
        vals.append(arr[sx, sy, sz].ravel())
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.concatenate(vals)
    keep = vals != 0.0
    K = sp.csr_matrix((vals[keep], (rows[keep], cols[keep])), shape=(m**3, m**3))
    K.sum_duplicates()
    K.sort_indices()
    return StiffnessOperator(matrix=K, n_per_axis=n, cell_size=h)


def _face_weights(n: int, h: float) -> np.ndarray:
    """Integral of each face node's shape function over a full lattice face."""
    w1 = np.full(n + 1, h)
    w1[0] = w1[-1] = 0.5 * h
    return np.outer(w1, w1)


def _face(arr: np.ndarray, axis: int, which: int):
    sl = [slice(None)] * 3
    sl[axis] = which
    return tuple(sl)


def pcg(A, b, x0, tol, maxiter, norm_ref):
    """Jacobi-preconditioned conjugate gradients.

    Stops when ``||b - A x|| <= tol * norm_ref``. Returns ``(x, iterations,
    relative_residual)``; raises :class:`NonConvergence` past ``maxiter``.
    """
    inv_diag = 1.0 / A.diagonal()
    x = x0.copy()
    r = b - A @ x
    target = tol * norm_ref
    rnorm = np.linalg.norm(r)
    if norm_ref == 0.0:
        return x, 0, 0.0
    if rnorm <= target:
        return x, 0, rnorm / norm_ref
    z = inv_diag * r
    p = z.copy()
    rz = r @ z
    for it in range(1, maxiter + 1):
        Ap = A @ p
        alpha = rz / (p @ Ap)
        x += alpha * p
        r -= alpha * Ap
        rnorm = np.linalg.norm(r)
        if rnorm <= target:
            return x, it, rnorm / norm_ref
        z = inv_diag * r
        rz_new = r @ z
        p *= rz_new / rz
        p += z
        rz = rz_new
    raise NonConvergence(maxiter, rnorm / norm_ref)


def default_maxiter(n_dof: int) -> int:
    return int(20 * math.sqrt(n_dof)) + 1000


def solve_steady(grid: VoxelGrid, materials: MaterialTable, bc: BoundarySpec,
                 tol: float = 1e-8, maxiter: Optional[int] = None,
                 operator: Optional[StiffnessOperator] = None) -> TemperatureField:
    if tol <= 0:
        raise ValueError("tol must be positive")
    op = operator or assemble(grid, materials)
    n, h = grid.n_per_axis, grid.cell_size
    m = n + 1
    K = op.matrix
    axis = AXES[bc.axis]

    f = np.zeros((m, m, m))
    if bc.source:
        # Q * integral(N_i) = Q h^3 / 8 per touching cell
        w1 = np.full(m, 1.0)
        w1[0] = w1[-1] = 0.5
        f += bc.source * h**3 * np.einsum("i,j,k->ijk", w1, w1, w1)

    fixed = np.zeros((m, m, m), dtype=bool)
    g = np.zeros((m, m, m))
    x0 = np.zeros((m, m, m))
    if bc.kind == "flux":
        w = _face_weights(n, h)
        f[_face(f, axis, 0)] += bc.value * w
        f[_face(f, axis, n)] -= bc.value * w
        fixed[0, 0, 0] = True
    else:
        lo, hi = bc.value
        fixed[_face(fixed, axis, 0)] = True
        fixed[_face(fixed, axis, n)] = True
        g[_face(g, axis, 0)] = lo
        g[_face(g, axis, n)] = hi
        shape = [1, 1, 1]
        shape[axis] = m
        x0 = np.broadcast_to(np.linspace(lo, hi, m).reshape(shape), (m, m, m)).copy()

    f = f.ravel()
    g = g.ravel()
    free = ~fixed.ravel()
    mask = sp.diags(free.astype(float))
    A = (mask @ K @ mask + sp.diags((~free).astype(float))).tocsr()
    b = np.where(free, f - K @ g, g)
    x0 = np.where(free, x0.ravel(), g)

    norm_ref = np.linalg.norm(b)
    maxiter = default_maxiter(int(free.sum())) if maxiter is None else maxiter
    x, iters, res = pcg(A, b, x0, tol, maxiter, norm_ref)
    return TemperatureField(theta=x.reshape(m, m, m), cell_size=h,
                            info=SolveInfo(iterations=iters, residual=float(res)))


def cell_gradients(field: TemperatureField) -> np.ndarray:
    """Gradient of the trilinear interpolant at every cell centre, shape (3, n, n, n)."""
    t = field.theta
    h = field.cell_size
    gx = (t[1:, :-1, :-1] + t[1:, 1:, :-1] + t[1:, :-1, 1:] + t[1:, 1:, 1:]
          - t[:-1, :-1, :-1] - t[:-1, 1:, :-1] - t[:-1, :-1, 1:] - t[:-1, 1:, 1:])
    gy = (t[:-1, 1:, :-1] + t[1:, 1:, :-1] + t[:-1, 1:, 1:] + t[1:, 1:, 1:]
          - t[:-1, :-1, :-1] - t[1:, :-1, :-1] - t[:-1, :-1, 1:] - t[1:, :-1, 1:])
    gz = (t[:-1, :-1, 1:] + t[1:, :-1, 1:] + t[:-1, 1:, 1:] + t[1:, 1:, 1:]
          - t[:-1, :-1, :-1] - t[1:, :-1, :-1] - t[:-1, 1:, :-1] - t[1:, 1:, :-1])
    return np.stack([gx, gy, gz]) / (4.0 * h)


def average_gradient_and_flux(field: TemperatureField, grid: VoxelGrid,
                              materials: MaterialTable) -> tuple[np.ndarray, np.ndarray]:
    """Volume averages of grad(theta) and q = -k grad(theta) over the RVE.

    The gradient of a trilinear field is bilinear in the transverse
    coordinates, so its cell-centre value times the cell volume is the exact
    cell integral.
    """
    grad = cell_gradients(field)
    k = materials.cell_conductivity(grid.phase)
    mean_grad = grad.reshape(3, -1).mean(axis=1)
    mean_flux = -(grad * k).reshape(3, -1).mean(axis=1)
    return mean_grad, mean_flux
