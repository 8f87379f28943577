"""Lumped RC network of a building: node chains through walls plus zone air nodes.

State vector layout is ``[zone air temperatures ∥ wall node temperatures]``.
Each layer is cut into equal slices with one node at each slice centre;
adjacent nodes are joined by the series resistance of the two half-slices,
and the outermost nodes reach the air through a film plus a half-slice.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import EXTERIOR, BuildingModel, WallAssembly

_NO_MELT = np.inf


@dataclass
class WallChain:
    """1D discretization of one wall assembly."""
    cap_base: np.ndarray  # J/K per node, sensible
    cap_latent: np.ndarray  # extra J/K per node inside the melt range
    melt_low: np.ndarray
    melt_high: np.ndarray
    links: np.ndarray  # W/K, len(nodes) + 1: side_a film link, interior links, side_b film link
    layers: list  # Layer of each node

    @property
    def n_nodes(self) -> int:
        return self.cap_base.size

    @property
    def ua(self) -> float:
        return 1.0 / np.sum(1.0 / self.links)

    def capacitance(self, T: np.ndarray) -> np.ndarray:
        inside = (T >= self.melt_low) & (T <= self.melt_high)
        return self.cap_base + np.where(inside, self.cap_latent, 0.0)


def discretize_wall(w: WallAssembly) -> WallChain:
    dx, k, layers = [], [], []
    for layer in w.layers:
        for _ in range(w.nodes_per_layer):
            dx.append(layer.thickness / w.nodes_per_layer)
            k.append(layer.conductivity)
            layers.append(layer)
    dx = np.array(dx)
    k = np.array(k)
    A = w.area
    half_r = 0.5 * dx / k  # m^2 K/W
    links = np.empty(dx.size + 1)
    links[0] = A / (1.0 / w.h_ext + half_r[0])
    links[-1] = A / (half_r[-1] + 1.0 / w.h_int)
    links[1:-1] = A / (half_r[:-1] + half_r[1:])

    cap_base = np.array([l.density * l.specific_heat for l in layers]) * A * dx
    cap_lat = np.zeros(dx.size)
    lo = np.full(dx.size, _NO_MELT)
    hi = np.full(dx.size, _NO_MELT)
    for i, l in enumerate(layers):
        if l.pcm is not None:
            width = l.pcm.melt_high - l.pcm.melt_low
            cap_lat[i] = l.density * l.pcm.latent_heat / width * A * dx[i]
            lo[i], hi[i] = l.pcm.melt_low, l.pcm.melt_high
    return WallChain(cap_base, cap_lat, lo, hi, links, layers)


@dataclass
class NetworkSystem:
    """Arrays describing ``C(T) dT/dt = sum G (T_nbr - T) + sources`` for every node."""
    node_names: list
    zone_names: list
    cap_base: np.ndarray
    cap_latent: np.ndarray
    melt_low: np.ndarray
    melt_high: np.ndarray
    edge_i: np.ndarray
    edge_j: np.ndarray
    edge_g: np.ndarray
    ext_node: np.ndarray
    ext_g: np.ndarray
    zone_node: np.ndarray
    gains: np.ndarray  # (n_zones, 8760) W
    setpoint: np.ndarray
    kp: np.ndarray
    max_power: np.ndarray
    efficiency: np.ndarray
    initial_temperature: float = 20.0

    @property
    def n_nodes(self) -> int:
        return self.cap_base.size

    def initial_state(self) -> np.ndarray:
        return np.full(self.n_nodes, float(self.initial_temperature))

    def capacitance(self, y: np.ndarray) -> np.ndarray:
        inside = (y >= self.melt_low) & (y <= self.melt_high)
        return self.cap_base + np.where(inside, self.cap_latent, 0.0)

    def heating_power(self, y: np.ndarray) -> np.ndarray:
        p = self.kp * (self.setpoint - y[self.zone_node])
        return np.clip(p, 0.0, self.max_power)

    def derivative(self, t: float, y: np.ndarray, outdoor: np.ndarray) -> np.ndarray:
        """dT/dt at time ``t`` (s). Outdoor air is linear between hourly points;
        gains hold the value of the hour containing ``t``."""
        flow = np.zeros_like(y, dtype=float)
        q = self.edge_g * (y[self.edge_j] - y[self.edge_i])
        np.add.at(flow, self.edge_i, q)
        np.add.at(flow, self.edge_j, -q)
        t_out = outdoor_at(outdoor, t)
        np.add.at(flow, self.ext_node, self.ext_g * (t_out - y[self.ext_node]))
        hour = int(t // 3600.0) % self.gains.shape[1]
        flow[self.zone_node] += self.gains[:, hour] + self.heating_power(y)
        return flow / self.capacitance(y)

    def enthalpy(self, y: np.ndarray, T_ref: float = 0.0) -> float:
        """Total stored heat relative to every node at ``T_ref``, J."""
        pcm = np.isfinite(self.melt_low)
        lo = self.melt_low[pcm]
        width = self.melt_high[pcm] - lo
        sensible = self.cap_base * (y - T_ref)
        latent = self.cap_latent[pcm] * (np.clip(y[pcm] - lo, 0.0, width)
                                         - np.clip(T_ref - lo, 0.0, width))
        return float(np.sum(sensible) + np.sum(latent))

    def kernel_args(self):
        return (self.cap_base, self.cap_latent, self.melt_low, self.melt_high,
                self.edge_i, self.edge_j, self.edge_g, self.ext_node, self.ext_g,
                self.zone_node, self.gains, self.setpoint, self.kp, self.max_power)


def outdoor_at(outdoor: np.ndarray, t: float) -> float:
    h = t / 3600.0
    i = int(np.floor(h))
    f = h - i
    n = outdoor.shape[0]
    return outdoor[i % n] * (1.0 - f) + outdoor[(i + 1) % n] * f


def assemble_ode(model: BuildingModel) -> NetworkSystem:
    zone_idx = {z.name: i for i, z in enumerate(model.zones)}
    names = [f"zone:{z.name}" for z in model.zones]
    cap_b = [z.capacitance for z in model.zones]
    cap_l = [0.0] * len(model.zones)
    lo = [_NO_MELT] * len(model.zones)
    hi = [_NO_MELT] * len(model.zones)
    ei, ej, eg, xn, xg = [], [], [], [], []

    for i, z in enumerate(model.zones):
        ua = z.window_ua + z.infiltration_ua
        if ua > 0:
            xn.append(i)
            xg.append(ua)

    for w in model.walls:
        chain = discretize_wall(w)
        base = len(names)
        names += [f"{w.name}:{k}" for k in range(chain.n_nodes)]
        cap_b += chain.cap_base.tolist()
        cap_l += chain.cap_latent.tolist()
        lo += chain.melt_low.tolist()
        hi += chain.melt_high.tolist()
        for k in range(chain.n_nodes - 1):
            ei.append(base + k)
            ej.append(base + k + 1)
            eg.append(chain.links[k + 1])
        if w.side_a == EXTERIOR:
            xn.append(base)
            xg.append(chain.links[0])
        else:
            ei.append(zone_idx[w.side_a])
            ej.append(base)
            eg.append(chain.links[0])
        ei.append(base + chain.n_nodes - 1)
        ej.append(zone_idx[w.side_b])
        eg.append(chain.links[-1])

    zones = model.zones
    return NetworkSystem(
        node_names=names,
        zone_names=[z.name for z in zones],
        cap_base=np.array(cap_b, dtype=float),
        cap_latent=np.array(cap_l, dtype=float),
        melt_low=np.array(lo, dtype=float),
        melt_high=np.array(hi, dtype=float),
        edge_i=np.array(ei, dtype=np.int64),
        edge_j=np.array(ej, dtype=np.int64),
        edge_g=np.array(eg, dtype=float),
        ext_node=np.array(xn, dtype=np.int64),
        ext_g=np.array(xg, dtype=float),
        zone_node=np.arange(len(zones), dtype=np.int64),
        gains=np.vstack([z.gain_schedule() for z in zones]),
        setpoint=np.array([z.heating.setpoint for z in zones]),
        kp=np.array([z.heating.kp for z in zones]),
        max_power=np.array([z.heating.max_power for z in zones]),
        efficiency=np.array([z.heating.efficiency for z in zones]),
        initial_temperature=model.initial_temperature,
    )


def steady_ua_to_exterior(model: BuildingModel) -> float:
    """Total zone-to-exterior conductance with zones lumped to one node, W/K."""
    return sum(w.ua for w in model.walls if w.side_a == EXTERIOR) + sum(
        z.window_ua + z.infiltration_ua for z in model.zones)

