"""Pure-Python/numpy implementations of the hot kernels.

Same call signatures as the compiled ``_core`` module; selected by
``pupcm._backend`` when the extension is unavailable or disabled.
"""
import numpy as np
import scipy.sparse as sp

from .errors import NonFiniteState


def rsa_consume(centers, n_placed, candidates, edge_length, min_dist):
    """Try candidates in order, appending each non-overlapping one to ``centers``.

    Returns ``(n_placed, n_consumed)``. Stops as soon as ``centers`` is full.
    """
    n_target = centers.shape[0]
    L = edge_length
    min_d2 = min_dist * min_dist
    consumed = 0
    for cand in candidates:
        if n_placed >= n_target:
            break
        consumed += 1
        if n_placed:
            d = centers[:n_placed] - cand
            d -= L * np.floor(d / L + 0.5)
            d2 = d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1] + d[:, 2] * d[:, 2]
            if np.any(d2 < min_d2):
                continue
        centers[n_placed] = cand
        n_placed += 1
    return n_placed, consumed


def node_enthalpy(T, c0, clat, t1, t2):
    """Stored heat per node relative to 0 C, J. Latent part only where ``clat > 0``."""
    pcm = clat > 0
    lo = np.where(pcm, t1, 0.0)
    width = np.where(pcm, t2, 0.0) - lo
    return c0 * T + clat * np.clip(T - lo, 0.0, width)


def node_temperature(H, c0, clat, t1, t2):
    """Inverse of :func:`node_enthalpy` (piecewise linear and increasing)."""
    pcm = clat > 0
    lo = np.where(pcm, t1, 0.0)
    hi = np.where(pcm, t2, 0.0)
    T = H / c0
    melting = pcm & (H > c0 * lo)
    T = np.where(melting, (H + clat * lo) / (c0 + clat), T)
    melted = pcm & (H > (c0 + clat) * hi - clat * lo)
    return np.where(melted, (H - clat * (hi - lo)) / c0, T)


def rk4_network(y0, c0, clat, t1, t2, edge_i, edge_j, edge_g, ext_node, ext_g,
                zone_node, gains, setpoint, kp, pmax, outdoor, dt, n_steps,
                steps_per_sample):
    """Classic RK4 on node enthalpies, sampling temperatures every
    ``steps_per_sample`` steps.

    ``y0`` and the returned samples are temperatures; the stepped state is
    enthalpy, so heat moved between nodes is conserved to round-off even when
    a step crosses a melt-range edge. Also returns the heating energy per
    sample interval, J, integrated with the RK4 stage weights.
    """
    n = y0.shape[0]
    n_out = outdoor.shape[0]
    n_gain = gains.shape[1]
    nz = zone_node.shape[0]

    lap = sp.coo_matrix(
        (np.concatenate([edge_g, edge_g, -edge_g, -edge_g]),
         (np.concatenate([edge_i, edge_j, edge_i, edge_j]),
          np.concatenate([edge_i, edge_j, edge_j, edge_i]))),
        shape=(n, n),
    ).tocsr()
    gext = np.zeros(n)
    np.add.at(gext, ext_node, ext_g)
    a_mat = (-lap - sp.diags(gext)).tocsr()

    def temperature(H):
        return node_temperature(H, c0, clat, t1, t2)

    def deriv(t, H, src):
        y = temperature(H)
        h = t / 3600.0
        i = int(np.floor(h))
        f = h - i
        t_out = outdoor[i % n_out] * (1.0 - f) + outdoor[(i + 1) % n_out] * f
        p = np.clip(kp * (setpoint - y[zone_node]), 0.0, pmax)
        flow = a_mat @ y + gext * t_out
        flow[zone_node] += src + p
        return flow, p

    n_samples = n_steps // steps_per_sample
    samples = np.empty((n_samples, n))
    energy = np.zeros((n_samples, nz))
    H = node_enthalpy(np.asarray(y0, dtype=float), c0, clat, t1, t2)
    step = 0
    for s in range(n_samples):
        e_acc = np.zeros(nz)
        for _ in range(steps_per_sample):
            t = step * dt
            src = gains[:, int(t // 3600.0) % n_gain]
            k1, p1 = deriv(t, H, src)
            k2, p2 = deriv(t + 0.5 * dt, H + 0.5 * dt * k1, src)
            k3, p3 = deriv(t + 0.5 * dt, H + 0.5 * dt * k2, src)
            k4, p4 = deriv(t + dt, H + dt * k3, src)
            H = H + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            e_acc += (dt / 6.0) * (p1 + 2.0 * p2 + 2.0 * p3 + p4)
            step += 1
        y = temperature(H)
        if not np.all(np.isfinite(y)):
            raise NonFiniteState(step * dt)
        samples[s] = y
        energy[s] = e_acc
    return samples, energy, temperature(H)
