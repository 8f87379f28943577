# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: RSA trial placement and the building-network RK4 loop.

Signatures and semantics mirror ``pupcm._fallback``; the network RK4 steps
node enthalpies and reports temperatures.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport floor, isfinite

from .errors import NonFiniteState

cnp.import_array()


def rsa_consume(double[:, ::1] centers, Py_ssize_t n_placed,
                const double[:, ::1] candidates, double edge_length,
                double min_dist):
    cdef Py_ssize_t n_target = centers.shape[0]
    cdef Py_ssize_t n_cand = candidates.shape[0]
    cdef Py_ssize_t c, k, consumed = 0
    cdef double L = edge_length, min_d2 = min_dist * min_dist
    cdef double x, y, z, dx, dy, dz
    cdef bint ok
    for c in range(n_cand):
        if n_placed >= n_target:
            break
        consumed += 1
        x = candidates[c, 0]
        y = candidates[c, 1]
        z = candidates[c, 2]
        ok = True
        for k in range(n_placed):
            dx = centers[k, 0] - x
            dx -= L * floor(dx / L + 0.5)
            dy = centers[k, 1] - y
            dy -= L * floor(dy / L + 0.5)
            dz = centers[k, 2] - z
            dz -= L * floor(dz / L + 0.5)
            if dx * dx + dy * dy + dz * dz < min_d2:
                ok = False
                break
        if ok:
            centers[n_placed, 0] = x
            centers[n_placed, 1] = y
            centers[n_placed, 2] = z
            n_placed += 1
    return n_placed, consumed


cdef inline double _temperature(double H, double c0, double clat, double t1,
                                double t2) noexcept nogil:
    if clat <= 0.0 or H <= c0 * t1:
        return H / c0
    if H <= (c0 + clat) * t2 - clat * t1:
        return (H + clat * t1) / (c0 + clat)
    return (H - clat * (t2 - t1)) / c0


cdef inline double _enthalpy(double T, double c0, double clat, double t1,
                             double t2) noexcept nogil:
    cdef double m
    if clat <= 0.0:
        return c0 * T
    m = T - t1
    if m < 0.0:
        m = 0.0
    elif m > t2 - t1:
        m = t2 - t1
    return c0 * T + clat * m


cdef void _deriv(double t, const double[::1] H, double[::1] y, double[::1] out,
                 double[::1] pz,
                 const double[::1] c0, const double[::1] clat,
                 const double[::1] t1, const double[::1] t2,
                 const cnp.int64_t[::1] ei, const cnp.int64_t[::1] ej,
                 const double[::1] eg,
                 const cnp.int64_t[::1] xn, const double[::1] xg,
                 const cnp.int64_t[::1] zn, const double[::1] src,
                 const double[::1] sp, const double[::1] kp,
                 const double[::1] pmax,
                 const double[::1] outdoor) noexcept nogil:
    cdef Py_ssize_t n = H.shape[0], n_out = outdoor.shape[0]
    cdef Py_ssize_t e, k, i, j
    cdef double h = t / 3600.0, f, t_out, q, p
    cdef long ih = <long>floor(h)
    f = h - ih
    for k in range(n):
        y[k] = _temperature(H[k], c0[k], clat[k], t1[k], t2[k])
    t_out = outdoor[ih % n_out] * (1.0 - f) + outdoor[(ih + 1) % n_out] * f
    for k in range(n):
        out[k] = 0.0
    for e in range(ei.shape[0]):
        i = ei[e]
        j = ej[e]
        q = eg[e] * (y[j] - y[i])
        out[i] += q
        out[j] -= q
    for e in range(xn.shape[0]):
        i = xn[e]
        out[i] += xg[e] * (t_out - y[i])
    for k in range(zn.shape[0]):
        i = zn[k]
        p = kp[k] * (sp[k] - y[i])
        if p < 0.0:
            p = 0.0
        elif p > pmax[k]:
            p = pmax[k]
        pz[k] = p
        out[i] += src[k] + p


def rk4_network(y0, c0, clat, t1, t2, edge_i, edge_j, edge_g, ext_node, ext_g,
                zone_node, gains, setpoint, kp, pmax, outdoor, double dt,
                Py_ssize_t n_steps, Py_ssize_t steps_per_sample):
    cdef const double[::1] vc0 = np.ascontiguousarray(c0, dtype=np.float64)
    cdef const double[::1] vclat = np.ascontiguousarray(clat, dtype=np.float64)
    cdef const double[::1] vt1 = np.ascontiguousarray(t1, dtype=np.float64)
    cdef const double[::1] vt2 = np.ascontiguousarray(t2, dtype=np.float64)
    cdef const cnp.int64_t[::1] vei = np.ascontiguousarray(edge_i, dtype=np.int64)
    cdef const cnp.int64_t[::1] vej = np.ascontiguousarray(edge_j, dtype=np.int64)
    cdef const double[::1] veg = np.ascontiguousarray(edge_g, dtype=np.float64)
    cdef const cnp.int64_t[::1] vxn = np.ascontiguousarray(ext_node, dtype=np.int64)
    cdef const double[::1] vxg = np.ascontiguousarray(ext_g, dtype=np.float64)
    cdef const cnp.int64_t[::1] vzn = np.ascontiguousarray(zone_node, dtype=np.int64)
    cdef const double[:, ::1] vgains = np.ascontiguousarray(gains, dtype=np.float64)
    cdef const double[::1] vsp = np.ascontiguousarray(setpoint, dtype=np.float64)
    cdef const double[::1] vkp = np.ascontiguousarray(kp, dtype=np.float64)
    cdef const double[::1] vpmax = np.ascontiguousarray(pmax, dtype=np.float64)
    cdef const double[::1] vout = np.ascontiguousarray(outdoor, dtype=np.float64)

    cdef Py_ssize_t n = y0.shape[0], nz = vzn.shape[0]
    cdef Py_ssize_t n_gain = vgains.shape[1]
    cdef Py_ssize_t n_samples = n_steps // steps_per_sample
    samples_arr = np.empty((n_samples, n))
    energy_arr = np.zeros((n_samples, nz))
    y_arr = np.array(y0, dtype=np.float64)
    cdef double[:, ::1] samples = samples_arr
    cdef double[:, ::1] energy = energy_arr
    cdef double[::1] y = y_arr
    cdef double[::1] H = np.empty(n)
    cdef double[::1] ys = np.empty(n)
    cdef double[::1] tmp = np.empty(n)
    cdef double[::1] k1 = np.empty(n), k2 = np.empty(n)
    cdef double[::1] k3 = np.empty(n), k4 = np.empty(n)
    cdef double[::1] p1 = np.empty(nz), p2 = np.empty(nz)
    cdef double[::1] p3 = np.empty(nz), p4 = np.empty(nz)
    cdef double[::1] src = np.empty(nz)
    cdef Py_ssize_t s, r, k, step = 0
    cdef long hour
    cdef double t, half = 0.5 * dt, sixth = dt / 6.0
    cdef bint finite = True

    with nogil:
        for k in range(n):
            H[k] = _enthalpy(y[k], vc0[k], vclat[k], vt1[k], vt2[k])
        for s in range(n_samples):
            for r in range(steps_per_sample):
                t = step * dt
                hour = <long>floor(t / 3600.0)
                for k in range(nz):
                    src[k] = vgains[k, hour % n_gain]
                _deriv(t, H, tmp, k1, p1, vc0, vclat, vt1, vt2, vei, vej, veg,
                       vxn, vxg, vzn, src, vsp, vkp, vpmax, vout)
                for k in range(n):
                    ys[k] = H[k] + half * k1[k]
                _deriv(t + half, ys, tmp, k2, p2, vc0, vclat, vt1, vt2, vei, vej,
                       veg, vxn, vxg, vzn, src, vsp, vkp, vpmax, vout)
                for k in range(n):
                    ys[k] = H[k] + half * k2[k]
                _deriv(t + half, ys, tmp, k3, p3, vc0, vclat, vt1, vt2, vei, vej,
                       veg, vxn, vxg, vzn, src, vsp, vkp, vpmax, vout)
                for k in range(n):
                    ys[k] = H[k] + dt * k3[k]
                _deriv(t + dt, ys, tmp, k4, p4, vc0, vclat, vt1, vt2, vei, vej, veg,
                       vxn, vxg, vzn, src, vsp, vkp, vpmax, vout)
                for k in range(n):
                    H[k] = H[k] + sixth * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k])
                for k in range(nz):
                    energy[s, k] += sixth * (p1[k] + 2.0 * p2[k] + 2.0 * p3[k] + p4[k])
                step += 1
            finite = True
            for k in range(n):
                y[k] = _temperature(H[k], vc0[k], vclat[k], vt1[k], vt2[k])
                samples[s, k] = y[k]
                if not isfinite(y[k]):
                    finite = False
            if not finite:
                break
    if not finite:
        raise NonFiniteState(step * dt)
    return samples_arr, energy_arr, y_arr
