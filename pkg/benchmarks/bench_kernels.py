"""Time the compiled and pure-Python kernels on the same inputs.

Usage::

    python benchmarks/bench_kernels.py [--repeat 3] [--days 365]
"""
import argparse
import time

import numpy as np

from pupcm import _backend
from pupcm.building import assemble_ode, rk4_integrate
from pupcm.config import config_from_dict
from pupcm.rve import RveSpec, generate_packing


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--days", type=int, default=365, help="simulated days for the RK4 case")
    args = p.parse_args(argv)

    backends = [b for b in ("compiled", "python") if b in _backend.BACKENDS]
    cfg = config_from_dict({})
    system = assemble_ode(cfg.pcm_model())
    weather = cfg.load_weather()
    spec = RveSpec(target_volume_fraction=0.3, rng_seed=1)

    cases = {
        f"RSA packing ({spec.sphere_count} spheres, phi=0.3)":
            lambda b: generate_packing(spec, backend=b).centers,
        f"RK4 building network ({system.n_nodes} nodes, {args.days} d, dt=60 s)":
            lambda b: rk4_integrate(system, weather, horizon=args.days * 86400.0,
                                    backend=b).states,
    }
    print(f"{'case':<58} {'backend':>9} {'seconds':>9} {'speedup':>8}")
    for name, fn in cases.items():
        results = {}
        for b in backends:
            results[b] = best_of(lambda: fn(b), args.repeat)
        ref = results[backends[-1]][0]
        for b in backends:
            t = results[b][0]
            print(f"{name:<58} {b:>9} {t:9.3f} {ref / t:7.1f}x")
        if len(backends) == 2:
            diff = float(np.max(np.abs(results["compiled"][1] - results["python"][1])))
            print(f"{'':<58} {'max |diff|':>9} {diff:9.2e}")


if __name__ == "__main__":
    main()
