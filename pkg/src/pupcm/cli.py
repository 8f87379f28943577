"""``pupcm`` command line.

Stages chain through files in one output directory:
rve-gen -> solve -> homogenize -> mix -> weather-synth -> building-run / building-compare.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import _backend
from .building.reports import compare_scenarios, run_scenario
from .errors import (ConfigError, MalformedWeather, NonConvergence, NonFiniteState,
                     PackingInfeasible)
from .fem import BoundarySpec, average_gradient_and_flux, solve_steady
from .homogenize import BoundViolation, EnsembleReport, reuss_voigt_bounds, run_ensemble
from .io import write_array_file, write_json
from .mixing import macro_json, upscale_ensemble
from .params import REPORTED_EFFECTIVE_K
from .rve import achieved_volume_fraction, generate_packing, voxelize

log = logging.getLogger("pupcm")

EXIT_OK, EXIT_CONFIG, EXIT_PACKING, EXIT_SOLVER, EXIT_WEATHER, EXIT_NONFINITE = 0, 2, 3, 4, 5, 6


def _write_text(path, text):
    with open(path, "w", newline="") as fh:
        fh.write(text)


def cmd_rve_gen(cfg, out, args):
    spheres = generate_packing(cfg.rve)
    grid = voxelize(spheres, cfg.n_per_axis)
    _write_text(os.path.join(out, "spheres.json"), spheres.to_json() + "\n")
    write_array_file(os.path.join(out, "voxels.bin"), *grid.to_bytes())
    print(f"{len(spheres)} spheres, volume fraction {achieved_volume_fraction(spheres):.4f} "
          f"(voxel {grid.volume_fraction(1):.4f}), grid {grid.n_per_axis}^3")


def cmd_solve(cfg, out, args):
    spheres = generate_packing(cfg.rve)
    grid = voxelize(spheres, cfg.n_per_axis)
    if cfg.bc == "flux":
        bc = BoundarySpec.flux_pair(cfg.axis, cfg.q_bar)
    else:
        bc = BoundarySpec.temperature_pair(cfg.axis, 0.0, 1.0)
    field = solve_steady(grid, cfg.materials, bc, tol=cfg.tol)
    grad, flux = average_gradient_and_flux(field, grid, cfg.materials)
    a = "xyz".index(cfg.axis)
    write_array_file(os.path.join(out, f"field_{cfg.axis}.bin"), *field.to_bytes())
    diag = {"axis": cfg.axis, "bc": cfg.bc, "iterations": field.info.iterations,
            "residual": field.info.residual, "mean_gradient": grad.tolist(),
            "mean_flux": flux.tolist(), "k_effective": float(-flux[a] / grad[a])}
    write_json(os.path.join(out, f"solve_{cfg.axis}.json"), diag)
    print(json.dumps(diag, sort_keys=True))


def cmd_homogenize(cfg, out, args):
    report = run_ensemble(cfg.rve, cfg.materials, cfg.seeds, cfg.n_per_axis, cfg.bc,
                          cfg.q_bar, cfg.tol, workers=args.workers)
    _write_text(os.path.join(out, "ensemble.json"), report.to_json() + "\n")
    _write_text(os.path.join(out, "ensemble.csv"), report.to_csv())
    k = [m.conductivity for _, m in sorted(cfg.materials.phases.items())]
    print(f"{'seed':>6} {'kxx':>10} {'kyy':>10} {'kzz':>10}  bounds")
    for r in report.per_seed:
        phi = r["volume_fraction"]
        lo, hi = reuss_voigt_bounds([k[0], k[-1]], [1 - phi, phi])
        ok = all(lo * (1 - 1e-9) <= r[c] <= hi * (1 + 1e-9) for c in ("kxx", "kyy", "kzz"))
        print(f"{r['seed']:>6} {r['kxx']:10.6f} {r['kyy']:10.6f} {r['kzz']:10.6f}  "
              f"[{lo:.4f}, {hi:.4f}] {'ok' if ok else 'VIOLATED'}")
    mean = report.mean
    print(f"{'mean':>6} {mean[0]:10.6f} {mean[1]:10.6f} {mean[2]:10.6f}  "
          f"isotropy deviation {report.isotropy_deviation:.4f}")
    print(f"reference value {REPORTED_EFFECTIVE_K} W/(m K) differs from the mean by "
          f"{mean.mean() - REPORTED_EFFECTIVE_K:+.4f} W/(m K)")


def cmd_mix(cfg, out, args):
    src = args.input or os.path.join(out, "ensemble.json")
    if not os.path.exists(src):
        raise ConfigError(f"ensemble report {src} does not exist")
    with open(src) as fh:
        report = EnsembleReport.from_dict(json.load(fh))
    t = upscale_ensemble(report, cfg.weighting)
    _write_text(os.path.join(out, "k_macro.json"), macro_json(t, cfg.weighting) + "\n")
    print(macro_json(t, cfg.weighting))


def cmd_weather_synth(cfg, out, args):
    w = cfg.load_weather()
    _write_text(os.path.join(out, "weather.csv"), w.to_csv())
    m = w.monthly_means()
    print(f"annual mean {w.temps.mean():.2f} C, January {m[0]:.2f} C, July {m[6]:.2f} C")


def _scenario_files(out, tag, res):
    write_json(os.path.join(out, f"ledger{tag}.json"), res.ledger.to_dict())
    _write_text(os.path.join(out, f"ledger{tag}.csv"), res.ledger.to_csv())
    write_json(os.path.join(out, f"comfort{tag}.json"), res.comfort.as_dict())
    _write_text(os.path.join(out, f"trace{tag}.csv"), res.trace.to_csv())


def cmd_building_run(cfg, out, args):
    weather = cfg.load_weather()
    res = run_scenario(cfg.run_model(), weather, dt=cfg.dt)
    _scenario_files(out, "", res)
    print(res.ledger.to_csv(), end="")
    print(json.dumps(res.comfort.as_dict(), sort_keys=True))


def cmd_building_compare(cfg, out, args):
    weather = cfg.load_weather()
    cmp_ = compare_scenarios(cfg.base_model(), cfg.pcm_model(), weather, dt=cfg.dt,
                             workers=min(args.workers, 2))
    _scenario_files(out, "_base", cmp_.base)
    _scenario_files(out, "_pcm", cmp_.pcm)
    d = cmp_.to_dict()
    write_json(os.path.join(out, "compare.json"), d)
    print(json.dumps(d["delta"], indent=2, sort_keys=True))


COMMANDS = {
    "rve-gen": (cmd_rve_gen, "pack spheres and voxelize: spheres.json, voxels.bin"),
    "solve": (cmd_solve, "one steady solve along solver.axis: field_<axis>.bin, "
                         "solve_<axis>.json"),
    "homogenize": (cmd_homogenize, "tensor per seed: ensemble.json, ensemble.csv"),
    "mix": (cmd_mix, "rule-of-mixtures upscaling of an ensemble: k_macro.json"),
    "weather-synth": (cmd_weather_synth, "synthetic hourly weather: weather.csv"),
    "building-run": (cmd_building_run, "annual run: ledger.json/.csv, comfort.json, "
                                       "trace.csv"),
    "building-compare": (cmd_building_compare, "without vs with PCM: compare.json plus "
                                               "per-scenario ledgers and traces"),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="pupcm", description="PU-PCM foam homogenization and building simulation.",
        epilog="exit codes: 2 config/validation, 3 packing infeasible, 4 solver failure, "
               "5 malformed weather, 6 simulation diverged")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")
    for name, (_, summary) in COMMANDS.items():
        s = sub.add_parser(name, help=summary, description=summary)
        s.add_argument("--config", help="pipeline config JSON (defaults apply if omitted)")
        s.add_argument("--out", help="existing output directory (default: output_dir)")
        s.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                       help="parallel jobs for seeds/scenarios (default: all cores)")
        s.add_argument("--seed-override", type=int, default=None,
                       help="replace packing, ensemble and weather seeds with N")
        s.add_argument("-v", "--verbose", action="store_true")
        if name == "mix":
            s.add_argument("--input", help="ensemble.json (default: <out>/ensemble.json)")
    return p


def main(argv=None) -> int:
    from .config import config_from_dict, load_config

    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.config:
            cfg = load_config(args.config, seed_override=args.seed_override)
        else:
            cfg = config_from_dict({}, seed_override=args.seed_override)
        out = args.out or cfg.output_dir
        if not out:
            raise ConfigError("no output directory given (--out or output_dir)")
        if not os.path.isdir(out):
            raise ConfigError(f"output directory {out} does not exist")
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        log.info("kernel backend: %s", _backend.active_name())
        COMMANDS[args.command][0](cfg, out, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PackingInfeasible as exc:
        print(f"packing infeasible (target_volume_fraction="
              f"{cfg.rve.target_volume_fraction}): {exc}", file=sys.stderr)
        return EXIT_PACKING
    except (NonConvergence, BoundViolation) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except MalformedWeather as exc:
        print(f"malformed weather: {exc}", file=sys.stderr)
        return EXIT_WEATHER
    except NonFiniteState as exc:
        print(f"simulation diverged: {exc}", file=sys.stderr)
        return EXIT_NONFINITE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
