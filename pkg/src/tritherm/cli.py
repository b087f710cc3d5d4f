"""Command-line frontend: point reports, sweeps, transistor traces, searches.

Configs are YAML files with nested sections mirroring the MachineConfig
fields (all frequencies and temperatures in units of omega0)::

    drive_freq: 0.5
    wm:   {omega0: 1.0, mass: 1.0}
    hot:  {temperature: 0.8, center: 1.5, width: 0.05, kappa: 0.01}
    cold: {temperature: 0.2, center: 0.75, width: 0.05, kappa: 0.01}
    mid:  {temperature: 0.5, gamma_m: 0.1}

Every file-producing command writes a JSON manifest next to its output;
re-running with ``--from-manifest`` reproduces the output byte for byte
(the manifest pins the config snapshot, grid, seed, and kernel backend).

Exit codes: 0 success, 1 validation/parse error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import dataclasses
import datetime
import json
import os
import sys

import numpy as np
import yaml

from . import __version__, _kernels
from .core import (ConfigError, DomainError, MachineConfig, TrithermError,
                   apply_params)
from .modes import mode_report
from .search import LockRule, SearchSpec, VaryRange, run_search
from .sweep import Axis, SweepSpec, run_sweep
from .transistor import (DEFAULT_STEP, DEFAULT_THRESHOLD, transistor_trace,
                         windows_from_arrays)

ENV_THREADS = "TRITHERM_THREADS"


def _load_yaml(path: str) -> dict:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must contain a mapping")
    return data


def _parse_overrides(pairs) -> dict:
    out = {}
    for pair in pairs or ():
        if "=" not in pair:
            raise ConfigError(f"--set expects key=value, got {pair!r}")
        key, _, value = pair.partition("=")
        try:
            out[key.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"--set {key}: value must be a number, "
                              f"got {value!r}") from None
    return out


def _load_config(args) -> tuple[MachineConfig, dict]:
    raw = _load_yaml(args.config)
    config = MachineConfig.from_dict(raw)
    overrides = _parse_overrides(getattr(args, "set", None))
    if overrides:
        config = apply_params(config, overrides)
    return config, raw


def _validate(config, args) -> list[str]:
    warnings = config.validate(relax=getattr(args, "relax_validation", False))
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    return warnings


def _default_threads() -> int:
    raw = os.environ.get(ENV_THREADS, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _json_dump(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def _write_manifest(out_path: str, command: str, config: MachineConfig,
                    extra: dict, seed=None) -> str:
    manifest = {
        "artifact": "tritherm",
        "version": __version__,
        "backend": _kernels.get_backend(),
        "command": command,
        "config": config.to_dict(),
        "seed": seed,
        "outputs": [os.path.basename(out_path)],
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        **extra,
    }
    path = out_path + ".manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=1)
    return path


def _load_manifest(path: str, command: str) -> dict:
    with open(path) as fh:
        manifest = json.load(fh)
    if manifest.get("command") != command:
        raise ConfigError(f"manifest {path} was written by "
                          f"{manifest.get('command')!r}, not {command!r}")
    backend = manifest.get("backend")
    if backend and backend != _kernels.get_backend():
        try:
            _kernels.set_backend(backend)
        except ValueError as exc:
            raise ConfigError(f"manifest requires kernel backend {backend!r}: "
                              f"{exc}") from None
    return manifest


DEFAULT_AXIS_COUNT = 201


def _parse_axis(text: str) -> Axis:
    parts = text.split(":")
    if len(parts) == 3:
        parts.append(str(DEFAULT_AXIS_COUNT))
    if len(parts) != 4:
        raise ConfigError(f"axis must be param:start:stop[:count], got {text!r}")
    param, start, stop, count = parts
    try:
        return Axis(param=param, start=float(start), stop=float(stop),
                    count=int(count))
    except ValueError:
        raise ConfigError(f"malformed axis {text!r}") from None


def cmd_point(args) -> int:
    config, _ = _load_config(args)
    warnings = _validate(config, args)
    report = mode_report(config)
    payload = {
        "config": config.to_dict(),
        **report.to_dict(),
        "warnings": warnings,
    }
    text = json.dumps(payload, sort_keys=True, indent=1)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def cmd_sweep(args) -> int:
    if args.from_manifest:
        manifest = _load_manifest(args.from_manifest, "sweep")
        config = MachineConfig.from_dict(manifest["config"])
        grid = manifest["sweep"]
        axis1 = Axis(**grid["axis1"])
        axis2 = Axis(**grid["axis2"]) if grid.get("axis2") else None
        outputs = frozenset(grid["outputs"])
    else:
        if not args.config or not args.axis1:
            raise ConfigError("sweep needs --config and --axis1 "
                              "(or --from-manifest)")
        config, _ = _load_config(args)
        _validate(config, args)
        axis1 = _parse_axis(args.axis1)
        axis2 = _parse_axis(args.axis2) if args.axis2 else None
        outputs = frozenset((args.outputs or "currents,mode,exergy").split(","))

    spec = SweepSpec(template=config, axis1=axis1, axis2=axis2, outputs=outputs)
    threads = args.threads or _default_threads()
    result = run_sweep(spec, threads=threads)
    result.to_csv(args.out)
    if args.json:
        result.to_json(args.out + ".json")
    _write_manifest(args.out, "sweep", config, {
        "sweep": {"axis1": axis1.to_dict(),
                  "axis2": axis2.to_dict() if axis2 else None,
                  "outputs": sorted(outputs)},
    })
    n_err = sum(1 for e in result.errors if e)
    print(f"sweep: {result.size} cells ({n_err} error cells) -> {args.out}",
          file=sys.stderr)
    return 0


def cmd_transistor(args) -> int:
    if args.from_manifest:
        manifest = _load_manifest(args.from_manifest, "transistor")
        config = MachineConfig.from_dict(manifest["config"])
        t = manifest["transistor"]
        omega_min, omega_max = t["omega_min"], t["omega_max"]
        points, threshold, step = t["points"], t["threshold"], t["step"]
    else:
        if not args.config:
            raise ConfigError("transistor needs --config (or --from-manifest)")
        config, _ = _load_config(args)
        _validate(config, args)
        omega_min, omega_max = args.omega_min, args.omega_max
        points, threshold, step = args.points, args.threshold, args.step

    grid = np.linspace(omega_min, omega_max, points)
    trace = transistor_trace(config, grid, step=step)
    windows = windows_from_arrays(trace.omega, trace.r, trace.g, threshold)

    in_window = np.zeros(grid.shape, dtype=bool)
    for w in windows:
        in_window |= (grid >= w.omega_min) & (grid <= w.omega_max)
    with open(args.out, "w", newline="") as fh:
        fh.write("omega_drive,j_hot,j_cold,j_mid,power,r,g,in_window\n")
        for k in range(grid.size):
            fh.write(",".join([
                repr(float(trace.omega[k])), repr(float(trace.j_hot[k])),
                repr(float(trace.j_cold[k])), repr(float(trace.j_mid[k])),
                repr(float(trace.power[k])), repr(float(trace.r[k])),
                repr(float(trace.g[k])), str(int(in_window[k])),
            ]) + "\n")
    _write_manifest(args.out, "transistor", config, {
        "transistor": {"omega_min": omega_min, "omega_max": omega_max,
                       "points": points, "threshold": threshold, "step": step},
    })
    summary = {
        "threshold": threshold,
        "windows": [{"omega_min": w.omega_min, "omega_max": w.omega_max,
                     "width": w.width, "min_r": w.min_r, "min_g": w.min_g,
                     "contains_inversion": w.contains_inversion}
                    for w in windows],
    }
    print(json.dumps(summary, sort_keys=True, indent=1))
    return 0


def _search_spec_from_dict(data: dict) -> SearchSpec:
    if not isinstance(data, dict):
        raise ConfigError("config must contain a 'search' mapping")
    vary = {}
    for name, rng in (data.get("vary") or {}).items():
        if not isinstance(rng, dict):
            raise ConfigError(f"search.vary.{name} must be a mapping")
        vary[name] = VaryRange(low=float(rng["min"]), high=float(rng["max"]),
                               scale=rng.get("scale", "linear"))
    lock = {}
    for name, rule in (data.get("lock") or {}).items():
        if not isinstance(rule, dict) or "source" not in rule:
            raise ConfigError(f"search.lock.{name} needs a 'source'")
        lock[name] = LockRule(source=rule["source"],
                              offset=float(rule.get("offset", 0.0)))
    grid = data.get("omega_grid") or {}
    return SearchSpec(
        objective=data.get("objective", "transistor_window"),
        vary=vary, lock=lock,
        omega_start=float(grid.get("start", 0.02)),
        omega_stop=float(grid.get("stop", 0.98)),
        omega_count=int(grid.get("count", 481)),
        threshold=float(data.get("threshold", DEFAULT_THRESHOLD)),
        samples=int(data.get("samples", 200)),
        refine_rounds=int(data.get("refine_rounds", 2)),
        refine_samples=int(data.get("refine_samples", 40)),
        pool=int(data.get("pool", 3)),
        shrink=float(data.get("shrink", 0.25)),
        top_k=int(data.get("top_k", 5)),
    )


def cmd_search(args) -> int:
    if args.from_manifest:
        manifest = _load_manifest(args.from_manifest, "search")
        config = MachineConfig.from_dict(manifest["config"])
        spec = _search_spec_from_dict(manifest["search"])
        seed = manifest["seed"]
    else:
        if not args.config:
            raise ConfigError("search needs --config (or --from-manifest)")
        config, raw = _load_config(args)
        _validate(config, args)
        if "search" not in raw:
            raise ConfigError("config file has no 'search' section")
        spec = _search_spec_from_dict(raw["search"])
        if args.threshold is not None:
            spec = dataclasses.replace(spec, threshold=args.threshold)
        if args.top_k is not None:
            spec = dataclasses.replace(spec, top_k=args.top_k)
        seed = args.seed

    candidates = run_search(config, spec, seed)
    payload = {
        "objective": spec.objective,
        "seed": seed,
        "candidates": [c.to_dict() for c in candidates],
    }
    if not candidates:
        print("warning: empty feasible space, no candidates found",
              file=sys.stderr)
    text = _json_dump(payload)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        _write_manifest(args.out, "search", config, {
            "search": _search_dict(spec),
        }, seed=seed)
    else:
        print(text)
    return 0


def _search_dict(spec: SearchSpec) -> dict:
    return {
        "objective": spec.objective,
        "vary": {k: {"min": v.low, "max": v.high, "scale": v.scale}
                 for k, v in spec.vary.items()},
        "lock": {k: {"source": r.source, "offset": r.offset}
                 for k, r in spec.lock.items()},
        "omega_grid": {"start": spec.omega_start, "stop": spec.omega_stop,
                       "count": spec.omega_count},
        "threshold": spec.threshold,
        "samples": spec.samples,
        "refine_rounds": spec.refine_rounds,
        "refine_samples": spec.refine_samples,
        "pool": spec.pool,
        "shrink": spec.shrink,
        "top_k": spec.top_k,
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tritherm",
        description="Driven three-terminal quantum thermal machine simulator")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, manifest=True):
        p.add_argument("--config", help="YAML config file")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a config parameter (repeatable)")
        p.add_argument("--relax-validation", action="store_true",
                       help="permit equal temperatures (test fixtures)")
        if manifest:
            p.add_argument("--from-manifest", metavar="PATH",
                           help="re-run from a previously written manifest")

    p = sub.add_parser("point", help="evaluate one operating point")
    common(p, manifest=False)
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.set_defaults(func=cmd_point)

    p = sub.add_parser("sweep", help="run a 1D/2D parameter sweep to CSV")
    common(p)
    p.add_argument("--axis1", metavar="PARAM:START:STOP[:COUNT]",
                   help=f"count defaults to {DEFAULT_AXIS_COUNT}")
    p.add_argument("--axis2", metavar="PARAM:START:STOP[:COUNT]")
    p.add_argument("--outputs", help="comma list of currents,mode,exergy,transistor")
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--json", action="store_true",
                   help="also write <out>.json with a metadata header")
    p.add_argument("--threads", type=int,
                   help=f"worker threads (default ${ENV_THREADS} or 1)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("transistor", help="r/g trace over a drive range")
    common(p)
    p.add_argument("--omega-min", type=float, default=0.02)
    p.add_argument("--omega-max", type=float, default=0.98)
    p.add_argument("--points", type=int, default=481)
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--step", type=float, default=DEFAULT_STEP,
                   help="relative finite-difference step")
    p.add_argument("--out", required=True, help="CSV output path")
    p.set_defaults(func=cmd_transistor)

    p = sub.add_parser("search", help="seeded parameter search")
    common(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threshold", type=float)
    p.add_argument("--top-k", type=int, dest="top_k")
    p.add_argument("--out", help="write the JSON results here instead of stdout")
    p.set_defaults(func=cmd_search)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except TrithermError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
