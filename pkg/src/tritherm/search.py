"""Seeded parameter search: widest transistor window or richest mode sequence.

The strategy is Latin-hypercube sampling over a bounded box followed by
local refinement around the best candidates (the objectives are cheap,
smooth, and low-dimensional).  Everything is driven by one integer seed, so
repeated runs are bit-for-bit reproducible.

A search varies a set of dotted config parameters over ranges (linear or
log scale) and can lock other parameters to sampled ones (e.g.
``cold.center = hot.center`` for zero detuning, or
``cold.temperature = mid.temperature - 0.01`` to keep the two almost equal).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from .core import ConfigError, MachineConfig, PARAM_PATHS, apply_params
from .modes import OperatingMode
from .sweep import mode_sequence_along_omega
from .transistor import DEFAULT_THRESHOLD, transistor_trace, windows_from_arrays

__all__ = ["VaryRange", "LockRule", "SearchSpec", "Candidate", "run_search"]

OBJECTIVES = ("transistor_window", "mode_sequence")

_SOFT_CAP = 1e9


@dataclass(frozen=True)
class VaryRange:
    """Sampling range of one varied parameter."""

    low: float
    high: float
    scale: str = "linear"

    def __post_init__(self):
        if self.scale not in ("linear", "log"):
            raise ConfigError(f"scale must be 'linear' or 'log', got {self.scale!r}")
        if not (self.low <= self.high):
            raise ConfigError("range low must be <= high")
        if self.scale == "log" and self.low <= 0:
            raise ConfigError("log-scaled range requires positive bounds")

    def decode(self, u: float) -> float:
        if self.scale == "log":
            lo, hi = np.log10(self.low), np.log10(self.high)
            return float(10.0 ** (lo + u * (hi - lo)))
        return float(self.low + u * (self.high - self.low))


@dataclass(frozen=True)
class LockRule:
    """Derive one parameter from a sampled one: value = source + offset."""

    source: str
    offset: float = 0.0


@dataclass(frozen=True)
class SearchSpec:
    """Search definition around a template config."""

    objective: str
    vary: dict
    lock: dict = field(default_factory=dict)
    omega_start: float = 0.02
    omega_stop: float = 0.98
    omega_count: int = 481
    threshold: float = DEFAULT_THRESHOLD
    samples: int = 200
    refine_rounds: int = 2
    refine_samples: int = 40
    pool: int = 3
    shrink: float = 0.25
    top_k: int = 5

    def __post_init__(self):
        if self.objective not in OBJECTIVES:
            raise ConfigError(f"unknown objective {self.objective!r}; "
                              f"expected one of {OBJECTIVES}")
        if not self.vary:
            raise ConfigError("search needs at least one varied parameter")
        for name in list(self.vary) + [r.source for r in self.lock.values()]:
            if name not in PARAM_PATHS:
                raise ConfigError(f"unknown parameter {name!r}")
        for name, rule in self.lock.items():
            if name not in PARAM_PATHS:
                raise ConfigError(f"unknown parameter {name!r}")
            if name in self.vary:
                raise ConfigError(f"parameter {name!r} is both varied and locked")
            if rule.source not in self.vary:
                raise ConfigError(f"lock source {rule.source!r} must be a varied "
                                  f"parameter")
        if self.samples < 1:
            raise ConfigError("samples must be >= 1")
        if self.omega_count < 3 or not (0 < self.omega_start < self.omega_stop):
            raise ConfigError("invalid omega grid")


@dataclass(frozen=True)
class Candidate:
    """One scored parameter set."""

    params: dict
    score: float
    detail: dict

    def to_dict(self) -> dict:
        return {"params": self.params, "score": self.score, "detail": self.detail}


def _decode(spec: SearchSpec, u: np.ndarray) -> dict:
    names = list(spec.vary)
    params = {name: spec.vary[name].decode(float(ui)) for name, ui in zip(names, u)}
    for target, rule in spec.lock.items():
        params[target] = params[rule.source] + rule.offset
    return params


def _omega_grid(spec: SearchSpec) -> np.ndarray:
    return np.linspace(spec.omega_start, spec.omega_stop, spec.omega_count)


def _score_transistor(config: MachineConfig, grid, threshold):
    trace = transistor_trace(config, grid)
    windows = windows_from_arrays(trace.omega, trace.r, trace.g, threshold)
    width = max((w.width for w in windows), default=0.0)
    finite = np.isfinite(trace.r) & np.isfinite(trace.g)
    soft = float(np.minimum(trace.r[finite], trace.g[finite]).max()) if finite.any() else 0.0
    in_window = np.zeros(grid.shape, dtype=bool)
    for w in windows:
        in_window |= (grid >= w.omega_min) & (grid <= w.omega_max)
    gain_mask = in_window & np.isfinite(trace.g) & trace.g_reliable
    max_gain = float(trace.g[gain_mask].max()) if gain_mask.any() else 0.0
    detail = {
        "width": width,
        "max_gain": max_gain,
        "windows": [{"omega_min": w.omega_min, "omega_max": w.omega_max,
                     "min_r": w.min_r, "min_g": w.min_g,
                     "contains_inversion": w.contains_inversion}
                    for w in windows],
    }
    return (width, min(soft, _SOFT_CAP)), detail


def _score_modes(config: MachineConfig, grid, threshold):
    runs = mode_sequence_along_omega(config, grid)
    labels = [mode for (_, mode) in runs if mode is not OperatingMode.DEGENERATE]
    distinct = sorted({m.value for m in labels})
    switches = max(len(runs) - 1, 0)
    detail = {
        "distinct_modes": distinct,
        "switches": switches,
        "runs": [[lo, hi, mode.value] for ((lo, hi), mode) in runs],
    }
    return (float(len(distinct)), float(min(switches, 999))), detail


def _evaluate(template, spec, grid, params):
    config = apply_params(template, params)
    try:
        config.validate()
    except ConfigError:
        return (-np.inf, -np.inf), {"invalid": True}
    if spec.objective == "transistor_window":
        return _score_transistor(config, grid, spec.threshold)
    return _score_modes(config, grid, spec.threshold)


def run_search(template: MachineConfig, spec: SearchSpec, seed: int) -> list[Candidate]:
    """Run the seeded search; returns the top-k candidates, best first.

    Deterministic for a fixed (template, spec, seed): identical ranking,
    parameters, and scores on every run.  Candidates that violate the
    machine's validity constraints score ``-inf`` and are dropped from the
    returned list.
    """
    dim = len(spec.vary)
    grid = _omega_grid(spec)
    if grid[-1] >= template.wm.omega0:
        raise ConfigError("search omega grid must stay below omega0")

    sampler = qmc.LatinHypercube(d=dim, seed=seed)
    entries = []
    for order, u in enumerate(sampler.random(spec.samples)):
        params = _decode(spec, u)
        score, detail = _evaluate(template, spec, grid, params)
        entries.append((score, (params, detail), order, tuple(u)))

    entries.sort(key=lambda e: (-e[0][0], -e[0][1], e[2]))
    pool = entries[:max(spec.pool, 1)]

    shrink = spec.shrink
    counter = spec.samples
    sub_seed = seed + 1001
    for _ in range(spec.refine_rounds):
        new_entries = list(pool)
        for entry in pool:
            u0 = np.array(entry[3])
            lo = np.clip(u0 - shrink, 0.0, 1.0)
            hi = np.clip(u0 + shrink, 0.0, 1.0)
            sub = qmc.LatinHypercube(d=dim, seed=sub_seed)
            sub_seed += 1
            for v in sub.random(spec.refine_samples):
                u = lo + v * (hi - lo)
                params = _decode(spec, u)
                score, detail = _evaluate(template, spec, grid, params)
                new_entries.append((score, (params, detail), counter, tuple(u)))
                counter += 1
        new_entries.sort(key=lambda e: (-e[0][0], -e[0][1], e[2]))
        pool = new_entries[:max(spec.pool, 1)]
        shrink *= 0.5

    ranked = pool + [e for e in entries if e not in pool]
    ranked.sort(key=lambda e: (-e[0][0], -e[0][1], e[2]))
    out = []
    for score, (params, detail), order, _ in ranked[:spec.top_k]:
        if not np.isfinite(score[0]):
            continue
        out.append(Candidate(params={k: float(v) for k, v in params.items()},
                             score=float(score[0]),
                             detail={**detail, "soft_score": float(score[1])}))
    return out
