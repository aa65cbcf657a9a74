"""Campaign orchestration and report emission.

A campaign maps a deterministic per-trial function over trial indices 0..N-1.
Each trial derives its own generator from (master seed, trial index), so the
margins are identical however the trials are chunked over worker threads;
reduction is by concatenation in index order followed by associative min/max.

Reports are plain dictionaries with a versioned schema, the fully resolved
configuration, and summary statistics; serialization sorts keys so a rerun
with the same configuration is byte-identical apart from the timestamp field.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .funcalc import ScalarFunction, resolve_function
from .inequality import (DetMargin, OrderedQuadruple, det_isoperimetric_margin,
                         isoperimetric_check, lamecor_suite,
                         matrix_convex_margin, matrix_monotone_margin,
                         quadruple_to_dict, sample_quadruple,
                         trace_minmax_margin, trial_rng)

__all__ = [
    "CampaignConfig",
    "REPORT_SCHEMA_VERSION",
    "margins_to_csv",
    "make_report",
    "parallel_trials",
    "run_convex",
    "run_monotone",
    "run_verify",
    "write_json_report",
]

REPORT_SCHEMA_VERSION = 1

VERIFY_CHECKS = ("traceminmax", "det", "lamecor", "isoperimetric")


@dataclass
class CampaignConfig:
    function: str = "x2"
    check: str = "traceminmax"
    interval: tuple = (-1.0, 1.0)
    dims: tuple = tuple(range(1, 9))
    trials: int = 1000
    seed: int = 0
    tol: float = 1e-10
    workers: int = 1
    t_samples: int = 10  # characteristic-polynomial t draws per quadruple

    def as_dict(self) -> dict:
        return {
            "function": self.function,
            "check": self.check,
            "interval": [self.interval[0], self.interval[1]],
            "dims": list(self.dims),
            "trials": self.trials,
            "seed": self.seed,
            "tol": self.tol,
            "workers": self.workers,
            "t_samples": self.t_samples,
        }

    def validate(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if not self.interval[0] < self.interval[1]:
            raise ValueError("interval must be nonempty")
        if not self.dims or any(d < 1 for d in self.dims):
            raise ValueError("dims must be positive")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.check not in VERIFY_CHECKS:
            raise ValueError(f"unknown check {self.check!r} (have {VERIFY_CHECKS})")


def parallel_trials(trial_fn, trials: int, workers: int = 1) -> list:
    """Map trial_fn over range(trials); result order never depends on workers."""
    if workers <= 1 or trials < 4:
        return [trial_fn(i) for i in range(trials)]
    chunk = max(1, trials // (workers * 4))
    ranges = [(lo, min(lo + chunk, trials)) for lo in range(0, trials, chunk)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(lambda span: [trial_fn(i) for i in range(*span)], ranges)
        out = []
        for part in parts:
            out.extend(part)
    return out


def _summary(values: np.ndarray) -> dict:
    finite = values[np.isfinite(values)]
    return {
        "count": int(values.size),
        "min": float(np.min(values)) if values.size else None,
        "max": float(np.max(values)) if values.size else None,
        "mean": float(np.mean(finite)) if finite.size else None,
        "argmin": int(np.argmin(values)) if values.size else None,
    }


def _dim_for_trial(dims, i):
    return dims[i % len(dims)]


def run_verify(cfg: CampaignConfig) -> dict:
    """Trace-minmax / determinant / lamecor / isoperimetric campaign."""
    cfg.validate()
    f = resolve_function(cfg.function)
    start = time.perf_counter()
    if cfg.check == "lamecor":
        results = _run_lamecor(cfg)
    else:
        results = _run_margin_campaign(cfg, f)
    results["wall_time_s"] = time.perf_counter() - start
    return results


def _sample_for(cfg, i) -> OrderedQuadruple:
    return sample_quadruple(_dim_for_trial(cfg.dims, i), cfg.interval,
                            cfg.seed, counter=i, validate=False)


def _run_margin_campaign(cfg: CampaignConfig, f: ScalarFunction) -> dict:
    if cfg.check == "isoperimetric" and cfg.interval[0] < 0:
        raise ValueError("isoperimetric check requires a nonnegative interval")

    def trial(i: int) -> float:
        q = _sample_for(cfg, i)
        if cfg.check == "traceminmax":
            return trace_minmax_margin(f, q)
        if cfg.check == "det":
            res: DetMargin = det_isoperimetric_margin(f, q)
            return res.margin
        return isoperimetric_check(q)

    margins = np.asarray(parallel_trials(trial, cfg.trials, cfg.workers), dtype=float)
    violations = int(np.sum(margins < -cfg.tol))
    summary = _summary(margins)
    witness = None
    if violations:
        worst = summary["argmin"]
        q = _sample_for(cfg, worst)
        witness = {
            "trial": worst,
            "margin": float(margins[worst]),
            "quadruple": quadruple_to_dict(q),
        }
    return {
        "margins": summary,
        "violations": violations,
        "witness": witness,
        "all_margins": margins,
    }


def _run_lamecor(cfg: CampaignConfig) -> dict:
    def trial(i: int):
        q = _sample_for(cfg, i)
        rng = trial_rng(cfg.seed, counter=(1 << 32) + i)  # separate t stream
        la = q.A.eigenvalues()
        lc = q.C.eigenvalues()
        norm_a = max(abs(la[0]), abs(la[-1]))
        norm_c = max(abs(lc[0]), abs(lc[-1]))
        t_lo = -1.0 / norm_a if norm_a > 0 else -1e6
        t_hi = 1.0 / norm_c if norm_c > 0 else 1e6
        char_min = math.inf
        first = None
        for _ in range(cfg.t_samples):
            t = rng.uniform(t_lo * 0.999, t_hi * 0.999)
            rep = lamecor_suite(q, t)
            char_min = min(char_min, rep.char_poly_margin)
            if first is None:
                first = rep
        return (abs(first.trace_residual) / first.trace_scale,
                first.sq_frobenius_margin, first.plain_frobenius_margin, char_min)

    rows = np.asarray(parallel_trials(trial, cfg.trials, cfg.workers), dtype=float)
    trace_max = float(np.max(rows[:, 0]))
    sq_min = float(np.min(rows[:, 1]))
    plain_min = float(np.min(rows[:, 2]))
    char_min = float(np.min(rows[:, 3]))
    violations = int(trace_max > 1e-12) + int(sq_min < -cfg.tol) \
        + int(char_min < -cfg.tol)
    return {
        "trace_residual_max": trace_max,
        "sq_frobenius_min": sq_min,
        "plain_frobenius_min": plain_min,  # reported, not asserted
        "char_poly_min": char_min,
        "violations": violations,
        "witness": None,
        "all_margins": rows[:, 3],
    }


def run_monotone(cfg: CampaignConfig) -> dict:
    """Matrix-monotonicity margins (direct pairs plus Loewner matrices)."""
    cfg.validate()
    f = resolve_function(cfg.function)
    start = time.perf_counter()

    def trial(i: int) -> float:
        return matrix_monotone_margin(f, cfg.interval, _dim_for_trial(cfg.dims, i),
                                      cfg.seed, counter=i)

    margins = np.asarray(parallel_trials(trial, cfg.trials, cfg.workers), dtype=float)
    return {
        "margins": _summary(margins),
        "violations": int(np.sum(margins < -cfg.tol)),
        "witness": None,
        "all_margins": margins,
        "wall_time_s": time.perf_counter() - start,
    }


def run_convex(cfg: CampaignConfig) -> dict:
    """Matrix-convexity margins for midpoints of random pairs."""
    cfg.validate()
    f = resolve_function(cfg.function)
    start = time.perf_counter()

    def trial(i: int) -> float:
        return matrix_convex_margin(f, cfg.interval, _dim_for_trial(cfg.dims, i),
                                    cfg.seed, counter=i)

    margins = np.asarray(parallel_trials(trial, cfg.trials, cfg.workers), dtype=float)
    return {
        "margins": _summary(margins),
        "violations": int(np.sum(margins < -cfg.tol)),
        "witness": None,
        "all_margins": margins,
        "wall_time_s": time.perf_counter() - start,
    }


# -- report emission -----------------------------------------------------------


def make_report(command: str, config: dict, results: dict) -> dict:
    results = dict(results)
    results.pop("all_margins", None)
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "tool_version": __version__,
        "command": command,
        "config": config,
        "results": results,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime()),
    }


def write_json_report(report: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")


def margins_to_csv(margins, path) -> None:
    arr = np.asarray(margins)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if arr.ndim == 1:
            writer.writerow(["trial", "margin"])
            for i, v in enumerate(arr):
                writer.writerow([i, repr(float(v))])
        else:
            writer.writerow(["trial"] + [f"margin_{j}" for j in range(arr.shape[1])])
            for i, row in enumerate(arr):
                writer.writerow([i] + [repr(float(v)) for v in row])
