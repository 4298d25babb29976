"""Phase-transition and adversarial sweeps.

Every trial runs generate -> witness -> verify -> solve -> compare, and each
grid cell aggregates its trials into one :class:`SweepRow`. Trial ``t`` of every
cell uses seed ``base_seed + t``. Rows come back in grid order whatever the
worker count.
"""

from __future__ import annotations

import csv
import io
import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .certificate import CertificateInfeasible, adversarial_gamma, certify_instance, random_gamma
from .generators import (AdversaryParams, RandomModelParams, gen_biclique_adversarial,
                         gen_biclique_random, gen_clique_adversarial, gen_clique_random)
from .solver import SolverConfig, solve_biclique_relaxation, solve_clique_relaxation

log = logging.getLogger(__name__)

CSV_COLUMNS = ["problem", "N", "M", "n", "m", "p", "r", "alpha", "beta", "c", "trials",
               "recovered_fraction", "cert_strict_fraction", "mean_W_spectral",
               "mean_iterations", "mean_runtime_ms"]

# sweeps only need the rounded support, so they run looser than a single solve
SWEEP_SOLVER = SolverConfig(max_iterations=1000, primal_tolerance=1e-4, dual_tolerance=1e-4)


@dataclass(frozen=True)
class SweepConfig:
    problem: str = "clique"          # clique | biclique
    mode: str = "random"             # random | adversarial
    N: tuple = (100,)
    n: Optional[tuple] = None        # explicit planted sizes ...
    c: Optional[tuple] = None        # ... or multipliers, n = ceil(c sqrt(N))
    p: tuple = (0.5,)
    y: float = 1.0                   # biclique: M = ceil(y N)
    z: float = 1.0                   # biclique: m = ceil(z n)
    r: tuple = (0,)
    alpha: tuple = (0.5,)
    beta: tuple = (0.5,)
    trials_per_cell: int = 10
    base_seed: int = 0
    solver: SolverConfig = SWEEP_SOLVER
    workers: int = 1

    def __post_init__(self):
        if self.problem not in ("clique", "biclique"):
            raise ValueError(f"unknown problem {self.problem!r}")
        if self.mode not in ("random", "adversarial"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.trials_per_cell < 1:
            raise ValueError("trials_per_cell must be >= 1")
        if not self.N:
            raise ValueError("grid needs at least one N")
        if (self.n is None) == (self.c is None):
            raise ValueError("give exactly one of n or c")
        if not (self.n or self.c):
            raise ValueError("grid needs at least one planted size")

    def cells(self) -> list[dict]:
        sizes = [("n", v) for v in self.n] if self.n is not None else [("c", v) for v in self.c]
        if self.mode == "random":
            noise = [{"p": p} for p in self.p]
        else:
            noise = [{"r": r, "alpha": a, "beta": b}
                     for r, a, b in itertools.product(self.r, self.alpha, self.beta)]
        out = []
        for N, (kind, s), extra in itertools.product(self.N, sizes, noise):
            n = int(s) if kind == "n" else math.ceil(s * math.sqrt(N))
            cell = {"problem": self.problem, "N": int(N), "n": n,
                    "c": float(s) if kind == "c" else n / math.sqrt(N)}
            if self.problem == "biclique":
                cell["M"] = math.ceil(self.y * N)
                cell["m"] = math.ceil(self.z * n)
            cell.update(extra)
            out.append(cell)
        return out


@dataclass
class TrialOutcome:
    recovered: bool
    cert_strict: bool
    W_spectral: float
    iterations: int
    runtime_ms: float
    error: Optional[str] = None


@dataclass
class SweepRow:
    cell: dict
    trials: int
    recovered_fraction: float
    cert_strict_fraction: float
    mean_W_spectral: float
    mean_iterations: float
    mean_runtime_ms: float
    outcomes: list = field(default_factory=list, repr=False)

    def as_record(self) -> dict:
        c = self.cell
        return {
            "problem": c["problem"], "N": c["N"], "M": c.get("M", ""), "n": c["n"],
            "m": c.get("m", ""), "p": c.get("p", ""), "r": c.get("r", ""),
            "alpha": c.get("alpha", ""), "beta": c.get("beta", ""), "c": c["c"],
            "trials": self.trials, "recovered_fraction": self.recovered_fraction,
            "cert_strict_fraction": self.cert_strict_fraction,
            "mean_W_spectral": self.mean_W_spectral,
            "mean_iterations": self.mean_iterations,
            "mean_runtime_ms": self.mean_runtime_ms,
        }


def build_instance(cell: dict, mode: str, seed: int):
    if mode == "random":
        if cell["problem"] == "clique":
            return gen_clique_random(RandomModelParams(p=cell["p"], N=cell["N"], n=cell["n"], seed=seed))
        return gen_biclique_random(RandomModelParams(p=cell["p"], N=cell["N"], n=cell["n"],
                                                     M=cell["M"], m=cell["m"], seed=seed))
    adv = AdversaryParams(r=cell["r"], alpha=cell["alpha"], beta=cell["beta"], seed=seed)
    if cell["problem"] == "clique":
        return gen_clique_adversarial(cell["n"], cell["N"], adv)
    return gen_biclique_adversarial(cell["m"], cell["n"], cell["M"], cell["N"], adv)


def _same_support(candidate, instance) -> bool:
    if candidate is None:
        return False
    if instance.is_biclique:
        left, right = candidate
        return (left.members == instance.planted_left.members
                and right.members == instance.planted_right.members)
    return candidate.members == instance.planted_left.members


def run_trial(cell: dict, mode: str, seed: int, solver: SolverConfig) -> TrialOutcome:
    try:
        inst = build_instance(cell, mode, seed)
    except ValueError as exc:
        return TrialOutcome(False, False, math.nan, 0, 0.0, f"generate: {exc}")
    gamma = random_gamma(cell["p"]) if mode == "random" else adversarial_gamma()
    try:
        _, report = certify_instance(inst, gamma=gamma, strict=True)
        strict, wnorm = report.overall, report.W_spectral
    except CertificateInfeasible:
        strict, wnorm = False, math.nan
    solve = solve_biclique_relaxation if inst.is_biclique else solve_clique_relaxation
    try:
        res = solve(inst.graph, solver)
    except ValueError as exc:
        return TrialOutcome(False, strict, wnorm, 0, 0.0, f"solve: {exc}")
    return TrialOutcome(_same_support(res.candidate, inst), strict, wnorm,
                        res.iterations, res.runtime_ms)


def _run_trial_args(args):
    return run_trial(*args)


def _aggregate(cell: dict, outcomes: Sequence[TrialOutcome]) -> SweepRow:
    k = len(outcomes)
    w = [o.W_spectral for o in outcomes if math.isfinite(o.W_spectral)]
    return SweepRow(
        cell=cell, trials=k,
        recovered_fraction=sum(o.recovered for o in outcomes) / k,
        cert_strict_fraction=sum(o.cert_strict for o in outcomes) / k,
        mean_W_spectral=float(np.mean(w)) if w else math.nan,
        mean_iterations=float(np.mean([o.iterations for o in outcomes])),
        mean_runtime_ms=float(np.mean([o.runtime_ms for o in outcomes])),
        outcomes=list(outcomes),
    )


def run_sweep(cfg: SweepConfig) -> list[SweepRow]:
    cells = cfg.cells()
    jobs = [(cell, cfg.mode, cfg.base_seed + t, cfg.solver)
            for cell in cells for t in range(cfg.trials_per_cell)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = list(pool.map(_run_trial_args, jobs))
    else:
        outcomes = [_run_trial_args(j) for j in jobs]
    rows = []
    k = cfg.trials_per_cell
    for i, cell in enumerate(cells):
        chunk = outcomes[i * k:(i + 1) * k]
        for o in chunk:
            if o.error:
                log.warning("cell %s: %s", cell, o.error)
        rows.append(_aggregate(cell, chunk))
    return rows


def rows_to_csv(rows: Sequence[SweepRow], timing: bool = True) -> str:
    """Render rows with the fixed column order. ``timing=False`` writes 0 for
    the runtime column so that identical configs give byte-identical output."""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        rec = row.as_record()
        if not timing:
            rec["mean_runtime_ms"] = 0
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in rec.items()})
    return buf.getvalue()


@dataclass
class AlphaEstimate:
    c: Optional[float]
    threshold: float
    trials_per_cell: int
    rows: list

    @property
    def attained(self) -> bool:
        return self.c is not None

    def to_dict(self) -> dict:
        return {
            "alpha": self.c,
            "attained": self.attained,
            "message": None if self.attained else "not attained on grid",
            "threshold": self.threshold,
            "trials_per_cell": self.trials_per_cell,
            "cells": [r.as_record() for r in self.rows],
        }


def estimate_alpha(cfg: SweepConfig, threshold: float = 0.95,
                   rows: Optional[list] = None) -> AlphaEstimate:
    """Smallest grid multiplier ``c = n/sqrt(N)`` whose cells all reach
    ``threshold`` recovery, across every N (and p) in the grid."""
    if cfg.mode != "random" or cfg.c is None:
        raise ValueError("estimate_alpha needs a random-mode sweep over c")
    if rows is None:
        rows = run_sweep(cfg)
    best = None
    for c in sorted(cfg.c):
        at_c = [r for r in rows if r.cell["c"] == float(c)]
        if at_c and all(r.recovered_fraction >= threshold for r in at_c):
            best = float(c)
            break
    return AlphaEstimate(best, threshold, cfg.trials_per_cell, rows)


# ---------------------------------------------------------------------------
# flat key=value config files

_LIST_KEYS = {"N", "n", "c", "p", "r", "alpha", "beta"}


def parse_config(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


def config_from_mapping(kv: dict, **overrides) -> SweepConfig:
    """Build a :class:`SweepConfig` from string values (lists comma separated)."""
    kv = {**kv, **{k: v for k, v in overrides.items() if v is not None}}
    solver_keys = {"max_iterations": int, "primal_tolerance": float, "dual_tolerance": float,
                   "step_parameter": float, "rounding_threshold": float}
    fields_ = {}
    solver = {}
    for key, value in kv.items():
        if key in solver_keys:
            solver[key] = solver_keys[key](value)
        elif key == "tolerance":
            solver["primal_tolerance"] = solver["dual_tolerance"] = float(value)
        elif key in _LIST_KEYS:
            items = [s for s in str(value).split(",") if s.strip()]
            conv = int if key in ("N", "n", "r") else float
            fields_[key] = tuple(conv(s) for s in items)
        elif key in ("y", "z"):
            fields_[key] = float(value)
        elif key in ("trials", "trials_per_cell"):
            fields_["trials_per_cell"] = int(value)
        elif key in ("seed", "base_seed"):
            fields_["base_seed"] = int(value)
        elif key == "workers":
            fields_["workers"] = int(value)
        elif key in ("problem", "mode"):
            fields_[key] = str(value)
        else:
            raise ValueError(f"unknown config key {key!r}")
    cfg = SweepConfig(**fields_)
    if solver:
        cfg = replace(cfg, solver=replace(cfg.solver, **solver))
    return cfg
