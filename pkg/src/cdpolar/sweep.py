"""Single-parameter sweeps over hyperspherical angles, written as CSV.

Two experiments share one driver:

* ``hs-recon``: target coordinates against their seven-angle reconstruction.
* ``factor-sweep``: the solved factored form along the sweep, each point
  warm-started from its predecessor so the angles follow one branch.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .algebra import CdElement
from .factor import FactorSolution, SolverConfig, solve
from .hahn_snopek import DegenerateComponents, hs_angles, hs_components, hs_reconstruct
from .sphere import ANGLE_RANGES, cascade

EXPERIMENTS = ("hs-recon", "factor-sweep")


@dataclass(frozen=True)
class SweepSpec:
    experiment: str
    vary: int
    grid_points: int = 181
    seed: int = 0
    output_path: str | None = None
    parallel: bool = False

    def __post_init__(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if not 1 <= self.vary <= 7:
            raise ValueError("vary must be in 1..7")
        if self.grid_points < 2:
            raise ValueError("grid_points must be at least 2")


@dataclass(frozen=True)
class SweepRecord:
    swept_value: float
    target: tuple[float, ...]
    reconstructed: tuple[float, ...] | None = None
    hs_error: float | None = None
    solution: FactorSolution | None = None

    @property
    def converged(self) -> bool:
        return self.solution is not None and self.solution.converged


def frozen_angles(seed: int) -> np.ndarray:
    """The seven background angles, drawn once from their ranges."""
    rng = np.random.default_rng(seed)
    return np.array([rng.uniform(lo, hi) for lo, hi in ANGLE_RANGES])


def sweep_grid(vary: int, n: int) -> np.ndarray:
    lo, hi = ANGLE_RANGES[vary - 1]
    return np.linspace(lo, hi, n, endpoint=False)


def _targets(spec: SweepSpec, frozen: Sequence[float] | None) -> tuple[np.ndarray, np.ndarray]:
    base = frozen_angles(spec.seed) if frozen is None else np.asarray(frozen, dtype=float)
    grid = sweep_grid(spec.vary, spec.grid_points)
    out = np.empty((grid.size, 8))
    for i, value in enumerate(grid):
        angles = base.copy()
        angles[spec.vary - 1] = value
        out[i] = cascade(angles)
    return grid, out


def _hs_point(args: tuple[float, np.ndarray]) -> SweepRecord:
    value, x = args
    o = CdElement(x)
    try:
        rec = hs_reconstruct(float(np.linalg.norm(x)), hs_angles(hs_components(o))).coeffs
    except DegenerateComponents:
        return SweepRecord(value, tuple(x.tolist()))
    err = float(np.linalg.norm(rec - x))
    return SweepRecord(value, tuple(x.tolist()), tuple(rec.tolist()), err)


def _factor_point(args: tuple[float, np.ndarray, SolverConfig]) -> SweepRecord:
    value, x, cfg = args
    return SweepRecord(value, tuple(x.tolist()), solution=solve(CdElement(x), cfg))


def run_sweep(
    spec: SweepSpec,
    frozen: Sequence[float] | None = None,
    solver: SolverConfig | None = None,
) -> list[SweepRecord]:
    """Run the sweep, write the CSV if ``spec.output_path`` is set, return the records.

    ``frozen`` overrides the seeded background angles (all seven are given;
    the swept one is ignored).
    """
    grid, targets = _targets(spec, frozen)
    cfg = solver or SolverConfig(rng_seed=spec.seed)
    if spec.experiment == "hs-recon":
        jobs = list(zip(grid.tolist(), targets))
        records = _map(_hs_point, jobs, spec.parallel)
    elif spec.parallel:
        jobs = [(v, x, cfg) for v, x in zip(grid.tolist(), targets)]
        records = _map(_factor_point, jobs, True)
    else:
        records = []
        warm: FactorSolution | None = None
        for value, x in zip(grid.tolist(), targets):
            sol = solve(CdElement(x), cfg, initial=warm)
            if sol.converged:
                warm = sol
            records.append(SweepRecord(value, tuple(x.tolist()), solution=sol))
    if spec.output_path is not None:
        write_csv(spec, records, spec.output_path)
    return records


def _map(fn, jobs, parallel: bool):
    if not parallel:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor() as pool:
        return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // 32)))


def _fmt(v: float | None) -> str:
    if v is None:
        return "nan"
    return repr(float(v))


def columns(spec: SweepSpec) -> list[str]:
    head = [f"psi{spec.vary}"] + [f"x{k}" for k in range(8)]
    if spec.experiment == "hs-recon":
        return head + [f"r{k}" for k in range(8)] + ["hs_error"]
    return head + [
        "y0", "y1", "y2", "y3", "phi4", "phi5", "phi6", "phi7",
        "residual_norm", "converged", "start_index", "iterations",
    ]  # fmt: skip


def record_row(spec: SweepSpec, rec: SweepRecord) -> list[str]:
    row = [_fmt(rec.swept_value)] + [_fmt(v) for v in rec.target]
    if spec.experiment == "hs-recon":
        recon = rec.reconstructed or (None,) * 8
        return row + [_fmt(v) for v in recon] + [_fmt(rec.hs_error)]
    s = rec.solution
    assert s is not None
    return row + [_fmt(v) for v in s.params] + [
        _fmt(s.residual_norm),
        "1" if s.converged else "0",
        str(s.start_index),
        str(s.iterations),
    ]


def header_comment(spec: SweepSpec) -> str:
    return (
        f"# cdpolar v{__version__} experiment={spec.experiment} "
        f"vary={spec.vary} seed={spec.seed}"
    )


def write_csv(spec: SweepSpec, records: Sequence[SweepRecord], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(header_comment(spec) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns(spec))
        for rec in records:
            writer.writerow(record_row(spec, rec))


def branch_jumps(records: Sequence[SweepRecord]) -> list[float]:
    """Sup-norm step between consecutive converged solutions (angles taken mod 2 pi)."""
    steps = []
    for prev, cur in zip(records, records[1:]):
        if not (prev.converged and cur.converged):
            continue
        d = cur.solution.params - prev.solution.params
        d[4:] = np.mod(d[4:] + math.pi, 2.0 * math.pi) - math.pi
        steps.append(float(np.max(np.abs(d))))
    return steps
