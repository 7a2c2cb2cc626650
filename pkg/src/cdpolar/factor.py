"""Factored polar form ``o = q e^{e4 phi4} e^{e5 phi5} e^{e6 phi6} e^{e7 phi7}``.

``q`` is a quaternion embedded in the first four octonion slots and the
product is evaluated left to right. For fixed angles the map is linear in
``q``; each right factor acts as a set of planar rotations on coefficient
pairs (the "stages" ``c = q f4``, ``b = c f5``, ``a = b f6``, ``o = a f7``).

The 8x8 system ``forward_compose(y, phi) = target`` has no closed-form
inverse here and is solved with a multi-start Levenberg-Marquardt iteration.
Solutions are not unique.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .algebra import CdElement, mul_arrays, structure_tensor

FACTOR_UNITS = (4, 5, 6, 7)


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-10
    max_iter: int = 200
    n_starts: int = 20
    rng_seed: int = 0
    lm_lambda0: float = 1e-3
    lm_lambda_max: float = 1e10
    jacobian: str = "analytic"
    fd_step: float = 1e-7

    def __post_init__(self) -> None:
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.n_starts < 1:
            raise ValueError("n_starts must be at least 1")
        if self.max_iter < 0:
            raise ValueError("max_iter must be non-negative")
        if self.jacobian not in ("analytic", "fd"):
            raise ValueError(f"unknown jacobian mode {self.jacobian!r}")


@dataclass(frozen=True)
class FactorSolution:
    y0: float
    y1: float
    y2: float
    y3: float
    phi4: float
    phi5: float
    phi6: float
    phi7: float
    residual_norm: float = 0.0
    iterations: int = 0
    start_index: int = 0
    converged: bool = True

    @classmethod
    def from_params(cls, params: Sequence[float], **kw) -> FactorSolution:
        return cls(*(float(v) for v in params), **kw)

    @property
    def y(self) -> np.ndarray:
        return np.array([self.y0, self.y1, self.y2, self.y3])

    @property
    def phi(self) -> np.ndarray:
        return np.array([self.phi4, self.phi5, self.phi6, self.phi7])

    @property
    def params(self) -> np.ndarray:
        return np.concatenate([self.y, self.phi])


@dataclass(frozen=True)
class StageValues:
    a: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)
    c: np.ndarray = field(repr=False)


def wrap_angle(angle):
    """Reduce angles into [-pi, pi)."""
    out = np.mod(np.asarray(angle, dtype=float) + math.pi, 2.0 * math.pi) - math.pi
    out = np.where(out >= math.pi, -math.pi, out)
    return float(out) if out.ndim == 0 else out


def _factor(k: int, angle: float, derivative: bool = False) -> np.ndarray:
    f = np.zeros(8)
    if derivative:
        f[0], f[k] = -math.sin(angle), math.cos(angle)
    else:
        f[0], f[k] = math.cos(angle), math.sin(angle)
    return f


def _embed(y: Sequence[float]) -> np.ndarray:
    q = np.zeros(8)
    q[:4] = y
    return q


def forward_arrays(y: Sequence[float], phi: Sequence[float]) -> np.ndarray:
    acc = _embed(y)
    for k, angle in zip(FACTOR_UNITS, phi):
        acc = mul_arrays(acc, _factor(k, angle))
    return acc


def forward_compose(y: Sequence[float], phi: Sequence[float]) -> CdElement:
    """``(((q f4) f5) f6) f7`` with ``f_k = exp(phi_k e_k)``."""
    if len(y) != 4 or len(phi) != 4:
        raise ValueError("expected 4 quaternion coefficients and 4 angles")
    return CdElement(forward_arrays(y, phi))


def _value_and_jacobian(params: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Row 0 is the value, rows 1-4 the y-columns (linearity in y),
    # rows 5-8 the phi-columns (one factor swapped for its derivative).
    y, phi = params[:4], params[4:]
    acc = np.zeros((9, 8))
    acc[0, :4] = y
    acc[1:5, :4] = np.eye(4)
    acc[5:, :4] = y
    for j, (k, angle) in enumerate(zip(FACTOR_UNITS, phi)):
        f = np.broadcast_to(_factor(k, angle), (9, 8)).copy()
        f[5 + j] = _factor(k, angle, derivative=True)
        acc = mul_arrays(acc, f)
    return acc[0], acc[1:].T


def jacobian_analytic(params: Sequence[float]) -> np.ndarray:
    return _value_and_jacobian(np.asarray(params, dtype=float))[1]


def jacobian_fd(params: Sequence[float], step: float = 1e-7) -> np.ndarray:
    """Forward finite-difference Jacobian of the composed coefficients."""
    p = np.asarray(params, dtype=float)
    base = forward_arrays(p[:4], p[4:])
    jac = np.empty((8, 8))
    for i in range(8):
        q = p.copy()
        q[i] += step
        jac[:, i] = (forward_arrays(q[:4], q[4:]) - base) / step
    return jac


def residual(s: FactorSolution, target: CdElement) -> np.ndarray:
    return forward_arrays(s.y, s.phi) - np.asarray(target.coeffs)


def stage_values(s: FactorSolution) -> StageValues:
    c = mul_arrays(_embed(s.y), _factor(4, s.phi4))
    b = mul_arrays(c, _factor(5, s.phi5))
    a = mul_arrays(b, _factor(6, s.phi6))
    return StageValues(a=a, b=b, c=c)


@lru_cache(maxsize=None)
def stage_pairs(k: int) -> tuple[tuple[int, int], ...]:
    """Coefficient pairs rotated by right multiplication with ``exp(phi e_k)``.

    Returns ``(m, n)`` such that ``out_m + i out_n = (in_m + i in_n) e^{i phi}``
    for every input vector, derived from the multiplication table.
    """
    table = structure_tensor(8)
    sign = {}
    partner = {}
    for i in range(8):
        m = int(np.flatnonzero(table[i, k])[0])
        # in_i e_k = sign * e_m, so out_m gains sign * sin(phi) * in_i
        partner[m] = i
        sign[m] = int(table[i, k, m])
    pairs = []
    for m in range(8):
        n = partner[m]
        if sign[m] < 0 and sign[n] > 0:
            pairs.append((m, n))
    return tuple(pairs)


def verify_stage_rotations(s: FactorSolution, target: CdElement) -> float:
    """Largest deviation from the planar-rotation pair identities across all stages.

    The last stage compares the target itself against the rotated ``a`` stage,
    so this is zero exactly when the solution reproduces the target.
    """
    st = stage_values(s)
    chain = [_embed(s.y), st.c, st.b, st.a, np.asarray(target.coeffs, dtype=float)]
    worst = 0.0
    for j, (k, angle) in enumerate(zip(FACTOR_UNITS, s.phi)):
        rot = complex(math.cos(angle), math.sin(angle))
        prev, nxt = chain[j], chain[j + 1]
        for m, n in stage_pairs(k):
            lhs = complex(nxt[m], nxt[n])
            rhs = complex(prev[m], prev[n]) * rot
            worst = max(worst, abs(lhs - rhs))
    return worst


def _start_points(cfg: SolverConfig, initial: np.ndarray | None) -> Iterator[np.ndarray]:
    if initial is not None:
        yield np.asarray(initial, dtype=float)
    yield np.array([1.0, 0, 0, 0, 0, 0, 0, 0])
    rng = np.random.default_rng(cfg.rng_seed)
    while True:
        y = rng.standard_normal(4)
        y /= np.linalg.norm(y)
        phi = rng.uniform(-math.pi, math.pi, 4)
        yield np.concatenate([y, phi])


def _levenberg_marquardt(
    target: np.ndarray, p0: np.ndarray, cfg: SolverConfig
) -> tuple[np.ndarray, float, int]:
    """Damped Newton with a Levenberg-Marquardt fallback.

    Each iteration first tries the undamped minimum-norm Newton step and keeps
    it if it cuts the squared residual by 10%. Otherwise a Marquardt-scaled LM step
    is taken, with the damping updated from the gain ratio (Nielsen's rule).
    """

    def evaluate(p):
        if cfg.jacobian == "analytic":
            value, jac = _value_and_jacobian(p)
        else:
            value, jac = forward_arrays(p[:4], p[4:]), jacobian_fd(p, cfg.fd_step)
        r = value - target
        return r, jac, float(r @ r)

    p = p0.copy()
    r, jac, cost = evaluate(p)
    jtj = jac.T @ jac
    mu = cfg.lm_lambda0 * float(np.max(np.diag(jtj)))
    nu = 2.0
    it = 0
    while it < cfg.max_iter and math.sqrt(cost) > cfg.tol:
        it += 1
        newton = np.linalg.lstsq(jac, -r, rcond=1e-12)[0]
        trial = p + newton
        tr = forward_arrays(trial[:4], trial[4:]) - target
        if float(tr @ tr) < 0.9 * cost:
            p = trial
            r, jac, cost = evaluate(p)
            jtj = jac.T @ jac
            mu /= 3.0
            continue
        g = jac.T @ r
        step = np.linalg.solve(jtj + mu * np.diag(np.diag(jtj) + 1e-15), -g)
        trial = p + step
        tr = forward_arrays(trial[:4], trial[4:]) - target
        tcost = float(tr @ tr)
        predicted = -float(step @ g) - 0.5 * float(step @ jtj @ step)
        rho = 0.5 * (cost - tcost) / predicted if predicted > 0 else -1.0
        if rho > 0:
            p = trial
            r, jac, cost = evaluate(p)
            jtj = jac.T @ jac
            mu *= max(1.0 / 3.0, 1.0 - (2.0 * rho - 1.0) ** 3)
            nu = 2.0
        else:
            mu *= nu
            nu *= 2.0
            if mu > cfg.lm_lambda_max:
                break
    return p, math.sqrt(cost), it


def _check_target(target: CdElement) -> np.ndarray:
    if target.dim != 8:
        raise ValueError(f"expected an octonion target, got dimension {target.dim}")
    t = np.asarray(target.coeffs, dtype=float)
    if abs(float(np.linalg.norm(t)) - 1.0) > 1e-9:
        raise ValueError("target must be a unit octonion (normalize and carry the modulus)")
    return t


def _finish(p: np.ndarray, target: np.ndarray, it: int, idx: int, tol: float) -> FactorSolution:
    p = p.copy()
    p[4:] = wrap_angle(p[4:])
    r = forward_arrays(p[:4], p[4:]) - target
    res = float(np.linalg.norm(r))
    return FactorSolution.from_params(
        p, residual_norm=res, iterations=it, start_index=idx, converged=res <= tol
    )


def solve(
    target: CdElement,
    cfg: SolverConfig = SolverConfig(),
    initial: Sequence[float] | FactorSolution | None = None,
) -> FactorSolution:
    """Find ``(y, phi)`` with ``forward_compose(y, phi) = target``.

    Starts are tried in order: ``initial`` if given (a warm start), then
    ``y = 1, phi = 0``, then seeded random starts, ``cfg.n_starts`` in total
    excluding the warm start. The first converged solution is returned; if
    none converge, the best attempt is returned with ``converged=False``.
    """
    t = _check_target(target)
    if isinstance(initial, FactorSolution):
        initial = initial.params
    init = None if initial is None else np.asarray(initial, dtype=float)
    total = cfg.n_starts + (init is not None)
    best: FactorSolution | None = None
    for idx, p0 in zip(range(total), _start_points(cfg, init)):
        p, _, it = _levenberg_marquardt(t, p0, cfg)
        sol = _finish(p, t, it, idx, cfg.tol)
        if sol.converged:
            return sol
        if best is None or sol.residual_norm < best.residual_norm:
            best = sol
    assert best is not None
    return replace(best, converged=False)


def find_solutions(target: CdElement, cfg: SolverConfig = SolverConfig()) -> list[FactorSolution]:
    """Run every start and keep all converged solutions."""
    t = _check_target(target)
    out = []
    for idx, p0 in zip(range(cfg.n_starts), _start_points(cfg, None)):
        p, _, it = _levenberg_marquardt(t, p0, cfg)
        sol = _finish(p, t, it, idx, cfg.tol)
        if sol.converged:
            out.append(sol)
    return out


def reduce_sign_symmetry(s: FactorSolution) -> np.ndarray:
    """Parameters with each angle shifted into [-pi/2, pi/2).

    ``phi_k -> phi_k + pi`` negates the product and is undone by ``y -> -y``;
    solutions related only by such shifts reduce to the same vector.
    """
    y, phi = s.y, s.phi
    shifts = np.floor((phi + 0.5 * math.pi) / math.pi)
    phi = phi - shifts * math.pi
    if int(np.sum(shifts)) % 2:
        y = -y
    return np.concatenate([y, phi])


def angle_distance(s1: FactorSolution, s2: FactorSolution) -> float:
    """Sup-norm distance between angle vectors, measured around the circle."""
    d = wrap_angle(s1.phi - s2.phi)
    return float(np.max(np.abs(d)))
