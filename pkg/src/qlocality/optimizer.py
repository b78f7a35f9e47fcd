"""Search over measurement settings and Werner-family thresholds.

Each site's orthonormal pair is the first two columns of the rotation
Rz(alpha) Ry(beta) Rz(gamma), with a discrete handedness bit that flips
the second vector. Nelder-Mead runs on the six angles; restarts cycle
through the four handedness combinations.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from .correlations import DEFAULT_TOL, XYPoint, xy_quantities
from .qubit_algebra import (
    SettingPair,
    ValidationError,
    check_density_matrix,
    correlation_tensor,
    is_separable_ppt,
    make_werner,
)

HANDEDNESS = ((False, False), (False, True), (True, False), (True, True))
N_PROBES = 9


class Objective(str, enum.Enum):
    SUM_OF_SQUARES = "sum_of_squares"
    MAX_ABS_PM = "max_abs_pm"
    ABS_X = "abs_x"

    def of(self, xy: XYPoint) -> float:
        if self is Objective.SUM_OF_SQUARES:
            return xy.sum_of_squares
        if self is Objective.MAX_ABS_PM:
            return xy.max_abs_pm
        return abs(xy.x_val)


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 64
    max_iters: int = 4000
    xatol: float = 1e-8
    fatol: float = 1e-14
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValidationError("restarts must be positive")
        if self.max_iters < 1:
            raise ValidationError("max_iters must be positive")
        if self.xatol <= 0 or self.fatol <= 0:
            raise ValidationError("step tolerances must be positive")


@dataclass(frozen=True)
class FrameParams:
    """Angles and handedness for both sites."""

    angles: tuple  # (alpha_a, beta_a, gamma_a, alpha_b, beta_b, gamma_b)
    flip_a: bool = False
    flip_b: bool = False

    def decode(self) -> tuple[SettingPair, SettingPair]:
        a, ap = _frame(*self.angles[:3], self.flip_a)
        b, bp = _frame(*self.angles[3:], self.flip_b)
        return SettingPair(np.array(a), np.array(ap)), SettingPair(np.array(b), np.array(bp))


def _frame(alpha, beta, gamma, flip):
    ca, sa = math.cos(alpha), math.sin(alpha)
    cb, sb = math.cos(beta), math.sin(beta)
    cg, sg = math.cos(gamma), math.sin(gamma)
    main = (ca * cb * cg - sa * sg, sa * cb * cg + ca * sg, -sb * cg)
    perp = (-ca * cb * sg - sa * cg, -sa * cb * sg + ca * cg, sb * sg)
    if flip:
        perp = (-perp[0], -perp[1], -perp[2])
    return main, perp


def _xy_fast(T, params, flip_a, flip_b):
    a, ap = _frame(params[0], params[1], params[2], flip_a)
    b, bp = _frame(params[3], params[4], params[5], flip_b)

    def e(u, v):
        return (u[0] * (T[0][0] * v[0] + T[0][1] * v[1] + T[0][2] * v[2])
                + u[1] * (T[1][0] * v[0] + T[1][1] * v[1] + T[1][2] * v[2])
                + u[2] * (T[2][0] * v[0] + T[2][1] * v[1] + T[2][2] * v[2]))

    return XYPoint(e(a, bp) + e(ap, b), e(a, b) - e(ap, bp))


@dataclass(frozen=True)
class OptimizeResult:
    objective: Objective
    best_value: float
    settings: tuple  # (SettingPair for A, SettingPair for B)
    params: FrameParams
    evaluations: int
    converged: bool

    def to_dict(self) -> dict:
        pa, pb = self.settings
        return {
            "objective": self.objective.value,
            "best_value": self.best_value,
            "settings": {
                "a": pa.main.tolist(),
                "a_perp": pa.perp.tolist(),
                "b": pb.main.tolist(),
                "b_perp": pb.perp.tolist(),
            },
            "evaluations": self.evaluations,
            "converged": self.converged,
        }


def _restart_rng(seed: int, k: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(k,))))


def maximize(rho, obj: Objective | str, config: OptimizerConfig | None = None) -> OptimizeResult:
    """Multi-start Nelder-Mead maximization of ``obj`` over orthogonal setting pairs.

    Restart ``k`` draws its starting angles from its own seeded stream and
    uses handedness combination ``k % 4``, so adding restarts can only
    raise the returned value.
    """
    config = config or OptimizerConfig()
    obj = Objective(obj)
    rho = check_density_matrix(rho, dim=4)
    T = correlation_tensor(rho).tolist()
    evaluations = 0
    best = None
    for k in range(config.restarts):
        flip_a, flip_b = HANDEDNESS[k % 4]
        x0 = _restart_rng(config.seed, k).uniform(0.0, 2 * math.pi, size=6)

        def neg(p, flip_a=flip_a, flip_b=flip_b):
            return -obj.of(_xy_fast(T, p, flip_a, flip_b))

        opts = {"xatol": config.xatol, "fatol": config.fatol, "maxiter": config.max_iters}
        res = minimize(neg, x0, method="Nelder-Mead", options=opts)
        # one fresh simplex from the first optimum guards against early collapse
        res2 = minimize(neg, res.x, method="Nelder-Mead", options=opts)
        evaluations += res.nfev + res2.nfev
        if res2.fun > res.fun:
            res2 = res
        if best is None or -res2.fun > best[0]:
            best = (-res2.fun, res2.x, flip_a, flip_b, bool(res.success and res2.success))
    _, x, flip_a, flip_b, converged = best
    params = FrameParams(tuple(float(v) for v in x), flip_a, flip_b)
    pa, pb = params.decode()
    value = obj.of(xy_quantities(rho, pa, pb))
    return OptimizeResult(obj, value, (pa, pb), params, evaluations, converged)


def werner_max_curve(x_grid, obj: Objective | str, config: OptimizerConfig | None = None):
    """Maximized objective for Werner states on ``x_grid``."""
    out = []
    for x in x_grid:
        x = float(x)
        if not 0.0 <= x <= 1.0:
            raise ValidationError(f"Werner parameter {x!r} outside [0, 1]")
        out.append((x, maximize(make_werner(x), obj, config).best_value))
    return out


class NonMonotonicError(ValueError):
    """The predicate does not switch once from false to true on the probe grid."""


def find_threshold(family: Callable[[float], np.ndarray], predicate: Callable[[np.ndarray], bool],
                   lo: float, hi: float, tol: float) -> float:
    """Bisection estimate of where ``predicate(family(x))`` turns true.

    The predicate is first probed at nine equally spaced points of
    [lo, hi]; it must be false at ``lo``, true at ``hi`` and switch
    exactly once in between.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not lo < hi:
        raise ValueError("need lo < hi")
    probes = np.linspace(lo, hi, N_PROBES)
    flags = [bool(predicate(family(float(x)))) for x in probes]
    if flags[0] or not flags[-1]:
        raise NonMonotonicError(f"predicate must be false at lo and true at hi, got {flags[0]}, {flags[-1]}")
    first = flags.index(True)
    if not all(flags[first:]):
        raise NonMonotonicError(f"predicate switches more than once on probes: {flags}")
    a, b = float(probes[first - 1]), float(probes[first])
    while b - a > tol:
        mid = 0.5 * (a + b)
        if predicate(family(mid)):
            b = mid
        else:
            a = mid
    return 0.5 * (a + b)


# --- predicates on states --------------------------------------------------

def is_entangled(rho) -> bool:
    return not is_separable_ppt(rho)


def violates(obj: Objective | str, bound: float, config: OptimizerConfig | None = None,
             tol: float = DEFAULT_TOL) -> Callable[[np.ndarray], bool]:
    """Predicate: the maximized objective exceeds ``bound + tol``."""
    obj = Objective(obj)

    def pred(rho) -> bool:
        return maximize(rho, obj, config).best_value > bound + tol

    return pred


def werner_report(x: float, config: OptimizerConfig | None = None, tol: float = DEFAULT_TOL) -> dict:
    """Which inequalities the Werner state with parameter ``x`` can violate."""
    rho = make_werner(x)
    sos = maximize(rho, Objective.SUM_OF_SQUARES, config).best_value
    pm = maximize(rho, Objective.MAX_ABS_PM, config).best_value
    ax = maximize(rho, Objective.ABS_X, config).best_value
    viol = {
        "qm": sos > 4.0 + tol,
        "rt": ax > 2.0 + tol,
        "lt": pm > 2.0 + tol,
        "lqt": sos > 1.0 + tol,
    }
    entangled = is_entangled(rho)
    return {
        "x": float(x),
        "ppt": not entangled,
        "entangled": entangled,
        "max_sum_of_squares": sos,
        "max_abs_pm": pm,
        "max_abs_x": ax,
        "violates": viol,
        "hidden_qunonlocality": viol["lqt"] and not viol["lt"],
        "undetected_entanglement": entangled and not any(viol.values()),
    }
