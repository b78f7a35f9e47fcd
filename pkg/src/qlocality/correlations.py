"""Quantum correlation functions and the X/Y inequality hierarchy.

For two orthogonal settings per site,

    X = E(a, b_perp) + E(a_perp, b)
    Y = E(a, b) - E(a_perp, b_perp)

and the bounds compared are

    qm   X^2 + Y^2 <= 4          (any two-qubit state)
    rt   |X| <= 2 and |Y| <= 2   (realistic, possibly nonlocal)
    lt   |X + Y|, |X - Y| <= 2   (any local theory; CHSH form)
    lqt  X^2 + Y^2 <= 1          (local quantum theory)
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .qubit_algebra import (
    I2,
    SettingPair,
    ValidationError,
    check_density_matrix,
    kron,
    pauli_op,
    unit_vector,
)

DEFAULT_TOL = 1e-9
_CLAMP_SLACK = 1e-10


class XYPoint(NamedTuple):
    x_val: float
    y_val: float

    @property
    def sum_of_squares(self) -> float:
        return self.x_val**2 + self.y_val**2

    @property
    def max_abs_pm(self) -> float:
        return max(abs(self.x_val + self.y_val), abs(self.x_val - self.y_val))

    @property
    def max_abs(self) -> float:
        return max(abs(self.x_val), abs(self.y_val))


def correlation(rho, a, b) -> float:
    """Tr[rho (a.sigma) (x) (b.sigma)]."""
    rho = check_density_matrix(rho, dim=4)
    value = np.trace(rho @ kron(pauli_op(a), pauli_op(b)))
    if abs(value.imag) > _CLAMP_SLACK:
        raise ValidationError(f"correlation has imaginary part {value.imag:.3g}")
    e = float(value.real)
    if abs(e) > 1.0 + _CLAMP_SLACK:
        raise ValidationError(f"correlation {e!r} outside [-1, 1]")
    return max(-1.0, min(1.0, e))


def _projector(v, sign: int) -> np.ndarray:
    if sign not in (1, -1):
        raise ValidationError(f"outcome must be +1 or -1, got {sign!r}")
    return 0.5 * (I2 + sign * pauli_op(v))


def joint_probability(rho, a, b, i: int, j: int) -> float:
    """Probability of outcomes (i, j) when measuring a on A and b on B."""
    rho = check_density_matrix(rho, dim=4)
    p = np.trace(rho @ kron(_projector(a, i), _projector(b, j))).real
    return float(min(1.0, max(0.0, p)))


def joint_distribution(rho, a, b) -> np.ndarray:
    """Outcome probabilities in the order (+,+), (+,-), (-,+), (-,-)."""
    return np.array([joint_probability(rho, a, b, i, j) for i in (1, -1) for j in (1, -1)])


def singlet_correlation_closed_form(a, b) -> float:
    return -float(unit_vector(a) @ unit_vector(b))


def xy_from_correlation(corr: Callable[[np.ndarray, np.ndarray], float],
                        pa: SettingPair, pb: SettingPair) -> XYPoint:
    """X and Y from any correlation function E(a, b)."""
    x = corr(pa.main, pb.perp) + corr(pa.perp, pb.main)
    y = corr(pa.main, pb.main) - corr(pa.perp, pb.perp)
    return XYPoint(float(x), float(y))


def xy_quantities(rho, pa: SettingPair, pb: SettingPair) -> XYPoint:
    rho = check_density_matrix(rho, dim=4)
    return xy_from_correlation(lambda a, b: correlation(rho, a, b), pa, pb)


class Region(str, enum.Enum):
    LQT = "LQT"
    LT_NOT_LQT = "LT_not_LQT"
    QM_NOT_LT = "QM_not_LT"
    RT_NOT_QM = "RT_not_QM"
    OUTSIDE_RT = "OUTSIDE_RT"


@dataclass(frozen=True)
class BoundCheck:
    bound: float
    achieved: float
    satisfied: bool

    @property
    def margin(self) -> float:
        return self.bound - self.achieved


BOUND_NAMES = ("qm", "rt", "lt", "lqt")


@dataclass(frozen=True)
class HierarchyReport:
    xy: XYPoint
    bounds: dict[str, BoundCheck] = field(default_factory=dict)
    region: Region = Region.LQT
    hidden_qunonlocality: bool = False

    def violated(self) -> list[str]:
        return [name for name in BOUND_NAMES if not self.bounds[name].satisfied]

    def to_dict(self) -> dict:
        return {
            "X": self.xy.x_val,
            "Y": self.xy.y_val,
            "bounds": {
                name: {
                    "bound": b.bound,
                    "achieved": b.achieved,
                    "margin": b.margin,
                    "satisfied": b.satisfied,
                }
                for name, b in self.bounds.items()
            },
            "region": self.region.value,
            "hidden_qunonlocality": self.hidden_qunonlocality,
        }


def classify(xy: XYPoint, tol: float = DEFAULT_TOL) -> HierarchyReport:
    """Evaluate every bound at ``xy`` and assign the innermost region.

    A bound counts as satisfied when ``achieved <= bound + tol``.
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    xy = XYPoint(float(xy[0]), float(xy[1]))
    achieved = {
        "qm": (4.0, xy.sum_of_squares),
        "rt": (2.0, xy.max_abs),
        "lt": (2.0, xy.max_abs_pm),
        "lqt": (1.0, xy.sum_of_squares),
    }
    bounds = {
        name: BoundCheck(bound, value, value <= bound + tol)
        for name, (bound, value) in achieved.items()
    }
    ok = {name: b.satisfied for name, b in bounds.items()}
    if ok["lqt"]:
        region = Region.LQT
    elif ok["lt"]:
        region = Region.LT_NOT_LQT
    elif ok["qm"]:
        region = Region.QM_NOT_LT
    elif ok["rt"]:
        region = Region.RT_NOT_QM
    else:
        region = Region.OUTSIDE_RT
    hidden = ok["lt"] and not ok["lqt"]
    return HierarchyReport(xy=xy, bounds=bounds, region=region, hidden_qunonlocality=hidden)


def evaluate(rho, pa: SettingPair, pb: SettingPair, tol: float = DEFAULT_TOL) -> HierarchyReport:
    return classify(xy_quantities(rho, pa, pb), tol)


def region_of(x: float, y: float, tol: float = DEFAULT_TOL) -> Region:
    return classify(XYPoint(x, y), tol).region
