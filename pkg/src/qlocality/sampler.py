"""Seeded Monte Carlo simulation of the two-site measurement.

Each (seed, stream) pair gets its own PCG64 generator derived through
``numpy.random.SeedSequence``; ``empirical_xy`` uses stream ids 0..3 for
the four setting combinations, so the estimate does not depend on the
order in which the combinations are sampled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .correlations import XYPoint, joint_distribution
from .qubit_algebra import SettingPair, ValidationError, check_density_matrix

OUTCOMES = ((1, 1), (1, -1), (-1, 1), (-1, -1))
_BLOCK = 1 << 20
# probabilities below this are treated as round-off from the trace
_ZERO_PROB = 1e-14

# stream ids used by empirical_xy
XY_STREAMS = {"a,b_perp": 0, "a_perp,b": 1, "a,b": 2, "a_perp,b_perp": 3}


def make_generator(seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(int(stream),))))


@dataclass(frozen=True)
class SampleResult:
    counts: np.ndarray  # 2x2, rows i = +1, -1 ; columns j = +1, -1
    n: int

    @property
    def empirical_correlation(self) -> float:
        c = self.counts
        return float((c[0, 0] - c[0, 1] - c[1, 0] + c[1, 1]) / self.n)

    @property
    def standard_error(self) -> float:
        e = self.empirical_correlation
        return math.sqrt(max(0.0, 1.0 - e * e) / self.n)

    def to_dict(self) -> dict:
        return {
            "counts": self.counts.tolist(),
            "n": self.n,
            "empirical_correlation": self.empirical_correlation,
            "standard_error": self.standard_error,
        }


def _cdf(probs: np.ndarray) -> np.ndarray:
    p = np.where(probs < _ZERO_PROB, 0.0, probs)
    cdf = np.cumsum(p / p.sum())
    cdf[-1] = 1.0
    return cdf


def draw_counts(probs, n: int, rng: np.random.Generator) -> np.ndarray:
    """Inverse-CDF draws over the four outcomes, in the fixed outcome order."""
    cdf = _cdf(np.asarray(probs, dtype=float))
    counts = np.zeros(4, dtype=np.int64)
    remaining = n
    while remaining > 0:
        k = min(remaining, _BLOCK)
        idx = np.searchsorted(cdf, rng.random(k), side="right")
        counts += np.bincount(np.minimum(idx, 3), minlength=4)
        remaining -= k
    return counts


def sample_outcomes(rho, a, b, n: int, seed: int, stream: int = 0) -> SampleResult:
    if int(n) < 1:
        raise ValidationError("number of shots must be at least 1")
    rho = check_density_matrix(rho, dim=4)
    probs = joint_distribution(rho, a, b)
    counts = draw_counts(probs, int(n), make_generator(seed, stream))
    return SampleResult(counts.reshape(2, 2), int(n))


@dataclass(frozen=True)
class EmpiricalXY:
    xy: XYPoint
    se_x: float
    se_y: float
    samples: dict

    @property
    def sum_of_squares_se(self) -> float:
        """Propagated standard error of X^2 + Y^2."""
        return math.hypot(2 * self.xy.x_val * self.se_x, 2 * self.xy.y_val * self.se_y)


def empirical_xy(rho, pa: SettingPair, pb: SettingPair, n_per_setting: int, seed: int) -> EmpiricalXY:
    combos = {
        "a,b_perp": (pa.main, pb.perp),
        "a_perp,b": (pa.perp, pb.main),
        "a,b": (pa.main, pb.main),
        "a_perp,b_perp": (pa.perp, pb.perp),
    }
    res = {
        name: sample_outcomes(rho, a, b, n_per_setting, seed, stream=XY_STREAMS[name])
        for name, (a, b) in combos.items()
    }
    e = {name: r.empirical_correlation for name, r in res.items()}
    s = {name: r.standard_error for name, r in res.items()}
    x = e["a,b_perp"] + e["a_perp,b"]
    y = e["a,b"] - e["a_perp,b_perp"]
    se_x = math.hypot(s["a,b_perp"], s["a_perp,b"])
    se_y = math.hypot(s["a,b"], s["a_perp,b_perp"])
    return EmpiricalXY(XYPoint(x, y), se_x, se_y, res)
