"""Common-cause and realistic hidden-variable models.

Three local variants share :class:`CommonCauseModel`:

* ``"lt"``  - per-cause tables of local mean values,
* ``"lqt"`` - per-cause single-qubit states on each side,
* ``"lrt"`` - per-cause distributions over a hidden variable with
  local responses.

:class:`NonlocalRealisticModel` carries joint responses that need not
factorize. All sums over causes and hidden variables are finite.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

from .correlations import XYPoint, correlation, joint_distribution, xy_from_correlation
from .qubit_algebra import (
    SettingPair,
    ValidationError,
    check_density_matrix,
    pauli_op,
    qubit_state,
    random_bloch_vector,
    unit_vector,
)

WEIGHT_TOL = 1e-12
MEAN_TOL = 1e-12

SettingKey = tuple


def setting_key(v) -> SettingKey:
    """Hashable key for a unit setting; rounding absorbs float noise from JSON."""
    return tuple(round(float(c), 12) + 0.0 for c in unit_vector(v))


def _check_weights(weights: Sequence[float], what: str) -> None:
    w = np.asarray(weights, dtype=float)
    if w.size == 0:
        raise ValidationError(f"{what}: at least one entry is required")
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise ValidationError(f"{what}: weights must be finite and non-negative")
    if abs(float(w.sum()) - 1.0) > WEIGHT_TOL:
        raise ValidationError(f"{what}: weights sum to {float(w.sum())!r}, not 1")


def _check_mean(value: float, what: str) -> float:
    value = float(value)
    if not np.isfinite(value) or abs(value) > 1.0 + MEAN_TOL:
        raise ValidationError(f"{what}: local mean {value!r} outside [-1, 1]")
    return value


def _table(entries, what: str) -> dict[SettingKey, float]:
    if isinstance(entries, dict):
        items = entries.items()
    else:
        items = entries
    return {setting_key(k): _check_mean(v, what) for k, v in items}


def _lookup(table: dict[SettingKey, float], v, side: str) -> float:
    key = setting_key(v)
    try:
        return table[key]
    except KeyError:
        raise KeyError(f"no {side} entry for setting {list(key)}") from None


@dataclass(frozen=True)
class LocalTables:
    """Mean values of A's and B's outcomes per setting, for one cause."""

    alice: dict
    bob: dict

    def __post_init__(self):
        object.__setattr__(self, "alice", _table(self.alice, "alice table"))
        object.__setattr__(self, "bob", _table(self.bob, "bob table"))

    def terms(self) -> Iterator[tuple[float, Callable, Callable]]:
        yield (1.0,
               lambda a: _lookup(self.alice, a, "alice"),
               lambda b: _lookup(self.bob, b, "bob"))


@dataclass(frozen=True)
class LocalStates:
    """Local density operators of A and B, conditioned on one cause."""

    rho_a: np.ndarray
    rho_b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rho_a", check_density_matrix(self.rho_a, dim=2))
        object.__setattr__(self, "rho_b", check_density_matrix(self.rho_b, dim=2))

    @classmethod
    def from_bloch(cls, bloch_a, bloch_b) -> "LocalStates":
        return cls(qubit_state(bloch_a), qubit_state(bloch_b))

    def alice_mean(self, a) -> float:
        return float(np.trace(self.rho_a @ pauli_op(a)).real)

    def bob_mean(self, b) -> float:
        return float(np.trace(self.rho_b @ pauli_op(b)).real)

    def terms(self):
        yield (1.0, self.alice_mean, self.bob_mean)


@dataclass(frozen=True)
class HiddenResponses:
    """Distribution over hidden values with local responses, for one cause.

    ``lambdas`` is a sequence of ``(p, alice_responses, bob_responses)``;
    responses map settings to values in [-1, 1] (usually +-1).
    """

    lambdas: tuple

    def __post_init__(self):
        rows = tuple(
            (float(p), _table(ra, "alice response"), _table(rb, "bob response"))
            for p, ra, rb in self.lambdas
        )
        _check_weights([p for p, _, _ in rows], "hidden-variable distribution")
        object.__setattr__(self, "lambdas", rows)

    def terms(self):
        for p, ra, rb in self.lambdas:
            yield (p,
                   lambda a, ra=ra: _lookup(ra, a, "alice"),
                   lambda b, rb=rb: _lookup(rb, b, "bob"))

    def mean_alice(self, a) -> float:
        return sum(p * _lookup(ra, a, "alice") for p, ra, _ in self.lambdas)

    def mean_bob(self, b) -> float:
        return sum(p * _lookup(rb, b, "bob") for p, _, rb in self.lambdas)


PAYLOADS = {"lt": LocalTables, "lqt": LocalStates, "lrt": HiddenResponses}


@dataclass(frozen=True)
class CommonCauseModel:
    kind: str
    causes: tuple  # of (weight, payload)

    def __post_init__(self):
        if self.kind not in PAYLOADS:
            raise ValidationError(f"unknown model kind {self.kind!r}")
        causes = tuple((float(w), payload) for w, payload in self.causes)
        _check_weights([w for w, _ in causes], "cause weights")
        for _, payload in causes:
            if not isinstance(payload, PAYLOADS[self.kind]):
                raise ValidationError(
                    f"{self.kind} model carries a {type(payload).__name__} payload")
        object.__setattr__(self, "causes", causes)

    def local_terms(self):
        """Flattened (weight, alice_mean, bob_mean) over which outcomes factorize."""
        for w, payload in self.causes:
            for p, fa, fb in payload.terms():
                if w * p > 0:
                    yield w * p, fa, fb

    def correlation(self, a, b) -> float:
        return model_correlation(self, a, b)


def model_correlation(m: CommonCauseModel, a, b) -> float:
    """Sum over causes (and hidden values) of weight * mean_A * mean_B."""
    return float(sum(w * fa(a) * fb(b) for w, fa, fb in m.local_terms()))


def model_joint_distribution(m: CommonCauseModel, a, b) -> np.ndarray:
    """Factorized joint probabilities in the order (+,+), (+,-), (-,+), (-,-)."""
    out = np.zeros(4)
    for w, fa, fb in m.local_terms():
        ma, mb = fa(a), fb(b)
        pa = ((1 + ma) / 2, (1 - ma) / 2)
        pb = ((1 + mb) / 2, (1 - mb) / 2)
        out += w * np.array([pa[0] * pb[0], pa[0] * pb[1], pa[1] * pb[0], pa[1] * pb[1]])
    return out


def model_xy(model, pa: SettingPair, pb: SettingPair) -> XYPoint:
    return xy_from_correlation(model.correlation, pa, pb)


def lqt_model_from_separable(decomposition) -> CommonCauseModel:
    """One cause per product term ``(p_k, bloch_a_k, bloch_b_k)``."""
    decomposition = list(decomposition)
    if not decomposition:
        raise ValidationError("separable decomposition is empty")
    causes = []
    for term in decomposition:
        p, ra, rb = term
        causes.append((p, LocalStates.from_bloch(ra, rb)))
    return CommonCauseModel("lqt", tuple(causes))


def _split_thresholds(table: dict[SettingKey, float], resolution: int | None):
    """Partition [0, 1) so each setting's response is +1 below (1 + mean)/2."""
    thresholds = {k: min(1.0, max(0.0, (1.0 + v) / 2.0)) for k, v in table.items()}
    if resolution is None:
        cuts = sorted({0.0, 1.0, *thresholds.values()})
    else:
        cuts = list(np.linspace(0.0, 1.0, resolution + 1))
    atoms = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if hi - lo <= 0:
            continue
        mid = 0.5 * (lo + hi)
        atoms.append((hi - lo, {k: (1.0 if mid < t else -1.0) for k, t in thresholds.items()}))
    return atoms


def lrt_from_lt(m: CommonCauseModel, resolution: int | None = None) -> CommonCauseModel:
    """Deterministic-response model reproducing an ``"lt"`` model's tables.

    Each local mean is realized by a response of +1 on a fraction
    (1 + mean)/2 of the hidden variable and -1 elsewhere; the hidden
    variable is a pair of independent uniform draws, one per side.
    With ``resolution=None`` the cut points are exact; an integer
    resolution instead uses that many equal cells per side, which
    reproduces the means only to within 2/resolution.
    """
    if m.kind != "lt":
        raise ValidationError("lrt_from_lt needs an 'lt' model")
    if resolution is not None and resolution < 1:
        raise ValidationError("resolution must be a positive integer")
    causes = []
    for w, tables in m.causes:
        lambdas = []
        for pa, ra in _split_thresholds(tables.alice, resolution):
            for pb, rb in _split_thresholds(tables.bob, resolution):
                lambdas.append((pa * pb, ra, rb))
        total = sum(p for p, _, _ in lambdas)
        lambdas = [(p / total, ra, rb) for p, ra, rb in lambdas]
        causes.append((w, HiddenResponses(tuple(lambdas))))
    return CommonCauseModel("lrt", tuple(causes))


@dataclass(frozen=True)
class NonlocalRealisticModel:
    """Weighted joint responses Gamma(a, b) in [-1, 1], one table per hidden value."""

    causes: tuple  # of (weight, {(key_a, key_b): gamma})

    def __post_init__(self):
        rows = []
        for w, table in self.causes:
            items = table.items() if isinstance(table, dict) else table
            clean = {}
            for (a, b), g in items:
                g = float(g)
                if not np.isfinite(g) or abs(g) > 1.0 + MEAN_TOL:
                    raise ValidationError(f"joint response {g!r} outside [-1, 1]")
                clean[(setting_key(a), setting_key(b))] = g
            rows.append((float(w), clean))
        _check_weights([w for w, _ in rows], "cause weights")
        object.__setattr__(self, "causes", tuple(rows))

    def correlation(self, a, b) -> float:
        key = (setting_key(a), setting_key(b))
        total = 0.0
        for w, table in self.causes:
            if key not in table:
                raise KeyError(f"no joint response for settings {list(key[0])}, {list(key[1])}")
            total += w * table[key]
        return total

    def max_abs_response(self) -> float:
        return max(abs(g) for _, table in self.causes for g in table.values())


def rt_model_from_quantum(rho, settings) -> NonlocalRealisticModel:
    """Single-hidden-value model whose joint responses are the quantum correlations."""
    rho = check_density_matrix(rho, dim=4)
    table = [((a, b), correlation(rho, a, b)) for a, b in settings]
    return NonlocalRealisticModel(((1.0, table),))


def extremal_rt_model(pa: SettingPair, pb: SettingPair) -> NonlocalRealisticModel:
    """Joint responses reaching X = Y = 2, outside every quantum prediction."""
    table = [
        ((pa.main, pb.perp), 1.0),
        ((pa.perp, pb.main), 1.0),
        ((pa.main, pb.main), 1.0),
        ((pa.perp, pb.perp), -1.0),
    ]
    return NonlocalRealisticModel(((1.0, table),))


@dataclass(frozen=True)
class LocalityVerdict:
    passed: bool
    max_deviation: float


def verify_locality_condition(m: CommonCauseModel, target, settings, tol: float = 1e-9) -> LocalityVerdict:
    """Compare factorized joint probabilities against a target.

    ``target`` is a two-qubit density matrix or a callable ``(a, b)``
    returning the four joint probabilities in the order (+,+), (+,-),
    (-,+), (-,-).
    """
    if callable(target):
        target_fn = target
    else:
        rho = check_density_matrix(target, dim=4)
        target_fn = lambda a, b: joint_distribution(rho, a, b)  # noqa: E731
    dev = 0.0
    for a, b in settings:
        diff = np.abs(model_joint_distribution(m, a, b) - np.asarray(target_fn(a, b), dtype=float))
        dev = max(dev, float(diff.max()))
    return LocalityVerdict(dev <= tol, dev)


# --- random ensembles -----------------------------------------------------

def random_common_cause_model(rng: np.random.Generator, kind: str, settings_a, settings_b,
                              n_causes: int | None = None, n_lambdas: int = 3) -> CommonCauseModel:
    """Random model of the given kind defined on the listed settings."""
    if n_causes is None:
        n_causes = int(rng.integers(1, 6))
    weights = rng.dirichlet(np.ones(n_causes))
    causes = []
    for w in weights:
        if kind == "lt":
            payload = LocalTables(
                [(s, rng.uniform(-1, 1)) for s in settings_a],
                [(s, rng.uniform(-1, 1)) for s in settings_b],
            )
        elif kind == "lqt":
            payload = LocalStates.from_bloch(random_bloch_vector(rng), random_bloch_vector(rng))
        elif kind == "lrt":
            pl = rng.dirichlet(np.ones(n_lambdas))
            payload = HiddenResponses(tuple(
                (p,
                 [(s, float(rng.choice([-1.0, 1.0]))) for s in settings_a],
                 [(s, float(rng.choice([-1.0, 1.0]))) for s in settings_b])
                for p in pl
            ))
        else:
            raise ValidationError(f"unknown model kind {kind!r}")
        causes.append((w, payload))
    # dirichlet output can miss unit sum by a few ulps
    total = sum(w for w, _ in causes)
    return CommonCauseModel(kind, tuple((w / total, p) for w, p in causes))
