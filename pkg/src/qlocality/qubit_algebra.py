"""Small complex-matrix algebra for a pair of qubits.

Matrices are plain ``numpy`` arrays. Two-qubit operators use the product
basis ordered |uu>, |ud>, |du>, |dd> with sigma_z |u> = +|u>.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-9
UNIT_TOL = 1e-12
ORTHO_TOL = 1e-9

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)


class ValidationError(ValueError):
    """An input violates a documented invariant."""


class DomainError(ValidationError):
    """A parameter lies outside the admissible domain."""


def unit_vector(v, tol: float = UNIT_TOL) -> np.ndarray:
    """Return ``v`` as a float 3-vector, raising unless it has unit norm."""
    arr = np.asarray(v, dtype=float)
    if arr.shape != (3,):
        raise ValidationError(f"setting must be a 3-vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("setting has non-finite entries")
    norm = float(np.linalg.norm(arr))
    if abs(norm - 1.0) > tol:
        raise ValidationError(f"setting is not a unit vector (norm {norm!r})")
    return arr


@dataclass(frozen=True)
class SettingPair:
    """Orthonormal pair of measurement directions for one site."""

    main: np.ndarray
    perp: np.ndarray

    def __post_init__(self):
        main = unit_vector(self.main)
        perp = unit_vector(self.perp)
        dot = float(main @ perp)
        if abs(dot) > ORTHO_TOL:
            raise ValidationError(f"setting pair is not orthogonal (dot {dot!r})")
        object.__setattr__(self, "main", main)
        object.__setattr__(self, "perp", perp)

    def as_lists(self) -> tuple[list[float], list[float]]:
        return self.main.tolist(), self.perp.tolist()


def pauli_op(v) -> np.ndarray:
    """Spin observable v . sigma for a unit direction ``v``."""
    v = unit_vector(v)
    return v[0] * SIGMA_X + v[1] * SIGMA_Y + v[2] * SIGMA_Z


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def _check_finite(m: np.ndarray) -> None:
    if not np.all(np.isfinite(m)):
        raise ValidationError("matrix has non-finite entries")


def check_density_matrix(m, dim: int | None = None) -> np.ndarray:
    """Validate a density matrix and return it as a complex array.

    Raises ``ValidationError`` naming the first violated invariant
    (shape, finiteness, Hermiticity, unit trace, positivity).
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in (2, 4):
        raise ValidationError(f"density matrix must be 2x2 or 4x4, got shape {m.shape}")
    if dim is not None and m.shape[0] != dim:
        raise ValidationError(f"expected a {dim}x{dim} density matrix, got {m.shape}")
    _check_finite(m)
    herm_err = float(np.max(np.abs(m - m.conj().T)))
    if herm_err > HERMITIAN_TOL:
        raise ValidationError(f"density matrix is not Hermitian (max deviation {herm_err:.3g})")
    tr = np.trace(m)
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValidationError(f"density matrix trace is {tr.real!r}, not 1")
    lo = hermitian_eigenvalues(m)[0]
    if lo < -PSD_TOL:
        raise ValidationError(f"density matrix is not positive semidefinite (min eigenvalue {lo:.3g})")
    return m


def hermitian_eigenvalues(m) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix."""
    m = np.asarray(m, dtype=complex)
    _check_finite(m)
    if float(np.max(np.abs(m - m.conj().T))) > 1e-10:
        raise ValidationError("matrix is not Hermitian")
    # symmetrize so the LAPACK routine sees an exactly Hermitian input
    return np.linalg.eigvalsh(0.5 * (m + m.conj().T))


SINGLET_KET = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)


def make_singlet() -> np.ndarray:
    return np.outer(SINGLET_KET, SINGLET_KET.conj())


def make_werner(x: float) -> np.ndarray:
    """Werner state (1 - x) I/4 + x |psi-><psi-|, for 0 <= x <= 1."""
    x = float(x)
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"Werner parameter must lie in [0, 1], got {x!r}")
    return (1.0 - x) * I4 / 4.0 + x * make_singlet()


def qubit_state(bloch) -> np.ndarray:
    """Single-qubit state (I + r . sigma)/2 for ``|r| <= 1``."""
    r = np.asarray(bloch, dtype=float)
    if r.shape != (3,) or not np.all(np.isfinite(r)):
        raise ValidationError("Bloch vector must be a finite 3-vector")
    norm = float(np.linalg.norm(r))
    if norm > 1.0 + UNIT_TOL:
        raise DomainError(f"Bloch vector lies outside the unit ball (norm {norm!r})")
    return 0.5 * (I2 + r[0] * SIGMA_X + r[1] * SIGMA_Y + r[2] * SIGMA_Z)


def make_product(bloch_a, bloch_b) -> np.ndarray:
    return kron(qubit_state(bloch_a), qubit_state(bloch_b))


def mixture(weights, states) -> np.ndarray:
    weights = np.asarray(weights, dtype=float)
    return np.einsum("k,kij->ij", weights, np.asarray(states, dtype=complex))


def _as_tensor(rho: np.ndarray) -> np.ndarray:
    # indices (a_row, b_row, a_col, b_col)
    return np.asarray(rho, dtype=complex).reshape(2, 2, 2, 2)


def partial_transpose_B(rho) -> np.ndarray:
    t = _as_tensor(rho)
    return t.transpose(0, 3, 2, 1).reshape(4, 4)


def partial_trace_B(rho) -> np.ndarray:
    return np.einsum("ijkj->ik", _as_tensor(rho))


def partial_trace_A(rho) -> np.ndarray:
    return np.einsum("ijil->jl", _as_tensor(rho))


def bloch_vector(rho_1) -> np.ndarray:
    """Bloch vector of a single-qubit state."""
    rho_1 = np.asarray(rho_1, dtype=complex)
    return np.array([np.trace(rho_1 @ s).real for s in PAULI])


def is_separable_ppt(rho, tol: float = PSD_TOL) -> bool:
    """Peres-Horodecki test; exact for two qubits."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    rho = check_density_matrix(rho, dim=4)
    return bool(hermitian_eigenvalues(partial_transpose_B(rho))[0] >= -tol)


def correlation_tensor(rho) -> np.ndarray:
    """Real 3x3 matrix T_ij = Tr[rho sigma_i (x) sigma_j].

    The correlation for settings a, b is then ``a @ T @ b``.
    """
    rho = np.asarray(rho, dtype=complex)
    return np.array([[np.trace(rho @ np.kron(si, sj)).real for sj in PAULI] for si in PAULI])


# --- random ensembles -----------------------------------------------------

def random_unit_vector(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def random_bloch_vector(rng: np.random.Generator) -> np.ndarray:
    """Uniform point in the closed unit ball."""
    return random_unit_vector(rng) * rng.random() ** (1.0 / 3.0)


def random_setting_pair(rng: np.random.Generator) -> SettingPair:
    main = random_unit_vector(rng)
    w = rng.normal(size=3)
    w -= (w @ main) * main
    perp = w / np.linalg.norm(w)
    return SettingPair(main, perp)


def random_pure_state(rng: np.random.Generator) -> np.ndarray:
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    psi /= np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def random_density_matrix(rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random two-qubit state from a Ginibre matrix of the given rank (1..4)."""
    if rank is None:
        rank = int(rng.integers(1, 5))
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def random_separable_decomposition(rng: np.random.Generator, max_terms: int = 4):
    """Random list of (weight, bloch_a, bloch_b) with at most ``max_terms`` terms."""
    k = int(rng.integers(1, max_terms + 1))
    w = rng.dirichlet(np.ones(k))
    return [(float(w[i]), random_bloch_vector(rng), random_bloch_vector(rng)) for i in range(k)]


def separable_state(decomposition) -> np.ndarray:
    return sum(p * make_product(ra, rb) for p, ra, rb in decomposition)
