import math
import sys

import numpy as np
import pytest

from qlocality.qubit_algebra import SettingPair

R2 = math.sqrt(0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def maximal_settings():
    """Coplanar, opposite-handed settings where the singlet gives X = sqrt2, Y = -sqrt2."""
    pa = SettingPair(np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0]))
    pb = SettingPair(np.array([R2, -R2, 0.0]), np.array([-R2, -R2, 0.0]))
    return pa, pb


# --- independent oracles -------------------------------------------------------

def jacobi_eigenvalues(m, sweeps=50):
    """Cyclic Jacobi on the real 2n x 2n embedding of a Hermitian matrix.

    Each eigenvalue of ``m`` appears twice in the embedding; every other
    sorted value is returned.
    """
    m = np.asarray(m, dtype=complex)
    a = np.block([[m.real, -m.imag], [m.imag, m.real]]).astype(float)
    n = a.shape[0]
    for _ in range(sweeps):
        off = math.sqrt(sum(a[i, j] ** 2 for i in range(n) for j in range(n) if i != j))
        if off < 1e-15:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) < 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2 * a[p, q])
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1))
                c = 1 / math.sqrt(t * t + 1)
                s = t * c
                for k in range(n):
                    akp, akq = a[k, p], a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk, aqk = a[p, k], a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
    vals = np.sort(np.diag(a))
    return vals[::2]


def loop_trace_product(a, b):
    """Tr[a @ b] by explicit summation."""
    n = len(a)
    return sum(a[i][k] * b[k][i] for i in range(n) for k in range(n))


def loop_kron(a, b):
    out = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    out[2 * i + k, 2 * j + l] = a[i][j] * b[k][l]
    return out


def loop_partial_transpose(rho):
    out = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    out[2 * i + j, 2 * k + l] = rho[2 * i + l, 2 * k + j]
    return out


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
