import math

import numpy as np
import pytest
from hypothesis import settings

from qmcrisk.gates import Gate, GateInstance
from qmcrisk.statevector import StateVector, apply_circuit, basis_state

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


def unitary(circ, k=None):
    """Dense matrix of a small circuit, column j = circuit applied to |j>."""
    k = circ.num_qubits if k is None else k
    cols = []
    for j in range(1 << k):
        cols.append(apply_circuit(basis_state(k, j), circ).amplitudes.copy())
    return np.array(cols).T


def equal_up_to_phase(a, b, tol=1e-9):
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(b[idx]) < tol:
        return np.allclose(a, b, atol=tol)
    ph = a[idx] / b[idx]
    return abs(abs(ph) - 1) < tol and np.allclose(a, ph * b, atol=tol)


def random_instance(rng, k):
    """A random valid gate instance on k qubits (used by property tests)."""
    kinds = ["X", "Z", "H", "RY", "RZ", "P", "U3"] + (["SWAP"] if k >= 2 else [])
    kind = str(rng.choice(kinds))
    nt = 2 if kind == "SWAP" else 1
    nparams = {"RY": 1, "RZ": 1, "P": 1, "U3": 3}.get(kind, 0)
    params = tuple(float(v) for v in rng.uniform(-math.pi, math.pi, nparams))
    qs = [int(q) for q in rng.permutation(k)]
    max_c = min(2, k - nt)
    nc = int(rng.integers(0, max_c + 1)) if max_c > 0 else 0
    return GateInstance(Gate(kind, params), tuple(qs[:nt]), tuple(qs[nt:nt + nc]))


SWAP_MATRIX = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def gate_matrix(gate):
    return SWAP_MATRIX if gate.kind == "SWAP" else gate.matrix()


class ResultCache:
    """Session-wide memo for expensive simulations shared by several tests."""

    def __init__(self):
        self._store = {}

    def get(self, key, fn):
        if key not in self._store:
            self._store[key] = fn()
        return self._store[key]


@pytest.fixture(scope="session")
def cache():
    return ResultCache()


def tiny_problem(p, n):
    """D = Ry on one rf qubit, M = CNOT onto rm: the measure probability is p."""
    from qmcrisk.gates import RegisterLayout, circuit, ry, x
    from qmcrisk.qae import QaeProblem, theta_of

    lay = RegisterLayout.build(rf=1, rm=1, out=n)
    d = circuit([ry(theta_of(p), 0)], lay)
    m = circuit([x(1, (0,))], lay)
    return QaeProblem(d, m, lay, n)




ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d}: {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
