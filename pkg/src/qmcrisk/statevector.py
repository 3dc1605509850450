"""Dense statevector simulator.

Amplitudes live in a flat complex128 array of length ``2**k``; basis state
``|b_{k-1} ... b_1 b_0>`` sits at index ``sum(b_l * 2**l)``. Gate kernels are
compiled loops over amplitude pairs: indices with the target and control bits
cleared are enumerated, the control mask is OR-ed in, and the 2x2 gate acts on
the pair differing in the target bit. No full unitary is ever built.

The memory budget defaults to 26 qubits (1 GiB of amplitudes). It can be
changed with the ``QMCRISK_MAX_QUBITS`` environment variable or, within a
block, with :func:`qubit_budget`.
"""

from __future__ import annotations

import os
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from numba import njit

from .gates import Circuit, GateInstance

DEFAULT_MAX_QUBITS = 26
BUDGET_ENV = "QMCRISK_MAX_QUBITS"


class CapacityError(MemoryError):
    """Requested register exceeds the configured qubit budget."""

    def __init__(self, required: int, budget: int):
        self.required = int(required)
        self.budget = int(budget)
        self.shortfall = self.required - self.budget
        super().__init__(
            f"{self.required} qubits requested but the budget is {self.budget} "
            f"(short by {self.shortfall}); raise {BUDGET_ENV} to allow more"
        )


class QubitIndexError(IndexError):
    pass


_override: list[int] = []


@contextmanager
def qubit_budget(limit: int):
    """Temporarily replace the qubit budget (innermost setting wins)."""
    _override.append(int(limit))
    try:
        yield
    finally:
        _override.pop()


def max_qubits() -> int:
    if _override:
        return _override[-1]
    raw = os.environ.get(BUDGET_ENV)
    if raw is None or raw == "":
        return DEFAULT_MAX_QUBITS
    value = int(raw)
    if value < 1:
        raise ValueError(f"{BUDGET_ENV} must be a positive integer, got {raw!r}")
    return value


def check_capacity(num_qubits: int) -> None:
    budget = max_qubits()
    if num_qubits > budget:
        raise CapacityError(num_qubits, budget)


@dataclass
class StateVector:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (1 << self.num_qubits,):
            raise ValueError(
                f"amplitude array has shape {self.amplitudes.shape}, expected ({1 << self.num_qubits},)"
            )

    @classmethod
    def from_amplitudes(cls, amplitudes, normalize: bool = False) -> StateVector:
        amps = np.array(amplitudes, dtype=np.complex128).ravel()
        k = int(amps.size).bit_length() - 1
        if amps.size != 1 << k or k < 1:
            raise ValueError(f"length {amps.size} is not a power of two >= 2")
        if normalize:
            amps /= np.linalg.norm(amps)
        return cls(k, amps)

    def copy(self) -> StateVector:
        return StateVector(self.num_qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        a = self.amplitudes
        return a.real * a.real + a.imag * a.imag


def new_zero_state(num_qubits: int) -> StateVector:
    if num_qubits < 1:
        raise ValueError(f"need at least one qubit, got {num_qubits}")
    check_capacity(num_qubits)
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(num_qubits, amps)


def basis_state(num_qubits: int, index: int) -> StateVector:
    state = new_zero_state(num_qubits)
    state.amplitudes[0] = 0.0
    state.amplitudes[index] = 1.0
    return state


def random_state(num_qubits: int, seed: int | None = None) -> StateVector:
    rng = np.random.default_rng(seed)
    check_capacity(num_qubits)
    amps = rng.normal(size=1 << num_qubits) + 1j * rng.normal(size=1 << num_qubits)
    return StateVector(num_qubits, amps / np.linalg.norm(amps))


def inner(a: StateVector, b: StateVector) -> complex:
    """<a|b>."""
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: StateVector, b: StateVector) -> float:
    """Global-phase-insensitive overlap |<a|b>|."""
    return abs(inner(a, b))


# ---------------------------------------------------------------------------
# kernels


def _validate(gate: GateInstance, k: int) -> None:
    qubits = gate.qubits
    if len(set(qubits)) != len(qubits):
        raise QubitIndexError(f"duplicate qubit index in {gate}")
    for q in qubits:
        if not 0 <= q < k:
            raise QubitIndexError(f"qubit {q} out of range for a {k}-qubit register in {gate}")


@njit(cache=True, boundscheck=False)
def _apply_pair(psi, pinned, cmask, off0, off1, m, kind):
    # Visit every index with zeros at the sorted ``pinned`` bit positions,
    # OR in the control mask, and update the amplitude pair (i|off0, i|off1).
    # kind: 0 swap, 1 diagonal, 2 dense 2x2.
    npin = pinned.shape[0]
    p0 = pinned[0]
    run = 1 << p0
    nblk = psi.shape[0] >> (npin + p0)
    m00 = m[0, 0]
    m01 = m[0, 1]
    m10 = m[1, 0]
    m11 = m[1, 1]
    for b in range(nblk):
        i = b << p0
        for t in range(npin):
            p = pinned[t]
            i = ((i >> p) << (p + 1)) | (i & ((1 << p) - 1))
        i |= cmask
        for r in range(run):
            i0 = i | r | off0
            i1 = i | r | off1
            a0 = psi[i0]
            a1 = psi[i1]
            if kind == 0:
                psi[i0] = a1
                psi[i1] = a0
            elif kind == 1:
                psi[i0] = m00 * a0
                psi[i1] = m11 * a1
            else:
                psi[i0] = m00 * a0 + m01 * a1
                psi[i1] = m10 * a0 + m11 * a1


_IDENTITY = np.eye(2, dtype=np.complex128)


class _Op:
    """One gate instance compiled against a fixed register width."""

    __slots__ = ("pinned", "cmask", "off0", "off1", "m", "kind")

    def __init__(self, gate: GateInstance, k: int):
        _validate(gate, k)
        self.pinned = np.array(sorted(gate.qubits), dtype=np.int64)
        self.cmask = sum(1 << c for c in gate.controls)
        kind = gate.gate.kind
        if kind == "SWAP":
            a, b = gate.targets
            self.off0, self.off1 = 1 << a, 1 << b
            self.kind, self.m = 0, _IDENTITY
            return
        self.off0, self.off1 = 0, 1 << gate.targets[0]
        m = np.ascontiguousarray(gate.gate.matrix(), dtype=np.complex128)
        self.m = m
        if kind == "X":
            self.kind = 0
        elif m[0, 1] == 0 and m[1, 0] == 0:
            self.kind = 1
        else:
            self.kind = 2

    def __call__(self, psi: np.ndarray) -> None:
        _apply_pair(psi, self.pinned, self.cmask, self.off0, self.off1, self.m, self.kind)


class Program:
    """A circuit pre-compiled for repeated application to one register width."""

    def __init__(self, circ: Circuit | Iterable[GateInstance], num_qubits: int):
        instances = circ.instances if isinstance(circ, Circuit) else tuple(circ)
        self.num_qubits = num_qubits
        self.ops = [_Op(g, num_qubits) for g in instances]

    def __len__(self) -> int:
        return len(self.ops)

    def run(self, state: StateVector, repeat: int = 1) -> StateVector:
        if state.num_qubits != self.num_qubits:
            raise ValueError(
                f"program compiled for {self.num_qubits} qubits, state has {state.num_qubits}"
            )
        psi = state.amplitudes
        for _ in range(repeat):
            for op in self.ops:
                op(psi)
        return state


def apply(state: StateVector, gate: GateInstance) -> StateVector:
    """Apply one gate instance in place and return the state."""
    op = _Op(gate, state.num_qubits)
    op(state.amplitudes)
    return state


def apply_circuit(state: StateVector, circ: Circuit | Sequence[GateInstance]) -> StateVector:
    if isinstance(circ, Circuit) and circ.num_qubits > state.num_qubits:
        raise QubitIndexError(
            f"circuit spans {circ.num_qubits} qubits, state has {state.num_qubits}"
        )
    return Program(circ, state.num_qubits).run(state)


def simulate(circ: Circuit, num_qubits: int | None = None) -> StateVector:
    """Run ``circ`` on |0...0>."""
    k = circ.num_qubits if num_qubits is None else num_qubits
    return apply_circuit(new_zero_state(k), circ)


# ---------------------------------------------------------------------------
# readout


@dataclass(frozen=True)
class OutcomeHistogram:
    """Distribution over the integer values of a qubit subset.

    Bit ``i`` of a value is the state of ``qubits[i]``. ``data`` holds exact
    probabilities when ``shots`` is None, otherwise integer counts.
    """

    qubits: tuple[int, ...]
    data: np.ndarray
    shots: int | None = None

    @property
    def exact(self) -> bool:
        return self.shots is None

    @property
    def values(self) -> dict[int, float | int]:
        if self.exact:
            return {int(i): float(v) for i, v in enumerate(self.data) if v != 0}
        return {int(i): int(v) for i, v in enumerate(self.data) if v != 0}

    def probabilities(self) -> np.ndarray:
        if self.exact:
            return np.asarray(self.data, dtype=float)
        return np.asarray(self.data, dtype=float) / self.shots

    def __getitem__(self, value: int):
        return self.data[value]

    def total(self) -> float:
        return float(np.sum(self.data))


def _check_subset(k: int, subset: Sequence[int]) -> tuple[int, ...]:
    subset = tuple(int(q) for q in subset)
    if len(set(subset)) != len(subset):
        raise QubitIndexError(f"duplicate qubit in subset {subset}")
    for q in subset:
        if not 0 <= q < k:
            raise QubitIndexError(f"qubit {q} out of range for {k} qubits")
    return subset


def _marginal_array(state: StateVector, subset: tuple[int, ...]) -> np.ndarray:
    k = state.num_qubits
    probs = state.probabilities().reshape((2,) * k)
    keep = [k - 1 - q for q in subset]
    others = tuple(ax for ax in range(k) if ax not in keep)
    reduced = probs.sum(axis=others) if others else probs
    remaining = sorted(keep)
    # flat C-order index must equal sum(bit_i * 2**i), so subset[0] is the last axis
    desired = [k - 1 - q for q in reversed(subset)]
    reduced = np.transpose(reduced, [remaining.index(ax) for ax in desired])
    return np.ascontiguousarray(reduced).reshape(-1)


def marginal_distribution(state: StateVector, qubit_subset: Sequence[int]) -> OutcomeHistogram:
    subset = _check_subset(state.num_qubits, qubit_subset)
    if not subset:
        return OutcomeHistogram((), np.array([state.norm() ** 2]))
    return OutcomeHistogram(subset, _marginal_array(state, subset))


def probability_of(state: StateVector, qubit_subset: Sequence[int], value: int) -> float:
    subset = _check_subset(state.num_qubits, qubit_subset)
    if not 0 <= value < (1 << len(subset)):
        raise ValueError(f"value {value} does not fit in {len(subset)} bits")
    k = state.num_qubits
    idx = [slice(None)] * k
    for i, q in enumerate(subset):
        idx[k - 1 - q] = (value >> i) & 1
    block = state.amplitudes.reshape((2,) * k)[tuple(idx)]
    return float(np.sum(block.real ** 2 + block.imag ** 2))


def sample(state: StateVector, qubit_subset: Sequence[int], shots: int, seed: int) -> OutcomeHistogram:
    """Draw ``shots`` i.i.d. measurements of the subset with numpy's PCG64."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    hist = marginal_distribution(state, qubit_subset)
    p = np.clip(hist.data, 0.0, None)
    p = p / p.sum()
    counts = np.random.default_rng(seed).multinomial(shots, p)
    return OutcomeHistogram(hist.qubits, counts.astype(np.int64), int(shots))
