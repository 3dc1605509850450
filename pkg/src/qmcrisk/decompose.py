"""Lowering to {one-qubit gates, CNOT} and circuit depth."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.linalg import sqrtm

from .gates import Circuit, Gate, GateInstance, cnot, h, phase, ry, rz, u3

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_TOL = 1e-12


def toffoli_network(a: int, b: int, c: int) -> list[GateInstance]:
    """Standard 6-CNOT Toffoli (controls a, b; target c), depth 11."""
    t, tdg = math.pi / 4, -math.pi / 4
    return [
        h(c),
        cnot(b, c),
        phase(tdg, c),
        cnot(a, c),
        phase(t, c),
        cnot(b, c),
        phase(tdg, c),
        cnot(a, c),
        phase(t, b),
        phase(t, c),
        h(c),
        cnot(a, b),
        phase(t, a),
        phase(tdg, b),
        cnot(a, b),
    ]


def u3_params(u: np.ndarray) -> tuple[float, float, float, float]:
    """Return (alpha, theta, phi, lam) with u = exp(i alpha) U3(theta, phi, lam)."""
    c, s = abs(u[0, 0]), abs(u[1, 0])
    theta = 2 * math.atan2(s, c)
    if c > _TOL:
        alpha = float(np.angle(u[0, 0]))
        if s > _TOL:
            phi = float(np.angle(u[1, 0])) - alpha
            lam = float(np.angle(-u[0, 1])) - alpha
        else:
            phi, lam = 0.0, float(np.angle(u[1, 1])) - alpha
    else:
        alpha = float(np.angle(u[1, 0]))
        phi, lam = 0.0, float(np.angle(-u[0, 1])) - alpha
    return alpha, theta, phi, lam


def _one_qubit(u: np.ndarray, q: int) -> list[GateInstance]:
    """u up to global phase; identity emits nothing."""
    _, theta, phi, lam = u3_params(u)
    if abs(theta) < _TOL and abs(math.remainder(phi + lam, 2 * math.pi)) < _TOL:
        return []
    return [u3(theta, phi, lam, q)]


def _controlled_u(u: np.ndarray, c: int, t: int) -> list[GateInstance]:
    """Exact controlled-u from two CNOTs, three one-qubit gates and a phase on c."""
    if np.allclose(u, _X, atol=_TOL):
        return [cnot(c, t)]
    alpha, theta, phi, lam = u3_params(u)
    # u = exp(i(alpha + (phi+lam)/2)) Rz(phi) Ry(theta) Rz(lam)
    global_phase = alpha + (phi + lam) / 2
    beta, gamma, delta = phi, theta, lam
    a = Gate("RZ", (beta,)).matrix() @ Gate("RY", (gamma / 2,)).matrix()
    b = Gate("RY", (-gamma / 2,)).matrix() @ Gate("RZ", (-(delta + beta) / 2,)).matrix()
    cm = Gate("RZ", ((delta - beta) / 2,)).matrix()
    out = _one_qubit(cm, t) + [cnot(c, t)] + _one_qubit(b, t) + [cnot(c, t)] + _one_qubit(a, t)
    if abs(math.remainder(global_phase, 2 * math.pi)) > _TOL:
        out.append(phase(global_phase, c))
    return out


def _multi_controlled_u(u: np.ndarray, controls: tuple[int, ...], t: int) -> list[GateInstance]:
    """C^k u via the square-root recursion (no ancillas)."""
    if len(controls) == 1:
        return _controlled_u(u, controls[0], t)
    if len(controls) == 2 and np.allclose(u, _X, atol=_TOL):
        return toffoli_network(controls[0], controls[1], t)
    v = sqrtm(u)
    rest, last = controls[:-1], controls[-1]
    flip = _multi_controlled_u(_X, rest, last)
    return (
        _multi_controlled_u(v, rest, t)
        + flip
        + _controlled_u(v.conj().T, last, t)
        + flip
        + _controlled_u(v, last, t)
    )


def _lower(gate: Gate, num_controls: int) -> list[GateInstance]:
    """Lower ``gate`` with targets 0 (and 1 for SWAP) and controls on the next indices."""
    nt = gate.num_targets
    controls = tuple(range(nt, nt + num_controls))
    kind = gate.kind
    if kind == "SWAP":
        if num_controls == 0:
            return [cnot(0, 1), cnot(1, 0), cnot(0, 1)]
        inner = decompose_instance(GateInstance(Gate("X"), (1,), (0,) + controls))
        return [cnot(1, 0)] + inner + [cnot(1, 0)]
    if num_controls == 0:
        return [GateInstance(gate, (0,))]
    if num_controls == 1:
        c = controls[0]
        if kind == "X":
            return [cnot(c, 0)]
        if kind == "Z":
            return [h(0), cnot(c, 0), h(0)]
        if kind == "RY":
            th = gate.params[0]
            return [ry(th / 2, 0), cnot(c, 0), ry(-th / 2, 0), cnot(c, 0)]
        if kind == "RZ":
            th = gate.params[0]
            return [rz(th / 2, 0), cnot(c, 0), rz(-th / 2, 0), cnot(c, 0)]
        if kind == "P":
            lam = gate.params[0]
            return [phase(lam / 2, c), cnot(c, 0), phase(-lam / 2, 0), cnot(c, 0), phase(lam / 2, 0)]
    return _multi_controlled_u(gate.matrix(), controls, 0)


@lru_cache(maxsize=None)
def _template(gate: Gate, num_controls: int) -> tuple[GateInstance, ...]:
    return tuple(_lower(gate, num_controls))


def decompose_instance(inst: GateInstance) -> list[GateInstance]:
    mapping = inst.targets + inst.controls
    return [g.remap(mapping) for g in _template(inst.gate, len(inst.controls))]


def decompose_to_basis(circ: Circuit) -> Circuit:
    """Rewrite every instance into one-qubit gates and CNOTs."""
    out = []
    for inst in circ.instances:
        out.extend(decompose_instance(inst))
    return Circuit(tuple(out), circ.num_qubits, circ.layout)


def is_basis(circ: Circuit) -> bool:
    for g in circ.instances:
        if g.gate.kind == "SWAP":
            return False
        if g.controls and not (g.gate.kind == "X" and len(g.controls) == 1):
            return False
    return True


def depth(circ: Circuit) -> int:
    """Critical-path length under greedy as-soon-as-possible layering.

    An instance occupies every qubit it touches (targets and controls)."""
    level: dict[int, int] = {}
    best = 0
    for g in circ.instances:
        layer = 1 + max((level.get(q, 0) for q in g.qubits), default=0)
        for q in g.qubits:
            level[q] = layer
        best = max(best, layer)
    return best


# ---------------------------------------------------------------------------
# depth profiles
#
# ASAP layering is linear in max-plus algebra: if L[i] is the layer reached by
# qubit i before a block and W[i, j] the longest gate path from entry i to exit
# j (-inf if none), the exit layers are max_i (L[i] + W[i, j]). Profiles of
# consecutive blocks compose by max-plus products, so the depth of a power
# Q^(2^l) follows from repeated squaring without listing its gates.

NEG = -np.inf


def _local_profile(instances, r: int) -> np.ndarray:
    w = np.full((r, r), NEG)
    for i in range(r):
        lev = [NEG] * r
        lev[i] = 0.0
        for g in instances:
            layer = 1 + max(lev[q] for q in g.qubits)
            for q in g.qubits:
                lev[q] = layer
        w[i] = lev
    return w


@lru_cache(maxsize=None)
def _template_profile(gate: Gate, num_controls: int) -> np.ndarray:
    return _local_profile(_template(gate, num_controls), gate.num_targets + num_controls)


def identity_profile(k: int) -> np.ndarray:
    w = np.full((k, k), NEG)
    np.fill_diagonal(w, 0.0)
    return w


def maxplus(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a[:, :, None] + b[None, :, :]).max(axis=1)


def maxplus_power(w: np.ndarray, exponent: int) -> np.ndarray:
    result = identity_profile(w.shape[0])
    base = w
    while exponent:
        if exponent & 1:
            result = maxplus(result, base)
        exponent >>= 1
        if exponent:
            base = maxplus(base, base)
    return result


def decomposed_profile(circ: Circuit, num_qubits: int | None = None) -> np.ndarray:
    """Max-plus profile of ``decompose_to_basis(circ)`` (not materialized)."""
    k = circ.num_qubits if num_qubits is None else num_qubits
    w = identity_profile(k)
    for inst in circ.instances:
        qs = list(inst.targets + inst.controls)
        local = _template_profile(inst.gate, len(inst.controls))
        w[:, qs] = (w[:, qs][:, :, None] + local[None, :, :]).max(axis=1)
    return w


def profile_depth(w: np.ndarray) -> int:
    return int(max(w.max(), 0))


def decomposed_depth(circ: Circuit) -> int:
    """depth(decompose_to_basis(circ)) without building the lowered circuit."""
    return profile_depth(decomposed_profile(circ))


def gate_count(circ: Circuit) -> dict[str, int]:
    counts: dict[str, int] = {}
    for g in circ.instances:
        key = ("C" * len(g.controls)) + g.gate.kind
        counts[key] = counts.get(key, 0) + 1
    return counts
