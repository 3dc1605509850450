import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_instance, unitary
from qmcrisk.gates import (
    AncillaError,
    Circuit,
    CircuitError,
    Gate,
    GateInstance,
    RegisterLayout,
    a_gate,
    and_cascade,
    circuit,
    cnot,
    concat,
    controlled,
    dumps,
    h,
    inverse,
    inverse_qft,
    loads,
    multi_controlled_z,
    or3,
    or_gate,
    qft,
    qft_full,
    ry,
    swap,
    toffoli,
    x,
)
from qmcrisk.statevector import (
    apply_circuit,
    basis_state,
    fidelity,
    marginal_distribution,
    random_state,
    simulate,
)


def dft(n):
    N = 1 << n
    j = np.arange(N)
    return np.exp(2j * math.pi * np.outer(j, j) / N) / math.sqrt(N)


def basis_out(circ, k, idx):
    return marginal_distribution(apply_circuit(basis_state(k, idx), circ), range(k)).values


# --- construction and validation ---------------------------------------------


def test_gate_validation():
    with pytest.raises(CircuitError):
        Gate("FOO")
    with pytest.raises(CircuitError):
        Gate("RY")
    with pytest.raises(CircuitError):
        Gate("RY", (math.nan,))
    with pytest.raises(CircuitError):
        GateInstance(Gate("X"), (0,), (0,))
    with pytest.raises(CircuitError):
        GateInstance(Gate("SWAP"), (0,))


def test_layout_rules():
    lay = RegisterLayout.build(rf=3, rm=1, anc=2, out=2)
    assert lay["rf"] == (0, 1, 2) and lay.single("rm") == 3 and lay["out"] == (6, 7)
    assert lay.num_qubits == 8 and lay["st"] == ()
    with pytest.raises(CircuitError):
        RegisterLayout({"rf": (0, 1), "rm": (1,)})
    with pytest.raises(CircuitError):
        RegisterLayout({"rf": (0, 2)})
    with pytest.raises(CircuitError):
        RegisterLayout.build(foo=1)


def test_controlled_rejects_overlap():
    with pytest.raises(CircuitError):
        controlled(circuit([x(0), x(1)]), [1])


def test_inverse_keeps_instance_count():
    c = circuit([h(0), ry(0.3, 1, (0,)), swap(0, 2)])
    assert len(inverse(c)) == len(c)
    assert inverse(inverse(c)).instances == c.instances


def test_toffoli_truth_table():
    c = circuit([toffoli(0, 1, 2)])
    for idx in range(8):
        expect = idx ^ 4 if idx & 3 == 3 else idx
        assert basis_out(c, 3, idx) == {expect: 1.0}


def test_or3_truth_table():
    c = or3(0, 1, 2)
    for a in (0, 1):
        for b in (0, 1):
            idx = a | (b << 1)
            assert basis_out(c, 3, idx) == {idx | ((a | b) << 2): 1.0}


def test_ancilla_shortage():
    with pytest.raises(AncillaError):
        and_cascade((0, 1, 2, 3), (4,), 5)
    with pytest.raises(AncillaError):
        a_gate((0, 1, 2), (3,))


# --- ancilla restoration ------------------------------------------------------


@pytest.mark.parametrize("k", range(1, 9))
def test_and_cascade_restores_ancillas(k):
    inputs = tuple(range(k))
    anc = tuple(range(k, k + max(k - 2, 0)))
    target = k + len(anc)
    c = and_cascade(inputs, anc, target)
    total = target + 1
    for idx in ([(1 << k) - 1, 0] + [int(v) for v in np.random.default_rng(k).integers(0, 1 << k, 16)]):
        out = basis_out(c, total, idx)
        (val,) = out
        assert all(not (val >> a) & 1 for a in anc)
        assert (val >> target) & 1 == int(idx == (1 << k) - 1)
        assert val & ((1 << k) - 1) == idx


@pytest.mark.parametrize("k", range(1, 8))
def test_or_gate_restores_ancillas(k):
    inputs = tuple(range(k))
    anc = tuple(range(k, k + max(k - 2, 0)))
    target = k + len(anc)
    c = or_gate(inputs, anc, target)
    for idx in range(1 << k):
        (val,) = basis_out(c, target + 1, idx)
        assert all(not (val >> a) & 1 for a in anc)
        assert (val >> target) & 1 == int(idx != 0)


def test_a_gate_inverse_clears_partials():
    compute, res = a_gate((0, 1, 2, 3), (4, 5, 6))
    assert res == 6
    c = compute + circuit([cnot(res, 7)]) + inverse(compute)
    (val,) = basis_out(c, 8, 0b1111)
    assert val == 0b1111 | (1 << 7)


def test_multi_controlled_z_phase():
    c = multi_controlled_z((0, 1, 2), (3,), 4)
    u = unitary(c, 5)
    for idx in range(32):
        if (idx >> 3) & 1:
            continue
        sign = -1 if idx & 0b10111 == 0b10111 else 1
        assert abs(u[idx, idx] - sign) < 1e-12


# --- Fourier transforms -----------------------------------------------------------


@pytest.mark.parametrize("n", range(1, 6))
def test_qft_full_is_dft(n):
    assert np.allclose(unitary(qft_full(range(n)), n), dft(n), atol=1e-12)


@pytest.mark.parametrize("n", range(1, 6))
def test_inverse_qft_is_inverse_dft(n):
    assert np.allclose(unitary(inverse_qft(range(n)), n), dft(n).conj().T, atol=1e-12)


def test_qft_on_zero_is_uniform():
    s = simulate(qft(range(3)), 3)
    assert np.allclose(s.amplitudes, np.full(8, 1 / math.sqrt(8)))


@given(n=st.integers(1, 8), seed=st.integers(0, 2**32 - 1))
def test_inverse_qft_undoes_full_qft(n, seed):
    start = random_state(n, seed)
    qs = list(range(n))
    end = apply_circuit(apply_circuit(start.copy(), qft_full(qs)), inverse_qft(qs))
    assert fidelity(start, end) >= 1 - 1e-9


# --- algebraic properties -----------------------------------------------------------


@given(seed=st.integers(0, 2**32 - 1), length=st.integers(1, 12))
def test_controlled_commutes_with_inverse(seed, length):
    rng = np.random.default_rng(seed)
    body = Circuit(tuple(random_instance(rng, 3) for _ in range(length)), 3)
    a = controlled(inverse(body), [3])
    b = inverse(controlled(body, [3]))
    start = random_state(4, seed)
    sa = apply_circuit(start.copy(), a)
    sb = apply_circuit(start.copy(), b)
    assert fidelity(sa, sb) >= 1 - 1e-9


@given(seed=st.integers(0, 2**32 - 1), length=st.integers(0, 25))
def test_text_round_trip(seed, length):
    rng = np.random.default_rng(seed)
    lay = RegisterLayout.build(rf=2, rm=1, anc=1, out=1)
    c = Circuit(tuple(random_instance(rng, 5) for _ in range(length)), 5, lay)
    back = loads(dumps(c))
    assert back.instances == c.instances
    assert back.num_qubits == c.num_qubits and back.layout == c.layout


def test_text_format_lines():
    c = circuit([ry(0.5, 2, (0, 1)), x(1), swap(0, 2)])
    lines = dumps(c).splitlines()
    assert lines[0] == "# qubits=3"
    assert lines[1] == "RY(0.5) targets=[2] controls=[0,1]"
    assert lines[2] == "X targets=[1] controls=[]"
    assert lines[3] == "SWAP targets=[0,2] controls=[]"
    with pytest.raises(CircuitError):
        loads("RY(0.5 targets=[0]")


def test_concat_and_repeat():
    a = circuit([x(0)])
    b = circuit([h(1)])
    c = concat(a, b)
    assert len(c) == 2 and c.num_qubits == 2
    assert len(c.repeated(3)) == 6
