import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import equal_up_to_phase, random_instance, unitary
from qmcrisk.decompose import (
    decompose_to_basis,
    decomposed_depth,
    decomposed_profile,
    depth,
    is_basis,
    maxplus_power,
    profile_depth,
    toffoli_network,
    u3_params,
)
from qmcrisk.gates import Circuit, Gate, GateInstance, RegisterLayout, circuit, cnot, h, toffoli, u3, x
from qmcrisk.models import build_d_eq, build_m_max, calibrate_binomial


def test_toffoli_depth_is_eleven():
    net = Circuit(tuple(toffoli_network(0, 1, 2)), 3)
    assert depth(net) == 11
    assert decomposed_depth(circuit([toffoli(0, 1, 2)])) == 11
    assert equal_up_to_phase(unitary(net, 3), unitary(circuit([toffoli(0, 1, 2)]), 3))


def test_depth_layering():
    assert depth(circuit([h(0), h(1), h(2)])) == 1
    assert depth(circuit([h(0), cnot(0, 1), h(2)])) == 2
    assert depth(Circuit((), 3)) == 0


@given(theta=st.floats(-math.pi, math.pi), phi=st.floats(-math.pi, math.pi), lam=st.floats(-math.pi, math.pi))
def test_u3_params_round_trip(theta, phi, lam):
    m = Gate("U3", (theta, phi, lam)).matrix() * np.exp(0.37j)
    alpha, t, p, l = u3_params(m)
    assert np.allclose(np.exp(1j * alpha) * Gate("U3", (t, p, l)).matrix(), m, atol=1e-9)


@pytest.mark.parametrize("kind", ["X", "Z", "H", "RY", "RZ", "P", "U3", "SWAP"])
@pytest.mark.parametrize("nc", [0, 1, 2, 3])
def test_each_template_matches(kind, nc):
    params = {"RY": (0.7,), "RZ": (-1.1,), "P": (0.4,), "U3": (0.3, 1.2, -0.8)}.get(kind, ())
    gate = Gate(kind, params)
    nt = gate.num_targets
    k = nt + nc
    inst = GateInstance(gate, tuple(range(nt)), tuple(range(nt, k)))
    orig = circuit([inst])
    low = decompose_to_basis(orig)
    assert is_basis(low)
    assert equal_up_to_phase(unitary(low, k), unitary(orig, k))


@given(seed=st.integers(0, 2**32 - 1), length=st.integers(1, 8))
def test_decomposition_preserves_unitary(seed, length):
    rng = np.random.default_rng(seed)
    c = Circuit(tuple(random_instance(rng, 4) for _ in range(length)), 4)
    low = decompose_to_basis(c)
    assert is_basis(low)
    assert equal_up_to_phase(unitary(low, 4), unitary(c, 4))


@given(seed=st.integers(0, 2**32 - 1), length=st.integers(0, 20))
def test_profile_depth_matches_materialized(seed, length):
    rng = np.random.default_rng(seed)
    c = Circuit(tuple(random_instance(rng, 5) for _ in range(length)), 5)
    assert decomposed_depth(c) == depth(decompose_to_basis(c))


@given(seed=st.integers(0, 2**32 - 1), length=st.integers(1, 10), reps=st.integers(1, 9))
def test_profile_power_matches_repetition(seed, length, reps):
    rng = np.random.default_rng(seed)
    c = Circuit(tuple(random_instance(rng, 4) for _ in range(length)), 4)
    w = maxplus_power(decomposed_profile(c, 4), reps)
    assert profile_depth(w) == depth(decompose_to_basis(c.repeated(reps)))


@given(seed=st.integers(0, 2**32 - 1), length=st.integers(0, 20))
def test_depth_invariant_under_relabeling(seed, length):
    rng = np.random.default_rng(seed)
    k = 5
    c = Circuit(tuple(random_instance(rng, k) for _ in range(length)), k)
    perm = [int(v) for v in rng.permutation(k)]
    relabeled = Circuit(tuple(g.remap(perm) for g in c.instances), k)
    assert depth(relabeled) == depth(c)
    assert decomposed_depth(relabeled) == decomposed_depth(c)


def test_equity_gate_depth_trends():
    d_depths, m_depths = [], []
    for m in range(3, 10):
        lay = RegisterLayout.build(rf=m, rm=1, anc=m - 2)
        p = calibrate_binomial(0.08, 0.2, 1.0, m)
        d_depths.append(decomposed_depth(build_d_eq(p, lay)))
        m_depths.append(decomposed_depth(build_m_max(m, lay)))
    assert set(d_depths) == {1}
    steps = np.diff(m_depths)
    assert np.all(steps == steps[0]) and steps[0] > 0


def test_single_qubit_identity_dropped():
    low = decompose_to_basis(circuit([u3(0.0, 0.0, 0.0, 0, (1,))]))
    assert equal_up_to_phase(unitary(low, 2), np.eye(4))


def test_x_with_one_control_is_basis():
    assert is_basis(circuit([x(1, (0,))]))
    assert not is_basis(circuit([toffoli(0, 1, 2)]))
