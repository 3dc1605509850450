"""Amplitude estimation: Grover operator, phase-kickback ladder, inverse QFT readout."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .decompose import decomposed_profile, maxplus, maxplus_power, profile_depth
from .gates import (
    Circuit,
    CircuitError,
    RegisterLayout,
    a_gate,
    circuit,
    concat,
    controlled,
    inverse,
    inverse_qft,
    qft,
    x,
    z,
)
from .statevector import (
    OutcomeHistogram,
    Program,
    StateVector,
    check_capacity,
    marginal_distribution,
    new_zero_state,
    sample,
)

TIE_TOL = 1e-12


@dataclass(frozen=True)
class QaeProblem:
    """D and M over the input qubits plus n output qubits.

    ``reflect`` lists the qubits Q00 reflects about |0...0>. It must contain
    everything D writes plus rm; it defaults to rf + st + rm. Every other
    non-output qubit is scratch that D and M leave in |0>, and Q00 borrows
    those as its cascade ancillas.
    """

    d: Circuit
    m: Circuit
    layout: RegisterLayout
    n: int
    reflect: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.n < 1:
            raise CircuitError(f"need at least one output qubit, got n={self.n}")
        out = self.layout["out"]
        if len(out) != self.n:
            raise CircuitError(f"layout has {len(out)} output qubits, problem says n={self.n}")
        if out != tuple(range(out[0], out[0] + self.n)):
            raise CircuitError("output qubits must be contiguous")
        touched = (self.d.qubits_used() | self.m.qubits_used()) & set(out)
        if touched:
            raise CircuitError(f"D/M act on output qubits {sorted(touched)}")
        reflect = self.reflect
        if reflect is None:
            reflect = self.layout["rf"] + self.layout["st"] + self.layout["rm"]
        reflect = tuple(sorted(set(reflect)))
        if self.layout.single("rm") not in reflect:
            raise CircuitError("reflection qubits must include rm")
        if set(reflect) & set(out):
            raise CircuitError("reflection qubits overlap the output register")
        object.__setattr__(self, "reflect", reflect)

    @property
    def num_qubits(self) -> int:
        return self.layout.num_qubits

    @property
    def input_qubits(self) -> tuple[int, ...]:
        out = set(self.layout["out"])
        return tuple(q for q in range(self.num_qubits) if q not in out)


@dataclass
class EstimationResult:
    histogram: OutcomeHistogram
    n: int
    z0: int
    theta: float
    p_est: float
    delta_p: float
    folded: np.ndarray
    p_exact_pair: tuple[float, float] | None = None
    mode: str = "exact"
    engine: str = "statevector"
    num_qubits: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return 1 << self.n

    def peak_mass(self) -> float:
        """Probability on z0 and N - z0 (counted once when they coincide)."""
        return float(self.folded[self.z0])


def q00_ancillas(num_reflect: int) -> int:
    """Cascade ancillas for Q00 over ``num_reflect`` qubits (rm included)."""
    k = num_reflect - 1
    return k - 1 if k >= 2 else 0


def build_q_psi0(layout: RegisterLayout) -> Circuit:
    """Phase -1 on the rm=|0> component: X Z X on rm."""
    rm = layout.single("rm")
    return circuit([x(rm), z(rm), x(rm)], layout)


def build_q00(layout: RegisterLayout, reflect=None, ancillas=None) -> Circuit:
    """-1 on |0...0> of the reflection qubits, identity elsewhere.

    X on all reflection qubits, AND of the non-rm ones into an ancilla,
    CZ onto rm, uncompute, X again.
    """
    rm = layout.single("rm")
    if reflect is None:
        reflect = layout["rf"] + layout["st"] + layout["rm"]
    reflect = tuple(sorted(set(reflect)))
    if ancillas is None:
        banned = set(reflect) | set(layout["out"])
        ancillas = tuple(q for q in range(layout.num_qubits) if q not in banned)
    inputs = tuple(q for q in reflect if q != rm)
    flips = circuit([x(q) for q in reflect])
    if not inputs:
        core = circuit([z(rm)])
    else:
        need = q00_ancillas(len(reflect))
        if len(ancillas) < need:
            raise CircuitError(f"Q00 over {len(reflect)} qubits needs {need} ancillas, got {len(ancillas)}")
        compute, result = a_gate(inputs, ancillas)
        core = compute + circuit([z(rm, (result,))]) + inverse(compute)
    return (flips + core + flips).with_layout(layout)


def build_q(problem: QaeProblem) -> Circuit:
    """Q = Q_psi Q_psi0 with Q_psi = M D Q00 D^dag M^dag (rightmost acts first)."""
    lay = problem.layout
    return concat(
        build_q_psi0(lay),
        inverse(problem.m),
        inverse(problem.d),
        build_q00(lay, problem.reflect),
        problem.d,
        problem.m,
        layout=lay,
    )


def build_full_circuit(problem: QaeProblem, q: Circuit | None = None) -> Circuit:
    """D, M, H on outputs, 2^l controlled-Q from out[l], inverse QFT."""
    lay = problem.layout
    out = lay["out"]
    q = build_q(problem) if q is None else q
    parts = [problem.d, problem.m, qft(out)]
    for l, ctrl in enumerate(out):
        parts.append(controlled(q, [ctrl]).repeated(1 << l))
    parts.append(inverse_qft(out))
    return concat(*parts, layout=lay)


def error_bound(theta: float, n: int) -> float:
    """delta_p = sin(theta) pi / 2^n."""
    if not -1e-12 <= theta <= math.pi + 1e-12:
        raise ValueError(f"theta={theta} outside [0, pi]")
    return math.sin(theta) * math.pi / (1 << n)


def theta_of(p: float) -> float:
    """Angle with p = sin^2(theta / 2)."""
    return 2 * math.asin(math.sqrt(min(max(p, 0.0), 1.0)))


def fold(z: int, n: int) -> int:
    return min(z, (1 << n) - z)


def p_from_z(z: int, n: int) -> float:
    return math.sin(math.pi * z / (1 << n)) ** 2


def fold_histogram(probs: np.ndarray, n: int) -> np.ndarray:
    """Mass of each folded bin 0..N/2."""
    N = 1 << n
    half = N // 2
    folded = np.zeros(half + 1)
    folded[0] = probs[0]
    for zz in range(1, half + 1):
        folded[zz] = probs[zz] if zz == N - zz else probs[zz] + probs[N - zz]
    return folded


def select_z0(folded: np.ndarray) -> int:
    """Heaviest folded bin; ties within TIE_TOL go to the smaller z."""
    top = folded.max()
    return int(np.flatnonzero(folded >= top - TIE_TOL)[0])


def peak_locations(p: float, n: int) -> tuple[float, float]:
    """Real-valued outcomes N theta / 2 pi and N - N theta / 2 pi for the true p."""
    N = 1 << n
    loc = N * theta_of(p) / (2 * math.pi)
    return loc, N - loc


# ---------------------------------------------------------------------------
# simulation engines


def run_statevector(problem: QaeProblem, q: Circuit | None = None) -> StateVector:
    """Gate-by-gate simulation of the full circuit on the whole register."""
    check_capacity(problem.num_qubits)
    lay = problem.layout
    k = problem.num_qubits
    q = build_q(problem) if q is None else q
    state = new_zero_state(k)
    Program(concat(problem.d, problem.m, qft(lay["out"])), k).run(state)
    for l, ctrl in enumerate(lay["out"]):
        Program(controlled(q, [ctrl]), k).run(state, repeat=1 << l)
    Program(inverse_qft(lay["out"]), k).run(state)
    return state


def output_distribution_branch(problem: QaeProblem, q: Circuit | None = None) -> np.ndarray:
    """Exact output distribution using the block structure of the ladder.

    With the outputs in |x> after the Hadamards, the input register holds
    Q^x|psi>, so the pre-readout state is sum_x |x> Q^x|psi> / sqrt(N) and the
    inverse QFT is a DFT along x. Only the input register is simulated.
    """
    lay = problem.layout
    out = lay["out"]
    if out[-1] != problem.num_qubits - 1:
        raise CircuitError("branch engine expects the output register on the top qubits")
    k_in = problem.num_qubits - problem.n
    # the N branches together hold as many amplitudes as the full register
    check_capacity(problem.num_qubits)
    q = build_q(problem) if q is None else q
    N = 1 << problem.n
    state = new_zero_state(k_in)
    Program(concat(problem.d, problem.m), k_in).run(state)
    step = Program(q, k_in)
    branches = np.empty((N, 1 << k_in), dtype=np.complex128)
    for xx in range(N):
        branches[xx] = state.amplitudes
        if xx + 1 < N:
            step.run(state)
    probs = np.zeros(N)
    block = max(1, (1 << 16) // N)
    for lo in range(0, 1 << k_in, block):
        amps = np.fft.fft(branches[:, lo:lo + block], axis=0) / N
        probs += np.sum(amps.real ** 2 + amps.imag ** 2, axis=1)
    return probs


def estimate(
    problem: QaeProblem,
    mode: str = "exact",
    shots: int = 10_000,
    seed: int = 0,
    engine: str = "statevector",
    p_reference: float | None = None,
) -> EstimationResult:
    """Simulate, read the output register, fold and pick z0.

    ``engine="statevector"`` runs every gate of the full circuit;
    ``engine="branch"`` computes the same output distribution from the input
    register alone.
    """
    n = problem.n
    out = problem.layout["out"]
    if engine == "statevector":
        state = run_statevector(problem)
        exact_hist = marginal_distribution(state, out)
    elif engine == "branch":
        exact_hist = OutcomeHistogram(out, output_distribution_branch(problem))
        state = None
    else:
        raise ValueError(f"unknown engine {engine!r}")

    if mode == "exact":
        hist = exact_hist
        weights = hist.data
    elif mode == "shots":
        if state is None:
            state = StateVector.from_amplitudes(np.sqrt(exact_hist.data))
            hist = sample(state, range(n), shots, seed)
            hist = OutcomeHistogram(out, hist.data, hist.shots)
        else:
            hist = sample(state, out, shots, seed)
        weights = hist.data.astype(float)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    folded = fold_histogram(np.asarray(weights, dtype=float), n)
    if mode == "shots":
        folded = folded / shots
    z0 = select_z0(folded)
    theta = 2 * math.pi * z0 / (1 << n)
    return EstimationResult(
        histogram=hist,
        n=n,
        z0=z0,
        theta=theta,
        p_est=p_from_z(z0, n),
        delta_p=error_bound(theta, n),
        folded=folded,
        p_exact_pair=None if p_reference is None else peak_locations(p_reference, n),
        mode=mode,
        engine=engine,
        num_qubits=problem.num_qubits,
        extra={"exact_distribution": exact_hist.data},
    )


def full_circuit_decomposed_depth(problem: QaeProblem, q: Circuit | None = None) -> int:
    """Depth of the lowered full circuit, using max-plus powers for the ladder."""
    lay = problem.layout
    k = problem.num_qubits
    q = build_q(problem) if q is None else q
    w = decomposed_profile(concat(problem.d, problem.m, qft(lay["out"])), k)
    for l, ctrl in enumerate(lay["out"]):
        step = decomposed_profile(controlled(q, [ctrl]), k)
        w = maxplus(w, maxplus_power(step, 1 << l))
    w = maxplus(w, decomposed_profile(inverse_qft(lay["out"]), k))
    return profile_depth(w)
