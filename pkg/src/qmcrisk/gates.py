"""Gates, circuits and register layouts.

A :class:`Circuit` is a flat, immutable sequence of :class:`GateInstance`
objects. Composite constructions (AND cascades, OR, QFT networks, the risk
model gates) are plain functions returning circuits, so inversion and
controlled promotion only ever have to deal with primitive gate kinds.

Qubit ``l`` carries bit ``2**l`` of the basis-state index (little-endian).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

ONE_QUBIT_KINDS = ("X", "Z", "H", "RY", "RZ", "P", "U3")
KINDS = ONE_QUBIT_KINDS + ("SWAP",)
_N_PARAMS = {"X": 0, "Z": 0, "H": 0, "RY": 1, "RZ": 1, "P": 1, "U3": 3, "SWAP": 0}
SELF_INVERSE = frozenset({"X", "Z", "H", "SWAP"})

ROLES = ("rf", "st", "c", "rm", "anc", "out")


class CircuitError(ValueError):
    """Invalid gate, instance, layout or circuit construction."""


class AncillaError(CircuitError):
    """A composite builder was given fewer ancillas than it needs."""


@dataclass(frozen=True)
class Gate:
    kind: str
    params: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        if len(self.params) != _N_PARAMS[self.kind]:
            raise CircuitError(
                f"{self.kind} takes {_N_PARAMS[self.kind]} parameters, got {len(self.params)}"
            )
        if not all(math.isfinite(p) for p in self.params):
            raise CircuitError(f"non-finite angle in {self.kind}{self.params}")
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))

    @property
    def num_targets(self) -> int:
        return 2 if self.kind == "SWAP" else 1

    @property
    def is_diagonal(self) -> bool:
        return self.kind in ("Z", "RZ", "P")

    def matrix(self) -> np.ndarray:
        """2x2 unitary of a one-qubit gate."""
        k = self.kind
        if k == "X":
            return np.array([[0, 1], [1, 0]], dtype=complex)
        if k == "Z":
            return np.array([[1, 0], [0, -1]], dtype=complex)
        if k == "H":
            return np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
        if k == "RY":
            c, s = math.cos(self.params[0] / 2), math.sin(self.params[0] / 2)
            return np.array([[c, -s], [s, c]], dtype=complex)
        if k == "RZ":
            h = self.params[0] / 2
            return np.diag([np.exp(-1j * h), np.exp(1j * h)])
        if k == "P":
            return np.diag([1.0, np.exp(1j * self.params[0])]).astype(complex)
        if k == "U3":
            theta, phi, lam = self.params
            c, s = math.cos(theta / 2), math.sin(theta / 2)
            return np.array(
                [
                    [c, -np.exp(1j * lam) * s],
                    [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c],
                ],
                dtype=complex,
            )
        raise CircuitError(f"{k} is not a one-qubit gate")

    def inverse(self) -> Gate:
        if self.kind in SELF_INVERSE:
            return self
        if self.kind == "U3":
            theta, phi, lam = self.params
            return Gate("U3", (-theta, -lam, -phi))
        return Gate(self.kind, (-self.params[0],))

    def label(self) -> str:
        if not self.params:
            return self.kind
        return f"{self.kind}({','.join(repr(p) for p in self.params)})"


@dataclass(frozen=True)
class GateInstance:
    gate: Gate
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "controls", tuple(int(c) for c in self.controls))
        if len(self.targets) != self.gate.num_targets:
            raise CircuitError(
                f"{self.gate.kind} needs {self.gate.num_targets} target(s), got {self.targets}"
            )
        qubits = self.targets + self.controls
        if len(set(qubits)) != len(qubits):
            raise CircuitError(f"duplicate qubit index in {self}")
        if any(q < 0 for q in qubits):
            raise CircuitError(f"negative qubit index in {self}")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.targets + self.controls

    def inverse(self) -> GateInstance:
        return GateInstance(self.gate.inverse(), self.targets, self.controls)

    def with_controls(self, extra: Sequence[int]) -> GateInstance:
        return GateInstance(self.gate, self.targets, self.controls + tuple(extra))

    def remap(self, mapping: Mapping[int, int] | Sequence[int]) -> GateInstance:
        return GateInstance(
            self.gate,
            tuple(mapping[q] for q in self.targets),
            tuple(mapping[q] for q in self.controls),
        )

    def __str__(self) -> str:
        t = ",".join(map(str, self.targets))
        c = ",".join(map(str, self.controls))
        return f"{self.gate.label()} targets=[{t}] controls=[{c}]"


@dataclass(frozen=True)
class RegisterLayout:
    """Assignment of qubit indices to roles (rf, rm, out, anc, c, st)."""

    roles: Mapping[str, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self):
        roles = {}
        for role, qubits in self.roles.items():
            if role not in ROLES:
                raise CircuitError(f"unknown register role {role!r}")
            roles[role] = tuple(int(q) for q in qubits)
        object.__setattr__(self, "roles", roles)
        flat = [q for qs in roles.values() for q in qs]
        if len(set(flat)) != len(flat):
            raise CircuitError("register roles overlap")
        if sorted(flat) != list(range(len(flat))):
            raise CircuitError("register roles must cover 0..num_qubits-1 exactly")

    @classmethod
    def build(cls, **sizes: int) -> RegisterLayout:
        """Allocate contiguous index ranges in canonical role order."""
        roles, nxt = {}, 0
        for role in ROLES:
            size = sizes.pop(role, 0)
            if size < 0:
                raise CircuitError(f"negative size for role {role}")
            if size:
                roles[role] = tuple(range(nxt, nxt + size))
                nxt += size
        if sizes:
            raise CircuitError(f"unknown register role(s) {sorted(sizes)}")
        return cls(roles)

    def __getitem__(self, role: str) -> tuple[int, ...]:
        if role not in ROLES:
            raise CircuitError(f"unknown register role {role!r}")
        return self.roles.get(role, ())

    @property
    def num_qubits(self) -> int:
        return sum(len(q) for q in self.roles.values())

    def size(self, role: str) -> int:
        return len(self[role])

    def single(self, role: str) -> int:
        qs = self[role]
        if len(qs) != 1:
            raise CircuitError(f"layout has {len(qs)} {role!r} qubits, expected 1")
        return qs[0]

    def permuted(self, perm: Sequence[int]) -> RegisterLayout:
        return RegisterLayout({r: tuple(perm[q] for q in qs) for r, qs in self.roles.items()})


@dataclass(frozen=True)
class Circuit:
    instances: tuple[GateInstance, ...] = ()
    num_qubits: int = 0
    layout: RegisterLayout | None = None

    def __post_init__(self):
        instances = tuple(self.instances)
        object.__setattr__(self, "instances", instances)
        needed = max((max(g.qubits) + 1 for g in instances), default=0)
        width = max(self.num_qubits, needed)
        if self.layout is not None:
            if self.layout.num_qubits < needed:
                raise CircuitError(
                    f"layout covers {self.layout.num_qubits} qubits, circuit uses {needed}"
                )
            width = max(width, self.layout.num_qubits)
        object.__setattr__(self, "num_qubits", width)

    def __len__(self) -> int:
        return len(self.instances)

    def __iter__(self) -> Iterator[GateInstance]:
        return iter(self.instances)

    def __add__(self, other: Circuit) -> Circuit:
        return Circuit(
            self.instances + other.instances,
            max(self.num_qubits, other.num_qubits),
            self.layout or other.layout,
        )

    def with_layout(self, layout: RegisterLayout) -> Circuit:
        return Circuit(self.instances, layout.num_qubits, layout)

    def inverse(self) -> Circuit:
        return inverse(self)

    def controlled(self, controls: Sequence[int]) -> Circuit:
        return controlled(self, controls)

    def qubits_used(self) -> set[int]:
        return {q for g in self.instances for q in g.qubits}

    def repeated(self, times: int) -> Circuit:
        return Circuit(self.instances * times, self.num_qubits, self.layout)


def circuit(instances: Iterable[GateInstance], layout: RegisterLayout | None = None) -> Circuit:
    return Circuit(tuple(instances), 0 if layout is None else layout.num_qubits, layout)


def concat(*parts: Circuit, layout: RegisterLayout | None = None) -> Circuit:
    instances = tuple(g for p in parts for g in p.instances)
    width = max((p.num_qubits for p in parts), default=0)
    if layout is None:
        layout = next((p.layout for p in parts if p.layout is not None), None)
    return Circuit(instances, width, layout)


def inverse(circ: Circuit) -> Circuit:
    """Adjoint circuit: reversed order, every gate inverted."""
    return Circuit(tuple(g.inverse() for g in reversed(circ.instances)), circ.num_qubits, circ.layout)


def controlled(circ: Circuit, controls: Sequence[int]) -> Circuit:
    """Add ``controls`` to every instance of ``circ``."""
    controls = tuple(int(c) for c in controls)
    if len(set(controls)) != len(controls):
        raise CircuitError("duplicate control qubit")
    overlap = circ.qubits_used() & set(controls)
    if overlap:
        raise CircuitError(f"control qubits {sorted(overlap)} overlap the circuit's qubits")
    return Circuit(tuple(g.with_controls(controls) for g in circ.instances), circ.num_qubits, circ.layout)


# ---------------------------------------------------------------------------
# primitive constructors


def x(target: int, controls: Sequence[int] = ()) -> GateInstance:
    return GateInstance(Gate("X"), (target,), tuple(controls))


def z(target: int, controls: Sequence[int] = ()) -> GateInstance:
    return GateInstance(Gate("Z"), (target,), tuple(controls))


def h(target: int, controls: Sequence[int] = ()) -> GateInstance:
    return GateInstance(Gate("H"), (target,), tuple(controls))


def ry(theta: float, target: int, controls: Sequence[int] = ()) -> GateInstance:
    return GateInstance(Gate("RY", (theta,)), (target,), tuple(controls))


def rz(theta: float, target: int, controls: Sequence[int] = ()) -> GateInstance:
    return GateInstance(Gate("RZ", (theta,)), (target,), tuple(controls))


def phase(lam: float, target: int, controls: Sequence[int] = ()) -> GateInstance:
    return GateInstance(Gate("P", (lam,)), (target,), tuple(controls))


def u3(theta: float, phi: float, lam: float, target: int, controls: Sequence[int] = ()) -> GateInstance:
    return GateInstance(Gate("U3", (theta, phi, lam)), (target,), tuple(controls))


def swap(a: int, b: int, controls: Sequence[int] = ()) -> GateInstance:
    return GateInstance(Gate("SWAP"), (a, b), tuple(controls))


def cnot(control: int, target: int) -> GateInstance:
    return x(target, (control,))


def toffoli(c1: int, c2: int, target: int) -> GateInstance:
    return x(target, (c1, c2))


# ---------------------------------------------------------------------------
# composite builders


def a_gate(inputs: Sequence[int], ancillas: Sequence[int]) -> tuple[Circuit, int]:
    """Compute half of an AND cascade.

    Writes AND(inputs) to ``ancillas[len(inputs) - 2]`` and leaves the
    intermediate ancillas holding partial products; undo with the inverse.
    Returns the circuit and the qubit holding the result. With a single
    input no gate is emitted and the input itself is the result.
    """
    inputs = tuple(inputs)
    if not inputs:
        raise CircuitError("AND of zero inputs")
    if len(inputs) == 1:
        return Circuit(), inputs[0]
    need = len(inputs) - 1
    if len(ancillas) < need:
        raise AncillaError(f"AND over {len(inputs)} inputs needs {need} ancillas, got {len(ancillas)}")
    gates = [toffoli(inputs[0], inputs[1], ancillas[0])]
    for i in range(2, len(inputs)):
        gates.append(toffoli(ancillas[i - 2], inputs[i], ancillas[i - 1]))
    return circuit(gates), ancillas[need - 1]


def and_cascade(inputs: Sequence[int], ancillas: Sequence[int], result: int) -> Circuit:
    """Flip ``result`` iff all ``inputs`` are |1>; scratch ancillas are restored.

    Needs ``max(0, len(inputs) - 2)`` ancillas in |0>.
    """
    inputs = tuple(inputs)
    k = len(inputs)
    if k == 0:
        return circuit([x(result)])
    if k <= 2:
        return circuit([x(result, inputs)])
    need = k - 2
    if len(ancillas) < need:
        raise AncillaError(f"AND over {k} inputs needs {need} ancillas, got {len(ancillas)}")
    compute, partial = a_gate(inputs[:-1], ancillas[:need])
    final = circuit([toffoli(partial, inputs[-1], result)])
    return compute + final + inverse(compute)


def multi_controlled_x(controls: Sequence[int], ancillas: Sequence[int], target: int) -> Circuit:
    return and_cascade(controls, ancillas, target)


def multi_controlled_z(controls: Sequence[int], ancillas: Sequence[int], target: int) -> Circuit:
    return circuit([h(target)]) + and_cascade(controls, ancillas, target) + circuit([h(target)])


def or_gate(inputs: Sequence[int], ancillas: Sequence[int], target: int) -> Circuit:
    """Flip ``target`` iff any input is |1> (De Morgan over the AND cascade)."""
    inputs = tuple(inputs)
    if not inputs:
        raise CircuitError("OR of zero inputs")
    if len(inputs) == 1:
        return circuit([cnot(inputs[0], target)])
    flips = circuit([x(q) for q in inputs])
    core = and_cascade(inputs, ancillas, target) + circuit([x(target)])
    return flips + core + flips


def or3(a: int = 0, b: int = 1, target: int = 2) -> Circuit:
    return or_gate((a, b), (), target)


def qft(qubits: Sequence[int]) -> Circuit:
    """Fourier transform restricted to the all-zero input: one H per qubit."""
    return circuit([h(q) for q in qubits])


def qft_full(qubits: Sequence[int]) -> Circuit:
    """Complete QFT network: |x> -> 2^{-n/2} sum_z exp(2 pi i x z / 2^n) |z>.

    ``qubits[j]`` carries weight ``2**j`` of both x and z.
    """
    qubits = tuple(qubits)
    n = len(qubits)
    gates = []
    for j in reversed(range(n)):
        gates.append(h(qubits[j]))
        for k in reversed(range(j)):
            gates.append(phase(math.pi / 2 ** (j - k), qubits[j], (qubits[k],)))
    for j in range(n // 2):
        gates.append(swap(qubits[j], qubits[n - 1 - j]))
    return circuit(gates)


def inverse_qft(qubits: Sequence[int]) -> Circuit:
    """Swap network, then H and controlled phase(-pi/2^(l2-l1)) ladder."""
    qubits = tuple(qubits)
    n = len(qubits)
    gates = [swap(qubits[j], qubits[n - 1 - j]) for j in range(n // 2)]
    for l2 in range(n):
        for l1 in range(l2):
            gates.append(phase(-math.pi / 2 ** (l2 - l1), qubits[l2], (qubits[l1],)))
        gates.append(h(qubits[l2]))
    return circuit(gates)


# ---------------------------------------------------------------------------
# text serialization

_LINE = re.compile(
    r"^(?P<kind>[A-Z0-9]+)(?:\((?P<params>[^)]*)\))?\s+targets=\[(?P<t>[^\]]*)\]\s+controls=\[(?P<c>[^\]]*)\]$"
)


def _ints(text: str) -> tuple[int, ...]:
    text = text.strip()
    return tuple(int(v) for v in text.split(",")) if text else ()


def dumps(circ: Circuit) -> str:
    lines = [f"# qubits={circ.num_qubits}"]
    if circ.layout is not None:
        roles = " ".join(
            f"{r}=[{','.join(map(str, qs))}]" for r, qs in circ.layout.roles.items()
        )
        lines.append(f"# layout {roles}")
    lines.extend(str(g) for g in circ.instances)
    return "\n".join(lines) + "\n"


def loads(text: str) -> Circuit:
    num_qubits, layout, gates = 0, None, []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("qubits="):
                num_qubits = int(body.split("=", 1)[1])
            elif body.startswith("layout"):
                roles = {
                    m.group(1): _ints(m.group(2))
                    for m in re.finditer(r"(\w+)=\[([^\]]*)\]", body)
                }
                layout = RegisterLayout(roles)
            continue
        m = _LINE.match(line)
        if m is None:
            raise CircuitError(f"line {lineno}: cannot parse {raw!r}")
        params = tuple(float(p) for p in m.group("params").split(",")) if m.group("params") else ()
        gates.append(GateInstance(Gate(m.group("kind"), params), _ints(m.group("t")), _ints(m.group("c"))))
    return Circuit(tuple(gates), num_qubits, layout)
