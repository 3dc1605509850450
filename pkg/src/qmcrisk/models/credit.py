"""Credit models: structural default counting (M_def) and hazard-rate survival (D_surv)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from ..gates import Circuit, CircuitError, RegisterLayout, circuit, concat, inverse, multi_controlled_x, or_gate, ry, x
from .equity import BinomialParams, CalibrationError, build_m_min


@dataclass(frozen=True)
class HazardParams:
    """Per-step default probability and the rotation angles that encode it."""

    q_def: float
    m: int
    T: float
    dt: float
    theta_def: float
    theta_def_c: float
    t_def: float | None = None
    hazard_rate: float | None = None

    @property
    def theta_def_degrees(self) -> float:
        return math.degrees(self.theta_def)


def calibrate_hazard(
    q_def: float | None = None, m: int = 6, T: float = 1.0, hazard_rate: float | None = None
) -> HazardParams:
    """Build from q_def directly, or from lambda via q_def = 1 - exp(-dt * lambda)."""
    if m < 1:
        raise CalibrationError(f"m must be >= 1, got {m}")
    if not T > 0:
        raise CalibrationError(f"T must be > 0, got {T}")
    dt = T / m
    t_def = None
    if hazard_rate is not None:
        if q_def is not None:
            raise CalibrationError("give either q_def or hazard_rate, not both")
        if hazard_rate < 0:
            raise CalibrationError(f"hazard rate must be >= 0, got {hazard_rate}")
        q_def = -math.expm1(-dt * hazard_rate)
        t_def = math.inf if hazard_rate == 0 else 1 / hazard_rate
    if q_def is None:
        raise CalibrationError("q_def or hazard_rate is required")
    if not 0.0 <= q_def <= 1.0:
        raise CalibrationError(f"q_def={q_def} outside [0, 1]")
    theta = 2 * math.asin(math.sqrt(q_def))
    return HazardParams(q_def, m, T, dt, theta, math.pi - theta, t_def, hazard_rate)


@dataclass(frozen=True)
class DefaultRegion:
    """Up-move counts j whose terminal asset value is at or below the barrier."""

    j_set: frozenset
    barrier: str = ""

    def __post_init__(self):
        object.__setattr__(self, "j_set", frozenset(int(j) for j in self.j_set))

    @classmethod
    def from_barrier(cls, params: BinomialParams, a0: float, d_t: float) -> DefaultRegion:
        """j_set = {j : A0 u^j d^(m-j) <= D_T}, with a 1e-12 relative tolerance."""
        m = params.m
        js = {
            j
            for j in range(m + 1)
            if a0 * params.u ** j * params.d ** (m - j) <= d_t * (1 + 1e-12)
        }
        return cls(frozenset(js), f"D_T={d_t:g} (A0={a0:g})")

    @classmethod
    def from_down_steps(cls, m: int, k: int) -> DefaultRegion:
        """Barrier D_T = A0 d^k: default iff j - (m - j) <= -k."""
        js = {j for j in range(m + 1) if 2 * j - m <= -k}
        return cls(frozenset(js), f"D_T=A0*d^{k}")

    def validate(self, m: int) -> None:
        if not self.j_set:
            raise CircuitError("default region is empty")
        bad = [j for j in self.j_set if not 0 <= j <= m]
        if bad:
            raise CircuitError(f"j values {sorted(bad)} outside 0..{m}")


def count_qubits(m: int) -> int:
    """ceil(log2(m + 1)) bits hold any count in 0..m."""
    return max(1, int(m).bit_length())


def m_def_ancillas(m: int, j_set: Iterable[int]) -> int:
    s = count_qubits(m)
    return max(s - 2, len(set(j_set)) - 2, 0)


def build_counter(m: int, layout: RegisterLayout) -> Circuit:
    """Add the number of |1> rf qubits into the c register (C_l per rf qubit)."""
    rf, c, anc = layout["rf"], layout["c"], layout["anc"]
    if len(rf) != m:
        raise CircuitError(f"layout has {len(rf)} rf qubits, model needs {m}")
    s = count_qubits(m)
    if len(c) < s:
        raise CircuitError(f"count register has {len(c)} qubits, need {s}")
    gates = Circuit()
    for q in rf:
        # increment: bit i flips when the lower bits are all 1; high bits first
        for i in reversed(range(s)):
            gates = gates + multi_controlled_x((q,) + c[:i], anc, c[i])
    return gates


def _read_count(j: int, layout: RegisterLayout, s: int, target: int) -> Circuit:
    """J_j: flip ``target`` iff the count register equals j."""
    c, anc = layout["c"][:s], layout["anc"]
    flips = circuit([x(c[i]) for i in range(s) if not (j >> i) & 1])
    return flips + multi_controlled_x(c, anc, target) + flips


def build_m_def(params: BinomialParams, region: DefaultRegion, layout: RegisterLayout) -> Circuit:
    """Count up moves, mark counts in the default region, OR onto rm, uncompute."""
    m = params.m
    region.validate(m)
    s = count_qubits(m)
    js = sorted(region.j_set)
    st = layout["st"]
    if len(st) < len(js):
        raise CircuitError(f"need {len(js)} st qubits, layout has {len(st)}")
    need = m_def_ancillas(m, js)
    if layout.size("anc") < need:
        raise CircuitError(f"M_def needs {need} ancillas, layout has {layout.size('anc')}")
    count = build_counter(m, layout)
    marks = concat(*[_read_count(j, layout, s, st[i]) for i, j in enumerate(js)])
    flag = or_gate(st[: len(js)], layout["anc"], layout.single("rm"))
    return concat(count, marks, flag, inverse(marks), inverse(count)).with_layout(layout)


def build_d_surv(params: HazardParams, layout: RegisterLayout) -> Circuit:
    """Ry(theta_def) per step, preceded for l >= 1 by Ry(pi - theta_def) controlled on step l-1.

    A defaulted step forces the next one to Ry(pi)|0> = |1>, so default absorbs.
    """
    rf = layout["rf"]
    if len(rf) != params.m:
        raise CircuitError(f"layout has {len(rf)} rf qubits, model needs {params.m}")
    gates = [ry(params.theta_def, rf[0])]
    for l in range(1, params.m):
        gates.append(ry(params.theta_def_c, rf[l], (rf[l - 1],)))
        gates.append(ry(params.theta_def, rf[l]))
    return circuit(gates, layout)


def build_m_surv(m: int, layout: RegisterLayout) -> Circuit:
    """Survival to T is the all-|0> rf pattern, i.e. M_min."""
    return build_m_min(m, layout)
